use graph_core::{ancestors_avoiding, districts, induced_subgraph, latent_project, materialize_bidirected, CausalGraph, VertexSet};

use crate::IdError;

/// One factor of the district factorization.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DistrictTarget {
    pub district: VertexSet,
    /// `V* \ D`: the context of the target kernel `p(D ‖ V* \ D)`.
    pub context: VertexSet,
    /// `pa(D) \ D` in `G(V*)`; the target is constant in the rest of the
    /// context.
    pub parents: VertexSet,
}

/// Latent projection set, kept variables and district targets for a query.
#[derive(Clone, Debug)]
pub struct Targets {
    /// `H`: latents plus the observed vertices projected away.
    pub h: VertexSet,
    pub v_star: VertexSet,
    /// Ancestors of `Y` in `G(V*)` through directed paths avoiding `A`.
    pub y_star: VertexSet,
    /// `G(V*)` in the slots of the materialized graph.
    pub projected: CausalGraph,
    pub targets: Vec<DistrictTarget>,
}

impl Targets {
    pub fn total_size(&self) -> usize {
        self.targets.iter().map(|t| t.district.len()).sum()
    }
}

/// District targets for `p(Y ‖ A)` after projecting out `latents ∪ extra`.
/// `g` is the materialized hidden-variable graph (see
/// [`graph_core::materialize_bidirected`]).
pub fn district_targets(g: &CausalGraph, a: VertexSet, y: VertexSet, extra: VertexSet) -> Result<Targets, IdError> {
    let h = g.latent() | extra;
    if !(a | y).is_disjoint(h) {
        return Err(IdError::Query("treatment and outcome must stay outside H".into()));
    }
    if !(a | y).is_subset(g.observed()) || !a.is_disjoint(y) || y.is_empty() {
        return Err(IdError::Query("treatment and outcome must be disjoint observed sets".into()));
    }
    let v_star = g.vertices() - h;
    let projected = latent_project(g, v_star)?;
    let y_star = ancestors_avoiding(&projected, y, a);
    let sub = induced_subgraph(&projected, y_star)?;
    let targets = districts(&sub)
        .into_iter()
        .map(|d| {
            let parents = d.iter().fold(VertexSet::EMPTY, |acc, v| acc | projected.parents_of(v)) - d;
            DistrictTarget { district: d, context: v_star - d, parents }
        })
        .collect();
    Ok(Targets { h, v_star, y_star, projected, targets })
}

/// `district_targets` on a graph that may still carry bidirected edges.
pub fn district_targets_of(g: &CausalGraph, a: VertexSet, y: VertexSet, extra: VertexSet) -> Result<Targets, IdError> {
    district_targets(&materialize_bidirected(g)?, a, y, extra)
}
