use crate::graph::CausalGraph;
use crate::vertex_set::VertexSet;
use crate::GraphError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Parents,
    Children,
    Ancestors,
    Descendants,
}

/// Kinship closure over directed edges. Ancestors and descendants include
/// `s` itself.
pub fn kinship(g: &CausalGraph, s: VertexSet, relation: Relation) -> Result<VertexSet, GraphError> {
    g.check_subset(s)?;
    Ok(match relation {
        Relation::Parents => s.iter().fold(VertexSet::EMPTY, |acc, v| acc | g.parents_of(v)),
        Relation::Children => s.iter().fold(VertexSet::EMPTY, |acc, v| acc | g.children_of(v)),
        Relation::Ancestors => ancestors(g, s),
        Relation::Descendants => descendants(g, s),
    })
}

pub fn ancestors(g: &CausalGraph, s: VertexSet) -> VertexSet {
    let mut out = s & g.vertices();
    let mut frontier = out;
    while let Some(v) = frontier.first() {
        frontier.remove(v);
        let new = g.parents_of(v) - out;
        out = out | new;
        frontier = frontier | new;
    }
    out
}

pub fn descendants(g: &CausalGraph, s: VertexSet) -> VertexSet {
    let ch: Vec<VertexSet> = (0..g.slot_count())
        .map(|v| if g.vertices().contains(v) { g.children_of(v) } else { VertexSet::EMPTY })
        .collect();
    let mut out = s & g.vertices();
    let mut frontier = out;
    while let Some(v) = frontier.first() {
        frontier.remove(v);
        let new = ch[v] - out;
        out = out | new;
        frontier = frontier | new;
    }
    out
}

/// Ancestors of `targets` reachable through directed paths that avoid
/// `blocked` (no vertex of the path, endpoints included, lies in `blocked`).
pub fn ancestors_avoiding(g: &CausalGraph, targets: VertexSet, blocked: VertexSet) -> VertexSet {
    let mut out = targets - blocked;
    let mut frontier = out;
    while let Some(v) = frontier.first() {
        frontier.remove(v);
        let new = g.parents_of(v) - blocked - out;
        out = out | new;
        frontier = frontier | new;
    }
    out
}

/// d-separation of `x` and `y` given `z`.
///
/// A bidirected edge behaves as a fresh latent common parent. Context
/// vertices are constants and are conditioned on implicitly.
pub fn d_separated(
    g: &CausalGraph,
    x: VertexSet,
    y: VertexSet,
    z: VertexSet,
) -> Result<bool, GraphError> {
    g.check_subset(x | y | z)?;
    if !x.is_disjoint(y) || !x.is_disjoint(z) || !y.is_disjoint(z) {
        return Err(GraphError::OverlappingSets);
    }
    if x.is_empty() || y.is_empty() {
        return Ok(true);
    }
    let z = z | (g.context() - x - y);
    let anc_z = ancestors(g, z);
    let children: Vec<VertexSet> = (0..g.slot_count())
        .map(|v| if g.vertices().contains(v) { g.children_of(v) } else { VertexSet::EMPTY })
        .collect();

    // (vertex, arrived_from_child)
    let mut seen_up = VertexSet::EMPTY;
    let mut seen_down = VertexSet::EMPTY;
    let mut stack: Vec<(usize, bool)> = x.iter().map(|v| (v, true)).collect();
    while let Some((v, up)) = stack.pop() {
        let seen = if up { &mut seen_up } else { &mut seen_down };
        if seen.contains(v) {
            continue;
        }
        seen.insert(v);
        if y.contains(v) {
            return Ok(false);
        }
        let in_z = z.contains(v);
        if up {
            if !in_z {
                stack.extend(g.parents_of(v).iter().map(|p| (p, true)));
                stack.extend(g.siblings_of(v).iter().map(|s| (s, false)));
                stack.extend(children[v].iter().map(|c| (c, false)));
            }
        } else {
            if !in_z {
                stack.extend(children[v].iter().map(|c| (c, false)));
            }
            if anc_z.contains(v) {
                stack.extend(g.parents_of(v).iter().map(|p| (p, true)));
                stack.extend(g.siblings_of(v).iter().map(|s| (s, false)));
            }
        }
    }
    Ok(true)
}

/// Name of the context half created when splitting `v`.
pub fn split_name(v: &str) -> String {
    format!("{}@{}", v, v.to_lowercase())
}

/// Single-world intervention graph: each `v` in `a` keeps a random half with
/// its incoming edges, and a new context half `split_name(v)` takes over its
/// outgoing directed edges.
pub fn swig(g: &CausalGraph, a: VertexSet) -> Result<CausalGraph, GraphError> {
    g.check_subset(a)?;
    if let Some(v) = (a & g.context()).first() {
        return Err(GraphError::ContextVertex(g.name(v).to_string()));
    }
    let mut out = g.clone();
    let mut context = g.context();
    for v in a {
        let hat = out.push_vertex(split_name(g.name(v)))?;
        context.insert(hat);
        let pa = out.pa_mut();
        for c in g.vertices() {
            if g.parents_of(c).contains(v) {
                pa[c].remove(v);
                pa[c].insert(hat);
            }
        }
    }
    out.set_context(context);
    Ok(out)
}

/// Latent projection onto `keep`.
pub fn latent_project(g: &CausalGraph, keep: VertexSet) -> Result<CausalGraph, GraphError> {
    g.check_subset(keep)?;
    if !g.context().is_subset(keep) {
        return Err(GraphError::ContextDropped);
    }
    let dropped = g.vertices() - keep;
    let n = g.slot_count();

    // dropped vertices with a directed path into v whose interior is dropped
    let mut dropped_anc = vec![VertexSet::EMPTY; n];
    for v in keep {
        let mut acc = VertexSet::EMPTY;
        let mut frontier = g.parents_of(v) & dropped;
        while let Some(d) = frontier.first() {
            frontier.remove(d);
            if acc.contains(d) {
                continue;
            }
            acc.insert(d);
            frontier = frontier | ((g.parents_of(d) & dropped) - acc);
        }
        dropped_anc[v] = acc;
    }

    let mut pa = vec![VertexSet::EMPTY; n];
    let mut sib = vec![VertexSet::EMPTY; n];
    for v in keep {
        let mut p = g.parents_of(v) & keep;
        for d in dropped_anc[v] {
            p = p | (g.parents_of(d) & keep);
        }
        pa[v] = p;
    }
    let kept: Vec<usize> = keep.to_vec();
    for (i, &a) in kept.iter().enumerate() {
        for &b in &kept[i + 1..] {
            let ca = dropped_anc[a].with(a);
            let cb = dropped_anc[b].with(b);
            let common = !(dropped_anc[a] & dropped_anc[b]).is_empty();
            let bridged = ca.iter().any(|x| !(g.siblings_of(x) & cb).is_empty());
            if common || bridged {
                sib[a].insert(b);
                sib[b].insert(a);
            }
        }
    }
    Ok(g.with_parts(keep, pa, sib, g.context()))
}

/// Subgraph induced on `keep`: edges with both endpoints in `keep`.
pub fn induced_subgraph(g: &CausalGraph, keep: VertexSet) -> Result<CausalGraph, GraphError> {
    g.check_subset(keep)?;
    let n = g.slot_count();
    let mut pa = vec![VertexSet::EMPTY; n];
    let mut sib = vec![VertexSet::EMPTY; n];
    for v in keep {
        pa[v] = g.parents_of(v) & keep;
        sib[v] = g.siblings_of(v) & keep;
    }
    Ok(g.with_parts(keep, pa, sib, g.context() & keep))
}

/// Bidirected-connected components of the random vertices, ordered by their
/// least vertex.
pub fn districts(g: &CausalGraph) -> Vec<VertexSet> {
    let random = g.random();
    let mut assigned = VertexSet::EMPTY;
    let mut out = Vec::new();
    for v in random {
        if assigned.contains(v) {
            continue;
        }
        let d = district_of(g, v);
        assigned = assigned | d;
        out.push(d);
    }
    out
}

/// District of a random vertex.
pub fn district_of(g: &CausalGraph, v: usize) -> VertexSet {
    let random = g.random();
    let mut d = VertexSet::singleton(v);
    let mut frontier = d;
    while let Some(u) = frontier.first() {
        frontier.remove(u);
        let new = (g.siblings_of(u) & random) - d;
        d = d | new;
        frontier = frontier | new;
    }
    d
}

/// Conditional ADMG for the kernel p(R ‖ S): project onto R ∪ S, then cut
/// every edge into S.
pub fn cadmg(g_full: &CausalGraph, r: VertexSet, s: VertexSet) -> Result<CausalGraph, GraphError> {
    if !r.is_disjoint(s) {
        return Err(GraphError::OverlappingSets);
    }
    let projected = latent_project(g_full, r | s | g_full.context())?;
    let n = projected.slot_count();
    let mut pa: Vec<VertexSet> = (0..n).map(|v| projected.parents_of(v)).collect();
    let mut sib: Vec<VertexSet> = (0..n).map(|v| projected.siblings_of(v)).collect();
    for v in s {
        pa[v] = VertexSet::EMPTY;
        for u in sib[v] {
            sib[u].remove(v);
        }
        sib[v] = VertexSet::EMPTY;
    }
    Ok(projected.with_parts(projected.vertices(), pa, sib, projected.context() | s))
}

fn check_random(g: &CausalGraph, b: usize) -> Result<(), GraphError> {
    if !g.vertices().contains(b) {
        return Err(GraphError::UnknownVertex(
            g.names().get(b).cloned().unwrap_or_else(|| format!("#{b}")),
        ));
    }
    if g.context().contains(b) {
        return Err(GraphError::ContextVertex(g.name(b).to_string()));
    }
    Ok(())
}

/// `dis(b) ∩ de(b) \ {b}`; empty exactly when `b` is fixable.
pub fn fixability_witness(g: &CausalGraph, b: usize) -> Result<VertexSet, GraphError> {
    check_random(g, b)?;
    let dis = district_of(g, b);
    let de = descendants(g, VertexSet::singleton(b));
    Ok((dis & de).without(b))
}

pub fn fixable(g: &CausalGraph, b: usize) -> Result<bool, GraphError> {
    Ok(fixability_witness(g, b)?.is_empty())
}

/// Random vertices in the district of `b` or parents of it, minus `b` and
/// the context.
pub fn markov_blanket(g: &CausalGraph, b: usize) -> Result<VertexSet, GraphError> {
    check_random(g, b)?;
    let dis = district_of(g, b);
    let pa = dis.iter().fold(VertexSet::EMPTY, |acc, v| acc | g.parents_of(v));
    Ok(((dis | pa) - g.context()).without(b))
}

/// Replace every bidirected edge `u <-> v` by a fresh latent vertex with
/// children `u` and `v`. Latent names are `L_u_v`.
pub fn materialize_bidirected(g: &CausalGraph) -> Result<CausalGraph, GraphError> {
    let mut out = g.clone();
    let edges = g.bidirected_edges();
    let mut latent = g.latent();
    for (a, b) in edges {
        let l = out.push_vertex(format!("L_{}_{}", g.name(a), g.name(b)))?;
        latent.insert(l);
        out.sib_mut()[a].remove(b);
        out.sib_mut()[b].remove(a);
        out.pa_mut()[a].insert(l);
        out.pa_mut()[b].insert(l);
    }
    out.set_latent(latent);
    Ok(out)
}
