use graph_core::{materialize_bidirected, CausalGraph, VertexSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;

use crate::table::{Table, Var};
use crate::OracleError;

pub const DEFAULT_FLOOR: f64 = 1e-3;

pub fn vars_of(s: VertexSet) -> Vec<Var> {
    s.iter().map(|v| v as Var).collect()
}

/// Discrete causal model: one CPT `p(v | pa(v))` per vertex of a DAG that
/// may contain latent vertices but no bidirected edges.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteModel {
    graph: CausalGraph,
    cards: Vec<usize>,
    cpts: Vec<Option<Table>>,
}

impl DiscreteModel {
    /// `cards` and `cpts` are indexed by vertex slot. Each CPT must be a
    /// table over `pa(v) ∪ {v}` whose rows sum to one.
    pub fn new(graph: CausalGraph, cards: Vec<usize>, cpts: Vec<Option<Table>>) -> Result<Self, OracleError> {
        let bad = |m: String| Err(OracleError::BadModel(m));
        if !graph.bidirected_edges().is_empty() {
            return bad("bidirected edges must be replaced by explicit latents".into());
        }
        if !graph.context().is_empty() {
            return bad("model graphs cannot have context vertices".into());
        }
        if cards.len() < graph.slot_count() || cpts.len() < graph.slot_count() {
            return bad("cardinalities or tables missing".into());
        }
        for v in graph.vertices() {
            let name = graph.name(v);
            if cards[v] == 0 {
                return bad(format!("`{name}` has no states"));
            }
            let Some(t) = &cpts[v] else {
                return bad(format!("`{name}` has no table"));
            };
            let want = vars_of(graph.parents_of(v).with(v));
            if t.vars() != want.as_slice() {
                return bad(format!("table of `{name}` is not over its family"));
            }
            for (var, &c) in t.vars().iter().zip(t.cards()) {
                if c != cards[*var as usize] {
                    return bad(format!("table of `{name}` has wrong cardinality"));
                }
            }
            if t.data().iter().any(|&p| !(0.0..=1.0 + 1e-12).contains(&p)) {
                return bad(format!("table of `{name}` has an entry outside [0,1]"));
            }
            if t.normalization_error(&[v as Var]) > 1e-12 {
                return bad(format!("rows of `{name}` do not sum to 1"));
            }
        }
        Ok(DiscreteModel { graph, cards, cpts })
    }

    pub fn graph(&self) -> &CausalGraph {
        &self.graph
    }

    pub fn card(&self, v: usize) -> usize {
        self.cards[v]
    }

    pub fn cards(&self) -> &[usize] {
        &self.cards
    }

    pub fn cpt(&self, v: usize) -> &Table {
        self.cpts[v].as_ref().expect("present vertex has a table")
    }

    /// Smallest CPT entry; the positivity floor of a generated model.
    pub fn min_entry(&self) -> f64 {
        self.graph
            .vertices()
            .iter()
            .flat_map(|v| self.cpt(v).data().to_vec())
            .fold(f64::INFINITY, f64::min)
    }

    fn product_except(&self, skip: VertexSet, keep: VertexSet) -> Result<Table, OracleError> {
        // eliminate variables in reverse topological order as soon as no
        // remaining factor mentions them, so intermediate tables stay small
        let keep_vars = vars_of(keep);
        let mut acc = Table::scalar(1.0);
        let order = self.graph.topological_order();
        let factors: Vec<usize> = order.iter().copied().filter(|v| !skip.contains(*v)).collect();
        for (i, &v) in factors.iter().enumerate() {
            acc = acc.product(self.cpt(v))?;
            let later: VertexSet = factors[i + 1..]
                .iter()
                .fold(VertexSet::EMPTY, |s, &u| s | self.graph.parents_of(u).with(u));
            let drop: Vec<Var> =
                acc.vars().iter().copied().filter(|&x| !keep_vars.contains(&x) && !later.contains(x as usize)).collect();
            if !drop.is_empty() {
                acc = acc.sum_out(&drop);
            }
        }
        Ok(acc.marginal(&keep_vars))
    }

    /// Joint over all vertices, latent ones included.
    pub fn joint(&self) -> Result<Table, OracleError> {
        self.product_except(VertexSet::EMPTY, self.graph.vertices())
    }

    /// Joint over the observed vertices.
    pub fn observed_joint(&self) -> Result<Table, OracleError> {
        self.product_except(VertexSet::EMPTY, self.graph.observed())
    }

    /// Truncated factorization: the distribution of `V \ a` after setting
    /// `a` to `a_val` (states listed in slot order of `a`).
    pub fn g_formula(&self, a: VertexSet, a_val: &[usize]) -> Result<Table, OracleError> {
        if a_val.len() != a.len() {
            return Err(OracleError::Shape("intervention value has the wrong length".into()));
        }
        let rest = self.graph.vertices() - a;
        let mut t = self.product_except(a, rest | a)?;
        for (v, &x) in a.iter().zip(a_val) {
            if !t.has_var(v as Var) {
                t = t.extend(v as Var, self.cards[v])?;
            }
            t = t.slice(v as Var, x)?;
        }
        Ok(t)
    }

    /// `p(R ‖ S)` as a table over `R ∪ S`: for each `s`, the distribution of
    /// the potential outcomes `R(s)`.
    pub fn interventional_kernel(&self, r: VertexSet, s: VertexSet) -> Result<Table, OracleError> {
        if !r.is_disjoint(s) {
            return Err(OracleError::Shape("random and context sets overlap".into()));
        }
        let mut t = self.product_except(s, r | s)?;
        for v in s {
            t = t.extend(v as Var, self.cards[v])?;
        }
        Ok(t)
    }

    /// One ancestral draw, indexed by vertex slot.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> Vec<usize> {
        let mut st = vec![0usize; self.graph.slot_count()];
        for v in self.graph.topological_order() {
            let t = self.cpt(v);
            let u: f64 = rng.gen();
            let mut acc = 0.0;
            let mut pick = self.cards[v] - 1;
            for x in 0..self.cards[v] {
                acc += t.at(|w| if w as usize == v { x } else { st[w as usize] });
                if u < acc {
                    pick = x;
                    break;
                }
            }
            st[v] = pick;
        }
        st
    }
}

/// Random model on `g` (bidirected edges become explicit latent parents).
/// Each CPT row is a flat Dirichlet draw mixed with the uniform floor so
/// every entry is at least `floor`. `cards` is indexed by slot of `g`; new
/// latent slots get 2 states.
pub fn random_model(g: &CausalGraph, cards: &[usize], seed: u64, floor: f64) -> Result<DiscreteModel, OracleError> {
    let g = materialize_bidirected(g)?;
    let mut cards = cards.to_vec();
    cards.resize(g.slot_count(), 2);
    for v in g.vertices() {
        if cards[v] < 2 {
            return Err(OracleError::BadModel(format!("`{}` needs at least 2 states", g.name(v))));
        }
        if floor * cards[v] as f64 >= 1.0 {
            return Err(OracleError::BadModel(format!("floor too large for `{}`", g.name(v))));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cpts = vec![None; g.slot_count()];
    for v in g.vertices() {
        let fam = g.parents_of(v).with(v);
        let vars = vars_of(fam);
        let fcards: Vec<usize> = vars.iter().map(|&x| cards[x as usize]).collect();
        let k = cards[v];
        let rows: usize = fcards.iter().product::<usize>() / k;
        // v is not necessarily last in slot order: draw rows first, then lay out
        let mut draws = Vec::with_capacity(rows * k);
        for _ in 0..rows {
            let e: Vec<f64> = (0..k).map(|_| rng.sample::<f64, _>(Exp1)).collect();
            let sum: f64 = e.iter().sum();
            draws.extend(e.iter().map(|x| floor + (1.0 - k as f64 * floor) * x / sum));
        }
        let pos = vars.iter().position(|&x| x as usize == v).unwrap();
        let t = Table::from_fn(vars.clone(), fcards.clone(), |st| {
            let mut row = 0;
            for (i, (&s, &c)) in st.iter().zip(&fcards).enumerate() {
                if i != pos {
                    row = row * c + s;
                }
            }
            draws[row * k + st[pos]]
        })?;
        cpts[v] = Some(renormalize(&t, v as Var)?);
    }
    DiscreteModel::new(g, cards, cpts)
}

/// Divide each row by its sum to remove rounding drift.
fn renormalize(t: &Table, v: Var) -> Result<Table, OracleError> {
    let others: Vec<Var> = t.vars().iter().copied().filter(|&x| x != v).collect();
    t.ratio(&t.marginal(&others))
}

/// `t(· | given)` as a table over the same variables.
pub fn condition(t: &Table, given: &[Var]) -> Result<Table, OracleError> {
    t.ratio(&t.marginal(given))
}

/// Largest `|p(x,y|z) - p(x|z) p(y|z)|` over states with `p(z) > 0`.
pub fn ci_residual(t: &Table, x: &[Var], y: &[Var], z: &[Var]) -> Result<f64, OracleError> {
    let all: Vec<Var> = x.iter().chain(y).chain(z).copied().collect();
    for w in &all {
        if !t.has_var(*w) {
            return Err(OracleError::Shape(format!("variable #{w} not in table")));
        }
    }
    let xz: Vec<Var> = x.iter().chain(z).copied().collect();
    let yz: Vec<Var> = y.iter().chain(z).copied().collect();
    let pxyz = t.marginal(&all);
    let pxz = t.marginal(&xz);
    let pyz = t.marginal(&yz);
    let pz = t.marginal(z);
    let mut worst = 0.0f64;
    let vars = pxyz.vars().to_vec();
    pxyz.for_each(|st, p| {
        let lookup = |w: Var| st[vars.iter().position(|&u| u == w).unwrap()];
        let nz = pz.at(lookup);
        if nz <= 0.0 {
            return;
        }
        let lhs = p / nz;
        let rhs = pxz.at(lookup) / nz * (pyz.at(lookup) / nz);
        worst = worst.max((lhs - rhs).abs());
    });
    Ok(worst)
}
