use discrete_oracle::{primed, Table, Var, DIV_EPS};
use nalgebra::DMatrix;
use serde::Serialize;

use crate::BridgeError;

pub const DEFAULT_TOL: f64 = 1e-8;
pub const COND_LIMIT: f64 = 1e8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BridgeKind {
    Outcome,
    Treatment,
    ExtendedOutcome,
    ExtendedTreatment,
}

impl BridgeKind {
    pub fn is_extended(self) -> bool {
        matches!(self, BridgeKind::ExtendedOutcome | BridgeKind::ExtendedTreatment)
    }

    pub fn label(self) -> &'static str {
        match self {
            BridgeKind::Outcome => "outcome",
            BridgeKind::Treatment => "treatment",
            BridgeKind::ExtendedOutcome => "extended_outcome",
            BridgeKind::ExtendedTreatment => "extended_treatment",
        }
    }
}

/// Variable roles of a bridge equation. `x` holds every conditioning
/// variable besides `b`, context variables of a kernel included.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BridgeSpec {
    pub kind: BridgeKind,
    pub o: Vec<Var>,
    pub w: Vec<Var>,
    pub z: Vec<Var>,
    pub b: Var,
    pub x: Vec<Var>,
}

/// One linear system `operator · H = rhs` per context state.
#[derive(Clone, Debug)]
pub struct BridgeProblem {
    pub kind: BridgeKind,
    /// Variables indexing equations (rows of the operator).
    pub eq_vars: Vec<Var>,
    /// Variables the bridge function integrates over (operator columns).
    pub unk_vars: Vec<Var>,
    /// Free arguments of the bridge function (rhs columns).
    pub free_vars: Vec<Var>,
    /// `b` together with `x`, sorted.
    pub ctx_vars: Vec<Var>,
    pub cards: Vec<(Var, usize)>,
    pub contexts: Vec<ContextSystem>,
}

#[derive(Clone, Debug)]
pub struct ContextSystem {
    /// States of `ctx_vars`.
    pub state: Vec<usize>,
    pub operator: DMatrix<f64>,
    pub rhs: DMatrix<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ContextDiagnostic {
    pub kind: BridgeKind,
    pub context: Vec<(Var, usize)>,
    pub residual: f64,
    pub cond: f64,
    pub rank: usize,
}

#[derive(Clone, Debug)]
pub struct BridgeSolution {
    pub kind: BridgeKind,
    /// Bridge function over free, integrated and context variables.
    pub values: Table,
    pub residual: f64,
    pub diagnostics: Vec<ContextDiagnostic>,
    pub ill_conditioned: bool,
}

impl BridgeSolution {
    /// Max equation violation of `values` against `p`, computed afresh.
    pub fn recompute_residual(&self, p: &BridgeProblem) -> f64 {
        plug_in_residual(p, &self.values)
    }

    /// One JSON object per context.
    pub fn diagnostics_jsonl(&self) -> String {
        self.diagnostics
            .iter()
            .map(|d| serde_json::to_string(d).expect("diagnostics serialize") + "\n")
            .collect()
    }
}

fn union(parts: &[&[Var]]) -> Vec<Var> {
    let mut v: Vec<Var> = parts.iter().flat_map(|p| p.iter().copied()).collect();
    v.sort_unstable();
    v.dedup();
    v
}

/// `t(target | given)` from the marginal of `t` on `target ∪ given`.
fn conditional(t: &Table, target: &[Var], given: &[Var]) -> Result<Table, BridgeError> {
    let joint = t.marginal(&union(&[target, given]));
    Ok(joint.ratio(&joint.marginal(given))?)
}

fn require(t: &Table, vars: &[Var]) -> Result<(), BridgeError> {
    match vars.iter().find(|v| !t.has_var(**v)) {
        Some(v) => Err(BridgeError::Shape(format!("variable #{v} missing from input factor"))),
        None => Ok(()),
    }
}

/// Build the per-context systems.
///
/// `main` is a factor over the kernel's variables (random and context).
/// `w_source` supplies `p(W | Z, B, X)` for the outcome kind; for every
/// other kind it is ignored and `main` is used throughout.
pub fn assemble(spec: &BridgeSpec, main: &Table, w_source: Option<&Table>) -> Result<BridgeProblem, BridgeError> {
    let BridgeSpec { kind, o, w, z, b, x } = spec;
    let b = [*b];
    let ctx = union(&[&b, x]);
    let zbx = union(&[z, &b, x]);
    let wbx = union(&[w, &b, x]);
    let wx = union(&[w, x]);
    let (eq_vars, unk_vars, free_vars, operator, rhs) = match kind {
        BridgeKind::Outcome => {
            let ws = w_source.unwrap_or(main);
            require(ws, &union(&[w, &zbx]))?;
            require(main, &union(&[o, &zbx]))?;
            let op = conditional(ws, w, &zbx)?;
            let rhs = conditional(main, o, &zbx)?;
            (z.clone(), w.clone(), o.clone(), op, rhs)
        }
        BridgeKind::Treatment => {
            require(main, &union(&[z, &wbx]))?;
            let rhs = invert(&conditional(main, &b, &wx)?)?;
            let op = conditional(main, z, &wbx)?;
            (w.clone(), z.clone(), vec![], op, rhs)
        }
        BridgeKind::ExtendedOutcome => {
            require(main, &union(&[o, w, &zbx]))?;
            let op = conditional(main, w, &zbx)?;
            let ow = conditional(main, &union(&[o, w]), &zbx)?;
            let rhs = ow.rename(|v| if w.contains(&v) { primed(v) } else { v })?;
            let free = union(&[o, &w.iter().map(|&v| primed(v)).collect::<Vec<_>>()]);
            (z.clone(), w.clone(), free, op, rhs)
        }
        BridgeKind::ExtendedTreatment => {
            require(main, &union(&[z, &wbx]))?;
            let inv_prop = invert(&conditional(main, &b, &wx)?)?;
            let op = conditional(main, z, &wbx)?;
            let pz = conditional(main, z, &wx)?;
            let rhs = pz.product(&inv_prop)?.rename(|v| if z.contains(&v) { primed(v) } else { v })?;
            let free: Vec<Var> = z.iter().map(|&v| primed(v)).collect();
            (w.clone(), z.clone(), free, op, rhs)
        }
    };
    let card = |v: Var| -> Result<usize, BridgeError> {
        operator
            .card_of(v)
            .or_else(|| rhs.card_of(v))
            .ok_or_else(|| BridgeError::Shape(format!("no cardinality for variable #{v}")))
    };
    let mut cards = Vec::new();
    for &v in eq_vars.iter().chain(&unk_vars).chain(&free_vars).chain(&ctx) {
        cards.push((v, card(v)?));
    }
    let cards_of = |vs: &[Var]| -> Vec<usize> { vs.iter().map(|v| cards.iter().find(|c| c.0 == *v).unwrap().1).collect() };
    let (eq_c, unk_c, free_c, ctx_c) = (cards_of(&eq_vars), cards_of(&unk_vars), cards_of(&free_vars), cards_of(&ctx));
    let eq_states = states(&eq_c);
    let unk_states = states(&unk_c);
    let free_states = states(&free_c);
    let mut contexts = Vec::new();
    let mut lookup = [0usize; 2 * discrete_oracle::PRIME_OFFSET as usize];
    for cs in states(&ctx_c) {
        for (v, s) in ctx.iter().zip(&cs) {
            lookup[*v as usize] = *s;
        }
        let mut m = DMatrix::zeros(eq_states.len(), unk_states.len());
        let mut r = DMatrix::zeros(eq_states.len(), free_states.len().max(1));
        for (i, es) in eq_states.iter().enumerate() {
            for (v, s) in eq_vars.iter().zip(es) {
                lookup[*v as usize] = *s;
            }
            for (j, us) in unk_states.iter().enumerate() {
                for (v, s) in unk_vars.iter().zip(us) {
                    lookup[*v as usize] = *s;
                }
                m[(i, j)] = operator.at(|v| lookup[v as usize]);
            }
            for (j, fs) in free_states.iter().enumerate() {
                for (v, s) in free_vars.iter().zip(fs) {
                    lookup[*v as usize] = *s;
                }
                r[(i, j)] = rhs.at(|v| lookup[v as usize]);
            }
        }
        contexts.push(ContextSystem { state: cs, operator: m, rhs: r });
    }
    Ok(BridgeProblem { kind: *kind, eq_vars, unk_vars, free_vars, ctx_vars: ctx, cards, contexts })
}

fn invert(t: &Table) -> Result<Table, BridgeError> {
    if let Some(pos) = t.data().iter().position(|p| p.abs() < DIV_EPS) {
        let mut state = Vec::new();
        let mut k = pos;
        for (v, c) in t.vars().iter().zip(t.cards()).rev() {
            state.push((*v, k % c));
            k /= c;
        }
        state.reverse();
        return Err(BridgeError::PositivityViolation { state });
    }
    Ok(t.map(|p| 1.0 / p))
}

/// All joint states, last position fastest.
pub(crate) fn states(cards: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for &c in cards {
        out = out.into_iter().flat_map(|s| (0..c).map(move |x| [s.clone(), vec![x]].concat())).collect();
    }
    out
}

/// Solve every context system.
///
/// Square systems use LU, falling back to the SVD when the matrix is
/// numerically singular; rectangular systems take the minimum-norm least
/// squares solution. Fails with `NoSolution` if any context's residual
/// exceeds `tol`.
pub fn solve_bridge(p: &BridgeProblem, tol: f64) -> Result<BridgeSolution, BridgeError> {
    let mut hs = Vec::with_capacity(p.contexts.len());
    let mut diagnostics = Vec::with_capacity(p.contexts.len());
    let mut worst = 0.0f64;
    let mut ill = false;
    for c in &p.contexts {
        let (h, cond, rank) = solve_system(&c.operator, &c.rhs);
        let residual = max_abs(&(&c.operator * &h - &c.rhs));
        let context: Vec<(Var, usize)> = p.ctx_vars.iter().copied().zip(c.state.iter().copied()).collect();
        if !(residual <= tol) {
            return Err(BridgeError::NoSolution { kind: p.kind, context, residual });
        }
        ill |= cond > COND_LIMIT;
        worst = worst.max(residual);
        diagnostics.push(ContextDiagnostic { kind: p.kind, context, residual, cond, rank });
        hs.push(h);
    }
    let values = solution_table(p, &hs)?;
    Ok(BridgeSolution { kind: p.kind, values, residual: worst, diagnostics, ill_conditioned: ill })
}

fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0f64, |a, x| a.max(x.abs()))
}

/// Returns the solution, the condition number and the numerical rank.
pub(crate) fn solve_system(m: &DMatrix<f64>, r: &DMatrix<f64>) -> (DMatrix<f64>, f64, usize) {
    let svd = m.clone().svd(true, true);
    let sv = &svd.singular_values;
    let smax = sv.iter().fold(0.0f64, |a, &x| a.max(x));
    let smin = sv.iter().fold(f64::INFINITY, |a, &x| a.min(x));
    let cond = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    let rank = sv.iter().filter(|&&x| x > DEFAULT_TOL * smax).count();
    if m.is_square() {
        let lu = m.clone().lu();
        if let Some(h) = lu.solve(r) {
            if h.iter().all(|x| x.is_finite()) && cond <= 1.0 / f64::EPSILON {
                return (h, cond, rank);
            }
        }
    }
    let eps = f64::EPSILON * m.nrows().max(m.ncols()) as f64 * smax;
    let h = svd.solve(r, eps).unwrap_or_else(|_| DMatrix::zeros(m.ncols(), r.ncols()));
    (h, cond, rank)
}

fn solution_table(p: &BridgeProblem, hs: &[DMatrix<f64>]) -> Result<Table, BridgeError> {
    let mut vars: Vec<Var> = p.free_vars.iter().chain(&p.unk_vars).chain(&p.ctx_vars).copied().collect();
    vars.sort_unstable();
    let card = |v: Var| p.cards.iter().find(|c| c.0 == v).unwrap().1;
    let cards: Vec<usize> = vars.iter().map(|&v| card(v)).collect();
    let index = |vs: &[Var], st: &[usize]| -> usize {
        vs.iter().fold(0, |acc, v| acc * card(*v) + st[vars.iter().position(|u| u == v).unwrap()])
    };
    Ok(Table::from_fn(vars.clone(), cards, |st| {
        let c = index(&p.ctx_vars, st);
        let u = index(&p.unk_vars, st);
        let f = index(&p.free_vars, st);
        hs[c][(u, f)]
    })?)
}

/// Max violation of the bridge equations by an arbitrary candidate table
/// laid out like [`BridgeSolution::values`].
pub fn plug_in_residual(p: &BridgeProblem, h: &Table) -> f64 {
    let unk = states(&p.unk_vars.iter().map(|v| h.card_of(*v).unwrap()).collect::<Vec<_>>());
    let free = states(&p.free_vars.iter().map(|v| h.card_of(*v).unwrap()).collect::<Vec<_>>());
    let mut lookup = [0usize; 2 * discrete_oracle::PRIME_OFFSET as usize];
    let mut worst = 0.0f64;
    for c in &p.contexts {
        for (v, s) in p.ctx_vars.iter().zip(&c.state) {
            lookup[*v as usize] = *s;
        }
        let mut hm = DMatrix::zeros(unk.len(), free.len().max(1));
        for (i, us) in unk.iter().enumerate() {
            for (v, s) in p.unk_vars.iter().zip(us) {
                lookup[*v as usize] = *s;
            }
            for (j, fs) in free.iter().enumerate() {
                for (v, s) in p.free_vars.iter().zip(fs) {
                    lookup[*v as usize] = *s;
                }
                hm[(i, j)] = h.at(|v| lookup[v as usize]);
            }
        }
        worst = worst.max(max_abs(&(&c.operator * hm - &c.rhs)));
    }
    worst
}

/// Standard bridge function from an extended one by summing out the free
/// copy of the proxy (the primed variables). The result carries no
/// residual (`NaN`) until checked against a standard problem with
/// [`BridgeSolution::recompute_residual`].
pub fn marginalize_extended(sol: &BridgeSolution) -> Result<BridgeSolution, BridgeError> {
    let kind = match sol.kind {
        BridgeKind::ExtendedOutcome => BridgeKind::Outcome,
        BridgeKind::ExtendedTreatment => BridgeKind::Treatment,
        k => return Err(BridgeError::NotExtended(k)),
    };
    let drop: Vec<Var> = sol.values.vars().iter().copied().filter(|&v| v >= discrete_oracle::PRIME_OFFSET).collect();
    Ok(BridgeSolution {
        kind,
        values: sol.values.sum_out(&drop),
        residual: f64::NAN,
        diagnostics: vec![],
        ill_conditioned: sol.ill_conditioned,
    })
}
