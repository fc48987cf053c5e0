use discrete_oracle::{Table, Var};
use nalgebra::{DMatrix, DVector};

use crate::problem::states;
use crate::BridgeError;

#[derive(Clone, Debug, PartialEq)]
pub enum Completeness {
    Complete,
    /// A nonzero `g` over the target states with `E[g(target) | given, ctx] = 0`
    /// for the reported context.
    Incomplete { context: Vec<(Var, usize)>, witness: Vec<f64> },
}

impl Completeness {
    pub fn holds(&self) -> bool {
        matches!(self, Completeness::Complete)
    }
}

/// `p(target | given, ctx)` as one matrix per state of `ctx`, rows indexed by
/// `given` and columns by `target` (last variable fastest in both).
pub fn conditional_family(
    joint: &Table,
    target: &[Var],
    given: &[Var],
    ctx: &[Var],
) -> Result<Vec<(Vec<(Var, usize)>, DMatrix<f64>)>, BridgeError> {
    let mut cond_vars: Vec<Var> = given.iter().chain(ctx).copied().collect();
    cond_vars.sort_unstable();
    let mut all: Vec<Var> = cond_vars.iter().chain(target).copied().collect();
    all.sort_unstable();
    all.dedup();
    if all.len() != target.len() + cond_vars.len() {
        return Err(BridgeError::Shape("target overlaps the conditioning set".into()));
    }
    let card = |v: &Var| joint.card_of(*v).ok_or_else(|| BridgeError::Shape(format!("variable #{v} missing")));
    let tc: Vec<usize> = target.iter().map(card).collect::<Result<_, _>>()?;
    let gc: Vec<usize> = given.iter().map(card).collect::<Result<_, _>>()?;
    let cc: Vec<usize> = ctx.iter().map(card).collect::<Result<_, _>>()?;
    let m = joint.marginal(&all);
    let cond = m.ratio(&m.marginal(&cond_vars))?;
    let (ts, gs) = (states(&tc), states(&gc));
    let mut lookup = [0usize; 2 * discrete_oracle::PRIME_OFFSET as usize];
    let mut out = Vec::new();
    for cs in states(&cc) {
        for (v, s) in ctx.iter().zip(&cs) {
            lookup[*v as usize] = *s;
        }
        let mut mat = DMatrix::zeros(gs.len(), ts.len());
        for (i, g) in gs.iter().enumerate() {
            for (v, s) in given.iter().zip(g) {
                lookup[*v as usize] = *s;
            }
            for (j, t) in ts.iter().enumerate() {
                for (v, s) in target.iter().zip(t) {
                    lookup[*v as usize] = *s;
                }
                mat[(i, j)] = cond.at(|v| lookup[v as usize]);
            }
        }
        out.push((ctx.iter().copied().zip(cs).collect(), mat));
    }
    Ok(out)
}

/// Rank test: completeness holds in a context when the matrix has full
/// column rank, singular values below `tol · σ_max` counting as zero.
pub fn completeness_rank(family: &[(Vec<(Var, usize)>, DMatrix<f64>)], tol: f64) -> Completeness {
    for (context, m) in family {
        let (r, c) = m.shape();
        // pad with zero rows so the SVD exposes the full right null space
        let mut sq = DMatrix::zeros(r.max(c), c);
        sq.view_mut((0, 0), (r, c)).copy_from(m);
        let svd = sq.svd(false, true);
        let smax = svd.singular_values.max();
        let vt = svd.v_t.expect("requested");
        let weakest = (0..svd.singular_values.len())
            .min_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]));
        if let Some(k) = weakest {
            if svd.singular_values[k] <= tol * smax.max(f64::MIN_POSITIVE) {
                let w: DVector<f64> = vt.row(k).transpose();
                return Completeness::Incomplete { context: context.clone(), witness: w.iter().copied().collect() };
            }
        }
    }
    Completeness::Complete
}

/// Outcome completeness: `g(U)` determined by its conditional means given
/// `Z` within every context.
pub fn check_completeness(
    joint: &Table,
    latent: &[Var],
    proxy: &[Var],
    ctx: &[Var],
    tol: f64,
) -> Result<Completeness, BridgeError> {
    Ok(completeness_rank(&conditional_family(joint, latent, proxy, ctx)?, tol))
}
