//! Interventional kernels `p(R ‖ S)` and their exact algebra.
//!
//! A [`Kernel`] carries its variable roles, the expression that derives it
//! from the observational distribution, and (when data is available) its
//! dense value. Every operation extends the expression, so an identified
//! kernel is also an executable identifying functional.

pub mod expr;

use std::sync::Arc;

use bridge_solvers::BridgeError;
use discrete_oracle::{vars_of, OracleError, Table, Var};
use graph_core::{cadmg, descendants, fixability_witness, markov_blanket, CausalGraph, GraphError, VertexSet};

pub use expr::{Evaluator, IdentExpr};

/// Per-context normalization tolerance.
pub const NORM_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum KernelError {
    #[error("`{vertex}` is not fixable: {witness} lie in both its district and descendants")]
    FixNotApplicable { vertex: String, witness: String },
    #[error("random and context variables overlap")]
    Overlap,
    #[error("vertex #{0} is not a random variable of the kernel")]
    NotRandom(usize),
    #[error("variable #{0} is not observed")]
    Unobserved(Var),
    #[error("kernel slices sum to 1 only within {0:.3e}")]
    NotNormalized(f64),
    #[error("expression needs observational data")]
    NoData,
    #[error("kernel value does not match its variables")]
    ValueShape,
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Bridge(#[from] BridgeError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone)]
pub struct Kernel {
    random: VertexSet,
    context: VertexSet,
    expr: Arc<IdentExpr>,
    value: Option<Table>,
}

impl Kernel {
    /// Checks disjointness and, when a value is given, that it is a table
    /// over `R ∪ S` normalized over `R` for every context state.
    pub fn new(
        random: VertexSet,
        context: VertexSet,
        expr: Arc<IdentExpr>,
        value: Option<Table>,
    ) -> Result<Kernel, KernelError> {
        if !random.is_disjoint(context) {
            return Err(KernelError::Overlap);
        }
        if let Some(t) = &value {
            if t.vars() != vars_of(random | context).as_slice() {
                return Err(KernelError::ValueShape);
            }
            let err = t.normalization_error(&vars_of(random));
            if !(err <= NORM_TOL) {
                return Err(KernelError::NotNormalized(err));
            }
        }
        Ok(Kernel { random, context, expr, value })
    }

    /// `p(observed)` itself; `joint` is the observational table if known.
    pub fn observational(observed: VertexSet, joint: Option<&Table>) -> Result<Kernel, KernelError> {
        let value = joint.map(|t| t.marginal(&vars_of(observed)));
        Kernel::new(observed, VertexSet::EMPTY, expr::obs(&vars_of(observed)), value)
    }

    pub fn random(&self) -> VertexSet {
        self.random
    }

    pub fn context(&self) -> VertexSet {
        self.context
    }

    /// `Var(·)`: random and context variables together.
    pub fn vars(&self) -> VertexSet {
        self.random | self.context
    }

    pub fn expr(&self) -> &Arc<IdentExpr> {
        &self.expr
    }

    pub fn value(&self) -> Option<&Table> {
        self.value.as_ref()
    }

    pub fn normalization_error(&self) -> Option<f64> {
        self.value.as_ref().map(|t| t.normalization_error(&vars_of(self.random)))
    }

    fn check_random(&self, s: VertexSet) -> Result<(), KernelError> {
        match (s - self.random).first() {
            Some(v) => Err(KernelError::NotRandom(v)),
            None => Ok(()),
        }
    }

    /// `p(keep ‖ S)`.
    pub fn marginal(&self, keep: VertexSet) -> Result<Kernel, KernelError> {
        self.check_random(keep)?;
        if keep == self.random {
            return Ok(self.clone());
        }
        let drop = vars_of(self.random - keep);
        let value = self.value.as_ref().map(|t| t.sum_out(&drop));
        Kernel::new(keep, self.context, expr::sum(&drop, &self.expr), value)
    }

    /// `p(R \ given | given ‖ S)`, represented as a kernel whose context
    /// also holds `given`.
    pub fn condition(&self, given: VertexSet) -> Result<Kernel, KernelError> {
        self.check_random(given)?;
        let den = self.marginal(given)?;
        let value = match (&self.value, &den.value) {
            (Some(n), Some(d)) => Some(n.ratio(d)?),
            _ => None,
        };
        Kernel::new(self.random - given, self.context | given, expr::ratio(&self.expr, &den.expr), value)
    }

    /// Fix `b`: divide by `p(b | mb(b) ‖ S)` with the Markov blanket taken
    /// in the CADMG of this kernel, and move `b` to the context.
    pub fn fix(&self, b: usize, g_full: &CausalGraph) -> Result<Kernel, KernelError> {
        self.check_random(VertexSet::singleton(b))?;
        let g = cadmg(g_full, self.random, self.context)?;
        let witness = fixability_witness(&g, b)?;
        if !witness.is_empty() {
            return Err(KernelError::FixNotApplicable {
                vertex: g.name(b).to_string(),
                witness: g.fmt_set(witness),
            });
        }
        let mb = markov_blanket(&g, b)?;
        let cond = self.marginal(mb.with(b))?.condition(mb)?;
        let value = match (&self.value, &cond.value) {
            (Some(k), Some(c)) => Some(k.ratio(c)?),
            _ => None,
        };
        Kernel::new(
            self.random.without(b),
            self.context.with(b),
            expr::ratio(&self.expr, &cond.expr),
            value,
        )
    }

    /// Cut `b`: drop its descendants in `G(V \ S, S)` and move it to the
    /// context. The remaining kernel is constant in `b`.
    pub fn cut(&self, b: usize, g_full: &CausalGraph, card: usize) -> Result<Kernel, KernelError> {
        self.check_random(VertexSet::singleton(b))?;
        let g = cadmg(g_full, g_full.vertices() - self.context, self.context)?;
        let de = descendants(&g, VertexSet::singleton(b));
        let kept = self.marginal(self.random - de)?;
        let value = kept.value.as_ref().map(|t| t.extend(b as Var, card)).transpose()?;
        Kernel::new(kept.random, self.context.with(b), expr::extend(b as Var, card, &kept.expr), value)
    }

    /// Re-evaluate the expression against an observational joint.
    pub fn evaluate(&self, observed: &Table) -> Result<Kernel, KernelError> {
        let t = self.expr.evaluate(observed)?;
        let t = pad_context(t, self.context, observed)?;
        Kernel::new(self.random, self.context, self.expr.clone(), Some(t))
    }

    /// Same roles and expression with a value computed elsewhere.
    pub fn with_value(&self, value: Table) -> Result<Kernel, KernelError> {
        Kernel::new(self.random, self.context, self.expr.clone(), Some(value))
    }

    /// Kernel from an expression built on top of `inputs`. The value is
    /// computed from the inputs' values (when all have one) without
    /// re-evaluating their subtrees.
    pub fn derived_from(
        random: VertexSet,
        context: VertexSet,
        expr: Arc<IdentExpr>,
        inputs: &[&Kernel],
    ) -> Result<Kernel, KernelError> {
        let values: Option<Vec<&Table>> = inputs.iter().map(|k| k.value.as_ref()).collect();
        let value = match values {
            Some(values) => {
                let mut ev = Evaluator::new(None);
                for (k, v) in inputs.iter().zip(&values) {
                    ev.seed(&k.expr, (*v).clone());
                }
                Some(pad_with(ev.eval(&expr)?, context, &values)?)
            }
            None => None,
        };
        Kernel::new(random, context, expr, value)
    }

    /// Kernel from a derived expression, evaluated when `observed` is given.
    pub fn derived(
        random: VertexSet,
        context: VertexSet,
        expr: Arc<IdentExpr>,
        observed: Option<&Table>,
    ) -> Result<Kernel, KernelError> {
        let value = match observed {
            Some(o) => Some(pad_context(expr.evaluate(o)?, context, o)?),
            None => None,
        };
        Kernel::new(random, context, expr, value)
    }
}

/// Extend a table along context variables the expression is constant in.
fn pad_context(t: Table, context: VertexSet, observed: &Table) -> Result<Table, KernelError> {
    pad_with(t, context, &[observed])
}

fn pad_with(mut t: Table, context: VertexSet, sources: &[&Table]) -> Result<Table, KernelError> {
    for v in vars_of(context) {
        if !t.has_var(v) {
            let card = sources.iter().find_map(|s| s.card_of(v)).ok_or(KernelError::Unobserved(v))?;
            t = t.extend(v, card)?;
        }
    }
    Ok(t)
}

/// `Σ_{sum_over} ∏ ks`. A variable random in one factor and context in
/// another takes the same value in both, so the product is taken
/// pointwise on shared variables. Random sets must be disjoint.
pub fn kernel_product(ks: &[Kernel], sum_over: VertexSet) -> Result<Kernel, KernelError> {
    let mut random = VertexSet::EMPTY;
    let mut context = VertexSet::EMPTY;
    for k in ks {
        if !random.is_disjoint(k.random) {
            return Err(KernelError::Overlap);
        }
        random = random | k.random;
        context = context | k.context;
    }
    let context = context - random;
    if let Some(v) = (sum_over - random).first() {
        return Err(KernelError::NotRandom(v));
    }
    let exprs: Vec<Arc<IdentExpr>> = ks.iter().map(|k| k.expr.clone()).collect();
    let e = expr::sum(&vars_of(sum_over), &expr::product(&exprs));
    let value = if ks.iter().all(|k| k.value.is_some()) {
        let mut acc = Table::scalar(1.0);
        for k in ks {
            acc = acc.product(k.value.as_ref().unwrap())?;
        }
        Some(acc.sum_out(&vars_of(sum_over)))
    } else {
        None
    };
    Kernel::new(random - sum_over, context, e, value)
}
