//! Bridge equations for discrete proxies.
//!
//! An outcome bridge solves `Σ_w h(o,w,b,x) p(w | z,b,x) = p(o | z,b,x)`;
//! a treatment bridge solves `Σ_z q(z,b,x) p(z | w,b,x) = 1 / p(b | w,x)`.
//! The extended variants keep a free copy of the proxy as an extra
//! argument, stored under its primed variable id. Each equation splits into
//! one small dense system per state of `(b, x)`.

mod completeness;
mod problem;

pub use completeness::{check_completeness, completeness_rank, conditional_family, Completeness};
pub use problem::{
    assemble, marginalize_extended, plug_in_residual, solve_bridge, BridgeKind, BridgeProblem, BridgeSolution,
    BridgeSpec, ContextDiagnostic, ContextSystem, COND_LIMIT, DEFAULT_TOL,
};

use discrete_oracle::{OracleError, Var};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BridgeError {
    #[error("{} bridge has no solution: residual {residual:.3e} at {context:?}", .kind.label())]
    NoSolution { kind: BridgeKind, context: Vec<(Var, usize)>, residual: f64 },
    #[error("propensity vanishes at {state:?}")]
    PositivityViolation { state: Vec<(Var, usize)> },
    #[error("{} bridge is not extended", .0.label())]
    NotExtended(BridgeKind),
    #[error("shape error: {0}")]
    Shape(String),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}
