//! Kernel operations for proximal identification.
//!
//! `Fix` and `Cut` act on one kernel. The bridge operations `Obf`, `Tbf` and
//! `Ebf` replace an intervention on a confounded vertex by a bridge function
//! over two proxy sets, after checking their counterfactual assumptions on
//! the single-world graphs of the hidden-variable DAG.
//!
//! Assumptions that d-separation cannot decide (completeness of the proxies
//! and solvability of the bridge equation) are either taken as declared or
//! checked against a [`discrete_oracle::DiscreteModel`].

mod ops;
mod report;
mod step;

use bridge_solvers::BridgeError;
use discrete_oracle::OracleError;
use graph_core::GraphError;
use kernel_algebra::KernelError;

pub use ops::{
    apply_cut, apply_ebf, apply_ebf_route, apply_fix, apply_obf, apply_step, apply_tbf, check_preconditions,
    output_random, roles, Applied, Mode, OpContext, Roles,
};
pub use report::{Check, CheckKind, PreconditionReport, Status};
pub use step::{OpKind, OpStep};

#[derive(Debug, Clone, thiserror::Error)]
pub enum OpError {
    #[error("preconditions of {} fail:\n{}", .0.op, .0.render())]
    ConditionFailed(Box<PreconditionReport>),
    #[error("operation is not a bridge operation")]
    NotProximal,
    #[error("input kernel has no value")]
    MissingValue,
    #[error("output of {0} does not have the promised variables")]
    Contract(String),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Bridge(#[from] BridgeError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}
