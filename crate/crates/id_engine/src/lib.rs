//! Identification of `p(Y ‖ A)` in hidden-variable DAGs by sequences of
//! kernel operations, one sequence per district of the projected graph.
//!
//! [`search_identification`] tries candidate projection sets `H` and, for
//! each district, searches over step lists mixing `Fix` with the bridge
//! operations. A `FAIL` result means no strategy within the search space
//! was found; it does not prove the query non-identifiable.

mod algorithm;
mod certificate;
mod search;
mod targets;

use discrete_oracle::OracleError;
use graph_core::GraphError;
use kernel_algebra::KernelError;
use proximal_ops::OpError;

pub use algorithm::{
    advance, complete, district_kernel, run_steps, AlgorithmOutcome, KernelPair, StepFailure, StepOutcome, StepRecord,
};
pub use certificate::certificate;
pub use search::{
    assemble, evaluate_functional, h_candidates, observed_kernel, search_identification, DistrictResult, FailWitness,
    HPolicy, IdentQuery, IdentResult, IdentStatus, SearchOptions, DEFAULT_BUDGET,
};
pub use targets::{district_targets, district_targets_of, DistrictTarget, Targets};

#[derive(Debug, thiserror::Error)]
pub enum IdError {
    #[error("invalid query: {0}")]
    Query(String),
    #[error("invalid step list: {0}")]
    Steps(String),
    #[error(transparent)]
    Op(#[from] OpError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}
