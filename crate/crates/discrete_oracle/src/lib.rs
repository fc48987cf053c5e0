//! Exact discrete causal models over a [`graph_core::CausalGraph`].
//!
//! A [`DiscreteModel`] stores one conditional probability table per vertex.
//! Joint, interventional and conditional distributions are computed exactly
//! as dense [`Table`]s, which makes the model a brute-force ground truth for
//! identification formulas.

mod model;
mod table;
mod text;

pub use model::{ci_residual, condition, random_model, vars_of, DiscreteModel, DEFAULT_FLOOR};
pub use table::{primed, Table, Var, DIV_EPS, PRIME_OFFSET};
pub use text::{parse_model_file, serialize_model_file};

/// Largest dense table the crate will allocate.
pub const MAX_STATES: usize = 10_000_000;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OracleError {
    #[error("table would exceed {} states", MAX_STATES)]
    TooLarge,
    #[error("shape error: {0}")]
    Shape(String),
    #[error("division by zero-mass state {}", fmt_state(.state))]
    ZeroMass { state: Vec<(Var, usize)> },
    #[error("division by zero-mass state ({0})")]
    ZeroMassAt(String),
    #[error("invalid model: {0}")]
    BadModel(String),
    #[error(transparent)]
    Graph(#[from] graph_core::GraphError),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

fn fmt_state(state: &[(Var, usize)]) -> String {
    let parts: Vec<String> = state.iter().map(|(v, s)| format!("#{v}={s}")).collect();
    format!("({})", parts.join(","))
}

impl OracleError {
    /// Replace numeric variable ids in a zero-mass report with vertex names.
    pub fn with_names(self, names: &[String]) -> OracleError {
        match self {
            OracleError::ZeroMass { state } => {
                let parts: Vec<String> = state
                    .iter()
                    .map(|&(v, s)| {
                        let base = (v % PRIME_OFFSET) as usize;
                        let tick = if v >= PRIME_OFFSET { "'" } else { "" };
                        let name = names.get(base).map(String::as_str).unwrap_or("?");
                        format!("{name}{tick}={s}")
                    })
                    .collect();
                OracleError::ZeroMassAt(parts.join(","))
            }
            e => e,
        }
    }
}
