//! Mixed causal graphs and the graph-theoretic primitives used by proximal
//! identification: kinship, d-separation, node splitting, latent projection,
//! districts, conditional ADMGs and fixability.
//!
//! A single [`CausalGraph`] type represents hidden-variable DAGs, ADMGs,
//! CADMGs and SWIGs. Vertex sets are bitsets over declaration-ordered slots,
//! so every result iterates deterministically.

pub mod fixtures;
mod graph;
mod ops;
mod text;
mod vertex_set;

pub use graph::{CausalGraph, GraphBuilder};
pub use ops::{
    ancestors, ancestors_avoiding, cadmg, d_separated, descendants, district_of, districts,
    fixability_witness, fixable, induced_subgraph, kinship, latent_project, markov_blanket,
    materialize_bidirected, split_name, swig, Relation,
};
pub use text::{parse_graph_file, parse_graph_file_with, serialize_graph_file, GraphFile, QuerySpec};
pub use vertex_set::{VertexSet, MAX_VERTICES};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("graph exceeds {0} vertex slots")]
    TooManyVertices(usize),
    #[error("duplicate vertex `{0}`")]
    DuplicateVertex(String),
    #[error("duplicate edge `{0}`")]
    DuplicateEdge(String),
    #[error("directed part contains a cycle")]
    Cycle,
    #[error("self loop on `{0}`")]
    SelfLoop(String),
    #[error("context vertex `{0}` has an incoming edge")]
    ContextHasIncoming(String),
    #[error("latent vertex `{0}` cannot be context")]
    LatentContext(String),
    #[error("vertex sets overlap")]
    OverlappingSets,
    #[error("projection would drop a context vertex")]
    ContextDropped,
    #[error("`{0}` is a context vertex")]
    ContextVertex(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("internal invariant violated: {0}")]
    Internal(&'static str),
}
