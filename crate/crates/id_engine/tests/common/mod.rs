#![allow(dead_code)]

pub mod corpus;
pub mod reference;

use discrete_oracle::{random_model, DiscreteModel, DEFAULT_FLOOR};
use graph_core::{parse_graph_file, CausalGraph, GraphFile, VertexSet};
use id_engine::{search_identification, IdentQuery, IdentResult, SearchOptions};
use kernel_algebra::Kernel;
use proximal_ops::{OpContext, OpKind, OpStep};

pub fn file(text: &str) -> GraphFile {
    parse_graph_file(text).unwrap()
}

pub fn graph(text: &str) -> CausalGraph {
    file(text).graph
}

pub fn model(text: &str, seed: u64) -> DiscreteModel {
    let g = graph(text);
    random_model(&g, &vec![2; g.slot_count()], seed, DEFAULT_FLOOR).unwrap()
}

pub fn set(g: &CausalGraph, names: &[&str]) -> VertexSet {
    g.set(names).unwrap()
}

pub fn v(g: &CausalGraph, name: &str) -> usize {
    g.index(name).unwrap()
}

pub fn query(text: &str) -> IdentQuery {
    IdentQuery::from_file(&file(text)).unwrap()
}

pub fn observational(m: &DiscreteModel) -> Kernel {
    let joint = m.observed_joint().unwrap();
    Kernel::observational(m.graph().observed(), Some(&joint)).unwrap()
}

pub fn step(g: &CausalGraph, kind: OpKind, b: &str, w: &[&str], z: &[&str]) -> OpStep {
    OpStep::proximal(kind, v(g, b), set(g, w), set(g, z))
}

/// Search in oracle mode on a random model of `text`.
pub fn search_oracle(text: &str, seed: u64, opts: &SearchOptions) -> (DiscreteModel, IdentResult) {
    let m = model(text, seed);
    let r = search_identification(&query(text), &OpContext::oracle(&m), opts).unwrap();
    (m, r)
}

/// Max abs gap between a kernel's value and the oracle `p(R ‖ S)`.
pub fn oracle_gap(m: &DiscreteModel, k: &Kernel) -> f64 {
    let truth = m.interventional_kernel(k.random(), k.context()).unwrap();
    k.value().unwrap().max_abs_diff(&truth).unwrap()
}
