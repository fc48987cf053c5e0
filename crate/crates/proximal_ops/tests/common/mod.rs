#![allow(dead_code)]

use discrete_oracle::{random_model, vars_of, DiscreteModel, Table, DEFAULT_FLOOR};
use graph_core::{parse_graph_file, CausalGraph, VertexSet};
use kernel_algebra::Kernel;
use proximal_ops::{OpKind, OpStep};

pub fn graph(text: &str) -> CausalGraph {
    parse_graph_file(text).unwrap().graph
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

pub fn observational(m: &DiscreteModel) -> Kernel {
    let joint = m.observed_joint().unwrap();
    Kernel::observational(m.graph().observed(), Some(&joint)).unwrap()
}

pub fn step(g: &CausalGraph, kind: OpKind, b: &str, w: &[&str], z: &[&str]) -> OpStep {
    OpStep::proximal(kind, v(g, b), set(g, w), set(g, z))
}

/// Max abs gap between a kernel's value and the oracle `p(R ‖ S)` with the
/// same roles.
pub fn oracle_gap(m: &DiscreteModel, k: &Kernel) -> f64 {
    let truth = m.interventional_kernel(k.random(), k.context()).unwrap();
    k.value().unwrap().max_abs_diff(&truth).unwrap()
}

pub fn sum_out(t: &Table, g: &CausalGraph, names: &[&str]) -> Table {
    t.sum_out(&vars_of(set(g, names)))
}
