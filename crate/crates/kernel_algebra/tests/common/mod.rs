#![allow(dead_code)]

use discrete_oracle::{random_model, vars_of, DiscreteModel, Table, Var, DEFAULT_FLOOR};
use graph_core::{parse_graph_file, CausalGraph, VertexSet};
use kernel_algebra::{expr, Kernel};

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

pub fn observational(m: &DiscreteModel) -> (Table, Kernel) {
    let joint = m.observed_joint().unwrap();
    let k = Kernel::observational(m.graph().observed(), Some(&joint)).unwrap();
    (joint, k)
}

/// Oracle kernel `p(R ‖ S)` wrapped as a `Kernel` (its expression is a
/// placeholder and never evaluated).
pub fn oracle_kernel(m: &DiscreteModel, r: VertexSet, s: VertexSet) -> Kernel {
    let t = m.interventional_kernel(r, s).unwrap();
    Kernel::new(r, s, expr::obs(&vars_of(r | s)), Some(t)).unwrap()
}

pub fn diff(a: &Table, b: &Table) -> f64 {
    a.max_abs_diff(b).unwrap()
}

/// Probability of an event by direct summation over the table rows.
pub fn prob(t: &Table, event: &[(Var, usize)]) -> f64 {
    let vars = t.vars().to_vec();
    let mut total = 0.0;
    t.for_each(|st, p| {
        if event.iter().all(|(v, s)| st[vars.iter().position(|u| u == v).unwrap()] == *s) {
            total += p;
        }
    });
    total
}

/// Random mixed graph over V0..Vn-1, directed edges from lower to higher index.
pub fn random_graph(n: usize, dir_bits: u64, bi_bits: u64) -> CausalGraph {
    let mut b = CausalGraph::builder();
    for i in 0..n {
        b.vertex(&format!("V{i}")).unwrap();
    }
    let mut k = 0;
    for i in 0..n {
        for j in (i + 1)..n {
            if dir_bits & (1 << k) != 0 {
                b.directed(&format!("V{i}"), &format!("V{j}")).unwrap();
            }
            if bi_bits & (1 << k) != 0 {
                b.bidirected(&format!("V{i}"), &format!("V{j}")).unwrap();
            }
            k += 1;
        }
    }
    b.build().unwrap()
}
