#![allow(dead_code)]

use discrete_oracle::{random_model, DiscreteModel, Table, Var, DEFAULT_FLOOR};
use graph_core::{fixtures, parse_graph_file};

// slots in the proximal fixture
pub const U: Var = 0;
pub const A: Var = 1;
pub const Y: Var = 2;
pub const W: Var = 3;
pub const Z: Var = 4;
pub const X: Var = 5;

/// Random proximal model with the given cardinalities for U, W and Z.
pub fn proximal_model(seed: u64, cu: usize, cw: usize, cz: usize) -> DiscreteModel {
    let g = parse_graph_file(fixtures::FIG1D).unwrap().graph;
    let cards = [cu, 2, 2, cw, cz, 2];
    random_model(&g, &cards, seed, DEFAULT_FLOOR).unwrap()
}

pub fn all_states(cards: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for &c in cards {
        let mut next = Vec::new();
        for s in &out {
            for x in 0..c {
                let mut t: Vec<usize> = s.clone();
                t.push(x);
                next.push(t);
            }
        }
        out = next;
    }
    out
}

/// Probability that the variables in `event` take the listed states, summed
/// directly over the rows of `joint`.
pub fn prob(joint: &Table, event: &[(Var, usize)]) -> f64 {
    let vars = joint.vars().to_vec();
    let mut total = 0.0;
    joint.for_each(|st, p| {
        if event.iter().all(|(v, s)| st[vars.iter().position(|u| u == v).unwrap()] == *s) {
            total += p;
        }
    });
    total
}

/// `p(target | given)` by direct summation.
pub fn cond(joint: &Table, target: &[(Var, usize)], given: &[(Var, usize)]) -> f64 {
    let both: Vec<(Var, usize)> = target.iter().chain(given).copied().collect();
    prob(joint, &both) / prob(joint, given)
}

/// Value of a bridge table at named states.
pub fn val(t: &Table, at: &[(Var, usize)]) -> f64 {
    t.at(|v| at.iter().find(|(u, _)| *u == v).unwrap_or_else(|| panic!("no state for #{v}")).1)
}
