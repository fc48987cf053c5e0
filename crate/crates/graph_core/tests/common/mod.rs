#![allow(dead_code)]

use std::collections::BTreeSet;

use graph_core::{CausalGraph, VertexSet};

/// Random mixed graph over `n` vertices named V0..; directed edges only go
/// from lower to higher index so the result is acyclic.
pub fn random_graph(n: usize, dir_bits: u64, bi_bits: u64, latent_bits: u64) -> CausalGraph {
    let mut b = CausalGraph::builder();
    for i in 0..n {
        let name = format!("V{i}");
        if latent_bits & (1 << i) != 0 {
            b.latent_vertex(&name).unwrap();
        } else {
            b.vertex(&name).unwrap();
        }
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

/// d-separation via the moralized ancestral graph, with bidirected edges
/// expanded to explicit latent parents first.
pub fn dsep_moral(g: &CausalGraph, x: VertexSet, y: VertexSet, z: VertexSet) -> bool {
    let n = g.slot_count();
    // explicit DAG: parents lists, with extra nodes for bidirected edges
    let mut parents: Vec<BTreeSet<usize>> = (0..n)
        .map(|v| if g.vertices().contains(v) { g.parents_of(v).iter().collect() } else { BTreeSet::new() })
        .collect();
    let mut present: BTreeSet<usize> = g.vertices().iter().collect();
    for (a, b) in g.bidirected_edges() {
        let l = parents.len();
        parents.push(BTreeSet::new());
        present.insert(l);
        parents[a].insert(l);
        parents[b].insert(l);
    }
    let z: BTreeSet<usize> = (z | g.context()).iter().filter(|v| !x.contains(*v) && !y.contains(*v)).collect();
    let mut relevant: BTreeSet<usize> = x.iter().chain(y.iter()).chain(z.iter().copied()).collect();
    let mut stack: Vec<usize> = relevant.iter().copied().collect();
    while let Some(v) = stack.pop() {
        for &p in &parents[v] {
            if relevant.insert(p) {
                stack.push(p);
            }
        }
    }
    let m = parents.len();
    let mut adj = vec![BTreeSet::new(); m];
    for &v in &relevant {
        let ps: Vec<usize> = parents[v].iter().copied().filter(|p| relevant.contains(p)).collect();
        for &p in &ps {
            adj[v].insert(p);
            adj[p].insert(v);
        }
        for i in 0..ps.len() {
            for j in (i + 1)..ps.len() {
                adj[ps[i]].insert(ps[j]);
                adj[ps[j]].insert(ps[i]);
            }
        }
    }
    let mut seen: BTreeSet<usize> = x.iter().collect();
    let mut stack: Vec<usize> = x.iter().collect();
    while let Some(v) = stack.pop() {
        if y.contains(v) {
            return false;
        }
        for &u in &adj[v] {
            if !z.contains(&u) && seen.insert(u) {
                stack.push(u);
            }
        }
    }
    let _ = present;
    true
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mark {
    Tail,
    Head,
}

/// Latent projection by explicit path enumeration: a directed edge a -> b
/// for every directed path with dropped interior, a bidirected edge for every
/// path with arrowheads at both ends whose interior vertices are dropped
/// non-colliders.
pub fn project_by_paths(g: &CausalGraph, keep: VertexSet) -> (BTreeSet<(usize, usize)>, BTreeSet<(usize, usize)>) {
    let n = g.slot_count();
    let dropped = g.vertices() - keep;
    // edges from v as (neighbor, mark at v, mark at neighbor)
    let mut nbrs: Vec<Vec<(usize, Mark, Mark)>> = vec![Vec::new(); n];
    for (a, b) in g.directed_edges() {
        nbrs[a].push((b, Mark::Tail, Mark::Head));
        nbrs[b].push((a, Mark::Head, Mark::Tail));
    }
    for (a, b) in g.bidirected_edges() {
        nbrs[a].push((b, Mark::Head, Mark::Head));
        nbrs[b].push((a, Mark::Head, Mark::Head));
    }
    let mut dir = BTreeSet::new();
    let mut bi = BTreeSet::new();
    for a in keep {
        // DFS over simple paths starting at a
        let mut stack: Vec<(usize, Mark, Mark, u64)> = Vec::new();
        for &(u, ma, mu) in &nbrs[a] {
            stack.push((u, ma, mu, 1u64 << a));
        }
        while let Some((v, first_mark, arrive_mark, visited)) = stack.pop() {
            if visited & (1 << v) != 0 {
                continue;
            }
            if keep.contains(v) {
                if first_mark == Mark::Tail && arrive_mark == Mark::Head {
                    dir.insert((a, v));
                }
                if first_mark == Mark::Head && arrive_mark == Mark::Head {
                    bi.insert((a.min(v), a.max(v)));
                }
                continue;
            }
            debug_assert!(dropped.contains(v));
            for &(u, mv, mu) in &nbrs[v] {
                let collider = arrive_mark == Mark::Head && mv == Mark::Head;
                if collider {
                    continue;
                }
                // a directed path must keep pointing forward
                if first_mark == Mark::Tail && arrive_mark == Mark::Head && mv == Mark::Head {
                    continue;
                }
                stack.push((u, first_mark, mu, visited | (1 << v)));
            }
        }
    }
    (dir, bi)
}

pub fn edge_sets(g: &CausalGraph) -> (BTreeSet<(usize, usize)>, BTreeSet<(usize, usize)>) {
    (g.directed_edges().into_iter().collect(), g.bidirected_edges().into_iter().collect())
}
