//! Reference fixing-based identification on latent projections, written
//! against plain adjacency matrices so it shares no code with the engine.

use graph_core::CausalGraph;

pub struct Admg {
    pub n: usize,
    pub names: Vec<String>,
    pub dir: Vec<Vec<bool>>,
    pub bi: Vec<Vec<bool>>,
}

/// Latent projection of a hidden-variable graph onto its observed vertices.
/// Bidirected input edges count as a latent common parent.
pub fn project(g: &CausalGraph) -> Admg {
    let all: Vec<usize> = g.vertices().to_vec();
    let slot = |v: usize| all.iter().position(|&u| u == v).unwrap();
    let n_all = all.len();
    // hidden DAG with one extra latent per bidirected edge
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); n_all];
    let mut latent: Vec<bool> = all.iter().map(|&v| g.latent().contains(v)).collect();
    for (a, b) in g.directed_edges() {
        children[slot(a)].push(slot(b));
    }
    for (a, b) in g.bidirected_edges() {
        children.push(vec![slot(a), slot(b)]);
        latent.push(true);
    }
    let total = children.len();
    // observed vertices reachable from `s` through latent intermediates only
    let reach = |s: usize| -> Vec<usize> {
        let mut out = Vec::new();
        let mut seen = vec![false; total];
        let mut stack = children[s].clone();
        while let Some(x) = stack.pop() {
            if seen[x] {
                continue;
            }
            seen[x] = true;
            if latent[x] {
                stack.extend(children[x].iter().copied());
            } else {
                out.push(x);
            }
        }
        out
    };
    let obs: Vec<usize> = (0..n_all).filter(|&i| !latent[i]).collect();
    let idx = |i: usize| obs.iter().position(|&o| o == i).unwrap();
    let n = obs.len();
    let mut dir = vec![vec![false; n]; n];
    let mut bi = vec![vec![false; n]; n];
    for &o in &obs {
        for t in reach(o) {
            dir[idx(o)][idx(t)] = true;
        }
    }
    for l in (0..total).filter(|&i| latent[i]) {
        let r = reach(l);
        for &a in &r {
            for &b in &r {
                if a != b {
                    bi[idx(a)][idx(b)] = true;
                }
            }
        }
    }
    let names = obs.iter().map(|&i| g.name(all[i]).to_string()).collect();
    Admg { n, names, dir, bi }
}

impl Admg {
    pub fn index(&self, name: &str) -> usize {
        self.names.iter().position(|n| n == name).unwrap()
    }

    fn closure(&self, start: &[usize], random: &[bool], edge: impl Fn(usize, usize) -> bool) -> Vec<bool> {
        let mut seen = vec![false; self.n];
        let mut stack: Vec<usize> = start.to_vec();
        while let Some(x) = stack.pop() {
            if seen[x] {
                continue;
            }
            seen[x] = true;
            for y in 0..self.n {
                if random[y] && edge(x, y) {
                    stack.push(y);
                }
            }
        }
        seen
    }

    /// Every district of the subgraph induced by `d` is reachable by fixing
    /// `V \ D` one fixable vertex at a time.
    fn reachable(&self, d: &[bool]) -> bool {
        let mut random = vec![true; self.n];
        let mut dir = self.dir.clone();
        let mut bi = self.bi.clone();
        loop {
            let pick = (0..self.n).find(|&v| {
                if !random[v] || d[v] {
                    return false;
                }
                let dis = self.closure(&[v], &random, |x, y| bi[x][y]);
                let de = self.closure(&[v], &random, |x, y| dir[x][y]);
                (0..self.n).all(|w| w == v || !(dis[w] && de[w]))
            });
            match pick {
                Some(v) => {
                    random[v] = false;
                    for u in 0..self.n {
                        dir[u][v] = false;
                        bi[u][v] = false;
                        bi[v][u] = false;
                    }
                }
                None => return (0..self.n).all(|v| d[v] || !random[v]),
            }
        }
    }

    /// Districts of the subgraph induced by `keep`.
    pub fn districts(&self, keep: &[bool]) -> Vec<Vec<bool>> {
        let mut done = vec![false; self.n];
        let mut out = Vec::new();
        for v in 0..self.n {
            if keep[v] && !done[v] {
                let d = self.closure(&[v], keep, |x, y| self.bi[x][y]);
                for (i, &x) in d.iter().enumerate() {
                    done[i] |= x;
                }
                out.push(d);
            }
        }
        out
    }

    /// `p(Y ‖ A)` is identified by fixing iff every district of the
    /// outcome-ancestral subgraph is reachable.
    pub fn identifiable(&self, a: &[&str], y: &[&str]) -> bool {
        let mut not_a = vec![true; self.n];
        for n in a {
            not_a[self.index(n)] = false;
        }
        let ys: Vec<usize> = y.iter().map(|n| self.index(n)).collect();
        // ancestors of Y through directed paths avoiding A
        let y_star = self.closure(&ys, &not_a, |x, p| self.dir[p][x]);
        self.districts(&y_star).iter().all(|d| self.reachable(d))
    }
}
