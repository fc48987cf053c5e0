use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::Arc;

use bridge_solvers::{assemble, solve_bridge, BridgeKind, BridgeSpec};
use discrete_oracle::{primed, Table, Var, PRIME_OFFSET};

use crate::KernelError;

/// Identifying functional as an expression tree over the observational
/// distribution. Subtrees are shared through `Arc`; evaluation and printing
/// visit each shared node once.
#[derive(Debug, Clone, PartialEq)]
pub enum IdentExpr {
    /// Observational marginal `p(vars)`.
    Obs { vars: Vec<Var> },
    Sum { bound: Vec<Var>, child: Arc<IdentExpr> },
    Product(Vec<Arc<IdentExpr>>),
    Ratio(Arc<IdentExpr>, Arc<IdentExpr>),
    /// Solution of a bridge equation assembled from the evaluated inputs.
    Bridge { spec: BridgeSpec, main: Arc<IdentExpr>, w_source: Option<Arc<IdentExpr>>, tol: f64 },
    /// Rename primed variables back to their base ids.
    Unprime(Arc<IdentExpr>),
    /// Constant extension along `var`.
    Extend { var: Var, card: usize, child: Arc<IdentExpr> },
    Slice { var: Var, state: usize, child: Arc<IdentExpr> },
}

pub fn obs(vars: &[Var]) -> Arc<IdentExpr> {
    let mut vars = vars.to_vec();
    vars.sort_unstable();
    Arc::new(IdentExpr::Obs { vars })
}

/// `Σ_bound child`, dropping bound variables the child does not mention.
pub fn sum(bound: &[Var], child: &Arc<IdentExpr>) -> Arc<IdentExpr> {
    let free = child.free_vars();
    let mut bound: Vec<Var> = bound.iter().copied().filter(|v| free.contains(v)).collect();
    bound.sort_unstable();
    bound.dedup();
    if bound.is_empty() {
        return child.clone();
    }
    if let IdentExpr::Obs { vars } = child.as_ref() {
        let keep: Vec<Var> = vars.iter().copied().filter(|v| !bound.contains(v)).collect();
        return obs(&keep);
    }
    Arc::new(IdentExpr::Sum { bound, child: child.clone() })
}

pub fn product(children: &[Arc<IdentExpr>]) -> Arc<IdentExpr> {
    let mut flat = Vec::new();
    for c in children {
        match c.as_ref() {
            IdentExpr::Product(inner) => flat.extend(inner.iter().cloned()),
            _ => flat.push(c.clone()),
        }
    }
    if flat.len() == 1 {
        return flat.pop().unwrap();
    }
    Arc::new(IdentExpr::Product(flat))
}

pub fn ratio(num: &Arc<IdentExpr>, den: &Arc<IdentExpr>) -> Arc<IdentExpr> {
    Arc::new(IdentExpr::Ratio(num.clone(), den.clone()))
}

/// `child(· | given)`: the child divided by its marginal on `given`.
pub fn conditional(child: &Arc<IdentExpr>, given: &[Var]) -> Arc<IdentExpr> {
    let free = child.free_vars();
    let drop: Vec<Var> = free.iter().copied().filter(|v| !given.contains(v)).collect();
    ratio(child, &sum(&drop, child))
}

pub fn extend(var: Var, card: usize, child: &Arc<IdentExpr>) -> Arc<IdentExpr> {
    if child.free_vars().contains(&var) {
        return child.clone();
    }
    Arc::new(IdentExpr::Extend { var, card, child: child.clone() })
}

impl IdentExpr {
    /// Variables the value of this node is a table over, sorted.
    pub fn free_vars(&self) -> Vec<Var> {
        let mut out = match self {
            IdentExpr::Obs { vars } => vars.clone(),
            IdentExpr::Sum { bound, child } => child.free_vars().into_iter().filter(|v| !bound.contains(v)).collect(),
            IdentExpr::Product(cs) => cs.iter().flat_map(|c| c.free_vars()).collect(),
            IdentExpr::Ratio(a, b) => a.free_vars().into_iter().chain(b.free_vars()).collect(),
            IdentExpr::Bridge { spec, .. } => bridge_vars(spec),
            IdentExpr::Unprime(c) => c.free_vars().into_iter().map(|v| v % PRIME_OFFSET).collect(),
            IdentExpr::Extend { var, child, .. } => child.free_vars().into_iter().chain([*var]).collect(),
            IdentExpr::Slice { var, child, .. } => child.free_vars().into_iter().filter(|v| v != var).collect(),
        };
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Number of distinct nodes.
    pub fn node_count(self: &Arc<Self>) -> usize {
        let mut seen = HashMap::new();
        count_refs(self, &mut seen);
        seen.len()
    }

    pub fn evaluate(self: &Arc<Self>, observed: &Table) -> Result<Table, KernelError> {
        Evaluator::new(Some(observed)).eval(self)
    }

    /// S-expression text. Nodes referenced more than once are bound by
    /// `let` lines ahead of the body.
    pub fn to_sexpr(self: &Arc<Self>, names: &[String]) -> String {
        let mut refs = HashMap::new();
        count_refs(self, &mut refs);
        let mut p = Printer { names, refs, bound: HashMap::new(), lets: String::new() };
        let body = p.print(self, true);
        p.lets + &body
    }
}

/// Argument list of a bridge function in the representation used by
/// `bridge_solvers`.
fn bridge_vars(spec: &BridgeSpec) -> Vec<Var> {
    let mut v: Vec<Var> = spec.x.iter().copied().chain([spec.b]).collect();
    match spec.kind {
        BridgeKind::Outcome => v.extend(spec.o.iter().chain(&spec.w)),
        BridgeKind::Treatment => v.extend(&spec.z),
        BridgeKind::ExtendedOutcome => {
            v.extend(spec.o.iter().chain(&spec.w));
            v.extend(spec.w.iter().map(|&w| primed(w)));
        }
        BridgeKind::ExtendedTreatment => {
            v.extend(&spec.z);
            v.extend(spec.z.iter().map(|&z| primed(z)));
        }
    }
    v
}

fn key(e: &Arc<IdentExpr>) -> usize {
    Arc::as_ptr(e) as usize
}

fn children(e: &IdentExpr) -> Vec<&Arc<IdentExpr>> {
    match e {
        IdentExpr::Obs { .. } => vec![],
        IdentExpr::Sum { child, .. }
        | IdentExpr::Unprime(child)
        | IdentExpr::Extend { child, .. }
        | IdentExpr::Slice { child, .. } => vec![child],
        IdentExpr::Product(cs) => cs.iter().collect(),
        IdentExpr::Ratio(a, b) => vec![a, b],
        IdentExpr::Bridge { main, w_source, .. } => std::iter::once(main).chain(w_source.iter()).collect(),
    }
}

fn count_refs(e: &Arc<IdentExpr>, seen: &mut HashMap<usize, usize>) {
    let n = seen.entry(key(e)).or_insert(0);
    *n += 1;
    if *n == 1 {
        for c in children(e) {
            count_refs(c, seen);
        }
    }
}

/// Memoized evaluation against one observational joint. Nodes can be
/// seeded with known values, in which case their subtrees are never
/// visited and the joint may be omitted.
pub struct Evaluator<'a> {
    observed: Option<&'a Table>,
    memo: HashMap<usize, Table>,
    // keeps memoized nodes alive so their addresses stay unique
    pinned: Vec<Arc<IdentExpr>>,
}

impl<'a> Evaluator<'a> {
    pub fn new(observed: Option<&'a Table>) -> Self {
        Evaluator { observed, memo: HashMap::new(), pinned: Vec::new() }
    }

    pub fn seed(&mut self, e: &Arc<IdentExpr>, value: Table) {
        self.memo.insert(key(e), value);
        self.pinned.push(e.clone());
    }

    pub fn eval(&mut self, e: &Arc<IdentExpr>) -> Result<Table, KernelError> {
        if let Some(t) = self.memo.get(&key(e)) {
            return Ok(t.clone());
        }
        let t = match e.as_ref() {
            IdentExpr::Obs { vars } => {
                let observed = self.observed.ok_or(KernelError::NoData)?;
                if let Some(v) = vars.iter().find(|v| !observed.has_var(**v)) {
                    return Err(KernelError::Unobserved(*v));
                }
                observed.marginal(vars)
            }
            IdentExpr::Sum { bound, child } => self.eval(child)?.sum_out(bound),
            IdentExpr::Product(cs) => {
                let mut acc = Table::scalar(1.0);
                for c in cs {
                    acc = acc.product(&self.eval(c)?)?;
                }
                acc
            }
            IdentExpr::Ratio(a, b) => self.eval(a)?.ratio(&self.eval(b)?)?,
            IdentExpr::Bridge { spec, main, w_source, tol } => {
                let m = self.eval(main)?;
                let ws = w_source.as_ref().map(|w| self.eval(w)).transpose()?;
                let problem = assemble(spec, &m, ws.as_ref())?;
                solve_bridge(&problem, *tol)?.values
            }
            IdentExpr::Unprime(c) => self.eval(c)?.rename(|v| v % PRIME_OFFSET)?,
            IdentExpr::Extend { var, card, child } => self.eval(child)?.extend(*var, *card)?,
            IdentExpr::Slice { var, state, child } => self.eval(child)?.slice(*var, *state)?,
        };
        self.memo.insert(key(e), t.clone());
        self.pinned.push(e.clone());
        Ok(t)
    }
}

struct Printer<'a> {
    names: &'a [String],
    refs: HashMap<usize, usize>,
    bound: HashMap<usize, String>,
    lets: String,
}

impl Printer<'_> {
    fn var(&self, v: Var) -> String {
        let base = (v % PRIME_OFFSET) as usize;
        let name = self.names.get(base).cloned().unwrap_or_else(|| format!("#{base}"));
        if v >= PRIME_OFFSET {
            name + "'"
        } else {
            name
        }
    }

    fn vars(&self, vs: &[Var]) -> String {
        let parts: Vec<String> = vs.iter().map(|&v| self.var(v)).collect();
        format!("({})", parts.join(" "))
    }

    fn print(&mut self, e: &Arc<IdentExpr>, root: bool) -> String {
        if let Some(name) = self.bound.get(&key(e)) {
            return name.clone();
        }
        let text = match e.as_ref() {
            IdentExpr::Obs { vars } => format!("(p {})", self.vars(vars).trim_matches(['(', ')'])),
            IdentExpr::Sum { bound, child } => format!("(sum {} {})", self.vars(bound), self.print(child, false)),
            IdentExpr::Product(cs) => {
                let parts: Vec<String> = cs.iter().map(|c| self.print(c, false)).collect();
                format!("(* {})", parts.join(" "))
            }
            IdentExpr::Ratio(a, b) => format!("(/ {} {})", self.print(a, false), self.print(b, false)),
            IdentExpr::Bridge { spec, main, w_source, tol } => {
                let mut s = format!(
                    "(bridge {} :o {} :w {} :z {} :b {} :x {} :tol {:e} {}",
                    spec.kind.label(),
                    self.vars(&spec.o),
                    self.vars(&spec.w),
                    self.vars(&spec.z),
                    self.var(spec.b),
                    self.vars(&spec.x),
                    tol,
                    self.print(main, false)
                );
                if let Some(w) = w_source {
                    let _ = write!(s, " :w-source {}", self.print(w, false));
                }
                s + ")"
            }
            IdentExpr::Unprime(c) => format!("(unprime {})", self.print(c, false)),
            IdentExpr::Extend { var, child, .. } => format!("(extend {} {})", self.var(*var), self.print(child, false)),
            IdentExpr::Slice { var, state, child } => {
                format!("(at {}={} {})", self.var(*var), state, self.print(child, false))
            }
        };
        let shared = self.refs.get(&key(e)).copied().unwrap_or(0) > 1;
        if shared && !root && !matches!(e.as_ref(), IdentExpr::Obs { .. }) {
            let name = format!("k{}", self.bound.len() + 1);
            let _ = writeln!(self.lets, "(let {name} {text})");
            self.bound.insert(key(e), name.clone());
            return name;
        }
        text
    }
}
