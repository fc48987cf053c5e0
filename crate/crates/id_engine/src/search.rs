use std::collections::HashSet;
use std::sync::Arc;

use discrete_oracle::{vars_of, Table, Var};
use graph_core::{CausalGraph, GraphFile, VertexSet};
use kernel_algebra::{expr, IdentExpr, Kernel};
use proximal_ops::{Mode, OpContext, OpKind, OpStep};

use crate::algorithm::{advance, complete, district_kernel, KernelPair, StepFailure, StepOutcome, StepRecord};
use crate::targets::{district_targets, DistrictTarget, Targets};
use crate::IdError;

pub const DEFAULT_BUDGET: usize = 100_000;

/// `p(Y ‖ A)` with the proxy candidates the search may use.
#[derive(Clone, Debug)]
pub struct IdentQuery {
    pub treatment: VertexSet,
    pub outcome: VertexSet,
    pub w_pool: VertexSet,
    pub z_pool: VertexSet,
}

impl IdentQuery {
    pub fn new(g: &CausalGraph, treatment: VertexSet, outcome: VertexSet, w_pool: VertexSet, z_pool: VertexSet) -> Result<IdentQuery, IdError> {
        let ay = treatment | outcome;
        if treatment.is_empty() || outcome.is_empty() || !treatment.is_disjoint(outcome) {
            return Err(IdError::Query("treatment and outcome must be nonempty and disjoint".into()));
        }
        if !ay.is_subset(g.observed()) || !(w_pool | z_pool).is_subset(g.observed()) {
            return Err(IdError::Query("query vertices must be observed".into()));
        }
        if !(w_pool | z_pool).is_disjoint(ay) {
            return Err(IdError::Query("proxies must lie outside treatment and outcome".into()));
        }
        Ok(IdentQuery { treatment, outcome, w_pool, z_pool })
    }

    /// Query from the `query` line of a graph file.
    pub fn from_file(file: &GraphFile) -> Result<IdentQuery, IdError> {
        let q = file.query.as_ref().ok_or_else(|| IdError::Query("graph file has no query line".into()))?;
        let g = &file.graph;
        IdentQuery::new(g, g.set(&q.treat)?, g.set(&q.outcome)?, g.set(&q.wproxy)?, g.set(&q.zproxy)?)
    }

    pub fn without_proxies(&self) -> IdentQuery {
        IdentQuery { w_pool: VertexSet::EMPTY, z_pool: VertexSet::EMPTY, ..self.clone() }
    }
}

/// Which observed vertices join the latents in `H`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HPolicy {
    Fixed(VertexSet),
    /// No extra vertices first, then subsets of the proxy pools by total
    /// district size.
    Search,
}

#[derive(Clone, Debug)]
pub struct SearchOptions {
    pub h: HPolicy,
    pub allowed: Vec<OpKind>,
    /// Try bridge steps before Fix at every position.
    pub proxy_first: bool,
    /// Cap on attempted operations.
    pub budget: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            h: HPolicy::Search,
            allowed: vec![OpKind::Fix, OpKind::Obf, OpKind::Tbf, OpKind::Ebf],
            proxy_first: false,
            budget: DEFAULT_BUDGET,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IdentStatus {
    Identified,
    Fail,
    BudgetExhausted,
}

#[derive(Clone, Debug)]
pub struct DistrictResult {
    pub target: DistrictTarget,
    pub records: Vec<StepRecord>,
    /// `p(D ‖ S)` as produced by the last step.
    pub kernel: Kernel,
}

/// Where the search got furthest before failing.
#[derive(Clone, Debug)]
pub struct FailWitness {
    pub h: VertexSet,
    pub district: VertexSet,
    pub steps: Vec<String>,
    pub failure: StepFailure,
}

#[derive(Clone, Debug)]
pub struct IdentResult {
    pub status: IdentStatus,
    pub query: IdentQuery,
    pub mode: &'static str,
    pub targets: Option<Targets>,
    pub districts: Vec<DistrictResult>,
    /// Identifying functional for `p(Y ‖ A)`.
    pub functional: Option<Arc<IdentExpr>>,
    /// `p(Y ‖ A)`, with its value in oracle mode.
    pub kernel: Option<Kernel>,
    pub fail_witness: Option<FailWitness>,
    pub nodes: usize,
    pub names: Vec<String>,
}

impl IdentResult {
    pub fn identified(&self) -> bool {
        self.status == IdentStatus::Identified
    }

    /// Step labels per district, in district order.
    pub fn strategy(&self) -> Vec<Vec<String>> {
        self.districts.iter().map(|d| d.records.iter().map(|r| r.op.clone()).collect()).collect()
    }
}

struct Budget {
    used: usize,
    cap: usize,
}

struct Exhausted;

struct Dfs<'a, 'm> {
    ctx: &'a OpContext<'m>,
    target: DistrictTarget,
    query: &'a IdentQuery,
    opts: &'a SearchOptions,
    budget: &'a mut Budget,
    dead: HashSet<[u64; 4]>,
    path: Vec<StepRecord>,
    best: Option<(usize, Vec<String>, StepFailure)>,
}

impl Dfs<'_, '_> {
    fn candidates(&self, pair: &KernelPair) -> Vec<OpStep> {
        let remaining = self.target.context & pair.p1.random();
        let mut fixes = Vec::new();
        let mut bridges = Vec::new();
        for b in remaining {
            if self.opts.allowed.contains(&OpKind::Fix) {
                fixes.push(OpStep::fix(b));
            }
            for kind in [OpKind::Obf, OpKind::Tbf, OpKind::Ebf] {
                if !self.opts.allowed.contains(&kind) {
                    continue;
                }
                for w in self.query.w_pool.without(b).subsets_by_size() {
                    if w.is_empty() {
                        continue;
                    }
                    for z in (self.query.z_pool.without(b) - w).subsets_by_size() {
                        if !z.is_empty() {
                            bridges.push(OpStep::proximal(kind, b, w, z));
                        }
                    }
                }
            }
        }
        if self.opts.proxy_first {
            bridges.extend(fixes);
            bridges
        } else {
            fixes.extend(bridges);
            fixes
        }
    }

    fn run(&mut self, pair: KernelPair) -> Result<Option<KernelPair>, IdErrorOr> {
        if complete(&pair, &self.target) {
            return Ok(Some(pair));
        }
        if self.dead.contains(&pair.signature()) {
            return Ok(None);
        }
        for step in self.candidates(&pair) {
            self.budget.used += 1;
            if self.budget.used > self.budget.cap {
                return Err(IdErrorOr::Exhausted(Exhausted));
            }
            match advance(&pair, &step, &self.target, self.ctx)? {
                StepOutcome::Advanced(next, rec) => {
                    self.path.push(rec);
                    if let Some(done) = self.run(next)? {
                        return Ok(Some(done));
                    }
                    self.path.pop();
                }
                StepOutcome::Failed(f) => {
                    let depth = self.path.len();
                    if self.best.as_ref().map_or(true, |b| depth > b.0) {
                        let steps = self.path.iter().map(|r| r.op.clone()).collect();
                        self.best = Some((depth, steps, f));
                    }
                }
            }
        }
        self.dead.insert(pair.signature());
        Ok(None)
    }
}

enum IdErrorOr {
    Err(IdError),
    Exhausted(Exhausted),
}

impl From<IdError> for IdErrorOr {
    fn from(e: IdError) -> Self {
        IdErrorOr::Err(e)
    }
}

/// Observational kernel `p(V)` for the context: with its value in oracle
/// mode, symbolic otherwise.
pub fn observed_kernel(ctx: &OpContext) -> Result<Kernel, IdError> {
    let joint = match ctx.mode() {
        Mode::Oracle(m) => Some(m.observed_joint()?),
        Mode::Declared => None,
    };
    Ok(Kernel::observational(ctx.graph().observed(), joint.as_ref())?)
}

/// Candidate extra `H` sets in search order.
pub fn h_candidates(g: &CausalGraph, query: &IdentQuery, policy: &HPolicy) -> Result<Vec<Targets>, IdError> {
    let extras = match policy {
        HPolicy::Fixed(h) => vec![*h - g.latent()],
        HPolicy::Search => (query.w_pool | query.z_pool).subsets_by_size(),
    };
    let mut out = Vec::new();
    for (i, extra) in extras.into_iter().enumerate() {
        let t = district_targets(g, query.treatment, query.outcome, extra)?;
        out.push((extra.is_empty(), t.total_size(), i, t));
    }
    out.sort_by_key(|(base, size, i, _)| (!base, *size, *i));
    Ok(out.into_iter().map(|(.., t)| t).collect())
}

/// Search for a step list per district under each candidate `H` and
/// assemble the functional for `p(Y ‖ A)` from the first `H` where every
/// district succeeds.
pub fn search_identification(query: &IdentQuery, ctx: &OpContext, opts: &SearchOptions) -> Result<IdentResult, IdError> {
    let g = ctx.graph();
    let observed = observed_kernel(ctx)?;
    let mut budget = Budget { used: 0, cap: opts.budget };
    let mut witness: Option<(usize, FailWitness)> = None;
    let mut result = IdentResult {
        status: IdentStatus::Fail,
        query: query.clone(),
        mode: match ctx.mode() {
            Mode::Declared => "declared",
            Mode::Oracle(_) => "oracle",
        },
        targets: None,
        districts: Vec::new(),
        functional: None,
        kernel: None,
        fail_witness: None,
        nodes: 0,
        names: g.names().to_vec(),
    };
    'h: for targets in h_candidates(g, query, &opts.h)? {
        let mut found = Vec::new();
        for target in &targets.targets {
            let mut dfs = Dfs {
                ctx,
                target: *target,
                query,
                opts,
                budget: &mut budget,
                dead: HashSet::new(),
                path: Vec::new(),
                best: None,
            };
            match dfs.run(KernelPair::start(&observed)) {
                Ok(Some(pair)) => {
                    let kernel = district_kernel(&pair, target)?;
                    found.push(DistrictResult { target: *target, records: std::mem::take(&mut dfs.path), kernel });
                }
                Ok(None) => {
                    if let Some((depth, steps, failure)) = dfs.best.take() {
                        if witness.as_ref().map_or(true, |w| depth > w.0) {
                            let w = FailWitness { h: targets.h, district: target.district, steps, failure };
                            witness = Some((depth, w));
                        }
                    }
                    continue 'h;
                }
                Err(IdErrorOr::Err(e)) => return Err(e),
                Err(IdErrorOr::Exhausted(_)) => {
                    result.status = IdentStatus::BudgetExhausted;
                    result.nodes = budget.used;
                    return Ok(result);
                }
            }
        }
        let (functional, kernel) = assemble(query, &targets, &found)?;
        result.status = IdentStatus::Identified;
        result.targets = Some(targets);
        result.districts = found;
        result.functional = Some(functional);
        result.kernel = Some(kernel);
        result.nodes = budget.used;
        return Ok(result);
    }
    result.fail_witness = witness.map(|(_, w)| w);
    result.nodes = budget.used;
    Ok(result)
}

/// `Σ_{Y* \ Y} Π_D p(D ‖ s_D)`, with each district kernel read at state 0
/// of context variables outside `Y* ∪ A` (it is constant in them).
pub fn assemble(
    query: &IdentQuery,
    targets: &Targets,
    districts: &[DistrictResult],
) -> Result<(Arc<IdentExpr>, Kernel), IdError> {
    let keep = targets.y_star | query.treatment;
    let mut factors = Vec::new();
    for d in districts {
        let mut e = d.kernel.expr().clone();
        for v in d.kernel.context() - keep {
            e = Arc::new(IdentExpr::Slice { var: v as Var, state: 0, child: e });
        }
        factors.push(e);
    }
    // treatments the factors never mention are padded by the kernel
    let f = expr::sum(&vars_of(targets.y_star - query.outcome), &expr::product(&factors));
    let inputs: Vec<&Kernel> = districts.iter().map(|d| &d.kernel).collect();
    let kernel = Kernel::derived_from(query.outcome, query.treatment, f.clone(), &inputs)?;
    Ok((f, kernel))
}

/// Evaluate an identifying functional for `p(Y ‖ A)` on an observational
/// joint.
pub fn evaluate_functional(f: &Arc<IdentExpr>, outcome: VertexSet, treatment: VertexSet, observed: &Table) -> Result<Kernel, IdError> {
    Ok(Kernel::derived(outcome, treatment, f.clone(), Some(observed))?)
}
