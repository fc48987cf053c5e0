use std::sync::Arc;

use bridge_solvers::{
    assemble, check_completeness, solve_bridge, BridgeError, BridgeKind, BridgeSpec, Completeness, DEFAULT_TOL,
};
use discrete_oracle::{primed, vars_of, DiscreteModel, Var};
use graph_core::{
    cadmg, d_separated, descendants, fixability_witness, materialize_bidirected, swig, CausalGraph, VertexSet,
};
use kernel_algebra::{expr, IdentExpr, Kernel};

use crate::report::{Check, CheckKind, PreconditionReport, Status};
use crate::step::{OpKind, OpStep};
use crate::OpError;

#[derive(Clone, Copy, Debug)]
pub enum Mode<'a> {
    /// Graph only; completeness and bridge existence are asserted.
    Declared,
    /// Non-graphical assumptions are checked against the model.
    Oracle(&'a DiscreteModel),
}

/// Everything the operations need besides the kernels.
#[derive(Clone, Debug)]
pub struct OpContext<'a> {
    graph: CausalGraph,
    cards: Vec<usize>,
    mode: Mode<'a>,
    pub tol: f64,
}

impl<'a> OpContext<'a> {
    /// `cards` is indexed by slot; missing entries default to 2.
    pub fn declared(g: &CausalGraph, cards: &[usize]) -> Result<OpContext<'static>, OpError> {
        let graph = materialize_bidirected(g)?;
        let mut cards = cards.to_vec();
        cards.resize(graph.slot_count(), 2);
        Ok(OpContext { graph, cards, mode: Mode::Declared, tol: DEFAULT_TOL })
    }

    pub fn oracle(model: &'a DiscreteModel) -> OpContext<'a> {
        OpContext { graph: model.graph().clone(), cards: model.cards().to_vec(), mode: Mode::Oracle(model), tol: DEFAULT_TOL }
    }

    /// Hidden-variable DAG the assumptions are checked on.
    pub fn graph(&self) -> &CausalGraph {
        &self.graph
    }

    pub fn card(&self, v: usize) -> usize {
        self.cards[v]
    }

    pub fn mode(&self) -> Mode<'a> {
        self.mode
    }

    fn mode_name(&self) -> &'static str {
        match self.mode {
            Mode::Declared => "declared",
            Mode::Oracle(_) => "oracle",
        }
    }
}

/// Variable roles of a proximal operation on its input kernel.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Roles {
    pub o: VertexSet,
    pub w: VertexSet,
    pub z: VertexSet,
    pub x: VertexSet,
    pub w_star: VertexSet,
    pub z_star: VertexSet,
    /// Obf only: the proxy kernel is the second input.
    pub w_from_p2: bool,
}

impl Roles {
    pub fn w_tilde(&self) -> VertexSet {
        self.w - self.w_star
    }

    pub fn z_tilde(&self) -> VertexSet {
        self.z - self.z_star
    }
}

/// Random variables of the output kernel, per the operation boxes.
pub fn output_random(kind: OpKind, r: &Roles) -> VertexSet {
    match kind {
        OpKind::Obf => r.o | r.z_tilde() | r.x,
        OpKind::Tbf => r.o | r.w_tilde() | r.x,
        OpKind::Ebf => r.o | r.w_tilde() | r.z_tilde() | r.x,
        OpKind::Fix | OpKind::Cut => VertexSet::EMPTY,
    }
}

fn structural(checks: &mut Vec<Check>, id: &'static str, statement: String, pass: bool) -> bool {
    checks.push(Check::new(id, CheckKind::Structural, statement, pass));
    pass
}

/// Roles for a proximal step plus the structural checks (box conditions on
/// variable membership). `None` when a structural condition fails.
pub fn roles(
    step: &OpStep,
    p1: &Kernel,
    p2: Option<&Kernel>,
    ctx: &OpContext,
    checks: &mut Vec<Check>,
) -> Result<Option<Roles>, OpError> {
    let g = ctx.graph();
    let (b, w, z) = (step.b, step.w, step.z);
    let r = p1.random();
    let s = p1.context();
    let f = |set: VertexSet| g.fmt_set(set);
    let mut ok = structural(checks, "treatment_in_kernel", format!("{} ∈ {}", g.name(b), f(r)), r.contains(b));
    ok &= structural(
        checks,
        "proxy_sets_valid",
        format!("W={} and Z={} nonempty, disjoint, without {}", f(w), f(z), g.name(b)),
        !w.is_empty() && !z.is_empty() && w.is_disjoint(z) && !(w | z).contains(b),
    );
    match step.kind {
        OpKind::Obf => ok &= structural(checks, "treatment_proxy_in_kernel", format!("{} ⊆ {}", f(z), f(r)), z.is_subset(r)),
        _ => ok &= structural(checks, "proxies_in_kernel", format!("{} ⊆ {}", f(w | z), f(r)), (w | z).is_subset(r)),
    }
    if !ok {
        return Ok(None);
    }
    let base = match step.kind {
        OpKind::Obf => r - w,
        OpKind::Tbf => r - z,
        _ => r,
    };
    let de = descendants(&cadmg(g, base, s)?, VertexSet::singleton(b)) & base;
    let mut roles = match step.kind {
        OpKind::Obf => Roles {
            o: de - z.with(b),
            w,
            z,
            x: VertexSet::EMPTY,
            w_star: VertexSet::EMPTY,
            z_star: de & z,
            w_from_p2: false,
        },
        OpKind::Tbf => Roles {
            o: de - w.with(b),
            w,
            z,
            x: VertexSet::EMPTY,
            w_star: de & w,
            z_star: VertexSet::EMPTY,
            w_from_p2: false,
        },
        OpKind::Ebf => Roles {
            o: de - (w | z).with(b),
            w,
            z,
            x: VertexSet::EMPTY,
            w_star: de & w,
            z_star: de & z,
            w_from_p2: false,
        },
        OpKind::Fix | OpKind::Cut => return Err(OpError::NotProximal),
    };
    roles.x = r - (roles.o | w | z).with(b);
    if step.kind == OpKind::Obf {
        let needed = w | (r - roles.o);
        if w.is_subset(r) {
            structural(checks, "outcome_proxy_kernel", format!("{} ⊆ R1", f(w)), true);
        } else {
            let in_p2 = p2.is_some_and(|k| needed.is_subset(k.random()) && k.context() == s);
            structural(checks, "outcome_proxy_kernel", format!("{} ⊆ R1 or {} ⊆ R2", f(w), f(needed)), in_p2);
            if !in_p2 {
                return Ok(None);
            }
            roles.w_from_p2 = true;
        }
    }
    Ok(Some(roles))
}

/// Counterfactual independence `a ⊥ b | c` in the single world where
/// `fixed` is intervened on.
fn cf_independent(g: &CausalGraph, fixed: VertexSet, a: VertexSet, b: VertexSet, c: VertexSet) -> Result<bool, OpError> {
    let sw = swig(g, fixed)?;
    Ok(d_separated(&sw, a, b - a, c - a - b)?)
}

fn cf_statement(g: &CausalGraph, world: VertexSet, a: VertexSet, b: VertexSet, c: VertexSet, b_world: VertexSet) -> String {
    let w = |s: VertexSet| {
        let n = g.names_of(s).iter().map(|x| x.to_lowercase()).collect::<Vec<_>>().join(",");
        format!("({n})")
    };
    let side = |s: VertexSet, wd: VertexSet| if wd.is_empty() { g.fmt_set(s) } else { format!("{}{}", g.fmt_set(s), w(wd)) };
    let cond = if c.is_empty() { String::new() } else { format!(" | {}", side(c, world - b_world)) };
    format!("{} ⊥ {}{}", side(a, world), side(b, world - b_world), cond)
}

fn graphical_checks(step: &OpStep, r: &Roles, s: VertexSet, u: VertexSet, ctx: &OpContext) -> Result<Vec<Check>, OpError> {
    let g = ctx.graph();
    let b = VertexSet::singleton(step.b);
    let sb = s | b;
    let (ign_cond, tp_cond) = match step.kind {
        OpKind::Obf => (u | r.z_tilde() | r.x, b | u | r.x),
        OpKind::Tbf => (u | r.w_tilde() | r.x, r.w_tilde() | b | u | r.x),
        _ => (u | r.w_tilde() | r.z_tilde() | r.x, r.w_tilde() | b | u | r.x),
    };
    let mut out = Vec::new();
    let mut push = |id, world: VertexSet, a: VertexSet, bb: VertexSet, c: VertexSet, b_world: VertexSet| -> Result<(), OpError> {
        let pass = cf_independent(g, world, a, bb, c)?;
        out.push(Check::new(id, CheckKind::Graphical, cf_statement(g, world, a, bb, c, b_world), pass));
        Ok(())
    };
    // O(s,b) ⊥ B(s) | ...: B's own potential outcome lives in the s-world
    push("latent_ignorability", sb, r.o, b, ign_cond, b)?;
    push("outcome_proxy", s, r.w, r.z | b, u | r.x, VertexSet::EMPTY)?;
    push("treatment_proxy", s, r.o, r.z, tp_cond, VertexSet::EMPTY)?;
    Ok(out)
}

fn bridge_spec(kind: BridgeKind, step: &OpStep, r: &Roles, s: VertexSet) -> BridgeSpec {
    let o = match kind {
        BridgeKind::Outcome | BridgeKind::ExtendedOutcome => vars_of(r.o),
        _ => vec![],
    };
    BridgeSpec { kind, o, w: vars_of(r.w), z: vars_of(r.z), b: step.b as Var, x: vars_of(r.x | s) }
}

fn completeness_check(
    model: &DiscreteModel,
    kind: BridgeKind,
    step: &OpStep,
    r: &Roles,
    s: VertexSet,
    u: VertexSet,
    ctx: &OpContext,
) -> Result<Check, OpError> {
    let g = ctx.graph();
    let outcome = matches!(kind, BridgeKind::Outcome | BridgeKind::ExtendedOutcome);
    let (id, proxy) = if outcome { ("outcome_completeness", r.z) } else { ("treatment_completeness", r.w) };
    let b = VertexSet::singleton(step.b);
    let kernel = model.interventional_kernel(u | proxy | b | r.x, s)?;
    let verdict = check_completeness(&kernel, &vars_of(u), &vars_of(proxy), &vars_of(b | r.x | s), ctx.tol)?;
    let statement = format!("p({} | {}, {}{} ‖ {}) has full rank in U*", g.fmt_set(u), g.fmt_set(proxy), g.name(step.b),
        if r.x.is_empty() { String::new() } else { format!(", {}", g.fmt_set(r.x)) }, g.fmt_set(s));
    let mut c = Check::new(id, CheckKind::Numerical, statement, verdict.holds());
    if let Completeness::Incomplete { witness, .. } = verdict {
        c.value = Some(witness.len() as f64);
    }
    Ok(c)
}

fn bridge_check(kind: BridgeKind, step: &OpStep, r: &Roles, p1: &Kernel, p2: Option<&Kernel>, ctx: &OpContext) -> Result<Check, OpError> {
    let id = match kind {
        BridgeKind::Outcome => "outcome_bridge",
        BridgeKind::Treatment => "treatment_bridge",
        BridgeKind::ExtendedOutcome => "extended_outcome_bridge",
        BridgeKind::ExtendedTreatment => "extended_treatment_bridge",
    };
    let spec = bridge_spec(kind, step, r, p1.context());
    let main = p1.value().ok_or(OpError::MissingValue)?;
    let ws = if r.w_from_p2 { Some(p2.and_then(Kernel::value).ok_or(OpError::MissingValue)?) } else { None };
    let statement = format!("{} bridge equation solvable within {:e}", kind.label().replace('_', " "), ctx.tol);
    let result = assemble(&spec, main, ws).and_then(|p| solve_bridge(&p, ctx.tol));
    let (pass, value) = match result {
        Ok(sol) => (true, sol.residual),
        Err(BridgeError::NoSolution { residual, .. }) => (false, residual),
        Err(BridgeError::PositivityViolation { .. }) => (false, f64::INFINITY),
        Err(e) => return Err(e.into()),
    };
    let mut c = Check::new(id, CheckKind::Numerical, statement, pass);
    c.value = Some(value);
    Ok(c)
}

fn declared(id: &'static str, statement: &str) -> Check {
    Check { id, kind: CheckKind::Numerical, statement: statement.to_string(), value: None, status: Status::Declared }
}

/// Non-graphical checks for one bridge route.
fn route_checks(
    kind: BridgeKind,
    step: &OpStep,
    r: &Roles,
    p1: &Kernel,
    p2: Option<&Kernel>,
    u: VertexSet,
    ctx: &OpContext,
) -> Result<Vec<Check>, OpError> {
    let outcome = matches!(kind, BridgeKind::Outcome | BridgeKind::ExtendedOutcome);
    match ctx.mode() {
        Mode::Declared => {
            let comp = if outcome { "outcome_completeness" } else { "treatment_completeness" };
            let bridge = match kind {
                BridgeKind::Outcome => "outcome_bridge",
                BridgeKind::Treatment => "treatment_bridge",
                BridgeKind::ExtendedOutcome => "extended_outcome_bridge",
                BridgeKind::ExtendedTreatment => "extended_treatment_bridge",
            };
            Ok(vec![
                declared(comp, "completeness asserted by the user"),
                declared(bridge, "bridge existence asserted by the user"),
            ])
        }
        Mode::Oracle(model) => Ok(vec![
            completeness_check(model, kind, step, r, p1.context(), u, ctx)?,
            bridge_check(kind, step, r, p1, p2, ctx)?,
        ]),
    }
}

/// Check the conditions of `step` on the inputs. For proximal steps every
/// latent subset `U*` is tried, smallest first; the first one under which
/// all checks pass is reported, otherwise the one with fewest failures.
pub fn check_preconditions(step: &OpStep, p1: &Kernel, p2: Option<&Kernel>, ctx: &OpContext) -> Result<PreconditionReport, OpError> {
    check_with_route(step, p1, p2, ctx, None)
}

pub(crate) fn check_with_route(
    step: &OpStep,
    p1: &Kernel,
    p2: Option<&Kernel>,
    ctx: &OpContext,
    ebf_route: Option<BridgeKind>,
) -> Result<PreconditionReport, OpError> {
    let g = ctx.graph();
    let mut report = PreconditionReport {
        step: *step,
        op: step.label(g),
        mode: ctx.mode_name(),
        u_star: None,
        route: None,
        checks: Vec::new(),
    };
    let r = p1.random();
    match step.kind {
        OpKind::Fix | OpKind::Cut => {
            let ok = structural(&mut report.checks, "treatment_in_kernel", format!("{} ∈ {}", g.name(step.b), g.fmt_set(r)), r.contains(step.b));
            if ok && step.kind == OpKind::Fix {
                let witness = fixability_witness(&cadmg(g, r, p1.context())?, step.b)?;
                let statement = format!("dis({0}) ∩ de({0}) = {{{0}}} in G(R,S)", g.name(step.b));
                let mut c = Check::new("fixable", CheckKind::Structural, statement, witness.is_empty());
                if !witness.is_empty() {
                    c.statement += &format!("; witness {}", g.fmt_set(witness));
                }
                report.checks.push(c);
            }
            return Ok(report);
        }
        _ => {}
    }
    let mut checks = Vec::new();
    let Some(roles) = roles(step, p1, p2, ctx, &mut checks)? else {
        report.checks = checks;
        return Ok(report);
    };
    let s = p1.context();
    let mut best: Option<(usize, VertexSet, Vec<Check>, Option<BridgeKind>)> = None;
    for u in g.latent().subsets_by_size() {
        let mut all = checks.clone();
        all.extend(graphical_checks(step, &roles, s, u, ctx)?);
        let mut route = None;
        if !all.iter().any(Check::failed) {
            let (numeric, chosen) = numerical(step, &roles, p1, p2, u, ctx, ebf_route)?;
            all.extend(numeric);
            route = chosen;
        }
        let fails = all.iter().filter(|c| c.failed()).count();
        if fails == 0 {
            best = Some((0, u, all, route));
            break;
        }
        if best.as_ref().map_or(true, |b| fails < b.0) {
            best = Some((fails, u, all, route));
        }
    }
    let (_, u, all, route) = best.expect("the empty latent set is always a candidate");
    report.u_star = Some(g.names_of(u));
    report.checks = all;
    report.route = route;
    Ok(report)
}

fn numerical(
    step: &OpStep,
    roles: &Roles,
    p1: &Kernel,
    p2: Option<&Kernel>,
    u: VertexSet,
    ctx: &OpContext,
    ebf_route: Option<BridgeKind>,
) -> Result<(Vec<Check>, Option<BridgeKind>), OpError> {
    let single = |kind| -> Result<_, OpError> { Ok((route_checks(kind, step, roles, p1, p2, u, ctx)?, Some(kind))) };
    match step.kind {
        OpKind::Obf => single(BridgeKind::Outcome),
        OpKind::Tbf => single(BridgeKind::Treatment),
        OpKind::Ebf => {
            if let Some(kind) = ebf_route {
                return single(kind);
            }
            let first = route_checks(BridgeKind::ExtendedOutcome, step, roles, p1, p2, u, ctx)?;
            if !first.iter().any(Check::failed) {
                return Ok((first, Some(BridgeKind::ExtendedOutcome)));
            }
            let second = route_checks(BridgeKind::ExtendedTreatment, step, roles, p1, p2, u, ctx)?;
            let ok = !second.iter().any(Check::failed);
            let mut out: Vec<Check> = first
                .into_iter()
                .map(|mut c| {
                    if ok && c.failed() {
                        c.status = Status::Superseded;
                    }
                    c
                })
                .collect();
            out.extend(second);
            Ok((out, ok.then_some(BridgeKind::ExtendedTreatment)))
        }
        OpKind::Fix | OpKind::Cut => Err(OpError::NotProximal),
    }
}

/// Output of a successful operation.
#[derive(Clone, Debug)]
pub struct Applied {
    pub kernel: Kernel,
    pub report: PreconditionReport,
    pub roles: Option<Roles>,
}

fn require(report: PreconditionReport) -> Result<PreconditionReport, OpError> {
    if report.passed() {
        Ok(report)
    } else {
        Err(OpError::ConditionFailed(Box::new(report)))
    }
}

pub fn apply_fix(p: &Kernel, b: usize, ctx: &OpContext) -> Result<Applied, OpError> {
    let report = require(check_preconditions(&OpStep::fix(b), p, None, ctx)?)?;
    Ok(Applied { kernel: p.fix(b, ctx.graph())?, report, roles: None })
}

pub fn apply_cut(p: &Kernel, b: usize, ctx: &OpContext) -> Result<Applied, OpError> {
    let report = require(check_preconditions(&OpStep::cut(b), p, None, ctx)?)?;
    Ok(Applied { kernel: p.cut(b, ctx.graph(), ctx.card(b))?, report, roles: None })
}

pub fn apply_obf(p1: &Kernel, p2: &Kernel, step: &OpStep, ctx: &OpContext) -> Result<Applied, OpError> {
    apply_proximal(p1, Some(p2), step, ctx, None)
}

pub fn apply_tbf(p: &Kernel, step: &OpStep, ctx: &OpContext) -> Result<Applied, OpError> {
    apply_proximal(p, None, step, ctx, None)
}

/// Tries the extended outcome route first, then the extended treatment route.
pub fn apply_ebf(p: &Kernel, step: &OpStep, ctx: &OpContext) -> Result<Applied, OpError> {
    apply_proximal(p, None, step, ctx, None)
}

/// Ebf restricted to one route (`ExtendedOutcome` or `ExtendedTreatment`).
pub fn apply_ebf_route(p: &Kernel, step: &OpStep, ctx: &OpContext, route: BridgeKind) -> Result<Applied, OpError> {
    if !route.is_extended() {
        return Err(OpError::NotProximal);
    }
    apply_proximal(p, None, step, ctx, Some(route))
}

/// Dispatch on the step kind. `p2` is only consulted by Obf.
pub fn apply_step(p1: &Kernel, p2: &Kernel, step: &OpStep, ctx: &OpContext) -> Result<Applied, OpError> {
    match step.kind {
        OpKind::Fix => apply_fix(p1, step.b, ctx),
        OpKind::Cut => apply_cut(p1, step.b, ctx),
        OpKind::Obf => apply_obf(p1, p2, step, ctx),
        OpKind::Tbf => apply_tbf(p1, step, ctx),
        OpKind::Ebf => apply_ebf(p1, step, ctx),
    }
}

fn apply_proximal(
    p1: &Kernel,
    p2: Option<&Kernel>,
    step: &OpStep,
    ctx: &OpContext,
    ebf_route: Option<BridgeKind>,
) -> Result<Applied, OpError> {
    let expected = match step.kind {
        OpKind::Obf | OpKind::Tbf | OpKind::Ebf => step.kind,
        _ => return Err(OpError::NotProximal),
    };
    let report = require(check_with_route(step, p1, p2, ctx, ebf_route)?)?;
    let mut scratch = Vec::new();
    let r = roles(step, p1, p2, ctx, &mut scratch)?.expect("structural checks passed");
    let s = p1.context();
    let route = report.route.expect("proximal reports carry a route");
    let spec = bridge_spec(route, step, &r, s);
    let e1 = p1.expr();
    let out_random = output_random(expected, &r);
    // marginals go through `Kernel::marginal` so their values are known
    // without re-reading the observational table
    let pw = (p2.filter(|_| r.w_from_p2).unwrap_or(p1)).marginal(r.w | r.z_tilde() | r.x)?;
    let pz = p1.marginal(p1.random() - r.w_star)?;
    let bridge = Arc::new(IdentExpr::Bridge {
        spec,
        main: e1.clone(),
        w_source: r.w_from_p2.then(|| p2.expect("checked").expr().clone()),
        tol: ctx.tol,
    });
    let (e, inputs): (Arc<IdentExpr>, Vec<&Kernel>) = match route {
        BridgeKind::Outcome => {
            let mut inputs = vec![p1, &pw];
            if r.w_from_p2 {
                inputs.push(p2.expect("checked"));
            }
            (expr::sum(&vars_of(r.w), &expr::product(&[bridge, pw.expr().clone()])), inputs)
        }
        BridgeKind::Treatment => (expr::sum(&vars_of(r.z), &expr::product(&[bridge, pz.expr().clone()])), vec![p1, &pz]),
        BridgeKind::ExtendedOutcome => {
            let bound: Vec<Var> = vars_of(r.w).into_iter().chain(vars_of(r.w_star).into_iter().map(primed)).collect();
            let body = expr::sum(&bound, &expr::product(&[bridge, pw.expr().clone()]));
            (Arc::new(IdentExpr::Unprime(body)), vec![p1, &pw])
        }
        BridgeKind::ExtendedTreatment => {
            let bound: Vec<Var> = vars_of(r.z).into_iter().chain(vars_of(r.z_star).into_iter().map(primed)).collect();
            let body = expr::sum(&bound, &expr::product(&[bridge, pz.expr().clone()]));
            (Arc::new(IdentExpr::Unprime(body)), vec![p1, &pz])
        }
    };
    let context = s.with(step.b);
    let free = e.free_vars();
    let vars = vars_of(out_random | context);
    if !free.iter().all(|v| vars.contains(v)) || !vars_of(out_random).iter().all(|v| free.contains(v)) {
        return Err(OpError::Contract(report.op.clone()));
    }
    let kernel = Kernel::derived_from(out_random, context, e, &inputs)?;
    Ok(Applied { kernel, report, roles: Some(r) })
}
