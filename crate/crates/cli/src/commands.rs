use std::fs;
use std::io::Write as _;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use discrete_oracle::{parse_model_file, random_model, vars_of, DiscreteModel, DEFAULT_FLOOR};
use graph_core::{parse_graph_file_with, CausalGraph, GraphFile, VertexSet};
use id_engine::{
    certificate, district_targets_of, evaluate_functional, search_identification, HPolicy, IdentQuery, IdentResult,
    IdentStatus, SearchOptions,
};
use kernel_algebra::Kernel;
use proximal_ops::{apply_fix, check_preconditions, OpContext, OpKind, OpStep};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::{ModeArg, SearchArgs};

pub const EXIT_OK: u8 = 0;
pub const EXIT_INPUT: u8 = 1;
pub const EXIT_FAIL: u8 = 2;
pub const EXIT_BUDGET: u8 = 3;
pub const EXIT_TOLERANCE: u8 = 4;

const FAIL_NOTE: &str = "no strategy was found; this does not show that the query is non-identifiable";

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

/// Graph files may also be model files; `cpt` lines are ignored here.
fn read_graph(path: &Path) -> Result<GraphFile> {
    parse_graph_file_with(&read(path)?, &["cpt"]).with_context(|| format!("{}", path.display()))
}

fn read_model(path: &Path) -> Result<(GraphFile, DiscreteModel)> {
    parse_model_file(&read(path)?).with_context(|| format!("{}", path.display()))
}

fn names_to_set(g: &CausalGraph, list: &str) -> Result<VertexSet> {
    let names: Vec<&str> = list.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    Ok(g.set(&names)?)
}

/// `A,B` without braces, for use inside `p(· ‖ ·)`.
fn plain(g: &CausalGraph, s: VertexSet) -> String {
    g.names_of(s).join(",")
}

fn write_out(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Summary lines go to stdout when the main output went to a file.
fn summary(to_stdout: bool, line: &str) {
    if to_stdout {
        println!("{line}");
    } else {
        eprintln!("{line}");
    }
}

fn parse_kind(s: &str) -> Result<OpKind> {
    Ok(match s.to_ascii_lowercase().as_str() {
        "fix" => OpKind::Fix,
        "obf" => OpKind::Obf,
        "tbf" => OpKind::Tbf,
        "ebf" => OpKind::Ebf,
        "cut" => OpKind::Cut,
        other => bail!("unknown operation `{other}`"),
    })
}

fn options(g: &CausalGraph, args: &SearchArgs) -> Result<SearchOptions> {
    let h = if args.h_set == "auto" { HPolicy::Search } else { HPolicy::Fixed(names_to_set(g, &args.h_set)?) };
    let allowed = args.ops.split(',').filter(|s| !s.is_empty()).map(parse_kind).collect::<Result<Vec<_>>>()?;
    if allowed.contains(&OpKind::Cut) {
        bail!("Cut is only used by the second kernel sequence");
    }
    Ok(SearchOptions { h, allowed, proxy_first: args.proxy_first, budget: args.budget })
}

/// The model for oracle mode: from `--model` or drawn from the seed.
fn oracle_model(file: &GraphFile, model: Option<&Path>, seed: u64) -> Result<DiscreteModel> {
    match model {
        Some(p) => {
            let (mf, m) = read_model(p)?;
            if mf.graph.names() != file.graph.names() {
                bail!("{} does not describe the same vertices as the graph", p.display());
            }
            Ok(m)
        }
        None => Ok(random_model(&file.graph, &file.cards(), seed, DEFAULT_FLOOR)?),
    }
}

/// Largest gap between an identified `p(Y ‖ A)` and the model's.
fn oracle_error(m: &DiscreteModel, q: &IdentQuery, r: &IdentResult) -> Result<f64> {
    let f = r.functional.as_ref().ok_or_else(|| anyhow!("no functional"))?;
    let k = evaluate_functional(f, q.outcome, q.treatment, &m.observed_joint()?)?;
    let truth = m.interventional_kernel(q.outcome, q.treatment)?;
    Ok(k.value().ok_or_else(|| anyhow!("functional has no value"))?.max_abs_diff(&truth)?)
}

fn bridge_residual(r: &IdentResult) -> Option<f64> {
    r.districts
        .iter()
        .flat_map(|d| &d.records)
        .flat_map(|rec| &rec.report.checks)
        .filter(|c| c.id.ends_with("bridge"))
        .filter_map(|c| c.value)
        .reduce(f64::max)
}

fn exit_for(status: IdentStatus) -> u8 {
    match status {
        IdentStatus::Identified => EXIT_OK,
        IdentStatus::Fail => EXIT_FAIL,
        IdentStatus::BudgetExhausted => EXIT_BUDGET,
    }
}

fn describe(g: &CausalGraph, r: &IdentResult) -> Vec<String> {
    let q = &r.query;
    let target = format!("p({} ‖ {})", plain(g, q.outcome), plain(g, q.treatment));
    match r.status {
        IdentStatus::Identified => {
            let t = r.targets.as_ref().expect("identified results carry targets");
            let mut lines = vec![format!("identified {target} with H = {}", g.fmt_set(t.h))];
            for (d, steps) in r.districts.iter().zip(r.strategy()) {
                lines.push(format!("  {}: {}", g.fmt_set(d.target.district), steps.join(", ")));
            }
            lines
        }
        IdentStatus::Fail => {
            let mut lines = vec![format!("FAIL for {target}: {FAIL_NOTE}")];
            if let Some(w) = &r.fail_witness {
                lines.push(format!(
                    "  furthest attempt: H = {}, district {}, after [{}], {} failed: {}",
                    g.fmt_set(w.h),
                    g.fmt_set(w.district),
                    w.steps.join(", "),
                    w.failure.op,
                    w.failure.reason
                ));
            }
            lines
        }
        IdentStatus::BudgetExhausted => vec![format!("search budget exhausted after {} operations", r.nodes)],
    }
}

pub fn identify(path: &Path, args: &SearchArgs, out: Option<&Path>) -> Result<u8> {
    let file = read_graph(path)?;
    let q = IdentQuery::from_file(&file)?;
    let opts = options(&file.graph, args)?;
    // the searched graph carries a latent per bidirected edge
    let (r, mut cert, g) = match args.mode {
        ModeArg::Declared => {
            let ctx = OpContext::declared(&file.graph, &file.cards())?;
            let r = search_identification(&q, &ctx, &opts)?;
            let cert = certificate(ctx.graph(), &r);
            (r, cert, ctx.graph().clone())
        }
        ModeArg::Oracle => {
            let m = oracle_model(&file, args.model.as_deref(), args.seed)?;
            let r = search_identification(&q, &OpContext::oracle(&m), &opts)?;
            let mut cert = certificate(m.graph(), &r);
            let source = match &args.model {
                Some(p) => json!({ "file": p.display().to_string() }),
                None => json!({ "seed": args.seed }),
            };
            let mut verification = json!({ "model": source });
            if r.identified() {
                verification["max_abs_error"] = json!(oracle_error(&m, &q, &r)?);
                verification["max_bridge_residual"] = json!(bridge_residual(&r));
            }
            cert["verification"] = verification;
            (r, cert, m.graph().clone())
        }
    };
    if let Value::Object(map) = &mut cert {
        map.insert("graph".into(), json!(path.display().to_string()));
    }
    write_out(out, &(serde_json::to_string_pretty(&cert)? + "\n"))?;
    for line in describe(&g, &r) {
        summary(out.is_some(), &line);
    }
    Ok(exit_for(r.status))
}

struct Trial {
    line: Value,
    status: IdentStatus,
    error: Option<f64>,
}

fn run_trial(q: &IdentQuery, opts: &SearchOptions, m: &DiscreteModel, seed: Option<u64>) -> Trial {
    let outcome = search_identification(q, &OpContext::oracle(m), opts)
        .map_err(anyhow::Error::from)
        .and_then(|r| {
            let err = if r.identified() { Some(oracle_error(m, q, &r)?) } else { None };
            Ok((r, err))
        });
    match outcome {
        Ok((r, error)) => {
            let strategy = r.strategy();
            let line = json!({
                "seed": seed,
                "status": r.status,
                "max_abs_error": error,
                "bridge_residual": bridge_residual(&r),
                "strategy": strategy,
            });
            Trial { line, status: r.status, error }
        }
        Err(e) => {
            let line = json!({ "seed": seed, "status": "error", "error": format!("{e:#}") });
            Trial { line, status: IdentStatus::Identified, error: Some(f64::INFINITY) }
        }
    }
}

pub fn verify(path: &Path, args: &SearchArgs, trials: u64, tol: f64, out: Option<&Path>) -> Result<u8> {
    if trials == 0 {
        bail!("--trials must be at least 1");
    }
    if !(tol > 0.0) {
        bail!("--tol must be positive");
    }
    if args.mode == ModeArg::Declared {
        bail!("verify compares against models and needs oracle mode");
    }
    let file = read_graph(path)?;
    let q = IdentQuery::from_file(&file)?;
    let opts = options(&file.graph, args)?;
    let mut results: Vec<Trial> = match &args.model {
        Some(p) => {
            let m = oracle_model(&file, Some(p), 0)?;
            vec![run_trial(&q, &opts, &m, None)]
        }
        None => (0..trials)
            .into_par_iter()
            .map(|i| {
                let seed = args.seed + i;
                match random_model(&file.graph, &file.cards(), seed, DEFAULT_FLOOR) {
                    Ok(m) => run_trial(&q, &opts, &m, Some(seed)),
                    Err(e) => Trial {
                        line: json!({ "seed": seed, "status": "error", "error": e.to_string() }),
                        status: IdentStatus::Identified,
                        error: Some(f64::INFINITY),
                    },
                }
            })
            .collect(),
    };
    let mut report = String::new();
    for t in &mut results {
        let pass = t.status == IdentStatus::Identified && t.error.is_some_and(|e| e <= tol);
        t.line["pass"] = json!(pass);
        report += &(serde_json::to_string(&t.line)? + "\n");
    }
    write_out(out, &report)?;

    let passed = results.iter().filter(|t| t.line["pass"] == true).count();
    let worst = results.iter().filter_map(|t| t.error).fold(0.0f64, f64::max);
    summary(out.is_some(), &format!("{passed}/{} trials pass at tolerance {tol:e}; max abs error {worst:.3e}", results.len()));
    if let Some(bad) = results.iter().find(|t| t.error.is_some_and(|e| !(e <= tol))) {
        summary(out.is_some(), &format!("tolerance exceeded at seed {}", bad.line["seed"]));
        return Ok(EXIT_TOLERANCE);
    }
    if results.iter().any(|t| t.status == IdentStatus::BudgetExhausted) {
        return Ok(EXIT_BUDGET);
    }
    if results.iter().any(|t| t.status == IdentStatus::Fail) {
        summary(out.is_some(), FAIL_NOTE);
        return Ok(EXIT_FAIL);
    }
    Ok(EXIT_OK)
}

pub fn districts(path: &Path, h_set: &str) -> Result<u8> {
    let file = read_graph(path)?;
    let q = IdentQuery::from_file(&file)?;
    let g = &file.graph;
    let t = district_targets_of(g, q.treatment, q.outcome, names_to_set(g, h_set)?)?;
    let p = &t.projected;
    println!("H = {}", p.fmt_set(t.h));
    println!("V* = {}", p.fmt_set(t.v_star));
    println!("Y* = {}", p.fmt_set(t.y_star));
    let directed: Vec<String> = p.directed_edges().iter().map(|&(a, b)| format!("{} -> {}", p.name(a), p.name(b))).collect();
    let bidirected: Vec<String> =
        p.bidirected_edges().iter().map(|&(a, b)| format!("{} <-> {}", p.name(a), p.name(b))).collect();
    println!("projection: {}", directed.iter().chain(&bidirected).cloned().collect::<Vec<_>>().join(", "));
    let ds: Vec<String> = t.targets.iter().map(|d| p.fmt_set(d.district)).collect();
    println!("districts: {}", ds.join(" "));
    for d in &t.targets {
        println!(
            "  target p({} ‖ {}), parents {}",
            plain(p, d.district),
            plain(p, d.context),
            p.fmt_set(d.parents)
        );
    }
    Ok(EXIT_OK)
}

pub struct CheckStep {
    pub op: String,
    pub on: String,
    pub w: String,
    pub z: String,
    pub fix: String,
}

pub fn check(path: &Path, step: &CheckStep, mode: ModeArg, model: Option<&Path>, seed: u64, as_json: bool) -> Result<u8> {
    let file = read_graph(path)?;
    let g = &file.graph;
    let kind = parse_kind(&step.op)?;
    let b = g.index(step.on.trim())?;
    let st = match kind {
        OpKind::Fix => OpStep::fix(b),
        OpKind::Cut => OpStep::cut(b),
        k => OpStep::proximal(k, b, names_to_set(g, &step.w)?, names_to_set(g, &step.z)?),
    };
    let fixes = names_to_set(g, &step.fix)?;
    let order: Vec<usize> =
        step.fix.split(',').map(str::trim).filter(|s| !s.is_empty()).map(|n| g.index(n)).collect::<Result<_, _>>()?;
    let run = |ctx: &OpContext, observed: Option<&discrete_oracle::Table>| -> Result<u8> {
        let mut p = Kernel::observational(g.observed(), observed)?;
        for &v in &order {
            p = apply_fix(&p, v, ctx).with_context(|| format!("cannot fix {}", g.name(v)))?.kernel;
        }
        let report = check_preconditions(&st, &p, Some(&p), ctx)?;
        if as_json {
            println!("{}", serde_json::to_string_pretty(&report)?);
        } else {
            if !fixes.is_empty() {
                println!("on p({} ‖ {})", g.fmt_set(p.random()), g.fmt_set(p.context()));
            }
            print!("{}", report.render());
        }
        Ok(if report.passed() { EXIT_OK } else { EXIT_FAIL })
    };
    match mode {
        ModeArg::Declared => run(&OpContext::declared(g, &file.cards())?, None),
        ModeArg::Oracle => {
            let m = oracle_model(&file, model, seed)?;
            run(&OpContext::oracle(&m), Some(&m.observed_joint()?))
        }
    }
}

pub fn oracle(path: &Path, treat: Option<&str>, outcome: Option<&str>) -> Result<u8> {
    let (file, m) = read_model(path)?;
    let g = &file.graph;
    let pick = |arg: Option<&str>, from_query: Option<&Vec<String>>| -> Result<VertexSet> {
        match (arg, from_query) {
            (Some(s), _) => names_to_set(g, s),
            (None, Some(names)) => Ok(g.set(names)?),
            (None, None) => bail!("no query line; pass --treat and --outcome"),
        }
    };
    let a = pick(treat, file.query.as_ref().map(|q| &q.treat))?;
    let y = pick(outcome, file.query.as_ref().map(|q| &q.outcome))?;
    if y.is_empty() || !a.is_disjoint(y) {
        bail!("outcome must be nonempty and disjoint from the treatment");
    }
    let t = m.interventional_kernel(y, a)?;
    let vars = t.vars().to_vec();
    let order: Vec<usize> = vars_of(a).into_iter().chain(vars_of(y)).map(|v| vars.iter().position(|&u| u == v).unwrap()).collect();
    let mut rows = Vec::new();
    t.for_each(|st, p| {
        let part = |s: VertexSet| -> String {
            s.iter()
                .map(|v| format!("{}={}", g.name(v), st[vars.iter().position(|&u| u as usize == v).unwrap()]))
                .collect::<Vec<_>>()
                .join(",")
        };
        rows.push((order.iter().map(|&i| st[i]).collect::<Vec<_>>(), format!("p({} ‖ {}) = {p:.12}", part(y), part(a))));
    });
    rows.sort();
    let mut stdout = std::io::stdout().lock();
    for (_, line) in rows {
        writeln!(stdout, "{line}")?;
    }
    Ok(EXIT_OK)
}
