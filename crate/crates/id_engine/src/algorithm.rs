use kernel_algebra::{expr, Kernel};
use proximal_ops::{apply_cut, apply_fix, apply_step, check_preconditions, OpContext, OpError, OpStep, PreconditionReport};
use serde::Serialize;

use crate::targets::DistrictTarget;
use crate::IdError;

/// The two kernel sequences walked per district. `p2` only ever gains
/// context and is the outcome-proxy source for `Obf`.
#[derive(Clone, Debug)]
pub struct KernelPair {
    pub p1: Kernel,
    pub p2: Kernel,
}

impl KernelPair {
    pub fn start(observed: &Kernel) -> KernelPair {
        KernelPair { p1: observed.clone(), p2: observed.clone() }
    }

    /// Roles of both kernels; two pairs with the same signature are
    /// interchangeable for the rest of a search.
    pub fn signature(&self) -> [u64; 4] {
        [self.p1.random().bits(), self.p1.context().bits(), self.p2.random().bits(), self.p2.context().bits()]
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct StepRecord {
    #[serde(skip)]
    pub step: OpStep,
    pub op: String,
    /// What the second sequence did with the same vertex.
    pub p2: String,
    pub report: PreconditionReport,
}

#[derive(Clone, Debug, Serialize)]
pub struct StepFailure {
    pub op: String,
    pub reason: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<PreconditionReport>,
}

#[derive(Clone, Debug)]
pub enum StepOutcome {
    Advanced(KernelPair, StepRecord),
    Failed(StepFailure),
}

fn failed(op: String, reason: impl Into<String>, report: Option<PreconditionReport>) -> StepOutcome {
    StepOutcome::Failed(StepFailure { op, reason: reason.into(), report })
}

/// One pass of the loop body: update P1 by `step`, P2 by Fix-else-Cut, then
/// require that the target's variables survive in P1.
pub fn advance(pair: &KernelPair, step: &OpStep, target: &DistrictTarget, ctx: &OpContext) -> Result<StepOutcome, IdError> {
    let g = ctx.graph();
    let label = step.label(g);
    if !pair.p1.random().contains(step.b) {
        return Ok(failed(label, format!("{} is not a random variable of P1", g.name(step.b)), None));
    }
    let report = check_preconditions(step, &pair.p1, Some(&pair.p2), ctx)?;
    if !report.passed() {
        return Ok(failed(label, "conditions do not hold", Some(report)));
    }
    let p1 = match apply_step(&pair.p1, &pair.p2, step, ctx) {
        Ok(out) => out.kernel,
        Err(OpError::ConditionFailed(r)) => return Ok(failed(label, "conditions do not hold", Some(*r))),
        Err(e) => return Err(e.into()),
    };
    let (p2, p2_op) = update_p2(&pair.p2, step.b, ctx)?;
    if !target.district.is_subset(p1.random()) || !target.parents.is_subset(p1.vars()) {
        let lost = (target.district - p1.random()) | (target.parents - p1.vars());
        return Ok(failed(label, format!("removes {} needed by the target", g.fmt_set(lost)), Some(report)));
    }
    Ok(StepOutcome::Advanced(KernelPair { p1, p2 }, StepRecord { step: *step, op: label, p2: p2_op, report }))
}

fn update_p2(p2: &Kernel, b: usize, ctx: &OpContext) -> Result<(Kernel, String), IdError> {
    let g = ctx.graph();
    let name = g.name(b);
    if p2.random().contains(b) {
        let fix = check_preconditions(&OpStep::fix(b), p2, None, ctx)?;
        if fix.passed() {
            return Ok((apply_fix(p2, b, ctx)?.kernel, format!("Fix({name})")));
        }
        return Ok((apply_cut(p2, b, ctx)?.kernel, format!("Cut({name})")));
    }
    if p2.context().contains(b) {
        return Ok((p2.clone(), "none".into()));
    }
    // b was dropped by an earlier cut; the kernel is constant in it
    let card = ctx.card(b);
    let e = expr::extend(b as discrete_oracle::Var, card, p2.expr());
    let k = Kernel::derived_from(p2.random(), p2.context().with(b), e, &[p2])?;
    Ok((k, format!("Extend({name})")))
}

/// Every vertex of `V* \ D` is in the context of P1 or was consumed as a
/// proxy.
pub fn complete(pair: &KernelPair, target: &DistrictTarget) -> bool {
    (target.context & pair.p1.random()).is_empty()
}

/// `p(D ‖ S)` from a completed pair.
pub fn district_kernel(pair: &KernelPair, target: &DistrictTarget) -> Result<Kernel, IdError> {
    Ok(pair.p1.marginal(target.district)?)
}

#[derive(Clone, Debug)]
pub enum AlgorithmOutcome {
    Identified { kernel: Kernel, records: Vec<StepRecord> },
    Failed { at: usize, failure: StepFailure, records: Vec<StepRecord> },
}

/// Run a fixed step list for one district target, starting from
/// `P1 = P2 = observed`. A step on a vertex that an earlier bridge step
/// consumed as a proxy is a no-op.
pub fn run_steps(
    target: &DistrictTarget,
    steps: &[OpStep],
    observed: &Kernel,
    ctx: &OpContext,
) -> Result<AlgorithmOutcome, IdError> {
    let g = ctx.graph();
    let mut seen = graph_core::VertexSet::EMPTY;
    for s in steps {
        if !target.context.contains(s.b) || seen.contains(s.b) {
            return Err(IdError::Steps(format!(
                "steps must enumerate {} without repetition; got {}",
                g.fmt_set(target.context),
                g.name(s.b)
            )));
        }
        seen.insert(s.b);
    }
    let mut pair = KernelPair::start(observed);
    let mut records = Vec::new();
    for (i, s) in steps.iter().enumerate() {
        if !pair.p1.vars().contains(s.b) {
            continue;
        }
        match advance(&pair, s, target, ctx)? {
            StepOutcome::Advanced(next, rec) => {
                pair = next;
                records.push(rec);
            }
            StepOutcome::Failed(failure) => return Ok(AlgorithmOutcome::Failed { at: i, failure, records }),
        }
    }
    if !complete(&pair, target) {
        let left = target.context & pair.p1.random();
        let failure = StepFailure {
            op: "end".into(),
            reason: format!("{} still random in P1", g.fmt_set(left)),
            report: None,
        };
        return Ok(AlgorithmOutcome::Failed { at: steps.len(), failure, records });
    }
    Ok(AlgorithmOutcome::Identified { kernel: district_kernel(&pair, target)?, records })
}
