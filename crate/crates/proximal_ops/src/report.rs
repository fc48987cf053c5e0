use bridge_solvers::BridgeKind;
use serde::Serialize;

use crate::step::OpStep;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    Structural,
    Graphical,
    Numerical,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    /// Non-graphical assumption taken on the user's word (declared mode).
    Declared,
    /// Failed, but the alternative route of the same condition passed.
    Superseded,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub id: &'static str,
    pub kind: CheckKind,
    pub statement: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    pub status: Status,
}

impl Check {
    pub fn new(id: &'static str, kind: CheckKind, statement: String, pass: bool) -> Check {
        Check { id, kind, statement, value: None, status: if pass { Status::Pass } else { Status::Fail } }
    }

    pub fn failed(&self) -> bool {
        self.status == Status::Fail
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PreconditionReport {
    #[serde(skip)]
    pub step: OpStep,
    pub op: String,
    pub mode: &'static str,
    /// Latent set under which the assumptions were checked.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u_star: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub route: Option<BridgeKind>,
    pub checks: Vec<Check>,
}

impl PreconditionReport {
    pub fn passed(&self) -> bool {
        !self.checks.iter().any(Check::failed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.failed())
    }

    pub fn graphical(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.kind == CheckKind::Graphical)
    }

    pub fn numerical(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.kind == CheckKind::Numerical)
    }

    /// Human-readable listing, one check per line.
    pub fn render(&self) -> String {
        let mut out = format!("{} [{}]", self.op, self.mode);
        if let Some(u) = &self.u_star {
            out += &format!(" U*={{{}}}", u.join(","));
        }
        out.push('\n');
        for c in &self.checks {
            let status = match c.status {
                Status::Pass => "pass",
                Status::Fail => "FAIL",
                Status::Declared => "declared",
                Status::Superseded => "superseded",
            };
            out += &format!("  {status:<10} {:<24} {}", c.id, c.statement);
            if let Some(v) = c.value {
                out += &format!(" ({v:.3e})");
            }
            out.push('\n');
        }
        out
    }
}
