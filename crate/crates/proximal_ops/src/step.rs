use graph_core::{CausalGraph, VertexSet};
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum OpKind {
    Fix,
    Obf,
    Tbf,
    Ebf,
    Cut,
}

impl OpKind {
    pub fn name(self) -> &'static str {
        match self {
            OpKind::Fix => "Fix",
            OpKind::Obf => "Obf",
            OpKind::Tbf => "Tbf",
            OpKind::Ebf => "Ebf",
            OpKind::Cut => "Cut",
        }
    }

    pub fn uses_proxies(self) -> bool {
        matches!(self, OpKind::Obf | OpKind::Tbf | OpKind::Ebf)
    }
}

/// One kernel operation applied to vertex `b`, with its proxy sets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct OpStep {
    pub b: usize,
    pub kind: OpKind,
    pub w: VertexSet,
    pub z: VertexSet,
}

impl OpStep {
    pub fn fix(b: usize) -> OpStep {
        OpStep { b, kind: OpKind::Fix, w: VertexSet::EMPTY, z: VertexSet::EMPTY }
    }

    pub fn cut(b: usize) -> OpStep {
        OpStep { b, kind: OpKind::Cut, w: VertexSet::EMPTY, z: VertexSet::EMPTY }
    }

    pub fn proximal(kind: OpKind, b: usize, w: VertexSet, z: VertexSet) -> OpStep {
        OpStep { b, kind, w, z }
    }

    /// `Fix(M)`, `Tbf_{W,Z}(A)`; multi-vertex proxy sets print in braces.
    pub fn label(&self, g: &CausalGraph) -> String {
        let b = g.name(self.b);
        if !self.kind.uses_proxies() {
            return format!("{}({b})", self.kind.name());
        }
        let part = |s: VertexSet| if s.len() == 1 { g.name(s.first().unwrap()).to_string() } else { g.fmt_set(s) };
        format!("{}_{{{},{}}}({b})", self.kind.name(), part(self.w), part(self.z))
    }
}
