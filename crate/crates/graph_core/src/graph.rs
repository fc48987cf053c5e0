use crate::vertex_set::{VertexSet, MAX_VERTICES};
use crate::GraphError;

/// Mixed graph over named vertices.
///
/// One type covers hidden-variable DAGs, ADMGs, CADMGs (non-empty `context`)
/// and SWIGs. Vertices live in slots; operations that drop vertices keep the
/// slot numbering and clear the `present` bit, so vertex sets stay comparable
/// across a graph and everything derived from it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CausalGraph {
    names: Vec<String>,
    present: VertexSet,
    pa: Vec<VertexSet>,
    sib: Vec<VertexSet>,
    latent: VertexSet,
    context: VertexSet,
}

impl CausalGraph {
    pub fn builder() -> GraphBuilder {
        GraphBuilder { g: CausalGraph::empty() }
    }

    fn empty() -> Self {
        CausalGraph {
            names: Vec::new(),
            present: VertexSet::EMPTY,
            pa: Vec::new(),
            sib: Vec::new(),
            latent: VertexSet::EMPTY,
            context: VertexSet::EMPTY,
        }
    }

    /// Number of slots, including slots of dropped vertices.
    pub fn slot_count(&self) -> usize {
        self.names.len()
    }

    pub fn vertices(&self) -> VertexSet {
        self.present
    }

    pub fn latent(&self) -> VertexSet {
        self.latent & self.present
    }

    pub fn observed(&self) -> VertexSet {
        self.present - self.latent
    }

    pub fn context(&self) -> VertexSet {
        self.context
    }

    /// Present vertices that are not context.
    pub fn random(&self) -> VertexSet {
        self.present - self.context
    }

    pub fn name(&self, v: usize) -> &str {
        &self.names[v]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index(&self, name: &str) -> Result<usize, GraphError> {
        self.names
            .iter()
            .position(|n| n == name)
            .filter(|&v| self.present.contains(v))
            .ok_or_else(|| GraphError::UnknownVertex(name.to_string()))
    }

    pub fn set<S: AsRef<str>>(&self, names: &[S]) -> Result<VertexSet, GraphError> {
        names
            .iter()
            .map(|n| self.index(n.as_ref()))
            .collect::<Result<VertexSet, _>>()
    }

    pub fn names_of(&self, s: VertexSet) -> Vec<String> {
        s.iter().map(|v| self.names[v].clone()).collect()
    }

    /// `{A,Y}` style rendering in slot order.
    pub fn fmt_set(&self, s: VertexSet) -> String {
        format!("{{{}}}", self.names_of(s).join(","))
    }

    pub fn parents_of(&self, v: usize) -> VertexSet {
        self.pa[v]
    }

    pub fn siblings_of(&self, v: usize) -> VertexSet {
        self.sib[v]
    }

    pub fn children_of(&self, v: usize) -> VertexSet {
        self.present
            .iter()
            .filter(|&c| self.pa[c].contains(v))
            .collect()
    }

    pub fn has_directed(&self, a: usize, b: usize) -> bool {
        self.pa[b].contains(a)
    }

    pub fn has_bidirected(&self, a: usize, b: usize) -> bool {
        self.sib[a].contains(b)
    }

    /// Directed edges `(tail, head)` ordered by head, then tail.
    pub fn directed_edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for b in self.present {
            for a in self.pa[b] {
                out.push((a, b));
            }
        }
        out.sort_by_key(|&(a, b)| (a, b));
        out
    }

    /// Bidirected edges with `a < b`.
    pub fn bidirected_edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for a in self.present {
            for b in self.sib[a] {
                if a < b {
                    out.push((a, b));
                }
            }
        }
        out
    }

    pub fn is_dag(&self) -> bool {
        self.bidirected_edges().is_empty() && self.context.is_empty()
    }

    /// Present vertices in a topological order of the directed part.
    pub fn topological_order(&self) -> Vec<usize> {
        let mut done = VertexSet::EMPTY;
        let mut order = Vec::with_capacity(self.present.len());
        while done != self.present {
            let mut progressed = false;
            for v in self.present - done {
                if (self.pa[v] & self.present).is_subset(done) {
                    done.insert(v);
                    order.push(v);
                    progressed = true;
                }
            }
            if !progressed {
                break;
            }
        }
        order
    }

    pub(crate) fn check_subset(&self, s: VertexSet) -> Result<(), GraphError> {
        match (s - self.present).first() {
            Some(v) if v < self.names.len() => Err(GraphError::UnknownVertex(self.names[v].clone())),
            Some(v) => Err(GraphError::UnknownVertex(format!("#{v}"))),
            None => Ok(()),
        }
    }

    pub(crate) fn with_parts(
        &self,
        present: VertexSet,
        pa: Vec<VertexSet>,
        sib: Vec<VertexSet>,
        context: VertexSet,
    ) -> CausalGraph {
        CausalGraph {
            names: self.names.clone(),
            present,
            pa,
            sib,
            latent: self.latent & present,
            context,
        }
    }

    /// Append a vertex slot; used by node splitting and latent materialization.
    pub(crate) fn push_vertex(&mut self, name: String) -> Result<usize, GraphError> {
        if self.names.len() >= MAX_VERTICES {
            return Err(GraphError::TooManyVertices(MAX_VERTICES));
        }
        if self.names.iter().any(|n| *n == name) {
            return Err(GraphError::DuplicateVertex(name));
        }
        self.names.push(name);
        self.pa.push(VertexSet::EMPTY);
        self.sib.push(VertexSet::EMPTY);
        let v = self.names.len() - 1;
        self.present.insert(v);
        Ok(v)
    }

    pub(crate) fn pa_mut(&mut self) -> &mut Vec<VertexSet> {
        &mut self.pa
    }

    pub(crate) fn sib_mut(&mut self) -> &mut Vec<VertexSet> {
        &mut self.sib
    }

    pub(crate) fn set_latent(&mut self, latent: VertexSet) {
        self.latent = latent;
    }

    pub(crate) fn set_context(&mut self, context: VertexSet) {
        self.context = context;
    }

    /// Checks every structural invariant.
    pub fn validate(&self) -> Result<(), GraphError> {
        if self.topological_order().len() != self.present.len() {
            return Err(GraphError::Cycle);
        }
        for v in self.present {
            if self.pa[v].contains(v) || self.sib[v].contains(v) {
                return Err(GraphError::SelfLoop(self.names[v].clone()));
            }
            self.check_subset(self.pa[v] | self.sib[v])?;
            for s in self.sib[v] {
                if !self.sib[s].contains(v) {
                    return Err(GraphError::Internal("asymmetric bidirected edge"));
                }
            }
        }
        for c in self.context {
            if !self.present.contains(c) {
                return Err(GraphError::UnknownVertex(self.names[c].clone()));
            }
            if !self.pa[c].is_empty() || !self.sib[c].is_empty() {
                return Err(GraphError::ContextHasIncoming(self.names[c].clone()));
            }
        }
        if let Some(v) = (self.latent & self.context).first() {
            return Err(GraphError::LatentContext(self.names[v].clone()));
        }
        Ok(())
    }
}

/// Incremental construction; `build` validates.
pub struct GraphBuilder {
    g: CausalGraph,
}

impl GraphBuilder {
    pub fn vertex(&mut self, name: &str) -> Result<usize, GraphError> {
        self.g.push_vertex(name.to_string())
    }

    pub fn latent_vertex(&mut self, name: &str) -> Result<usize, GraphError> {
        let v = self.vertex(name)?;
        self.g.latent.insert(v);
        Ok(v)
    }

    pub fn directed(&mut self, a: &str, b: &str) -> Result<(), GraphError> {
        let (a, b) = (self.g.index(a)?, self.g.index(b)?);
        if self.g.pa[b].contains(a) {
            return Err(GraphError::DuplicateEdge(format!("{} -> {}", self.g.names[a], self.g.names[b])));
        }
        self.g.pa[b].insert(a);
        Ok(())
    }

    pub fn bidirected(&mut self, a: &str, b: &str) -> Result<(), GraphError> {
        let (a, b) = (self.g.index(a)?, self.g.index(b)?);
        if self.g.sib[a].contains(b) {
            return Err(GraphError::DuplicateEdge(format!("{} <-> {}", self.g.names[a], self.g.names[b])));
        }
        self.g.sib[a].insert(b);
        self.g.sib[b].insert(a);
        Ok(())
    }

    pub fn context(&mut self, name: &str) -> Result<(), GraphError> {
        let v = self.g.index(name)?;
        self.g.context.insert(v);
        Ok(())
    }

    pub fn build(self) -> Result<CausalGraph, GraphError> {
        self.g.validate()?;
        Ok(self.g)
    }
}
