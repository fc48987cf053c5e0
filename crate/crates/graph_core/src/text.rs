//! Line-oriented graph file format.
//!
//! ```text
//! # comment
//! var U latent
//! var A states=3
//! edge U -> A
//! edge A <-> Y
//! query treat=A outcome=Y wproxy=W zproxy=Z
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::graph::CausalGraph;
use crate::GraphError;

/// Identification query attached to a graph file. Lists are comma separated
/// in the file.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct QuerySpec {
    pub treat: Vec<String>,
    pub outcome: Vec<String>,
    pub wproxy: Vec<String>,
    pub zproxy: Vec<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GraphFile {
    pub graph: CausalGraph,
    /// State count per vertex name; vertices without `states=` get 2.
    pub states: BTreeMap<String, usize>,
    pub query: Option<QuerySpec>,
    /// Lines with directives accepted by the caller, as `(line number, text)`.
    pub extra: Vec<(usize, String)>,
}

impl GraphFile {
    pub fn cards(&self) -> Vec<usize> {
        self.graph
            .names()
            .iter()
            .map(|n| self.states.get(n).copied().unwrap_or(2))
            .collect()
    }
}

pub fn parse_graph_file(text: &str) -> Result<GraphFile, GraphError> {
    parse_graph_file_with(text, &[])
}

/// Like [`parse_graph_file`], but lines whose first token is in `accept`
/// are collected into [`GraphFile::extra`] instead of being rejected.
pub fn parse_graph_file_with(text: &str, accept: &[&str]) -> Result<GraphFile, GraphError> {
    let mut b = CausalGraph::builder();
    let mut states = BTreeMap::new();
    let mut query = None;
    let mut extra = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let err = |msg: String| GraphError::Parse { line: line_no, msg };
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        match tokens[0] {
            "var" => {
                let name = *tokens.get(1).ok_or_else(|| err("`var` needs a name".into()))?;
                check_name(name).map_err(&err)?;
                let mut latent = false;
                let mut card = 2usize;
                for t in &tokens[2..] {
                    if *t == "latent" {
                        latent = true;
                    } else if let Some(k) = t.strip_prefix("states=") {
                        card = k.parse().map_err(|_| err(format!("bad state count `{k}`")))?;
                        if card < 1 {
                            return Err(err("state count must be positive".into()));
                        }
                    } else {
                        return Err(err(format!("unexpected token `{t}`")));
                    }
                }
                if latent {
                    b.latent_vertex(name)
                } else {
                    b.vertex(name)
                }
                .map_err(|e| err(e.to_string()))?;
                states.insert(name.to_string(), card);
            }
            "edge" => {
                if tokens.len() != 4 {
                    return Err(err("expected `edge <a> -> <b>` or `edge <a> <-> <b>`".into()));
                }
                let r = match tokens[2] {
                    "->" => b.directed(tokens[1], tokens[3]),
                    "<->" => b.bidirected(tokens[1], tokens[3]),
                    other => return Err(err(format!("unknown edge kind `{other}`"))),
                };
                r.map_err(|e| err(e.to_string()))?;
            }
            "query" => {
                if query.is_some() {
                    return Err(err("duplicate query".into()));
                }
                let mut q = QuerySpec::default();
                for t in &tokens[1..] {
                    let (key, val) =
                        t.split_once('=').ok_or_else(|| err(format!("expected key=value, got `{t}`")))?;
                    let list: Vec<String> =
                        val.split(',').filter(|s| !s.is_empty()).map(str::to_string).collect();
                    match key {
                        "treat" => q.treat = list,
                        "outcome" => q.outcome = list,
                        "wproxy" => q.wproxy = list,
                        "zproxy" => q.zproxy = list,
                        _ => return Err(err(format!("unknown query key `{key}`"))),
                    }
                }
                query = Some((line_no, q));
            }
            d if accept.contains(&d) => extra.push((line_no, line.to_string())),
            d => return Err(err(format!("unknown directive `{d}`"))),
        }
    }
    let graph = b.build().map_err(|e| GraphError::Parse { line: 0, msg: e.to_string() })?;
    let query = match query {
        Some((line, q)) => {
            for n in q.treat.iter().chain(&q.outcome).chain(&q.wproxy).chain(&q.zproxy) {
                graph.index(n).map_err(|e| GraphError::Parse { line, msg: e.to_string() })?;
            }
            Some(q)
        }
        None => None,
    };
    Ok(GraphFile { graph, states, query, extra })
}

fn check_name(name: &str) -> Result<(), String> {
    let ok = name
        .chars()
        .all(|c| c.is_alphanumeric() || c == '_' || c == '@' || c == '\'');
    if ok && !name.is_empty() {
        Ok(())
    } else {
        Err(format!("invalid vertex name `{name}`"))
    }
}

/// Canonical text form. `parse_graph_file(serialize_graph_file(f))` is `f`
/// minus `extra`.
pub fn serialize_graph_file(f: &GraphFile) -> String {
    let g = &f.graph;
    let mut out = String::new();
    for v in g.vertices() {
        let name = g.name(v);
        out.push_str("var ");
        out.push_str(name);
        if g.latent().contains(v) {
            out.push_str(" latent");
        }
        let card = f.states.get(name).copied().unwrap_or(2);
        if card != 2 {
            let _ = write!(out, " states={card}");
        }
        out.push('\n');
    }
    for (a, b) in g.directed_edges() {
        let _ = writeln!(out, "edge {} -> {}", g.name(a), g.name(b));
    }
    for (a, b) in g.bidirected_edges() {
        let _ = writeln!(out, "edge {} <-> {}", g.name(a), g.name(b));
    }
    if let Some(q) = &f.query {
        out.push_str("query");
        for (key, list) in [("treat", &q.treat), ("outcome", &q.outcome), ("wproxy", &q.wproxy), ("zproxy", &q.zproxy)] {
            if !list.is_empty() {
                let _ = write!(out, " {key}={}", list.join(","));
            }
        }
        out.push('\n');
    }
    out
}
