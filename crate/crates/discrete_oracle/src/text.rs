//! Model files: the graph format plus one `cpt` line per parent state.
//!
//! ```text
//! var A
//! var Y
//! edge A -> Y
//! cpt A | : 0.3 0.7
//! cpt Y | A=0 : 0.9 0.1
//! cpt Y | A=1 : 0.2 0.8
//! ```

use std::fmt::Write as _;

use graph_core::{parse_graph_file_with, serialize_graph_file, GraphFile, QuerySpec};

use crate::model::{vars_of, DiscreteModel};
use crate::table::Table;
use crate::OracleError;

pub fn parse_model_file(text: &str) -> Result<(GraphFile, DiscreteModel), OracleError> {
    let file = parse_graph_file_with(text, &["cpt"])?;
    let g = &file.graph;
    let cards = file.cards();
    let mut rows: Vec<Vec<Option<Vec<f64>>>> = g
        .names()
        .iter()
        .enumerate()
        .map(|(v, _)| {
            let n: usize = g.parents_of(v).iter().map(|p| cards[p]).product();
            vec![None; n]
        })
        .collect();
    for (line, raw) in &file.extra {
        let err = |msg: String| OracleError::Parse { line: *line, msg };
        let body = raw.strip_prefix("cpt").unwrap_or(raw);
        let (head, probs) = body.split_once(':').ok_or_else(|| err("expected `:`".into()))?;
        let (name, assign) = head.split_once('|').ok_or_else(|| err("expected `|`".into()))?;
        let v = g.index(name.trim()).map_err(|e| err(e.to_string()))?;
        let pa = g.parents_of(v);
        let mut st = vec![None; g.slot_count()];
        for tok in assign.split_whitespace() {
            let (p, x) = tok.split_once('=').ok_or_else(|| err(format!("expected parent=state, got `{tok}`")))?;
            let p = g.index(p).map_err(|e| err(e.to_string()))?;
            if !pa.contains(p) {
                return Err(err(format!("`{}` is not a parent of `{}`", g.name(p), g.name(v))));
            }
            let x: usize = x.parse().map_err(|_| err(format!("bad state `{x}`")))?;
            if x >= cards[p] {
                return Err(err(format!("state {x} out of range for `{}`", g.name(p))));
            }
            st[p] = Some(x);
        }
        let mut row = 0;
        for p in pa {
            let x = st[p].ok_or_else(|| err(format!("parent `{}` unassigned", g.name(p))))?;
            row = row * cards[p] + x;
        }
        let ps: Vec<f64> = probs
            .split_whitespace()
            .map(|t| t.parse::<f64>().map_err(|_| err(format!("bad probability `{t}`"))))
            .collect::<Result<_, _>>()?;
        if ps.len() != cards[v] {
            return Err(err(format!("expected {} probabilities", cards[v])));
        }
        if rows[v][row].replace(ps).is_some() {
            return Err(err("duplicate row".into()));
        }
    }
    let mut cpts = vec![None; g.slot_count()];
    for v in g.vertices() {
        let vars = vars_of(g.parents_of(v).with(v));
        let fcards: Vec<usize> = vars.iter().map(|&x| cards[x as usize]).collect();
        let pos = vars.iter().position(|&x| x as usize == v).unwrap();
        let mut missing = false;
        let t = Table::from_fn(vars.clone(), fcards.clone(), |st| {
            let mut row = 0;
            for (i, (&s, &c)) in st.iter().zip(&fcards).enumerate() {
                if i != pos {
                    row = row * c + s;
                }
            }
            match &rows[v][row] {
                Some(ps) => ps[st[pos]],
                None => {
                    missing = true;
                    0.0
                }
            }
        })?;
        if missing {
            return Err(OracleError::BadModel(format!("missing rows for `{}`", g.name(v))));
        }
        cpts[v] = Some(t);
    }
    let model = DiscreteModel::new(g.clone(), cards, cpts)?;
    Ok((file, model))
}

/// Graph section followed by CPT rows in slot order, parent states in
/// row-major order. Probabilities use the shortest round-trip decimal form.
pub fn serialize_model_file(model: &DiscreteModel, query: Option<&QuerySpec>) -> String {
    let g = model.graph();
    let states = g.vertices().iter().map(|v| (g.name(v).to_string(), model.card(v))).collect();
    let file = GraphFile { graph: g.clone(), states, query: query.cloned(), extra: vec![] };
    let mut out = serialize_graph_file(&file);
    for v in g.vertices() {
        let pa: Vec<usize> = g.parents_of(v).to_vec();
        let t = model.cpt(v);
        let rows: usize = pa.iter().map(|&p| model.card(p)).product();
        for row in 0..rows {
            let mut st = vec![0usize; g.slot_count()];
            let mut r = row;
            for &p in pa.iter().rev() {
                st[p] = r % model.card(p);
                r /= model.card(p);
            }
            let _ = write!(out, "cpt {} |", g.name(v));
            for &p in &pa {
                let _ = write!(out, " {}={}", g.name(p), st[p]);
            }
            out.push_str(" :");
            for x in 0..model.card(v) {
                let p = t.at(|w| if w as usize == v { x } else { st[w as usize] });
                let _ = write!(out, " {p}");
            }
            out.push('\n');
        }
    }
    out
}
