use graph_core::{CausalGraph, VertexSet};
use serde_json::{json, Value};

use crate::search::{IdentResult, IdentStatus};

/// JSON certificate for a search result. Keys and arrays come out in a
/// fixed order so equal results give byte-identical output.
pub fn certificate(g: &CausalGraph, r: &IdentResult) -> Value {
    let names = |s: VertexSet| g.names_of(s);
    let q = &r.query;
    let mut out = json!({
        "query": {
            "treatment": names(q.treatment),
            "outcome": names(q.outcome),
            "w_pool": names(q.w_pool),
            "z_pool": names(q.z_pool),
        },
        "status": r.status,
        "mode": r.mode,
        "nodes": r.nodes,
    });
    if let Some(t) = &r.targets {
        out["h"] = json!(names(t.h));
        out["v_star"] = json!(names(t.v_star));
        out["y_star"] = json!(names(t.y_star));
    }
    if !r.districts.is_empty() {
        let ds: Vec<Value> = r
            .districts
            .iter()
            .map(|d| {
                json!({
                    "district": names(d.target.district),
                    "target": format!("p({} ‖ {})", g.fmt_set(d.target.district), g.fmt_set(d.target.context)),
                    "steps": d.records,
                    "kernel": d.kernel.expr().to_sexpr(g.names()),
                })
            })
            .collect();
        out["districts"] = json!(ds);
    }
    if let Some(f) = &r.functional {
        out["functional"] = json!(f.to_sexpr(g.names()));
    }
    if let Some(w) = &r.fail_witness {
        out["fail_witness"] = json!({
            "h": names(w.h),
            "district": names(w.district),
            "steps": w.steps,
            "failure": w.failure,
        });
    }
    if r.status != IdentStatus::Identified {
        out["note"] = json!(
            "no strategy was found within the search space; this does not show that the query is non-identifiable"
        );
    }
    out
}
