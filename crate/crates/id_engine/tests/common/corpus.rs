use graph_core::fixtures;

pub struct Case {
    pub name: &'static str,
    pub text: String,
    pub identifiable: bool,
}

fn g(lines: &str) -> String {
    let mut s = String::new();
    for part in lines.split(';') {
        s.push_str(part.trim());
        s.push('\n');
    }
    s
}

/// Fixtures with their proxy declarations removed.
fn no_proxies(text: &str) -> String {
    text.lines()
        .map(|l| if l.starts_with("query") { "query treat=A outcome=Y" } else { l })
        .collect::<Vec<_>>()
        .join("\n")
}

/// Twenty graphs without proxy pools: ten identifiable by fixing, ten not.
pub fn corpus() -> Vec<Case> {
    let id = |name, text: String| Case { name, text, identifiable: true };
    let non = |name, text: String| Case { name, text, identifiable: false };
    vec![
        id("backdoor", fixtures::FIG1A.to_string()),
        id("front_door", fixtures::FRONT_DOOR.to_string()),
        id(
            "napkin",
            g("var W1; var W2; var A; var Y; edge W1 -> W2; edge W2 -> A; edge A -> Y; \
               edge W1 <-> A; edge W1 <-> Y; query treat=A outcome=Y"),
        ),
        id("chain", g("var A; var M; var Y; edge A -> M; edge M -> Y; query treat=A outcome=Y")),
        id(
            "confounded_mediator",
            g("var A; var M; var Y; edge A -> M; edge M -> Y; edge A -> Y; edge M <-> Y; query treat=A outcome=Y"),
        ),
        id("fig3a", no_proxies(fixtures::FIG3A)),
        id("fig3b", no_proxies(fixtures::FIG3B)),
        id("fig4e", no_proxies(fixtures::FIG4E)),
        id(
            "front_door_covariate",
            g("var X; var A; var M; var Y; edge X -> A; edge X -> Y; edge X -> M; edge A -> M; \
               edge M -> Y; edge A <-> Y; query treat=A outcome=Y"),
        ),
        id(
            "sequential",
            g("var A1; var L; var A2; var Y; edge A1 -> L; edge L -> A2; edge A2 -> Y; edge A1 -> Y; \
               edge L <-> Y; query treat=A1,A2 outcome=Y"),
        ),
        non("bow", fixtures::BOW.to_string()),
        non("fig1c", fixtures::FIG1C.to_string()),
        non("fig1d", no_proxies(fixtures::FIG1D)),
        non(
            "instrument",
            g("var Z; var A; var Y; edge Z -> A; edge A -> Y; edge A <-> Y; query treat=A outcome=Y"),
        ),
        non(
            "confounded_treatment_mediator",
            g("var A; var M; var Y; edge A -> M; edge M -> Y; edge A <-> M; query treat=A outcome=Y"),
        ),
        non(
            "front_door_mediator_outcome",
            g("var A; var M; var Y; edge A -> M; edge M -> Y; edge A <-> Y; edge M <-> Y; query treat=A outcome=Y"),
        ),
        non(
            "front_door_treatment_mediator",
            g("var A; var M; var Y; edge A -> M; edge M -> Y; edge A <-> Y; edge A <-> M; query treat=A outcome=Y"),
        ),
        non(
            "front_door_direct",
            g("var A; var M; var Y; edge A -> M; edge M -> Y; edge A -> Y; edge A <-> Y; query treat=A outcome=Y"),
        ),
        non(
            "mediator_both_sides",
            g("var A; var M; var Y; edge A -> M; edge M -> Y; edge A <-> M; edge M <-> Y; query treat=A outcome=Y"),
        ),
        non(
            "confounded_covariate_chain",
            g("var L; var A; var Y; edge L -> A; edge L -> Y; edge A -> Y; edge A <-> L; edge L <-> Y; \
               query treat=A outcome=Y"),
        ),
    ]
}
