mod common;

use graph_core::fixtures;
use graph_core::*;

fn load(text: &str) -> CausalGraph {
    parse_graph_file(text).unwrap().graph
}

fn s(g: &CausalGraph, names: &[&str]) -> VertexSet {
    g.set(names).unwrap()
}

fn chain() -> CausalGraph {
    load("var A\nvar M\nvar Y\nedge A -> M\nedge M -> Y\n")
}

#[test]
fn descendants_of_chain_head() {
    let g = chain();
    let de = kinship(&g, s(&g, &["A"]), Relation::Descendants).unwrap();
    assert_eq!(g.names_of(de), ["A", "M", "Y"]);
    assert!(kinship(&g, VertexSet::EMPTY, Relation::Ancestors).unwrap().is_empty());
}

#[test]
fn descendants_match_reachability() {
    // M -> Y, M -> Z, Z -> Y
    let g = load("var M\nvar Y\nvar Z\nvar A\nedge M -> Y\nedge M -> Z\nedge Z -> Y\nedge A -> M\n");
    let mut reach = vec![g.index("M").unwrap()];
    let mut i = 0;
    while i < reach.len() {
        for (a, b) in g.directed_edges() {
            if a == reach[i] && !reach.contains(&b) {
                reach.push(b);
            }
        }
        i += 1;
    }
    let de = descendants(&g, s(&g, &["M"]));
    assert_eq!(de, VertexSet::from_indices(reach));
    assert_eq!(g.fmt_set(de), "{M,Y,Z}");
}

#[test]
fn unknown_vertex_is_reported() {
    let g = chain();
    assert_eq!(g.index("Q"), Err(GraphError::UnknownVertex("Q".into())));
    let bogus = VertexSet::singleton(10);
    assert!(kinship(&g, bogus, Relation::Parents).is_err());
}

#[test]
fn dsep_basic_cases() {
    let g = load(fixtures::FIG1A);
    assert!(!d_separated(&g, s(&g, &["A"]), s(&g, &["Y"]), VertexSet::EMPTY).unwrap());

    let c = load("var A\nvar B\nvar C\nedge A -> C\nedge B -> C\n");
    assert!(d_separated(&c, s(&c, &["A"]), s(&c, &["B"]), VertexSet::EMPTY).unwrap());
    assert!(!d_separated(&c, s(&c, &["A"]), s(&c, &["B"]), s(&c, &["C"])).unwrap());

    assert_eq!(
        d_separated(&c, s(&c, &["A"]), s(&c, &["A", "B"]), VertexSet::EMPTY),
        Err(GraphError::OverlappingSets)
    );
}

#[test]
fn outcome_proxy_independence_in_fig1d() {
    let g = load(fixtures::FIG1D);
    assert!(d_separated(&g, s(&g, &["W"]), s(&g, &["Z", "A"]), s(&g, &["U", "X"])).unwrap());
    assert!(!d_separated(&g, s(&g, &["W"]), s(&g, &["Z", "A"]), s(&g, &["X"])).unwrap());
}

#[test]
fn swig_ignorability() {
    let g = load(fixtures::FIG1A);
    let sw = swig(&g, s(&g, &["A"])).unwrap();
    assert!(sw.index("A@a").is_ok());
    assert!(sw.context().contains(sw.index("A@a").unwrap()));
    assert!(d_separated(&sw, s(&sw, &["Y"]), s(&sw, &["A"]), s(&sw, &["X"])).unwrap());

    let g = load(fixtures::FIG1D);
    let sw = swig(&g, s(&g, &["A"])).unwrap();
    assert!(d_separated(&sw, s(&sw, &["Y"]), s(&sw, &["A"]), s(&sw, &["U", "X"])).unwrap());
    assert!(!d_separated(&sw, s(&sw, &["Y"]), s(&sw, &["A"]), s(&sw, &["X"])).unwrap());

    assert_eq!(swig(&g, VertexSet::EMPTY).unwrap(), g);
}

#[test]
fn swig_rejects_context() {
    let g = load(fixtures::FIG1A);
    let sw = swig(&g, s(&g, &["A"])).unwrap();
    let hat = s(&sw, &["A@a"]);
    assert!(matches!(swig(&sw, hat), Err(GraphError::ContextVertex(_))));
}

/// The counterfactual assumptions behind the outcome, treatment and extended
/// bridge results all hold on the standard proximal graph.
#[test]
fn fig1d_counterfactual_assumptions() {
    let g = load(fixtures::FIG1D);
    let sw = swig(&g, s(&g, &["A"])).unwrap();
    let q = |x: &[&str], y: &[&str], z: &[&str]| d_separated(&sw, s(&sw, x), s(&sw, y), s(&sw, z)).unwrap();
    // latent ignorability, with and without the treatment proxy
    assert!(q(&["Y"], &["A"], &["U", "X"]));
    assert!(q(&["Y"], &["A"], &["U", "Z", "X"]));
    assert!(q(&["Y", "W"], &["A"], &["U", "Z", "X"]));
    // valid outcome-inducing proxy (factual)
    assert!(d_separated(&g, s(&g, &["W"]), s(&g, &["Z", "A"]), s(&g, &["U", "X"])).unwrap());
    assert!(q(&["W"], &["A"], &["U", "X"]));
    // valid treatment-inducing proxy
    assert!(q(&["Z"], &["Y"], &["A", "U", "X"]));
    assert!(q(&["Z"], &["Y", "W"], &["A", "U", "X"]));
    assert!(d_separated(&g, s(&g, &["Z"]), s(&g, &["Y", "W"]), s(&g, &["A", "U", "X"])).unwrap());
}

/// The counterfactual statements used for the front-door result hold in the
/// SWIGs of the mediator graph.
#[test]
fn fig3a_front_door_assumptions() {
    let g = load(fixtures::FIG3A);
    let sw_m = swig(&g, s(&g, &["M"])).unwrap();
    let sw_am = swig(&g, s(&g, &["A", "M"])).unwrap();
    let sw_a = swig(&g, s(&g, &["A"])).unwrap();
    // district decomposition: M(a) indep (Y(a,m), A) | W, X
    let ok = d_separated(&sw_am, s(&sw_am, &["M"]), s(&sw_am, &["Y", "A"]), s(&sw_am, &["W", "X"])).unwrap();
    assert!(ok);
    // ignorability for M
    assert!(d_separated(&sw_m, s(&sw_m, &["Y", "Z"]), s(&sw_m, &["M"]), s(&sw_m, &["A", "W", "X"])).unwrap());
    // kernel latent ignorability
    assert!(d_separated(&sw_am, s(&sw_am, &["Y"]), s(&sw_am, &["A"]), s(&sw_am, &["W", "U", "X"])).unwrap());
    // kernel valid outcome-inducing proxy
    assert!(d_separated(&sw_m, s(&sw_m, &["W"]), s(&sw_m, &["Z", "A"]), s(&sw_m, &["U", "X"])).unwrap());
    // kernel valid treatment-inducing proxy
    assert!(d_separated(&sw_am, s(&sw_am, &["Z"]), s(&sw_am, &["Y", "W"]), s(&sw_am, &["U", "X"])).unwrap());
    // M ignorable given A: M(a) indep A | X, W
    assert!(d_separated(&sw_a, s(&sw_a, &["M"]), s(&sw_a, &["A"]), s(&sw_a, &["W", "X"])).unwrap());
    // and the W -> M -> Z path breaks the plain outcome proxy condition
    assert!(!d_separated(&g, s(&g, &["W"]), s(&g, &["Z", "A"]), s(&g, &["U", "X"])).unwrap());
}

#[test]
fn projection_of_fig1d_matches_path_enumeration() {
    let g = load(fixtures::FIG1D);
    let keep = s(&g, &["A", "Y", "W", "Z", "X"]);
    let p = latent_project(&g, keep).unwrap();
    assert_eq!(common::edge_sets(&p), common::project_by_paths(&g, keep));
    for (i, a) in ["A", "Y", "W", "Z"].iter().enumerate() {
        for b in &["A", "Y", "W", "Z"][i + 1..] {
            assert!(p.has_bidirected(p.index(a).unwrap(), p.index(b).unwrap()), "{a}<->{b}");
        }
        assert!(!p.has_bidirected(p.index(a).unwrap(), p.index("X").unwrap()));
    }
    for (a, b) in [("X", "A"), ("X", "Y"), ("Z", "A"), ("W", "Y"), ("A", "Y")] {
        assert!(p.has_directed(p.index(a).unwrap(), p.index(b).unwrap()));
    }
    let ds: Vec<String> = districts(&p).into_iter().map(|d| p.fmt_set(d)).collect();
    assert_eq!(ds, ["{A,Y,W,Z}", "{X}"]);
}

#[test]
fn trivial_projections() {
    let g = load(fixtures::FIG1D);
    assert_eq!(latent_project(&g, g.vertices()).unwrap(), g);
    let c = load("var A\nvar L latent\nvar Y\nedge A -> L\nedge L -> Y\n");
    let p = latent_project(&c, s(&c, &["A", "Y"])).unwrap();
    assert_eq!(p.directed_edges(), vec![(0, 2)]);
    assert!(p.bidirected_edges().is_empty());
}

#[test]
fn fig3a_districts() {
    let g = load(fixtures::FIG3A);
    let p = latent_project(&g, g.observed()).unwrap();
    let ystar = s(&p, &["Y", "W", "X", "M"]);
    let sub = induced_subgraph(&p, ystar).unwrap();
    let ds: Vec<String> = districts(&sub).into_iter().map(|d| sub.fmt_set(d)).collect();
    assert_eq!(ds, ["{M}", "{Y,W,X}"]);
    assert!(fixable(&p, p.index("M").unwrap()).unwrap());
    assert!(!fixable(&p, p.index("A").unwrap()).unwrap());
}

#[test]
fn singleton_districts_without_bidirected_edges() {
    let g = load(fixtures::FIG1A);
    let ds = districts(&g);
    assert_eq!(ds.len(), 3);
    assert!(ds.iter().all(|d| d.len() == 1));
    for v in g.vertices() {
        assert!(fixable(&g, v).unwrap());
    }
}

#[test]
fn cadmg_construction() {
    let g = load(fixtures::FIG3A);
    let r = s(&g, &["Y", "A", "W", "Z", "X"]);
    let m = s(&g, &["M"]);
    let c = cadmg(&g, r, m).unwrap();
    let mi = c.index("M").unwrap();
    assert!(c.parents_of(mi).is_empty() && c.siblings_of(mi).is_empty());
    assert!(c.has_directed(mi, c.index("Y").unwrap()));
    assert!(c.has_directed(mi, c.index("Z").unwrap()));
    assert!(c.context().contains(mi));
    c.validate().unwrap();

    // empty context: plain projection
    let obs = g.observed();
    assert_eq!(cadmg(&g, obs, VertexSet::EMPTY).unwrap(), latent_project(&g, obs).unwrap());

    let bow = load(fixtures::BOW);
    let c = cadmg(&bow, s(&bow, &["Y"]), s(&bow, &["A"])).unwrap();
    assert!(c.has_directed(0, 1));
    assert!(c.bidirected_edges().is_empty());
    assert_eq!(c.random(), s(&bow, &["Y"]));

    assert_eq!(cadmg(&g, r, r), Err(GraphError::OverlappingSets));
}

#[test]
fn fixability_and_blanket() {
    let bow = load(fixtures::BOW);
    let a = bow.index("A").unwrap();
    assert!(!fixable(&bow, a).unwrap());
    assert_eq!(bow.fmt_set(fixability_witness(&bow, a).unwrap()), "{Y}");
    let y = bow.index("Y").unwrap();
    assert!(fixable(&bow, y).unwrap());
    assert_eq!(bow.fmt_set(markov_blanket(&bow, y).unwrap()), "{A}");

    let sw = swig(&bow, s(&bow, &["A"])).unwrap();
    let hat = sw.index("A@a").unwrap();
    assert!(matches!(fixable(&sw, hat), Err(GraphError::ContextVertex(_))));
}

#[test]
fn materialized_bidirected_edges_keep_separation() {
    let bow = load(fixtures::BOW);
    let m = materialize_bidirected(&bow).unwrap();
    assert!(m.bidirected_edges().is_empty());
    assert_eq!(m.latent().len(), 1);
    let p = latent_project(&m, m.observed()).unwrap();
    assert_eq!(common::edge_sets(&p), common::edge_sets(&bow));
}

#[test]
fn fixtures_parse_and_round_trip() {
    for (name, text) in fixtures::ALL {
        let f = parse_graph_file(text).unwrap_or_else(|e| panic!("{name}: {e}"));
        let again = parse_graph_file(&serialize_graph_file(&f)).unwrap();
        assert_eq!(f, again, "{name}");
        assert!(f.query.is_some());
    }
}

#[test]
fn parse_errors_carry_line_numbers() {
    let e = parse_graph_file("var A\nvar B\nedge A => B\n").unwrap_err();
    assert!(matches!(e, GraphError::Parse { line: 3, .. }));
    let e = parse_graph_file("var A\nedge A -> Q\n").unwrap_err();
    assert!(matches!(e, GraphError::Parse { line: 2, .. }));
    let e = parse_graph_file("var A\nvar B\nedge A -> B\nedge B -> A\n").unwrap_err();
    assert!(matches!(e, GraphError::Parse { .. }));
    let e = parse_graph_file("var A\ncpt A | : 0.5 0.5\n").unwrap_err();
    assert!(matches!(e, GraphError::Parse { line: 2, .. }));
    let f = parse_graph_file_with("var A states=3\ncpt A | : 0.2 0.3 0.5\n", &["cpt"]).unwrap();
    assert_eq!(f.extra.len(), 1);
    assert_eq!(f.cards(), vec![3]);
}
