//! Named graphs used across the workspace's tests and the bundled CLI
//! examples. Every constant is in the graph file format.

/// Backdoor graph: covariate X adjusts for the A-Y confounding.
pub const FIG1A: &str = "\
var X
var A
var Y
edge X -> A
edge X -> Y
edge A -> Y
query treat=A outcome=Y
";

/// Fig1a with an unmeasured confounder U of A and Y.
pub const FIG1C: &str = "\
var U latent
var X
var A
var Y
edge U -> A
edge U -> Y
edge X -> A
edge X -> Y
edge A -> Y
query treat=A outcome=Y
";

/// Standard proximal graph: W outcome proxy, Z treatment proxy.
pub const FIG1D: &str = "\
var U latent
var A
var Y
var W
var Z
var X
edge U -> A
edge U -> Y
edge U -> W
edge U -> Z
edge X -> A
edge X -> Y
edge X -> W
edge X -> Z
edge Z -> A
edge W -> Y
edge A -> Y
query treat=A outcome=Y wproxy=W zproxy=Z
";

/// Fig1d without the latent confounder.
pub const FIG1D_UNCONFOUNDED: &str = "\
var A
var Y
var W
var Z
var X
edge X -> A
edge X -> Y
edge X -> W
edge X -> Z
edge Z -> A
edge W -> Y
edge A -> Y
query treat=A outcome=Y wproxy=W zproxy=Z
";

/// Proximal front-door graph with the W -> M -> Z path; Z is post-treatment.
pub const FIG3A: &str = "\
var U latent
var A
var M
var Y
var W
var Z
var X
edge U -> A
edge U -> Y
edge U -> W
edge U -> Z
edge U -> X
edge X -> A
edge X -> M
edge X -> Y
edge X -> W
edge X -> Z
edge A -> M
edge A -> Z
edge W -> M
edge W -> Y
edge M -> Y
edge M -> Z
query treat=A outcome=Y wproxy=W zproxy=Z
";

/// Front-door variant with the Z -> M -> W path; Z is pre-treatment.
pub const FIG3B: &str = "\
var U latent
var A
var M
var Y
var W
var Z
var X
edge U -> A
edge U -> Y
edge U -> W
edge U -> Z
edge U -> X
edge X -> A
edge X -> M
edge X -> Y
edge X -> W
edge X -> Z
edge Z -> A
edge Z -> M
edge A -> M
edge M -> W
edge M -> Y
edge W -> Y
query treat=A outcome=Y wproxy=W zproxy=Z
";

/// Both proxies feed the mediator.
pub const FIG4E: &str = "\
var U latent
var A
var M
var Y
var W
var Z
var X
edge U -> A
edge U -> Y
edge U -> W
edge U -> Z
edge U -> X
edge X -> A
edge X -> M
edge X -> Y
edge X -> W
edge X -> Z
edge Z -> A
edge Z -> M
edge W -> M
edge A -> M
edge M -> Y
edge W -> Y
query treat=A outcome=Y wproxy=W zproxy=Z
";

pub const BOW: &str = "\
var A
var Y
edge A -> Y
edge A <-> Y
query treat=A outcome=Y
";

pub const FRONT_DOOR: &str = "\
var U latent
var A
var M
var Y
edge U -> A
edge U -> Y
edge A -> M
edge M -> Y
query treat=A outcome=Y
";

/// All named fixtures as `(name, text)`.
pub const ALL: &[(&str, &str)] = &[
    ("fig1a", FIG1A),
    ("fig1c", FIG1C),
    ("fig1d", FIG1D),
    ("fig1d_unconfounded", FIG1D_UNCONFOUNDED),
    ("fig3a", FIG3A),
    ("fig3b", FIG3B),
    ("fig4e", FIG4E),
    ("bow", BOW),
    ("front_door", FRONT_DOOR),
];
