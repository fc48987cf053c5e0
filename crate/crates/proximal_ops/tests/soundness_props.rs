mod common;

use common::*;
use graph_core::fixtures::{FIG1D, FIG1D_UNCONFOUNDED, FIG3A, FIG3B, FIG4E};
use kernel_algebra::Kernel;
use proptest::prelude::*;
use proximal_ops::{apply_fix, apply_step, check_preconditions, OpContext, OpKind};

const GRAPHS: &[&str] = &[FIG1D, FIG1D_UNCONFOUNDED, FIG3A, FIG3B, FIG4E];
const KINDS: &[OpKind] = &[OpKind::Obf, OpKind::Tbf, OpKind::Ebf];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Whenever the oracle-mode check passes, the output is the oracle's
    /// interventional kernel, and Ebf outputs marginalize to whichever of
    /// Obf/Tbf also apply.
    #[test]
    fn passing_checks_imply_oracle_agreement(
        gi in 0..GRAPHS.len(),
        ki in 0..KINDS.len(),
        fix_first in any::<bool>(),
        seed in 0u64..10_000,
    ) {
        let text = GRAPHS[gi];
        let g = graph(text);
        let m = model(text, seed);
        let ctx = OpContext::oracle(&m);
        let mut p = observational(&m);
        if fix_first {
            match g.index("M").ok().map(|mv| apply_fix(&p, mv, &ctx)) {
                Some(Ok(out)) => p = out.kernel,
                _ => return Ok(()),
            }
        }
        let st = step(&g, KINDS[ki], "A", &["W"], &["Z"]);
        let report = check_preconditions(&st, &p, Some(&p), &ctx).unwrap();
        if !report.passed() {
            return Ok(());
        }
        let out = apply_step(&p, &p, &st, &ctx).unwrap();
        prop_assert!(oracle_gap(&m, &out.kernel) < 1e-8);
        let expected_random = proximal_ops::output_random(st.kind, out.roles.as_ref().unwrap());
        prop_assert_eq!(out.kernel.random(), expected_random);
        prop_assert_eq!(out.kernel.context(), p.context().with(st.b));
        if st.kind == OpKind::Ebf {
            let ev = out.kernel.value().unwrap();
            for (kind, drop) in [(OpKind::Obf, "W"), (OpKind::Tbf, "Z")] {
                let other = step(&g, kind, "A", &["W"], &["Z"]);
                if let Ok(o) = apply_step(&p, &p, &other, &ctx) {
                    let marg = sum_out(ev, &g, &[drop]);
                    let ov = o.kernel.value().unwrap();
                    if o.kernel.random() == out.kernel.random() - set(&g, &[drop]) {
                        prop_assert!(marg.max_abs_diff(ov).unwrap() < 1e-8);
                    }
                }
            }
        }
    }

    /// Declared-mode kernels evaluate to the oracle-mode values.
    #[test]
    fn declared_functionals_evaluate_like_oracle_outputs(ki in 0..KINDS.len(), seed in 0u64..10_000) {
        let g = graph(FIG1D);
        let m = model(FIG1D, seed);
        let st = step(&g, KINDS[ki], "A", &["W"], &["Z"]);
        let declared = OpContext::declared(&g, &[2; 6]).unwrap();
        let sym = Kernel::observational(g.observed(), None).unwrap();
        let out = apply_step(&sym, &sym, &st, &declared).unwrap().kernel;
        let evaluated = out.evaluate(&m.observed_joint().unwrap()).unwrap();
        prop_assert!(oracle_gap(&m, &evaluated) < 1e-8);
    }
}
