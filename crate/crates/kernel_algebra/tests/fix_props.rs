mod common;

use common::*;
use discrete_oracle::{random_model, DEFAULT_FLOOR};
use graph_core::VertexSet;
use kernel_algebra::Kernel;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Fixing in any valid order lands on the interventional kernel, and
    /// every intermediate kernel stays normalized.
    #[test]
    fn fix_sequences_reproduce_the_interventional_kernel(
        n in 2usize..7,
        dir in any::<u64>(),
        bi in any::<u64>(),
        order in any::<u64>(),
        seed in any::<u64>(),
    ) {
        let g = random_graph(n, dir, bi & dir.rotate_left(7));
        let m = random_model(&g, &vec![2; g.slot_count()], seed, DEFAULT_FLOOR).unwrap();
        let (_, mut k) = observational(&m);
        let mut ord: Vec<usize> = g.vertices().iter().collect();
        ord.rotate_left((order % n as u64) as usize);
        if order & 64 != 0 {
            ord.reverse();
        }
        let mut progress = true;
        while progress {
            progress = false;
            for &b in &ord {
                if !k.random().contains(b) || k.random().len() == 1 {
                    continue;
                }
                if let Ok(next) = k.fix(b, m.graph()) {
                    prop_assert!(next.normalization_error().unwrap() < 1e-10);
                    let oracle = m.interventional_kernel(next.random(), next.context()).unwrap();
                    prop_assert!(diff(next.value().unwrap(), &oracle) < 1e-10);
                    k = next;
                    progress = true;
                }
            }
        }
    }

    #[test]
    fn fix_operations_commute(
        n in 2usize..7,
        dir in any::<u64>(),
        bi in any::<u64>(),
        seed in any::<u64>(),
    ) {
        let g = random_graph(n, dir, bi & dir.rotate_left(3));
        let m = random_model(&g, &vec![2; g.slot_count()], seed, DEFAULT_FLOOR).unwrap();
        let (_, k) = observational(&m);
        let gm = m.graph();
        let vs: Vec<usize> = g.vertices().iter().collect();
        for (i, &b1) in vs.iter().enumerate() {
            for &b2 in &vs[i + 1..] {
                let one = k.fix(b1, gm).and_then(|x| x.fix(b2, gm));
                let two = k.fix(b2, gm).and_then(|x| x.fix(b1, gm));
                if let (Ok(one), Ok(two)) = (one, two) {
                    prop_assert_eq!(one.random(), two.random());
                    prop_assert!(diff(one.value().unwrap(), two.value().unwrap()) < 1e-12);
                }
            }
        }
    }
}

#[test]
fn empty_kernel_context_is_allowed() {
    let k = Kernel::observational(VertexSet::EMPTY, None).unwrap();
    assert!(k.vars().is_empty());
}
