//! Clone detection against a quadratic reference, and its properties.

mod common;

use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

use common::{naive_clones, random_corpus};
use qmm_core::checkers::detect_clones;

#[test]
fn detector_matches_naive_oracle() {
    let mut rng = StdRng::seed_from_u64(3);
    let mut nonempty = 0;
    for _ in 0..50 {
        let files = random_corpus(&mut rng, 2000);
        for min in [5, 10, 25] {
            let fast = detect_clones(&files, min);
            let slow = naive_clones(&files, min);
            assert_eq!(fast, slow, "min_tokens {min}");
            nonempty += usize::from(!fast.groups.is_empty());
        }
    }
    assert!(nonempty > 50, "corpora rarely contain clones ({nonempty})");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn coverage_is_bounded_and_shrinks_with_threshold(seed in any::<u64>(), min in 5usize..30) {
        let mut rng = StdRng::seed_from_u64(seed);
        let files = random_corpus(&mut rng, 600);
        let low = detect_clones(&files, min);
        let high = detect_clones(&files, min + 5);
        prop_assert!(low.cloned_tokens <= low.total_tokens);
        prop_assert!(high.cloned_tokens <= low.cloned_tokens);
        for g in &low.groups {
            prop_assert!(g.instances.len() >= 2);
            for i in &g.instances {
                prop_assert!(i.len() >= min);
            }
        }
    }
}
