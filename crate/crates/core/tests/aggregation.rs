//! Lifting and profile rollups against brute-force reference versions,
//! plus properties of the profile computation.

mod common;

use std::collections::BTreeMap;

use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use common::{brute_activity_scores, brute_entity_scores, brute_lift, close, random_values};
use qmm_core::profile::{activity_scores, adjusted, rollup_entities, FactValue, FactValues, QualityProfile};
use qmm_core::synth::{random_model, RandomSpec};
use qmm_core::{QualityModel, Sign};

fn paths(model: &QualityModel, entities: bool) -> Vec<String> {
    let tree = if entities { model.entities() } else { model.activities() };
    tree.depth_first().iter().map(|n| n.path().to_string()).collect()
}

#[test]
fn random_models_match_brute_force() {
    let mut rng = StdRng::seed_from_u64(7);
    let mut present = 0;
    for _ in 0..200 {
        let model = random_model(&mut rng, &RandomSpec::SMALL_TREES);
        assert!(model.entities().len() + model.activities().len() <= 50);
        let values = random_values(&mut rng, &model);

        let got = rollup_entities(&model, &values);
        let want = brute_entity_scores(&model, &values);
        assert_eq!(got.len(), want.len());
        for (path, w) in &want {
            assert!(close(got[path], *w, 1e-12), "entity {path}: {:?} vs {w:?}", got[path]);
        }

        let got = activity_scores(&model, &values);
        let want = brute_activity_scores(&model, &values);
        present += want.values().flatten().count();
        assert_eq!(got.len(), want.len());
        for (path, w) in &want {
            assert!(close(got[path], *w, 1e-12), "activity {path}: {:?} vs {w:?}", got[path]);
        }

        for e in paths(&model, true) {
            for a in paths(&model, false) {
                assert_eq!(model.lift_impact(&e, &a).unwrap(), brute_lift(&model, &e, &a), "{e} x {a}");
            }
        }
    }
    // The generator must produce data that reaches activities.
    assert!(present > 500, "only {present} activity scores present");
}

#[test]
fn root_lift_is_none_exactly_without_impacts() {
    let mut rng = StdRng::seed_from_u64(11);
    for _ in 0..100 {
        let model = random_model(&mut rng, &RandomSpec::SMALL_TREES);
        let lifted = model.lift_impact("Situation", "Maintenance").unwrap();
        assert_eq!(lifted == qmm_core::model::LiftedSign::None, model.impacts().count() == 0);
        assert_eq!(model.impact_matrix().nonzero_count(), model.impacts().count());
    }
}

fn model_and_values() -> impl Strategy<Value = (QualityModel, FactValues, u64)> {
    any::<u64>().prop_map(|seed| {
        let mut rng = StdRng::seed_from_u64(seed);
        let model = random_model(&mut rng, &RandomSpec::SMALL_TREES);
        let values = random_values(&mut rng, &model);
        (model, values, seed)
    })
}

fn scores_in_unit_interval(scores: &BTreeMap<String, Option<f64>>) -> bool {
    scores.values().flatten().all(|s| (0.0..=1.0).contains(s))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn scores_stay_in_bounds((model, values, _) in model_and_values()) {
        let p = QualityProfile::compute(&model, values);
        prop_assert!(scores_in_unit_interval(&p.entity_scores));
        prop_assert!(scores_in_unit_interval(&p.activity_scores));
    }

    #[test]
    fn raising_a_value_never_lowers_scores((model, values, seed) in model_and_values(), bump in 0.0f64..1.0) {
        prop_assume!(!values.is_empty());
        let mut rng = StdRng::seed_from_u64(seed ^ 0x5eed);
        let key = values.keys().nth(rng.gen_range(0..values.len())).unwrap().clone();
        let mut raised = values.clone();
        let old = raised[&key].value;
        raised.get_mut(&key).unwrap().value = old + (1.0 - old) * bump;

        let before = rollup_entities(&model, &values);
        let after = rollup_entities(&model, &raised);
        for (path, b) in &before {
            if let (Some(b), Some(a)) = (b, after[path]) {
                prop_assert!(a >= b - 1e-12, "entity {} fell from {} to {}", path, b, a);
            }
        }

        // Activities reached only through positive impacts of this fact.
        let before = activity_scores(&model, &values);
        let after = activity_scores(&model, &raised);
        let negative_targets: Vec<&str> = model
            .impacts_of(&key)
            .filter(|i| i.sign == Sign::Negative)
            .map(|i| i.activity())
            .collect();
        for (path, b) in &before {
            let touched = negative_targets
                .iter()
                .any(|t| *t == path || t.starts_with(&format!("{path}/")));
            if touched {
                continue;
            }
            if let (Some(b), Some(a)) = (b, after[path]) {
                prop_assert!(a >= b - 1e-12, "activity {} fell from {} to {}", path, b, a);
            }
        }
    }

    #[test]
    fn sign_flip_complements_contribution(v in 0.0f64..=1.0) {
        prop_assert_eq!(adjusted(v, Sign::Positive), v);
        prop_assert_eq!(adjusted(v, Sign::Negative), 1.0 - v);
        prop_assert_eq!(adjusted(v, Sign::Negative), 1.0 - adjusted(v, Sign::Positive));
    }
}

#[test]
fn single_impact_flip_maps_activity_score() {
    let mut m = QualityModel::new("flip");
    m.add_entity("Situation/Code", "").unwrap();
    m.add_activity("Maintenance/Reading", "").unwrap();
    m.define_attribute("SUPERFLUOUSNESS", "").unwrap();
    m.attach_attribute("Situation/Code", "SUPERFLUOUSNESS").unwrap();
    let f = m.declare_fact("Situation/Code", "SUPERFLUOUSNESS", qmm_core::Category::Auto, "").unwrap();
    let mut neg = m.clone();
    m.declare_impact(&f, "Maintenance/Reading", Sign::Positive, "x").unwrap();
    neg.declare_impact(&f, "Maintenance/Reading", Sign::Negative, "x").unwrap();
    for v in [0.0, 0.3, 0.7, 1.0] {
        let values = FactValues::from([(f.clone(), FactValue { value: v, origin: qmm_core::Category::Auto })]);
        let p = activity_scores(&m, &values)["Maintenance/Reading"].unwrap();
        let n = activity_scores(&neg, &values)["Maintenance/Reading"].unwrap();
        assert_eq!(n, 1.0 - p);
    }
}
