//! Serialization round trips for quality models and block files.

mod common;

use rand::rngs::StdRng;
use rand::SeedableRng;

use common::random_block_tree;
use qmm_core::blockmodel::parse_blockfile;
use qmm_core::dsl::{parse_model, serialize_model};
use qmm_core::synth::{random_model, RandomSpec};

#[test]
fn random_models_survive_serialization() {
    let mut rng = StdRng::seed_from_u64(1);
    for n in 0..500 {
        let model = random_model(&mut rng, &RandomSpec::MEDIUM);
        let c = model.counts();
        assert!(c.entities + c.attributes + c.facts + c.activities + c.impacts <= 200);
        let text = serialize_model(&model);
        let (back, diags) = parse_model("r.qmm", &text);
        assert!(diags.is_empty(), "model {n}: {diags:?}\n{text}");
        assert_eq!(back, model, "model {n}\n{text}");
        assert_eq!(serialize_model(&back), text);
    }
}

#[test]
fn random_block_trees_survive_printing() {
    let mut rng = StdRng::seed_from_u64(2);
    for n in 0..300 {
        let tree = random_block_tree(&mut rng);
        let text = tree.print();
        let (back, diags) = parse_blockfile("r.bm", &text);
        assert!(diags.is_empty(), "tree {n}: {diags:?}\n{text}");
        assert!(back.same_structure(&tree), "tree {n}\n{text}");
        assert_eq!(back.print(), text);
    }
}
