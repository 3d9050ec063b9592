//! Deterministic model generators for scale tests and property tests.
//!
//! [`telecom_base`] builds a model with the element counts of an industrial
//! telecom maintainability model, [`model_based_extension`] grows it by
//! the counts of a model-based development extension, and
//! [`random_model`] draws small valid models from a seeded RNG. Each
//! generator reports what it created through its own counters.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::model::{Category, FactKey, ModelCounts, QualityModel, Sign, ACTIVITY_ROOT, ENTITY_ROOT};

/// Elements created by a generator, counted as they are added.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Counters {
    pub entities: usize,
    pub attributes: usize,
    pub facts: usize,
    pub activities: usize,
    pub impacts: usize,
}

impl Counters {
    /// The counts a model built from scratch by this generator should
    /// report, roots included.
    pub fn as_model_counts(&self) -> ModelCounts {
        ModelCounts {
            entities: self.entities + 1,
            attributes: self.attributes,
            facts: self.facts,
            activities: self.activities + 1,
            impacts: self.impacts,
        }
    }
}

/// Wraps a model and counts successful additions.
struct Builder<'a> {
    model: &'a mut QualityModel,
    counters: Counters,
}

impl Builder<'_> {
    fn entity(&mut self, path: &str, desc: &str) {
        self.model.add_entity(path, desc).expect("generated entity");
        self.counters.entities += 1;
    }

    fn activity(&mut self, path: &str, desc: &str) {
        self.model.add_activity(path, desc).expect("generated activity");
        self.counters.activities += 1;
    }

    fn attribute(&mut self, name: &str, desc: &str) {
        self.model.define_attribute(name, desc).expect("generated attribute");
        self.counters.attributes += 1;
    }

    fn attach(&mut self, entity: &str, attribute: &str) {
        self.model.attach_attribute(entity, attribute).expect("generated attachment");
    }

    fn fact(&mut self, entity: &str, attribute: &str, category: Category) -> FactKey {
        let desc = format!("{attribute} of {}", entity.rsplit('/').next().unwrap_or(entity));
        let key = self
            .model
            .declare_fact(entity, attribute, category, &desc)
            .expect("generated fact");
        self.counters.facts += 1;
        key
    }

    fn impact(&mut self, fact: &FactKey, activity: &str, sign: Sign) {
        let why = format!("{} affects {}", fact.attribute.to_lowercase(), activity.rsplit('/').next().unwrap_or(activity));
        self.model
            .declare_impact(fact, activity, sign, &why)
            .expect("generated impact");
        self.counters.impacts += 1;
    }
}

fn category_for(i: usize) -> Category {
    match i % 5 {
        3 => Category::Manual,
        4 => Category::Semi,
        _ => Category::Auto,
    }
}

fn sign_for(i: usize) -> Sign {
    if i.is_multiple_of(3) {
        Sign::Negative
    } else {
        Sign::Positive
    }
}

const BASE_GROUP_SIZES: [usize; 9] = [15, 15, 15, 15, 15, 15, 14, 14, 14];
const BASE_ACTIVITY_GROUPS: [usize; 5] = [5, 4, 4, 4, 4];

fn base_attribute(i: usize) -> String {
    format!("ATTR_{:02}", i + 1)
}

fn base_leaf(group: usize, leaf: usize) -> String {
    format!("{ENTITY_ROOT}/Area{:02}/Item{:02}", group + 1, leaf + 1)
}

fn activity_leaf(group: usize, leaf: usize) -> String {
    format!("{ACTIVITY_ROOT}/Phase{}/Task{:02}", group + 1, leaf + 1)
}

/// Telecom-scale model: 142 entities, 16 attributes, 160 facts,
/// 27 activities and 226 impacts, roots included in the node counts.
pub fn telecom_base() -> (QualityModel, Counters) {
    let mut model = QualityModel::new("telecom maintainability");
    let mut b = Builder {
        model: &mut model,
        counters: Counters::default(),
    };
    for i in 0..16 {
        b.attribute(&base_attribute(i), &format!("quality property {}", i + 1));
    }
    // Areas 1-9 each inherit one attribute; attributes 10-16 are attached
    // to four leaves in each of areas 1-7.
    let mut leaves: Vec<(String, usize)> = Vec::new();
    for (g, &size) in BASE_GROUP_SIZES.iter().enumerate() {
        let group = format!("{ENTITY_ROOT}/Area{:02}", g + 1);
        b.entity(&group, &format!("area {}", g + 1));
        b.attach(&group, &base_attribute(g));
        for l in 0..size {
            b.entity(&base_leaf(g, l), "");
            leaves.push((base_leaf(g, l), g));
        }
    }
    let mut activities = Vec::new();
    for (g, &size) in BASE_ACTIVITY_GROUPS.iter().enumerate() {
        b.activity(&format!("{ACTIVITY_ROOT}/Phase{}", g + 1), "");
        for l in 0..size {
            b.activity(&activity_leaf(g, l), "");
            activities.push(activity_leaf(g, l));
        }
    }
    let mut facts = Vec::new();
    for (path, g) in &leaves {
        facts.push(b.fact(path, &base_attribute(*g), category_for(facts.len())));
    }
    for g in 0..7 {
        for l in 0..4 {
            let attr = base_attribute(9 + g);
            b.attach(&base_leaf(g, l), &attr);
            facts.push(b.fact(&base_leaf(g, l), &attr, category_for(facts.len())));
        }
    }
    let n = activities.len();
    for (i, f) in facts.iter().enumerate() {
        b.impact(f, &activities[(i * 7) % n], sign_for(i));
        if i < 66 {
            b.impact(f, &activities[(i * 7 + 10) % n], sign_for(i + 1));
        }
    }
    let counters = b.counters;
    (model, counters)
}

const EXT_GROUPS: [&str; 4] = ["States", "Signals", "Ports", "Layout"];
const EXT_ATTRIBUTES: [&str; 3] = ["VISIBILITY", "NESTING", "COLOR_CODING"];

/// Extends a [`telecom_base`] model with 64 entities, 3 attributes,
/// 87 facts, 2 activities and 84 impacts.
pub fn model_based_extension(model: &mut QualityModel) -> Counters {
    let mut b = Builder {
        model,
        counters: Counters::default(),
    };
    for a in EXT_ATTRIBUTES {
        b.attribute(a, &format!("{} of model elements", a.to_lowercase().replace('_', " ")));
    }
    b.activity(&format!("{ACTIVITY_ROOT}/Phase1/ModelReading"), "reading models");
    b.activity(&format!("{ACTIVITY_ROOT}/Phase2/CodeGeneration"), "generating code from models");

    let group_attr = [EXT_ATTRIBUTES[0], EXT_ATTRIBUTES[1], EXT_ATTRIBUTES[2], "ATTR_01"];
    let leaf = |g: usize, l: usize| format!("{ENTITY_ROOT}/{}/Element{:02}", EXT_GROUPS[g], l + 1);
    let mut facts = Vec::new();
    for (g, name) in EXT_GROUPS.iter().enumerate() {
        let group = format!("{ENTITY_ROOT}/{name}");
        b.entity(&group, "");
        b.attach(&group, group_attr[g]);
        for l in 0..15 {
            b.entity(&leaf(g, l), "");
        }
    }
    for (g, attr) in group_attr.iter().enumerate() {
        for l in 0..15 {
            facts.push(b.fact(&leaf(g, l), attr, category_for(facts.len())));
        }
    }
    // Reused base attributes on single leaves; ATTR_01 is already on Layout.
    for k in 0..27 {
        let (g, l) = (k % 4, k / 4);
        let attr = base_attribute(1 + k % 14);
        b.attach(&leaf(g, l), &attr);
        facts.push(b.fact(&leaf(g, l), &attr, category_for(facts.len())));
    }
    let mut activities: Vec<String> = b
        .model
        .activities()
        .atomic_nodes()
        .iter()
        .map(|n| n.path().to_string())
        .collect();
    activities.sort();
    let n = activities.len();
    for (i, f) in facts.iter().take(84).enumerate() {
        b.impact(f, &activities[(i * 5) % n], sign_for(i));
    }
    b.counters
}

/// Size limits for [`random_model`].
#[derive(Debug, Clone, Copy)]
pub struct RandomSpec {
    pub max_entities: usize,
    pub max_activities: usize,
    pub max_attributes: usize,
    pub max_facts: usize,
    pub max_impacts: usize,
}

impl RandomSpec {
    /// At most 200 elements in total.
    pub const MEDIUM: RandomSpec = RandomSpec {
        max_entities: 40,
        max_activities: 25,
        max_attributes: 8,
        max_facts: 60,
        max_impacts: 60,
    };

    /// At most 50 tree nodes, roots included.
    pub const SMALL_TREES: RandomSpec = RandomSpec {
        max_entities: 29,
        max_activities: 19,
        max_attributes: 5,
        max_facts: 40,
        max_impacts: 60,
    };
}

const TEXT_PIECES: &[&str] = &[
    "plain", "with \"quotes\"", "back\\slash", "tab\there", "line\nbreak", "# hash", "-> arrow",
    "[E|A]", "ümlaut", "", "x = y", "  padded  ",
];

fn random_text(rng: &mut impl Rng) -> String {
    let n = rng.gen_range(0..3);
    (0..n)
        .map(|_| *TEXT_PIECES.choose(rng).expect("non-empty"))
        .collect::<Vec<_>>()
        .join(" ")
}

/// A random valid model. Trees are grown by attaching each node to a
/// random earlier node; facts and impacts are drawn among valid
/// combinations, so every element satisfies the model invariants.
pub fn random_model(rng: &mut impl Rng, spec: &RandomSpec) -> QualityModel {
    let mut model = QualityModel::new(if rng.gen_bool(0.8) { random_text(rng) } else { String::new() });
    let grow = |model: &mut QualityModel, root: &str, prefix: &str, count: usize, rng: &mut _| {
        let mut paths = vec![root.to_string()];
        for i in 0..count {
            let parent = paths.choose(rng).expect("non-empty").clone();
            let path = format!("{parent}/{prefix}{i}");
            let desc = random_text(rng);
            if root == ENTITY_ROOT {
                model.add_entity(&path, &desc).expect("fresh entity");
            } else {
                model.add_activity(&path, &desc).expect("fresh activity");
            }
            paths.push(path);
        }
        paths
    };
    let ne = rng.gen_range(0..=spec.max_entities);
    let na = rng.gen_range(0..=spec.max_activities);
    let entities = grow(&mut model, ENTITY_ROOT, "E", ne, rng);
    grow(&mut model, ACTIVITY_ROOT, "T", na, rng);

    let nattr = rng.gen_range(0..=spec.max_attributes);
    let attrs: Vec<String> = (0..nattr).map(|i| format!("A{i}")).collect();
    for a in &attrs {
        let desc = random_text(rng);
        model.define_attribute(a, &desc).expect("fresh attribute");
    }
    if !attrs.is_empty() {
        for _ in 0..rng.gen_range(0..=2 * attrs.len()) {
            let e = entities.choose(rng).expect("non-empty");
            let a = attrs.choose(rng).expect("non-empty");
            // Redundant attachments are rejected; skipping them is fine.
            let _ = model.attach_attribute(e, a);
        }
    }

    let atomic_entities: Vec<String> = model.entities().atomic_nodes().iter().map(|n| n.path().to_string()).collect();
    let mut facts = Vec::new();
    if !atomic_entities.is_empty() {
        for _ in 0..rng.gen_range(0..=spec.max_facts) {
            let e = atomic_entities.choose(rng).expect("non-empty");
            let effective: Vec<String> = model.effective_attributes(e).expect("known entity").into_iter().collect();
            let Some(a) = effective.choose(rng) else {
                continue;
            };
            let cat = *Category::ALL.choose(rng).expect("non-empty");
            let desc = random_text(rng);
            if let Ok(key) = model.declare_fact(e, a, cat, &desc) {
                facts.push(key);
            }
        }
    }
    let atomic_activities: Vec<String> = model.activities().atomic_nodes().iter().map(|n| n.path().to_string()).collect();
    if !facts.is_empty() && !atomic_activities.is_empty() {
        for _ in 0..rng.gen_range(0..=spec.max_impacts) {
            let f = facts.choose(rng).expect("non-empty");
            let t = atomic_activities.choose(rng).expect("non-empty");
            let sign = if rng.gen_bool(0.5) { Sign::Positive } else { Sign::Negative };
            let mut why = random_text(rng);
            if why.trim().is_empty() {
                why = "because".to_string();
            }
            let _ = model.declare_impact(f, t, sign, &why);
        }
    }
    model
}
