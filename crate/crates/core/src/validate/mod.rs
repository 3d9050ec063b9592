//! Integrity analysis of quality models.
//!
//! - [`validate_structure`]: referential integrity plus unused attributes and
//!   factless leaves
//! - [`check_contradictions`]: opposite signs for one fact/activity pair
//!   across the model and external impact sets
//! - [`check_coverage`]: entity/activity subtree pairs with no impact at all
//! - [`check_omissions`]: sibling subtrees that ignore an inherited attribute
//!   used by their siblings
//! - [`build_glossary`]: terminology with case and synonym collisions

mod glossary;

use std::collections::{BTreeMap, BTreeSet};

use crate::diag::{Code, Diagnostic, Location, ValidationReport};
use crate::dsl::{parse_statements, Statement};
use crate::model::{FactKey, ImpactKey, LiftedSign, ModelError, QualityModel, Sign};

pub use glossary::{build_glossary, CollisionGroup, Glossary, GlossaryEntry, TermKind};

pub fn validate_structure(model: &QualityModel) -> ValidationReport {
    let mut diags = Vec::new();
    let entities = model.entities();
    let activities = model.activities();

    for attr in model.attributes() {
        if attr.attachments.is_empty() {
            diags.push(Diagnostic::warning(
                Code::UnusedAttribute,
                Location::element(&attr.name),
                format!("attribute {} is not attached to any entity", attr.name),
            ));
        }
        for path in &attr.attachments {
            if !entities.contains(path) {
                diags.push(Diagnostic::error(
                    Code::DanglingReference,
                    Location::element(path),
                    format!("attribute {} is attached to unknown entity `{path}`", attr.name),
                ));
            }
        }
    }

    for fact in model.facts() {
        let key = &fact.key;
        let loc = Location::element(key.to_string());
        if !entities.contains(&key.entity) {
            diags.push(Diagnostic::error(
                Code::DanglingReference,
                loc,
                format!("fact refers to unknown entity `{}`", key.entity),
            ));
            continue;
        }
        if model.attribute(&key.attribute).is_none() {
            diags.push(Diagnostic::error(
                Code::DanglingReference,
                loc,
                format!("fact refers to unknown attribute {}", key.attribute),
            ));
            continue;
        }
        let effective = model
            .effective_attributes(&key.entity)
            .expect("entity exists");
        if !effective.contains(&key.attribute) {
            diags.push(Diagnostic::error(
                Code::AttributeNotEffective,
                loc,
                format!(
                    "attribute {} is neither attached to `{}` nor inherited",
                    key.attribute, key.entity
                ),
            ));
        }
    }

    for impact in model.impacts() {
        let key = &impact.key;
        let loc = Location::element(key.to_string());
        let mut dangling = false;
        if model.fact(&key.fact).is_none() {
            dangling = true;
            diags.push(Diagnostic::error(
                Code::DanglingReference,
                loc.clone(),
                format!("impact refers to undeclared fact {}", key.fact),
            ));
        }
        if !activities.contains(&key.activity) {
            dangling = true;
            diags.push(Diagnostic::error(
                Code::DanglingReference,
                loc.clone(),
                format!("impact refers to unknown activity `{}`", key.activity),
            ));
        }
        if !dangling {
            if let Some(e) = entities.find(&key.fact.entity) {
                if !e.is_atomic() {
                    diags.push(Diagnostic::error(
                        Code::NonAtomicImpact,
                        loc.clone(),
                        format!("entity `{}` is not a leaf", key.fact.entity),
                    ));
                }
            }
            if !activities.find(&key.activity).expect("checked").is_atomic() {
                diags.push(Diagnostic::error(
                    Code::NonAtomicImpact,
                    loc.clone(),
                    format!("activity `{}` is not a leaf", key.activity),
                ));
            }
        }
        if impact.justification.trim().is_empty() {
            diags.push(Diagnostic::error(
                Code::EmptyJustification,
                loc,
                "impact has no justification",
            ));
        }
    }

    let with_facts: BTreeSet<&str> = model.facts().map(|f| f.key.entity.as_str()).collect();
    for node in entities.atomic_nodes() {
        if !with_facts.contains(node.path()) {
            diags.push(Diagnostic::warning(
                Code::FactlessEntity,
                Location::element(node.path()),
                format!("leaf entity `{}` has no facts", node.name()),
            ));
        }
    }

    ValidationReport::new(diags)
}

/// An impact assertion from a source other than the model itself.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExternalImpact {
    pub fact: FactKey,
    pub activity: String,
    pub sign: Sign,
    pub justification: String,
}

/// A named collection of impact assertions, typically one guideline.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ImpactSet {
    pub name: String,
    pub impacts: Vec<ExternalImpact>,
}

impl ImpactSet {
    pub fn new(name: impl Into<String>) -> Self {
        ImpactSet {
            name: name.into(),
            impacts: Vec::new(),
        }
    }

    pub fn with(mut self, fact: FactKey, activity: &str, sign: Sign) -> Self {
        self.impacts.push(ExternalImpact {
            fact,
            activity: activity.to_string(),
            sign,
            justification: String::new(),
        });
        self
    }

    /// Reads an impact set written with `impact` statements of the model
    /// format. Other statements are rejected.
    pub fn parse(name: &str, file: &str, text: &str) -> (ImpactSet, Vec<Diagnostic>) {
        let (source, mut diags) = parse_statements(file, text);
        let mut set = ImpactSet::new(name);
        for s in source.statements {
            match s.statement {
                Statement::Impact {
                    fact,
                    activity,
                    sign,
                    justification,
                } => set.impacts.push(ExternalImpact {
                    fact,
                    activity,
                    sign,
                    justification,
                }),
                _ => diags.push(Diagnostic::error(
                    Code::SyntaxError,
                    Location::line(file, s.line),
                    "impact sets may only contain impact statements",
                )),
            }
        }
        (set, diags)
    }
}

/// Reports every fact/activity pair that receives both signs across the
/// model and the external sets.
pub fn check_contradictions(model: &QualityModel, external: &[ImpactSet]) -> ValidationReport {
    let model_source = if model.name().is_empty() {
        "model".to_string()
    } else {
        model.name().to_string()
    };
    let assertions = model
        .impacts()
        .map(|i| (i.key.clone(), i.sign, model_source.as_str()))
        .chain(external.iter().flat_map(|set| {
            set.impacts.iter().map(move |i| {
                let key = ImpactKey {
                    fact: i.fact.clone(),
                    activity: i.activity.clone(),
                };
                (key, i.sign, set.name.as_str())
            })
        }));
    // pair -> sign -> sources in order of appearance
    let mut seen: BTreeMap<ImpactKey, BTreeMap<Sign, Vec<&str>>> = BTreeMap::new();
    for (key, sign, source) in assertions {
        let sources = seen.entry(key).or_default().entry(sign).or_default();
        if !sources.contains(&source) {
            sources.push(source);
        }
    }
    let diags = seen.into_iter().filter(|(_, signs)| signs.len() == 2).map(|(key, signs)| {
        let pos = signs[&Sign::Positive].join(", ");
        let neg = signs[&Sign::Negative].join(", ");
        Diagnostic::error(
            Code::ContradictoryImpact,
            Location::element(key.to_string()),
            format!("contradictory impact signs: + from {pos}; - from {neg}"),
        )
    });
    ValidationReport::new(diags.collect::<Vec<_>>())
}

/// Children of the entity root paired with children of the activity root.
pub fn top_level_pairs(model: &QualityModel) -> Vec<(String, String)> {
    let activities: Vec<String> = model
        .activities()
        .root()
        .children()
        .map(|n| n.path().to_string())
        .collect();
    model
        .entities()
        .root()
        .children()
        .flat_map(|e| {
            activities
                .iter()
                .map(move |a| (e.path().to_string(), a.clone()))
        })
        .collect()
}

/// Warns for each (entity subtree, activity subtree) pair whose lifted
/// impact is NONE. An empty list checks every top-level pair.
pub fn check_coverage(
    model: &QualityModel,
    pairs: &[(String, String)],
) -> Result<ValidationReport, ModelError> {
    let all;
    let pairs = if pairs.is_empty() {
        all = top_level_pairs(model);
        &all
    } else {
        pairs
    };
    let mut diags = Vec::new();
    for (entity, activity) in pairs {
        if model.lift_impact(entity, activity)? == LiftedSign::None {
            diags.push(Diagnostic::warning(
                Code::MissingImpact,
                Location::element(format!("{entity} x {activity}")),
                format!("no fact below `{entity}` has an impact on any activity below `{activity}`"),
            ));
        }
    }
    Ok(ValidationReport::new(diags))
}

/// Flags child subtrees that never use an inherited attribute while one of
/// their siblings does.
pub fn check_omissions(model: &QualityModel) -> ValidationReport {
    let entities = model.entities();
    let mut diags = Vec::new();
    for attr in model.attributes() {
        let users: Vec<&str> = model
            .facts()
            .filter(|f| f.key.attribute == attr.name)
            .map(|f| f.key.entity.as_str())
            .collect();
        for attached in &attr.attachments {
            let Some(node) = entities.find(attached) else {
                continue;
            };
            if node.child_count() < 2 {
                continue;
            }
            let children: Vec<_> = node.children().collect();
            let used: Vec<bool> = children
                .iter()
                .map(|c| users.iter().any(|u| entities.is_within(u, c.path())))
                .collect();
            if !used.iter().any(|&u| u) {
                continue;
            }
            let using: Vec<&str> = children
                .iter()
                .zip(&used)
                .filter(|(_, &u)| u)
                .map(|(c, _)| c.name())
                .collect();
            for (child, _) in children.iter().zip(&used).filter(|(_, &u)| !u) {
                diags.push(Diagnostic::warning(
                    Code::InheritedAttributeImbalance,
                    Location::element(child.path()),
                    format!(
                        "{} is inherited from `{}` and used below {} but not below {}",
                        attr.name,
                        attached,
                        using.join(", "),
                        child.name()
                    ),
                ));
            }
        }
    }
    ValidationReport::new(diags)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Category, Fact, Impact};

    fn tools_model() -> QualityModel {
        let mut m = QualityModel::new("m");
        for p in [
            "Situation/Infrastructure",
            "Situation/Infrastructure/Tools",
            "Situation/Infrastructure/Tools/Compiler",
            "Situation/Infrastructure/Debugger",
        ] {
            m.add_entity(p, "").unwrap();
        }
        for p in [
            "Maintenance/Analysis",
            "Maintenance/Analysis/FaultDiagnostics",
            "Maintenance/Implementation",
            "Maintenance/Implementation/Coding",
        ] {
            m.add_activity(p, "").unwrap();
        }
        m.define_attribute("EXISTENCE", "").unwrap();
        m.attach_attribute("Situation/Infrastructure", "EXISTENCE").unwrap();
        m.declare_fact("Situation/Infrastructure/Tools/Compiler", "EXISTENCE", Category::Manual, "")
            .unwrap();
        let f = m
            .declare_fact("Situation/Infrastructure/Debugger", "EXISTENCE", Category::Auto, "")
            .unwrap();
        m.declare_impact(&f, "Maintenance/Analysis/FaultDiagnostics", Sign::Positive, "j")
            .unwrap();
        m
    }

    #[test]
    fn checked_model_has_no_errors() {
        let r = validate_structure(&tools_model());
        assert_eq!(r.error_count(), 0, "{}", r.render());
    }

    #[test]
    fn unused_attribute_and_factless_leaf_warn() {
        let mut m = tools_model();
        m.define_attribute("SPARE", "").unwrap();
        m.add_entity("Situation/Infrastructure/Tracker", "").unwrap();
        let r = validate_structure(&m);
        assert_eq!(r.count(Code::UnusedAttribute), 1);
        let factless: Vec<_> = r.with_code(Code::FactlessEntity).map(|d| d.location.to_string()).collect();
        assert_eq!(factless, ["Situation/Infrastructure/Tracker"]);
        assert_eq!(r.error_count(), 0);
    }

    #[test]
    fn unchecked_data_yields_errors() {
        let mut m = tools_model();
        m.unchecked()
            .attach("Situation/Ghost", "EXISTENCE")
            .fact(Fact {
                key: FactKey::new("Situation/Infrastructure", "NOPE"),
                category: Category::Auto,
                description: String::new(),
            })
            .impact(Impact {
                key: ImpactKey {
                    fact: FactKey::new("Situation/Infrastructure/Debugger", "EXISTENCE"),
                    activity: "Maintenance/Analysis".into(),
                },
                sign: Sign::Positive,
                justification: String::new(),
            });
        let r = validate_structure(&m);
        assert_eq!(r.count(Code::DanglingReference), 2);
        assert_eq!(r.count(Code::NonAtomicImpact), 1);
        assert_eq!(r.count(Code::EmptyJustification), 1);
    }

    #[test]
    fn contradictions_need_both_signs() {
        let m = tools_model();
        assert!(check_contradictions(&m, &[]).is_empty());
        let fact = FactKey::new("Situation/Infrastructure/Tools/Compiler", "EXISTENCE");
        let act = "Maintenance/Implementation/Coding";
        let sets = [
            ImpactSet::new("A").with(fact.clone(), act, Sign::Positive),
            ImpactSet::new("B").with(fact.clone(), act, Sign::Positive),
            ImpactSet::new("C").with(fact.clone(), act, Sign::Negative),
        ];
        let r = check_contradictions(&m, &sets);
        assert_eq!(r.count(Code::ContradictoryImpact), 1);
        let msg = &r.diagnostics()[0].message;
        assert!(msg.ends_with("- from C"), "{msg}");
        assert!(msg.contains("+ from A, B"), "{msg}");
    }

    #[test]
    fn coverage_reports_none_lifts() {
        let m = tools_model();
        let r = check_coverage(
            &m,
            &[(
                "Situation/Infrastructure/Tools".into(),
                "Maintenance/Implementation/Coding".into(),
            )],
        )
        .unwrap();
        assert_eq!(r.count(Code::MissingImpact), 1);
        let r = check_coverage(
            &m,
            &[("Situation/Infrastructure".into(), "Maintenance/Analysis".into())],
        )
        .unwrap();
        assert!(r.is_empty());
        assert!(matches!(
            check_coverage(&m, &[("Situation/X".into(), "Maintenance".into())]),
            Err(ModelError::UnknownEntity(_))
        ));
        // all-pairs mode: Infrastructure x {Analysis, Implementation}
        let r = check_coverage(&m, &[]).unwrap();
        let locs: Vec<_> = r.diagnostics().iter().map(|d| d.location.to_string()).collect();
        assert_eq!(locs, ["Situation/Infrastructure x Maintenance/Implementation"]);
    }

    #[test]
    fn omissions_flag_each_unused_sibling() {
        let mut m = QualityModel::new("");
        m.add_entity("Situation/Variable", "").unwrap();
        for c in ["A", "B", "C"] {
            m.add_entity(&format!("Situation/Variable/{c}"), "").unwrap();
        }
        m.define_attribute("LOCALITY", "").unwrap();
        m.attach_attribute("Situation/Variable", "LOCALITY").unwrap();
        assert!(check_omissions(&m).is_empty());
        m.declare_fact("Situation/Variable/B", "LOCALITY", Category::Auto, "").unwrap();
        let r = check_omissions(&m);
        let locs: Vec<_> = r.diagnostics().iter().map(|d| d.location.to_string()).collect();
        assert_eq!(locs, ["Situation/Variable/A", "Situation/Variable/C"]);
        m.declare_fact("Situation/Variable/A", "LOCALITY", Category::Auto, "").unwrap();
        m.declare_fact("Situation/Variable/C", "LOCALITY", Category::Auto, "").unwrap();
        assert!(check_omissions(&m).is_empty());
    }

    #[test]
    fn impact_sets_parse_from_text() {
        let text = "# guideline\nimpact [Situation/X|A] -> Maintenance/Y : + \"reads well\"\nentity Situation/Z\n";
        let (set, diags) = ImpactSet::parse("mathworks", "mw.impacts", text);
        assert_eq!(set.impacts.len(), 1);
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].location, Location::line("mw.impacts", 3));
    }
}
