//! Quality profiles.
//!
//! Fact values in `[0, 1]` state how far a fact's property holds. They are
//! averaged up the entity tree, and projected through the impacts onto
//! activities: a positive impact passes `v` on, a negative one `1 - v`.
//! Nodes without data stay absent rather than counting as zero.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::checkers::{parse_fact_ref, CheckResult};
use crate::diag::{Code, Diagnostic, Location};
use crate::model::{Category, FactKey, ImpactKey, NodeRef, QualityModel, Sign, Tree};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FactValue {
    pub value: f64,
    pub origin: Category,
}

/// Present fact values, keyed by fact.
pub type FactValues = BTreeMap<FactKey, FactValue>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProfileError {
    #[error("fact {0} is not in the model")]
    UnknownFact(FactKey),
    #[error("fact {0} is AUTO and takes no manual score")]
    ScoreForAutoFact(FactKey),
    #[error("score {score} for {fact} is outside [0, 1]")]
    ScoreOutOfRange { fact: FactKey, score: f64 },
    #[error("weight {weight} for `{target}` must be positive and finite")]
    InvalidWeight { target: String, weight: f64 },
}

/// True when every impact of the fact is negative, so that its guideline
/// asks to avoid the property and a checker violation is an occurrence of
/// it. Facts without impacts count as desired.
pub fn is_undesired(model: &QualityModel, fact: &FactKey) -> bool {
    let mut impacts = model.impacts_of(fact).peekable();
    impacts.peek().is_some() && impacts.all(|i| i.sign == Sign::Negative)
}

/// Maps check results to fact values, the degree to which each fact's
/// property holds. The check ratio `1 - violations / opportunities` (1.0
/// when there was nothing to check) is the share of compliant instances;
/// for an undesired fact the property holds on the violations, so its value
/// is the complement.
pub fn values_from_results(model: &QualityModel, results: &[CheckResult]) -> FactValues {
    results
        .iter()
        .map(|r| {
            let origin = model.fact(&r.fact).map_or(r.category, |f| f.category);
            let value = if is_undesired(model, &r.fact) {
                1.0 - r.value()
            } else {
                r.value()
            };
            (r.fact.clone(), FactValue { value, origin })
        })
        .collect()
}

/// Applies manual review scores. MANUAL facts take the score; SEMI facts
/// take the lower of the automated value and the score.
pub fn merge_manual(
    model: &QualityModel,
    values: &FactValues,
    manual: &BTreeMap<FactKey, f64>,
) -> Result<FactValues, ProfileError> {
    let mut out = values.clone();
    for (key, &score) in manual {
        let fact = model
            .fact(key)
            .ok_or_else(|| ProfileError::UnknownFact(key.clone()))?;
        if !(0.0..=1.0).contains(&score) {
            return Err(ProfileError::ScoreOutOfRange {
                fact: key.clone(),
                score,
            });
        }
        let value = match fact.category {
            Category::Auto => return Err(ProfileError::ScoreForAutoFact(key.clone())),
            Category::Manual => score,
            Category::Semi => values.get(key).map_or(score, |v| v.value.min(score)),
        };
        out.insert(
            key.clone(),
            FactValue {
                value,
                origin: fact.category,
            },
        );
    }
    Ok(out)
}

/// Parses `[<EntityPath>|<ATTR>] = <decimal>` lines.
pub fn parse_manual_scores(file: &str, text: &str) -> (BTreeMap<FactKey, f64>, Vec<Diagnostic>) {
    let mut scores = BTreeMap::new();
    let mut diags = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let loc = Location::line(file, line);
        let parsed = content.split_once('=').and_then(|(f, v)| {
            let fact = parse_fact_ref(f.trim())?;
            let value = v.trim().parse::<f64>().ok().filter(|v| v.is_finite())?;
            Some((fact, value))
        });
        match parsed {
            Some((fact, value)) => {
                if scores.insert(fact.clone(), value).is_some() {
                    diags.push(Diagnostic::error(
                        Code::DuplicateDeclaration,
                        loc,
                        format!("second score for {fact}"),
                    ));
                }
            }
            None => diags.push(Diagnostic::error(
                Code::SyntaxError,
                loc,
                "expected `[<entity>|<ATTR>] = <decimal>`",
            )),
        }
    }
    (scores, diags)
}

/// Optional aggregation weights; anything unset weighs 1.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Weights {
    nodes: BTreeMap<String, f64>,
    facts: BTreeMap<FactKey, f64>,
    impacts: BTreeMap<ImpactKey, f64>,
}

fn checked(target: String, weight: f64) -> Result<f64, ProfileError> {
    if weight.is_finite() && weight > 0.0 {
        Ok(weight)
    } else {
        Err(ProfileError::InvalidWeight { target, weight })
    }
}

impl Weights {
    /// Weight of a node within its parent's mean (either tree).
    pub fn set_node(&mut self, path: &str, weight: f64) -> Result<(), ProfileError> {
        self.nodes.insert(path.to_string(), checked(path.to_string(), weight)?);
        Ok(())
    }

    /// Weight of a fact within its entity's mean.
    pub fn set_fact(&mut self, fact: &FactKey, weight: f64) -> Result<(), ProfileError> {
        self.facts.insert(fact.clone(), checked(fact.to_string(), weight)?);
        Ok(())
    }

    /// Weight of an impact within its activity's mean.
    pub fn set_impact(&mut self, fact: &FactKey, activity: &str, weight: f64) -> Result<(), ProfileError> {
        let key = ImpactKey {
            fact: fact.clone(),
            activity: activity.to_string(),
        };
        let w = checked(key.to_string(), weight)?;
        self.impacts.insert(key, w);
        Ok(())
    }

    fn node(&self, path: &str) -> f64 {
        self.nodes.get(path).copied().unwrap_or(1.0)
    }

    fn fact(&self, fact: &FactKey) -> f64 {
        self.facts.get(fact).copied().unwrap_or(1.0)
    }

    fn impact(&self, key: &ImpactKey) -> f64 {
        self.impacts.get(key).copied().unwrap_or(1.0)
    }
}

/// Per-node scores of one tree, `None` where no data arrives.
pub type NodeScores = BTreeMap<String, Option<f64>>;

fn weighted_mean(items: impl IntoIterator<Item = (f64, f64)>) -> Option<f64> {
    let (mut sum, mut total) = (0.0, 0.0);
    for (w, v) in items {
        sum += w * v;
        total += w;
    }
    // Clamp guards against rounding just outside the unit interval.
    (total > 0.0).then(|| (sum / total).clamp(0.0, 1.0))
}

/// Scores every node of `tree` bottom-up: atomic nodes via `leaf`, inner
/// nodes as the mean of their present children.
fn rollup(
    tree: &Tree,
    weights: &Weights,
    leaf: impl Fn(NodeRef<'_>) -> Option<f64>,
) -> NodeScores {
    let mut scores = NodeScores::new();
    for node in tree.depth_first().into_iter().rev() {
        let score = if node.is_atomic() {
            leaf(node)
        } else {
            weighted_mean(node.children().filter_map(|c| {
                let s = scores.get(c.path()).copied().flatten()?;
                Some((weights.node(c.path()), s))
            }))
        };
        scores.insert(node.path().to_string(), score);
    }
    scores
}

pub fn rollup_entities(model: &QualityModel, values: &FactValues) -> NodeScores {
    rollup_entities_weighted(model, values, &Weights::default())
}

/// Entity scores: an atomic entity averages its present fact values.
pub fn rollup_entities_weighted(model: &QualityModel, values: &FactValues, weights: &Weights) -> NodeScores {
    rollup(model.entities(), weights, |node| {
        weighted_mean(
            model
                .facts()
                .filter(|f| f.key.entity == node.path())
                .filter_map(|f| Some((weights.fact(&f.key), values.get(&f.key)?.value))),
        )
    })
}

/// Contribution of a fact value through an impact of the given sign.
pub fn adjusted(value: f64, sign: Sign) -> f64 {
    match sign {
        Sign::Positive => value,
        Sign::Negative => 1.0 - value,
    }
}

pub fn activity_scores(model: &QualityModel, values: &FactValues) -> NodeScores {
    activity_scores_weighted(model, values, &Weights::default())
}

/// Activity scores: an atomic activity averages the adjusted values of the
/// impacts on it whose fact has a value.
pub fn activity_scores_weighted(model: &QualityModel, values: &FactValues, weights: &Weights) -> NodeScores {
    rollup(model.activities(), weights, |node| {
        weighted_mean(
            model
                .impacts()
                .filter(|i| i.activity() == node.path())
                .filter_map(|i| {
                    let v = values.get(i.fact())?.value;
                    Some((weights.impact(&i.key), adjusted(v, i.sign)))
                }),
        )
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct QualityProfile {
    pub fact_values: FactValues,
    pub entity_scores: NodeScores,
    pub activity_scores: NodeScores,
}

impl QualityProfile {
    pub fn compute(model: &QualityModel, values: FactValues) -> Self {
        Self::compute_weighted(model, values, &Weights::default())
    }

    pub fn compute_weighted(model: &QualityModel, values: FactValues, weights: &Weights) -> Self {
        QualityProfile {
            entity_scores: rollup_entities_weighted(model, &values, weights),
            activity_scores: activity_scores_weighted(model, &values, weights),
            fact_values: values,
        }
    }

    /// Indented text with aligned score columns; absent scores read `n/a`.
    pub fn render(&self, model: &QualityModel) -> String {
        let fmt_score = |s: Option<f64>| s.map_or_else(|| "n/a".to_string(), |v| format!("{v:.3}"));
        let mut out = String::new();

        out.push_str("Facts\n");
        let facts: Vec<(String, String, String)> = model
            .facts()
            .map(|f| {
                let v = self.fact_values.get(&f.key);
                (
                    f.key.to_string(),
                    fmt_score(v.map(|v| v.value)),
                    f.category.to_string(),
                )
            })
            .collect();
        let width = facts.iter().map(|f| f.0.len()).max().unwrap_or(0);
        for (name, score, category) in &facts {
            let _ = writeln!(out, "  {name:<width$}  {score:>5}  {category}");
        }

        for (title, tree, scores) in [
            ("Entities", model.entities(), &self.entity_scores),
            ("Activities", model.activities(), &self.activity_scores),
        ] {
            let _ = writeln!(out, "{title}");
            let rows: Vec<(String, String)> = tree
                .depth_first()
                .iter()
                .map(|n| {
                    let label = format!("{}{}", "  ".repeat(n.depth()), n.name());
                    (label, fmt_score(scores.get(n.path()).copied().flatten()))
                })
                .collect();
            let width = rows.iter().map(|r| r.0.chars().count()).max().unwrap_or(0);
            for (label, score) in rows {
                let _ = writeln!(out, "{label:<width$}  {score:>5}");
            }
        }
        out
    }
}
