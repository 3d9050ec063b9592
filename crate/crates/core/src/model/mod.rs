//! The two-dimensional quality metamodel.
//!
//! A [`QualityModel`] holds an entity tree (the decomposition of the
//! assessed situation), an activity tree (the maintenance process),
//! attribute definitions that attach to entities and inherit downwards,
//! facts (entity/attribute tuples) and signed impacts from atomic facts
//! onto atomic activities.
//!
//! All mutation goes through checked operations, so a model built here is
//! referentially valid at every step. [`QualityModel::unchecked`] exists for
//! importers that want to load broken data and report on it with the
//! validator instead of failing early.

mod matrix;
mod tree;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

pub use matrix::{ImpactMatrix, LiftedMatrix, LiftedSign};
pub use tree::{NodeId, NodeRef, Tree};

pub const ENTITY_ROOT: &str = "Situation";
pub const ACTIVITY_ROOT: &str = "Maintenance";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Dimension {
    Entity,
    Activity,
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Dimension::Entity => "entity",
            Dimension::Activity => "activity",
        })
    }
}

/// How a fact can be assessed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Category {
    /// Checkable by a tool.
    Auto,
    /// Needs a review.
    Manual,
    /// Tool-assisted, with manual follow-up.
    Semi,
}

impl Category {
    pub const ALL: [Category; 3] = [Category::Auto, Category::Manual, Category::Semi];

    pub fn as_str(self) -> &'static str {
        match self {
            Category::Auto => "auto",
            Category::Manual => "manual",
            Category::Semi => "semi",
        }
    }

    pub fn parse(s: &str) -> Option<Category> {
        match s {
            "auto" => Some(Category::Auto),
            "manual" => Some(Category::Manual),
            "semi" => Some(Category::Semi),
            _ => None,
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Positive,
    Negative,
}

impl Sign {
    pub fn symbol(self) -> &'static str {
        match self {
            Sign::Positive => "+",
            Sign::Negative => "-",
        }
    }

    pub fn flipped(self) -> Sign {
        match self {
            Sign::Positive => Sign::Negative,
            Sign::Negative => Sign::Positive,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// Identifies a fact by its entity path and attribute name.
///
/// Ordering is entity path, then attribute, which is the order used for
/// every deterministic listing of facts.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FactKey {
    pub entity: String,
    pub attribute: String,
}

impl FactKey {
    pub fn new(entity: impl Into<String>, attribute: impl Into<String>) -> Self {
        FactKey {
            entity: entity.into(),
            attribute: attribute.into(),
        }
    }

    /// Last path segment of the entity.
    pub fn entity_name(&self) -> &str {
        self.entity.rsplit('/').next().unwrap_or(&self.entity)
    }
}

impl fmt::Display for FactKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}|{}]", self.entity, self.attribute)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ImpactKey {
    pub fact: FactKey,
    pub activity: String,
}

impl fmt::Display for ImpactKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}", self.fact, self.activity)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttributeDef {
    pub name: String,
    pub description: String,
    /// Entity paths the attribute is attached to.
    pub attachments: BTreeSet<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fact {
    pub key: FactKey,
    pub category: Category,
    pub description: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Impact {
    pub key: ImpactKey,
    pub sign: Sign,
    pub justification: String,
}

impl Impact {
    pub fn fact(&self) -> &FactKey {
        &self.key.fact
    }

    pub fn activity(&self) -> &str {
        &self.key.activity
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("malformed path `{0}`")]
    MalformedPath(String),
    #[error("malformed attribute name `{0}` (expected an uppercase identifier)")]
    MalformedName(String),
    #[error("parent of `{0}` does not exist")]
    MissingParent(String),
    #[error("`{0}` already exists")]
    DuplicateSibling(String),
    #[error("cannot add `{0}`: its parent is referenced by an impact and must stay atomic")]
    ParentHasImpacts(String),
    #[error("attribute `{0}` is already defined")]
    DuplicateAttribute(String),
    #[error("unknown entity `{0}`")]
    UnknownEntity(String),
    #[error("unknown activity `{0}`")]
    UnknownActivity(String),
    #[error("unknown attribute `{0}`")]
    UnknownAttribute(String),
    #[error("attribute `{attribute}` is already attached at `{existing}`, which overlaps `{entity}`")]
    RedundantAttachment {
        attribute: String,
        entity: String,
        existing: String,
    },
    #[error("attribute `{attribute}` is not effective for entity `{entity}`")]
    AttributeNotEffective { entity: String, attribute: String },
    #[error("fact {0} is already declared")]
    DuplicateFact(FactKey),
    #[error("unknown fact {0}")]
    UnknownFact(FactKey),
    #[error("fact {0} is not atomic: its entity has children")]
    NonAtomicFact(FactKey),
    #[error("activity `{0}` is not atomic")]
    NonAtomicActivity(String),
    #[error("impact {0} is already declared")]
    DuplicateImpact(ImpactKey),
    #[error("impact {0} has an empty justification")]
    EmptyJustification(ImpactKey),
}

pub type Result<T, E = ModelError> = std::result::Result<T, E>;

pub(crate) fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

pub(crate) fn is_attribute_name(s: &str) -> bool {
    is_ident(s) && !s.chars().any(|c| c.is_ascii_lowercase())
}

pub(crate) fn is_path(s: &str) -> bool {
    !s.is_empty() && s.split('/').all(is_ident)
}

/// Element counts of a model.
///
/// Entity and activity counts include the two roots. `total` counts facts,
/// activities and impacts: entities and attributes are the constituents of
/// facts and are reported separately.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ModelCounts {
    pub entities: usize,
    pub attributes: usize,
    pub facts: usize,
    pub activities: usize,
    pub impacts: usize,
}

impl ModelCounts {
    pub fn total(&self) -> usize {
        self.facts + self.activities + self.impacts
    }
}

#[derive(Debug, Clone)]
pub struct QualityModel {
    name: String,
    entities: Tree,
    activities: Tree,
    attributes: BTreeMap<String, AttributeDef>,
    facts: BTreeMap<FactKey, Fact>,
    impacts: BTreeMap<ImpactKey, Impact>,
}

impl Default for QualityModel {
    fn default() -> Self {
        QualityModel::new("")
    }
}

impl PartialEq for QualityModel {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.entities == other.entities
            && self.activities == other.activities
            && self.attributes == other.attributes
            && self.facts == other.facts
            && self.impacts == other.impacts
    }
}

impl Eq for QualityModel {}

impl QualityModel {
    pub fn new(name: impl Into<String>) -> Self {
        QualityModel {
            name: name.into(),
            entities: Tree::new(ENTITY_ROOT),
            activities: Tree::new(ACTIVITY_ROOT),
            attributes: BTreeMap::new(),
            facts: BTreeMap::new(),
            impacts: BTreeMap::new(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn set_name(&mut self, name: impl Into<String>) {
        self.name = name.into();
    }

    pub fn entities(&self) -> &Tree {
        &self.entities
    }

    pub fn activities(&self) -> &Tree {
        &self.activities
    }

    pub fn tree(&self, dimension: Dimension) -> &Tree {
        match dimension {
            Dimension::Entity => &self.entities,
            Dimension::Activity => &self.activities,
        }
    }

    pub fn attributes(&self) -> impl Iterator<Item = &AttributeDef> {
        self.attributes.values()
    }

    pub fn attribute(&self, name: &str) -> Option<&AttributeDef> {
        self.attributes.get(name)
    }

    /// Facts in (entity path, attribute) order.
    pub fn facts(&self) -> impl Iterator<Item = &Fact> {
        self.facts.values()
    }

    pub fn fact(&self, key: &FactKey) -> Option<&Fact> {
        self.facts.get(key)
    }

    /// Impacts in (fact, activity path) order.
    pub fn impacts(&self) -> impl Iterator<Item = &Impact> {
        self.impacts.values()
    }

    pub fn impact(&self, fact: &FactKey, activity: &str) -> Option<&Impact> {
        self.impacts.get(&ImpactKey {
            fact: fact.clone(),
            activity: activity.to_string(),
        })
    }

    pub fn impacts_of<'a>(&'a self, fact: &'a FactKey) -> impl Iterator<Item = &'a Impact> + 'a {
        self.impacts.values().filter(move |i| &i.key.fact == fact)
    }

    pub fn counts(&self) -> ModelCounts {
        ModelCounts {
            entities: self.entities.len(),
            attributes: self.attributes.len(),
            facts: self.facts.len(),
            activities: self.activities.len(),
            impacts: self.impacts.len(),
        }
    }

    fn tree_mut(&mut self, dimension: Dimension) -> &mut Tree {
        match dimension {
            Dimension::Entity => &mut self.entities,
            Dimension::Activity => &mut self.activities,
        }
    }

    fn is_impacted(&self, dimension: Dimension, path: &str) -> bool {
        self.impacts.keys().any(|k| match dimension {
            Dimension::Entity => k.fact.entity == path,
            Dimension::Activity => k.activity == path,
        })
    }

    /// Adds a node below an existing parent. `path` includes the root
    /// segment, e.g. `Situation/Infrastructure/Debugger`.
    pub fn add_node(
        &mut self,
        dimension: Dimension,
        path: &str,
        description: &str,
    ) -> Result<NodeId> {
        if !is_path(path) {
            return Err(ModelError::MalformedPath(path.to_string()));
        }
        if self.tree(dimension).contains(path) {
            return Err(ModelError::DuplicateSibling(path.to_string()));
        }
        let Some((parent_path, name)) = path.rsplit_once('/') else {
            // A single segment that is not the root has no parent.
            return Err(ModelError::MissingParent(path.to_string()));
        };
        let parent = self
            .tree(dimension)
            .find(parent_path)
            .map(|n| n.id())
            .ok_or_else(|| ModelError::MissingParent(path.to_string()))?;
        if self.is_impacted(dimension, parent_path) {
            return Err(ModelError::ParentHasImpacts(path.to_string()));
        }
        Ok(self.tree_mut(dimension).insert(parent, name, description))
    }

    pub fn add_entity(&mut self, path: &str, description: &str) -> Result<NodeId> {
        self.add_node(Dimension::Entity, path, description)
    }

    pub fn add_activity(&mut self, path: &str, description: &str) -> Result<NodeId> {
        self.add_node(Dimension::Activity, path, description)
    }

    pub fn define_attribute(&mut self, name: &str, description: &str) -> Result<&AttributeDef> {
        if !is_attribute_name(name) {
            return Err(ModelError::MalformedName(name.to_string()));
        }
        if self.attributes.contains_key(name) {
            return Err(ModelError::DuplicateAttribute(name.to_string()));
        }
        Ok(self
            .attributes
            .entry(name.to_string())
            .or_insert(AttributeDef {
                name: name.to_string(),
                description: description.to_string(),
                attachments: BTreeSet::new(),
            }))
    }

    /// Attaches an attribute to an entity, making it effective for the
    /// entity and all of its descendants.
    ///
    /// An attachment may not overlap an existing attachment of the same
    /// attribute on an ancestor or a descendant.
    pub fn attach_attribute(&mut self, entity: &str, attribute: &str) -> Result<()> {
        let node = self
            .entities
            .find(entity)
            .ok_or_else(|| ModelError::UnknownEntity(entity.to_string()))?;
        let def = self
            .attributes
            .get(attribute)
            .ok_or_else(|| ModelError::UnknownAttribute(attribute.to_string()))?;
        for existing in &def.attachments {
            if self.entities.is_within(entity, existing) || self.entities.is_within(existing, entity)
            {
                return Err(ModelError::RedundantAttachment {
                    attribute: attribute.to_string(),
                    entity: node.path().to_string(),
                    existing: existing.clone(),
                });
            }
        }
        let entity = node.path().to_string();
        self.attributes
            .get_mut(attribute)
            .expect("checked above")
            .attachments
            .insert(entity);
        Ok(())
    }

    /// Attributes attached to the entity or to any of its ancestors.
    pub fn effective_attributes(&self, entity: &str) -> Result<BTreeSet<String>> {
        let node = self
            .entities
            .find(entity)
            .ok_or_else(|| ModelError::UnknownEntity(entity.to_string()))?;
        let chain: Vec<&str> = node.ancestors_inclusive().iter().map(|n| n.path()).collect();
        Ok(self
            .attributes
            .values()
            .filter(|a| chain.iter().any(|p| a.attachments.contains(*p)))
            .map(|a| a.name.clone())
            .collect())
    }

    pub fn declare_fact(
        &mut self,
        entity: &str,
        attribute: &str,
        category: Category,
        description: &str,
    ) -> Result<FactKey> {
        let effective = self.effective_attributes(entity)?;
        if !effective.contains(attribute) {
            if !self.attributes.contains_key(attribute) {
                return Err(ModelError::UnknownAttribute(attribute.to_string()));
            }
            return Err(ModelError::AttributeNotEffective {
                entity: entity.to_string(),
                attribute: attribute.to_string(),
            });
        }
        let key = FactKey::new(entity, attribute);
        if self.facts.contains_key(&key) {
            return Err(ModelError::DuplicateFact(key));
        }
        self.facts.insert(
            key.clone(),
            Fact {
                key: key.clone(),
                category,
                description: description.to_string(),
            },
        );
        Ok(key)
    }

    pub fn declare_impact(
        &mut self,
        fact: &FactKey,
        activity: &str,
        sign: Sign,
        justification: &str,
    ) -> Result<ImpactKey> {
        if !self.facts.contains_key(fact) {
            return Err(ModelError::UnknownFact(fact.clone()));
        }
        let entity = self
            .entities
            .find(&fact.entity)
            .ok_or_else(|| ModelError::UnknownEntity(fact.entity.clone()))?;
        if !entity.is_atomic() {
            return Err(ModelError::NonAtomicFact(fact.clone()));
        }
        let node = self
            .activities
            .find(activity)
            .ok_or_else(|| ModelError::UnknownActivity(activity.to_string()))?;
        if !node.is_atomic() {
            return Err(ModelError::NonAtomicActivity(activity.to_string()));
        }
        let key = ImpactKey {
            fact: fact.clone(),
            activity: activity.to_string(),
        };
        if self.impacts.contains_key(&key) {
            return Err(ModelError::DuplicateImpact(key));
        }
        if justification.trim().is_empty() {
            return Err(ModelError::EmptyJustification(key));
        }
        self.impacts.insert(
            key.clone(),
            Impact {
                key: key.clone(),
                sign,
                justification: justification.to_string(),
            },
        );
        Ok(key)
    }

    /// Escape hatch for loading data without referential checks.
    pub fn unchecked(&mut self) -> UncheckedEdit<'_> {
        UncheckedEdit { model: self }
    }
}

/// Inserts model elements without referential checks. Only tree shape
/// (parents must exist) is still enforced.
pub struct UncheckedEdit<'a> {
    model: &'a mut QualityModel,
}

impl UncheckedEdit<'_> {
    pub fn attach(&mut self, entity: &str, attribute: &str) -> &mut Self {
        if let Some(def) = self.model.attributes.get_mut(attribute) {
            def.attachments.insert(entity.to_string());
        } else {
            let mut attachments = BTreeSet::new();
            attachments.insert(entity.to_string());
            self.model.attributes.insert(
                attribute.to_string(),
                AttributeDef {
                    name: attribute.to_string(),
                    description: String::new(),
                    attachments,
                },
            );
        }
        self
    }

    pub fn fact(&mut self, fact: Fact) -> &mut Self {
        self.model.facts.insert(fact.key.clone(), fact);
        self
    }

    pub fn impact(&mut self, impact: Impact) -> &mut Self {
        self.model.impacts.insert(impact.key.clone(), impact);
        self
    }
}
