use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::model::QualityModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum TermKind {
    Entity,
    Attribute,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlossaryEntry {
    pub term: String,
    pub kind: TermKind,
    pub definition: String,
    /// Entity paths carrying this name, or the attribute name itself.
    pub sources: Vec<String>,
}

/// Names that probably denote the same concept.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CollisionGroup {
    pub members: Vec<String>,
    pub case_variants: bool,
    pub synonyms: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Glossary {
    pub terms: Vec<GlossaryEntry>,
    pub collisions: Vec<CollisionGroup>,
}

impl Glossary {
    pub fn render(&self) -> String {
        let mut out = String::from("Terms\n");
        for t in &self.terms {
            let kind = match t.kind {
                TermKind::Entity => "entity",
                TermKind::Attribute => "attribute",
            };
            let _ = writeln!(out, "  {} ({kind}: {})", t.term, t.sources.join(", "));
            if !t.definition.is_empty() {
                let _ = writeln!(out, "      {}", t.definition.replace('\n', " "));
            }
        }
        out.push_str("Collisions\n");
        if self.collisions.is_empty() {
            out.push_str("  none\n");
        }
        for g in &self.collisions {
            let reason = match (g.case_variants, g.synonyms) {
                (true, true) => "case+synonym",
                (true, false) => "case",
                _ => "synonym",
            };
            let _ = writeln!(out, "  {reason}: {}", g.members.join(", "));
        }
        out
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut x = x;
        while self.parent[x] != r {
            let next = self.parent[x];
            self.parent[x] = r;
            x = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// One entry per distinct entity name and per attribute, plus collision
/// groups of case-insensitive duplicates and synonym-linked names.
///
/// `synonyms` pairs an alias with the term it stands for; aliases need not
/// occur in the model.
pub fn build_glossary(model: &QualityModel, synonyms: &[(String, String)]) -> Glossary {
    let mut by_name: BTreeMap<&str, GlossaryEntry> = BTreeMap::new();
    for node in model.entities().depth_first() {
        let entry = by_name.entry(node.name()).or_insert_with(|| GlossaryEntry {
            term: node.name().to_string(),
            kind: TermKind::Entity,
            definition: String::new(),
            sources: Vec::new(),
        });
        if entry.definition.is_empty() {
            entry.definition = node.description().to_string();
        }
        entry.sources.push(node.path().to_string());
    }
    let mut terms: Vec<GlossaryEntry> = by_name.into_values().collect();
    terms.extend(model.attributes().map(|a| GlossaryEntry {
        term: a.name.clone(),
        kind: TermKind::Attribute,
        definition: a.description.clone(),
        sources: vec![a.name.clone()],
    }));
    terms.sort_by(|a, b| {
        (a.term.to_lowercase(), &a.term, a.kind).cmp(&(b.term.to_lowercase(), &b.term, b.kind))
    });

    // Nodes are case-folded names; originals remember every spelling.
    let mut index: BTreeMap<String, usize> = BTreeMap::new();
    let mut spellings: Vec<BTreeSet<String>> = Vec::new();
    let mut in_model: Vec<bool> = Vec::new();
    let mut node_of = |name: &str, from_model: bool| -> usize {
        let folded = name.to_lowercase();
        let id = *index.entry(folded).or_insert_with(|| {
            spellings.push(BTreeSet::new());
            in_model.push(false);
            spellings.len() - 1
        });
        spellings[id].insert(name.to_string());
        in_model[id] |= from_model;
        id
    };
    for t in &terms {
        node_of(&t.term, true);
    }
    let links: Vec<(usize, usize)> = synonyms
        .iter()
        .map(|(alias, term)| (node_of(alias, false), node_of(term, false)))
        .collect();
    let mut uf = UnionFind {
        parent: (0..spellings.len()).collect(),
    };
    let mut linked = vec![false; spellings.len()];
    for &(a, b) in &links {
        if a != b {
            uf.union(a, b);
            linked[a] = true;
            linked[b] = true;
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for id in 0..spellings.len() {
        let root = uf.find(id);
        groups.entry(root).or_default().push(id);
    }
    let mut collisions: Vec<CollisionGroup> = groups
        .into_values()
        .filter(|ids| ids.iter().any(|&i| in_model[i]))
        .filter_map(|ids| {
            let members: BTreeSet<String> =
                ids.iter().flat_map(|&i| spellings[i].iter().cloned()).collect();
            if members.len() < 2 {
                return None;
            }
            let mut members: Vec<String> = members.into_iter().collect();
            members.sort_by(|a, b| (a.to_lowercase(), a).cmp(&(b.to_lowercase(), b)));
            Some(CollisionGroup {
                members,
                case_variants: ids.iter().any(|&i| spellings[i].len() > 1),
                synonyms: ids.iter().any(|&i| linked[i]),
            })
        })
        .collect();
    collisions.sort_by(|a, b| a.members.cmp(&b.members));
    Glossary { terms, collisions }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(paths: &[&str]) -> QualityModel {
        let mut m = QualityModel::new("");
        for p in paths {
            m.add_entity(p, "").unwrap();
        }
        m
    }

    #[test]
    fn synonyms_group_aliases() {
        let m = model(&["Situation/Subsystem", "Situation/TargetLinkSubsystem"]);
        let g = build_glossary(&m, &[("function".into(), "TargetLinkSubsystem".into())]);
        assert_eq!(g.collisions.len(), 1);
        assert_eq!(g.collisions[0].members, ["function", "TargetLinkSubsystem"]);
        assert!(g.collisions[0].synonyms && !g.collisions[0].case_variants);
    }

    #[test]
    fn unique_names_do_not_collide() {
        let m = model(&["Situation/A", "Situation/B"]);
        assert!(build_glossary(&m, &[]).collisions.is_empty());
    }

    #[test]
    fn case_variants_group_across_subtrees() {
        let m = model(&["Situation/X", "Situation/X/State", "Situation/Y", "Situation/Y/state"]);
        let g = build_glossary(&m, &[]);
        assert_eq!(g.collisions.len(), 1);
        assert_eq!(g.collisions[0].members, ["State", "state"]);
        assert!(g.collisions[0].case_variants);
    }

    #[test]
    fn every_entity_and_attribute_appears_once() {
        let mut m = model(&["Situation/A", "Situation/A/Leaf", "Situation/B", "Situation/B/Leaf"]);
        m.define_attribute("LEAF", "").unwrap();
        let g = build_glossary(&m, &[]);
        let mut seen: Vec<String> = g.terms.iter().flat_map(|t| t.sources.clone()).collect();
        seen.sort();
        let mut expected: Vec<String> = m
            .entities()
            .depth_first()
            .iter()
            .map(|n| n.path().to_string())
            .chain(["LEAF".to_string()])
            .collect();
        expected.sort();
        assert_eq!(seen, expected);
        // Leaf (entity, twice) and LEAF (attribute) fold together
        assert_eq!(g.collisions.len(), 1);
        assert_eq!(g.collisions[0].members, ["LEAF", "Leaf"]);
    }

    #[test]
    fn synonym_chain_with_case_fold() {
        let m = model(&["Situation/Subsystem", "Situation/TargetLinkSubsystem"]);
        let g = build_glossary(
            &m,
            &[
                ("subsystem".into(), "TargetLinkSubsystem".into()),
                ("function".into(), "TargetLinkSubsystem".into()),
            ],
        );
        assert_eq!(g.collisions.len(), 1);
        assert_eq!(
            g.collisions[0].members,
            ["function", "Subsystem", "subsystem", "TargetLinkSubsystem"]
        );
    }
}
