//! Guideline documents generated from the model.
//!
//! A view selects facts by entity subtree, assessment category and affected
//! activity subtree. The generated Markdown has a compact checklist whose
//! items link to detail entries listing every impact with its
//! justification.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::diag::{Code, Diagnostic, Location};
use crate::model::{Category, FactKey, ModelError, QualityModel, ACTIVITY_ROOT, ENTITY_ROOT};

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct View {
    pub name: String,
    pub activity_filter: Option<String>,
    pub entity_filter: Option<String>,
    pub category_filter: Option<BTreeSet<Category>>,
}

impl View {
    pub fn all(name: impl Into<String>) -> Self {
        View {
            name: name.into(),
            ..View::default()
        }
    }

    pub fn activity(mut self, path: impl Into<String>) -> Self {
        self.activity_filter = Some(path.into());
        self
    }

    pub fn entity(mut self, path: impl Into<String>) -> Self {
        self.entity_filter = Some(path.into());
        self
    }

    pub fn categories(mut self, categories: impl IntoIterator<Item = Category>) -> Self {
        self.category_filter = Some(categories.into_iter().collect());
        self
    }
}

/// Parses view definitions, one per line:
///
/// ```text
/// view "<name>" [activity=<path>] [entity=<path>] [category=auto,manual]
/// ```
pub fn parse_views(file: &str, text: &str) -> (Vec<View>, Vec<Diagnostic>) {
    let mut views = Vec::new();
    let mut diags = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.trim();
        if content.is_empty() || content.starts_with('#') {
            continue;
        }
        match parse_view_line(content) {
            Ok(v) => views.push(v),
            Err(msg) => diags.push(Diagnostic::error(Code::SyntaxError, Location::line(file, line), msg)),
        }
    }
    (views, diags)
}

fn parse_view_line(line: &str) -> Result<View, String> {
    let rest = line
        .strip_prefix("view")
        .filter(|r| r.starts_with(char::is_whitespace))
        .ok_or("expected `view \"<name>\" key=value ...`")?
        .trim_start();
    let rest = rest.strip_prefix('"').ok_or("view name must be quoted")?;
    let end = rest.find('"').ok_or("unterminated view name")?;
    let mut view = View::all(&rest[..end]);
    for word in rest[end + 1..].split_whitespace() {
        let (k, v) = word
            .split_once('=')
            .ok_or_else(|| format!("expected key=value, found `{word}`"))?;
        match k {
            "activity" => view.activity_filter = Some(v.to_string()),
            "entity" => view.entity_filter = Some(v.to_string()),
            "category" => {
                let cats = v
                    .split(',')
                    .map(|c| Category::parse(c).ok_or_else(|| format!("unknown category `{c}`")))
                    .collect::<Result<BTreeSet<_>, _>>()?;
                view.category_filter = Some(cats);
            }
            _ => return Err(format!("unknown view key `{k}`")),
        }
    }
    Ok(view)
}

/// Facts selected by `view`, sorted by entity path then attribute.
pub fn select_view(model: &QualityModel, view: &View) -> Result<Vec<FactKey>, ModelError> {
    let entity_root = view.entity_filter.as_deref().unwrap_or(ENTITY_ROOT);
    if !model.entities().contains(entity_root) {
        return Err(ModelError::UnknownEntity(entity_root.to_string()));
    }
    let activity_root = view.activity_filter.as_deref();
    if let Some(a) = activity_root {
        if !model.activities().contains(a) {
            return Err(ModelError::UnknownActivity(a.to_string()));
        }
    }
    Ok(model
        .facts()
        .filter(|f| model.entities().is_within(&f.key.entity, entity_root))
        .filter(|f| view.category_filter.as_ref().is_none_or(|c| c.contains(&f.category)))
        .filter(|f| {
            activity_root.is_none_or(|root| {
                model
                    .impacts_of(&f.key)
                    .any(|i| model.activities().is_within(i.activity(), root))
            })
        })
        .map(|f| f.key.clone())
        .collect())
}

/// Anchor id of a fact's detail entry.
pub fn anchor(fact: &FactKey) -> String {
    format!("fact.{}.{}", fact.entity.replace('/', "."), fact.attribute)
}

/// Lowercase alphanumeric words joined by `-`; `view` when nothing is left.
pub fn slug(name: &str) -> String {
    let s = name
        .split(|c: char| !c.is_ascii_alphanumeric())
        .filter(|w| !w.is_empty())
        .map(str::to_ascii_lowercase)
        .collect::<Vec<_>>()
        .join("-");
    if s.is_empty() {
        "view".to_string()
    } else {
        s
    }
}

fn one_line(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Entity path without the root segment, for display.
fn display_path(path: &str) -> &str {
    path.strip_prefix(ENTITY_ROOT)
        .or_else(|| path.strip_prefix(ACTIVITY_ROOT))
        .map(|p| p.trim_start_matches('/'))
        .filter(|p| !p.is_empty())
        .unwrap_or(path)
}

fn checklist_text(model: &QualityModel, fact: &FactKey) -> String {
    let authored = model.fact(fact).map(|f| one_line(&f.description)).unwrap_or_default();
    if !authored.is_empty() {
        return authored;
    }
    let attr = model
        .attribute(&fact.attribute)
        .map(|a| one_line(&a.description))
        .filter(|d| !d.is_empty())
        .unwrap_or_else(|| fact.attribute.to_lowercase());
    format!("Ensure {}: {attr}", fact.entity_name())
}

/// Markdown guideline for the facts in `view`, plus a warning when the view
/// selects nothing. Output is a pure function of the inputs.
pub fn generate_guideline(
    model: &QualityModel,
    view: &View,
) -> Result<(String, Vec<Diagnostic>), ModelError> {
    let facts = select_view(model, view)?;
    let mut out = String::new();
    let title = if model.name().is_empty() {
        view.name.clone()
    } else {
        format!("{}: {}", model.name(), view.name)
    };
    let _ = writeln!(out, "# Guideline: {title}\n");
    let mut diags = Vec::new();
    if facts.is_empty() {
        diags.push(Diagnostic::warning(
            Code::EmptyView,
            Location::element(format!("view {}", view.name)),
            "view selects no facts; writing a stub document",
        ));
        out.push_str("_This view selects no facts._\n");
        return Ok((out, diags));
    }

    out.push_str("## Checklist\n\n");
    for key in &facts {
        let category = model.fact(key).map(|f| f.category).unwrap_or(Category::Auto);
        let _ = writeln!(
            out,
            "- [ ] [{}](#{}) ({category})",
            checklist_text(model, key),
            anchor(key)
        );
    }

    out.push_str("\n## Details\n");
    for key in &facts {
        let fact = model.fact(key).expect("selected facts exist");
        let _ = writeln!(
            out,
            "\n<a id=\"{}\"></a>\n### {} | {}\n",
            anchor(key),
            display_path(&key.entity),
            key.attribute
        );
        let _ = writeln!(out, "- Fact: `{key}`");
        let _ = writeln!(out, "- Assessment: {}", fact.category);
        if !fact.description.is_empty() {
            let _ = writeln!(out, "- Description: {}", one_line(&fact.description));
        }
        if let Some(node) = model.entities().find(&key.entity) {
            if !node.description().is_empty() {
                let _ = writeln!(out, "- Entity: {}", one_line(node.description()));
            }
        }
        if let Some(attr) = model.attribute(&key.attribute) {
            if !attr.description.is_empty() {
                let _ = writeln!(out, "- Attribute: {}", one_line(&attr.description));
            }
        }
        let impacts: Vec<_> = model.impacts_of(key).collect();
        if impacts.is_empty() {
            out.push_str("- Impacts: none\n");
        } else {
            out.push_str("- Impacts:\n");
            for i in impacts {
                let _ = writeln!(
                    out,
                    "  - {} {}: {}",
                    i.sign.symbol(),
                    display_path(i.activity()),
                    one_line(&i.justification)
                );
            }
        }
    }
    Ok((out, diags))
}

/// Fact keys referenced by checklist links and detail anchors of a
/// generated document, for cross-checking.
pub fn document_anchors(doc: &str) -> (Vec<String>, Vec<String>) {
    let mut links = Vec::new();
    let mut targets = Vec::new();
    for line in doc.lines() {
        if let Some(rest) = line.strip_prefix("- [ ] ") {
            if let Some(start) = rest.rfind("](#") {
                let tail = &rest[start + 3..];
                if let Some(end) = tail.find(')') {
                    links.push(tail[..end].to_string());
                }
            }
        }
        if let Some(rest) = line.strip_prefix("<a id=\"") {
            if let Some(end) = rest.find('"') {
                targets.push(rest[..end].to_string());
            }
        }
    }
    (links, targets)
}
