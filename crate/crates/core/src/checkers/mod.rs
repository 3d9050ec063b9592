//! Automated fact checkers.
//!
//! A checker inspects a corpus of source files and block files and reports
//! `(violations, opportunities)` for the fact it is bound to. Bindings come
//! from a config file:
//!
//! ```text
//! bind <checker> [<EntityPath>|<ATTR>] key=value ...
//! ```
//!
//! Every checker accepts `include=<substring>` to restrict the files it
//! reads. Checker-specific parameters are listed in [`CHECKERS`].

mod blocks;
pub mod clones;
mod source;
mod tokens;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

pub use blocks::{chart_accessibility, denylist_blocks, unused_variables, variable_locality};
pub use clones::{detect_clones, CloneGroup, CloneInstance, CloneReport};
pub use source::{classify_identifier, identifier_consistency, switch_default, IdentStyle};
pub use tokens::{tokenize_source, LangConfig, Token, TokenKind};

use crate::blockmodel::{parse_blockfile, BlockTree};
use crate::diag::{Code, Diagnostic, Location};
use crate::model::{Category, FactKey, QualityModel};

/// Raw checker output before it is tied to a fact.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Outcome {
    pub violations: usize,
    pub opportunities: usize,
    pub findings: Vec<(Location, String)>,
    pub diagnostics: Vec<Diagnostic>,
}

impl Outcome {
    fn violation(&mut self, location: Location, message: impl Into<String>) {
        self.violations += 1;
        self.findings.push((location, message.into()));
    }

    fn absorb(&mut self, other: Outcome) {
        self.violations += other.violations;
        self.opportunities += other.opportunities;
        self.findings.extend(other.findings);
        self.diagnostics.extend(other.diagnostics);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum FindingSeverity {
    Violation,
    Info,
}

impl fmt::Display for FindingSeverity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FindingSeverity::Violation => "VIOLATION",
            FindingSeverity::Info => "INFO",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Finding {
    pub fact: FactKey,
    pub location: Location,
    pub message: String,
    pub severity: FindingSeverity,
}

impl fmt::Display for Finding {
    /// Same tab-separated layout as validation report lines.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let msg = self.message.replace(['\t', '\n'], " ");
        write!(f, "{}\t{}\t{}\t{msg}", self.severity, self.fact, self.location)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub fact: FactKey,
    pub checker: String,
    pub category: Category,
    pub violations: usize,
    pub opportunities: usize,
    pub findings: Vec<Finding>,
    /// Set for SEMI facts, whose automated value needs a manual review.
    pub needs_review: bool,
    pub diagnostics: Vec<Diagnostic>,
}

impl CheckResult {
    pub fn from_outcome(fact: FactKey, checker: &str, category: Category, outcome: Outcome) -> Self {
        let mut findings: Vec<Finding> = outcome
            .findings
            .into_iter()
            .map(|(location, message)| Finding {
                fact: fact.clone(),
                location,
                message,
                severity: FindingSeverity::Violation,
            })
            .collect();
        findings.sort_by(|a, b| {
            (location_key(&a.location), &a.message).cmp(&(location_key(&b.location), &b.message))
        });
        CheckResult {
            fact,
            checker: checker.to_string(),
            category,
            violations: outcome.violations,
            opportunities: outcome.opportunities,
            findings,
            needs_review: category == Category::Semi,
            diagnostics: outcome.diagnostics,
        }
    }

    /// `1 - violations / opportunities`; vacuously 1 without opportunities.
    pub fn value(&self) -> f64 {
        if self.opportunities == 0 {
            1.0
        } else {
            1.0 - self.violations as f64 / self.opportunities as f64
        }
    }

    /// One summary line: `fact checker violations/opportunities value`.
    pub fn summary_line(&self) -> String {
        format!(
            "{}\t{}\t{}/{}\t{:.3}{}",
            self.fact,
            self.checker,
            self.violations,
            self.opportunities,
            self.value(),
            if self.needs_review { "\tneeds review" } else { "" }
        )
    }
}

/// Sort key that orders line locations numerically.
fn location_key(loc: &Location) -> (String, usize) {
    match loc {
        Location::Line { file, line } => (file.clone(), *line),
        Location::Element(path) => (path.clone(), 0),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckerBinding {
    pub checker: String,
    pub fact: FactKey,
    pub params: BTreeMap<String, String>,
    /// Line in the binding file, 0 when built in code.
    pub line: usize,
}

impl CheckerBinding {
    pub fn new(checker: &str, fact: FactKey) -> Self {
        CheckerBinding {
            checker: checker.to_string(),
            fact,
            params: BTreeMap::new(),
            line: 0,
        }
    }

    pub fn param(mut self, key: &str, value: &str) -> Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }
}

/// Parses `[<EntityPath>|<ATTR>]`.
pub fn parse_fact_ref(text: &str) -> Option<FactKey> {
    let inner = text.strip_prefix('[')?.strip_suffix(']')?;
    let (entity, attribute) = inner.split_once('|')?;
    let (entity, attribute) = (entity.trim(), attribute.trim());
    if entity.is_empty() || attribute.is_empty() {
        return None;
    }
    Some(FactKey::new(entity, attribute))
}

/// Parses a binding file. Malformed lines become `SyntaxError` diagnostics.
pub fn parse_bindings(file: &str, text: &str) -> (Vec<CheckerBinding>, Vec<Diagnostic>) {
    let mut bindings = Vec::new();
    let mut diags = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut err = |msg: String| {
            diags.push(Diagnostic::error(Code::SyntaxError, Location::line(file, line), msg))
        };
        let mut words = content.split_whitespace();
        if words.next() != Some("bind") {
            err("expected `bind <checker> [<entity>|<ATTR>] key=value ...`".to_string());
            continue;
        }
        let (Some(checker), Some(fact_text)) = (words.next(), words.next()) else {
            err("incomplete binding".to_string());
            continue;
        };
        let Some(fact) = parse_fact_ref(fact_text) else {
            err(format!("malformed fact reference `{fact_text}`"));
            continue;
        };
        let mut params = BTreeMap::new();
        let mut ok = true;
        for w in words {
            match w.split_once('=') {
                Some((k, v)) if !k.is_empty() => {
                    params.insert(k.to_string(), v.to_string());
                }
                _ => {
                    err(format!("expected key=value, found `{w}`"));
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            bindings.push(CheckerBinding {
                checker: checker.to_string(),
                fact,
                params,
                line,
            });
        }
    }
    (bindings, diags)
}

#[derive(Debug, Clone)]
pub struct SourceUnit {
    pub path: String,
    pub tokens: Vec<Token>,
}

/// Analyzed artifacts: `.bm` files are parsed as block trees, everything
/// else is tokenized as C-like source. Units are kept sorted by path.
#[derive(Debug, Clone, Default)]
pub struct Corpus {
    pub sources: Vec<SourceUnit>,
    pub blocks: Vec<BlockTree>,
    pub diagnostics: Vec<Diagnostic>,
}

impl Corpus {
    pub fn from_texts<P: AsRef<str>, T: AsRef<str>>(files: impl IntoIterator<Item = (P, T)>) -> Self {
        let lang = LangConfig::c_like();
        let mut corpus = Corpus::default();
        for (path, text) in files {
            let (path, text) = (path.as_ref(), text.as_ref());
            if path.ends_with(".bm") {
                let (tree, diags) = parse_blockfile(path, text);
                corpus.blocks.push(tree);
                corpus.diagnostics.extend(diags);
            } else {
                let (tokens, diags) = tokenize_source(path, text, &lang);
                corpus.sources.push(SourceUnit {
                    path: path.to_string(),
                    tokens,
                });
                corpus.diagnostics.extend(diags);
            }
        }
        corpus.sources.sort_by(|a, b| a.path.cmp(&b.path));
        corpus.blocks.sort_by(|a, b| a.file.cmp(&b.file));
        corpus.diagnostics.sort_by_key(|d| location_key(&d.location));
        corpus
    }

    pub fn token_count(&self) -> usize {
        self.sources.iter().map(|s| s.tokens.len()).sum()
    }
}

/// A registered checker with its accepted parameters besides `include`.
pub struct CheckerSpec {
    pub name: &'static str,
    pub params: &'static [&'static str],
    pub summary: &'static str,
}

pub const CHECKERS: &[CheckerSpec] = &[
    CheckerSpec {
        name: "switch_default",
        params: &[],
        summary: "switch statements without a default case",
    },
    CheckerSpec {
        name: "unused_variables",
        params: &[],
        summary: "declared variables that are never referenced",
    },
    CheckerSpec {
        name: "identifier_consistency",
        params: &[],
        summary: "identifiers outside the dominant naming style",
    },
    CheckerSpec {
        name: "clones",
        params: &["min_tokens"],
        summary: "duplicated token sequences (min_tokens, default 25, at least 5)",
    },
    CheckerSpec {
        name: "denylist_blocks",
        params: &["deny"],
        summary: "blocks whose BlockType is in the comma-separated deny list",
    },
    CheckerSpec {
        name: "chart_accessibility",
        params: &[],
        summary: "charts without a CurrentState output",
    },
    CheckerSpec {
        name: "variable_locality",
        params: &[],
        summary: "variables used only inside one nested scope",
    },
];

pub const DEFAULT_MIN_TOKENS: usize = 25;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error("line {line}: unknown checker `{checker}`")]
    UnknownChecker { checker: String, line: usize },
    #[error("line {line}: fact {fact} is not in the model")]
    UnknownFact { fact: FactKey, line: usize },
    #[error("line {line}: fact {fact} is MANUAL and cannot be bound to checker `{checker}`")]
    BindingToManualFact {
        fact: FactKey,
        checker: String,
        line: usize,
    },
    #[error("line {line}: fact {fact} is bound more than once")]
    DuplicateBinding { fact: FactKey, line: usize },
    #[error("line {line}: checker `{checker}` has no parameter `{param}`")]
    UnknownParam {
        checker: String,
        param: String,
        line: usize,
    },
    #[error("line {line}: invalid value `{value}` for parameter `{param}`")]
    InvalidParam {
        param: String,
        value: String,
        line: usize,
    },
}

/// Results of one assessment run.
#[derive(Debug, Clone, PartialEq)]
pub struct Assessment {
    /// One per binding, ordered by fact.
    pub results: Vec<CheckResult>,
    /// INFO findings for AUTO facts without a checker.
    pub notices: Vec<Finding>,
}

impl Assessment {
    /// Findings of every result, then the notices.
    pub fn render_findings(&self) -> String {
        let mut out = String::new();
        for f in self.results.iter().flat_map(|r| &r.findings).chain(&self.notices) {
            out.push_str(&f.to_string());
            out.push('\n');
        }
        out
    }

    pub fn render_results(&self) -> String {
        let mut out = String::new();
        for r in &self.results {
            out.push_str(&r.summary_line());
            out.push('\n');
        }
        out
    }
}

fn validate_binding(model: &QualityModel, b: &CheckerBinding) -> Result<&'static CheckerSpec, CheckError> {
    let spec = CHECKERS
        .iter()
        .find(|c| c.name == b.checker)
        .ok_or_else(|| CheckError::UnknownChecker {
            checker: b.checker.clone(),
            line: b.line,
        })?;
    let fact = model.fact(&b.fact).ok_or_else(|| CheckError::UnknownFact {
        fact: b.fact.clone(),
        line: b.line,
    })?;
    if fact.category == Category::Manual {
        return Err(CheckError::BindingToManualFact {
            fact: b.fact.clone(),
            checker: b.checker.clone(),
            line: b.line,
        });
    }
    for key in b.params.keys() {
        if key != "include" && !spec.params.contains(&key.as_str()) {
            return Err(CheckError::UnknownParam {
                checker: b.checker.clone(),
                param: key.clone(),
                line: b.line,
            });
        }
    }
    Ok(spec)
}

fn min_tokens(b: &CheckerBinding) -> Result<usize, CheckError> {
    match b.params.get("min_tokens") {
        None => Ok(DEFAULT_MIN_TOKENS),
        Some(v) => match v.parse::<usize>() {
            Ok(n) if n >= 5 => Ok(n),
            _ => Err(CheckError::InvalidParam {
                param: "min_tokens".to_string(),
                value: v.clone(),
                line: b.line,
            }),
        },
    }
}

/// Runs one checker over the corpus files selected by `include`.
pub fn run_binding(binding: &CheckerBinding, corpus: &Corpus) -> Result<Outcome, CheckError> {
    let include = binding.params.get("include").map(String::as_str).unwrap_or("");
    let sources: Vec<&SourceUnit> = corpus.sources.iter().filter(|s| s.path.contains(include)).collect();
    let trees: Vec<&BlockTree> = corpus.blocks.iter().filter(|t| t.file.contains(include)).collect();
    let per_tree = |f: &dyn Fn(&BlockTree) -> Outcome| {
        let mut out = Outcome::default();
        for t in &trees {
            out.absorb(f(t));
        }
        out
    };
    let outcome = match binding.checker.as_str() {
        "switch_default" => {
            let mut out = Outcome::default();
            for s in &sources {
                out.absorb(switch_default(&s.path, &s.tokens));
            }
            out
        }
        "unused_variables" => per_tree(&unused_variables),
        "variable_locality" => per_tree(&variable_locality),
        "chart_accessibility" => per_tree(&chart_accessibility),
        "denylist_blocks" => {
            let deny: BTreeSet<String> = binding
                .params
                .get("deny")
                .map(|d| d.split(',').map(str::trim).filter(|s| !s.is_empty()).map(String::from).collect())
                .unwrap_or_default();
            per_tree(&|t| denylist_blocks(t, &deny))
        }
        "identifier_consistency" => {
            let mut ids: Vec<(String, Location)> = Vec::new();
            for s in &sources {
                ids.extend(
                    s.tokens
                        .iter()
                        .filter(|t| t.kind == TokenKind::Ident)
                        .map(|t| (t.text.clone(), Location::line(&s.path, t.line))),
                );
            }
            for t in &trees {
                t.visit(|n, _| {
                    if let Some(name) = n.name() {
                        ids.push((name.to_string(), t.location(n)));
                    }
                });
            }
            identifier_consistency(&ids)
        }
        "clones" => {
            let files: Vec<Vec<Token>> = sources.iter().map(|s| s.tokens.clone()).collect();
            let report = detect_clones(&files, min_tokens(binding)?);
            clone_outcome(&report, &sources)
        }
        other => {
            return Err(CheckError::UnknownChecker {
                checker: other.to_string(),
                line: binding.line,
            })
        }
    };
    Ok(outcome)
}

/// One finding per clone instance; violations count cloned tokens.
fn clone_outcome(report: &CloneReport, sources: &[&SourceUnit]) -> Outcome {
    let mut out = Outcome {
        violations: report.cloned_tokens,
        opportunities: report.total_tokens,
        ..Outcome::default()
    };
    for (g, group) in report.groups.iter().enumerate() {
        for inst in &group.instances {
            let unit = sources[inst.file];
            let first = &unit.tokens[inst.start];
            let last = &unit.tokens[inst.end - 1];
            out.findings.push((
                Location::line(&unit.path, first.line),
                format!(
                    "clone group {} ({} instances): {} tokens, lines {}-{}",
                    g + 1,
                    group.instances.len(),
                    inst.len(),
                    first.line,
                    last.line
                ),
            ));
        }
    }
    out
}

/// Runs every binding and reports AUTO facts that have no checker.
pub fn run_checkers(
    model: &QualityModel,
    bindings: &[CheckerBinding],
    corpus: &Corpus,
) -> Result<Assessment, CheckError> {
    let mut seen: BTreeSet<&FactKey> = BTreeSet::new();
    for b in bindings {
        validate_binding(model, b)?;
        if !seen.insert(&b.fact) {
            return Err(CheckError::DuplicateBinding {
                fact: b.fact.clone(),
                line: b.line,
            });
        }
    }
    let mut results = Vec::new();
    for b in bindings {
        let category = model.fact(&b.fact).expect("validated").category;
        let outcome = run_binding(b, corpus)?;
        results.push(CheckResult::from_outcome(b.fact.clone(), &b.checker, category, outcome));
    }
    results.sort_by(|a, b| a.fact.cmp(&b.fact));
    let notices = model
        .facts()
        .filter(|f| f.category == Category::Auto && !seen.contains(&f.key))
        .map(|f| Finding {
            fact: f.key.clone(),
            location: Location::element(f.key.to_string()),
            message: "no checker bound".to_string(),
            severity: FindingSeverity::Info,
        })
        .collect();
    Ok(Assessment { results, notices })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model() -> QualityModel {
        let mut m = QualityModel::new("t");
        m.add_entity("Situation/Code", "").unwrap();
        m.add_entity("Situation/Code/Switch", "").unwrap();
        m.add_entity("Situation/Code/Data", "").unwrap();
        m.add_entity("Situation/Code/Source", "").unwrap();
        for a in ["COMPLETENESS", "APPROPRIATENESS", "REDUNDANCY"] {
            m.define_attribute(a, "").unwrap();
        }
        m.attach_attribute("Situation/Code/Switch", "COMPLETENESS").unwrap();
        m.attach_attribute("Situation/Code/Data", "APPROPRIATENESS").unwrap();
        m.attach_attribute("Situation/Code/Source", "REDUNDANCY").unwrap();
        m.declare_fact("Situation/Code/Switch", "COMPLETENESS", Category::Auto, "")
            .unwrap();
        m.declare_fact("Situation/Code/Data", "APPROPRIATENESS", Category::Manual, "")
            .unwrap();
        m.declare_fact("Situation/Code/Source", "REDUNDANCY", Category::Semi, "")
            .unwrap();
        m
    }

    fn corpus() -> Corpus {
        Corpus::from_texts([
            ("b.c", "void f(int x) { switch (x) { case 1: break; } }"),
            ("a.c", "void g(int x) { switch (x) { default: break; } }"),
        ])
    }

    #[test]
    fn binding_file_syntax() {
        let text = "# comment\nbind switch_default [Situation/Code/Switch|COMPLETENESS]\n\nbind clones [Situation/Code/Source|REDUNDANCY] min_tokens=30 include=src\nbind broken\nfoo\nbind x [nope] \n";
        let (b, d) = parse_bindings("b.cfg", text);
        assert_eq!(b.len(), 2);
        assert_eq!(b[1].params.get("min_tokens").map(String::as_str), Some("30"));
        assert_eq!(b[1].line, 4);
        let lines: Vec<_> = d.iter().map(|d| d.location.line_number().unwrap()).collect();
        assert_eq!(lines, [5, 6, 7]);
    }

    #[test]
    fn manual_fact_cannot_be_bound() {
        let b = CheckerBinding::new("switch_default", FactKey::new("Situation/Code/Data", "APPROPRIATENESS"));
        let err = run_checkers(&model(), &[b], &corpus()).unwrap_err();
        assert!(matches!(err, CheckError::BindingToManualFact { .. }));
    }

    #[test]
    fn unknown_checker_and_param() {
        let fact = FactKey::new("Situation/Code/Switch", "COMPLETENESS");
        let err = run_checkers(&model(), &[CheckerBinding::new("nope", fact.clone())], &corpus());
        assert!(matches!(err, Err(CheckError::UnknownChecker { .. })));
        let b = CheckerBinding::new("switch_default", fact).param("depth", "3");
        let err = run_checkers(&model(), &[b], &corpus());
        assert!(matches!(err, Err(CheckError::UnknownParam { .. })));
    }

    #[test]
    fn results_sorted_with_review_flag_and_notices() {
        let bindings = [
            CheckerBinding::new("clones", FactKey::new("Situation/Code/Source", "REDUNDANCY")).param("min_tokens", "5"),
            CheckerBinding::new("switch_default", FactKey::new("Situation/Code/Switch", "COMPLETENESS")),
        ];
        let run = run_checkers(&model(), &bindings, &corpus()).unwrap();
        let facts: Vec<_> = run.results.iter().map(|r| r.fact.to_string()).collect();
        assert_eq!(facts, ["[Situation/Code/Source|REDUNDANCY]", "[Situation/Code/Switch|COMPLETENESS]"]);
        assert!(run.results[0].needs_review);
        assert!(!run.results[1].needs_review);
        assert_eq!((run.results[1].violations, run.results[1].opportunities), (1, 2));
        assert_eq!(run.results[1].findings[0].location, Location::line("b.c", 1));
        assert!(run.notices.is_empty());

        let run = run_checkers(&model(), &bindings[..1], &corpus()).unwrap();
        assert_eq!(run.notices.len(), 1);
        assert_eq!(run.notices[0].severity, FindingSeverity::Info);
        assert_eq!(run.render_findings().lines().count(), run.results[0].findings.len() + 1);
    }

    #[test]
    fn duplicate_binding_and_bad_min_tokens() {
        let fact = FactKey::new("Situation/Code/Source", "REDUNDANCY");
        let b = CheckerBinding::new("clones", fact.clone());
        assert!(matches!(
            run_checkers(&model(), &[b.clone(), b.clone()], &corpus()),
            Err(CheckError::DuplicateBinding { .. })
        ));
        let bad = b.param("min_tokens", "4");
        assert!(matches!(
            run_checkers(&model(), &[bad], &corpus()),
            Err(CheckError::InvalidParam { .. })
        ));
    }

    #[test]
    fn file_order_does_not_matter() {
        let files = [("x.c", "int a;"), ("w.bm", "Model { }"), ("v.c", "int b;")];
        let mut rev = files;
        rev.reverse();
        let a = Corpus::from_texts(files);
        let b = Corpus::from_texts(rev);
        let paths = |c: &Corpus| c.sources.iter().map(|s| s.path.clone()).collect::<Vec<_>>();
        assert_eq!(paths(&a), paths(&b));
    }
}
