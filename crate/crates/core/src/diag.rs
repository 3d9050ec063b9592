//! Diagnostics shared by the parsers, the validator and the checkers.
//!
//! Every diagnostic carries a code from the closed [`Code`] set. Reports
//! render one diagnostic per line as
//! `SEVERITY<TAB>CODE<TAB>location<TAB>message`.

use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Severity {
    Error,
    Warning,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Error => "ERROR",
            Severity::Warning => "WARNING",
        })
    }
}

/// The closed set of diagnostic codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Code {
    // model files
    SyntaxError,
    UnknownReference,
    DuplicateDeclaration,
    InvalidDeclaration,
    // structural validation
    DanglingReference,
    AttributeNotEffective,
    NonAtomicImpact,
    EmptyJustification,
    UnusedAttribute,
    FactlessEntity,
    // cross-checks
    ContradictoryImpact,
    MissingImpact,
    InheritedAttributeImbalance,
    // block files and source tokens
    UnbalancedBraces,
    MalformedValue,
    UnterminatedString,
    // documents
    EmptyView,
}

impl Code {
    pub const ALL: [Code; 17] = [
        Code::SyntaxError,
        Code::UnknownReference,
        Code::DuplicateDeclaration,
        Code::InvalidDeclaration,
        Code::DanglingReference,
        Code::AttributeNotEffective,
        Code::NonAtomicImpact,
        Code::EmptyJustification,
        Code::UnusedAttribute,
        Code::FactlessEntity,
        Code::ContradictoryImpact,
        Code::MissingImpact,
        Code::InheritedAttributeImbalance,
        Code::UnbalancedBraces,
        Code::MalformedValue,
        Code::UnterminatedString,
        Code::EmptyView,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Code::SyntaxError => "SyntaxError",
            Code::UnknownReference => "UnknownReference",
            Code::DuplicateDeclaration => "DuplicateDeclaration",
            Code::InvalidDeclaration => "InvalidDeclaration",
            Code::DanglingReference => "DanglingReference",
            Code::AttributeNotEffective => "AttributeNotEffective",
            Code::NonAtomicImpact => "NonAtomicImpact",
            Code::EmptyJustification => "EmptyJustification",
            Code::UnusedAttribute => "UnusedAttribute",
            Code::FactlessEntity => "FactlessEntity",
            Code::ContradictoryImpact => "ContradictoryImpact",
            Code::MissingImpact => "MissingImpact",
            Code::InheritedAttributeImbalance => "InheritedAttributeImbalance",
            Code::UnbalancedBraces => "UnbalancedBraces",
            Code::MalformedValue => "MalformedValue",
            Code::UnterminatedString => "UnterminatedString",
            Code::EmptyView => "EmptyView",
        }
    }
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl PartialOrd for Code {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Code {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.as_str().cmp(other.as_str())
    }
}

/// Where a diagnostic points: a line in a file, or a model element when
/// the finding comes from an in-memory model.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Location {
    Line { file: String, line: usize },
    Element(String),
}

impl Location {
    pub fn line(file: impl Into<String>, line: usize) -> Self {
        debug_assert!(line >= 1);
        Location::Line {
            file: file.into(),
            line: line.max(1),
        }
    }

    pub fn element(path: impl Into<String>) -> Self {
        Location::Element(path.into())
    }

    pub fn line_number(&self) -> Option<usize> {
        match self {
            Location::Line { line, .. } => Some(*line),
            Location::Element(_) => None,
        }
    }
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::Line { file, line } => write!(f, "{file}:{line}"),
            Location::Element(path) => f.write_str(path),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: Code,
    pub location: Location,
    pub message: String,
}

impl Diagnostic {
    pub fn error(code: Code, location: Location, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Error,
            code,
            location,
            message: message.into(),
        }
    }

    pub fn warning(code: Code, location: Location, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Warning,
            code,
            location,
            message: message.into(),
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}\t{}\t{}\t{}",
            self.severity,
            self.code,
            self.location,
            self.message.replace(['\t', '\n'], " ")
        )
    }
}

/// An ordered set of diagnostics with per-code counts.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    diagnostics: Vec<Diagnostic>,
    summary: BTreeMap<Code, usize>,
}

impl ValidationReport {
    pub fn new(diagnostics: impl IntoIterator<Item = Diagnostic>) -> Self {
        let mut report = ValidationReport::default();
        report.extend(diagnostics);
        report
    }

    pub fn extend(&mut self, diagnostics: impl IntoIterator<Item = Diagnostic>) {
        for d in diagnostics {
            *self.summary.entry(d.code).or_insert(0) += 1;
            self.diagnostics.push(d);
        }
        self.diagnostics.sort_by(|a, b| {
            (a.code, &a.location, a.severity, &a.message).cmp(&(
                b.code,
                &b.location,
                b.severity,
                &b.message,
            ))
        });
    }

    pub fn merge(&mut self, other: ValidationReport) {
        self.extend(other.diagnostics);
    }

    pub fn diagnostics(&self) -> &[Diagnostic] {
        &self.diagnostics
    }

    pub fn summary(&self) -> &BTreeMap<Code, usize> {
        &self.summary
    }

    pub fn count(&self, code: Code) -> usize {
        self.summary.get(&code).copied().unwrap_or(0)
    }

    pub fn with_code(&self, code: Code) -> impl Iterator<Item = &Diagnostic> {
        self.diagnostics.iter().filter(move |d| d.code == code)
    }

    pub fn error_count(&self) -> usize {
        self.diagnostics.iter().filter(|d| d.is_error()).count()
    }

    pub fn warning_count(&self) -> usize {
        self.diagnostics.len() - self.error_count()
    }

    pub fn is_empty(&self) -> bool {
        self.diagnostics.is_empty()
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for d in &self.diagnostics {
            out.push_str(&d.to_string());
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_orders_by_code_then_location() {
        let report = ValidationReport::new([
            Diagnostic::warning(Code::UnusedAttribute, Location::element("B"), "b"),
            Diagnostic::error(Code::DanglingReference, Location::line("m.qmm", 9), "x"),
            Diagnostic::warning(Code::UnusedAttribute, Location::element("A"), "a"),
            Diagnostic::error(Code::DanglingReference, Location::line("m.qmm", 10), "y"),
        ]);
        let order: Vec<_> = report.diagnostics().iter().map(|d| d.message.as_str()).collect();
        assert_eq!(order, ["x", "y", "a", "b"]);
        assert_eq!(report.count(Code::UnusedAttribute), 2);
        assert_eq!(report.summary().values().sum::<usize>(), report.diagnostics().len());
    }

    #[test]
    fn line_format_is_tab_separated() {
        let d = Diagnostic::error(Code::SyntaxError, Location::line("a.qmm", 3), "bad\ttoken");
        assert_eq!(d.to_string(), "ERROR\tSyntaxError\ta.qmm:3\tbad token");
    }

    #[test]
    fn code_names_are_unique() {
        let mut names: Vec<_> = Code::ALL.iter().map(|c| c.as_str()).collect();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), Code::ALL.len());
    }
}
