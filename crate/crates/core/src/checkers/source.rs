use std::collections::BTreeMap;
use std::fmt;

use crate::diag::{Code, Diagnostic, Location};

use super::tokens::{Token, TokenKind};
use super::Outcome;

/// Counts `switch` statements and flags those without a `default` label
/// of their own. Labels inside nested switches belong to the inner one.
pub fn switch_default(file: &str, tokens: &[Token]) -> Outcome {
    struct Open {
        line: usize,
        body_depth: usize,
        has_default: bool,
    }
    let mut out = Outcome::default();
    let mut stack: Vec<Open> = Vec::new();
    let mut depth = 0usize;
    let mut i = 0;
    while i < tokens.len() {
        let t = &tokens[i];
        match (t.kind, t.text.as_str()) {
            (TokenKind::Keyword, "switch") => {
                match switch_body_start(tokens, i) {
                    Ok(brace) => {
                        depth += 1;
                        stack.push(Open {
                            line: t.line,
                            body_depth: depth,
                            has_default: false,
                        });
                        i = brace + 1;
                    }
                    Err(code) => {
                        out.diagnostics.push(Diagnostic::error(
                            code,
                            Location::line(file, t.line),
                            "switch statement skipped: cannot match its braces",
                        ));
                        i += 1;
                    }
                }
                continue;
            }
            (TokenKind::Keyword, "default")
                if tokens.get(i + 1).is_some_and(|n| n.text == ":") =>
            {
                if let Some(top) = stack.last_mut() {
                    top.has_default = true;
                }
            }
            (TokenKind::Punct, "{") => depth += 1,
            (TokenKind::Punct, "}") => {
                if let Some(done) = stack.pop_if(|s| s.body_depth == depth) {
                    out.opportunities += 1;
                    if !done.has_default {
                        out.violation(
                            Location::line(file, done.line),
                            "switch statement without a default case",
                        );
                    }
                }
                depth = depth.saturating_sub(1);
            }
            _ => {}
        }
        i += 1;
    }
    for open in stack {
        out.diagnostics.push(Diagnostic::error(
            Code::UnbalancedBraces,
            Location::line(file, open.line),
            "switch statement skipped: body is never closed",
        ));
    }
    out
}

/// Index of the `{` opening the body of the switch at `at`.
fn switch_body_start(tokens: &[Token], at: usize) -> Result<usize, Code> {
    let mut i = at + 1;
    if tokens.get(i).map(|t| t.text.as_str()) != Some("(") {
        return Err(Code::SyntaxError);
    }
    let mut parens = 0usize;
    while i < tokens.len() {
        match tokens[i].text.as_str() {
            "(" => parens += 1,
            ")" => {
                parens -= 1;
                if parens == 0 {
                    break;
                }
            }
            "{" | "}" | ";" => return Err(Code::UnbalancedBraces),
            _ => {}
        }
        i += 1;
    }
    if i >= tokens.len() {
        return Err(Code::UnbalancedBraces);
    }
    match tokens.get(i + 1) {
        Some(t) if t.text == "{" => Ok(i + 1),
        _ => Err(Code::SyntaxError),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum IdentStyle {
    /// Single lowercase word, compatible with both snake and camel case.
    Neutral,
    LowerSnake,
    CamelCase,
    UpperSnake,
    Mixed,
}

impl IdentStyle {
    pub fn name(self) -> &'static str {
        match self {
            IdentStyle::Neutral => "neutral",
            IdentStyle::LowerSnake => "lower_snake",
            IdentStyle::CamelCase => "camelCase",
            IdentStyle::UpperSnake => "UPPER_SNAKE",
            IdentStyle::Mixed => "Mixed",
        }
    }

    fn compatible_with(self, dominant: IdentStyle) -> bool {
        self == dominant
            || (self == IdentStyle::Neutral
                && matches!(dominant, IdentStyle::LowerSnake | IdentStyle::CamelCase))
    }
}

impl fmt::Display for IdentStyle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Style class of an identifier; leading and trailing underscores are
/// ignored.
pub fn classify_identifier(ident: &str) -> IdentStyle {
    let core = ident.trim_matches('_');
    let lower_word = |w: &str| {
        w.starts_with(|c: char| c.is_ascii_lowercase())
            && w.chars().all(|c| c.is_ascii_lowercase() || c.is_ascii_digit())
    };
    let upper_word = |w: &str| {
        w.starts_with(|c: char| c.is_ascii_uppercase())
            && w.chars().all(|c| c.is_ascii_uppercase() || c.is_ascii_digit())
    };
    if core.is_empty() {
        return IdentStyle::Mixed;
    }
    if lower_word(core) {
        return IdentStyle::Neutral;
    }
    if core.contains('_') {
        let parts: Vec<&str> = core.split('_').collect();
        if parts.iter().all(|p| !p.is_empty() && p.chars().all(|c| c.is_ascii_lowercase() || c.is_ascii_digit()))
            && lower_word(parts[0])
        {
            return IdentStyle::LowerSnake;
        }
        if parts.iter().all(|p| !p.is_empty() && p.chars().all(|c| c.is_ascii_uppercase() || c.is_ascii_digit()))
            && upper_word(parts[0])
        {
            return IdentStyle::UpperSnake;
        }
        return IdentStyle::Mixed;
    }
    if upper_word(core) {
        return IdentStyle::UpperSnake;
    }
    if core.starts_with(|c: char| c.is_ascii_lowercase()) && core.chars().all(|c| c.is_ascii_alphanumeric()) {
        return IdentStyle::CamelCase;
    }
    IdentStyle::Mixed
}

/// Checks that identifiers follow one naming style. Each distinct
/// identifier counts once, located at its first occurrence. The dominant
/// style is the most frequent non-neutral class; ties go to the class whose
/// name sorts first.
pub fn identifier_consistency(identifiers: &[(String, Location)]) -> Outcome {
    let mut first: BTreeMap<&str, &Location> = BTreeMap::new();
    for (name, loc) in identifiers {
        first.entry(name).or_insert(loc);
    }
    let mut counts: BTreeMap<IdentStyle, usize> = BTreeMap::new();
    for name in first.keys() {
        let style = classify_identifier(name);
        if style != IdentStyle::Neutral {
            *counts.entry(style).or_default() += 1;
        }
    }
    let mut out = Outcome {
        opportunities: first.len(),
        ..Outcome::default()
    };
    let max = counts.values().copied().max().unwrap_or(0);
    let dominant = counts
        .iter()
        .filter(|(_, &c)| c == max)
        .map(|(&s, _)| s)
        .min_by_key(|s| s.name());
    let Some(dominant) = dominant else {
        return out;
    };
    for (name, loc) in first {
        let style = classify_identifier(name);
        if !style.compatible_with(dominant) {
            out.violation(
                loc.clone(),
                format!("identifier `{name}` is {style}, dominant style is {dominant}"),
            );
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::checkers::tokens::{tokenize_source, LangConfig};

    fn run_switch(src: &str) -> Outcome {
        let (toks, _) = tokenize_source("s.c", src, &LangConfig::c_like());
        switch_default("s.c", &toks)
    }

    #[test]
    fn switch_with_default() {
        let o = run_switch("switch (x) { case 1: break; default: break; }");
        assert_eq!((o.violations, o.opportunities), (0, 1));
    }

    #[test]
    fn two_switches_one_missing() {
        let o = run_switch(
            "void f(int x) {\n  switch (x) { default: ; }\n  switch (x) {\n    case 1: break;\n  }\n}\n",
        );
        assert_eq!((o.violations, o.opportunities), (1, 2));
        assert_eq!(o.findings[0].0, Location::line("s.c", 3));
    }

    #[test]
    fn nested_switch_counts_against_inner_only() {
        let src = "\
switch (a) {
  case 1:
    switch (b) {
      case 2: { break; }
    }
    break;
  default: break;
}
";
        let o = run_switch(src);
        assert_eq!((o.violations, o.opportunities), (1, 2));
        assert_eq!(o.findings[0].0, Location::line("s.c", 3));
    }

    #[test]
    fn default_inside_block_of_case_belongs_to_switch() {
        let o = run_switch("switch (a) { case 1: { x(); } { default: y(); } }");
        assert_eq!((o.violations, o.opportunities), (0, 1));
    }

    #[test]
    fn unbalanced_switch_is_skipped() {
        let o = run_switch("switch (a) { case 1: break;\n");
        assert_eq!(o.opportunities, 0);
        assert_eq!(o.diagnostics.len(), 1);
        assert_eq!(o.diagnostics[0].code, Code::UnbalancedBraces);
    }

    #[test]
    fn classes() {
        use IdentStyle::*;
        for (id, style) in [
            ("x", Neutral),
            ("count2", Neutral),
            ("max_value", LowerSnake),
            ("_private_x", LowerSnake),
            ("maxValue", CamelCase),
            ("getHTTPCode", CamelCase),
            ("MAX_VALUE", UpperSnake),
            ("N", UpperSnake),
            ("MaxValue", Mixed),
            ("max_Value", Mixed),
            ("a__b", Mixed),
        ] {
            assert_eq!(classify_identifier(id), style, "{id}");
        }
    }

    fn ids(names: &[&str]) -> Vec<(String, Location)> {
        names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.to_string(), Location::line("n.c", i + 1)))
            .collect()
    }

    #[test]
    fn one_outlier() {
        let o = identifier_consistency(&ids(&[
            "aOne", "aTwo", "aThree", "aFour", "aFive", "aSix", "aSeven", "aEight", "aNine",
            "bad_name",
        ]));
        assert_eq!((o.violations, o.opportunities), (1, 10));
        assert!(o.findings[0].1.contains("bad_name"));
    }

    #[test]
    fn tie_flags_later_class() {
        let o = identifier_consistency(&ids(&["one_a", "two_b", "oneA", "twoB", "plain"]));
        // "camelCase" sorts before "lower_snake"
        assert_eq!((o.violations, o.opportunities), (2, 5));
        assert!(o.findings.iter().all(|f| f.1.starts_with("identifier `one_a`") || f.1.starts_with("identifier `two_b`")));
    }

    #[test]
    fn repeated_names_count_once() {
        let o = identifier_consistency(&ids(&["aB", "aB", "aB", "c_d"]));
        assert_eq!((o.violations, o.opportunities), (1, 2));
    }
}
