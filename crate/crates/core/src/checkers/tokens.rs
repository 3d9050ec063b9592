use std::collections::BTreeSet;
use std::fmt;

use crate::diag::{Code, Diagnostic, Location};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TokenKind {
    Ident,
    Keyword,
    Number,
    String,
    Punct,
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TokenKind::Ident => "IDENT",
            TokenKind::Keyword => "KEYWORD",
            TokenKind::Number => "NUMBER",
            TokenKind::String => "STRING",
            TokenKind::Punct => "PUNCT",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    /// Source text, quotes included for strings.
    pub text: String,
    /// 1-based line.
    pub line: usize,
    /// 1-based column, in characters.
    pub column: usize,
}

/// Lexical conventions of a source language.
#[derive(Debug, Clone)]
pub struct LangConfig {
    pub line_comment: Vec<String>,
    pub block_comment: Option<(String, String)>,
    pub string_quotes: Vec<char>,
    pub keywords: BTreeSet<String>,
    /// Multi-character operators, matched longest first.
    pub operators: Vec<String>,
    /// Skip lines whose first non-blank character is `#`.
    pub skip_directives: bool,
}

const C_KEYWORDS: &[&str] = &[
    "auto", "bool", "break", "case", "char", "const", "continue", "default", "do", "double",
    "else", "enum", "extern", "float", "for", "goto", "if", "inline", "int", "long", "register",
    "return", "short", "signed", "sizeof", "static", "struct", "switch", "typedef", "union",
    "unsigned", "void", "volatile", "while",
];

const C_OPERATORS: &[&str] = &[
    "<<=", ">>=", "...", "->", "++", "--", "<<", ">>", "<=", ">=", "==", "!=", "&&", "||", "+=",
    "-=", "*=", "/=", "%=", "&=", "|=", "^=", "::",
];

impl LangConfig {
    pub fn c_like() -> Self {
        let mut operators: Vec<String> = C_OPERATORS.iter().map(|s| s.to_string()).collect();
        operators.sort_by_key(|o| std::cmp::Reverse(o.len()));
        LangConfig {
            line_comment: vec!["//".to_string()],
            block_comment: Some(("/*".to_string(), "*/".to_string())),
            string_quotes: vec!['"', '\''],
            keywords: C_KEYWORDS.iter().map(|s| s.to_string()).collect(),
            operators,
            skip_directives: true,
        }
    }
}

fn starts_with_at(chars: &[char], i: usize, pat: &str) -> bool {
    (i..).zip(pat.chars()).all(|(j, p)| chars.get(j) == Some(&p))
}

/// Splits `text` into tokens. Comments, whitespace and (optionally)
/// directive lines are dropped. An unterminated string yields an
/// `UnterminatedString` diagnostic and lexing resumes on the next line.
pub fn tokenize_source(file: &str, text: &str, lang: &LangConfig) -> (Vec<Token>, Vec<Diagnostic>) {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut diags = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let mut at_line_start = true;

    // Advances over `n` characters, keeping line and column in step.
    let advance = |i: &mut usize, line: &mut usize, col: &mut usize, n: usize| {
        for _ in 0..n {
            if chars.get(*i) == Some(&'\n') {
                *line += 1;
                *col = 1;
            } else {
                *col += 1;
            }
            *i += 1;
        }
    };
    let skip_to_eol = |i: &mut usize, col: &mut usize| {
        while *i < chars.len() && chars[*i] != '\n' {
            *i += 1;
            *col += 1;
        }
    };

    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            advance(&mut i, &mut line, &mut col, 1);
            at_line_start = true;
            continue;
        }
        if c.is_whitespace() {
            advance(&mut i, &mut line, &mut col, 1);
            continue;
        }
        if at_line_start && lang.skip_directives && c == '#' {
            skip_to_eol(&mut i, &mut col);
            continue;
        }
        at_line_start = false;
        if lang.line_comment.iter().any(|p| starts_with_at(&chars, i, p)) {
            skip_to_eol(&mut i, &mut col);
            continue;
        }
        if let Some((open, close)) = &lang.block_comment {
            if starts_with_at(&chars, i, open) {
                advance(&mut i, &mut line, &mut col, open.chars().count());
                while i < chars.len() && !starts_with_at(&chars, i, close) {
                    advance(&mut i, &mut line, &mut col, 1);
                }
                let n = close.chars().count().min(chars.len() - i);
                advance(&mut i, &mut line, &mut col, n);
                continue;
            }
        }
        let (start, start_line, start_col) = (i, line, col);
        let kind = if lang.string_quotes.contains(&c) {
            let mut j = i + 1;
            let mut closed = false;
            while j < chars.len() && chars[j] != '\n' {
                if chars[j] == '\\' && chars.get(j + 1).is_some_and(|&n| n != '\n') {
                    j += 2;
                    continue;
                }
                if chars[j] == c {
                    closed = true;
                    j += 1;
                    break;
                }
                j += 1;
            }
            if !closed {
                diags.push(Diagnostic::error(
                    Code::UnterminatedString,
                    Location::line(file, start_line),
                    "unterminated string literal",
                ));
                skip_to_eol(&mut i, &mut col);
                continue;
            }
            let n = j - i;
            advance(&mut i, &mut line, &mut col, n);
            TokenKind::String
        } else if c.is_alphabetic() || c == '_' {
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                advance(&mut i, &mut line, &mut col, 1);
            }
            let word: String = chars[start..i].iter().collect();
            if lang.keywords.contains(&word) {
                TokenKind::Keyword
            } else {
                TokenKind::Ident
            }
        } else if c.is_ascii_digit() {
            while i < chars.len()
                && (chars[i].is_alphanumeric()
                    || chars[i] == '.'
                    || chars[i] == '_'
                    || ((chars[i] == '+' || chars[i] == '-')
                        && matches!(chars[i - 1], 'e' | 'E')
                        && !matches!(chars.get(start + 1), Some('x' | 'X'))))
            {
                advance(&mut i, &mut line, &mut col, 1);
            }
            TokenKind::Number
        } else {
            let n = lang
                .operators
                .iter()
                .find(|o| starts_with_at(&chars, i, o))
                .map_or(1, |o| o.chars().count());
            advance(&mut i, &mut line, &mut col, n);
            TokenKind::Punct
        };
        tokens.push(Token {
            kind,
            text: chars[start..i].iter().collect(),
            line: start_line,
            column: start_col,
        });
    }
    (tokens, diags)
}
