//! Line-oriented text format for quality models (`.qmm`).
//!
//! ```text
//! model "Simulink maintainability"
//! attribute EXISTENCE "presence of the element"
//! entity Situation/Infrastructure/Debugger "interactive debugger"
//! activity Maintenance/Analysis/FaultDiagnostics
//! attach EXISTENCE to Situation/Infrastructure
//! fact [Situation/Infrastructure/Debugger|EXISTENCE] category=auto "a debugger is available"
//! impact [Situation/Infrastructure/Debugger|EXISTENCE] -> Maintenance/Analysis/FaultDiagnostics : + "stepping through code"
//! ```
//!
//! One statement per line, `#` starts a comment, strings are double-quoted
//! with backslash escapes (`\\`, `\"`, `\n`, `\t`, `\r`). Statements apply
//! in file order, so forward references are errors. Parsing never stops at
//! the first problem: every bad line yields its own diagnostic.

use std::fmt::Write as _;

use crate::diag::{Code, Diagnostic, Location};
use crate::model::{
    is_attribute_name, is_path, Category, FactKey, ModelError, QualityModel, Sign,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Statement {
    Model {
        name: String,
    },
    Attribute {
        name: String,
        description: String,
    },
    Entity {
        path: String,
        description: String,
    },
    Activity {
        path: String,
        description: String,
    },
    Attach {
        attribute: String,
        entity: String,
    },
    Fact {
        fact: FactKey,
        category: Category,
        description: String,
    },
    Impact {
        fact: FactKey,
        activity: String,
        sign: Sign,
        justification: String,
    },
}

/// A statement with the 1-based line it came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocatedStatement {
    pub line: usize,
    pub statement: Statement,
}

/// Raw text plus its parsed statements.
#[derive(Debug, Clone)]
pub struct SourceModelFile {
    pub file: String,
    pub text: String,
    pub statements: Vec<LocatedStatement>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Word(String),
    Str(String),
    LBracket,
    RBracket,
    Pipe,
    Arrow,
    Colon,
    Equals,
    Plus,
    Minus,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Word(w) => format!("`{w}`"),
            Tok::Str(_) => "string".to_string(),
            Tok::LBracket => "`[`".to_string(),
            Tok::RBracket => "`]`".to_string(),
            Tok::Pipe => "`|`".to_string(),
            Tok::Arrow => "`->`".to_string(),
            Tok::Colon => "`:`".to_string(),
            Tok::Equals => "`=`".to_string(),
            Tok::Plus => "`+`".to_string(),
            Tok::Minus => "`-`".to_string(),
        }
    }
}

fn is_word_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '-' || c == '/'
}

fn lex_line(line: &str) -> Result<Vec<Tok>, String> {
    let mut toks = Vec::new();
    let mut chars = line.char_indices().peekable();
    while let Some(&(_, c)) = chars.peek() {
        match c {
            c if c.is_whitespace() => {
                chars.next();
            }
            '#' => break,
            '"' => {
                chars.next();
                let mut s = String::new();
                let mut closed = false;
                while let Some((_, c)) = chars.next() {
                    match c {
                        '"' => {
                            closed = true;
                            break;
                        }
                        '\\' => match chars.next() {
                            Some((_, '\\')) => s.push('\\'),
                            Some((_, '"')) => s.push('"'),
                            Some((_, 'n')) => s.push('\n'),
                            Some((_, 't')) => s.push('\t'),
                            Some((_, 'r')) => s.push('\r'),
                            Some((_, other)) => return Err(format!("unknown escape `\\{other}`")),
                            None => break,
                        },
                        c => s.push(c),
                    }
                }
                if !closed {
                    return Err("unterminated string".to_string());
                }
                toks.push(Tok::Str(s));
            }
            '[' | ']' | '|' | ':' | '=' | '+' => {
                chars.next();
                toks.push(match c {
                    '[' => Tok::LBracket,
                    ']' => Tok::RBracket,
                    '|' => Tok::Pipe,
                    ':' => Tok::Colon,
                    '=' => Tok::Equals,
                    _ => Tok::Plus,
                });
            }
            '-' => {
                chars.next();
                if matches!(chars.peek(), Some((_, '>'))) {
                    chars.next();
                    toks.push(Tok::Arrow);
                } else {
                    toks.push(Tok::Minus);
                }
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut w = String::new();
                while let Some(&(i, c)) = chars.peek() {
                    if !is_word_char(c) {
                        break;
                    }
                    // `->` ends a word
                    if c == '-' && line[i + 1..].starts_with('>') {
                        break;
                    }
                    w.push(c);
                    chars.next();
                }
                toks.push(Tok::Word(w));
            }
            other => return Err(format!("unexpected character `{other}`")),
        }
    }
    Ok(toks)
}

struct Cursor {
    toks: Vec<Tok>,
    pos: usize,
}

impl Cursor {
    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn expect(&mut self, want: Tok) -> Result<(), String> {
        match self.next() {
            Some(t) if t == want => Ok(()),
            Some(t) => Err(format!("expected {}, found {}", want.describe(), t.describe())),
            None => Err(format!("expected {}, found end of line", want.describe())),
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<(), String> {
        self.expect(Tok::Word(kw.to_string()))
    }

    fn word(&mut self, what: &str) -> Result<String, String> {
        match self.next() {
            Some(Tok::Word(w)) => Ok(w),
            Some(t) => Err(format!("expected {what}, found {}", t.describe())),
            None => Err(format!("expected {what}, found end of line")),
        }
    }

    fn path(&mut self) -> Result<String, String> {
        let w = self.word("a path")?;
        if is_path(&w) {
            Ok(w)
        } else {
            Err(format!("malformed path `{w}`"))
        }
    }

    fn name(&mut self) -> Result<String, String> {
        let w = self.word("an attribute name")?;
        if is_attribute_name(&w) {
            Ok(w)
        } else {
            Err(format!("malformed attribute name `{w}` (expected uppercase)"))
        }
    }

    fn string(&mut self) -> Result<String, String> {
        match self.next() {
            Some(Tok::Str(s)) => Ok(s),
            Some(t) => Err(format!("expected a string, found {}", t.describe())),
            None => Err("expected a string, found end of line".to_string()),
        }
    }

    fn optional_string(&mut self) -> Result<String, String> {
        if self.peek().is_some() {
            self.string()
        } else {
            Ok(String::new())
        }
    }

    fn fact_ref(&mut self) -> Result<FactKey, String> {
        self.expect(Tok::LBracket)?;
        let entity = self.path()?;
        self.expect(Tok::Pipe)?;
        let attribute = self.name()?;
        self.expect(Tok::RBracket)?;
        Ok(FactKey::new(entity, attribute))
    }

    fn end(&self) -> Result<(), String> {
        match self.peek() {
            None => Ok(()),
            Some(t) => Err(format!("unexpected {} after statement", t.describe())),
        }
    }
}

fn parse_statement(toks: Vec<Tok>) -> Result<Statement, String> {
    let mut c = Cursor { toks, pos: 0 };
    let kw = c.word("a statement keyword")?;
    let stmt = match kw.as_str() {
        "model" => Statement::Model { name: c.string()? },
        "attribute" => Statement::Attribute {
            name: c.name()?,
            description: c.optional_string()?,
        },
        "entity" => Statement::Entity {
            path: c.path()?,
            description: c.optional_string()?,
        },
        "activity" => Statement::Activity {
            path: c.path()?,
            description: c.optional_string()?,
        },
        "attach" => {
            let attribute = c.name()?;
            c.keyword("to")?;
            Statement::Attach {
                attribute,
                entity: c.path()?,
            }
        }
        "fact" => {
            let fact = c.fact_ref()?;
            c.keyword("category")?;
            c.expect(Tok::Equals)?;
            let cat = c.word("a category")?;
            let category = Category::parse(&cat)
                .ok_or_else(|| format!("unknown category `{cat}` (expected auto, manual or semi)"))?;
            Statement::Fact {
                fact,
                category,
                description: c.optional_string()?,
            }
        }
        "impact" => {
            let fact = c.fact_ref()?;
            c.expect(Tok::Arrow)?;
            let activity = c.path()?;
            c.expect(Tok::Colon)?;
            let sign = match c.next() {
                Some(Tok::Plus) => Sign::Positive,
                Some(Tok::Minus) => Sign::Negative,
                Some(t) => return Err(format!("expected `+` or `-`, found {}", t.describe())),
                None => return Err("expected `+` or `-`, found end of line".to_string()),
            };
            Statement::Impact {
                fact,
                activity,
                sign,
                justification: c.string()?,
            }
        }
        other => return Err(format!("unknown statement `{other}`")),
    };
    c.end()?;
    Ok(stmt)
}

/// Parses statements without applying them. Each malformed line yields one
/// `SyntaxError` diagnostic.
pub fn parse_statements(file: &str, text: &str) -> (SourceModelFile, Vec<Diagnostic>) {
    let mut statements = Vec::new();
    let mut diags = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let toks = match lex_line(line) {
            Ok(t) => t,
            Err(msg) => {
                diags.push(Diagnostic::error(Code::SyntaxError, Location::line(file, line_no), msg));
                continue;
            }
        };
        if toks.is_empty() {
            continue;
        }
        match parse_statement(toks) {
            Ok(statement) => statements.push(LocatedStatement {
                line: line_no,
                statement,
            }),
            Err(msg) => {
                diags.push(Diagnostic::error(Code::SyntaxError, Location::line(file, line_no), msg))
            }
        }
    }
    (
        SourceModelFile {
            file: file.to_string(),
            text: text.to_string(),
            statements,
        },
        diags,
    )
}

fn code_for(err: &ModelError) -> Code {
    match err {
        ModelError::MalformedPath(_) | ModelError::MalformedName(_) => Code::SyntaxError,
        ModelError::MissingParent(_)
        | ModelError::UnknownEntity(_)
        | ModelError::UnknownActivity(_)
        | ModelError::UnknownAttribute(_)
        | ModelError::UnknownFact(_) => Code::UnknownReference,
        ModelError::DuplicateSibling(_)
        | ModelError::DuplicateAttribute(_)
        | ModelError::DuplicateFact(_)
        | ModelError::DuplicateImpact(_) => Code::DuplicateDeclaration,
        ModelError::RedundantAttachment { .. }
        | ModelError::AttributeNotEffective { .. }
        | ModelError::NonAtomicFact(_)
        | ModelError::NonAtomicActivity(_)
        | ModelError::EmptyJustification(_)
        | ModelError::ParentHasImpacts(_) => Code::InvalidDeclaration,
    }
}

/// Applies parsed statements in order. Rejected statements become
/// diagnostics and are skipped.
pub fn build_model(source: &SourceModelFile) -> (QualityModel, Vec<Diagnostic>) {
    let mut model = QualityModel::new("");
    let mut diags = Vec::new();
    let mut named_at: Option<usize> = None;
    for located in &source.statements {
        let loc = || Location::line(&source.file, located.line);
        let result = match &located.statement {
            Statement::Model { name } => {
                if let Some(first) = named_at {
                    diags.push(Diagnostic::error(
                        Code::DuplicateDeclaration,
                        loc(),
                        format!("model name already declared on line {first}"),
                    ));
                } else {
                    named_at = Some(located.line);
                    model.set_name(name.clone());
                }
                Ok(())
            }
            Statement::Attribute { name, description } => {
                model.define_attribute(name, description).map(|_| ())
            }
            Statement::Entity { path, description } => {
                model.add_entity(path, description).map(|_| ())
            }
            Statement::Activity { path, description } => {
                model.add_activity(path, description).map(|_| ())
            }
            Statement::Attach { attribute, entity } => model.attach_attribute(entity, attribute),
            Statement::Fact {
                fact,
                category,
                description,
            } => model
                .declare_fact(&fact.entity, &fact.attribute, *category, description)
                .map(|_| ()),
            Statement::Impact {
                fact,
                activity,
                sign,
                justification,
            } => model
                .declare_impact(fact, activity, *sign, justification)
                .map(|_| ()),
        };
        if let Err(e) = result {
            diags.push(Diagnostic::error(code_for(&e), loc(), e.to_string()));
        }
    }
    (model, diags)
}

/// Parses and applies a model file. The model is referentially valid when
/// no ERROR diagnostic is returned.
pub fn parse_model(file: &str, text: &str) -> (QualityModel, Vec<Diagnostic>) {
    let (source, mut diags) = parse_statements(file, text);
    let (model, more) = build_model(&source);
    diags.extend(more);
    diags.sort_by_key(|d| d.location.line_number());
    (model, diags)
}

pub fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '"' => out.push_str("\\\""),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn with_description(line: String, description: &str) -> String {
    if description.is_empty() {
        line
    } else {
        format!("{line} {}", quote(description))
    }
}

/// Canonical text form. Declarations are grouped (attributes, entities,
/// activities, attachments, facts, impacts); trees are written depth-first
/// and everything else is sorted by path, then name.
pub fn serialize_model(model: &QualityModel) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "model {}", quote(model.name()));

    let section = |out: &mut String, lines: Vec<String>| {
        if !lines.is_empty() {
            out.push('\n');
            for l in lines {
                out.push_str(&l);
                out.push('\n');
            }
        }
    };

    section(
        &mut out,
        model
            .attributes()
            .map(|a| with_description(format!("attribute {}", a.name), &a.description))
            .collect(),
    );
    section(
        &mut out,
        model
            .entities()
            .depth_first()
            .iter()
            .filter(|n| !n.is_root())
            .map(|n| with_description(format!("entity {}", n.path()), n.description()))
            .collect(),
    );
    section(
        &mut out,
        model
            .activities()
            .depth_first()
            .iter()
            .filter(|n| !n.is_root())
            .map(|n| with_description(format!("activity {}", n.path()), n.description()))
            .collect(),
    );
    let mut attachments: Vec<(&str, &str)> = model
        .attributes()
        .flat_map(|a| a.attachments.iter().map(move |p| (p.as_str(), a.name.as_str())))
        .collect();
    attachments.sort();
    section(
        &mut out,
        attachments
            .into_iter()
            .map(|(path, name)| format!("attach {name} to {path}"))
            .collect(),
    );
    section(
        &mut out,
        model
            .facts()
            .map(|f| {
                with_description(
                    format!("fact {} category={}", f.key, f.category),
                    &f.description,
                )
            })
            .collect(),
    );
    section(
        &mut out,
        model
            .impacts()
            .map(|i| {
                format!(
                    "impact {} -> {} : {} {}",
                    i.key.fact,
                    i.key.activity,
                    i.sign,
                    quote(&i.justification)
                )
            })
            .collect(),
    );
    out
}
