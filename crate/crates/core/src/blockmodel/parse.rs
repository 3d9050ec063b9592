use crate::diag::{Code, Diagnostic, Location};

use super::{BlockNode, BlockTree, Value};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Str(String),
    Num(f64),
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Comma,
    Bad(String),
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
}

fn lex(text: &str) -> Vec<Spanned> {
    let mut out = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let push = |out: &mut Vec<Spanned>, tok| out.push(Spanned { tok, line: line_no });
            match c {
                c if c.is_whitespace() => i += 1,
                '#' => break,
                '{' | '}' | '[' | ']' | ',' => {
                    push(
                        &mut out,
                        match c {
                            '{' => Tok::LBrace,
                            '}' => Tok::RBrace,
                            '[' => Tok::LBracket,
                            ']' => Tok::RBracket,
                            _ => Tok::Comma,
                        },
                    );
                    i += 1;
                }
                '"' => {
                    i += 1;
                    let mut s = String::new();
                    let mut closed = false;
                    while i < chars.len() {
                        match chars[i] {
                            '"' => {
                                closed = true;
                                i += 1;
                                break;
                            }
                            '\\' if i + 1 < chars.len() => {
                                s.push(match chars[i + 1] {
                                    'n' => '\n',
                                    't' => '\t',
                                    'r' => '\r',
                                    other => other,
                                });
                                i += 2;
                            }
                            other => {
                                s.push(other);
                                i += 1;
                            }
                        }
                    }
                    push(
                        &mut out,
                        if closed {
                            Tok::Str(s)
                        } else {
                            Tok::Bad("unterminated string".to_string())
                        },
                    );
                }
                c if c.is_ascii_digit() || c == '-' || c == '.' => {
                    let start = i;
                    i += 1;
                    while i < chars.len()
                        && (chars[i].is_ascii_alphanumeric()
                            || chars[i] == '.'
                            || ((chars[i] == '-' || chars[i] == '+')
                                && matches!(chars[i - 1], 'e' | 'E')))
                    {
                        i += 1;
                    }
                    let lit: String = chars[start..i].iter().collect();
                    push(&mut out, number(&lit));
                }
                c if c.is_ascii_alphabetic() || c == '_' => {
                    let start = i;
                    while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                        i += 1;
                    }
                    push(&mut out, Tok::Ident(chars[start..i].iter().collect()));
                }
                other => {
                    push(&mut out, Tok::Bad(format!("unexpected character `{other}`")));
                    i += 1;
                }
            }
        }
    }
    out
}

/// `-?digits(.digits)?([eE][+-]?digits)?`, finite.
fn number(lit: &str) -> Tok {
    let bytes = lit.as_bytes();
    let mut i = 0;
    let digits = |i: &mut usize| {
        let s = *i;
        while *i < bytes.len() && bytes[*i].is_ascii_digit() {
            *i += 1;
        }
        *i > s
    };
    if bytes.first() == Some(&b'-') {
        i += 1;
    }
    let mut ok = digits(&mut i);
    if ok && i < bytes.len() && bytes[i] == b'.' {
        i += 1;
        ok = digits(&mut i);
    }
    if ok && i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
        i += 1;
        if i < bytes.len() && (bytes[i] == b'+' || bytes[i] == b'-') {
            i += 1;
        }
        ok = digits(&mut i);
    }
    match lit.parse::<f64>() {
        Ok(v) if ok && i == bytes.len() && v.is_finite() => Tok::Num(v),
        _ => Tok::Bad(format!("malformed number `{lit}`")),
    }
}

struct Parser<'a> {
    file: &'a str,
    toks: Vec<Spanned>,
    pos: usize,
    diags: Vec<Diagnostic>,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Spanned> {
        self.toks.get(self.pos)
    }

    fn peek_tok(&self, ahead: usize) -> Option<&Tok> {
        self.toks.get(self.pos + ahead).map(|s| &s.tok)
    }

    fn bump(&mut self) -> Option<Spanned> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn error(&mut self, code: Code, line: usize, msg: impl Into<String>) {
        self.diags
            .push(Diagnostic::error(code, Location::line(self.file, line), msg));
    }

    fn file(&mut self) -> Vec<BlockNode> {
        let mut roots = Vec::new();
        while let Some(t) = self.peek().cloned() {
            match (&t.tok, self.peek_tok(1)) {
                (Tok::Ident(_), Some(Tok::LBrace)) => roots.push(self.block()),
                (Tok::RBrace, _) => {
                    self.error(Code::UnbalancedBraces, t.line, "unmatched `}`");
                    self.bump();
                }
                (Tok::Bad(msg), _) => {
                    let msg = msg.clone();
                    self.error(Code::MalformedValue, t.line, msg);
                    self.bump();
                }
                _ => {
                    self.error(Code::SyntaxError, t.line, "expected a block");
                    self.bump();
                }
            }
        }
        roots
    }

    /// Parses `IDENT {` ... `}`. The caller guarantees the first two tokens.
    fn block(&mut self) -> BlockNode {
        let head = self.bump().expect("ident");
        self.bump(); // `{`
        let Tok::Ident(kind) = head.tok else {
            unreachable!()
        };
        let mut node = BlockNode {
            kind,
            entries: Vec::new(),
            children: Vec::new(),
            line: head.line,
        };
        loop {
            let Some(t) = self.peek().cloned() else {
                self.error(
                    Code::UnbalancedBraces,
                    node.line,
                    format!("block `{}` is never closed", node.kind),
                );
                return node;
            };
            match (&t.tok, self.peek_tok(1)) {
                (Tok::RBrace, _) => {
                    self.bump();
                    return node;
                }
                (Tok::Ident(_), Some(Tok::LBrace)) => {
                    let child = self.block();
                    node.children.push(child);
                }
                (Tok::Ident(key), _) => {
                    let key = key.clone();
                    self.bump();
                    match self.value() {
                        Ok(v) => node.entries.push((key, v)),
                        Err((line, msg)) => {
                            self.error(Code::MalformedValue, line, msg);
                            self.skip_rest_of_block(&node);
                            return node;
                        }
                    }
                }
                (Tok::Bad(msg), _) => {
                    let msg = msg.clone();
                    self.error(Code::MalformedValue, t.line, msg);
                    self.skip_rest_of_block(&node);
                    return node;
                }
                _ => {
                    self.error(Code::SyntaxError, t.line, "expected a key or a block");
                    self.skip_rest_of_block(&node);
                    return node;
                }
            }
        }
    }

    /// Error recovery: consume tokens up to and including the brace that
    /// closes the current block.
    fn skip_rest_of_block(&mut self, node: &BlockNode) {
        let mut depth = 0usize;
        while let Some(t) = self.bump() {
            match t.tok {
                Tok::LBrace => depth += 1,
                Tok::RBrace if depth == 0 => return,
                Tok::RBrace => depth -= 1,
                _ => {}
            }
        }
        self.error(
            Code::UnbalancedBraces,
            node.line,
            format!("block `{}` is never closed", node.kind),
        );
    }

    fn value(&mut self) -> Result<Value, (usize, String)> {
        let Some(t) = self.peek().cloned() else {
            let line = self.toks.last().map(|t| t.line).unwrap_or(1);
            return Err((line, "expected a value, found end of file".to_string()));
        };
        match t.tok {
            Tok::Str(s) => {
                self.bump();
                Ok(Value::String(s))
            }
            Tok::Num(n) => {
                self.bump();
                Ok(Value::Number(n))
            }
            Tok::Ident(s) => {
                self.bump();
                Ok(Value::Ident(s))
            }
            Tok::LBracket => {
                self.bump();
                let mut items = vec![self.value()?];
                loop {
                    match self.peek().map(|s| s.tok.clone()) {
                        Some(Tok::Comma) => {
                            self.bump();
                            items.push(self.value()?);
                        }
                        Some(Tok::RBracket) => {
                            self.bump();
                            return Ok(Value::List(items));
                        }
                        _ => return Err((t.line, "unterminated list".to_string())),
                    }
                }
            }
            Tok::Bad(msg) => Err((t.line, msg)),
            _ => Err((t.line, "expected a value".to_string())),
        }
    }
}

/// Parses a block file. Problems are reported as diagnostics; parsing
/// resumes after the brace that closes the offending block.
pub fn parse_blockfile(file: &str, text: &str) -> (BlockTree, Vec<Diagnostic>) {
    let mut p = Parser {
        file,
        toks: lex(text),
        pos: 0,
        diags: Vec::new(),
    };
    let roots = p.file();
    let mut diags = p.diags;
    diags.sort_by_key(|d| d.location.line_number());
    (
        BlockTree {
            file: file.to_string(),
            roots,
        },
        diags,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_file() {
        let (tree, diags) =
            parse_blockfile("m.bm", r#"Model { Name "m" System { Block { BlockType SubSystem } } }"#);
        assert!(diags.is_empty());
        let model = &tree.roots[0];
        assert_eq!(model.kind, "Model");
        assert_eq!(model.name(), Some("m"));
        let block = &model.children[0].children[0];
        assert_eq!(block.get("BlockType"), Some(&Value::Ident("SubSystem".into())));
    }

    #[test]
    fn values_of_every_shape() {
        let (tree, diags) = parse_blockfile(
            "v.bm",
            "B { a \"s\\\"q\" b -1.5e3 c 42 d ident e [1, [x, \"y\"], -0.25] } # trailing",
        );
        assert!(diags.is_empty(), "{diags:?}");
        let b = &tree.roots[0];
        assert_eq!(b.get("a"), Some(&Value::String("s\"q".into())));
        assert_eq!(b.get("b"), Some(&Value::Number(-1500.0)));
        assert_eq!(b.get("c"), Some(&Value::Number(42.0)));
        assert_eq!(
            b.get("e"),
            Some(&Value::List(vec![
                Value::Number(1.0),
                Value::List(vec![Value::Ident("x".into()), Value::String("y".into())]),
                Value::Number(-0.25),
            ]))
        );
    }

    #[test]
    fn missing_closing_brace_reports_open_block() {
        let text = "Model {\n  Name \"m\"\n  System {\n    Block { BlockType Gain }\n  }\n";
        let (tree, diags) = parse_blockfile("u.bm", text);
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].code, Code::UnbalancedBraces);
        assert_eq!(diags[0].location, Location::line("u.bm", 1));
        assert_eq!(tree.roots[0].children.len(), 1);
    }

    #[test]
    fn stray_closing_brace() {
        let (_, diags) = parse_blockfile("u.bm", "A { }\n}\nB { }\n");
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].location, Location::line("u.bm", 2));
    }

    #[test]
    fn malformed_values_recover_at_block_end() {
        let text = "\
Model {
  A {
    x 1.2.3
    y 2
  }
  B {
    z [1, 2
  }
  C { ok 1 }
  D { bad @ }
}
";
        let (tree, diags) = parse_blockfile("bad.bm", text);
        let lines: Vec<_> = diags.iter().map(|d| (d.code, d.location.line_number().unwrap())).collect();
        assert_eq!(
            lines,
            [
                (Code::MalformedValue, 3),
                (Code::MalformedValue, 7),
                (Code::MalformedValue, 10),
            ]
        );
        let kinds: Vec<_> = tree.roots[0].children.iter().map(|c| c.kind.as_str()).collect();
        assert_eq!(kinds, ["A", "B", "C", "D"]);
        assert_eq!(tree.roots[0].children[2].get("ok"), Some(&Value::Number(1.0)));
    }

    #[test]
    fn non_finite_and_odd_numbers_are_rejected() {
        for bad in ["1e999", "1.", ".5", "-", "12abc", "1e"] {
            let (_, diags) = parse_blockfile("n.bm", &format!("A {{ v {bad} }}"));
            assert_eq!(diags.len(), 1, "{bad}: {diags:?}");
            assert_eq!(diags[0].code, Code::MalformedValue);
        }
    }

    #[test]
    fn empty_input() {
        let (tree, diags) = parse_blockfile("e.bm", "# nothing\n");
        assert!(tree.roots.is_empty() && diags.is_empty());
    }
}
