//! Nested block files (`.bm`), a small MDL-like format shared by
//! Simulink-style block diagrams and Stateflow-style charts.
//!
//! ```text
//! file  := block*
//! block := IDENT "{" (block | kv)* "}"
//! kv    := IDENT value
//! value := STRING | NUMBER | IDENT | "[" value ("," value)* "]"
//! ```
//!
//! `#` starts a comment that runs to the end of the line. Statecharts use
//! the kinds `Chart`, `State`, `Transition` and `Output`.

mod metrics;
mod parse;

use std::fmt::{self, Write as _};

pub use metrics::{compute_metrics, ModelMetrics};
pub use parse::parse_blockfile;

use crate::dsl::quote;

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    String(String),
    Number(f64),
    Ident(String),
    List(Vec<Value>),
}

impl Value {
    /// Text of a string or identifier value.
    pub fn as_text(&self) -> Option<&str> {
        match self {
            Value::String(s) | Value::Ident(s) => Some(s),
            _ => None,
        }
    }

    /// Every string or identifier inside this value, lists flattened.
    pub fn texts(&self) -> Vec<&str> {
        match self {
            Value::String(s) | Value::Ident(s) => vec![s.as_str()],
            Value::Number(_) => Vec::new(),
            Value::List(items) => items.iter().flat_map(Value::texts).collect(),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::String(s) => f.write_str(&quote(s)),
            Value::Number(n) => write!(f, "{n}"),
            Value::Ident(s) => f.write_str(s),
            Value::List(items) => {
                f.write_str("[")?;
                for (i, v) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{v}")?;
                }
                f.write_str("]")
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct BlockNode {
    pub kind: String,
    pub entries: Vec<(String, Value)>,
    pub children: Vec<BlockNode>,
    /// 1-based line of the kind identifier.
    pub line: usize,
}

impl BlockNode {
    pub fn new(kind: impl Into<String>) -> Self {
        BlockNode {
            kind: kind.into(),
            entries: Vec::new(),
            children: Vec::new(),
            line: 1,
        }
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    /// Text of the first entry named `key`.
    pub fn text(&self, key: &str) -> Option<&str> {
        self.get(key).and_then(Value::as_text)
    }

    pub fn name(&self) -> Option<&str> {
        self.text("Name")
    }

    /// Name if present, otherwise the kind.
    pub fn label(&self) -> &str {
        self.name().unwrap_or(&self.kind)
    }

    /// Equality of kind, entries and children, ignoring line numbers.
    pub fn same_structure(&self, other: &BlockNode) -> bool {
        self.kind == other.kind
            && self.entries == other.entries
            && self.children.len() == other.children.len()
            && self
                .children
                .iter()
                .zip(&other.children)
                .all(|(a, b)| a.same_structure(b))
    }

    fn print(&self, out: &mut String, indent: usize) {
        let pad = "  ".repeat(indent);
        let _ = writeln!(out, "{pad}{} {{", self.kind);
        for (k, v) in &self.entries {
            let _ = writeln!(out, "{pad}  {k} {v}");
        }
        for c in &self.children {
            c.print(out, indent + 1);
        }
        let _ = writeln!(out, "{pad}}}");
    }
}

/// A parsed block file.
#[derive(Debug, Clone, Default)]
pub struct BlockTree {
    pub file: String,
    pub roots: Vec<BlockNode>,
}

impl BlockTree {
    pub fn same_structure(&self, other: &BlockTree) -> bool {
        self.roots.len() == other.roots.len()
            && self
                .roots
                .iter()
                .zip(&other.roots)
                .all(|(a, b)| a.same_structure(b))
    }

    /// Pretty-prints the tree; entries come before child blocks.
    pub fn print(&self) -> String {
        let mut out = String::new();
        for r in &self.roots {
            r.print(&mut out, 0);
        }
        out
    }

    /// Depth-first visit; `ancestors` lists the enclosing blocks, outermost
    /// first.
    pub fn visit<'a>(&'a self, mut f: impl FnMut(&'a BlockNode, &[&'a BlockNode])) {
        fn go<'a>(
            node: &'a BlockNode,
            stack: &mut Vec<&'a BlockNode>,
            f: &mut impl FnMut(&'a BlockNode, &[&'a BlockNode]),
        ) {
            f(node, stack);
            stack.push(node);
            for c in &node.children {
                go(c, stack, f);
            }
            stack.pop();
        }
        let mut stack = Vec::new();
        for r in &self.roots {
            go(r, &mut stack, &mut f);
        }
    }

    pub fn nodes(&self) -> Vec<&BlockNode> {
        let mut out = Vec::new();
        self.visit(|n, _| out.push(n));
        out
    }

    pub fn location(&self, node: &BlockNode) -> crate::diag::Location {
        crate::diag::Location::line(&self.file, node.line)
    }
}

/// Blocks in depth-first order that have the given kind (any kind when
/// `None`) and satisfy `predicate`.
pub fn query_blocks<'a>(
    tree: &'a BlockTree,
    kind: Option<&str>,
    predicate: impl Fn(&BlockNode) -> bool,
) -> Vec<&'a BlockNode> {
    let mut out = Vec::new();
    tree.visit(|n, _| {
        if kind.is_none_or(|k| n.kind == k) && predicate(n) {
            out.push(n);
        }
    });
    out
}

/// Predicate: the block has an entry `key` whose text equals `value`.
pub fn entry_equals<'v>(key: &'v str, value: &'v str) -> impl Fn(&BlockNode) -> bool + 'v {
    move |n| n.text(key) == Some(value)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"
Model {
  Name "m"
  System {
    Block { BlockType SubSystem Name "ctl" }
    Block { BlockType Gain Name "k" Gain 2.5 }
    Block {
      BlockType SubSystem
      Name "inner"
      System { Block { BlockType Sum Name "s" Inputs ["+", "-"] } }
    }
  }
}
"#;

    #[test]
    fn query_finds_subsystems_in_order() {
        let (tree, diags) = parse_blockfile("s.bm", SAMPLE);
        assert!(diags.is_empty(), "{diags:?}");
        let subs = query_blocks(&tree, Some("Block"), entry_equals("BlockType", "SubSystem"));
        let names: Vec<_> = subs.iter().map(|b| b.label()).collect();
        assert_eq!(names, ["ctl", "inner"]);
        assert!(query_blocks(&tree, Some("Chart"), |_| true).is_empty());
        assert!(query_blocks(&tree, None, entry_equals("BlockType", "Nope")).is_empty());
    }

    #[test]
    fn query_matches_naive_traversal() {
        let (tree, _) = parse_blockfile("s.bm", SAMPLE);
        fn naive(n: &BlockNode, kind: &str) -> usize {
            usize::from(n.kind == kind) + n.children.iter().map(|c| naive(c, kind)).sum::<usize>()
        }
        for kind in ["Model", "System", "Block", "Chart"] {
            let expected: usize = tree.roots.iter().map(|r| naive(r, kind)).sum();
            assert_eq!(query_blocks(&tree, Some(kind), |_| true).len(), expected, "{kind}");
        }
    }

    #[test]
    fn print_then_parse_round_trips() {
        let (tree, _) = parse_blockfile("s.bm", SAMPLE);
        let printed = tree.print();
        let (again, diags) = parse_blockfile("p.bm", &printed);
        assert!(diags.is_empty(), "{diags:?}\n{printed}");
        assert!(tree.same_structure(&again));
        assert_eq!(again.print(), printed);
    }
}
