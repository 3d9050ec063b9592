use std::collections::BTreeSet;

use crate::blockmodel::{BlockNode, BlockTree};

use super::Outcome;

const SCOPE_KINDS: [&str; 3] = ["Model", "System", "Chart"];

/// A block visited with the scopes enclosing it, outermost first. Scopes
/// are numbered in visit order; a scope block lists itself last.
struct Visited<'a> {
    node: &'a BlockNode,
    scopes: Vec<usize>,
    path: String,
}

fn walk(tree: &BlockTree) -> Vec<Visited<'_>> {
    fn go<'a>(
        node: &'a BlockNode,
        scopes: &mut Vec<usize>,
        labels: &mut Vec<&'a str>,
        next: &mut usize,
        out: &mut Vec<Visited<'a>>,
    ) {
        let is_scope = SCOPE_KINDS.contains(&node.kind.as_str());
        if is_scope {
            scopes.push(*next);
            *next += 1;
        }
        labels.push(node.label());
        out.push(Visited {
            node,
            scopes: scopes.clone(),
            path: labels.join("/"),
        });
        for c in &node.children {
            go(c, scopes, labels, next, out);
        }
        labels.pop();
        if is_scope {
            scopes.pop();
        }
    }
    let mut out = Vec::new();
    let mut next = 0;
    for r in &tree.roots {
        go(r, &mut Vec::new(), &mut Vec::new(), &mut next, &mut out);
    }
    out
}

/// Declared variable with the sites that mention it.
struct VariableUse<'a> {
    decl: &'a Visited<'a>,
    name: &'a str,
    /// Indices into the walk of blocks referencing the variable.
    refs: Vec<usize>,
}

/// A variable is referenced by any entry value (other than `Name`) equal to
/// its name in a block other than its own `Variable` block.
fn variable_uses<'a>(visited: &'a [Visited<'a>]) -> Vec<VariableUse<'a>> {
    visited
        .iter()
        .filter(|v| v.node.kind == "Variable")
        .filter_map(|decl| {
            let name = decl.node.name()?;
            let refs = visited
                .iter()
                .enumerate()
                .filter(|(_, v)| !std::ptr::eq(v.node, decl.node))
                .filter(|(_, v)| {
                    v.node
                        .entries
                        .iter()
                        .filter(|(k, _)| k != "Name")
                        .any(|(_, val)| val.texts().contains(&name))
                })
                .map(|(i, _)| i)
                .collect();
            Some(VariableUse { decl, name, refs })
        })
        .collect()
}

pub fn unused_variables(tree: &BlockTree) -> Outcome {
    let visited = walk(tree);
    let mut out = Outcome::default();
    for var in variable_uses(&visited) {
        out.opportunities += 1;
        if var.refs.is_empty() {
            out.violation(
                tree.location(var.decl.node),
                format!("variable `{}` is never used", var.name),
            );
        }
    }
    out
}

/// Flags variables whose every reference lies inside one scope strictly
/// below the scope that declares them.
pub fn variable_locality(tree: &BlockTree) -> Outcome {
    let visited = walk(tree);
    let mut out = Outcome::default();
    for var in variable_uses(&visited) {
        out.opportunities += 1;
        let depth = var.decl.scopes.len();
        let Some(&declared_in) = var.decl.scopes.last() else {
            continue;
        };
        // Scope directly below the declaring one that contains each reference.
        let inner: BTreeSet<Option<usize>> = var
            .refs
            .iter()
            .map(|&r| {
                let s = &visited[r].scopes;
                if s.get(depth - 1) == Some(&declared_in) {
                    s.get(depth).copied()
                } else {
                    None
                }
            })
            .collect();
        if let [Some(scope)] = inner.iter().copied().collect::<Vec<_>>()[..] {
            let target = visited
                .iter()
                .find(|v| v.scopes.last() == Some(&scope) && SCOPE_KINDS.contains(&v.node.kind.as_str()))
                .map_or("?", |v| v.path.as_str());
            let declared = visited
                .iter()
                .find(|v| v.scopes.last() == Some(&declared_in) && SCOPE_KINDS.contains(&v.node.kind.as_str()))
                .map_or("?", |v| v.path.as_str());
            out.violation(
                tree.location(var.decl.node),
                format!(
                    "variable `{}` is declared in `{declared}` but only used in `{target}`; move it there",
                    var.name
                ),
            );
        }
    }
    out
}

/// Blocks whose `BlockType` is on the deny list.
pub fn denylist_blocks(tree: &BlockTree, deny: &BTreeSet<String>) -> Outcome {
    let mut out = Outcome::default();
    for v in walk(tree) {
        let Some(block_type) = v.node.text("BlockType") else {
            continue;
        };
        out.opportunities += 1;
        if deny.contains(block_type) {
            out.violation(
                tree.location(v.node),
                format!("block `{}` of type {block_type} is not supported by code generation", v.path),
            );
        }
    }
    out
}

/// Charts must expose their current state through an `Output` child with
/// `Kind CurrentState`.
pub fn chart_accessibility(tree: &BlockTree) -> Outcome {
    let mut out = Outcome::default();
    for v in walk(tree) {
        if v.node.kind != "Chart" {
            continue;
        }
        out.opportunities += 1;
        let exposed = v
            .node
            .children
            .iter()
            .any(|c| c.kind == "Output" && c.text("Kind") == Some("CurrentState"));
        if !exposed {
            out.violation(
                tree.location(v.node),
                format!("chart `{}` does not output its current state", v.path),
            );
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blockmodel::parse_blockfile;
    use crate::diag::Location;

    fn tree(text: &str) -> BlockTree {
        let (t, d) = parse_blockfile("t.bm", text);
        assert!(d.is_empty(), "{d:?}");
        t
    }

    const VARS: &str = r#"
Model {
  Name "m"
  System {
    Name "root"
    Variable { Name "gain" Value 2 }
    Variable { Name "offset" Value 0 }
    Variable { Name "unused" Value 1 }
    Block { BlockType Gain Name "g" Gain gain }
    Block {
      BlockType SubSystem
      Name "ctl"
      System {
        Name "ctl"
        Block { BlockType Sum Name "s" Bias offset }
      }
    }
  }
}
"#;

    #[test]
    fn unused_variable_is_flagged() {
        let o = unused_variables(&tree(VARS));
        assert_eq!((o.violations, o.opportunities), (1, 3));
        assert_eq!(o.findings[0].0, Location::line("t.bm", 8));
    }

    #[test]
    fn self_reference_does_not_count() {
        let o = unused_variables(&tree(r#"Model { Variable { Name "v" Init v } }"#));
        assert_eq!((o.violations, o.opportunities), (1, 1));
    }

    #[test]
    fn no_variables() {
        let o = unused_variables(&tree("Model { System { } }"));
        assert_eq!((o.violations, o.opportunities), (0, 0));
    }

    #[test]
    fn root_variable_used_in_one_subsystem_only() {
        let o = variable_locality(&tree(VARS));
        // gain is used in the root system, offset only below it
        assert_eq!((o.violations, o.opportunities), (1, 3));
        assert!(o.findings[0].1.contains("`offset`"), "{:?}", o.findings);
        assert!(o.findings[0].1.contains("m/root"), "{:?}", o.findings);
    }

    #[test]
    fn use_in_two_subsystems_is_justified() {
        let text = r#"
Model {
  Variable { Name "k" }
  System { Name "a" Block { Gain k } }
  System { Name "b" Block { Gain k } }
}
"#;
        assert_eq!(variable_locality(&tree(text)).violations, 0);
    }

    #[test]
    fn local_declaration_local_use() {
        let text = r#"
Model {
  System { Name "a" Variable { Name "k" } Block { Gain k } }
}
"#;
        let o = variable_locality(&tree(text));
        assert_eq!((o.violations, o.opportunities), (0, 1));
    }

    #[test]
    fn denylist() {
        let text = r#"
Model { System {
  Block { BlockType Gain }
  Block { BlockType AlgebraicLoop Name "loop" }
  Block { BlockType Sum }
  Annotation { Text "no type" }
} }
"#;
        let t = tree(text);
        let deny: BTreeSet<String> = ["AlgebraicLoop".to_string()].into();
        let o = denylist_blocks(&t, &deny);
        assert_eq!((o.violations, o.opportunities), (1, 3));
        assert_eq!(o.findings[0].0, Location::line("t.bm", 4));
        assert_eq!(denylist_blocks(&t, &BTreeSet::new()).violations, 0);
        let all: BTreeSet<String> = ["Gain", "AlgebraicLoop", "Sum"].map(String::from).into();
        assert_eq!(denylist_blocks(&t, &all).violations, 3);
    }

    #[test]
    fn charts() {
        let ok = r#"Chart { Name "c" Output { Kind CurrentState } }"#;
        let bad = r#"Chart { Name "d" Output { Kind Data } }"#;
        assert_eq!((chart_accessibility(&tree(ok)).violations, 1), (0, 1));
        let o = chart_accessibility(&tree(bad));
        assert_eq!((o.violations, o.opportunities), (1, 1));
        let both = format!("{ok}\n{bad}");
        let o = chart_accessibility(&tree(&both));
        assert_eq!((o.violations, o.opportunities), (1, 2));
        assert_eq!(o.findings[0].0, Location::line("t.bm", 2));
    }
}
