use std::collections::BTreeMap;

use super::{BlockNode, BlockTree};

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ModelMetrics {
    pub block_count_by_kind: BTreeMap<String, usize>,
    pub state_count: usize,
    pub transition_count: usize,
    /// Deepest block nesting; a top-level block has depth 1.
    pub max_nesting_depth: usize,
    /// Direct `Block` children of every `System`, keyed by the label path
    /// of the system (labels joined with `/`, duplicates suffixed `#n`).
    pub subsystem_fan_out: BTreeMap<String, usize>,
}

pub fn compute_metrics(tree: &BlockTree) -> ModelMetrics {
    let mut m = ModelMetrics::default();
    let mut paths: BTreeMap<String, usize> = BTreeMap::new();
    tree.visit(|node, ancestors| {
        *m.block_count_by_kind.entry(node.kind.clone()).or_default() += 1;
        m.max_nesting_depth = m.max_nesting_depth.max(ancestors.len() + 1);
        if node.kind == "System" {
            let base = label_path(ancestors, node);
            let seen = paths.entry(base.clone()).or_default();
            *seen += 1;
            let key = if *seen == 1 {
                base
            } else {
                format!("{base}#{seen}")
            };
            let fan_out = node.children.iter().filter(|c| c.kind == "Block").count();
            m.subsystem_fan_out.insert(key, fan_out);
        }
    });
    m.state_count = m.block_count_by_kind.get("State").copied().unwrap_or(0);
    m.transition_count = m.block_count_by_kind.get("Transition").copied().unwrap_or(0);
    m
}

fn label_path(ancestors: &[&BlockNode], node: &BlockNode) -> String {
    ancestors
        .iter()
        .chain(std::iter::once(&node))
        .map(|n| n.label())
        .collect::<Vec<_>>()
        .join("/")
}
