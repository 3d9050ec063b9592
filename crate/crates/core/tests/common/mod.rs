//! Independent reference implementations and generators shared by the
//! integration tests. The oracles work on plain paths and flat lists and
//! deliberately avoid the tree API of the library.

#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::PathBuf;

use rand::seq::SliceRandom;
use rand::Rng;

use qmm_core::blockmodel::{BlockNode, BlockTree, Value};
use qmm_core::checkers::clones::{assemble_report, normalize, CloneInstance, CloneReport};
use qmm_core::checkers::{Token, TokenKind};
use qmm_core::model::LiftedSign;
use qmm_core::profile::{FactValue, FactValues};
use qmm_core::{Category, FactKey, QualityModel, Sign};

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

pub fn read_fixture(name: &str) -> String {
    std::fs::read_to_string(fixture(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn within(path: &str, ancestor: &str) -> bool {
    path == ancestor || path.starts_with(&format!("{ancestor}/"))
}

fn parent_of(path: &str) -> Option<&str> {
    path.rsplit_once('/').map(|(p, _)| p)
}

/// Lifted sign by scanning every impact.
pub fn brute_lift(model: &QualityModel, entity: &str, activity: &str) -> LiftedSign {
    let mut pos = false;
    let mut neg = false;
    for i in model.impacts() {
        if within(&i.key.fact.entity, entity) && within(i.activity(), activity) {
            match i.sign {
                Sign::Positive => pos = true,
                Sign::Negative => neg = true,
            }
        }
    }
    match (pos, neg) {
        (false, false) => LiftedSign::None,
        (true, false) => LiftedSign::Positive,
        (false, true) => LiftedSign::Negative,
        (true, true) => LiftedSign::Mixed,
    }
}

fn mean(xs: &[f64]) -> Option<f64> {
    if xs.is_empty() {
        None
    } else {
        Some(xs.iter().sum::<f64>() / xs.len() as f64)
    }
}

/// Recursive mean over a set of paths: a node without children (other
/// than the root) takes `leaf`, any other node the mean of its present
/// children.
fn recursive_scores(paths: &[String], leaf: &dyn Fn(&str) -> Option<f64>) -> BTreeMap<String, Option<f64>> {
    fn score(
        p: &str,
        paths: &[String],
        leaf: &dyn Fn(&str) -> Option<f64>,
        memo: &mut BTreeMap<String, Option<f64>>,
    ) -> Option<f64> {
        if let Some(s) = memo.get(p) {
            return *s;
        }
        let children: Vec<&String> = paths.iter().filter(|c| parent_of(c) == Some(p)).collect();
        let s = if children.is_empty() && parent_of(p).is_some() {
            leaf(p)
        } else {
            let xs: Vec<f64> = children.iter().filter_map(|c| score(c, paths, leaf, memo)).collect();
            mean(&xs)
        };
        memo.insert(p.to_string(), s);
        s
    }
    let mut memo = BTreeMap::new();
    for p in paths {
        score(p, paths, leaf, &mut memo);
    }
    memo
}

fn all_paths(model: &QualityModel, entities: bool) -> Vec<String> {
    let tree = if entities { model.entities() } else { model.activities() };
    tree.depth_first().iter().map(|n| n.path().to_string()).collect()
}

pub fn brute_entity_scores(model: &QualityModel, values: &FactValues) -> BTreeMap<String, Option<f64>> {
    let paths = all_paths(model, true);
    recursive_scores(&paths, &|p| {
        let xs: Vec<f64> = values
            .iter()
            .filter(|(k, _)| k.entity == p && model.fact(k).is_some())
            .map(|(_, v)| v.value)
            .collect();
        mean(&xs)
    })
}

pub fn brute_activity_scores(model: &QualityModel, values: &FactValues) -> BTreeMap<String, Option<f64>> {
    let paths = all_paths(model, false);
    recursive_scores(&paths, &|p| {
        let xs: Vec<f64> = model
            .impacts()
            .filter(|i| i.activity() == p)
            .filter_map(|i| {
                let v = values.get(&i.key.fact)?.value;
                Some(if i.sign == Sign::Positive { v } else { 1.0 - v })
            })
            .collect();
        mean(&xs)
    })
}

pub fn close(a: Option<f64>, b: Option<f64>, tol: f64) -> bool {
    match (a, b) {
        (None, None) => true,
        (Some(x), Some(y)) => (x - y).abs() <= tol,
        _ => false,
    }
}

/// Random values for a random subset of the model's facts.
pub fn random_values(rng: &mut impl Rng, model: &QualityModel) -> FactValues {
    let mut values = FactValues::new();
    for f in model.facts() {
        if !rng.gen_bool(0.7) {
            continue;
        }
        let value = match rng.gen_range(0..10) {
            0 => 0.0,
            1 => 1.0,
            _ => rng.gen::<f64>(),
        };
        values.insert(f.key.clone(), FactValue { value, origin: f.category });
    }
    values
}

/// Clone pairs by comparing every pair of positions directly.
pub fn naive_clones(files: &[Vec<Token>], min_tokens: usize) -> CloneReport {
    let norm: Vec<Vec<&str>> = files.iter().map(|f| f.iter().map(normalize).collect()).collect();
    let positions: Vec<(usize, usize)> = norm
        .iter()
        .enumerate()
        .flat_map(|(f, toks)| (0..toks.len()).map(move |i| (f, i)))
        .collect();
    let mut pairs = Vec::new();
    for (x, &(fa, a)) in positions.iter().enumerate() {
        for &(fb, b) in &positions[x + 1..] {
            let (ta, tb) = (&norm[fa], &norm[fb]);
            let starts = a == 0 || b == 0 || ta[a - 1] != tb[b - 1];
            if !starts {
                continue;
            }
            let mut len = 0;
            while a + len < ta.len() && b + len < tb.len() && ta[a + len] == tb[b + len] {
                len += 1;
            }
            if len >= min_tokens {
                pairs.push((
                    CloneInstance { file: fa, start: a, end: a + len },
                    CloneInstance { file: fb, start: b, end: b + len },
                ));
            }
        }
    }
    let total = files.iter().map(Vec::len).sum();
    assemble_report(pairs, total)
}

const TOKEN_POOL: &[(TokenKind, &str)] = &[
    (TokenKind::Ident, "a"),
    (TokenKind::Ident, "b"),
    (TokenKind::Number, "1"),
    (TokenKind::String, "\"s\""),
    (TokenKind::Keyword, "if"),
    (TokenKind::Keyword, "return"),
    (TokenKind::Punct, "("),
    (TokenKind::Punct, ")"),
    (TokenKind::Punct, ";"),
    (TokenKind::Punct, "="),
];

fn random_token(rng: &mut impl Rng) -> Token {
    let (kind, text) = *TOKEN_POOL.choose(rng).expect("non-empty");
    Token { kind, text: text.to_string(), line: 1, column: 1 }
}

/// Up to four files with at most `max_tokens` tokens in total. Copied
/// segments, some with renamed identifiers, make clones likely.
pub fn random_corpus(rng: &mut impl Rng, max_tokens: usize) -> Vec<Vec<Token>> {
    let nfiles = rng.gen_range(1..=4);
    let budget = rng.gen_range(0..=max_tokens);
    let mut files: Vec<Vec<Token>> = vec![Vec::new(); nfiles];
    let mut used = 0;
    while used < budget {
        let f = rng.gen_range(0..nfiles);
        let copy = used > 0 && rng.gen_bool(0.3);
        if copy {
            let src = rng.gen_range(0..nfiles);
            if files[src].is_empty() {
                continue;
            }
            let start = rng.gen_range(0..files[src].len());
            let len = rng.gen_range(1..=60).min(files[src].len() - start).min(budget - used);
            let mut seg: Vec<Token> = files[src][start..start + len].to_vec();
            for t in &mut seg {
                if t.kind == TokenKind::Ident && rng.gen_bool(0.3) {
                    t.text = "renamed".to_string();
                }
            }
            used += seg.len();
            files[f].extend(seg);
        } else {
            files[f].push(random_token(rng));
            used += 1;
        }
    }
    files
}

const IDENTS: &[&str] = &["Gain", "Sum", "x_1", "CurrentState", "Block", "On"];
const STRINGS: &[&str] = &["", "plain", "with \"quote\"", "back\\slash", "tab\t", "new\nline", "ümlaut", "# not a comment", "{ }"];

fn random_value(rng: &mut impl Rng, depth: usize) -> Value {
    match rng.gen_range(0..if depth < 2 { 4 } else { 3 }) {
        0 => Value::String(STRINGS.choose(rng).expect("non-empty").to_string()),
        1 => {
            let n = match rng.gen_range(0..4) {
                0 => rng.gen_range(-1000i64..1000) as f64,
                1 => rng.gen::<f64>() * 1e6 - 5e5,
                2 => 0.0,
                _ => rng.gen::<f64>() * 1e-4,
            };
            Value::Number(n)
        }
        2 => Value::Ident(IDENTS.choose(rng).expect("non-empty").to_string()),
        _ => Value::List((0..rng.gen_range(1..4)).map(|_| random_value(rng, depth + 1)).collect()),
    }
}

fn random_block(rng: &mut impl Rng, depth: usize, budget: &mut usize) -> BlockNode {
    *budget = budget.saturating_sub(1);
    let mut node = BlockNode::new(*["Model", "System", "Block", "Chart", "State", "Output"].choose(rng).expect("non-empty"));
    for _ in 0..rng.gen_range(0..4) {
        let key = ["Name", "BlockType", "Value", "Kind", "Ports"].choose(rng).expect("non-empty");
        node.entries.push((key.to_string(), random_value(rng, 0)));
    }
    if depth < 5 {
        for _ in 0..rng.gen_range(0..3) {
            if *budget == 0 {
                break;
            }
            node.children.push(random_block(rng, depth + 1, budget));
        }
    }
    node
}

pub fn random_block_tree(rng: &mut impl Rng) -> BlockTree {
    let mut budget = rng.gen_range(0..40);
    let mut roots = Vec::new();
    while budget > 0 && roots.len() < 3 {
        roots.push(random_block(rng, 0, &mut budget));
    }
    BlockTree { file: "r.bm".to_string(), roots }
}

/// Facts named in the detail sections of a generated guideline.
pub fn document_facts(doc: &str) -> Vec<FactKey> {
    doc.lines()
        .filter_map(|l| l.strip_prefix("- Fact: `"))
        .filter_map(|l| l.strip_suffix('`'))
        .map(|l| {
            let inner = l.strip_prefix('[').and_then(|r| r.strip_suffix(']')).expect("bracketed fact");
            let (e, a) = inner.rsplit_once('|').expect("fact separator");
            FactKey::new(e, a)
        })
        .collect()
}

pub fn categories_subset(rng: &mut impl Rng) -> Vec<Category> {
    Category::ALL.iter().copied().filter(|_| rng.gen_bool(0.6)).collect()
}
