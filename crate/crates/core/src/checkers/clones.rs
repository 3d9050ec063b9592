//! Token-window clone detection.
//!
//! Token texts are normalized (identifiers, numbers and strings collapse to
//! their kind), so renamed copies still match. Any two equal windows of
//! `min_tokens` normalized tokens at distinct positions are a match; each
//! maximal run of matches along a diagonal yields a pair of instances, and
//! instances linked by pairs form clone groups.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::tokens::{Token, TokenKind};

/// Normalized token text used for matching.
pub fn normalize(token: &Token) -> &str {
    match token.kind {
        TokenKind::Ident => "$id",
        TokenKind::Number => "$num",
        TokenKind::String => "$str",
        TokenKind::Keyword | TokenKind::Punct => &token.text,
    }
}

/// A token range `[start, end)` inside one file of the input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CloneInstance {
    pub file: usize,
    pub start: usize,
    pub end: usize,
}

impl CloneInstance {
    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }
}

/// Instances sharing copied code, sorted.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct CloneGroup {
    pub instances: Vec<CloneInstance>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CloneReport {
    pub groups: Vec<CloneGroup>,
    /// Distinct token positions covered by some instance.
    pub cloned_tokens: usize,
    pub total_tokens: usize,
}

/// Position in the concatenation of all files.
struct Flat<'a> {
    norm: Vec<&'a str>,
    file_of: Vec<usize>,
    offset: Vec<usize>,
    file_start: Vec<usize>,
}

impl<'a> Flat<'a> {
    fn new(files: &'a [Vec<Token>]) -> Self {
        let mut flat = Flat {
            norm: Vec::new(),
            file_of: Vec::new(),
            offset: Vec::new(),
            file_start: Vec::new(),
        };
        for (f, toks) in files.iter().enumerate() {
            flat.file_start.push(flat.norm.len());
            for (i, t) in toks.iter().enumerate() {
                flat.norm.push(normalize(t));
                flat.file_of.push(f);
                flat.offset.push(i);
            }
        }
        flat
    }

    /// `len` tokens from `p` stay inside one file.
    fn window_fits(&self, p: usize, len: usize) -> bool {
        p + len <= self.norm.len() && self.file_of[p] == self.file_of[p + len - 1]
    }

    fn same(&self, p: usize, q: usize) -> bool {
        self.norm[p] == self.norm[q]
    }

    /// Whether a diagonal run through `(p, q)` cannot be extended left.
    fn run_starts_at(&self, p: usize, q: usize) -> bool {
        self.offset[p] == 0 || self.offset[q] == 0 || !self.same(p - 1, q - 1)
    }

    fn run_length(&self, p: usize, q: usize) -> usize {
        let mut len = 0;
        while p + len < self.norm.len()
            && q + len < self.norm.len()
            && self.file_of[p + len] == self.file_of[p]
            && self.file_of[q + len] == self.file_of[q]
            && self.same(p + len, q + len)
        {
            len += 1;
        }
        len
    }

    fn instance(&self, p: usize, len: usize) -> CloneInstance {
        let start = self.offset[p];
        CloneInstance {
            file: self.file_of[p],
            start,
            end: start + len,
        }
    }
}

/// Groups instance pairs into connected components and computes coverage.
pub fn assemble_report(
    pairs: impl IntoIterator<Item = (CloneInstance, CloneInstance)>,
    total_tokens: usize,
) -> CloneReport {
    let mut ids: BTreeMap<CloneInstance, usize> = BTreeMap::new();
    let mut parent: Vec<usize> = Vec::new();
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while parent[r] != r {
            r = parent[r];
        }
        let mut x = x;
        while parent[x] != r {
            let n = parent[x];
            parent[x] = r;
            x = n;
        }
        r
    }
    let mut id_of = |inst: CloneInstance, parent: &mut Vec<usize>| {
        *ids.entry(inst).or_insert_with(|| {
            parent.push(parent.len());
            parent.len() - 1
        })
    };
    let mut edges = Vec::new();
    for (a, b) in pairs {
        let (ia, ib) = (id_of(a, &mut parent), id_of(b, &mut parent));
        edges.push((ia, ib));
    }
    for (a, b) in edges {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra.max(rb)] = ra.min(rb);
        }
    }
    let mut components: BTreeMap<usize, Vec<CloneInstance>> = BTreeMap::new();
    let mut covered: BTreeSet<(usize, usize)> = BTreeSet::new();
    for (&inst, &id) in &ids {
        let root = find(&mut parent, id);
        components.entry(root).or_default().push(inst);
        covered.extend((inst.start..inst.end).map(|i| (inst.file, i)));
    }
    let mut groups: Vec<CloneGroup> = components
        .into_values()
        .map(|mut instances| {
            instances.sort();
            CloneGroup { instances }
        })
        .collect();
    groups.sort();
    CloneReport {
        groups,
        cloned_tokens: covered.len(),
        total_tokens,
    }
}

/// Finds clones of at least `min_tokens` normalized tokens within and
/// across `files`. Windows are bucketed by content, so only positions
/// sharing a window are compared.
pub fn detect_clones(files: &[Vec<Token>], min_tokens: usize) -> CloneReport {
    let min_tokens = min_tokens.max(1);
    let flat = Flat::new(files);
    let n = flat.norm.len();
    let mut buckets: HashMap<&[&str], Vec<usize>> = HashMap::new();
    for p in 0..n {
        if flat.window_fits(p, min_tokens) {
            buckets.entry(&flat.norm[p..p + min_tokens]).or_default().push(p);
        }
    }
    let mut pairs = Vec::new();
    let mut starts: Vec<&Vec<usize>> = buckets.values().filter(|v| v.len() > 1).collect();
    starts.sort();
    for positions in starts {
        for (k, &p) in positions.iter().enumerate() {
            for &q in &positions[k + 1..] {
                if flat.run_starts_at(p, q) {
                    let len = flat.run_length(p, q);
                    pairs.push((flat.instance(p, len), flat.instance(q, len)));
                }
            }
        }
    }
    assemble_report(pairs, n)
}
