//! Unlabeled rooted trees as canonical multiset-of-children values.
//!
//! A tree is its list of distinct child subtrees with repeat counts. The canonical
//! total order compares vertex counts first; between trees of equal size the
//! child terms are compared pairwise, a larger repeat count sorting first and
//! then the smaller child. Within a tree the terms are stored in increasing child
//! order. Under this order the trees on four vertices come out as
//! `3, 1,1[1], 1[2], 1[1[1]]`.
//!
//! Text notation: `0` is the single vertex; otherwise a comma-separated list of
//! terms `count` (that many leaves) or `count[tree]`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::num::factorial;
use crate::trees::LabeledTree;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct UnlabeledTree {
    terms: Vec<(UnlabeledTree, usize)>,
    size: usize,
}

impl Ord for UnlabeledTree {
    fn cmp(&self, other: &Self) -> Ordering {
        self.size.cmp(&other.size).then_with(|| {
            for ((a, na), (b, nb)) in self.terms.iter().zip(&other.terms) {
                let ord = nb.cmp(na).then_with(|| a.cmp(b));
                if ord != Ordering::Equal {
                    return ord;
                }
            }
            self.terms.len().cmp(&other.terms.len())
        })
    }
}

impl PartialOrd for UnlabeledTree {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl UnlabeledTree {
    /// The one-vertex tree `•`.
    pub fn single() -> Self {
        UnlabeledTree {
            terms: Vec::new(),
            size: 1,
        }
    }

    /// Root with the given children (in any order, repeats allowed).
    pub fn from_children<I: IntoIterator<Item = UnlabeledTree>>(children: I) -> Self {
        Self::from_terms(children.into_iter().map(|c| (c, 1)))
    }

    /// Root with `count` copies of each child; equal children are merged.
    pub fn from_terms<I: IntoIterator<Item = (UnlabeledTree, usize)>>(terms: I) -> Self {
        let mut merged: BTreeMap<UnlabeledTree, usize> = BTreeMap::new();
        for (child, count) in terms {
            if count > 0 {
                *merged.entry(child).or_default() += count;
            }
        }
        let size = 1 + merged.iter().map(|(c, n)| c.size * n).sum::<usize>();
        UnlabeledTree {
            terms: merged.into_iter().collect(),
            size,
        }
    }

    /// Root with `k` leaf children (the paper's bushy tree `k`).
    pub fn bushy(leaves: usize) -> Self {
        Self::from_terms([(Self::single(), leaves)])
    }

    /// The linear tree with `n` vertices.
    pub fn chain(n: usize) -> Self {
        assert!(n >= 1, "a chain has at least one vertex");
        (1..n).fold(Self::single(), |t, _| Self::from_children([t]))
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Distinct children with repeat counts, in increasing canonical order.
    pub fn terms(&self) -> &[(UnlabeledTree, usize)] {
        &self.terms
    }

    /// Children with repeats expanded.
    pub fn children(&self) -> impl Iterator<Item = &UnlabeledTree> {
        self.terms
            .iter()
            .flat_map(|(c, n)| std::iter::repeat_n(c, *n))
    }

    pub fn degree(&self) -> usize {
        self.terms.iter().map(|(_, n)| n).sum()
    }

    pub fn is_single(&self) -> bool {
        self.size == 1
    }

    /// The children multiset `N` obtained by removing the root.
    pub fn children_multiset(&self) -> TreeMultiset {
        TreeMultiset::from_counts(self.terms.iter().cloned())
    }

    /// `v_k(τ)`: entry `k` is the number of vertices of degree `k`.
    pub fn degree_profile(&self) -> Vec<usize> {
        let mut profile = vec![0; self.size];
        self.accumulate_degrees(&mut profile, 1);
        while profile.len() > 1 && profile.last() == Some(&0) {
            profile.pop();
        }
        profile
    }

    fn accumulate_degrees(&self, profile: &mut [usize], weight: usize) {
        profile[self.degree()] += weight;
        for (child, n) in &self.terms {
            child.accumulate_degrees(profile, weight * n);
        }
    }

    /// `σ(τ) = Π N(τ′)! σ(τ′)^N(τ′)`.
    pub fn symmetry_factor(&self) -> BigUint {
        self.terms.iter().fold(BigUint::one(), |acc, (child, n)| {
            acc * factorial(*n) * child.symmetry_factor().pow(*n as u32)
        })
    }

    /// `τ! = |τ| Π (τ′!)^N(τ′)`.
    pub fn tree_factorial(&self) -> BigUint {
        self.terms
            .iter()
            .fold(BigUint::from(self.size), |acc, (child, n)| {
                acc * child.tree_factorial().pow(*n as u32)
            })
    }

    /// `r(τ) = |τ|!/σ(τ)`, the number of labelings.
    pub fn labeled_count(&self) -> BigUint {
        factorial(self.size) / self.symmetry_factor()
    }

    /// `i(τ) = |τ|!/(σ(τ) τ!)`, the number of increasing labelings.
    pub fn increasing_count(&self) -> BigUint {
        factorial(self.size) / (self.symmetry_factor() * self.tree_factorial())
    }

    /// A labeled representative numbered in preorder, children visited in
    /// increasing canonical order. The result is an increasing tree.
    pub fn representative(&self) -> LabeledTree {
        let mut parent = vec![None; self.size];
        let mut next = 1;
        self.label_preorder(0, &mut parent, &mut next);
        LabeledTree::from_parents(0, parent).expect("preorder labeling is a tree")
    }

    fn label_preorder(&self, me: usize, parent: &mut [Option<usize>], next: &mut usize) {
        for child in self.children() {
            let label = *next;
            *next += 1;
            parent[label] = Some(me);
            child.label_preorder(label, parent, next);
        }
    }

    fn write(&self, out: &mut String, separator: &str) {
        if self.terms.is_empty() {
            out.push('0');
            return;
        }
        for (i, (child, n)) in self.terms.iter().enumerate() {
            if i > 0 {
                out.push_str(separator);
            }
            out.push_str(&n.to_string());
            if !child.is_single() {
                out.push('[');
                child.write(out, separator);
                out.push(']');
            }
        }
    }

    /// Juxtaposed notation without separators, e.g. `11[1[1]]`.
    ///
    /// Unambiguous only while every repeat count is a single digit.
    pub fn to_compact_string(&self) -> String {
        let mut out = String::new();
        self.write(&mut out, "");
        out
    }
}

impl fmt::Display for UnlabeledTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        self.write(&mut out, ",");
        f.write_str(&out)
    }
}

impl FromStr for UnlabeledTree {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_unlabeled(s)
    }
}

impl Serialize for UnlabeledTree {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for UnlabeledTree {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        parse_unlabeled(&text).map_err(serde::de::Error::custom)
    }
}

/// `tree := '0' | mlist`, `mlist := mterm (',' mterm)*`, `mterm := count ('[' tree ']')?`.
pub fn parse_unlabeled(text: &str) -> Result<UnlabeledTree> {
    let mut parser = MultisetParser {
        bytes: text.as_bytes(),
        pos: 0,
    };
    let tree = parser.tree()?;
    parser.skip_ws();
    if parser.pos != parser.bytes.len() {
        return Err(Error::syntax("trailing input", parser.pos));
    }
    Ok(tree)
}

pub fn print_unlabeled(tree: &UnlabeledTree) -> String {
    tree.to_string()
}

struct MultisetParser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl MultisetParser<'_> {
    fn skip_ws(&mut self) {
        while self
            .bytes
            .get(self.pos)
            .is_some_and(u8::is_ascii_whitespace)
        {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn count(&mut self) -> Result<usize> {
        self.skip_ws();
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::syntax("expected a count", start));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .expect("ascii digits")
            .parse()
            .map_err(|_| Error::syntax("count too large", start))
    }

    fn tree(&mut self) -> Result<UnlabeledTree> {
        let mut terms = Vec::new();
        loop {
            let count = self.count()?;
            let child = if self.peek() == Some(b'[') {
                self.pos += 1;
                let inner = self.tree()?;
                if self.peek() != Some(b']') {
                    return Err(Error::syntax("expected ']'", self.pos));
                }
                self.pos += 1;
                inner
            } else {
                UnlabeledTree::single()
            };
            let next = self.peek();
            if count == 0 {
                // a bare "0" is the single vertex when it stands alone
                let alone = terms.is_empty() && child.is_single() && next != Some(b',');
                if alone {
                    return Ok(UnlabeledTree::single());
                }
                return Err(Error::ZeroCount);
            }
            terms.push((child, count));
            if next == Some(b',') {
                self.pos += 1;
            } else {
                return Ok(UnlabeledTree::from_terms(terms));
            }
        }
    }
}

/// The isomorphism class of a labeled tree.
pub fn canonicalize(tree: &LabeledTree) -> UnlabeledTree {
    let children = tree.children_lists();
    let mut forms: Vec<Option<UnlabeledTree>> = vec![None; tree.len()];
    for &v in tree.preorder().iter().rev() {
        let form = UnlabeledTree::from_children(
            children[v]
                .iter()
                .map(|&c| forms[c].take().expect("children are visited first")),
        );
        forms[v] = Some(form);
    }
    forms[tree.root()].take().expect("root form computed")
}

/// All unlabeled trees with exactly `n` vertices, in canonical order.
pub fn enumerate_unlabeled(n: usize) -> Vec<UnlabeledTree> {
    trees_by_size(n).pop().unwrap_or_default()
}

/// Entry `m` lists the trees with `m` vertices for `m = 0..=max` (entry 0 is empty).
pub fn trees_by_size(max: usize) -> Vec<Vec<UnlabeledTree>> {
    let mut by_size: Vec<Vec<UnlabeledTree>> = vec![Vec::new(); max + 1];
    if max >= 1 {
        by_size[1].push(UnlabeledTree::single());
    }
    for m in 2..=max {
        let pool: Vec<&UnlabeledTree> = by_size[1..m].iter().flatten().collect();
        let mut out = Vec::new();
        let mut chosen = Vec::new();
        collect_multisets(&pool, 0, m - 1, &mut chosen, &mut out);
        out.sort();
        by_size[m] = out;
    }
    by_size
}

fn collect_multisets(
    pool: &[&UnlabeledTree],
    from: usize,
    remaining: usize,
    chosen: &mut Vec<UnlabeledTree>,
    out: &mut Vec<UnlabeledTree>,
) {
    if remaining == 0 {
        out.push(UnlabeledTree::from_children(chosen.iter().cloned()));
        return;
    }
    for (i, tree) in pool.iter().enumerate().skip(from) {
        if tree.size() <= remaining {
            chosen.push((*tree).clone());
            collect_multisets(pool, i, remaining - tree.size(), chosen, out);
            chosen.pop();
        }
    }
}

/// Number of unlabeled rooted trees on `n` vertices from the Euler-transform
/// recursion of `ã(t) = t exp(Σ_k ã(t^k)/k)`.
pub fn count_unlabeled(n: usize) -> BigUint {
    unlabeled_counts(n).pop().unwrap_or_default()
}

/// `ã_0, …, ã_n` with `ã_0 = 0`.
pub fn unlabeled_counts(n: usize) -> Vec<BigUint> {
    let mut a = vec![BigUint::zero(); n + 1];
    if n == 0 {
        return a;
    }
    a[1] = BigUint::one();
    // c_k = Σ_{d | k} d ã_d
    let mut c = vec![BigUint::zero(); n + 1];
    for m in 1..n {
        c[m] = (1..=m)
            .filter(|d| m % d == 0)
            .map(|d| BigUint::from(d) * &a[d])
            .sum();
        let total: BigUint = (1..=m).map(|k| &c[k] * &a[m + 1 - k]).sum();
        a[m + 1] = total / BigUint::from(m);
    }
    a
}

/// A multiset of unlabeled trees, e.g. the block types of a forest.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TreeMultiset {
    counts: BTreeMap<UnlabeledTree, usize>,
}

impl TreeMultiset {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_counts<I: IntoIterator<Item = (UnlabeledTree, usize)>>(counts: I) -> Self {
        let mut set = Self::new();
        for (tree, n) in counts {
            set.insert(tree, n);
        }
        set
    }

    pub fn from_trees<I: IntoIterator<Item = UnlabeledTree>>(trees: I) -> Self {
        Self::from_counts(trees.into_iter().map(|t| (t, 1)))
    }

    pub fn insert(&mut self, tree: UnlabeledTree, n: usize) {
        if n > 0 {
            *self.counts.entry(tree).or_default() += n;
        }
    }

    pub fn counts(&self) -> &BTreeMap<UnlabeledTree, usize> {
        &self.counts
    }

    pub fn iter(&self) -> impl Iterator<Item = (&UnlabeledTree, usize)> {
        self.counts.iter().map(|(t, n)| (t, *n))
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Number of trees counted with multiplicity.
    pub fn len(&self) -> usize {
        self.counts.values().sum()
    }

    /// Total vertex count `m = Σ |τ| N(τ)`.
    pub fn vertex_count(&self) -> usize {
        self.iter().map(|(t, n)| t.size() * n).sum()
    }

    /// `σ(N) = Π N(τ′)! σ(τ′)^N(τ′)`.
    pub fn symmetry_factor(&self) -> BigUint {
        self.iter().fold(BigUint::one(), |acc, (t, n)| {
            acc * factorial(n) * t.symmetry_factor().pow(n as u32)
        })
    }

    /// `C(N) = m! / (Π (|τ′|!)^N(τ′) · Π N(τ′)!)`.
    pub fn multinomial(&self) -> BigUint {
        let denominator = self.iter().fold(BigUint::one(), |acc, (t, n)| {
            acc * factorial(t.size()).pow(n as u32) * factorial(n)
        });
        factorial(self.vertex_count()) / denominator
    }

    /// `f(N) = C(N) Π r(τ′)^N(τ′)`, the number of forests of this type.
    pub fn forest_count(&self) -> BigUint {
        self.iter().fold(self.multinomial(), |acc, (t, n)| {
            acc * t.labeled_count().pow(n as u32)
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultisetStats {
    pub multinomial: BigUint,
    pub forests: BigUint,
    pub symmetry: BigUint,
}

/// `(C(N), f(N), σ(N))`, with `f(N)` cross-checked against `m!/σ(N)`.
pub fn multiset_stats(multiset: &TreeMultiset) -> MultisetStats {
    let stats = MultisetStats {
        multinomial: multiset.multinomial(),
        forests: multiset.forest_count(),
        symmetry: multiset.symmetry_factor(),
    };
    debug_assert_eq!(
        stats.forests,
        factorial(multiset.vertex_count()) / &stats.symmetry
    );
    stats
}

/// One row of the per-tree invariant table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableRow {
    pub tree: UnlabeledTree,
    pub symmetry: BigUint,
    pub labeled: BigUint,
    pub factorial: BigUint,
    pub increasing: BigUint,
}

pub fn invariant_table(n: usize) -> Vec<TableRow> {
    enumerate_unlabeled(n)
        .into_iter()
        .map(|tree| TableRow {
            symmetry: tree.symmetry_factor(),
            labeled: tree.labeled_count(),
            factorial: tree.tree_factorial(),
            increasing: tree.increasing_count(),
            tree,
        })
        .collect()
}

/// `τ! = Π_j |T_j|` evaluated on a labeled representative.
pub fn tree_factorial_by_subtrees(tree: &LabeledTree) -> BigUint {
    tree.subtree_sizes()
        .into_iter()
        .fold(BigUint::one(), |acc, s| acc * BigUint::from(s))
}
