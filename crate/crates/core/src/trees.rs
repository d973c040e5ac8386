//! Labeled rooted trees and forests on label sets `{0, …, n−1}`.
//!
//! A tree is stored as a parent function: every vertex except the root has a
//! parent, and iterating the parent function from any vertex reaches the root.
//! The empty tree object is represented by `Option::None` wherever an API
//! accepts "a tree or the empty object".

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::prufer;

pub type Label = usize;

/// Default largest vertex count accepted by [`enumerate_labeled`] (7⁶ = 117 649 trees).
pub const DEFAULT_LABELED_CAP: usize = 7;
/// Largest vertex count that may be requested explicitly (8⁷ = 2 097 152 trees).
pub const MAX_LABELED_CAP: usize = 8;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "TreeJson", into = "TreeJson")]
pub struct LabeledTree {
    root: Label,
    parent: Vec<Option<Label>>,
}

#[derive(Serialize, Deserialize)]
struct TreeJson {
    n: usize,
    root: Label,
    parent: BTreeMap<Label, Label>,
}

impl TryFrom<TreeJson> for LabeledTree {
    type Error = Error;

    fn try_from(json: TreeJson) -> Result<Self> {
        LabeledTree::new(json.n, json.root, &json.parent)
    }
}

impl From<LabeledTree> for TreeJson {
    fn from(tree: LabeledTree) -> Self {
        TreeJson {
            n: tree.len(),
            root: tree.root,
            parent: tree.parent_map(),
        }
    }
}

impl LabeledTree {
    /// Validates a parent map on `{0..n−1}` with the given root.
    pub fn new(n: usize, root: Label, parent: &BTreeMap<Label, Label>) -> Result<Self> {
        if n == 0 {
            return Err(Error::DomainMismatch(
                "a tree needs at least one vertex".into(),
            ));
        }
        if root >= n {
            return Err(Error::DomainMismatch(format!(
                "root {root} is not below {n}"
            )));
        }
        if parent.contains_key(&root) {
            return Err(Error::DomainMismatch(format!(
                "parent defined on the root {root}"
            )));
        }
        let mut slots = vec![None; n];
        for (&child, &p) in parent {
            if child >= n || p >= n {
                return Err(Error::DomainMismatch(format!(
                    "edge {child}->{p} leaves the label set 0..{n}"
                )));
            }
            slots[child] = Some(p);
        }
        if let Some(missing) = (0..n).find(|&v| v != root && slots[v].is_none()) {
            return Err(Error::DomainMismatch(format!(
                "parent missing for vertex {missing}"
            )));
        }
        Self::from_parents(root, slots)
    }

    /// Builds a tree from a dense parent vector, `None` exactly at the root.
    pub fn from_parents(root: Label, parent: Vec<Option<Label>>) -> Result<Self> {
        let n = parent.len();
        if root >= n || parent[root].is_some() {
            return Err(Error::DomainMismatch(format!(
                "vertex {root} is not a root"
            )));
        }
        for (v, p) in parent.iter().enumerate() {
            match p {
                None if v != root => {
                    return Err(Error::DomainMismatch(format!(
                        "parent missing for vertex {v}"
                    )))
                }
                Some(p) if *p >= n => {
                    return Err(Error::DomainMismatch(format!(
                        "parent {p} is not below {n}"
                    )))
                }
                _ => {}
            }
        }
        // A vertex reaches the root iff it does so within n steps.
        let mut reaches = vec![false; n];
        reaches[root] = true;
        for start in 0..n {
            let mut path = Vec::new();
            let mut v = start;
            while !reaches[v] {
                if path.len() > n {
                    return Err(Error::CycleDetected(start));
                }
                path.push(v);
                v = parent[v].expect("non-root vertex has a parent");
            }
            for u in path {
                reaches[u] = true;
            }
        }
        Ok(LabeledTree { root, parent })
    }

    pub fn single() -> Self {
        LabeledTree {
            root: 0,
            parent: vec![None],
        }
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn root(&self) -> Label {
        self.root
    }

    pub fn parent(&self, v: Label) -> Option<Label> {
        self.parent.get(v).copied().flatten()
    }

    pub fn parents(&self) -> &[Option<Label>] {
        &self.parent
    }

    pub fn parent_map(&self) -> BTreeMap<Label, Label> {
        self.parent
            .iter()
            .enumerate()
            .filter_map(|(v, p)| p.map(|p| (v, p)))
            .collect()
    }

    /// Children of `v` in increasing label order.
    pub fn children(&self, v: Label) -> Vec<Label> {
        (0..self.len())
            .filter(|&u| self.parent[u] == Some(v))
            .collect()
    }

    pub fn children_lists(&self) -> Vec<Vec<Label>> {
        let mut lists = vec![Vec::new(); self.len()];
        for (v, p) in self.parent.iter().enumerate() {
            if let Some(p) = p {
                lists[*p].push(v);
            }
        }
        lists
    }

    /// `|T⁻¹(j)|` for every vertex `j`.
    pub fn degrees(&self) -> Vec<usize> {
        let mut degrees = vec![0; self.len()];
        for p in self.parent.iter().flatten() {
            degrees[*p] += 1;
        }
        degrees
    }

    /// Vertices in an order where every parent precedes its children.
    pub fn preorder(&self) -> Vec<Label> {
        let children = self.children_lists();
        let mut order = Vec::with_capacity(self.len());
        let mut stack = vec![self.root];
        while let Some(v) = stack.pop() {
            order.push(v);
            stack.extend(children[v].iter().rev());
        }
        order
    }

    /// `|T_j|` for every vertex `j`.
    pub fn subtree_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![1; self.len()];
        for &v in self.preorder().iter().rev() {
            if let Some(p) = self.parent[v] {
                sizes[p] += sizes[v];
            }
        }
        sizes
    }

    /// Vertex set of the subtree `T_v` above `v` (including `v`).
    pub fn subtree_vertices(&self, v: Label) -> Result<BTreeSet<Label>> {
        if v >= self.len() {
            return Err(Error::UnknownVertex(v));
        }
        let children = self.children_lists();
        let mut set = BTreeSet::new();
        let mut stack = vec![v];
        while let Some(u) = stack.pop() {
            set.insert(u);
            stack.extend(children[u].iter().copied());
        }
        Ok(set)
    }

    /// The subtree `T_v`, relabeled to `{0..|T_v|−1}` preserving the label order.
    pub fn subtree_above(&self, v: Label) -> Result<LabeledTree> {
        let vertices = self.subtree_vertices(v)?;
        Ok(self
            .induced(&vertices)
            .expect("the subtree above a vertex is connected"))
    }

    /// Restriction of the parent function to `vertices`, relabeled order-preservingly.
    ///
    /// Returns `None` unless exactly one vertex of the set has its parent outside it.
    pub fn induced(&self, vertices: &BTreeSet<Label>) -> Option<LabeledTree> {
        let index: BTreeMap<Label, usize> =
            vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut root = None;
        let mut parent = vec![None; vertices.len()];
        for (&v, &i) in &index {
            match self.parent(v).and_then(|p| index.get(&p)) {
                Some(&pi) => parent[i] = Some(pi),
                None => {
                    if root.replace(i).is_some() {
                        return None;
                    }
                }
            }
        }
        LabeledTree::from_parents(root?, parent).ok()
    }

    /// Children labels are greater than their parent's, and the root is 0.
    pub fn is_increasing(&self) -> bool {
        self.root == 0
            && self
                .parent
                .iter()
                .enumerate()
                .all(|(v, p)| p.is_none_or(|p| p < v))
    }

    /// Applies a relabeling `v ↦ map[v]`, which must be a permutation of `0..n`.
    pub fn relabel(&self, map: &[Label]) -> Result<LabeledTree> {
        let n = self.len();
        if map.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                found: map.len(),
            });
        }
        let mut seen = vec![false; n];
        for &m in map {
            if m >= n {
                return Err(Error::EntryOutOfRange { entry: m, n });
            }
            if std::mem::replace(&mut seen[m], true) {
                return Err(Error::DuplicateLabel(m));
            }
        }
        let mut parent = vec![None; n];
        for (v, p) in self.parent.iter().enumerate() {
            parent[map[v]] = p.map(|p| map[p]);
        }
        LabeledTree::from_parents(map[self.root], parent)
    }

    pub fn parse(text: &str) -> Result<Self> {
        parse_tree(text)
    }

    fn render(&self, v: Label, children: &[Vec<Label>], sizes: &[usize]) -> String {
        if children[v].is_empty() {
            return v.to_string();
        }
        let mut parts: Vec<(usize, String)> = children[v]
            .iter()
            .map(|&c| (sizes[c], self.render(c, children, sizes)))
            .collect();
        parts.sort();
        let inner: Vec<String> = parts.into_iter().map(|(_, s)| s).collect();
        format!("{v}[{}]", inner.join(","))
    }
}

impl fmt::Display for LabeledTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let children = self.children_lists();
        let sizes = self.subtree_sizes();
        f.write_str(&self.render(self.root, &children, &sizes))
    }
}

impl std::str::FromStr for LabeledTree {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_tree(s)
    }
}

/// Bracket notation: `tree := label | label '[' tree (',' tree)* ']'`.
pub fn parse_tree(text: &str) -> Result<LabeledTree> {
    let mut parser = BracketParser {
        bytes: text.as_bytes(),
        pos: 0,
        edges: Vec::new(),
        seen: BTreeSet::new(),
    };
    parser.skip_ws();
    let root = parser.tree()?;
    parser.skip_ws();
    if parser.pos != parser.bytes.len() {
        return Err(Error::syntax("trailing input", parser.pos));
    }
    let n = parser.seen.len();
    if parser.seen.iter().next_back() != Some(&(n - 1)) {
        return Err(Error::NonContiguousLabels(n));
    }
    let parent: BTreeMap<Label, Label> = parser.edges.into_iter().collect();
    LabeledTree::new(n, root, &parent)
}

pub fn print_tree(tree: &LabeledTree) -> String {
    tree.to_string()
}

struct BracketParser<'a> {
    bytes: &'a [u8],
    pos: usize,
    edges: Vec<(Label, Label)>,
    seen: BTreeSet<Label>,
}

impl BracketParser<'_> {
    fn skip_ws(&mut self) {
        while self
            .bytes
            .get(self.pos)
            .is_some_and(u8::is_ascii_whitespace)
        {
            self.pos += 1;
        }
    }

    fn label(&mut self) -> Result<Label> {
        self.skip_ws();
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::syntax("expected a label", start));
        }
        let text = std::str::from_utf8(&self.bytes[start..self.pos]).expect("ascii digits");
        let label: Label = text
            .parse()
            .map_err(|_| Error::syntax("label too large", start))?;
        if !self.seen.insert(label) {
            return Err(Error::DuplicateLabel(label));
        }
        Ok(label)
    }

    fn tree(&mut self) -> Result<Label> {
        let label = self.label()?;
        self.skip_ws();
        if self.bytes.get(self.pos) == Some(&b'[') {
            self.pos += 1;
            loop {
                let child = self.tree()?;
                self.edges.push((child, label));
                self.skip_ws();
                match self.bytes.get(self.pos) {
                    Some(b',') => self.pos += 1,
                    Some(b']') => {
                        self.pos += 1;
                        break;
                    }
                    _ => return Err(Error::syntax("expected ',' or ']'", self.pos)),
                }
            }
        }
        Ok(label)
    }
}

/// A forest: a parent function on a finite vertex set where several vertices may be roots.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Forest {
    parent: BTreeMap<Label, Option<Label>>,
}

impl Forest {
    pub fn empty() -> Self {
        Forest::default()
    }

    pub fn new(parent: BTreeMap<Label, Option<Label>>) -> Result<Self> {
        for (&v, p) in &parent {
            if let Some(p) = p {
                if !parent.contains_key(p) {
                    return Err(Error::DomainMismatch(format!(
                        "parent {p} of {v} is outside the vertex set"
                    )));
                }
            }
        }
        let forest = Forest { parent };
        for &start in forest.parent.keys() {
            let mut v = start;
            let mut steps = 0;
            while let Some(p) = forest.parent[&v] {
                v = p;
                steps += 1;
                if steps > forest.parent.len() {
                    return Err(Error::CycleDetected(start));
                }
            }
        }
        Ok(forest)
    }

    /// `tree` restricted to `vertices`: edges leaving the set are cut and their
    /// lower endpoints become roots.
    pub fn restrict(tree: &LabeledTree, vertices: &BTreeSet<Label>) -> Self {
        let parent = vertices
            .iter()
            .map(|&v| (v, tree.parent(v).filter(|p| vertices.contains(p))))
            .collect();
        Forest { parent }
    }

    pub fn vertices(&self) -> impl Iterator<Item = Label> + '_ {
        self.parent.keys().copied()
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn roots(&self) -> Vec<Label> {
        self.parent
            .iter()
            .filter(|(_, p)| p.is_none())
            .map(|(&v, _)| v)
            .collect()
    }

    /// The root of the block containing `v`.
    pub fn root_of(&self, mut v: Label) -> Option<Label> {
        while let Some(p) = *self.parent.get(&v)? {
            v = p;
        }
        Some(v)
    }

    /// The block partition, keyed by block root.
    pub fn blocks(&self) -> BTreeMap<Label, BTreeSet<Label>> {
        let mut blocks: BTreeMap<Label, BTreeSet<Label>> = BTreeMap::new();
        for v in self.vertices() {
            let root = self.root_of(v).expect("vertex belongs to the forest");
            blocks.entry(root).or_default().insert(v);
        }
        blocks
    }

    /// Each block as a tree relabeled to contiguous labels, in block-root order.
    pub fn trees(&self) -> Vec<LabeledTree> {
        self.blocks()
            .into_values()
            .map(|block| {
                let index: BTreeMap<Label, usize> =
                    block.iter().enumerate().map(|(i, &v)| (v, i)).collect();
                let mut root = 0;
                let mut parent = vec![None; block.len()];
                for (&v, &i) in &index {
                    match self.parent[&v] {
                        Some(p) => parent[i] = Some(index[&p]),
                        None => root = i,
                    }
                }
                LabeledTree::from_parents(root, parent).expect("forest blocks are trees")
            })
            .collect()
    }
}

fn check_cap(n: usize, cap: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::DomainMismatch(
            "vertex count must be at least 1".into(),
        ));
    }
    if n > cap {
        return Err(Error::CapExceeded { n, cap });
    }
    Ok(())
}

/// All labeled rooted trees on `{0..n−1}`, ordered by Prüfer code (hence by root last).
pub fn enumerate_labeled(n: usize) -> Result<Vec<LabeledTree>> {
    enumerate_labeled_capped(n, DEFAULT_LABELED_CAP)
}

pub fn enumerate_labeled_capped(n: usize, cap: usize) -> Result<Vec<LabeledTree>> {
    check_cap(n, cap)?;
    let mut sequence = vec![0; n - 1];
    let total = n.pow(n as u32 - 1);
    let mut trees = Vec::with_capacity(total);
    loop {
        trees.push(prufer::decode_unchecked(n, &sequence));
        // odometer increment, last position fastest
        let mut i = sequence.len();
        loop {
            if i == 0 {
                return Ok(trees);
            }
            i -= 1;
            sequence[i] += 1;
            if sequence[i] < n {
                break;
            }
            sequence[i] = 0;
        }
    }
}

pub(crate) fn check_enumeration_cap(n: usize, cap: usize) -> Result<()> {
    check_cap(n, cap)
}
