//! Increasing rooted trees (root 0, every parent label below its child's) and
//! their coding by permutations of `{1, …, n−1}`.
//!
//! The code is built by inserting vertices in label order: vertex `m` attached
//! to parent `p` is inserted at position `p` of the list, shifting later entries
//! right. Decoding removes vertices from the largest down.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::trees::{check_enumeration_cap, Label, LabeledTree};

/// Default largest vertex count for [`enumerate_increasing`] (9! = 362 880 trees).
pub const DEFAULT_INCREASING_CAP: usize = 10;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PermCode(pub Vec<Label>);

impl PermCode {
    /// Checks that the entries are a permutation of `1..=len`.
    pub fn new(entries: Vec<Label>) -> Result<Self> {
        let n = entries.len() + 1;
        let mut seen = vec![false; n];
        for &e in &entries {
            if e == 0 || e >= n {
                return Err(Error::InvalidPermutation(format!(
                    "entry {e} is outside 1..{}",
                    n - 1
                )));
            }
            if std::mem::replace(&mut seen[e], true) {
                return Err(Error::InvalidPermutation(format!("entry {e} repeats")));
            }
        }
        Ok(PermCode(entries))
    }

    pub fn entries(&self) -> &[Label] {
        &self.0
    }
}

impl fmt::Display for PermCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(Label::to_string).collect();
        f.write_str(&parts.join(","))
    }
}

impl FromStr for PermCode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(PermCode(Vec::new()));
        }
        let entries = s
            .split(',')
            .map(|part| {
                part.trim()
                    .parse()
                    .map_err(|_| Error::syntax(format!("bad permutation entry {part:?}"), 0))
            })
            .collect::<Result<Vec<Label>>>()?;
        PermCode::new(entries)
    }
}

/// Every increasing tree on `{0..n−1}`, in lexicographic order of the parent vector.
pub fn enumerate_increasing(n: usize) -> Result<Vec<LabeledTree>> {
    enumerate_increasing_capped(n, DEFAULT_INCREASING_CAP)
}

pub fn enumerate_increasing_capped(n: usize, cap: usize) -> Result<Vec<LabeledTree>> {
    check_enumeration_cap(n, cap)?;
    let mut parent: Vec<Label> = vec![0; n];
    let mut trees = Vec::new();
    loop {
        let slots = std::iter::once(None)
            .chain(parent[1..].iter().map(|&p| Some(p)))
            .collect();
        trees.push(LabeledTree::from_parents(0, slots).expect("parent below child"));
        // vertex v may attach to any of 0..v; the last vertex varies fastest
        let mut v = n;
        loop {
            v -= 1;
            if v == 0 {
                return Ok(trees);
            }
            parent[v] += 1;
            if parent[v] < v {
                break;
            }
            parent[v] = 0;
        }
    }
}

pub fn perm_encode(tree: &LabeledTree) -> Result<PermCode> {
    if !tree.is_increasing() {
        return Err(Error::NotIncreasing);
    }
    let mut code = Vec::with_capacity(tree.len().saturating_sub(1));
    for v in 1..tree.len() {
        let parent = tree.parent(v).expect("non-root vertex");
        code.insert(parent, v);
    }
    Ok(PermCode(code))
}

pub fn perm_decode(n: usize, code: &PermCode) -> Result<LabeledTree> {
    if n == 0 {
        return Err(Error::DomainMismatch(
            "vertex count must be at least 1".into(),
        ));
    }
    if code.0.len() != n - 1 {
        return Err(Error::LengthMismatch {
            expected: n - 1,
            found: code.0.len(),
        });
    }
    let mut list = PermCode::new(code.0.clone())?.0;
    let mut parent = vec![None; n];
    for v in (1..n).rev() {
        let position = list
            .iter()
            .position(|&e| e == v)
            .expect("validated permutation contains every label");
        list.remove(position);
        parent[v] = Some(position);
    }
    LabeledTree::from_parents(0, parent)
}
