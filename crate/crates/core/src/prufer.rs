//! The Prüfer correspondence between labeled rooted trees on `n` labels and
//! label sequences of length `n − 1`.
//!
//! Encoding repeatedly strips the smallest leaf and records its parent, so the
//! last entry is always the root. Decoding restores the edges in the same order.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::trees::{Label, LabeledTree};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PruferSequence(pub Vec<Label>);

impl PruferSequence {
    pub fn entries(&self) -> &[Label] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for PruferSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(Label::to_string).collect();
        f.write_str(&parts.join(","))
    }
}

impl FromStr for PruferSequence {
    type Err = Error;

    /// Comma-separated labels; the empty string is the empty sequence.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(PruferSequence(Vec::new()));
        }
        let mut offset = 0;
        let mut entries = Vec::new();
        for part in s.split(',') {
            let label = part
                .trim()
                .parse()
                .map_err(|_| Error::syntax(format!("bad sequence entry {part:?}"), offset))?;
            entries.push(label);
            offset += part.len() + 1;
        }
        Ok(PruferSequence(entries))
    }
}

pub fn encode(tree: &LabeledTree) -> PruferSequence {
    let n = tree.len();
    let mut remaining = tree.degrees();
    let mut leaves: BinaryHeap<Reverse<Label>> = (0..n)
        .filter(|&v| v != tree.root() && remaining[v] == 0)
        .map(Reverse)
        .collect();
    let mut sequence = Vec::with_capacity(n.saturating_sub(1));
    while let Some(Reverse(leaf)) = leaves.pop() {
        let parent = tree.parent(leaf).expect("leaves are not the root");
        sequence.push(parent);
        remaining[parent] -= 1;
        if remaining[parent] == 0 && parent != tree.root() {
            leaves.push(Reverse(parent));
        }
    }
    PruferSequence(sequence)
}

pub fn decode(n: usize, sequence: &PruferSequence) -> Result<LabeledTree> {
    if n == 0 {
        return Err(Error::DomainMismatch(
            "vertex count must be at least 1".into(),
        ));
    }
    if sequence.len() != n - 1 {
        return Err(Error::LengthMismatch {
            expected: n - 1,
            found: sequence.len(),
        });
    }
    if let Some(&entry) = sequence.0.iter().find(|&&e| e >= n) {
        return Err(Error::EntryOutOfRange { entry, n });
    }
    Ok(decode_unchecked(n, &sequence.0))
}

/// Decoding for sequences already known to have length `n − 1` and entries below `n`.
pub(crate) fn decode_unchecked(n: usize, sequence: &[Label]) -> LabeledTree {
    let root = sequence.last().copied().unwrap_or(0);
    let mut pending = vec![0usize; n];
    for &s in sequence {
        pending[s] += 1;
    }
    // Unused vertices that no longer occur in the rest of the sequence.
    let mut available: BinaryHeap<Reverse<Label>> =
        (0..n).filter(|&v| pending[v] == 0).map(Reverse).collect();
    let mut parent = vec![None; n];
    for &target in sequence {
        let Reverse(v) = available.pop().expect("a free vertex exists at every step");
        parent[v] = Some(target);
        pending[target] -= 1;
        if pending[target] == 0 {
            available.push(Reverse(target));
        }
    }
    LabeledTree::from_parents(root, parent).expect("every sequence decodes to a tree")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trees::parse_tree;

    /// Shifts a one-based sequence such as the ones printed in the literature.
    fn one_based(text: &str) -> PruferSequence {
        PruferSequence(
            text.chars()
                .map(|c| c.to_digit(10).unwrap() as usize - 1)
                .collect(),
        )
    }

    #[test]
    fn encode_worked_instances() {
        // 2[13] -> 22
        assert_eq!(encode(&parse_tree("1[0,2]").unwrap()), one_based("22"));
        // 2[1[3]] -> 12
        assert_eq!(encode(&parse_tree("1[0[2]]").unwrap()), one_based("12"));
        // 3[4,1[2,5]] -> 1313
        assert_eq!(
            encode(&parse_tree("2[3,0[1,4]]").unwrap()),
            one_based("1313")
        );
        assert!(encode(&LabeledTree::single()).is_empty());
    }

    #[test]
    fn decode_worked_instances() {
        assert_eq!(
            decode(3, &one_based("22")).unwrap(),
            parse_tree("1[0,2]").unwrap()
        );
        assert_eq!(
            decode(5, &one_based("1313")).unwrap(),
            parse_tree("2[3,0[1,4]]").unwrap()
        );
        assert_eq!(
            decode(1, &PruferSequence(vec![])).unwrap(),
            LabeledTree::single()
        );
    }

    #[test]
    fn decode_errors() {
        assert_eq!(
            decode(3, &PruferSequence(vec![0])),
            Err(Error::LengthMismatch {
                expected: 2,
                found: 1
            })
        );
        assert_eq!(
            decode(3, &PruferSequence(vec![0, 3])),
            Err(Error::EntryOutOfRange { entry: 3, n: 3 })
        );
    }

    #[test]
    fn sequence_text() {
        let s: PruferSequence = "1, 3,0".parse().unwrap();
        assert_eq!(s, PruferSequence(vec![1, 3, 0]));
        assert_eq!(s.to_string(), "1,3,0");
        assert!("".parse::<PruferSequence>().unwrap().is_empty());
        assert!("1,x".parse::<PruferSequence>().is_err());
    }
}
