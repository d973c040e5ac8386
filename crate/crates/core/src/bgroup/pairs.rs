//! Vertex-subset view of a labeled tree: root-containing subtrees with their
//! difference forests, and subforests with their quotient trees.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigUint;
use num_traits::One;

use crate::canonical::{canonicalize, tree_factorial_by_subtrees, UnlabeledTree};
use crate::error::{Error, Result};
use crate::num::{from_natural, Rational};
use crate::trees::{Forest, Label, LabeledTree};

/// Largest tree accepted by the subset enumerations (2¹¹ subsets).
pub const SUBSET_CAP: usize = 12;

/// A root-containing subtree `T₀ → T` together with the difference forest `T ∖ T₀`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubtreePair {
    /// `U₀`; empty for the empty subtree object.
    pub vertices: BTreeSet<Label>,
    /// `T₀` relabeled to contiguous labels, `None` for the empty object.
    pub subtree: Option<LabeledTree>,
    /// `T` restricted to `U ∖ U₀`.
    pub forest: Forest,
}

/// A subforest `F ⊑ T` given by its root set, with the quotient tree `T/F`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubforestPair {
    /// `R`, always containing the root of `T`.
    pub roots: BTreeSet<Label>,
    /// `T` restricted to `U ∖ (R ∖ blocks)`: every vertex, with the edges into `R` cut.
    pub forest: Forest,
    /// `T/F` on the label set `R`, relabeled order-preservingly to `0..|R|`.
    pub quotient: LabeledTree,
}

fn check_cap(tree: &LabeledTree) -> Result<()> {
    if tree.len() > SUBSET_CAP {
        return Err(Error::CapExceeded {
            n: tree.len(),
            cap: SUBSET_CAP,
        });
    }
    Ok(())
}

/// Whether `vertices` is empty or contains the root and is closed under parents.
pub fn is_rooted_subtree(tree: &LabeledTree, vertices: &BTreeSet<Label>) -> bool {
    vertices.is_empty()
        || (vertices.contains(&tree.root())
            && vertices
                .iter()
                .all(|&v| v < tree.len() && tree.parent(v).is_none_or(|p| vertices.contains(&p))))
}

/// Subsets of the non-root vertices, each with the root added.
fn rooted_subsets(tree: &LabeledTree) -> impl Iterator<Item = BTreeSet<Label>> + '_ {
    let others: Vec<Label> = (0..tree.len()).filter(|&v| v != tree.root()).collect();
    (0u64..1 << others.len()).map(move |mask| {
        std::iter::once(tree.root())
            .chain(
                others
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, &v)| v),
            )
            .collect()
    })
}

/// Every `T₀ → T`, including the empty subtree (first) and `T` itself.
pub fn subtree_pairs(tree: &LabeledTree) -> Result<Vec<SubtreePair>> {
    check_cap(tree)?;
    let all: BTreeSet<Label> = (0..tree.len()).collect();
    let mut pairs = vec![SubtreePair {
        vertices: BTreeSet::new(),
        subtree: None,
        forest: Forest::restrict(tree, &all),
    }];
    for vertices in rooted_subsets(tree).filter(|s| is_rooted_subtree(tree, s)) {
        let rest: BTreeSet<Label> = all.difference(&vertices).copied().collect();
        pairs.push(SubtreePair {
            subtree: tree.induced(&vertices),
            forest: Forest::restrict(tree, &rest),
            vertices,
        });
    }
    Ok(pairs)
}

/// The quotient `T/F` on the root set: `j ∈ R ∖ {r}` maps to the root of the
/// block containing `T(j)`.
fn quotient(tree: &LabeledTree, roots: &BTreeSet<Label>, forest: &Forest) -> LabeledTree {
    let index: BTreeMap<Label, usize> = roots.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut parent = vec![None; roots.len()];
    for (&j, &i) in &index {
        if let Some(p) = tree.parent(j) {
            let block_root = forest.root_of(p).expect("parent is a vertex");
            parent[i] = Some(index[&block_root]);
        }
    }
    LabeledTree::from_parents(index[&tree.root()], parent).expect("quotient of a tree is a tree")
}

/// One subforest per root set `R ∋ r`: `2^(n−1)` pairs.
pub fn subforest_pairs(tree: &LabeledTree) -> Result<Vec<SubforestPair>> {
    check_cap(tree)?;
    Ok(rooted_subsets(tree)
        .map(|roots| {
            let parent = (0..tree.len())
                .map(|v| (v, tree.parent(v).filter(|_| !roots.contains(&v))))
                .collect();
            let forest = Forest::new(parent).expect("cutting edges of a tree leaves a forest");
            let quotient = quotient(tree, &roots, &forest);
            SubforestPair {
                roots,
                forest,
                quotient,
            }
        })
        .collect())
}

/// `[τ, τ₀]`: root-containing subtrees of a representative of `τ` of type `τ₀`.
pub fn multiplicity(tree: &UnlabeledTree, subtree: &UnlabeledTree) -> Result<u64> {
    multiplicity_in(&tree.representative(), subtree)
}

/// `[τ, τ₀]` counted on a caller-chosen labeled representative.
pub fn multiplicity_in(tree: &LabeledTree, subtree: &UnlabeledTree) -> Result<u64> {
    Ok(subtree_pairs(tree)?
        .iter()
        .filter(|pair| pair.subtree.as_ref().map(canonicalize).as_ref() == Some(subtree))
        .count() as u64)
}

/// `T! / (T₀! Π_{T′ ∈ T∖T₀} T′!)`; the empty subtree has factorial 1.
pub fn tree_binomial(tree: &LabeledTree, subtree: &BTreeSet<Label>) -> Result<Rational> {
    if !is_rooted_subtree(tree, subtree) {
        return Err(Error::NotASubtree(format!(
            "{subtree:?} is not a root-containing subtree of {tree}"
        )));
    }
    let all: BTreeSet<Label> = (0..tree.len()).collect();
    let rest: BTreeSet<Label> = all.difference(subtree).copied().collect();
    let below = match tree.induced(subtree) {
        Some(t0) => tree_factorial_by_subtrees(&t0),
        None => BigUint::one(),
    };
    let forest = Forest::restrict(tree, &rest)
        .trees()
        .iter()
        .fold(BigUint::one(), |acc, t| acc * tree_factorial_by_subtrees(t));
    Ok(from_natural(&tree_factorial_by_subtrees(tree)) / from_natural(&(below * forest)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical::parse_unlabeled;
    use crate::num::{int, rat};
    use crate::trees::parse_tree;

    /// 1[3,2[4]] shifted to zero-based labels.
    fn figure_tree() -> LabeledTree {
        parse_tree("0[2,1[3]]").unwrap()
    }

    #[test]
    fn subtree_pair_counts() {
        assert_eq!(subtree_pairs(&LabeledTree::single()).unwrap().len(), 2);
        assert_eq!(
            subtree_pairs(&parse_tree("0[1]").unwrap()).unwrap().len(),
            3
        );
        let pairs = subtree_pairs(&figure_tree()).unwrap();
        let mut sizes: Vec<usize> = pairs.iter().map(|p| p.vertices.len()).collect();
        sizes.sort_unstable_by(|a, b| b.cmp(a));
        assert_eq!(sizes, [4, 3, 3, 2, 2, 1, 0]);
        let mut forest_sizes: Vec<usize> = pairs.iter().map(|p| p.forest.roots().len()).collect();
        forest_sizes.sort_unstable();
        assert_eq!(forest_sizes, [0, 1, 1, 1, 1, 2, 2]);
        assert!(pairs[0].subtree.is_none());
        assert_eq!(pairs[0].forest.trees(), vec![figure_tree()]);
    }

    #[test]
    fn subtree_pairs_match_brute_force_closure() {
        // 2-chain: ∅, {0}, {0,1}
        let chain = parse_tree("0[1]").unwrap();
        let sets: Vec<Vec<Label>> = subtree_pairs(&chain)
            .unwrap()
            .into_iter()
            .map(|p| p.vertices.into_iter().collect())
            .collect();
        assert_eq!(sets, vec![vec![], vec![0], vec![0, 1]]);
    }

    #[test]
    fn subforests_of_figure_tree() {
        let pairs = subforest_pairs(&figure_tree()).unwrap();
        assert_eq!(pairs.len(), 8);
        let mut trees: Vec<usize> = pairs.iter().map(|p| p.forest.roots().len()).collect();
        trees.sort_unstable();
        assert_eq!(trees, [1, 2, 2, 2, 3, 3, 3, 4]);
        let mut quotient_sizes: Vec<usize> = pairs.iter().map(|p| p.quotient.len()).collect();
        quotient_sizes.sort_unstable();
        assert_eq!(quotient_sizes, [1, 2, 2, 2, 3, 3, 3, 4]);
        let full = pairs.iter().find(|p| p.roots.len() == 4).unwrap();
        assert_eq!(full.quotient, figure_tree());
        let single = subforest_pairs(&LabeledTree::single()).unwrap();
        assert_eq!(single.len(), 1);
        assert_eq!(single[0].quotient, LabeledTree::single());
    }

    #[test]
    fn quotient_contracts_uncut_edges() {
        // chain 0-1-2-3 with roots {0, 2}: blocks {0,1}, {2,3}; quotient is a 2-chain
        let chain = parse_tree("0[1[2[3]]]").unwrap();
        let pair = subforest_pairs(&chain)
            .unwrap()
            .into_iter()
            .find(|p| p.roots == BTreeSet::from([0, 2]))
            .unwrap();
        assert_eq!(pair.quotient.to_string(), "0[1]");
        let blocks: Vec<String> = pair.forest.trees().iter().map(|t| t.to_string()).collect();
        assert_eq!(blocks, ["0[1]", "0[1]"]);
    }

    #[test]
    fn multiplicity_examples() {
        let three = parse_unlabeled("3").unwrap();
        assert_eq!(
            multiplicity(&three, &parse_unlabeled("2").unwrap()).unwrap(),
            3
        );
        assert_eq!(
            multiplicity(&three, &parse_unlabeled("1").unwrap()).unwrap(),
            3
        );
        assert_eq!(
            multiplicity(&three, &parse_unlabeled("0").unwrap()).unwrap(),
            1
        );
        assert_eq!(multiplicity(&three, &three).unwrap(), 1);
    }

    #[test]
    fn binomials_of_figure_tree() {
        let tree = figure_tree();
        let mut values: Vec<Rational> = subtree_pairs(&tree)
            .unwrap()
            .iter()
            .map(|p| tree_binomial(&tree, &p.vertices).unwrap())
            .collect();
        values.sort();
        let mut expected = vec![int(1), rat(4, 3), rat(8, 3), int(2), int(4), int(4), int(1)];
        expected.sort();
        assert_eq!(values, expected);
        assert_eq!(values.iter().sum::<Rational>(), int(16));
    }

    #[test]
    fn binomial_edge_cases() {
        let chain = parse_tree("0[1[2]]").unwrap();
        assert_eq!(tree_binomial(&chain, &BTreeSet::from([0])).unwrap(), int(3));
        assert_eq!(
            tree_binomial(&chain, &BTreeSet::from([0, 1, 2])).unwrap(),
            int(1)
        );
        assert_eq!(
            tree_binomial(&chain, &BTreeSet::from([1]))
                .unwrap_err()
                .name(),
            "NotASubtree"
        );
        assert_eq!(
            tree_binomial(&chain, &BTreeSet::from([0, 2]))
                .unwrap_err()
                .name(),
            "NotASubtree"
        );
    }

    #[test]
    fn cap_is_enforced() {
        let big = UnlabeledTree::chain(SUBSET_CAP + 1).representative();
        assert_eq!(subtree_pairs(&big).unwrap_err().name(), "CapExceeded");
        assert_eq!(subforest_pairs(&big).unwrap_err().name(), "CapExceeded");
    }
}
