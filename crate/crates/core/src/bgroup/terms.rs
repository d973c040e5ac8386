//! Subtree and subforest decompositions of an unlabeled tree, aggregated by
//! type with multiplicities, built recursively over the children of the root.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use crate::canonical::{TreeMultiset, UnlabeledTree};

/// `[τ, τ₀]`-weighted decomposition `T₀ → T` of a tree type.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubtreeTerm {
    /// `None` is the empty subtree.
    pub subtree: Option<UnlabeledTree>,
    pub forest: TreeMultiset,
    /// Number of labeled subtrees of a representative with this (subtree, forest) type.
    pub multiplicity: u64,
}

/// Subforest `F ⊑ T` aggregated by the types of `T/F` and of the blocks of `F`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubforestTerm {
    pub quotient: UnlabeledTree,
    pub forest: TreeMultiset,
    pub multiplicity: u64,
}

fn union(a: &TreeMultiset, b: &TreeMultiset) -> TreeMultiset {
    let mut out = a.clone();
    for (tree, n) in b.iter() {
        out.insert(tree.clone(), n);
    }
    out
}

fn with(set: &TreeMultiset, tree: UnlabeledTree) -> TreeMultiset {
    let mut out = set.clone();
    out.insert(tree, 1);
    out
}

type RootedKey = (TreeMultiset, TreeMultiset);

/// Root-containing subtrees, keyed by (children of `T₀`, difference forest).
fn rooted_subtrees(tree: &UnlabeledTree) -> BTreeMap<RootedKey, u64> {
    let mut acc: BTreeMap<RootedKey, u64> = BTreeMap::new();
    acc.insert((TreeMultiset::new(), TreeMultiset::new()), 1);
    for child in tree.children() {
        let options = subtree_terms(child);
        let mut next = BTreeMap::new();
        for ((kept, forest), m) in &acc {
            for option in options.iter() {
                let key = match &option.subtree {
                    Some(sub) => (with(kept, sub.clone()), union(forest, &option.forest)),
                    None => (kept.clone(), union(forest, &option.forest)),
                };
                *next.entry(key).or_default() += m * option.multiplicity;
            }
        }
        acc = next;
    }
    acc
}

fn compute_subtree_terms(tree: &UnlabeledTree) -> Vec<SubtreeTerm> {
    let mut terms = vec![SubtreeTerm {
        subtree: None,
        forest: TreeMultiset::from_trees([tree.clone()]),
        multiplicity: 1,
    }];
    for ((kept, forest), multiplicity) in rooted_subtrees(tree) {
        terms.push(SubtreeTerm {
            subtree: Some(UnlabeledTree::from_terms(
                kept.iter().map(|(t, n)| (t.clone(), n)),
            )),
            forest,
            multiplicity,
        });
    }
    terms
}

/// Every `T₀ → T` for a representative `T` of `tree`, grouped by type. The
/// empty subtree comes first; multiplicities sum to the number of subtrees.
pub fn subtree_terms(tree: &UnlabeledTree) -> Arc<Vec<SubtreeTerm>> {
    static CACHE: OnceLock<Mutex<HashMap<UnlabeledTree, Arc<Vec<SubtreeTerm>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(hit) = cache.lock().unwrap().get(tree) {
        return Arc::clone(hit);
    }
    let terms = Arc::new(compute_subtree_terms(tree));
    cache
        .lock()
        .unwrap()
        .insert(tree.clone(), Arc::clone(&terms));
    terms
}

/// Partial subforest state of a subtree hanging below its parent: the block
/// containing its root, the quotient children of that block, and the
/// finished blocks below.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct Partial {
    block: UnlabeledTree,
    quotient_children: TreeMultiset,
    blocks: TreeMultiset,
}

type Partials = Vec<(Partial, u64)>;

fn compute_partials(tree: &UnlabeledTree) -> Partials {
    // (children of the open block, quotient children, finished blocks)
    let mut acc: BTreeMap<(TreeMultiset, TreeMultiset, TreeMultiset), u64> = BTreeMap::new();
    acc.insert(Default::default(), 1);
    for child in tree.children() {
        let options = partials(child);
        let mut next = BTreeMap::new();
        for ((block_children, quotient_children, blocks), m) in &acc {
            for (p, pm) in options.iter() {
                let weight = m * pm;
                // child joins the open block
                let merged = (
                    with(block_children, p.block.clone()),
                    union(quotient_children, &p.quotient_children),
                    union(blocks, &p.blocks),
                );
                *next.entry(merged).or_default() += weight;
                // child starts a new block
                let quotient = UnlabeledTree::from_terms(
                    p.quotient_children.iter().map(|(t, n)| (t.clone(), n)),
                );
                let cut = (
                    block_children.clone(),
                    with(quotient_children, quotient),
                    with(&union(blocks, &p.blocks), p.block.clone()),
                );
                *next.entry(cut).or_default() += weight;
            }
        }
        acc = next;
    }
    acc.into_iter()
        .map(|((block_children, quotient_children, blocks), m)| {
            let block =
                UnlabeledTree::from_terms(block_children.iter().map(|(t, n)| (t.clone(), n)));
            (
                Partial {
                    block,
                    quotient_children,
                    blocks,
                },
                m,
            )
        })
        .collect()
}

fn partials(tree: &UnlabeledTree) -> Arc<Partials> {
    static CACHE: OnceLock<Mutex<HashMap<UnlabeledTree, Arc<Partials>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(hit) = cache.lock().unwrap().get(tree) {
        return Arc::clone(hit);
    }
    let value = Arc::new(compute_partials(tree));
    cache
        .lock()
        .unwrap()
        .insert(tree.clone(), Arc::clone(&value));
    value
}

/// Every subforest of a representative of `tree`, grouped by quotient and
/// block types; multiplicities sum to `2^(|τ|−1)`.
pub fn subforest_terms(tree: &UnlabeledTree) -> Vec<SubforestTerm> {
    let mut grouped: BTreeMap<(UnlabeledTree, TreeMultiset), u64> = BTreeMap::new();
    for (p, m) in partials(tree).iter() {
        let quotient =
            UnlabeledTree::from_terms(p.quotient_children.iter().map(|(t, n)| (t.clone(), n)));
        let forest = with(&p.blocks, p.block.clone());
        *grouped.entry((quotient, forest)).or_default() += m;
    }
    grouped
        .into_iter()
        .map(|((quotient, forest), multiplicity)| SubforestTerm {
            quotient,
            forest,
            multiplicity,
        })
        .collect()
}
