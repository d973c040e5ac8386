//! Coefficient maps on rooted trees and their two convolutions.
//!
//! Composition `c = a * b` sums over root-containing subtrees,
//! `c(T) = Σ_{T₀→T} b(T₀) a^×(T∖T₀)`, and realizes `f^c(t,g) = f^b(t, f^a(t,g))`.
//! Substitution `c = a ⋆ b` sums over subforests,
//! `c(T) = Σ_{F⊑T} b(T/F) a^×(F)`, and realizes `f^c(t,β,g) = f^b(1, f^a(t,β,·), g)`.
//!
//! The operations work per unlabeled tree through the aggregated tables in
//! [`terms`]; [`compose_labeled`] and [`substitute_labeled`] evaluate the same
//! sums directly over vertex subsets of a labeled tree.

mod coeffs;
pub mod pairs;
pub mod terms;

use num_traits::{One, Zero};

pub use coeffs::{bar_transform, exact_coeffs, trees_up_to, unbar_transform, CoefficientMap};
pub use pairs::{
    is_rooted_subtree, multiplicity, multiplicity_in, subforest_pairs, subtree_pairs,
    tree_binomial, SubforestPair, SubtreePair, SUBSET_CAP,
};
pub use terms::{subforest_terms, subtree_terms, SubforestTerm, SubtreeTerm};

use crate::canonical::{canonicalize, TreeMultiset, UnlabeledTree};
use crate::error::{Error, Result};
use crate::num::{pow, Rational};
use crate::trees::{Forest, LabeledTree};

/// `a^×(F) = Π a(τ′)^N(τ′)`.
fn forest_product(a: &CoefficientMap, forest: &TreeMultiset) -> Result<Rational> {
    forest.iter().try_fold(Rational::one(), |acc, (tree, n)| {
        Ok(acc * pow(a.get(tree)?, n))
    })
}

fn labeled_forest_product(a: &CoefficientMap, forest: &Forest) -> Result<Rational> {
    forest
        .trees()
        .iter()
        .try_fold(Rational::one(), |acc, t| Ok(acc * a.get(&canonicalize(t))?))
}

fn check_orders(maps: &[&CoefficientMap], order: usize) -> Result<()> {
    maps.iter().try_for_each(|m| m.require_order(order))
}

/// `a * b` through order `order`; requires `a(∅) = 1`.
pub fn compose(a: &CoefficientMap, b: &CoefficientMap, order: usize) -> Result<CoefficientMap> {
    if !a.in_composition_group() {
        return Err(Error::NotComposable(format!(
            "the first factor needs a(∅) = 1, found {}",
            a.empty()
        )));
    }
    check_orders(&[a, b], order)?;
    let mut out = CoefficientMap::zero(order);
    out.set_empty(b.empty().clone());
    for tree in trees_up_to(order) {
        out.set(&tree, compose_tree(a, b, &tree)?)?;
    }
    Ok(out)
}

fn compose_tree(a: &CoefficientMap, b: &CoefficientMap, tree: &UnlabeledTree) -> Result<Rational> {
    subtree_terms(tree)
        .iter()
        .try_fold(Rational::zero(), |acc, term| {
            let weight = Rational::from_integer(term.multiplicity.into());
            Ok(acc
                + weight
                    * b.get_or_empty(term.subtree.as_ref())?
                    * forest_product(a, &term.forest)?)
        })
}

/// `(a * b)(T)` summed over the vertex subsets of a labeled tree.
pub fn compose_labeled(
    a: &CoefficientMap,
    b: &CoefficientMap,
    tree: &LabeledTree,
) -> Result<Rational> {
    subtree_pairs(tree)?
        .iter()
        .try_fold(Rational::zero(), |acc, pair| {
            let t0 = pair.subtree.as_ref().map(canonicalize);
            Ok(acc + b.get_or_empty(t0.as_ref())? * labeled_forest_product(a, &pair.forest)?)
        })
}

/// Composition in barred coordinates `c̄(T) = c(T) T!`, weighted by tree
/// binomials: `c̄(T) = Σ_{T₀→T} binom(T, T₀) b̄(T₀) ā^×(T∖T₀)`.
pub fn compose_bar(
    a_bar: &CoefficientMap,
    b_bar: &CoefficientMap,
    order: usize,
) -> Result<CoefficientMap> {
    if !a_bar.in_composition_group() {
        return Err(Error::NotComposable(format!(
            "the first factor needs a(∅) = 1, found {}",
            a_bar.empty()
        )));
    }
    check_orders(&[a_bar, b_bar], order)?;
    let mut out = CoefficientMap::zero(order);
    out.set_empty(b_bar.empty().clone());
    for tree in trees_up_to(order) {
        let labeled = tree.representative();
        let mut value = Rational::zero();
        for pair in subtree_pairs(&labeled)? {
            let t0 = pair.subtree.as_ref().map(canonicalize);
            value += tree_binomial(&labeled, &pair.vertices)?
                * b_bar.get_or_empty(t0.as_ref())?
                * labeled_forest_product(a_bar, &pair.forest)?;
        }
        out.set(&tree, value)?;
    }
    Ok(out)
}

/// The inverse in the composition group, solved order by order from `a * x = δ_∅`.
pub fn compose_inverse(a: &CoefficientMap, order: usize) -> Result<CoefficientMap> {
    if !a.in_composition_group() {
        return Err(Error::NotInGroup(format!(
            "composition inverse needs a(∅) = 1, found {}",
            a.empty()
        )));
    }
    a.require_order(order)?;
    let mut x = CoefficientMap::delta_empty(order);
    for tree in trees_up_to(order) {
        // the full subtree contributes x(T) a^×(∅) = x(T)
        let mut rest = Rational::zero();
        for term in subtree_terms(&tree).iter() {
            if term.subtree.as_ref() == Some(&tree) {
                continue;
            }
            rest += Rational::from_integer(term.multiplicity.into())
                * x.get_or_empty(term.subtree.as_ref())?
                * forest_product(a, &term.forest)?;
        }
        x.set(&tree, -rest)?;
    }
    Ok(x)
}

/// `a ⋆ b` through order `order`; requires `a(∅) = 0`.
pub fn substitute(a: &CoefficientMap, b: &CoefficientMap, order: usize) -> Result<CoefficientMap> {
    if !a.in_substitution_algebra() {
        return Err(Error::NotSubstitutable(format!(
            "the first factor needs a(∅) = 0, found {}",
            a.empty()
        )));
    }
    check_orders(&[a, b], order)?;
    let mut out = CoefficientMap::zero(order);
    out.set_empty(b.empty().clone());
    for tree in trees_up_to(order) {
        let mut value = Rational::zero();
        for term in subforest_terms(&tree) {
            value += Rational::from_integer(term.multiplicity.into())
                * b.get(&term.quotient)?
                * forest_product(a, &term.forest)?;
        }
        out.set(&tree, value)?;
    }
    Ok(out)
}

/// `(a ⋆ b)(T)` summed over the root sets of a labeled tree.
pub fn substitute_labeled(
    a: &CoefficientMap,
    b: &CoefficientMap,
    tree: &LabeledTree,
) -> Result<Rational> {
    subforest_pairs(tree)?
        .iter()
        .try_fold(Rational::zero(), |acc, pair| {
            Ok(acc
                + b.get(&canonicalize(&pair.quotient))? * labeled_forest_product(a, &pair.forest)?)
        })
}

/// Solves `x ⋆ b = target` for `x` with `x(∅) = 0`.
///
/// The one-block subforest contributes `x(T) b(•)`; every other term only
/// involves `x` on smaller trees, so `x` is determined order by order.
pub fn solve_substitution(
    target: &CoefficientMap,
    b: &CoefficientMap,
    order: usize,
) -> Result<CoefficientMap> {
    check_orders(&[target, b], order)?;
    if target.empty() != b.empty() {
        return Err(Error::NonInvertible(format!(
            "x ⋆ b keeps b(∅) = {}, but the target has {}",
            b.empty(),
            target.empty()
        )));
    }
    let lead = match b.single() {
        Some(v) if !v.is_zero() => v.clone(),
        _ if order == 0 => Rational::one(),
        _ => return Err(Error::NonInvertible("b(•) is zero".into())),
    };
    let single_forest = |tree: &UnlabeledTree| TreeMultiset::from_trees([tree.clone()]);
    let mut x = CoefficientMap::zero(order);
    for tree in trees_up_to(order) {
        let own = single_forest(&tree);
        let mut rest = Rational::zero();
        for term in subforest_terms(&tree) {
            if term.forest == own {
                continue;
            }
            rest += Rational::from_integer(term.multiplicity.into())
                * b.get(&term.quotient)?
                * forest_product(&x, &term.forest)?;
        }
        x.set(&tree, (target.get(&tree)? - rest) / &lead)?;
    }
    Ok(x)
}

/// The inverse in the substitution group: `x ⋆ a = δ_• = a ⋆ x`.
pub fn substitute_inverse(a: &CoefficientMap, order: usize) -> Result<CoefficientMap> {
    if !a.in_substitution_algebra() {
        return Err(Error::NonInvertible(format!(
            "substitution inverse needs a(∅) = 0, found {}",
            a.empty()
        )));
    }
    solve_substitution(&CoefficientMap::delta_single(order), a, order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical::{enumerate_unlabeled, parse_unlabeled};
    use crate::num::{int, rat};
    use crate::trees::parse_tree;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn t(s: &str) -> UnlabeledTree {
        parse_unlabeled(s).unwrap()
    }

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    /// A second labeling of the representative: reverse the labels.
    fn reversed(tree: &UnlabeledTree) -> LabeledTree {
        let rep = tree.representative();
        let n = rep.len();
        let map: Vec<usize> = (0..n).map(|v| n - 1 - v).collect();
        rep.relabel(&map).unwrap()
    }

    #[test]
    fn compose_bush_with_multiplicities() {
        let mut r = rng(1);
        let a = CoefficientMap::random(4, int(1), &mut r);
        let b = CoefficientMap::random(4, int(1), &mut r);
        let c = compose(&a, &b, 4).unwrap();
        let (a0, b0) = (a.get(&t("0")).unwrap(), b.get(&t("0")).unwrap());
        let expected = b.get(&t("3")).unwrap()
            + int(3) * b.get(&t("2")).unwrap() * a0
            + int(3) * b.get(&t("1")).unwrap() * a0 * a0
            + b0 * a0 * a0 * a0
            + a.get(&t("3")).unwrap();
        assert_eq!(c.get(&t("3")).unwrap(), &expected);
        assert_eq!(c.empty(), &int(1));
    }

    #[test]
    fn compose_labeled_cherry() {
        // 1[23] is the bush with two leaves: b(1[23]) + b(1[2])a(3) + b(1[3])a(2) + b(1)a(2)a(3) + a(1[23])
        let mut r = rng(2);
        let a = CoefficientMap::random(3, int(1), &mut r);
        let b = CoefficientMap::random(3, int(1), &mut r);
        let (cherry, edge, dot) = (t("2"), t("1"), t("0"));
        let ga = |x: &UnlabeledTree| a.get(x).unwrap().clone();
        let gb = |x: &UnlabeledTree| b.get(x).unwrap().clone();
        let expected = gb(&cherry)
            + gb(&edge) * ga(&dot)
            + gb(&edge) * ga(&dot)
            + gb(&dot) * ga(&dot) * ga(&dot)
            + ga(&cherry);
        let labeled = parse_tree("0[1,2]").unwrap();
        assert_eq!(compose_labeled(&a, &b, &labeled).unwrap(), expected);
        assert_eq!(compose(&a, &b, 3).unwrap().get(&cherry).unwrap(), &expected);
    }

    #[test]
    fn unlabeled_and_labeled_routes_agree() {
        let mut r = rng(3);
        for _ in 0..3 {
            let a = CoefficientMap::random(5, int(1), &mut r);
            let b = CoefficientMap::random(5, rat(2, 3), &mut r);
            let c = compose(&a, &b, 5).unwrap();
            let mut s_a = CoefficientMap::random(5, int(0), &mut r);
            s_a.set_empty(int(0));
            let s = substitute(&s_a, &b, 5).unwrap();
            for tree in trees_up_to(5) {
                for labeled in [tree.representative(), reversed(&tree)] {
                    assert_eq!(
                        &compose_labeled(&a, &b, &labeled).unwrap(),
                        c.get(&tree).unwrap()
                    );
                    assert_eq!(
                        &substitute_labeled(&s_a, &b, &labeled).unwrap(),
                        s.get(&tree).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn composition_identities() {
        let mut r = rng(4);
        let a = CoefficientMap::random(5, int(1), &mut r);
        let id = CoefficientMap::delta_empty(5);
        assert_eq!(compose(&a, &id, 5).unwrap(), a);
        assert_eq!(compose(&id, &a, 5).unwrap(), a);
        assert_eq!(compose_inverse(&id, 5).unwrap(), id);
    }

    #[test]
    fn composition_inverse_and_associativity() {
        let mut r = rng(5);
        let a = CoefficientMap::random(5, int(1), &mut r);
        let b = CoefficientMap::random(5, int(1), &mut r);
        let c = CoefficientMap::random(5, int(1), &mut r);
        let id = CoefficientMap::delta_empty(5);
        let inv = compose_inverse(&a, 5).unwrap();
        assert_eq!(compose(&a, &inv, 5).unwrap(), id);
        assert_eq!(compose(&inv, &a, 5).unwrap(), id);
        assert_eq!(inv.single().unwrap(), &-a.single().unwrap());
        let left = compose(&compose(&a, &b, 5).unwrap(), &c, 5).unwrap();
        let right = compose(&a, &compose(&b, &c, 5).unwrap(), 5).unwrap();
        assert_eq!(left, right);
        let e = exact_coeffs(6);
        let e_inv = compose_inverse(&e, 6).unwrap();
        assert_eq!(
            compose(&e, &e_inv, 6).unwrap(),
            CoefficientMap::delta_empty(6)
        );
    }

    #[test]
    fn doubling_of_the_flow() {
        let e = exact_coeffs(6);
        let twice = compose(&e, &e, 6).unwrap();
        for (tree, value) in twice.iter() {
            assert_eq!(value, &(int(1 << tree.size()) * e.get(tree).unwrap()));
        }
        let ones = bar_transform(&e);
        let twice_bar = compose_bar(&ones, &ones, 6).unwrap();
        assert_eq!(twice_bar, bar_transform(&twice));
        assert!(twice_bar
            .iter()
            .all(|(tree, v)| v == &int(1 << tree.size())));
    }

    #[test]
    fn composition_errors() {
        let z = CoefficientMap::zero(3);
        assert_eq!(compose(&z, &z, 3).unwrap_err().name(), "NotComposable");
        assert_eq!(compose_inverse(&z, 3).unwrap_err().name(), "NotInGroup");
        let id = CoefficientMap::delta_empty(3);
        assert_eq!(compose(&id, &id, 4).unwrap_err().name(), "OrderExceeded");
    }

    #[test]
    fn substitution_small_trees() {
        let mut r = rng(6);
        let mut a = CoefficientMap::random(3, int(0), &mut r);
        a.set_empty(int(0));
        let b = CoefficientMap::random(3, rat(-1, 2), &mut r);
        let c = substitute(&a, &b, 3).unwrap();
        let ga = |s: &str| a.get(&t(s)).unwrap().clone();
        let gb = |s: &str| b.get(&t(s)).unwrap().clone();
        assert_eq!(c.get(&t("0")).unwrap(), &(ga("0") * gb("0")));
        assert_eq!(
            c.get(&t("1")).unwrap(),
            &(ga("1") * gb("0") + ga("0") * ga("0") * gb("1"))
        );
        assert_eq!(
            c.get(&t("1[1]")).unwrap(),
            &(ga("1[1]") * gb("0")
                + int(2) * ga("0") * ga("1") * gb("1")
                + ga("0") * ga("0") * ga("0") * gb("1[1]"))
        );
        assert_eq!(c.empty(), &rat(-1, 2));
    }

    #[test]
    fn substitution_group_axioms() {
        let mut r = rng(7);
        let normalized = |r: &mut ChaCha8Rng| {
            let mut m = CoefficientMap::random(5, int(0), r);
            m.set(&UnlabeledTree::single(), int(1)).unwrap();
            m
        };
        let (a, b, c) = (normalized(&mut r), normalized(&mut r), normalized(&mut r));
        let id = CoefficientMap::delta_single(5);
        assert_eq!(substitute(&a, &id, 5).unwrap(), a);
        assert_eq!(substitute(&id, &a, 5).unwrap(), a);
        let left = substitute(&substitute(&a, &b, 5).unwrap(), &c, 5).unwrap();
        let right = substitute(&a, &substitute(&b, &c, 5).unwrap(), 5).unwrap();
        assert_eq!(left, right);
        let inv = substitute_inverse(&a, 5).unwrap();
        assert_eq!(substitute(&inv, &a, 5).unwrap(), id);
        assert_eq!(substitute(&a, &inv, 5).unwrap(), id);
        assert_eq!(substitute_inverse(&id, 5).unwrap(), id);
    }

    #[test]
    fn unnormalized_substitution_inverse() {
        let mut r = rng(8);
        let mut a = CoefficientMap::random(5, int(0), &mut r);
        a.set(&UnlabeledTree::single(), rat(-3, 2)).unwrap();
        let inv = substitute_inverse(&a, 5).unwrap();
        let id = CoefficientMap::delta_single(5);
        assert_eq!(substitute(&inv, &a, 5).unwrap(), id);
        assert_eq!(substitute(&a, &inv, 5).unwrap(), id);
    }

    #[test]
    fn solving_substitutions() {
        let e = exact_coeffs(5);
        assert_eq!(
            solve_substitution(&e, &e, 5).unwrap(),
            CoefficientMap::delta_single(5)
        );
        let euler =
            CoefficientMap::from_fn(
                5,
                int(1),
                |tree| {
                    if tree.is_single() {
                        int(1)
                    } else {
                        int(0)
                    }
                },
            );
        let modified = solve_substitution(&euler, &e, 5).unwrap();
        assert_eq!(substitute(&modified, &e, 5).unwrap(), euler);
        // modified field of the Euler method starts with a(•) = 1, a(1) = −1/2
        assert_eq!(modified.get(&t("1")).unwrap(), &rat(-1, 2));
    }

    #[test]
    fn substitution_errors() {
        let e = exact_coeffs(3);
        assert_eq!(
            substitute(&e, &e, 3).unwrap_err().name(),
            "NotSubstitutable"
        );
        let z = CoefficientMap::zero(3);
        assert_eq!(
            substitute_inverse(&z, 3).unwrap_err().name(),
            "NonInvertible"
        );
        assert_eq!(
            substitute_inverse(&e, 3).unwrap_err().name(),
            "NonInvertible"
        );
        assert_eq!(
            solve_substitution(&CoefficientMap::delta_single(3), &e, 3)
                .unwrap_err()
                .name(),
            "NonInvertible"
        );
    }

    #[test]
    fn multiplicities_are_label_independent() {
        for n in 1..=5 {
            for tree in enumerate_unlabeled(n) {
                for sub in trees_up_to(n) {
                    assert_eq!(
                        multiplicity(&tree, &sub).unwrap(),
                        multiplicity_in(&reversed(&tree), &sub).unwrap()
                    );
                }
            }
        }
    }
}
