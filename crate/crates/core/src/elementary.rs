//! Elementary differentials of the scalar equation `g′ = β(g)`, B-series
//! evaluation, and executable checks of the composition and substitution laws.
//!
//! For a tree `τ` with `v_k` vertices of out-degree `k`, the elementary
//! differential is `f_τ(g) = Π_k (β^(k)(g))^{v_k}`, and the B-series of a
//! coefficient map is `f^c(t,g) = c(∅)g + Σ_τ c(τ)/σ(τ) t^|τ| f_τ(g)`.

use num_traits::{One, Zero};
use serde::Serialize;

use crate::bgroup::{compose, substitute, trees_up_to, CoefficientMap};
use crate::canonical::{enumerate_unlabeled, UnlabeledTree};
use crate::error::{Error, Result};
use crate::increasing::enumerate_increasing;
use crate::num::{from_natural, int, pow, Rational};
use crate::series::{BetaJet, RationalPoly, TruncatedSeries};
use crate::trees::{enumerate_labeled, LabeledTree};

/// `Π_k (β^(k)(g₀))^{v_k(τ)}`.
pub fn elementary_differential(tree: &UnlabeledTree, jet: &BetaJet) -> Result<Rational> {
    if tree.size() > jet.order() {
        return Err(Error::OrderExceeded {
            requested: tree.size(),
            available: jet.order(),
        });
    }
    tree.degree_profile()
        .iter()
        .enumerate()
        .try_fold(Rational::one(), |acc, (k, &v)| {
            Ok(acc * pow(jet.value(k)?, v))
        })
}

/// `f_τ` as a polynomial in `g`.
pub fn elementary_poly(tree: &UnlabeledTree, beta: &RationalPoly) -> RationalPoly {
    tree.degree_profile()
        .iter()
        .enumerate()
        .fold(RationalPoly::constant(Rational::one()), |acc, (k, &v)| {
            &acc * &beta.nth_derivative(k).pow(v)
        })
}

/// `f_T` of a labeled tree, read off its out-degrees.
fn labeled_differential(tree: &LabeledTree, jet: &BetaJet) -> Result<Rational> {
    tree.degrees()
        .iter()
        .try_fold(Rational::one(), |acc, &k| Ok(acc * jet.value(k)?))
}

fn require_positive(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::DomainMismatch("order must be at least 1".into()));
    }
    Ok(())
}

/// `(d/dg)^{n−1} β(g)^n` at `g₀`: the `tⁿ/n!` coefficient of the solution of `g = g₀ + tβ(g)`.
pub fn fixed_point_coeff(beta: &RationalPoly, g0: &Rational, n: usize) -> Result<Rational> {
    require_positive(n)?;
    Ok(beta.pow(n).nth_derivative(n - 1).eval(g0))
}

/// `Σ_{|τ|=n} n!/σ(τ) f_τ(g₀)`.
pub fn fixed_point_tree_sum(beta: &RationalPoly, g0: &Rational, n: usize) -> Result<Rational> {
    require_positive(n)?;
    let jet = BetaJet::new(beta, g0, n);
    let n_fact = from_natural(&crate::num::factorial(n));
    enumerate_unlabeled(n)
        .iter()
        .try_fold(Rational::zero(), |acc, tree| {
            Ok(acc
                + &n_fact / from_natural(&tree.symmetry_factor())
                    * elementary_differential(tree, &jet)?)
        })
}

/// `Σ_T f_T(g₀)` over every labeled rooted tree on `n` vertices.
pub fn fixed_point_labeled_sum(beta: &RationalPoly, g0: &Rational, n: usize) -> Result<Rational> {
    let jet = BetaJet::new(beta, g0, n);
    enumerate_labeled(n)?
        .iter()
        .try_fold(Rational::zero(), |acc, t| {
            Ok(acc + labeled_differential(t, &jet)?)
        })
}

/// `(β d/dg)^n g` at `g₀`: the `tⁿ/n!` coefficient of the flow of `g′ = β(g)`.
pub fn ode_coeff(beta: &RationalPoly, g0: &Rational, n: usize) -> Rational {
    (0..n)
        .fold(RationalPoly::x(), |p, _| beta * &p.derivative())
        .eval(g0)
}

/// `Σ_{|τ|=n} n!/(σ(τ) τ!) f_τ(g₀)`.
pub fn ode_tree_sum(beta: &RationalPoly, g0: &Rational, n: usize) -> Result<Rational> {
    if n == 0 {
        return Ok(g0.clone());
    }
    let jet = BetaJet::new(beta, g0, n);
    enumerate_unlabeled(n)
        .iter()
        .try_fold(Rational::zero(), |acc, tree| {
            Ok(acc + from_natural(&tree.increasing_count()) * elementary_differential(tree, &jet)?)
        })
}

/// `Σ f_T(g₀)` over every increasing tree on `n` vertices.
pub fn ode_increasing_sum(beta: &RationalPoly, g0: &Rational, n: usize) -> Result<Rational> {
    if n == 0 {
        return Ok(g0.clone());
    }
    let jet = BetaJet::new(beta, g0, n);
    enumerate_increasing(n)?
        .iter()
        .try_fold(Rational::zero(), |acc, t| {
            Ok(acc + labeled_differential(t, &jet)?)
        })
}

/// `f^c(t, g₀)` through `t^order`.
pub fn bseries_eval(
    c: &CoefficientMap,
    beta: &RationalPoly,
    g0: &Rational,
    order: usize,
) -> Result<TruncatedSeries> {
    c.require_order(order)?;
    let jet = BetaJet::new(beta, g0, order);
    let mut series = TruncatedSeries::constant(c.empty() * g0, order);
    for tree in trees_up_to(order) {
        let k = tree.size();
        let term = c.get(&tree)? / from_natural(&tree.symmetry_factor())
            * elementary_differential(&tree, &jet)?;
        series.set_coeff(k, series.coeff(k) + term);
    }
    Ok(series)
}

/// `f^c(t, g)` with each `t^k` coefficient kept as a polynomial in `g`.
pub fn bseries_field(
    c: &CoefficientMap,
    beta: &RationalPoly,
    order: usize,
) -> Result<Vec<RationalPoly>> {
    c.require_order(order)?;
    let mut field = vec![RationalPoly::zero(); order + 1];
    field[0] = RationalPoly::x().scale(c.empty());
    for tree in trees_up_to(order) {
        let weight = c.get(&tree)? / from_natural(&tree.symmetry_factor());
        let k = tree.size();
        field[k] = &field[k] + &elementary_poly(&tree, beta).scale(&weight);
    }
    Ok(field)
}

/// Both sides of a theorem check, coefficient by coefficient in `t`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub theorem: &'static str,
    pub order: usize,
    #[serde(with = "crate::num::rational_string")]
    pub g0: Rational,
    pub beta: String,
    pub lhs: TruncatedSeries,
    pub rhs: TruncatedSeries,
    pub passed: bool,
}

impl VerificationReport {
    fn new(
        theorem: &'static str,
        beta: &RationalPoly,
        g0: &Rational,
        lhs: TruncatedSeries,
        rhs: TruncatedSeries,
    ) -> Self {
        VerificationReport {
            theorem,
            order: lhs.order(),
            g0: g0.clone(),
            beta: beta.to_string(),
            passed: lhs == rhs,
            lhs,
            rhs,
        }
    }
}

/// `f^{a*b}(t, g₀)` against `f^b(t, f^a(t, g₀))`, the outer series expanded
/// by substituting the inner series into each polynomial `f_τ`.
pub fn verify_composition(
    a: &CoefficientMap,
    b: &CoefficientMap,
    beta: &RationalPoly,
    g0: &Rational,
    order: usize,
) -> Result<VerificationReport> {
    let lhs = bseries_eval(&compose(a, b, order)?, beta, g0, order)?;
    let inner = bseries_eval(a, beta, g0, order)?;
    let rhs = outer_at_series(b, beta, &inner, order)?;
    Ok(VerificationReport::new("composition", beta, g0, lhs, rhs))
}

/// `f^b(t, h(t))` for a series `h`.
fn outer_at_series(
    b: &CoefficientMap,
    beta: &RationalPoly,
    inner: &TruncatedSeries,
    order: usize,
) -> Result<TruncatedSeries> {
    let field = bseries_field(b, beta, order)?;
    let t = TruncatedSeries::variable(order);
    let mut rhs = TruncatedSeries::zero(order);
    for (k, poly) in field.iter().enumerate() {
        rhs = &rhs + &(&t.pow(k) * &TruncatedSeries::eval_poly(poly, inner));
    }
    Ok(rhs)
}

/// Entry `k` is `∂^k/∂g^k f^a(t, β, g)` at `g₀`, for `k = 0..=order`.
pub fn modified_field_jets(
    a: &CoefficientMap,
    beta: &RationalPoly,
    g0: &Rational,
    order: usize,
) -> Result<Vec<TruncatedSeries>> {
    if !a.in_substitution_algebra() {
        return Err(Error::NotSubstitutable(format!(
            "a modified field needs a(∅) = 0, found {}",
            a.empty()
        )));
    }
    let mut field = bseries_field(a, beta, order)?;
    let mut jets = Vec::with_capacity(order + 1);
    for _ in 0..=order {
        jets.push(TruncatedSeries::new(
            field.iter().map(|p| p.eval(g0)).collect(),
            order,
        ));
        field = field.iter().map(RationalPoly::derivative).collect();
    }
    Ok(jets)
}

/// `f^{a⋆b}(t, β, g₀)` against `f^b(1, f^a(t, β, ·), g₀)`, where the outer
/// elementary differentials are built from the jets of the modified field.
pub fn verify_substitution(
    a: &CoefficientMap,
    b: &CoefficientMap,
    beta: &RationalPoly,
    g0: &Rational,
    order: usize,
) -> Result<VerificationReport> {
    let lhs = bseries_eval(&substitute(a, b, order)?, beta, g0, order)?;
    let jets = modified_field_jets(a, beta, g0, order)?;
    b.require_order(order)?;
    let mut rhs = TruncatedSeries::constant(b.empty() * g0, order);
    for tree in trees_up_to(order) {
        let weight = b.get(&tree)? / from_natural(&tree.symmetry_factor());
        let product = tree.degree_profile().iter().enumerate().fold(
            TruncatedSeries::constant(Rational::one(), order),
            |acc, (k, &v)| &acc * &jets[k].pow(v),
        );
        rhs = &rhs + &product.scale(&weight);
    }
    Ok(VerificationReport::new("substitution", beta, g0, lhs, rhs))
}

/// Coefficients of `g + (1 − 1/(2α)) t β(g) + (1/(2α)) t β(g + α t β(g))`.
pub fn rk2_coeffs(alpha: &Rational, order: usize) -> Result<CoefficientMap> {
    if alpha.is_zero() {
        return Err(Error::ZeroParameter);
    }
    Ok(CoefficientMap::from_fn(order, Rational::one(), |tree| {
        if tree.is_single() {
            Rational::one()
        } else if tree.terms().len() == 1 && tree.terms()[0].0.is_single() {
            pow(alpha, tree.size() - 2) / int(2)
        } else {
            Rational::zero()
        }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bgroup::exact_coeffs;
    use crate::canonical::parse_unlabeled;
    use crate::num::{factorial, rat};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn t(s: &str) -> UnlabeledTree {
        parse_unlabeled(s).unwrap()
    }

    fn poly(s: &str) -> RationalPoly {
        RationalPoly::parse(s).unwrap()
    }

    #[test]
    fn differentials_of_small_trees() {
        let beta = poly("1 + 2x + x^3");
        let g0 = rat(1, 2);
        let jet = BetaJet::new(&beta, &g0, 4);
        let (b0, b1, b2) = (
            jet.value(0).unwrap().clone(),
            jet.value(1).unwrap().clone(),
            jet.value(2).unwrap().clone(),
        );
        assert_eq!(elementary_differential(&t("0"), &jet).unwrap(), b0);
        assert_eq!(
            elementary_differential(&t("1[1]"), &jet).unwrap(),
            &b1 * &b1 * &b0
        );
        assert_eq!(
            elementary_differential(&t("2"), &jet).unwrap(),
            &b2 * &b0 * &b0
        );
        assert_eq!(
            elementary_differential(&t("1[1[1[1]]]"), &jet)
                .unwrap_err()
                .name(),
            "OrderExceeded"
        );
        for tree in trees_up_to(4) {
            assert_eq!(
                elementary_poly(&tree, &beta).eval(&g0),
                elementary_differential(&tree, &jet).unwrap()
            );
        }
    }

    #[test]
    fn coefficient_formulas() {
        let square = poly("x^2");
        let g = rat(3, 2);
        assert_eq!(
            fixed_point_coeff(&square, &g, 2).unwrap(),
            int(4) * &g * &g * &g
        );
        assert_eq!(
            fixed_point_tree_sum(&square, &g, 2).unwrap(),
            int(4) * &g * &g * &g
        );
        for beta in [poly("1+x^2/2"), poly("2 - x + 3x^3"), poly("(1+x)^4")] {
            for g0 in [int(0), rat(-2, 3)] {
                assert_eq!(fixed_point_coeff(&beta, &g0, 1).unwrap(), beta.eval(&g0));
                assert_eq!(ode_coeff(&beta, &g0, 0), g0);
                for n in 1..=6 {
                    let op = fixed_point_coeff(&beta, &g0, n).unwrap();
                    assert_eq!(fixed_point_tree_sum(&beta, &g0, n).unwrap(), op);
                    if n <= 5 {
                        assert_eq!(fixed_point_labeled_sum(&beta, &g0, n).unwrap(), op);
                    }
                    let flow = ode_coeff(&beta, &g0, n);
                    assert_eq!(ode_tree_sum(&beta, &g0, n).unwrap(), flow);
                    assert_eq!(ode_increasing_sum(&beta, &g0, n).unwrap(), flow);
                }
            }
        }
        assert_eq!(
            fixed_point_coeff(&square, &g, 0).unwrap_err().name(),
            "DomainMismatch"
        );
    }

    #[test]
    fn combinatorial_shadows_of_exp() {
        for n in 1..=7 {
            let trees = enumerate_unlabeled(n);
            let labeled: Rational = trees.iter().map(|t| from_natural(&t.labeled_count())).sum();
            assert_eq!(labeled, pow(&int(n as i64), n - 1));
            let increasing: Rational = trees
                .iter()
                .map(|t| from_natural(&t.increasing_count()))
                .sum();
            assert_eq!(increasing, from_natural(&factorial(n - 1)));
        }
        assert_eq!(t("1,1[1]").increasing_count(), 3u32.into());
    }

    #[test]
    fn worked_expansions() {
        let beta = poly("1 + x + x^3/3");
        let g0 = rat(1, 3);
        let jet = BetaJet::new(&beta, &g0, 3);
        let v = |k: usize| jet.value(k).unwrap().clone();
        let ones = CoefficientMap::from_fn(3, int(1), |_| int(1));
        let s = bseries_eval(&ones, &beta, &g0, 3).unwrap();
        assert_eq!(s.coeff(0), &g0);
        assert_eq!(s.coeff(1), &v(0));
        assert_eq!(s.coeff(2), &(v(1) * v(0)));
        assert_eq!(
            s.coeff(3),
            &(v(2) * v(0) * v(0) / int(2) + v(1) * v(1) * v(0))
        );
        let e = bseries_eval(&exact_coeffs(3), &beta, &g0, 3).unwrap();
        assert_eq!(e.coeff(2), &(v(1) * v(0) / int(2)));
        assert_eq!(
            e.coeff(3),
            &((v(2) * v(0) * v(0) + v(1) * v(1) * v(0)) / int(6))
        );
        let id = bseries_eval(&CoefficientMap::delta_empty(3), &beta, &g0, 3).unwrap();
        assert_eq!(id, TruncatedSeries::constant(g0.clone(), 3));
        for n in 0..=3 {
            assert_eq!(
                e.derivative_at_zero(n),
                ode_coeff(&beta, &g0, n),
                "flow coefficient {n}"
            );
        }
    }

    #[test]
    fn field_matches_pointwise_evaluation() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let c = CoefficientMap::random(5, rat(1, 2), &mut rng);
        let beta = poly("2 - x^2");
        let g0 = rat(-1, 3);
        let field = bseries_field(&c, &beta, 5).unwrap();
        let values: Vec<Rational> = field.iter().map(|p| p.eval(&g0)).collect();
        assert_eq!(
            TruncatedSeries::new(values, 5),
            bseries_eval(&c, &beta, &g0, 5).unwrap()
        );
    }

    #[test]
    fn composition_theorem() {
        let beta = poly("1+x^2/2");
        let e = exact_coeffs(6);
        let flow = verify_composition(&e, &e, &beta, &int(0), 6).unwrap();
        assert!(flow.passed);
        // f^{e*e}(t) = f^e(2t)
        let single = bseries_eval(&e, &beta, &int(0), 6).unwrap();
        assert_eq!(flow.rhs, single.rescale(&int(2)));
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let a = CoefficientMap::random(5, int(1), &mut rng);
        let b = CoefficientMap::random(5, rat(3, 2), &mut rng);
        assert!(
            verify_composition(&a, &b, &poly("x - x^3"), &rat(1, 2), 5)
                .unwrap()
                .passed
        );
        let id =
            verify_composition(&a, &CoefficientMap::delta_empty(5), &beta, &int(1), 5).unwrap();
        assert_eq!(id.rhs, bseries_eval(&a, &beta, &int(1), 5).unwrap());
        assert!(id.passed);
    }

    #[test]
    fn composition_with_a_scaled_euler_step() {
        // f^b = tβ(g), f^a = g + αtβ(g): c vanishes except on bushes, where c = α^(n−1)
        let alpha = rat(2, 3);
        let a = CoefficientMap::from_fn(5, int(1), |tree| {
            if tree.is_single() {
                alpha.clone()
            } else {
                int(0)
            }
        });
        let b = CoefficientMap::delta_single(5);
        let c = compose(&a, &b, 5).unwrap();
        for (tree, value) in c.iter() {
            let bush = tree.terms().iter().all(|(child, _)| child.is_single());
            let expected = if bush {
                pow(&alpha, tree.size() - 1)
            } else {
                int(0)
            };
            assert_eq!(value, &expected, "{tree}");
        }
        assert_eq!(c.empty(), &int(0));
        let beta = poly("1+x+x^2");
        let report = verify_composition(&a, &b, &beta, &int(1), 5).unwrap();
        assert!(report.passed);
        // tβ(g + αtβ(g)) expanded directly
        let tt = TruncatedSeries::variable(5);
        let g0 = int(1);
        let inner =
            &TruncatedSeries::constant(g0.clone(), 5) + &tt.scale(&(&alpha * beta.eval(&g0)));
        assert_eq!(report.lhs, &tt * &TruncatedSeries::eval_poly(&beta, &inner));
    }

    #[test]
    fn substitution_theorem() {
        let beta = poly("1+x^2/2");
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let mut a = CoefficientMap::random(5, int(0), &mut rng);
        a.set(&UnlabeledTree::single(), int(1)).unwrap();
        let report = verify_substitution(&a, &exact_coeffs(5), &beta, &int(0), 5).unwrap();
        assert!(report.passed, "{report:?}");
        let b = CoefficientMap::random(5, rat(1, 3), &mut rng);
        let id = verify_substitution(&CoefficientMap::delta_single(5), &b, &beta, &rat(1, 2), 5)
            .unwrap();
        assert!(id.passed);
        assert_eq!(id.lhs, bseries_eval(&b, &beta, &rat(1, 2), 5).unwrap());
        assert_eq!(
            verify_substitution(&exact_coeffs(5), &b, &beta, &int(0), 5)
                .unwrap_err()
                .name(),
            "NotSubstitutable"
        );
    }

    #[test]
    fn modified_jets() {
        let beta = poly("1 + x + x^3");
        let g0 = rat(1, 2);
        let jets = modified_field_jets(&CoefficientMap::delta_single(3), &beta, &g0, 3).unwrap();
        for (k, jet) in jets.iter().enumerate() {
            let mut expected = TruncatedSeries::zero(3);
            expected.set_coeff(1, beta.nth_derivative(k).eval(&g0));
            assert_eq!(jet, &expected);
        }
        let a = CoefficientMap::from_fn(
            3,
            int(0),
            |tree| {
                if tree.size() <= 2 {
                    int(1)
                } else {
                    int(0)
                }
            },
        );
        let jets = modified_field_jets(&a, &beta, &g0, 3).unwrap();
        let (b0, b1) = (beta.eval(&g0), beta.derivative().eval(&g0));
        assert_eq!(jets[0].coeffs(), &[int(0), b0.clone(), &b1 * &b0, int(0)]);
        assert!(jets.iter().all(|j| j.coeff(0).is_zero()));
    }

    #[test]
    fn rk2_family() {
        let e = exact_coeffs(4);
        for alpha in [rat(1, 2), int(1), rat(-3, 4)] {
            let c = rk2_coeffs(&alpha, 4).unwrap();
            assert_eq!(c.get(&t("1")).unwrap(), &rat(1, 2));
            assert_eq!(c.get(&t("1[1]")).unwrap(), &int(0));
            assert_eq!(c.get(&t("2")).unwrap(), &(alpha.clone() / int(2)));
            for tree in trees_up_to(2) {
                assert_eq!(c.get(&tree).unwrap(), e.get(&tree).unwrap());
            }
            assert!(trees_up_to(3)
                .iter()
                .any(|tree| tree.size() == 3 && c.get(tree).unwrap() != e.get(tree).unwrap()));
            // Taylor expansion of the two-stage step itself
            let beta = poly("1 - x + x^2/2 + x^3");
            let g0 = rat(1, 5);
            let order = 4;
            let tt = TruncatedSeries::variable(order);
            let b0 = beta.eval(&g0);
            let stage = &TruncatedSeries::constant(g0.clone(), order) + &tt.scale(&(&alpha * &b0));
            let step = &(&TruncatedSeries::constant(g0.clone(), order)
                + &tt.scale(&((int(1) - (int(2) * &alpha).recip()) * &b0)))
                + &(&tt * &TruncatedSeries::eval_poly(&beta, &stage))
                    .scale(&(int(2) * &alpha).recip());
            assert_eq!(bseries_eval(&c, &beta, &g0, order).unwrap(), step);
        }
        assert_eq!(rk2_coeffs(&int(0), 3).unwrap_err().name(), "ZeroParameter");
    }

    #[test]
    fn exp_shadow_of_composition() {
        // With β = exp every f_τ(g) is e^{|τ|g}; in u = t e^g the B-series
        // becomes h^a(u) = u exp(Σ_n A_n u^n) and composition becomes h^b ∘ h^a.
        let order = 6;
        let shadow = |m: &CoefficientMap| {
            let mut s = TruncatedSeries::zero(order);
            for tree in trees_up_to(order - 1) {
                let k = tree.size();
                s.set_coeff(
                    k,
                    s.coeff(k) + m.get(&tree).unwrap() / from_natural(&tree.symmetry_factor()),
                );
            }
            &TruncatedSeries::variable(order) * &s.exp().unwrap()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for _ in 0..3 {
            let a = CoefficientMap::random(order, int(1), &mut rng);
            let b = CoefficientMap::random(order, int(1), &mut rng);
            let c = compose(&a, &b, order).unwrap();
            assert_eq!(shadow(&c), shadow(&b).compose(&shadow(&a)).unwrap());
        }
    }
}
