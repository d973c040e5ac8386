use std::collections::BTreeMap;

use num_traits::{One, Zero};
use rand::Rng;
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::canonical::{parse_unlabeled, trees_by_size, UnlabeledTree};
use crate::error::{Error, Result};
use crate::num::{format_rational, from_natural, parse_rational, rat, Rational};

/// Exact coefficients on the empty object and on every unlabeled tree with at
/// most `order` vertices.
///
/// Maps are dense up to their order. Asking for a tree beyond the order is an
/// error rather than an implicit zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoefficientMap {
    order: usize,
    empty: Rational,
    coeffs: BTreeMap<UnlabeledTree, Rational>,
}

/// All unlabeled trees with `1..=order` vertices, smallest first.
pub fn trees_up_to(order: usize) -> Vec<UnlabeledTree> {
    trees_by_size(order).into_iter().flatten().collect()
}

impl CoefficientMap {
    pub fn from_fn(
        order: usize,
        empty: Rational,
        mut coeff: impl FnMut(&UnlabeledTree) -> Rational,
    ) -> Self {
        let coeffs = trees_up_to(order)
            .into_iter()
            .map(|tree| {
                let value = coeff(&tree);
                (tree, value)
            })
            .collect();
        CoefficientMap {
            order,
            empty,
            coeffs,
        }
    }

    pub fn zero(order: usize) -> Self {
        Self::from_fn(order, Rational::zero(), |_| Rational::zero())
    }

    /// `δ_∅`, the identity of composition.
    pub fn delta_empty(order: usize) -> Self {
        Self::from_fn(order, Rational::one(), |_| Rational::zero())
    }

    /// `δ_•`, the identity of substitution.
    pub fn delta_single(order: usize) -> Self {
        Self::from_fn(order, Rational::zero(), |t| {
            if t.is_single() {
                Rational::one()
            } else {
                Rational::zero()
            }
        })
    }

    /// Random small rationals `p/q` with `|p| ≤ 5`, `1 ≤ q ≤ 4` on every tree.
    pub fn random<R: Rng + ?Sized>(order: usize, empty: Rational, rng: &mut R) -> Self {
        Self::from_fn(order, empty, |_| random_small(rng))
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn empty(&self) -> &Rational {
        &self.empty
    }

    pub fn set_empty(&mut self, value: Rational) {
        self.empty = value;
    }

    pub fn get(&self, tree: &UnlabeledTree) -> Result<&Rational> {
        self.coeffs.get(tree).ok_or(Error::OrderExceeded {
            requested: tree.size(),
            available: self.order,
        })
    }

    /// Coefficient of a tree or, for `None`, of the empty object.
    pub fn get_or_empty(&self, tree: Option<&UnlabeledTree>) -> Result<&Rational> {
        match tree {
            Some(tree) => self.get(tree),
            None => Ok(&self.empty),
        }
    }

    pub fn set(&mut self, tree: &UnlabeledTree, value: Rational) -> Result<()> {
        match self.coeffs.get_mut(tree) {
            Some(slot) => {
                *slot = value;
                Ok(())
            }
            None => Err(Error::OrderExceeded {
                requested: tree.size(),
                available: self.order,
            }),
        }
    }

    /// Coefficient of the one-vertex tree, if the order reaches it.
    pub fn single(&self) -> Option<&Rational> {
        self.coeffs.get(&UnlabeledTree::single())
    }

    /// Trees and coefficients in canonical order.
    pub fn iter(&self) -> impl Iterator<Item = (&UnlabeledTree, &Rational)> {
        self.coeffs.iter()
    }

    pub fn truncate(&self, order: usize) -> Result<Self> {
        self.require_order(order)?;
        Ok(CoefficientMap {
            order,
            empty: self.empty.clone(),
            coeffs: self
                .coeffs
                .iter()
                .filter(|(t, _)| t.size() <= order)
                .map(|(t, c)| (t.clone(), c.clone()))
                .collect(),
        })
    }

    pub(crate) fn require_order(&self, order: usize) -> Result<()> {
        if self.order < order {
            return Err(Error::OrderExceeded {
                requested: order,
                available: self.order,
            });
        }
        Ok(())
    }

    /// Member of the Butcher group `G_C`: empty coefficient 1.
    pub fn in_composition_group(&self) -> bool {
        self.empty.is_one()
    }

    /// Member of `G_S`: empty coefficient 0.
    pub fn in_substitution_algebra(&self) -> bool {
        self.empty.is_zero()
    }

    /// Member of `G_S★`: empty coefficient 0 and nonzero one-vertex coefficient.
    pub fn in_substitution_group(&self) -> bool {
        self.in_substitution_algebra() && self.single().is_some_and(|c| !c.is_zero())
    }

    /// Member of `G_S¹`: empty coefficient 0 and one-vertex coefficient 1.
    pub fn in_normalized_substitution_group(&self) -> bool {
        self.in_substitution_algebra() && self.single().is_some_and(One::is_one)
    }
}

fn random_small<R: Rng + ?Sized>(rng: &mut R) -> Rational {
    rat(rng.gen_range(-5..=5), rng.gen_range(1..=4))
}

/// `e(τ) = 1/τ!`, `e(∅) = 1`: the coefficients of the exact flow.
pub fn exact_coeffs(order: usize) -> CoefficientMap {
    CoefficientMap::from_fn(order, Rational::one(), |t| {
        from_natural(&t.tree_factorial()).recip()
    })
}

/// `c̄(τ) = c(τ) τ!`; the empty coefficient is unchanged.
pub fn bar_transform(map: &CoefficientMap) -> CoefficientMap {
    let mut out = map.clone();
    for (tree, value) in out.coeffs.iter_mut() {
        *value *= from_natural(&tree.tree_factorial());
    }
    out
}

/// Inverse of [`bar_transform`].
pub fn unbar_transform(map: &CoefficientMap) -> CoefficientMap {
    let mut out = map.clone();
    for (tree, value) in out.coeffs.iter_mut() {
        *value /= from_natural(&tree.tree_factorial());
    }
    out
}

impl Serialize for CoefficientMap {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        struct Coeffs<'a>(&'a BTreeMap<UnlabeledTree, Rational>);

        impl Serialize for Coeffs<'_> {
            fn serialize<S: Serializer>(
                &self,
                serializer: S,
            ) -> std::result::Result<S::Ok, S::Error> {
                let mut map = serializer.serialize_map(Some(self.0.len()))?;
                for (tree, value) in self.0 {
                    map.serialize_entry(&tree.to_string(), &format_rational(value))?;
                }
                map.end()
            }
        }

        #[derive(Serialize)]
        struct Repr<'a> {
            order: usize,
            empty: String,
            coeffs: Coeffs<'a>,
        }

        Repr {
            order: self.order,
            empty: format_rational(&self.empty),
            coeffs: Coeffs(&self.coeffs),
        }
        .serialize(serializer)
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CoefficientJson {
    order: usize,
    empty: String,
    coeffs: BTreeMap<String, String>,
}

impl TryFrom<CoefficientJson> for CoefficientMap {
    type Error = Error;

    fn try_from(json: CoefficientJson) -> Result<Self> {
        let mut coeffs = BTreeMap::new();
        for (key, value) in &json.coeffs {
            let tree = parse_unlabeled(key)?;
            if tree.size() > json.order {
                return Err(Error::OrderExceeded {
                    requested: tree.size(),
                    available: json.order,
                });
            }
            if coeffs.insert(tree, parse_rational(value)?).is_some() {
                return Err(Error::DomainMismatch(format!(
                    "tree {key:?} listed more than once"
                )));
            }
        }
        if let Some(missing) = trees_up_to(json.order)
            .into_iter()
            .find(|t| !coeffs.contains_key(t))
        {
            return Err(Error::DomainMismatch(format!(
                "no coefficient for tree {missing}"
            )));
        }
        Ok(CoefficientMap {
            order: json.order,
            empty: parse_rational(&json.empty)?,
            coeffs,
        })
    }
}

impl<'de> Deserialize<'de> for CoefficientMap {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let json = CoefficientJson::deserialize(deserializer)?;
        CoefficientMap::try_from(json).map_err(serde::de::Error::custom)
    }
}
