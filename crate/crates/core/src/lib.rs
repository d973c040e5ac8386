//! Exact rooted-tree combinatorics and the algebra of tree-indexed coefficient maps.
//!
//! * [`trees`], [`prufer`]: labeled rooted trees, forests, bracket notation and
//!   the Prüfer correspondence.
//! * [`canonical`]: unlabeled trees, counting, symmetry factors and tree factorials.
//! * [`increasing`]: increasing trees and their permutation code.
//! * [`bgroup`]: coefficient maps with subtree convolution (composition) and
//!   quotient-tree convolution (substitution).
//! * [`series`], [`elementary`]: exact truncated series, elementary differentials,
//!   B-series evaluation and executable checks of the composition and
//!   substitution laws.

pub mod bgroup;
pub mod canonical;
pub mod elementary;
pub mod error;
pub mod increasing;
pub mod num;
pub mod prufer;
pub mod series;
pub mod trees;

pub use bgroup::CoefficientMap;
pub use canonical::{canonicalize, TreeMultiset, UnlabeledTree};
pub use error::{Error, Result};
pub use num::Rational;
pub use prufer::PruferSequence;
pub use series::{BetaJet, RationalPoly, TruncatedSeries};
pub use trees::{Forest, Label, LabeledTree};
