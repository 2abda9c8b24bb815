//! p-adic valuation trees of integer quadratics `f(n) = a n^2 + b n + c` for
//! odd primes `p`.
//!
//! The crate classifies a quadratic's tree from its coefficients alone
//! ([`classify`]), builds the tree explicitly by residue-class expansion
//! ([`tree`]), and checks both against directly evaluated valuations
//! ([`oracle`]). [`render`] turns trees and reports into ASCII, DOT, and JSON.

pub mod check;
pub mod classify;
pub mod error;
pub mod oracle;
pub mod padic;
pub mod prime;
pub mod quadratic;
pub mod render;
pub mod tree;

pub use check::{Check, CheckReport};
pub use classify::{classify, classify_with_precision, ClassKind, Classification, Discriminant};
pub use error::{Error, Result};
pub use padic::{padic_valuation, PadicApprox, Valuation};
pub use prime::Prime;
pub use quadratic::Quadratic;
pub use tree::{build_tree, check_structure, NodeStatus, TreeNode, ValuationTree};
