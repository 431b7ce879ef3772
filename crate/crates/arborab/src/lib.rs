//! Abelianity obstructions for dynamical Galois groups of quadratic pairs
//! (x² + c, α) over ℚ.
//!
//! The toolkit decides whether the arboreal Galois image of a pair can be
//! abelian, and produces machine-checkable certificates either way. Three
//! independent engines feed the decision:
//!
//! * square classes of the adjusted post-critical orbit and F₂ linear
//!   algebra inside ℚ*/ℚ*² ([`exactnum`], [`obstruct`]),
//! * finite-depth automorphisms of the binary rooted tree, their level
//!   parities and the commutation obstruction ([`treeaut`]),
//! * numerical height machinery: canonical heights with certified tails,
//!   Mahler measures from simultaneous root finding, and pairing estimates
//!   along preimage trees ([`heights`]).
//!
//! Exact arithmetic is rational end to end; floating point appears only in
//! [`heights`], always paired with an explicit error bound.

pub mod dynamo;
pub mod exactnum;
pub mod heights;
pub mod obstruct;
pub mod poly;
pub mod treeaut;

/// Exact rational scalar used throughout: arbitrary precision, always in
/// lowest terms with positive denominator.
pub type Rational = num_rational::BigRational;

/// Arbitrary-precision signed integer.
pub type Integer = num_bigint::BigInt;

pub use poly::{IntPolynomial, Polynomial, RatPolynomial};
