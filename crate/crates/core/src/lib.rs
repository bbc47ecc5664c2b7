//! Exact computation of the Ceresa-Zharkov class of graphs and tropical
//! curves, and the decision procedures for its triviality.
//!
//! The algebra is generic over the scalar ring (see [`scalar`]); the aliases
//! below fix the arbitrary-precision instantiation used by the graph-level
//! code and the command-line tool.

pub mod ceresa;
pub mod cli;
pub mod extalg;
pub mod fixtures;
pub mod graph;
pub mod ids;
pub mod intlin;
pub mod polyring;
pub mod scalar;

pub use ids::{EdgeId, VertexId};

use num_bigint::BigInt;

/// Polynomial with arbitrary-precision integer coefficients.
pub type IntPolynomial = polyring::Polynomial<BigInt>;
/// Integer matrix with arbitrary-precision entries.
pub type IntMatrix = intlin::Matrix<BigInt>;
/// Matrix of polynomials, e.g. the universal polarization `Q_G`.
pub type PolyMatrix = intlin::Matrix<IntPolynomial>;
