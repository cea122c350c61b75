//! Exact Newton-polyhedral invariants for oscillatory integrals
//! `I(τ) = ∫ e^{iτf} φ χ dx`.

pub mod dd;
pub mod error;
pub mod fan;
pub mod linalg;
pub mod nondegeneracy;
pub mod pair;
pub mod parse;
pub mod polyhedron;
pub mod poles;
pub mod polynomial;
pub mod rational;
pub mod sign;
pub mod univariate;

pub use error::{Error, Result};
pub use pair::PairAnalysis;
pub use parse::parse_polynomial;
pub use polyhedron::{Face, Facet, NewtonPolyhedron};
pub use polynomial::{ExponentVector, Polynomial};
pub use rational::Rational;
