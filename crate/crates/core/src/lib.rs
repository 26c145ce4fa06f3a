//! Loop-group factorizations and harmonic maps into G₂.
//!
//! The crate models `Im(𝕆) ⊗ ℂ` in a weight basis of a maximal torus of G₂,
//! algebraic loops through their Grassmannian subspaces, canonical uniton
//! factorizations, and harmonic spheres built from polynomial Frenet data.

pub mod error;
pub mod factorization;
pub mod frenet;
pub mod grassmannian;
pub mod laurent;
pub mod lattice;
pub mod linalg;
pub mod octonion;
pub mod sampling;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::{Cyclo8, Scalar, Tol};
