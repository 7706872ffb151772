//! Numerical building blocks: spectra, Pfaffians, quadrature, Hermite
//! polynomials, the class products `Delta` and iterated tail integrals.

pub mod delta;
pub mod hermite;
pub mod linalg;
pub mod polynomial;
pub mod quadrature;
pub mod weight;

pub use delta::{delta, delta_in_slot, delta_partial};
pub use hermite::{hermite_normalized, hermite_polynomial};
pub use linalg::{
    hermitian_eigen_decomposition, hermitian_eigenvalues, pfaffian, pfaffian_sign, CMatrix, C64,
};
pub use polynomial::Polynomial;
pub use quadrature::{integrate, Domain, Integrator};
pub use weight::{iterated_integral, Support, WeightFunction};
