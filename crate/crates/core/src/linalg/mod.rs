//! Exact rational linear algebra and the floating-point eigenvalue solver.

pub mod eigen;
pub mod elimination;
pub mod matrix;
pub mod poly;
pub mod rational;

pub use eigen::{eigenvalues_f64, has_eigenvalue_one, spectral_radius, spectral_radius_f64, SpectralRadius};
pub use elimination::{determinant, inverse, kernel_basis, rank, rref, solve, SpanBuilder, SubspaceBasis};
pub use matrix::{MatrixFamily, RatMatrix};
pub use poly::{charpoly, factor, Poly};
pub use rational::{format_rational, parse_rational, Rational};
