//! Exact tools for families of matrices with constant spectral radius: every
//! product of the generators has spectral radius one.
//!
//! The entry point is [`decide`], which factors a family into irreducible
//! blocks, certifies each block exactly and combines the results.
//! [`radii`] gives floating-point bounds on joint and lower spectral radii,
//! [`generators`] builds test families and [`applications`] applies the
//! decision to integer semigroups, partition counts, switching systems and
//! fractal curves.
//!
//! ```
//! use csrkit::{decide, Answer, MatrixFamily, RatMatrix};
//!
//! let rotation = RatMatrix::from_i64(&[[0, -1], [1, 0]]);
//! let projection = RatMatrix::from_i64(&[[1, 0], [1, 0]]);
//! let family = MatrixFamily::new(vec![rotation, projection]).unwrap();
//! assert_eq!(decide(&family, 8, 1e-9).unwrap().answer, Answer::Yes);
//! ```

pub mod applications;
pub mod decision;
pub mod error;
pub mod generators;
pub mod io;
pub mod lifting;
pub mod linalg;
pub mod radii;
pub mod subspace;

pub use decision::{decide, Answer, Certificate, CsrVerdict, Method};
pub use error::{CsrError, Result};
pub use linalg::{MatrixFamily, RatMatrix, Rational, SubspaceBasis};

// Runs the guide's snippets as doctests; one module per chapter so failures
// point at their source.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/exact-arithmetic.md")]
    mod exact_arithmetic {}
    #[doc = include_str!("../../../book/src/deciding.md")]
    mod deciding {}
    #[doc = include_str!("../../../book/src/certificates.md")]
    mod certificates {}
    #[doc = include_str!("../../../book/src/factorization.md")]
    mod factorization {}
    #[doc = include_str!("../../../book/src/radii.md")]
    mod radii {}
    #[doc = include_str!("../../../book/src/generators.md")]
    mod generators {}
    #[doc = include_str!("../../../book/src/applications.md")]
    mod applications {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
