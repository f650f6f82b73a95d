//! Drivers built on the decision procedures: finiteness of integer
//! semigroups, growth of binary partition counts, uniformity of switching
//! systems and the regularity of self-affine curves.

pub mod euler;
pub mod finiteness;
pub mod fractal;
pub mod lss;

pub use euler::{euler_b, euler_report, PartitionReport};
pub use finiteness::{decide_finiteness, Finiteness, FinitenessReport};
pub use fractal::{de_rham, fractal_regularity, AffineOperator, FractalReport};
pub use lss::{lss_positive_uniform, lss_uniform, LssReport, PositiveLssReport, Uniformity};
