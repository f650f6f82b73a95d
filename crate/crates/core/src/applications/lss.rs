use num::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::decision::{decide_nonneg_with, Answer, Certificate, CsrVerdict, Options};
use crate::error::{CsrError, Result};
use crate::lifting::{is_positive_definite, psd_in_span, sym_pairs, SymVec};
use crate::linalg::rational::one;
use crate::linalg::{eigenvalues_f64, kernel_basis, MatrixFamily, RatMatrix, Rational, SpanBuilder, SubspaceBasis};
use crate::subspace::is_irreducible;

/// Uniformity of a switching system `ẋ = A(t)x` with growth exponent zero
/// for every switching law.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Uniformity {
    Uniform,
    NotUniform,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LssReport {
    pub verdict: Uniformity,
    /// Positive definite `H` with `AᵀH + HA = 0` for every generator.
    pub h: Option<RatMatrix>,
    pub irreducible: bool,
    /// Dimension of the space of symmetric solutions.
    pub solution_dim: usize,
}

/// Matrix of `X ↦ AᵀX + XA` in symmetric coordinates.
fn lyapunov_operator(a: &RatMatrix) -> RatMatrix {
    let d = a.rows();
    let pairs = sym_pairs(d);
    let cols: Vec<Vec<Rational>> = pairs
        .iter()
        .map(|&(p, q)| {
            let mut e = RatMatrix::zeros(d, d);
            e.set(p, q, one());
            e.set(q, p, one());
            let img = &(&a.transpose() * &e) + &(&e * a);
            SymVec::vectorize(&img).expect("image is symmetric").coords().to_vec()
        })
        .collect();
    RatMatrix::from_columns(pairs.len(), &cols)
}

/// Largest `|Re λ|` over the eigenvalues of `a`.
fn abscissa_magnitude(a: &RatMatrix) -> Result<f64> {
    Ok(eigenvalues_f64(&a.to_f64())?.iter().map(|z| z.re.abs()).fold(0.0, f64::max))
}

/// Whether the system is uniform: for irreducible families, exactly when
/// some basis makes every generator antisymmetric, i.e. when some positive
/// definite `H` solves `AᵀH + HA = 0` for all generators.
///
/// Reducible families are accepted; a positive definite solution still
/// proves uniformity and an eigenvalue off the imaginary axis still refutes
/// it, but nothing else is concluded.
pub fn lss_uniform(family: &MatrixFamily, tol: f64) -> Result<LssReport> {
    let d = family.dim();
    let rows: Vec<Vec<Rational>> = family.iter().flat_map(|a| lyapunov_operator(a).to_rows()).collect();
    let stacked = RatMatrix::from_rows(rows)?;
    let solutions = kernel_basis(&stacked);
    let irreducible = is_irreducible(family);
    let mut report = LssReport { verdict: Uniformity::Unknown, h: None, irreducible, solution_dim: solutions.dim() };

    if let Some(h) = psd_in_span(d, solutions.vectors()).map(|s| s.unvectorize()) {
        if is_positive_definite(&h) {
            report.h = Some(h);
            report.verdict = Uniformity::Uniform;
            return Ok(report);
        }
    }
    for a in family.iter() {
        if abscissa_magnitude(a)? > tol {
            report.verdict = Uniformity::NotUniform;
            return Ok(report);
        }
    }
    if irreducible {
        // A diagonal entry that vanishes on every solution rules out
        // positive definiteness.
        let forced_zero = (0..d).any(|p| solutions.vectors().iter().all(|v| v[p].is_zero()));
        if solutions.dim() == 0 || forced_zero {
            report.verdict = Uniformity::NotUniform;
        }
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PositiveLssReport {
    pub verdict: Uniformity,
    /// Shift used to make `I + αA` nonnegative.
    #[serde(with = "crate::linalg::rational::as_string")]
    pub alpha: Rational,
    /// Affine subspace invariant under every `I + A_i`, missing the origin
    /// and meeting the positive orthant.
    pub subspace: Option<SubspaceBasis>,
    pub csr_verdict: CsrVerdict,
}

/// Uniformity of a positive switching system (Metzler generators).
///
/// `I + αA` is nonnegative for `α = 1/(1 + max |a_ii|)`, and an affine
/// subspace is invariant under `I + αA` exactly when it is under `I + A`.
pub fn lss_positive_uniform(family: &MatrixFamily, tol: f64) -> Result<PositiveLssReport> {
    if let Some(index) = family.iter().position(|a| !a.is_metzler()) {
        return Err(CsrError::NotMetzler { index });
    }
    let d = family.dim();
    let max_diag = family
        .iter()
        .flat_map(|a| (0..d).map(move |i| a.get(i, i).abs()))
        .max()
        .unwrap_or_else(Rational::zero);
    let alpha = one() / (one() + max_diag);
    let shifted = family.map(|a| &RatMatrix::identity(d) + &a.scale(&alpha))?;
    let csr_verdict = decide_nonneg_with(&shifted, &Options::with_tol(tol))?;
    let mut report = PositiveLssReport { verdict: Uniformity::NotUniform, alpha, subspace: None, csr_verdict };
    match (&report.csr_verdict.answer, &report.csr_verdict.certificate) {
        (Answer::Yes, Some(Certificate::AffineSubspace { subspace })) => {
            if verify_positive_certificate(family, subspace) {
                report.subspace = Some(subspace.clone());
                report.verdict = Uniformity::Uniform;
            } else {
                report.verdict = Uniformity::Unknown;
            }
        }
        (Answer::No, _) => {}
        _ => report.verdict = Uniformity::Unknown,
    }
    Ok(report)
}

/// `(I + A_i)V ⊆ V` for every generator, `0 ∉ V`, and the base point of `V`
/// is positive.
pub fn verify_positive_certificate(family: &MatrixFamily, subspace: &SubspaceBasis) -> bool {
    let Some(p) = subspace.affine_point() else { return false };
    let mut span = SpanBuilder::new(subspace.ambient_dim());
    for v in subspace.vectors() {
        span.insert(v);
    }
    !span.contains(p)
        && p.iter().all(Signed::is_positive)
        && family.iter().all(|a| span.contains(&a.mul_vec(p)) && subspace.vectors().iter().all(|v| span.contains(&a.mul_vec(v))))
}

/// `exp(tA)` by scaling and squaring a Taylor polynomial; for checks only.
pub fn expm_f64(a: &RatMatrix, t: f64) -> nalgebra::DMatrix<f64> {
    let m = a.to_f64() * t;
    let norm = m.abs().column_sum().max();
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as u32 } else { 0 };
    let x = &m / 2f64.powi(squarings as i32);
    let n = m.nrows();
    let mut term = nalgebra::DMatrix::<f64>::identity(n, n);
    let mut sum = term.clone();
    for k in 1..=20 {
        term = &term * &x / k as f64;
        sum += &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}
