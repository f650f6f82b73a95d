use num::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{CsrError, Result};
use crate::lifting::{is_positive_definite, lifted_average, psd_in_span, tensor_square};
use crate::linalg::rational::{approximate, int, one, rat, to_f64};
use crate::linalg::{kernel_basis, solve, spectral_radius, MatrixFamily, RatMatrix, Rational};
use crate::radii::{all_bounds, default_norm, DEFAULT_CAP};
use crate::subspace::block_factorize;

/// Largest denominator tried when recognizing a squared scale as rational.
const SCALE_DENOMINATOR: u64 = 1 << 20;

/// `x ↦ linear·x + translation`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AffineOperator {
    pub linear: RatMatrix,
    #[serde(with = "crate::linalg::rational::vec_as_strings")]
    pub translation: Vec<Rational>,
}

impl AffineOperator {
    pub fn new(linear: RatMatrix, translation: Vec<Rational>) -> Result<Self> {
        linear.ensure_square()?;
        if translation.len() != linear.rows() {
            return Err(CsrError::DimensionMismatch(format!(
                "translation of length {} for a {}x{} linear part",
                translation.len(),
                linear.rows(),
                linear.cols()
            )));
        }
        Ok(Self { linear, translation })
    }

    pub fn apply(&self, x: &[Rational]) -> Vec<Rational> {
        self.linear.mul_vec(x).into_iter().zip(&self.translation).map(|(a, b)| a + b).collect()
    }

    /// The unique fixed point of a contraction.
    pub fn fixed_point(&self) -> Result<Vec<Rational>> {
        let n = self.linear.rows();
        solve(&(&RatMatrix::identity(n) - &self.linear), &self.translation).ok_or(CsrError::Singular)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FractalReport {
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub constant_regularity: bool,
    /// The common contraction factor `r` of the distinguished block.
    pub block_scale_r: Option<f64>,
    pub jsr_lower: f64,
    pub jsr_upper: f64,
    pub lsr_lower: f64,
    pub lsr_upper: f64,
}

/// Hölder exponents of the curve defined by two affine contractions.
///
/// The extremes come from the joint and lower spectral radii of the linear
/// parts: `α_min = −log₂ ρ̂` and `α_max = −log₂ ρ̌`. Regularity is constant
/// when, in a block triangular basis, one diagonal block has both
/// operators equal to `r` times an orthogonal map with `r ∈ [1/2, 1)` and
/// every other block has joint spectral radius at most `r`. The second
/// condition is checked with depth-bounded bounds, so an unresolved block
/// reads as `false`.
pub fn fractal_regularity(b0: &AffineOperator, b1: &AffineOperator, depth: usize, tol: f64) -> Result<FractalReport> {
    let family = MatrixFamily::new(vec![b0.linear.clone(), b1.linear.clone()])?;
    for (index, b) in [b0, b1].into_iter().enumerate() {
        let radius = spectral_radius(&b.linear, tol)?.value;
        if radius >= 1.0 - tol {
            return Err(CsrError::NotContractive { index, radius });
        }
    }
    let v0 = b0.fixed_point()?;
    let v1 = b1.fixed_point()?;
    if b0.apply(&v1) != b1.apply(&v0) {
        return Err(CsrError::CrossCondition);
    }

    let (jsr, lsr) = all_bounds(&family, depth, tol, DEFAULT_CAP, &default_norm(&family))?;
    let mut report = FractalReport {
        alpha_min: -jsr.lower.log2(),
        alpha_max: -lsr.upper.log2(),
        constant_regularity: false,
        block_scale_r: None,
        jsr_lower: jsr.lower,
        jsr_upper: jsr.upper,
        lsr_lower: lsr.lower,
        lsr_upper: lsr.upper,
    };

    let bf = block_factorize(&family);
    let blocks: Vec<MatrixFamily> = (0..bf.num_blocks()).map(|j| bf.block_family(j)).collect();
    for (j, block) in blocks.iter().enumerate() {
        let Some(s) = similarity_scale_squared(block) else { continue };
        if s < rat(1, 4) || s >= one() {
            continue;
        }
        let r = to_f64(&s).sqrt();
        let mut others_ok = true;
        for (i, other) in blocks.iter().enumerate() {
            if i == j {
                continue;
            }
            if !jsr_at_most(other, &s, r, depth, tol)? {
                others_ok = false;
                break;
            }
        }
        if others_ok {
            report.constant_regularity = true;
            report.block_scale_r = Some(r);
            report.alpha_min = -r.log2();
            report.alpha_max = -r.log2();
            break;
        }
    }
    Ok(report)
}

/// `s = r²` when every generator is `r` times an orthogonal map in a common
/// basis, i.e. `AᵀHA = sH` for one positive definite `H`.
fn similarity_scale_squared(block: &MatrixFamily) -> Option<Rational> {
    let d = block.dim();
    if d == 1 {
        let a: Vec<Rational> = block.iter().map(|g| g.get(0, 0).clone()).collect();
        let s = &a[0] * &a[0];
        return (a.iter().all(|x| x * x == s) && !s.is_zero()).then_some(s);
    }
    let estimate = spectral_radius(&lifted_average(block).matrix, 1e-12).ok()?.value;
    let s = approximate(estimate, SCALE_DENOMINATOR)?;
    let n = crate::lifting::sym_dim(d);
    let shift = RatMatrix::identity(n).scale(&s);
    let rows: Vec<Vec<Rational>> = block.iter().flat_map(|g| (&tensor_square(g).matrix - &shift).to_rows()).collect();
    let kernel = kernel_basis(&RatMatrix::from_rows(rows).ok()?);
    let h = psd_in_span(d, kernel.vectors())?;
    is_positive_definite(&h.unvectorize()).then_some(s)
}

fn jsr_at_most(block: &MatrixFamily, s: &Rational, r: f64, depth: usize, tol: f64) -> Result<bool> {
    if block.dim() == 1 {
        return Ok(block.iter().all(|g| g.get(0, 0) * g.get(0, 0) <= *s));
    }
    let (jsr, _) = all_bounds(block, depth, tol, DEFAULT_CAP, &default_norm(block))?;
    Ok(jsr.upper <= r + tol)
}

/// The de Rham corner-cutting pair with parameter `ω`, with fixed points
/// `0` and `(1, 1)`.
pub fn de_rham(omega: &Rational) -> Result<(AffineOperator, AffineOperator)> {
    if *omega <= Rational::zero() || omega * int(2) >= Rational::one() {
        return Err(CsrError::Precondition("ω must lie in (0, 1/2)".into()));
    }
    let w = omega.clone();
    let m = one() - int(2) * &w;
    let l0 = RatMatrix::from_rows(vec![vec![w.clone(), Rational::zero()], vec![w.clone(), m.clone()]])?;
    let l1 = RatMatrix::from_rows(vec![vec![m.clone(), w.clone()], vec![Rational::zero(), w.clone()]])?;
    let b0 = AffineOperator::new(l0, vec![Rational::zero(), Rational::zero()])?;
    // B0 v1 = B1 v0 with v1 = (1, 1) forces t1 = L0·(1, 1).
    let t1 = vec![w.clone(), one() - &w];
    let b1 = AffineOperator::new(l1, t1)?;
    Ok((b0, b1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quarter_de_rham_is_constant() {
        let (b0, b1) = de_rham(&rat(1, 4)).unwrap();
        let r = fractal_regularity(&b0, &b1, 8, 1e-9).unwrap();
        assert!(r.constant_regularity);
        assert_eq!(r.block_scale_r, Some(0.5));
    }

    #[test]
    fn third_de_rham_is_not_constant() {
        let (b0, b1) = de_rham(&rat(1, 3)).unwrap();
        let r = fractal_regularity(&b0, &b1, 8, 1e-9).unwrap();
        assert!(!r.constant_regularity);
        assert!(r.alpha_max - r.alpha_min > 0.01);
    }

    #[test]
    fn rejects_expanding_operator() {
        let b = AffineOperator::new(RatMatrix::identity(1).scale(&int(2)), vec![Rational::zero()]).unwrap();
        assert!(matches!(fractal_regularity(&b, &b, 4, 1e-9), Err(CsrError::NotContractive { .. })));
    }
}
