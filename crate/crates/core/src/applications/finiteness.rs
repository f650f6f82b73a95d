use serde::{Deserialize, Serialize};

use crate::decision::{decide_irreducible_unchecked, decide_with, Certificate, CsrVerdict, Options};
use crate::error::{CsrError, Result};
use crate::linalg::{spectral_radius, MatrixFamily};
use crate::radii::distinct_elements;
use crate::subspace::is_irreducible;

/// Longest word explored when enumerating a semigroup to closure.
const ENUMERATION_DEPTH: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Finiteness {
    Finite,
    Infinite,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FinitenessReport {
    pub verdict: Finiteness,
    pub irreducible: bool,
    pub csr_verdict: CsrVerdict,
    /// Number of distinct semigroup elements when enumeration closed.
    pub cardinality: Option<usize>,
    /// Product with spectral radius above one.
    pub witness: Option<(Vec<usize>, f64)>,
    /// A zero product was seen within the search depth. The finiteness
    /// criterion assumes the family is not mortal; the probe is one-sided.
    pub zero_product_found: bool,
}

/// Whether an integer family generates a finite semigroup.
///
/// For irreducible families that are not mortal, finiteness is the same as
/// the c.s.r. property. Reducible families and mortal ones fall back to
/// enumerating the semigroup.
pub fn decide_finiteness(family: &MatrixFamily, depth: usize, tol: f64) -> Result<FinitenessReport> {
    decide_finiteness_with(family, &Options { depth, tol, ..Options::default() })
}

pub fn decide_finiteness_with(family: &MatrixFamily, opts: &Options) -> Result<FinitenessReport> {
    if !family.is_integral() {
        return Err(CsrError::NotIntegral);
    }
    let irreducible = is_irreducible(family);
    let csr_verdict = if irreducible { decide_irreducible_unchecked(family, opts)? } else { decide_with(family, opts)? };

    let (probe, _) = match distinct_elements(family, opts.depth, opts.cap) {
        Ok(r) => r,
        Err(CsrError::ProductCapExceeded { .. }) => (Vec::new(), false),
        Err(e) => return Err(e),
    };
    let zero_product_found = probe.iter().any(|p| p.matrix.is_zero());

    let witness = match &csr_verdict.certificate {
        Some(Certificate::Counterexample { word, spectral_radius, .. }) if *spectral_radius > 1.0 + opts.tol => {
            Some((word.clone(), *spectral_radius))
        }
        _ => {
            let mut found = None;
            for p in &probe {
                let r = spectral_radius(&p.matrix, opts.tol)?;
                if r.value > 1.0 + opts.tol + r.error_bound {
                    found = Some((p.word.clone(), r.value));
                    break;
                }
            }
            found
        }
    };
    let mut report = FinitenessReport {
        verdict: Finiteness::Unknown,
        irreducible,
        csr_verdict,
        cardinality: None,
        witness,
        zero_product_found,
    };
    if report.witness.is_some() {
        report.verdict = Finiteness::Infinite;
        return Ok(report);
    }
    report.cardinality = match distinct_elements(family, ENUMERATION_DEPTH, opts.cap) {
        Ok((elements, true)) => Some(elements.len()),
        Ok((_, false)) | Err(CsrError::ProductCapExceeded { .. }) => None,
        Err(e) => return Err(e),
    };
    report.verdict = if report.cardinality.is_some()
        || (irreducible && !zero_product_found && report.csr_verdict.is_yes())
    {
        Finiteness::Finite
    } else {
        Finiteness::Unknown
    };
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::RatMatrix;

    #[test]
    fn identity_is_finite_with_one_element() {
        let f = MatrixFamily::new(vec![RatMatrix::identity(1)]).unwrap();
        let r = decide_finiteness(&f, 8, 1e-9).unwrap();
        assert_eq!(r.verdict, Finiteness::Finite);
        assert_eq!(r.cardinality, Some(1));
    }

    #[test]
    fn matrix_units_are_finite_though_mortal() {
        let f = MatrixFamily::new(vec![
            RatMatrix::from_i64(&[[0, 1], [0, 0]]),
            RatMatrix::from_i64(&[[0, 0], [1, 0]]),
        ])
        .unwrap();
        let r = decide_finiteness(&f, 8, 1e-9).unwrap();
        assert!(r.zero_product_found);
        assert_eq!(r.verdict, Finiteness::Finite);
        assert_eq!(r.cardinality, Some(5));
    }

    #[test]
    fn rejects_fractions() {
        let f = MatrixFamily::new(vec![RatMatrix::from_strs(&[["1/2"]]).unwrap()]).unwrap();
        assert!(matches!(decide_finiteness(&f, 8, 1e-9), Err(CsrError::NotIntegral)));
    }
}
