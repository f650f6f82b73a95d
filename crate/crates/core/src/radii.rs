//! Joint spectral characteristics: the lifted radii `ρ₂`, `ρ₄`, finite-length
//! p-radius estimates, and depth-bounded bounds on the joint and lower
//! spectral radii.

use std::collections::{HashMap, HashSet};

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{CsrError, Result};
use crate::lifting::{lifted_average, lifted_fourth_average, sym_pairs};
use crate::linalg::{spectral_radius, MatrixFamily, RatMatrix, SpectralRadius};

pub const DEFAULT_DEPTH: usize = 8;
pub const DEFAULT_CAP: usize = 200_000;

/// A product `A_{w[0]} ⋯ A_{w[k-1]}` together with its word.
#[derive(Clone, Debug)]
pub struct Product {
    pub word: Vec<usize>,
    pub matrix: RatMatrix,
}

/// Products of every length `1..=depth`, level by level, with exact
/// duplicates removed inside each level.
pub fn products_by_length(family: &MatrixFamily, depth: usize, cap: usize) -> Result<Vec<Vec<Product>>> {
    let m = family.len();
    let mut levels: Vec<Vec<Product>> = Vec::with_capacity(depth);
    let mut generated = 0usize;
    let mut prev = vec![Product { word: Vec::new(), matrix: RatMatrix::identity(family.dim()) }];
    for _ in 0..depth {
        generated += prev.len() * m;
        if generated > cap {
            return Err(CsrError::ProductCapExceeded { cap });
        }
        let candidates: Vec<Product> = prev
            .par_iter()
            .flat_map_iter(|p| {
                family.iter().enumerate().map(move |(i, g)| {
                    let mut word = p.word.clone();
                    word.push(i);
                    Product { word, matrix: &p.matrix * g }
                })
            })
            .collect();
        let mut seen: HashMap<RatMatrix, ()> = HashMap::with_capacity(candidates.len());
        let level: Vec<Product> = candidates.into_iter().filter(|p| seen.insert(p.matrix.clone(), ()).is_none()).collect();
        prev = level.clone();
        levels.push(level);
    }
    Ok(levels)
}

/// Distinct semigroup elements of length at most `depth`, each listed once
/// at its shortest length. The flag is true when the enumeration closed up,
/// meaning the semigroup is finite and fully listed.
pub fn distinct_elements(family: &MatrixFamily, depth: usize, cap: usize) -> Result<(Vec<Product>, bool)> {
    let mut seen: HashSet<RatMatrix> = HashSet::new();
    let mut all = Vec::new();
    let mut frontier = vec![Product { word: Vec::new(), matrix: RatMatrix::identity(family.dim()) }];
    for _ in 0..depth {
        let mut next = Vec::new();
        for p in &frontier {
            for (i, g) in family.iter().enumerate() {
                let mat = &p.matrix * g;
                if seen.insert(mat.clone()) {
                    let mut word = p.word.clone();
                    word.push(i);
                    next.push(Product { word, matrix: mat });
                    if seen.len() > cap {
                        return Err(CsrError::ProductCapExceeded { cap });
                    }
                }
            }
        }
        if next.is_empty() {
            return Ok((all, true));
        }
        all.extend(next.iter().cloned());
        frontier = next;
    }
    Ok((all, false))
}

fn lifted_radius(op: &RatMatrix, tol: f64, root: f64) -> Result<SpectralRadius> {
    let r = spectral_radius(op, tol)?;
    let value = r.value.powf(1.0 / root);
    // d(x^(1/q)) = x^(1/q - 1)/q dx
    let err = if r.value > 0.0 { value / (root * r.value) * r.error_bound } else { r.error_bound.powf(1.0 / root) };
    Ok(SpectralRadius { value, error_bound: err })
}

/// `ρ₂ = √ρ((1/m) Σ A_i^{⊗2})`.
pub fn rho_2(family: &MatrixFamily, tol: f64) -> Result<SpectralRadius> {
    lifted_radius(&lifted_average(family).matrix, tol, 2.0)
}

/// `ρ₄ = ρ((1/m) Σ A_i^{⊗4})^{1/4}`.
pub fn rho_4(family: &MatrixFamily, tol: f64) -> Result<SpectralRadius> {
    lifted_radius(&lifted_fourth_average(family).matrix, tol, 4.0)
}

/// Norm used for upper bounds.
#[derive(Clone, Debug, PartialEq)]
pub enum Norm {
    Spectral,
    /// `‖x‖ = √(xᵀHx)` for a positive definite `H`; stores the factor `Lᵀ`
    /// of `H = L Lᵀ` and its inverse.
    Ellipsoid { t: DMatrix<f64>, t_inv: DMatrix<f64> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormKind {
    Spectral,
    Ellipsoid,
}

impl Norm {
    pub fn kind(&self) -> NormKind {
        match self {
            Norm::Spectral => NormKind::Spectral,
            Norm::Ellipsoid { .. } => NormKind::Ellipsoid,
        }
    }

    /// Ellipsoidal norm of a positive definite `H`; `None` otherwise.
    pub fn ellipsoid(h: &DMatrix<f64>) -> Option<Norm> {
        let chol = nalgebra::Cholesky::new(h.clone())?;
        let t = chol.l().transpose();
        let t_inv = t.clone().try_inverse()?;
        let diag_min = t.diagonal().iter().map(|x| x.abs()).fold(f64::INFINITY, f64::min);
        let diag_max = t.diagonal().iter().map(|x| x.abs()).fold(0.0, f64::max);
        if diag_min.partial_cmp(&(1e-7 * diag_max)) != Some(std::cmp::Ordering::Greater) {
            return None;
        }
        Some(Norm::Ellipsoid { t, t_inv })
    }

    fn transform(&self, m: &DMatrix<f64>) -> DMatrix<f64> {
        match self {
            Norm::Spectral => m.clone(),
            Norm::Ellipsoid { t, t_inv } => t * m * t_inv,
        }
    }

    /// Largest and smallest singular value in this norm.
    pub fn singular_extremes(&self, m: &DMatrix<f64>) -> (f64, f64) {
        let sv = self.transform(m).singular_values();
        let max = sv.iter().copied().fold(0.0, f64::max);
        let min = sv.iter().copied().fold(f64::INFINITY, f64::min);
        (max, if min.is_finite() { min } else { 0.0 })
    }
}

/// Perron eigenvector of the averaged lift, from damped power iteration in
/// floating point, as a symmetric matrix.
pub fn numeric_perron_matrix(family: &MatrixFamily) -> DMatrix<f64> {
    let d = family.dim();
    let a = lifted_average(family).matrix.to_f64();
    let pairs = sym_pairs(d);
    let n = pairs.len();
    let mut x = nalgebra::DVector::from_fn(n, |i, _| if i < d { 1.0 } else { 0.0 });
    for _ in 0..5000 {
        let y = &x + &a * &x;
        let norm = y.norm();
        if !norm.is_finite() || norm <= 0.0 {
            break;
        }
        let y = y / norm;
        let diff = (&y - &x).norm();
        x = y;
        if diff < 1e-15 {
            break;
        }
    }
    let mut h = DMatrix::zeros(d, d);
    for (&(p, q), v) in pairs.iter().zip(x.iter()) {
        h[(p, q)] = *v;
        h[(q, p)] = *v;
    }
    if h.trace() < 0.0 {
        h = -h;
    }
    h
}

/// Ellipsoidal norm from the `ρ₂` Perron matrix when it is positive
/// definite, else the spectral norm.
pub fn default_norm(family: &MatrixFamily) -> Norm {
    Norm::ellipsoid(&numeric_perron_matrix(family)).unwrap_or(Norm::Spectral)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub lower: f64,
    pub upper: f64,
    pub norm: NormKind,
    pub depth: usize,
    /// Word whose product realizes the spectral-radius side of the bound.
    pub witness: Vec<usize>,
}

struct LevelStats {
    rho_max: (f64, usize),
    rho_min: (f64, usize),
    norm_max: f64,
    sigma_min: f64,
}

fn level_stats(level: &[Product], norm: &Norm, tol: f64) -> Result<LevelStats> {
    let stats: Vec<(f64, f64, f64)> = level
        .par_iter()
        .map(|p| {
            let rho = spectral_radius(&p.matrix, tol)?.value;
            let (hi, lo) = norm.singular_extremes(&p.matrix.to_f64());
            Ok((rho, hi, lo))
        })
        .collect::<Result<_>>()?;
    let mut out = LevelStats { rho_max: (0.0, 0), rho_min: (f64::INFINITY, 0), norm_max: 0.0, sigma_min: f64::INFINITY };
    for (i, &(rho, hi, lo)) in stats.iter().enumerate() {
        if rho > out.rho_max.0 {
            out.rho_max = (rho, i);
        }
        if rho < out.rho_min.0 {
            out.rho_min = (rho, i);
        }
        out.norm_max = out.norm_max.max(hi);
        out.sigma_min = out.sigma_min.min(lo);
    }
    Ok(out)
}

/// Joint and lower spectral radius bounds from all products up to `depth`.
pub fn all_bounds(family: &MatrixFamily, depth: usize, tol: f64, cap: usize, norm: &Norm) -> Result<(Bounds, Bounds)> {
    if depth == 0 {
        return Err(CsrError::Precondition("depth must be at least 1".into()));
    }
    let levels = products_by_length(family, depth, cap)?;
    let mut jsr = Bounds { lower: 0.0, upper: f64::INFINITY, norm: norm.kind(), depth, witness: Vec::new() };
    let mut lsr = Bounds { lower: 0.0, upper: f64::INFINITY, norm: norm.kind(), depth, witness: Vec::new() };
    for (k0, level) in levels.iter().enumerate() {
        let k = (k0 + 1) as f64;
        let s = level_stats(level, norm, tol)?;
        let lo = s.rho_max.0.powf(1.0 / k);
        if lo > jsr.lower || jsr.witness.is_empty() {
            jsr.lower = lo;
            jsr.witness = level[s.rho_max.1].word.clone();
        }
        jsr.upper = jsr.upper.min(s.norm_max.powf(1.0 / k));
        let up = s.rho_min.0.powf(1.0 / k);
        if up < lsr.upper {
            lsr.upper = up;
            lsr.witness = level[s.rho_min.1].word.clone();
        }
        lsr.lower = lsr.lower.max(s.sigma_min.powf(1.0 / k));
    }
    // Guard the floating-point sides against rounding past each other.
    jsr.upper = jsr.upper.max(jsr.lower);
    lsr.lower = lsr.lower.min(lsr.upper);
    Ok((jsr, lsr))
}

/// `lower ≤ ρ(family) ≤ upper`.
pub fn jsr_bounds(family: &MatrixFamily, depth: usize, tol: f64) -> Result<Bounds> {
    Ok(all_bounds(family, depth, tol, DEFAULT_CAP, &default_norm(family))?.0)
}

/// `lower ≤ ρ̌(family) ≤ upper`.
pub fn lsr_bounds(family: &MatrixFamily, depth: usize, tol: f64) -> Result<Bounds> {
    Ok(all_bounds(family, depth, tol, DEFAULT_CAP, &default_norm(family))?.1)
}

/// `(m^{-k} Σ ‖Π‖^p)^{1/(pk)}` over all `m^k` products of length `k`, in the
/// spectral norm; `p = 0` takes the geometric mean.
pub fn p_radius_estimate(family: &MatrixFamily, p: f64, length: usize, cap: usize) -> Result<f64> {
    if length == 0 {
        return Err(CsrError::Precondition("length must be at least 1".into()));
    }
    if !p.is_finite() {
        return Err(CsrError::Precondition("p must be finite".into()));
    }
    let m = family.len();
    let count = (m as f64).powi(length as i32);
    if count > cap as f64 {
        return Err(CsrError::ProductCapExceeded { cap });
    }
    let gens: Vec<DMatrix<f64>> = family.iter().map(RatMatrix::to_f64).collect();
    let mut level = vec![DMatrix::<f64>::identity(family.dim(), family.dim())];
    for _ in 0..length {
        level = level.par_iter().flat_map_iter(|a| gens.iter().map(move |g| a * g)).collect();
    }
    let norms: Vec<f64> = level.par_iter().map(|a| a.clone().singular_values().max()).collect();
    let k = length as f64;
    if p <= 0.0 && norms.contains(&0.0) {
        return Ok(0.0);
    }
    if p == 0.0 {
        let mean_log = norms.iter().map(|x| x.ln()).sum::<f64>() / count;
        return Ok((mean_log / k).exp());
    }
    // Work in logs to stay finite for large k.
    let logs: Vec<f64> = norms.iter().map(|x| p * x.ln()).collect();
    let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if top == f64::NEG_INFINITY {
        return Ok(0.0);
    }
    let sum: f64 = logs.iter().map(|l| (l - top).exp()).sum();
    let log_mean = top + sum.ln() - count.ln();
    Ok((log_mean / (p * k)).exp())
}

/// All joint spectral characteristics in one report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadiiReport {
    pub rho2: SpectralRadius,
    pub rho4: SpectralRadius,
    pub jsr_lower: f64,
    pub jsr_upper: f64,
    pub lsr_lower: f64,
    pub lsr_upper: f64,
    pub norm: NormKind,
    pub depth: usize,
}

pub fn radii_report(family: &MatrixFamily, depth: usize, tol: f64, cap: usize) -> Result<RadiiReport> {
    let (jsr, lsr) = all_bounds(family, depth, tol, cap, &default_norm(family))?;
    Ok(RadiiReport {
        rho2: rho_2(family, tol)?,
        rho4: rho_4(family, tol)?,
        jsr_lower: jsr.lower,
        jsr_upper: jsr.upper,
        lsr_lower: lsr.lower,
        lsr_upper: lsr.upper,
        norm: jsr.norm,
        depth,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rational::int;

    fn fam(ms: &[&[[i64; 2]]]) -> MatrixFamily {
        MatrixFamily::new(ms.iter().map(|m| RatMatrix::from_i64(m)).collect()).unwrap()
    }

    #[test]
    fn rho2_scales() {
        let f = fam(&[&[[1, 0], [0, 1]]]);
        assert!((rho_2(&f, 1e-9).unwrap().value - 1.0).abs() < 1e-12);
        assert!((rho_2(&f.scaled(&int(2)), 1e-9).unwrap().value - 2.0).abs() < 1e-12);
        assert!((rho_4(&f.scaled(&int(2)), 1e-9).unwrap().value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn jordan_bounds() {
        let b = jsr_bounds(&fam(&[&[[1, 1], [0, 1]]]), 4, 1e-9).unwrap();
        assert!((b.lower - 1.0).abs() < 1e-12);
        assert!(b.upper >= 1.0);
    }

    #[test]
    fn rotation_bounds_pinch() {
        let f = fam(&[&[[0, -1], [1, 0]]]);
        let (j, l) = all_bounds(&f, 3, 1e-9, DEFAULT_CAP, &default_norm(&f)).unwrap();
        for x in [j.lower, j.upper, l.lower, l.upper] {
            assert!((x - 1.0).abs() < 1e-9, "{j:?} {l:?}");
        }
    }

    #[test]
    fn nilpotent_generator_gives_zero_lsr() {
        let f = fam(&[&[[0, 1], [0, 0]], &[[1, 0], [0, 1]]]);
        assert_eq!(lsr_bounds(&f, 3, 1e-9).unwrap().upper, 0.0);
    }

    #[test]
    fn per_level_dedup() {
        let f = fam(&[&[[0, -1], [1, 0]]]);
        let levels = products_by_length(&f, 5, DEFAULT_CAP).unwrap();
        assert!(levels.iter().all(|l| l.len() == 1));
        let (all, closed) = distinct_elements(&f, 10, DEFAULT_CAP).unwrap();
        assert!(closed);
        assert_eq!(all.len(), 4);
    }

    #[test]
    fn cap_is_enforced() {
        let f = fam(&[&[[1, 1], [0, 1]], &[[1, 0], [1, 1]]]);
        assert!(matches!(products_by_length(&f, 12, 100), Err(CsrError::ProductCapExceeded { cap: 100 })));
    }

    #[test]
    fn p_radius_of_single_matrix_tends_to_rho() {
        let f = fam(&[&[[1, 1], [1, 2]]]);
        let want = (3.0 + 5f64.sqrt()) / 2.0;
        let est = p_radius_estimate(&f, 2.0, 40, DEFAULT_CAP).unwrap();
        assert!((est - want).abs() < 0.05);
        let id = fam(&[&[[1, 0], [0, 1]]]);
        assert!((p_radius_estimate(&id, 0.0, 3, DEFAULT_CAP).unwrap() - 1.0).abs() < 1e-12);
    }
}
