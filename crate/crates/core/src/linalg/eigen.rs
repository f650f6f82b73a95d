//! Floating-point eigenvalues: balancing, Hessenberg reduction and the
//! Francis double-shift QR iteration, plus the exact-guided spectral radius.

use nalgebra::DMatrix;
use num::complex::Complex64;
use num::Zero;
use serde::{Deserialize, Serialize};

use super::elimination::determinant;
use super::matrix::RatMatrix;
use super::poly::{charpoly, polish_roots};
use super::rational::Rational;
use crate::error::{CsrError, Result};

const MAX_ITS: usize = 60;
/// Above this size clustered spectra are resolved by cluster means instead
/// of an exact characteristic polynomial.
const EXACT_LIMIT: usize = 24;

/// A spectral radius with an a-posteriori error estimate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralRadius {
    pub value: f64,
    pub error_bound: f64,
}

fn balance(a: &mut DMatrix<f64>) {
    const RADIX: f64 = 2.0;
    let n = a.nrows();
    let sqrdx = RADIX * RADIX;
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let mut r: f64 = 0.0;
            let mut c: f64 = 0.0;
            for j in 0..n {
                if j != i {
                    c += a[(j, i)].abs();
                    r += a[(i, j)].abs();
                }
            }
            if c != 0.0 && r != 0.0 {
                let mut g = r / RADIX;
                let mut f = 1.0;
                let s = c + r;
                while c < g {
                    f *= RADIX;
                    c *= sqrdx;
                }
                g = r * RADIX;
                while c > g {
                    f /= RADIX;
                    c /= sqrdx;
                }
                if (c + r) / f < 0.95 * s {
                    done = false;
                    let g = 1.0 / f;
                    for j in 0..n {
                        a[(i, j)] *= g;
                    }
                    for j in 0..n {
                        a[(j, i)] *= f;
                    }
                }
            }
        }
    }
}

/// Reduction to upper Hessenberg form by stabilized elementary similarity
/// transformations.
fn hessenberg(a: &mut DMatrix<f64>) {
    let n = a.nrows();
    for m in 1..n.saturating_sub(1) {
        let mut x: f64 = 0.0;
        let mut i = m;
        for j in m..n {
            if a[(j, m - 1)].abs() > x.abs() {
                x = a[(j, m - 1)];
                i = j;
            }
        }
        if i != m {
            for j in m - 1..n {
                a.swap((i, j), (m, j));
            }
            for j in 0..n {
                a.swap((j, i), (j, m));
            }
        }
        if x != 0.0 {
            for i in m + 1..n {
                let mut y = a[(i, m - 1)];
                if y != 0.0 {
                    y /= x;
                    a[(i, m - 1)] = y;
                    for j in m..n {
                        a[(i, j)] -= y * a[(m, j)];
                    }
                    for j in 0..n {
                        a[(j, m)] += y * a[(j, i)];
                    }
                }
            }
        }
    }
    for i in 0..n {
        for j in 0..i.saturating_sub(1) {
            a[(i, j)] = 0.0;
        }
    }
}

fn sign(a: f64, b: f64) -> f64 {
    if b >= 0.0 {
        a.abs()
    } else {
        -a.abs()
    }
}

/// Eigenvalues of an upper Hessenberg matrix by Francis double-shift QR.
fn hqr(a: &mut DMatrix<f64>) -> Result<Vec<Complex64>> {
    let n = a.nrows() as isize;
    let mut wr = vec![Complex64::zero(); n as usize];
    let at = |i: isize, j: isize| (i as usize, j as usize);
    let mut anorm = 0.0;
    for i in 0..n {
        for j in (i - 1).max(0)..n {
            anorm += a[at(i, j)].abs();
        }
    }
    let eps = f64::EPSILON;
    let mut nn = n - 1;
    let mut t = 0.0;
    while nn >= 0 {
        let mut its = 0;
        loop {
            let mut l = nn;
            while l > 0 {
                let mut s = a[at(l - 1, l - 1)].abs() + a[at(l, l)].abs();
                if s == 0.0 {
                    s = anorm;
                }
                if a[at(l, l - 1)].abs() <= eps * s {
                    a[at(l, l - 1)] = 0.0;
                    break;
                }
                l -= 1;
            }
            let mut x = a[at(nn, nn)];
            if l == nn {
                wr[nn as usize] = Complex64::new(x + t, 0.0);
                nn -= 1;
            } else {
                let mut y = a[at(nn - 1, nn - 1)];
                let mut w = a[at(nn, nn - 1)] * a[at(nn - 1, nn)];
                if l == nn - 1 {
                    let p = 0.5 * (y - x);
                    let q = p * p + w;
                    let mut z = q.abs().sqrt();
                    x += t;
                    if q >= 0.0 {
                        z = p + sign(z, p);
                        wr[nn as usize - 1] = Complex64::new(x + z, 0.0);
                        wr[nn as usize] = Complex64::new(x + z, 0.0);
                        if z != 0.0 {
                            wr[nn as usize] = Complex64::new(x - w / z, 0.0);
                        }
                    } else {
                        wr[nn as usize] = Complex64::new(x + p, -z);
                        wr[nn as usize - 1] = Complex64::new(x + p, z);
                    }
                    nn -= 2;
                } else {
                    if its == MAX_ITS {
                        return Err(CsrError::EigenNoConvergence { iterations: its });
                    }
                    if its > 0 && its % 10 == 0 {
                        // Exceptional shift.
                        t += x;
                        for i in 0..=nn {
                            a[at(i, i)] -= x;
                        }
                        let s = a[at(nn, nn - 1)].abs() + a[at(nn - 1, nn - 2)].abs();
                        x = 0.75 * s;
                        y = x;
                        w = -0.4375 * s * s;
                    }
                    its += 1;
                    let (mut p, mut q, mut r);
                    let mut z;
                    let mut m = nn - 2;
                    loop {
                        z = a[at(m, m)];
                        r = x - z;
                        let s0 = y - z;
                        p = (r * s0 - w) / a[at(m + 1, m)] + a[at(m, m + 1)];
                        q = a[at(m + 1, m + 1)] - z - r - s0;
                        r = a[at(m + 2, m + 1)];
                        let s = p.abs() + q.abs() + r.abs();
                        p /= s;
                        q /= s;
                        r /= s;
                        if m == l {
                            break;
                        }
                        let u = a[at(m, m - 1)].abs() * (q.abs() + r.abs());
                        let v = p.abs() * (a[at(m - 1, m - 1)].abs() + z.abs() + a[at(m + 1, m + 1)].abs());
                        if u <= eps * v {
                            break;
                        }
                        m -= 1;
                    }
                    for i in m..nn - 1 {
                        a[at(i + 2, i)] = 0.0;
                        if i != m {
                            a[at(i + 2, i - 1)] = 0.0;
                        }
                    }
                    let mut k = m;
                    while k < nn {
                        if k != m {
                            p = a[at(k, k - 1)];
                            q = a[at(k + 1, k - 1)];
                            r = 0.0;
                            if k + 1 != nn {
                                r = a[at(k + 2, k - 1)];
                            }
                            x = p.abs() + q.abs() + r.abs();
                            if x != 0.0 {
                                p /= x;
                                q /= x;
                                r /= x;
                            }
                        }
                        let s = sign((p * p + q * q + r * r).sqrt(), p);
                        if s != 0.0 {
                            if k == m {
                                if l != m {
                                    a[at(k, k - 1)] = -a[at(k, k - 1)];
                                }
                            } else {
                                a[at(k, k - 1)] = -s * x;
                            }
                            p += s;
                            x = p / s;
                            y = q / s;
                            z = r / s;
                            q /= p;
                            r /= p;
                            for j in k..=nn {
                                p = a[at(k, j)] + q * a[at(k + 1, j)];
                                if k + 1 != nn {
                                    p += r * a[at(k + 2, j)];
                                    a[at(k + 2, j)] -= p * z;
                                }
                                a[at(k + 1, j)] -= p * y;
                                a[at(k, j)] -= p * x;
                            }
                            let mmin = if nn < k + 3 { nn } else { k + 3 };
                            for i in l..=mmin {
                                p = x * a[at(i, k)] + y * a[at(i, k + 1)];
                                if k + 1 != nn {
                                    p += z * a[at(i, k + 2)];
                                    a[at(i, k + 2)] -= p * r;
                                }
                                a[at(i, k + 1)] -= p * q;
                                a[at(i, k)] -= p;
                            }
                        }
                        k += 1;
                    }
                }
            }
            if l >= nn - 1 {
                break;
            }
        }
    }
    Ok(wr)
}

/// All eigenvalues of a real matrix.
pub fn eigenvalues_f64(m: &DMatrix<f64>) -> Result<Vec<Complex64>> {
    if !m.is_square() {
        return Err(CsrError::NotSquare { rows: m.nrows(), cols: m.ncols() });
    }
    if m.nrows() == 0 {
        return Ok(Vec::new());
    }
    if m.iter().any(|x| !x.is_finite()) {
        return Err(CsrError::Precondition("matrix has non-finite entries".into()));
    }
    let mut a = m.clone();
    balance(&mut a);
    hessenberg(&mut a);
    hqr(&mut a)
}

/// Largest eigenvalue modulus of a floating-point matrix, without refinement.
pub fn spectral_radius_f64(m: &DMatrix<f64>) -> Result<f64> {
    Ok(eigenvalues_f64(m)?.iter().map(|z| z.norm()).fold(0.0, f64::max))
}

/// Spectral radius of an exact matrix.
///
/// The QR eigenvalues are accurate for well separated eigenvalues. When the
/// dominant ones form a tight cluster the error estimate is the cluster
/// diameter; if that exceeds `tol`, the cluster is resolved from the exact
/// squarefree characteristic polynomial (small matrices) or replaced by its
/// centroid, which is well conditioned for a multiple eigenvalue.
pub fn spectral_radius(m: &RatMatrix, tol: f64) -> Result<SpectralRadius> {
    m.ensure_square()?;
    let n = m.rows();
    if n == 0 {
        return Ok(SpectralRadius { value: 0.0, error_bound: 0.0 });
    }
    let f = m.to_f64();
    let fro = f.norm();
    let base_err = 64.0 * n as f64 * f64::EPSILON * fro.max(f64::MIN_POSITIVE);
    let eig = eigenvalues_f64(&f)?;
    let rho = eig.iter().map(|z| z.norm()).fold(0.0, f64::max);

    // Clusters near the top modulus.
    let radius = 1e-6 * (1.0 + rho);
    let top: Vec<Complex64> = eig.iter().copied().filter(|z| z.norm() >= rho - radius).collect();
    let mut diameter: f64 = 0.0;
    for (i, a) in top.iter().enumerate() {
        for b in &top[i + 1..] {
            let d = (a - b).norm();
            if d < radius {
                diameter = diameter.max(d);
            }
        }
    }
    let clustered = top.iter().enumerate().any(|(i, a)| top[i + 1..].iter().any(|b| (a - b).norm() < radius));
    if !clustered {
        return Ok(SpectralRadius { value: rho, error_bound: base_err });
    }
    let err = diameter.max(base_err);
    if err <= tol {
        return Ok(SpectralRadius { value: rho, error_bound: err });
    }
    if n <= EXACT_LIMIT {
        return exact_path(m);
    }
    Ok(cluster_centroids(&eig, radius, base_err))
}

fn exact_path(m: &RatMatrix) -> Result<SpectralRadius> {
    let p = charpoly(m).squarefree();
    let deg = p.degree();
    if deg == 0 {
        return Ok(SpectralRadius { value: 0.0, error_bound: 0.0 });
    }
    let c: Vec<f64> = p.coeffs().iter().map(super::rational::to_f64).collect();
    let comp = DMatrix::from_fn(deg, deg, |i, j| {
        if i == 0 {
            -c[deg - 1 - j] / c[deg]
        } else if i == j + 1 {
            1.0
        } else {
            0.0
        }
    });
    let roots = polish_roots(&p, eigenvalues_f64(&comp)?);
    let dp = p.derivative();
    let mut best = 0.0f64;
    let mut err = 0.0f64;
    for z in roots {
        let r = z.norm();
        let d = dp.eval_complex(z).norm();
        let e = if d > 0.0 { deg as f64 * p.eval_complex(z).norm() / d } else { f64::INFINITY };
        let e = e + 4.0 * f64::EPSILON * r;
        if r > best {
            best = r;
        }
        err = err.max(e);
    }
    Ok(SpectralRadius { value: best, error_bound: err })
}

fn cluster_centroids(eig: &[Complex64], radius: f64, base_err: f64) -> SpectralRadius {
    let mut used = vec![false; eig.len()];
    let mut best = 0.0f64;
    for i in 0..eig.len() {
        if used[i] {
            continue;
        }
        let members: Vec<usize> = (i..eig.len()).filter(|&j| !used[j] && (eig[j] - eig[i]).norm() < radius).collect();
        let mut c = Complex64::zero();
        for &j in &members {
            used[j] = true;
            c += eig[j];
        }
        c /= members.len() as f64;
        best = best.max(c.norm());
    }
    SpectralRadius { value: best, error_bound: base_err * eig.len() as f64 }
}

/// Whether `det(M − I) = 0` exactly.
pub fn has_eigenvalue_one(m: &RatMatrix) -> Result<bool> {
    m.ensure_square()?;
    let shifted = m - &RatMatrix::identity(m.rows());
    Ok(determinant(&shifted)? == Rational::zero())
}
