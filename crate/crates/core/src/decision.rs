//! Deciding whether every product of a family has spectral radius one.
//!
//! Irreducible families are decided exactly through affine invariant
//! subspaces: of the family itself for nonnegative input, of the lifted
//! family `X ↦ AᵀXA` in general. Reducible families are split into
//! irreducible blocks; the family is c.s.r. when one block is and the joint
//! spectral radius of every other block is at most one. That last question
//! is undecidable in general, so it is answered by depth-bounded bounds and
//! may come back `Unknown`.

use nalgebra::DMatrix;
use num::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{CsrError, Result};
use crate::lifting::{is_positive_definite, lifted_average, lifted_family, perron_in_cone, tensor_square, SymVec};
use crate::linalg::{
    has_eigenvalue_one, kernel_basis, solve, spectral_radius, MatrixFamily, RatMatrix, Rational, SpanBuilder,
    SpectralRadius, SubspaceBasis,
};
use crate::radii::{all_bounds, default_norm, distinct_elements, rho_2, rho_4, Norm, DEFAULT_CAP, DEFAULT_DEPTH};
use crate::subspace::{
    block_factorize, closure_of, is_irreducible, is_positively_irreducible, positive_block_factorize, BlockFactorization,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Answer {
    Yes,
    No,
    Unknown,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    NonnegAffine,
    LiftedAffine,
    RadiiEqual,
    BlockComposite,
    BruteForce,
}

/// How a diagonal block's joint spectral radius compares with one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JsrStatus {
    AtMostOne,
    AboveOne,
    Unresolved,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockOutcome {
    pub size: usize,
    pub verdict: CsrVerdict,
    pub jsr: JsrStatus,
    pub jsr_lower: f64,
    pub jsr_upper: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    /// `V = v + Ṽ` is invariant and misses the origin.
    AffineSubspace { subspace: SubspaceBasis },
    /// The same in symmetric-matrix coordinates; `h` is the point as a
    /// matrix, an invariant ellipsoid.
    LiftedAffine { h: RatMatrix, subspace: SubspaceBasis },
    /// The point of `subspace` lies in its linear part, so no invariant
    /// affine subspace avoids the origin.
    AffineMembership { subspace: SubspaceBasis },
    Counterexample { word: Vec<usize>, matrix: RatMatrix, spectral_radius: f64 },
    /// An averaged operator whose spectral radius is not one.
    AverageRadius { average: RatMatrix, lifted: bool, spectral_radius: f64 },
    Radii { rho2: SpectralRadius, rho4: SpectralRadius },
    Blocks { change_of_basis: RatMatrix, blocks: Vec<BlockOutcome> },
    /// Eigenspace in which no PSD fixed point was found.
    Kernel { kernel: SubspaceBasis },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CsrVerdict {
    pub answer: Answer,
    pub method: Method,
    pub certificate: Option<Certificate>,
    pub depth_used: Option<usize>,
}

impl CsrVerdict {
    fn new(answer: Answer, method: Method, certificate: Certificate) -> Self {
        Self { answer, method, certificate: Some(certificate), depth_used: None }
    }

    pub fn is_yes(&self) -> bool {
        self.answer == Answer::Yes
    }

    pub fn witness(&self) -> Option<(&[usize], f64)> {
        match &self.certificate {
            Some(Certificate::Counterexample { word, spectral_radius, .. }) => Some((word, *spectral_radius)),
            _ => None,
        }
    }
}

/// Search depth, tolerance and product cap shared by the procedures.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Options {
    pub depth: usize,
    pub tol: f64,
    pub cap: usize,
}

impl Default for Options {
    fn default() -> Self {
        Self { depth: DEFAULT_DEPTH, tol: 1e-9, cap: DEFAULT_CAP }
    }
}

impl Options {
    pub fn with_tol(tol: f64) -> Self {
        Self { tol, ..Self::default() }
    }
}

/// Shortest product (up to `depth`) whose spectral radius differs from one
/// by more than `tol` plus its error estimate.
pub fn find_counterexample(family: &MatrixFamily, opts: &Options) -> Result<Option<Certificate>> {
    let elements = match distinct_elements(family, opts.depth, opts.cap) {
        Ok((e, _)) => e,
        Err(CsrError::ProductCapExceeded { .. }) => return Ok(None),
        Err(e) => return Err(e),
    };
    for p in elements {
        let r = spectral_radius(&p.matrix, opts.tol)?;
        if (r.value - 1.0).abs() > opts.tol + r.error_bound {
            return Ok(Some(Certificate::Counterexample {
                word: p.word,
                matrix: p.matrix,
                spectral_radius: r.value,
            }));
        }
    }
    Ok(None)
}

fn no_with_evidence(family: &MatrixFamily, method: Method, fallback: Certificate, opts: &Options) -> Result<CsrVerdict> {
    let cert = find_counterexample(family, opts)?.unwrap_or(fallback);
    Ok(CsrVerdict::new(Answer::No, method, cert))
}

/// Differences `x − A x` and the smallest invariant subspace holding them.
fn difference_closure(gens: &[RatMatrix], x: &[Rational]) -> SpanBuilder {
    let seeds: Vec<Vec<Rational>> = gens
        .iter()
        .map(|g| g.mul_vec(x).iter().zip(x).map(|(a, b)| b - a).collect())
        .collect();
    closure_of(gens, &seeds, x.len())
}

/// Decision for a nonnegative, positively irreducible family through the
/// Perron vector of the average.
pub fn decide_nonneg(family: &MatrixFamily, tol: f64) -> Result<CsrVerdict> {
    decide_nonneg_with(family, &Options::with_tol(tol))
}

pub fn decide_nonneg_with(family: &MatrixFamily, opts: &Options) -> Result<CsrVerdict> {
    if !is_positively_irreducible(family)? {
        return Err(CsrError::Precondition("family is not positively irreducible".into()));
    }
    let avg = family.average();
    let n = family.dim();
    let average_radius = |avg: &RatMatrix| -> Result<Certificate> {
        Ok(Certificate::AverageRadius {
            average: avg.clone(),
            lifted: false,
            spectral_radius: spectral_radius(avg, opts.tol)?.value,
        })
    };
    if !has_eigenvalue_one(&avg)? {
        return no_with_evidence(family, Method::NonnegAffine, average_radius(&avg)?, opts);
    }
    let kernel = kernel_basis(&(&avg - &RatMatrix::identity(n)));
    if kernel.dim() != 1 {
        // The Perron root of an irreducible nonnegative matrix is simple, so
        // a larger eigenspace at one means the Perron root exceeds one.
        let r = spectral_radius(&avg, opts.tol)?;
        if r.value > 1.0 + opts.tol + r.error_bound {
            return no_with_evidence(family, Method::NonnegAffine, average_radius(&avg)?, opts);
        }
        return Err(CsrError::PerronInconsistent { dim: kernel.dim() });
    }
    let mut v = kernel.vectors()[0].clone();
    if v.iter().any(Signed::is_negative) {
        v.iter_mut().for_each(|x| *x = -x.clone());
    }
    if !v.iter().all(Signed::is_positive) {
        // Only the Perron eigenvalue has a positive eigenvector.
        return no_with_evidence(family, Method::NonnegAffine, average_radius(&avg)?, opts);
    }
    let span = difference_closure(family.generators(), &v);
    let contains = span.contains(&v);
    let subspace = span.into_basis().with_point(v);
    if contains {
        no_with_evidence(family, Method::NonnegAffine, Certificate::AffineMembership { subspace }, opts)
    } else {
        Ok(CsrVerdict::new(Answer::Yes, Method::NonnegAffine, Certificate::AffineSubspace { subspace }))
    }
}

/// Lifted data shared by the irreducible decision and its certificates.
struct Lifted {
    y: SymVec,
    lifts: Vec<RatMatrix>,
    span: SpanBuilder,
}

enum LiftOutcome {
    Ready(Lifted),
    Verdict(CsrVerdict),
}

fn lift_and_close(family: &MatrixFamily, opts: &Options) -> Result<LiftOutcome> {
    let avg = lifted_average(family);
    let guard = |opts: &Options| -> Result<Option<Certificate>> {
        let r = spectral_radius(&avg.matrix, opts.tol)?;
        Ok((r.value > 1.0 + opts.tol + r.error_bound).then(|| Certificate::AverageRadius {
            average: avg.matrix.clone(),
            lifted: true,
            spectral_radius: r.value,
        }))
    };
    if !has_eigenvalue_one(&avg.matrix)? {
        let r = spectral_radius(&avg.matrix, opts.tol)?;
        let cert = Certificate::AverageRadius { average: avg.matrix.clone(), lifted: true, spectral_radius: r.value };
        return no_with_evidence(family, Method::LiftedAffine, cert, opts).map(LiftOutcome::Verdict);
    }
    let y = match perron_in_cone(&avg) {
        Ok(y) => y,
        Err(CsrError::NoPsdEigenvector { kernel }) => {
            if let Some(cert) = guard(opts)? {
                return no_with_evidence(family, Method::LiftedAffine, cert, opts).map(LiftOutcome::Verdict);
            }
            let mut v = CsrVerdict::new(Answer::Unknown, Method::LiftedAffine, Certificate::Kernel { kernel });
            v.depth_used = Some(opts.depth);
            return Ok(LiftOutcome::Verdict(v));
        }
        Err(e) => return Err(e),
    };
    // A positive definite fixed point lies inside the cone, which forces it
    // to be the Perron eigenvector: the lifted radius is exactly one.
    if !is_positive_definite(&y.unvectorize()) {
        if let Some(cert) = guard(opts)? {
            return no_with_evidence(family, Method::LiftedAffine, cert, opts).map(LiftOutcome::Verdict);
        }
        let kernel = kernel_basis(&(&avg.matrix - &RatMatrix::identity(avg.matrix.rows())));
        let mut v = CsrVerdict::new(Answer::Unknown, Method::LiftedAffine, Certificate::Kernel { kernel });
        v.depth_used = Some(opts.depth);
        return Ok(LiftOutcome::Verdict(v));
    }
    let lifts = lifted_family(family).into_generators();
    let span = difference_closure(&lifts, y.coords());
    Ok(LiftOutcome::Ready(Lifted { y, lifts, span }))
}

/// Decision for an irreducible family through the lifted operators.
pub fn decide_irreducible(family: &MatrixFamily, tol: f64) -> Result<CsrVerdict> {
    if !is_irreducible(family) {
        return Err(CsrError::Precondition("family is reducible".into()));
    }
    decide_irreducible_unchecked(family, &Options::with_tol(tol))
}

/// [`decide_irreducible`] without the irreducibility check, for blocks that
/// are irreducible by construction.
pub fn decide_irreducible_unchecked(family: &MatrixFamily, opts: &Options) -> Result<CsrVerdict> {
    let lifted = match lift_and_close(family, opts)? {
        LiftOutcome::Ready(l) => l,
        LiftOutcome::Verdict(v) => return Ok(v),
    };
    let Lifted { y, span, .. } = lifted;
    let contains = span.contains(y.coords());
    let h = y.unvectorize();
    let subspace = span.into_basis().with_point(y.coords().to_vec());
    if contains {
        no_with_evidence(family, Method::LiftedAffine, Certificate::AffineMembership { subspace }, opts)
    } else {
        Ok(CsrVerdict::new(Answer::Yes, Method::LiftedAffine, Certificate::LiftedAffine { h, subspace }))
    }
}

/// Floating-point cross-check: yes iff `ρ₂` and `ρ₄` both equal one within
/// `tol`.
pub fn decide_radii(family: &MatrixFamily, tol: f64) -> Result<CsrVerdict> {
    let rho2 = rho_2(family, tol)?;
    let rho4 = rho_4(family, tol)?;
    let ok = |r: &SpectralRadius| (r.value - 1.0).abs() <= tol + r.error_bound;
    let answer = if ok(&rho2) && ok(&rho4) { Answer::Yes } else { Answer::No };
    Ok(CsrVerdict::new(answer, Method::RadiiEqual, Certificate::Radii { rho2, rho4 }))
}

/// Direct enumeration of the products up to `depth`. A `Yes` only says that
/// no violation exists up to that length.
pub fn brute_force_csr(family: &MatrixFamily, depth: usize, tol: f64) -> Result<CsrVerdict> {
    brute_force_with(family, &Options { depth, tol, cap: DEFAULT_CAP })
}

pub fn brute_force_with(family: &MatrixFamily, opts: &Options) -> Result<CsrVerdict> {
    let (elements, _) = distinct_elements(family, opts.depth, opts.cap)?;
    for p in elements {
        let r = spectral_radius(&p.matrix, opts.tol)?;
        if (r.value - 1.0).abs() > opts.tol + r.error_bound {
            let cert = Certificate::Counterexample { word: p.word, matrix: p.matrix, spectral_radius: r.value };
            let mut v = CsrVerdict::new(Answer::No, Method::BruteForce, cert);
            v.depth_used = Some(opts.depth);
            return Ok(v);
        }
    }
    Ok(CsrVerdict { answer: Answer::Yes, method: Method::BruteForce, certificate: None, depth_used: Some(opts.depth) })
}

fn decide_scalar_block(block: &MatrixFamily) -> (CsrVerdict, JsrStatus, f64) {
    let vals: Vec<Rational> = block.iter().map(|g| g.get(0, 0).clone()).collect();
    let max = vals.iter().map(|x| x.abs()).max().expect("nonempty family");
    let unit = vals.iter().all(|x| x.abs().is_one());
    let max_f = crate::linalg::rational::to_f64(&max);
    let jsr = if max > Rational::one() { JsrStatus::AboveOne } else { JsrStatus::AtMostOne };
    let verdict = if unit {
        CsrVerdict { answer: Answer::Yes, method: Method::BruteForce, certificate: None, depth_used: Some(1) }
    } else {
        let i = vals.iter().position(|x| !x.abs().is_one()).expect("a non-unit entry");
        let m = block.generators()[i].clone();
        let cert = Certificate::Counterexample {
            word: vec![i],
            spectral_radius: crate::linalg::rational::to_f64(&m.get(0, 0).abs()),
            matrix: m,
        };
        CsrVerdict::new(Answer::No, Method::BruteForce, cert)
    };
    (verdict, jsr, max_f)
}

/// Full decision: block factorization, a per-block verdict, and the
/// composition rule.
pub fn decide(family: &MatrixFamily, depth: usize, tol: f64) -> Result<CsrVerdict> {
    decide_with(family, &Options { depth, tol, cap: DEFAULT_CAP })
}

pub fn decide_with(family: &MatrixFamily, opts: &Options) -> Result<CsrVerdict> {
    let nonneg = family.is_nonnegative();
    let bf = if nonneg { positive_block_factorize(family)? } else { block_factorize(family) };
    let block_verdict = |block: &MatrixFamily| -> Result<CsrVerdict> {
        if nonneg {
            decide_nonneg_with(block, opts)
        } else {
            decide_irreducible_unchecked(block, opts)
        }
    };
    if bf.num_blocks() == 1 {
        if family.dim() == 1 {
            return Ok(decide_scalar_block(family).0);
        }
        return block_verdict(family);
    }

    let mut outcomes = Vec::with_capacity(bf.num_blocks());
    for j in 0..bf.num_blocks() {
        let block = bf.block_family(j);
        let outcome = if block.dim() == 1 {
            let (verdict, jsr, max) = decide_scalar_block(&block);
            BlockOutcome { size: 1, verdict, jsr, jsr_lower: max, jsr_upper: max }
        } else {
            let verdict = block_verdict(&block)?;
            block_jsr(&block, verdict, opts)?
        };
        outcomes.push(outcome);
    }
    Ok(compose(family, bf, outcomes, opts))
}

const FINITE_DEPTH: usize = 16;
const FINITE_CAP: usize = 5_000;

fn block_jsr(block: &MatrixFamily, verdict: CsrVerdict, opts: &Options) -> Result<BlockOutcome> {
    let size = block.dim();
    if verdict.is_yes() {
        return Ok(BlockOutcome { size, verdict, jsr: JsrStatus::AtMostOne, jsr_lower: 1.0, jsr_upper: 1.0 });
    }
    // A finite semigroup is bounded, so its joint spectral radius is at most one.
    if let Ok((elements, true)) = distinct_elements(block, opts.depth.max(FINITE_DEPTH), FINITE_CAP.min(opts.cap)) {
        let mut top = 0.0f64;
        for p in &elements {
            top = top.max(spectral_radius(&p.matrix, opts.tol)?.value);
        }
        return Ok(BlockOutcome { size, verdict, jsr: JsrStatus::AtMostOne, jsr_lower: top, jsr_upper: top });
    }
    let (lower, upper) = match all_bounds(block, opts.depth, opts.tol, opts.cap, &default_norm(block)) {
        Ok((j, _)) => (j.lower, j.upper),
        Err(CsrError::ProductCapExceeded { .. }) => (0.0, f64::INFINITY),
        Err(e) => return Err(e),
    };
    let jsr = if upper <= 1.0 + opts.tol {
        JsrStatus::AtMostOne
    } else if lower > 1.0 + opts.tol {
        JsrStatus::AboveOne
    } else {
        JsrStatus::Unresolved
    };
    Ok(BlockOutcome { size, verdict, jsr, jsr_lower: lower, jsr_upper: upper })
}

fn compose(family: &MatrixFamily, bf: BlockFactorization, outcomes: Vec<BlockOutcome>, opts: &Options) -> CsrVerdict {
    let above = outcomes.iter().position(|o| o.jsr == JsrStatus::AboveOne);
    let any_yes = outcomes.iter().any(|o| o.verdict.is_yes());
    let all_le1 = outcomes.iter().all(|o| o.jsr == JsrStatus::AtMostOne);
    let any_unknown = outcomes.iter().any(|o| o.verdict.answer == Answer::Unknown);
    let blocks = Certificate::Blocks { change_of_basis: bf.change_of_basis.clone(), blocks: outcomes.clone() };

    if let Some(j) = above {
        // A block product with radius above one; the same word in the full
        // family has that block's eigenvalues among its own.
        if let Some(cert) = lift_block_witness(family, &bf, j, opts) {
            return CsrVerdict::new(Answer::No, Method::BlockComposite, cert);
        }
        return CsrVerdict::new(Answer::No, Method::BlockComposite, blocks);
    }
    if any_yes && all_le1 {
        return CsrVerdict::new(Answer::Yes, Method::BlockComposite, blocks);
    }
    if !any_yes && !any_unknown && all_le1 {
        return CsrVerdict::new(Answer::No, Method::BlockComposite, blocks);
    }
    CsrVerdict { answer: Answer::Unknown, method: Method::BlockComposite, certificate: Some(blocks), depth_used: Some(opts.depth) }
}

fn lift_block_witness(family: &MatrixFamily, bf: &BlockFactorization, j: usize, opts: &Options) -> Option<Certificate> {
    let block = bf.block_family(j);
    let word = if block.dim() == 1 {
        let i = block
            .iter()
            .position(|g| g.get(0, 0).abs() > Rational::one())?;
        vec![i]
    } else {
        all_bounds(&block, opts.depth, opts.tol, opts.cap, &Norm::Spectral).ok()?.0.witness
    };
    let matrix = family.product(&word);
    let r = spectral_radius(&matrix, opts.tol).ok()?;
    Some(Certificate::Counterexample { word, matrix, spectral_radius: r.value })
}

/// Exact re-check of a verdict's certificate against the family.
pub fn verify_certificate(family: &MatrixFamily, verdict: &CsrVerdict, tol: f64) -> bool {
    let Some(cert) = &verdict.certificate else { return verdict.method == Method::BruteForce };
    match cert {
        Certificate::AffineSubspace { subspace } => affine_invariant(family.generators(), subspace),
        Certificate::LiftedAffine { h, subspace } => {
            let lifts = lifted_family(family).into_generators();
            let point_matches = SymVec::vectorize(h).map(|s| Some(s.coords()) == subspace.affine_point()).unwrap_or(false);
            point_matches && crate::lifting::is_psd(h) && affine_invariant(&lifts, subspace)
        }
        Certificate::AffineMembership { subspace } => {
            let gens = if subspace.ambient_dim() == family.dim() {
                family.generators().to_vec()
            } else {
                lifted_family(family).into_generators()
            };
            let Some(p) = subspace.affine_point() else { return false };
            let span = difference_closure(&gens, p);
            span.contains(p) && span.dim() == subspace.dim()
        }
        Certificate::Counterexample { word, matrix, .. } => {
            word.iter().all(|&i| i < family.len())
                && &family.product(word) == matrix
                && spectral_radius(matrix, tol).map(|r| (r.value - 1.0).abs() > tol).unwrap_or(false)
        }
        Certificate::AverageRadius { average, lifted, .. } => {
            let want = if *lifted { lifted_average(family).matrix } else { family.average() };
            &want == average
                && (!has_eigenvalue_one(average).unwrap_or(true)
                    || spectral_radius(average, tol).map(|r| (r.value - 1.0).abs() > tol).unwrap_or(false))
        }
        Certificate::Radii { .. } | Certificate::Kernel { .. } => true,
        Certificate::Blocks { change_of_basis, blocks } => {
            let sizes: Vec<usize> = blocks.iter().map(|b| b.size).collect();
            let bf = BlockFactorization {
                change_of_basis: change_of_basis.clone(),
                block_sizes: sizes,
                diagonal_blocks: Vec::new(),
                permutation_only: false,
            };
            let Ok(ti) = crate::linalg::inverse(change_of_basis) else { return false };
            let offsets = bf.offsets();
            family.iter().all(|a| {
                let c = &(&ti * a) * change_of_basis;
                offsets.iter().zip(&bf.block_sizes).all(|(&o, &s)| {
                    (o + s..c.rows()).all(|i| (o..o + s).all(|j| c.get(i, j).is_zero()))
                })
            })
        }
    }
}

/// `A(p + Ṽ) ⊆ p + Ṽ` for every `A`, and `0 ∉ p + Ṽ`.
fn affine_invariant(gens: &[RatMatrix], subspace: &SubspaceBasis) -> bool {
    let Some(p) = subspace.affine_point() else { return false };
    let mut span = SpanBuilder::new(subspace.ambient_dim());
    for v in subspace.vectors() {
        span.insert(v);
    }
    if span.contains(p) {
        return false;
    }
    gens.iter().all(|g| {
        let gp = g.mul_vec(p);
        let diff: Vec<Rational> = gp.iter().zip(p).map(|(a, b)| a - b).collect();
        span.contains(&diff) && subspace.vectors().iter().all(|v| span.contains(&g.mul_vec(v)))
    })
}

/// An invariant ellipsoid `xᵀHx = 1` for an irreducible c.s.r. family: a
/// positive definite point of the lifted invariant affine subspace, a
/// multiple of the identity when the subspace contains one.
pub fn invariant_ellipsoid(family: &MatrixFamily, tol: f64) -> Result<Option<RatMatrix>> {
    let opts = Options::with_tol(tol);
    let lifted = match lift_and_close(family, &opts)? {
        LiftOutcome::Ready(l) => l,
        LiftOutcome::Verdict(_) => return Ok(None),
    };
    let Lifted { y, lifts, span } = lifted;
    if span.contains(y.coords()) {
        return Ok(None);
    }
    let d = family.dim();
    let id = SymVec::vectorize(&RatMatrix::identity(d)).expect("identity is symmetric");
    // t·vec(I) − Σ c_j w_j = Y
    let mut cols = vec![id.coords().to_vec()];
    cols.extend(span.rows().iter().map(|r| r.iter().map(|x| -x.clone()).collect::<Vec<_>>()));
    let system = RatMatrix::from_columns(id.coords().len(), &cols);
    let h = match solve(&system, y.coords()) {
        Some(sol) if sol[0].is_positive() => RatMatrix::identity(d).scale(&sol[0]),
        _ => y.unvectorize(),
    };
    let hv = SymVec::vectorize(&h)?;
    let invariant = lifts.iter().all(|l| {
        let image = l.mul_vec(hv.coords());
        let diff: Vec<Rational> = image.iter().zip(hv.coords()).map(|(a, b)| a - b).collect();
        span.contains(&diff) && span.rows().iter().all(|w| span.contains(&l.mul_vec(w)))
    });
    Ok((invariant && is_positive_definite(&h)).then_some(h))
}

/// A basis change `T` making every generator orthogonal.
#[derive(Clone, Debug, PartialEq)]
pub struct OrthogonalityBasis {
    /// `TᵀT = H`; `T A T⁻¹` is orthogonal.
    pub t: DMatrix<f64>,
    /// `max_i ‖(T A_i T⁻¹)ᵀ(T A_i T⁻¹) − I‖_F`.
    pub residual: f64,
}

/// For an irreducible c.s.r. family of nonsingular matrices, the square root
/// of its invariant ellipsoid. `None` when the family is not c.s.r.
pub fn orthogonality_basis(family: &MatrixFamily, tol: f64) -> Result<Option<OrthogonalityBasis>> {
    if family.iter().any(|g| crate::linalg::determinant(g).map(|d| d.is_zero()).unwrap_or(true)) {
        return Err(CsrError::Precondition("orthogonality basis needs nonsingular generators".into()));
    }
    if !is_irreducible(family) {
        return Err(CsrError::Precondition("family is reducible".into()));
    }
    let Some(h) = invariant_ellipsoid(family, tol)? else { return Ok(None) };
    // Every generator of a nonsingular c.s.r. family preserves H itself.
    if !family.iter().all(|a| &(&a.transpose() * &h) * a == h) {
        return Ok(None);
    }
    let Some(chol) = nalgebra::Cholesky::new(h.to_f64()) else { return Ok(None) };
    let t = chol.l().transpose();
    let Some(t_inv) = t.clone().try_inverse() else { return Ok(None) };
    let d = family.dim();
    let residual = family
        .iter()
        .map(|a| {
            let b = &t * a.to_f64() * &t_inv;
            (b.transpose() * &b - DMatrix::<f64>::identity(d, d)).norm()
        })
        .fold(0.0, f64::max);
    Ok(Some(OrthogonalityBasis { t, residual }))
}

/// Lifted operator of a single generator; re-exported for certificate checks.
pub fn lift(a: &RatMatrix) -> RatMatrix {
    tensor_square(a).matrix
}
