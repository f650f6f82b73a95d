//! Common invariant subspaces of a matrix family: closures, irreducibility
//! and block upper-triangular factorizations.

use num::{One, Zero};
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use serde::{Deserialize, Serialize};

use crate::error::{CsrError, Result};
use crate::linalg::{charpoly, factor, inverse, kernel_basis, MatrixFamily, RatMatrix, Rational, SpanBuilder, SubspaceBasis};

/// Smallest subspace containing the seeds and invariant under every matrix
/// in `gens`, as a reduced echelon builder.
pub fn closure_of(gens: &[RatMatrix], seeds: &[Vec<Rational>], n: usize) -> SpanBuilder {
    let mut span = SpanBuilder::new(n);
    let mut queue: Vec<Vec<Rational>> = Vec::new();
    for s in seeds {
        if span.insert(s) {
            queue.push(s.clone());
        }
    }
    while let Some(v) = queue.pop() {
        if span.is_full() {
            break;
        }
        for g in gens {
            let w = g.mul_vec(&v);
            if span.insert(&w) {
                queue.push(w);
            }
        }
    }
    span
}

/// The smallest common invariant subspace containing all seeds.
pub fn invariant_closure(family: &MatrixFamily, seeds: &[Vec<Rational>]) -> Result<SubspaceBasis> {
    let d = family.dim();
    if let Some(s) = seeds.iter().find(|s| s.len() != d) {
        return Err(CsrError::DimensionMismatch(format!("seed of length {} in dimension {d}", s.len())));
    }
    Ok(closure_of(family.generators(), seeds, d).into_basis())
}

fn unit(n: usize, i: usize) -> Vec<Rational> {
    (0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect()
}

/// Matrices whose rational eigenspaces seed the reducibility search: the
/// generators, their pairwise products and sums, and one fixed combination.
fn probes(gens: &[RatMatrix]) -> Vec<RatMatrix> {
    let m = gens.len();
    let mut out: Vec<RatMatrix> = gens.to_vec();
    if m <= 6 {
        for a in gens {
            for b in gens {
                out.push(a * b);
            }
        }
        for i in 0..m {
            for j in i + 1..m {
                out.push(&gens[i] + &gens[j]);
            }
        }
    }
    let mut combo = &gens[0] * &gens[m - 1];
    for (k, g) in gens.iter().enumerate() {
        combo = &combo + &g.scale(&Rational::from_integer((2 * k as i64 + 1).into()));
    }
    out.push(combo);
    let mut seen = std::collections::HashSet::new();
    out.retain(|p| seen.insert(p.clone()));
    out
}

fn proper_closure(gens: &[RatMatrix], seeds: &[Vec<Rational>], n: usize) -> Option<SubspaceBasis> {
    let span = closure_of(gens, seeds, n);
    (span.dim() > 0 && !span.is_full()).then(|| span.into_basis())
}

fn search(gens: &[RatMatrix], n: usize) -> Option<SubspaceBasis> {
    for i in 0..n {
        if let Some(w) = proper_closure(gens, &[unit(n, i)], n) {
            return Some(w);
        }
    }
    for p in probes(gens) {
        for f in factor(&charpoly(&p)) {
            let k = kernel_basis(&f.eval_matrix(&p));
            if k.dim() == 0 || k.is_full() {
                continue;
            }
            if let Some(w) = proper_closure(gens, k.vectors(), n) {
                return Some(w);
            }
            if k.dim() > 1 {
                for v in k.vectors() {
                    if let Some(w) = proper_closure(gens, std::slice::from_ref(v), n) {
                        return Some(w);
                    }
                }
            }
        }
    }
    None
}

/// A proper nonzero subspace invariant under every generator, if the search
/// finds one.
///
/// Seeds are the coordinate axes and the kernels `ker f(M)` for the rational
/// irreducible factors `f` of the characteristic polynomials of a set of
/// probe matrices. The same search runs on the transposed family, whose
/// invariant subspaces are orthogonal complements of invariant subspaces of
/// the original. A returned subspace is always genuinely invariant; `None`
/// is strong evidence of irreducibility but not a proof in every case.
pub fn common_invariant_subspace(family: &MatrixFamily) -> Option<SubspaceBasis> {
    let n = family.dim();
    if n <= 1 {
        return None;
    }
    if let Some(w) = search(family.generators(), n) {
        return Some(w);
    }
    let t: Vec<RatMatrix> = family.iter().map(RatMatrix::transpose).collect();
    search(&t, n).map(|w| w.orthogonal_complement())
}

pub fn is_irreducible(family: &MatrixFamily) -> bool {
    common_invariant_subspace(family).is_none()
}

/// Whether `span` is invariant under every generator, checked exactly.
pub fn is_invariant(family: &MatrixFamily, span: &SubspaceBasis) -> bool {
    let mut b = SpanBuilder::new(span.ambient_dim());
    for v in span.vectors() {
        b.insert(v);
    }
    family.iter().all(|g| span.vectors().iter().all(|v| b.contains(&g.mul_vec(v))))
}

/// Generators written in a basis where they share a flag of invariant
/// subspaces.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockFactorization {
    /// Columns are the new basis; generators become `T⁻¹ A T`.
    pub change_of_basis: RatMatrix,
    pub block_sizes: Vec<usize>,
    /// `diagonal_blocks[i][j]` is block `j` of generator `i`.
    pub diagonal_blocks: Vec<Vec<RatMatrix>>,
    pub permutation_only: bool,
}

impl BlockFactorization {
    pub fn num_blocks(&self) -> usize {
        self.block_sizes.len()
    }

    /// Starting offsets of the blocks.
    pub fn offsets(&self) -> Vec<usize> {
        self.block_sizes
            .iter()
            .scan(0, |acc, &s| {
                let o = *acc;
                *acc += s;
                Some(o)
            })
            .collect()
    }

    /// The family of `j`-th diagonal blocks.
    pub fn block_family(&self, j: usize) -> MatrixFamily {
        MatrixFamily::new(self.diagonal_blocks.iter().map(|b| b[j].clone()).collect())
            .expect("blocks share a dimension")
    }

    /// `T⁻¹ A T` for every generator.
    pub fn conjugated(&self, family: &MatrixFamily) -> Vec<RatMatrix> {
        let t = &self.change_of_basis;
        let ti = inverse(t).expect("change of basis is invertible");
        family.iter().map(|a| &(&ti * a) * t).collect()
    }

    /// Exact check that every conjugated generator vanishes below the
    /// diagonal blocks and that the blocks match.
    pub fn verify(&self, family: &MatrixFamily) -> bool {
        let offsets = self.offsets();
        let conj = self.conjugated(family);
        conj.iter().zip(&self.diagonal_blocks).all(|(c, blocks)| {
            let zero_below = offsets.iter().zip(&self.block_sizes).all(|(&o, &s)| {
                (o + s..c.rows()).all(|i| (o..o + s).all(|j| c.get(i, j).is_zero()))
            });
            let blocks_match = offsets
                .iter()
                .zip(&self.block_sizes)
                .zip(blocks)
                .all(|((&o, &s), b)| &c.submatrix(o, o + s, o, o + s) == b);
            zero_below && blocks_match
        })
    }
}

fn assemble(family: &MatrixFamily, t: RatMatrix, sizes: Vec<usize>, permutation_only: bool) -> BlockFactorization {
    let mut bf = BlockFactorization { change_of_basis: t, block_sizes: sizes, diagonal_blocks: Vec::new(), permutation_only };
    let offsets = bf.offsets();
    bf.diagonal_blocks = bf
        .conjugated(family)
        .iter()
        .map(|c| offsets.iter().zip(&bf.block_sizes).map(|(&o, &s)| c.submatrix(o, o + s, o, o + s)).collect())
        .collect();
    bf
}

fn split(gens: &[RatMatrix], n: usize) -> (RatMatrix, Vec<usize>) {
    let fam = MatrixFamily::new(gens.to_vec()).expect("nonempty square family");
    let Some(w) = common_invariant_subspace(&fam) else {
        return (RatMatrix::identity(n), vec![n]);
    };
    let k = w.dim();
    let mut span = SpanBuilder::new(n);
    let mut cols: Vec<Vec<Rational>> = Vec::with_capacity(n);
    for v in w.vectors() {
        span.insert(v);
        cols.push(v.clone());
    }
    for i in 0..n {
        let e = unit(n, i);
        if span.insert(&e) {
            cols.push(e);
        }
    }
    let t = RatMatrix::from_columns(n, &cols);
    let ti = inverse(&t).expect("completed basis");
    let conj: Vec<RatMatrix> = gens.iter().map(|a| &(&ti * a) * &t).collect();
    let top: Vec<RatMatrix> = conj.iter().map(|c| c.submatrix(0, k, 0, k)).collect();
    let bottom: Vec<RatMatrix> = conj.iter().map(|c| c.submatrix(k, n, k, n)).collect();
    let (t1, s1) = split(&top, k);
    let (t2, s2) = split(&bottom, n - k);
    let t = &t * &RatMatrix::block_diag(&[t1, t2]);
    (t, s1.into_iter().chain(s2).collect())
}

/// Block upper-triangular form with irreducible diagonal blocks, found by
/// recursively splitting off common invariant subspaces. The first block
/// acts on the innermost invariant subspace.
pub fn block_factorize(family: &MatrixFamily) -> BlockFactorization {
    let (t, sizes) = split(family.generators(), family.dim());
    assemble(family, t, sizes, false)
}

fn union_graph(family: &MatrixFamily) -> Result<DiGraph<(), ()>> {
    if !family.is_nonnegative() {
        return Err(CsrError::Precondition("family has a negative entry".into()));
    }
    let n = family.dim();
    let mut g = DiGraph::<(), ()>::new();
    let nodes: Vec<_> = (0..n).map(|_| g.add_node(())).collect();
    for i in 0..n {
        for j in 0..n {
            if family.iter().any(|a| !a.get(i, j).is_zero()) {
                // A e_j has a component along e_i.
                g.add_edge(nodes[j], nodes[i], ());
            }
        }
    }
    Ok(g)
}

/// No coordinate subspace is invariant: the union digraph of the nonzero
/// patterns is strongly connected.
pub fn is_positively_irreducible(family: &MatrixFamily) -> Result<bool> {
    Ok(tarjan_scc(&union_graph(family)?).len() == 1)
}

/// Permutation-only factorization of a nonnegative family into positively
/// irreducible blocks, one per strongly connected component of the union
/// digraph, closed components first.
pub fn positive_block_factorize(family: &MatrixFamily) -> Result<BlockFactorization> {
    let g = union_graph(family)?;
    let n = family.dim();
    // Tarjan emits components in reverse topological order: sinks first,
    // and a union of sink-closed components spans an invariant subspace.
    let sccs = tarjan_scc(&g);
    let mut order = Vec::with_capacity(n);
    let mut sizes = Vec::with_capacity(sccs.len());
    for comp in sccs {
        let mut idx: Vec<usize> = comp.iter().map(|v| v.index()).collect();
        idx.sort_unstable();
        sizes.push(idx.len());
        order.extend(idx);
    }
    let t = RatMatrix::from_fn(n, n, |i, j| if order[j] == i { Rational::one() } else { Rational::zero() });
    Ok(assemble(family, t, sizes, true))
}
