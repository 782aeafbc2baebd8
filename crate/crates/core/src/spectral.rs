//! Hermitian eigensolver for Dicke-space operators, parity-block reduction,
//! degeneracy clustering, eigenvalue-gap tables, and the odd-`N` partner
//! construction for the pair-tunneling operator.

use std::ops::Range;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::fock_dicke::{build_term, l2_norm, BandedHermitian, DickeVector, Term};
use crate::linalg;

/// Relative tolerance used to group eigenvalues into degeneracy clusters.
pub const CLUSTER_TOL: f64 = 1e-10;

/// Default residual tolerance relative to `‖A‖`.
pub const DEFAULT_TOL: f64 = 1e-11;

/// Relative spacing below which an even/odd eigenvalue pair is unresolved.
pub const PARITY_TIE: f64 = 32.0 * f64::EPSILON;

/// Magnitude below which a component is ignored when fixing phases.
const PHASE_THRESHOLD: f64 = 1e-8;

#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    eigenvectors: Vec<DickeVector>,
    residual_tol: f64,
    max_residual: f64,
    operator_norm: f64,
    clusters: Vec<Range<usize>>,
}

impl SpectralDecomposition {
    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &[DickeVector] {
        &self.eigenvectors
    }

    pub fn eigenvector(&self, i: usize) -> &DickeVector {
        &self.eigenvectors[i]
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn ground(&self) -> (f64, &DickeVector) {
        (self.eigenvalues[0], &self.eigenvectors[0])
    }

    pub fn highest(&self) -> (f64, &DickeVector) {
        let i = self.dim() - 1;
        (self.eigenvalues[i], &self.eigenvectors[i])
    }

    pub fn residual_tol(&self) -> f64 {
        self.residual_tol
    }

    /// Largest `‖A v_i − λ_i v_i‖₂` over all eigenpairs.
    pub fn max_residual(&self) -> f64 {
        self.max_residual
    }

    /// `‖A‖ = max |λ|`.
    pub fn operator_norm(&self) -> f64 {
        self.operator_norm
    }

    /// Degeneracy clusters at [`CLUSTER_TOL`].
    pub fn degeneracy_clusters(&self) -> &[Range<usize>] {
        &self.clusters
    }

    /// Clusters of consecutive eigenvalues separated by at most
    /// `rel_tol · ‖A‖`.
    pub fn clusters_at(&self, rel_tol: f64) -> Vec<Range<usize>> {
        cluster(&self.eigenvalues, rel_tol * self.operator_norm)
    }
}

fn cluster(values: &[f64], abs_tol: f64) -> Vec<Range<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=values.len() {
        if i == values.len() || values[i] - values[i - 1] > abs_tol {
            out.push(start..i);
            start = i;
        }
    }
    out
}

/// Makes the first component with magnitude above `1e-8` real and positive.
fn fix_phase(v: &mut [C64]) {
    if let Some(c) = v.iter().find(|c| c.norm() > PHASE_THRESHOLD) {
        let rot = c.conj() / c.norm();
        for x in v.iter_mut() {
            *x *= rot;
        }
    }
}

/// Full eigen-decomposition of a Hermitian Dicke-space operator.
///
/// Operators that only couple `k ↔ k ± 2` are split into parity blocks
/// first, so near-degenerate eigenvectors never mix parities. Other operators
/// with bandwidth ≤ 1 go straight to the tridiagonal QL iteration after a
/// phase gauge; bandwidth-2 operators are reduced densely.
pub fn eigh(op: &BandedHermitian, tol: f64) -> Result<SpectralDecomposition> {
    if !(tol > 0.0) {
        return Err(Error::Precondition(format!("residual tolerance must be positive, got {tol}")));
    }
    if op.max_abs_entry().is_nan() {
        return Err(Error::NonFinite("operator"));
    }
    let n = op.n();
    let dim = op.dim();

    let (values, vectors): (Vec<f64>, Vec<Vec<C64>>) = if op.bandwidth() == 2 && op.preserves_parity() {
        let blocks = parity_split(op)?;
        let mut pairs = Vec::with_capacity(dim);
        for (odd, block) in [(false, &blocks.even), (true, &blocks.odd)] {
            let (vals, vecs) = block.eigh()?;
            for (lam, local) in vals.into_iter().zip(vecs) {
                pairs.push((lam, odd, block.embed(&local, dim)));
            }
        }
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        order_parity_ties(&mut pairs);
        pairs.into_iter().map(|(lam, _, v)| (lam, v)).unzip()
    } else if op.bandwidth() <= 1 {
        linalg::hermitian_tridiagonal_eigh(op.diagonal(), op.superdiagonal(1))?
    } else {
        linalg::dense_hermitian_eigh(&op.to_dense(), dim)?
    };

    let operator_norm = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut eigenvectors = Vec::with_capacity(dim);
    let mut max_residual: f64 = 0.0;
    let mut worst = 0;
    for (i, (lam, mut v)) in values.iter().zip(vectors).enumerate() {
        let norm = l2_norm(&v);
        for x in v.iter_mut() {
            *x /= norm;
        }
        fix_phase(&mut v);
        let av = op.apply_slice(&v);
        let r = av
            .iter()
            .zip(&v)
            .map(|(a, x)| (a - x * *lam).norm_sqr())
            .sum::<f64>()
            .sqrt();
        if r > max_residual {
            max_residual = r;
            worst = i;
        }
        eigenvectors.push(DickeVector::from_normalized(n, v));
    }
    if max_residual > tol * operator_norm.max(f64::MIN_POSITIVE) && max_residual > 0.0 {
        return Err(Error::NonConvergence { index: worst });
    }
    let clusters = cluster(&values, CLUSTER_TOL * operator_norm);
    Ok(SpectralDecomposition {
        eigenvalues: values,
        eigenvectors,
        residual_tol: tol,
        max_residual,
        operator_norm,
        clusters,
    })
}

/// Even/odd eigenvalues closer than [`PARITY_TIE`]`·‖A‖` cannot be ordered
/// in double precision. They are placed even-block first below zero and
/// odd-block first above zero, the order exact arithmetic gives for `±A₂`
/// tunneling pairs.
fn order_parity_ties(pairs: &mut [(f64, bool, Vec<C64>)]) {
    let norm = pairs.iter().fold(0.0f64, |m, p| m.max(p.0.abs()));
    let tie = PARITY_TIE * norm;
    for i in 0..pairs.len().saturating_sub(1) {
        let (a, b) = (&pairs[i], &pairs[i + 1]);
        if a.1 != b.1 && (b.0 - a.0).abs() <= tie {
            let mid = 0.5 * (a.0 + b.0);
            let even_first = mid < 0.0;
            if a.1 == even_first {
                pairs.swap(i, i + 1);
            }
        }
    }
}

/// One parity sector of a `k ↔ k ± 2` operator. Within the block the
/// operator is tridiagonal: `off[i]` couples `indices[i]` and `indices[i+1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ParityBlock {
    pub indices: Vec<usize>,
    pub diag: Vec<f64>,
    pub off: Vec<C64>,
}

impl ParityBlock {
    pub fn dim(&self) -> usize {
        self.indices.len()
    }

    /// Eigenpairs of the block in block coordinates, ascending.
    pub fn eigh(&self) -> Result<(Vec<f64>, Vec<Vec<C64>>)> {
        if self.indices.is_empty() {
            return Ok((Vec::new(), Vec::new()));
        }
        linalg::hermitian_tridiagonal_eigh(&self.diag, &self.off)
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(self.eigh()?.0)
    }

    /// Lifts a block vector back to the full Dicke space.
    pub fn embed(&self, local: &[C64], dim: usize) -> Vec<C64> {
        let mut full = vec![C64::new(0.0, 0.0); dim];
        for (&k, &x) in self.indices.iter().zip(local) {
            full[k] = x;
        }
        full
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ParityBlocks {
    pub even: ParityBlock,
    pub odd: ParityBlock,
}

pub fn parity_split(op: &BandedHermitian) -> Result<ParityBlocks> {
    if !op.preserves_parity() {
        return Err(Error::Precondition(
            "parity split requires an operator with no k ↔ k±1 coupling".into(),
        ));
    }
    let dim = op.dim();
    let block = |start: usize| {
        let indices: Vec<usize> = (start..dim).step_by(2).collect();
        let diag = indices.iter().map(|&k| op.diagonal()[k]).collect();
        let off = indices.windows(2).map(|w| op.superdiagonal(2)[w[0]]).collect();
        ParityBlock { indices, diag, off }
    };
    Ok(ParityBlocks { even: block(0), odd: block(1) })
}

/// Intrapair gaps `(n, ℰ_{2n} − ℰ_{2n−1})` for `n = 1..=⌊dim/2⌋`, with the
/// eigenvalues indexed from 1.
pub fn gap_pairs(dec: &SpectralDecomposition) -> Vec<(usize, f64)> {
    let e = dec.eigenvalues();
    (1..=e.len() / 2).map(|n| (n, e[2 * n - 1] - e[2 * n - 2])).collect()
}

/// Interpair gaps `(n, ℰ_{2n+1} − ℰ_{2n})` for every `n ≥ 1` with
/// `2n + 1 ≤ dim`.
pub fn interpair_gaps(dec: &SpectralDecomposition) -> Vec<(usize, f64)> {
    let e = dec.eigenvalues();
    (1..)
        .take_while(|n| 2 * n < e.len())
        .map(|n| (n, e[2 * n] - e[2 * n - 1]))
        .collect()
}

/// Residual `‖A v − λ v‖₂`.
pub fn eigen_residual(op: &BandedHermitian, v: &DickeVector, lambda: f64) -> Result<f64> {
    let av = op.apply(v)?;
    Ok(av
        .iter()
        .zip(v.amplitudes())
        .map(|(a, x)| (a - x * lambda).norm_sqr())
        .sum::<f64>()
        .sqrt())
}

/// For odd `N`, maps an eigenvector of `J₊² + J₋²` to an orthogonal
/// eigenvector with the same eigenvalue:
/// `C'_k = conj(C_{N−k})` for odd `k`, `−conj(C_{N−k})` for even `k`.
pub fn appendix_partner(v: &DickeVector, lambda: f64) -> Result<DickeVector> {
    let n = v.n();
    if n.is_even() {
        return Err(Error::Unsupported(format!(
            "partner construction needs odd N, got N = {n}"
        )));
    }
    let pair = build_term(n, Term::Pair);
    let scale = pair.max_abs_entry().max(1.0);
    let r = eigen_residual(&pair, v, lambda)?;
    if r > 1e-8 * scale {
        return Err(Error::Precondition(format!(
            "input is not an eigenvector of the pair operator (residual {r:e})"
        )));
    }
    let c = v.amplitudes();
    let nn = n.get() as usize;
    let partner = (0..=nn)
        .map(|k| {
            let m = c[nn - k].conj();
            if k % 2 == 1 {
                m
            } else {
                -m
            }
        })
        .collect();
    Ok(DickeVector::from_normalized(n, partner))
}
