//! Dicke-basis states and operators for `N` bosons in two modes.
//!
//! The basis index `k` counts bosons in mode 1, so index `k` is the Dicke
//! state `|N-k, k>`. Every operator is built directly from its matrix
//! elements inside the `N`-particle sector and stored by diagonals.

use std::fmt;
use std::ops::Add;
use std::str::FromStr;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported particle number.
pub const MAX_PARTICLES: u32 = 512;

/// Number of bosons; the Dicke space has dimension `N + 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct ParticleNumber(u32);

impl ParticleNumber {
    pub fn new(n: u32) -> Result<Self> {
        if n == 0 || n > MAX_PARTICLES {
            return Err(Error::InvalidParticleNumber { got: n, max: MAX_PARTICLES });
        }
        Ok(Self(n))
    }

    #[inline]
    pub fn get(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn dim(self) -> usize {
        self.0 as usize + 1
    }

    #[inline]
    pub fn as_f64(self) -> f64 {
        self.0 as f64
    }

    #[inline]
    pub fn is_even(self) -> bool {
        self.0 % 2 == 0
    }
}

impl TryFrom<u32> for ParticleNumber {
    type Error = Error;
    fn try_from(n: u32) -> Result<Self> {
        Self::new(n)
    }
}

impl From<ParticleNumber> for u32 {
    fn from(n: ParticleNumber) -> u32 {
        n.0
    }
}

impl fmt::Display for ParticleNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// `√((N-k)(k+1))`: the element `<N-k-1, k+1| a₁†a₀ |N-k, k>`.
#[inline]
pub fn hop_amplitude(n: ParticleNumber, k: usize) -> f64 {
    let n = n.get() as usize;
    debug_assert!(k < n);
    (((n - k) * (k + 1)) as f64).sqrt()
}

/// `f_k = √((N-k-1)(N-k)(k+1)(k+2))`: the pair-tunneling element coupling `k`
/// and `k + 2`.
#[inline]
pub fn pair_amplitude(n: ParticleNumber, k: usize) -> f64 {
    let n = n.get() as usize;
    debug_assert!(k + 1 < n);
    // product of two integers each < 2^19, exact in f64
    let a = ((n - k - 1) * (n - k)) as f64;
    let b = ((k + 1) * (k + 2)) as f64;
    (a * b).sqrt()
}

/// Normalized complex amplitudes `C_k` over the `N + 1` Dicke states.
#[derive(Clone, Debug, PartialEq)]
pub struct DickeVector {
    n: ParticleNumber,
    amps: Vec<C64>,
}

impl DickeVector {
    /// Builds a state from raw amplitudes, normalizing them.
    pub fn new(n: ParticleNumber, amps: Vec<C64>) -> Result<Self> {
        if amps.len() != n.dim() {
            return Err(Error::DimensionMismatch { expected: n.dim(), found: amps.len() });
        }
        if amps.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::NonFinite("state amplitudes"));
        }
        let norm = l2_norm(&amps);
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::ZeroNorm { context: None });
        }
        let amps = amps.into_iter().map(|c| c / norm).collect();
        Ok(Self { n, amps })
    }

    /// Real amplitudes convenience constructor.
    pub fn from_real(n: ParticleNumber, amps: &[f64]) -> Result<Self> {
        Self::new(n, amps.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    /// The Dicke state `|N-k, k>`.
    pub fn basis(n: ParticleNumber, k: usize) -> Self {
        assert!(k < n.dim(), "Dicke index {k} out of range for N = {n}");
        let mut amps = vec![C64::new(0.0, 0.0); n.dim()];
        amps[k] = C64::new(1.0, 0.0);
        Self { n, amps }
    }

    pub(crate) fn from_normalized(n: ParticleNumber, amps: Vec<C64>) -> Self {
        debug_assert_eq!(amps.len(), n.dim());
        Self { n, amps }
    }

    #[inline]
    pub fn n(&self) -> ParticleNumber {
        self.n
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    #[inline]
    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    #[inline]
    pub fn amplitude(&self, k: usize) -> C64 {
        self.amps[k]
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        l2_norm(&self.amps)
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &DickeVector) -> Result<C64> {
        self.check_same_space(other)?;
        Ok(inner(&self.amps, &other.amps))
    }

    pub(crate) fn check_same_space(&self, other: &DickeVector) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        Ok(())
    }

    /// Mode exchange `|N-k, k> -> |k, N-k>`.
    pub fn mode_swapped(&self) -> DickeVector {
        let amps = self.amps.iter().rev().copied().collect();
        Self { n: self.n, amps }
    }

    /// Multiplies by a global phase `e^{iφ}`.
    pub fn with_global_phase(&self, phi: f64) -> DickeVector {
        let p = C64::from_polar(1.0, phi);
        Self { n: self.n, amps: self.amps.iter().map(|c| c * p).collect() }
    }
}

pub(crate) fn l2_norm(x: &[C64]) -> f64 {
    x.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// `Σ conj(a_k) b_k`.
pub(crate) fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Hermitian operator on the Dicke space, stored as the real main diagonal
/// plus the first and second superdiagonals. Subdiagonals are implied by
/// Hermiticity, so conjugate symmetry holds exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct BandedHermitian {
    n: ParticleNumber,
    bandwidth: u8,
    diag: Vec<f64>,
    sup1: Vec<C64>,
    sup2: Vec<C64>,
}

impl BandedHermitian {
    pub fn zeros(n: ParticleNumber) -> Self {
        let dim = n.dim();
        Self {
            n,
            bandwidth: 0,
            diag: vec![0.0; dim],
            sup1: vec![C64::new(0.0, 0.0); dim - 1],
            sup2: vec![C64::new(0.0, 0.0); dim.saturating_sub(2)],
        }
    }

    /// Builds an operator from its bands. `sup1[k]` is the entry `(k, k+1)`
    /// and `sup2[k]` the entry `(k, k+2)`. The reported bandwidth is the
    /// highest band holding a nonzero entry.
    pub fn from_bands(
        n: ParticleNumber,
        diag: Vec<f64>,
        sup1: Vec<C64>,
        sup2: Vec<C64>,
    ) -> Result<Self> {
        let dim = n.dim();
        for (len, expected) in [
            (diag.len(), dim),
            (sup1.len(), dim - 1),
            (sup2.len(), dim.saturating_sub(2)),
        ] {
            if len != expected {
                return Err(Error::DimensionMismatch { expected, found: len });
            }
        }
        let finite = diag.iter().all(|x| x.is_finite())
            && sup1.iter().chain(&sup2).all(|c| c.re.is_finite() && c.im.is_finite());
        if !finite {
            return Err(Error::NonFinite("operator bands"));
        }
        let mut op = Self { n, bandwidth: 0, diag, sup1, sup2 };
        op.bandwidth = op.occupied_bandwidth();
        Ok(op)
    }

    fn occupied_bandwidth(&self) -> u8 {
        let nz = |b: &[C64]| b.iter().any(|c| c.norm_sqr() != 0.0);
        if nz(&self.sup2) {
            2
        } else if nz(&self.sup1) {
            1
        } else {
            0
        }
    }

    #[inline]
    pub fn n(&self) -> ParticleNumber {
        self.n
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    #[inline]
    pub fn bandwidth(&self) -> u8 {
        self.bandwidth
    }

    #[inline]
    pub fn diagonal(&self) -> &[f64] {
        &self.diag
    }

    /// Superdiagonal at `offset` 1 or 2.
    pub fn superdiagonal(&self, offset: usize) -> &[C64] {
        match offset {
            1 => &self.sup1,
            2 => &self.sup2,
            _ => panic!("bandwidth is at most 2, got offset {offset}"),
        }
    }

    /// True when the operator only couples `k` to `k ± 2` (and itself).
    pub fn preserves_parity(&self) -> bool {
        self.sup1.iter().all(|c| c.norm_sqr() == 0.0)
    }

    pub fn entry(&self, i: usize, j: usize) -> C64 {
        let zero = C64::new(0.0, 0.0);
        match i.abs_diff(j) {
            0 => C64::new(self.diag[i], 0.0),
            1 if j > i => self.sup1[i],
            1 => self.sup1[j].conj(),
            2 if j > i => self.sup2[i],
            2 => self.sup2[j].conj(),
            _ => zero,
        }
    }

    /// Dense row-major copy.
    pub fn to_dense(&self) -> Vec<C64> {
        let d = self.dim();
        let mut m = vec![C64::new(0.0, 0.0); d * d];
        for i in 0..d {
            for j in i.saturating_sub(2)..(i + 3).min(d) {
                m[i * d + j] = self.entry(i, j);
            }
        }
        m
    }

    /// `A x` for a raw amplitude slice.
    pub fn apply_slice(&self, x: &[C64]) -> Vec<C64> {
        let d = self.dim();
        assert_eq!(x.len(), d, "operator/vector dimension mismatch");
        let mut y: Vec<C64> = self.diag.iter().zip(x).map(|(a, b)| b * *a).collect();
        for k in 0..d.saturating_sub(1) {
            let e = self.sup1[k];
            y[k] += e * x[k + 1];
            y[k + 1] += e.conj() * x[k];
        }
        for k in 0..d.saturating_sub(2) {
            let e = self.sup2[k];
            y[k] += e * x[k + 2];
            y[k + 2] += e.conj() * x[k];
        }
        y
    }

    /// Unnormalized `A|v>`.
    pub fn apply(&self, v: &DickeVector) -> Result<Vec<C64>> {
        self.check_dim(v.dim())?;
        Ok(self.apply_slice(v.amplitudes()))
    }

    /// `<v|A|v>`; real by Hermiticity.
    pub fn expectation(&self, v: &DickeVector) -> Result<f64> {
        let av = self.apply(v)?;
        Ok(inner(v.amplitudes(), &av).re)
    }

    /// `<A²> - <A>²`, evaluated as `‖(A - <A>)v‖²` so it is never negative.
    pub fn variance(&self, v: &DickeVector) -> Result<f64> {
        let av = self.apply(v)?;
        let mean = inner(v.amplitudes(), &av).re;
        Ok(av
            .iter()
            .zip(v.amplitudes())
            .map(|(a, c)| (a - c * mean).norm_sqr())
            .sum::<f64>()
            .max(0.0))
    }

    pub(crate) fn check_dim(&self, found: usize) -> Result<()> {
        if found != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found });
        }
        Ok(())
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            n: self.n,
            bandwidth: if s == 0.0 { 0 } else { self.bandwidth },
            diag: self.diag.iter().map(|x| x * s).collect(),
            sup1: self.sup1.iter().map(|x| x * s).collect(),
            sup2: self.sup2.iter().map(|x| x * s).collect(),
        }
    }

    /// `self + c·other` with a complex weight on the off-diagonal bands of
    /// `other`'s upper triangle; used to assemble terms of the form
    /// `A X + h.c.` from the unit operator `X + X†`.
    fn add_weighted_upper(&mut self, other: &Self, weight: C64) {
        for (a, b) in self.sup1.iter_mut().zip(&other.sup1) {
            *a += weight * b;
        }
        for (a, b) in self.sup2.iter_mut().zip(&other.sup2) {
            *a += weight * b;
        }
    }

    fn add_real(&mut self, other: &Self, weight: f64) {
        for (a, b) in self.diag.iter_mut().zip(&other.diag) {
            *a += weight * b;
        }
        self.add_weighted_upper(other, C64::new(weight, 0.0));
    }

    /// Elementwise sum of two operators on the same sector.
    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other.dim())?;
        let mut out = self.clone();
        out.add_real(other, 1.0);
        out.bandwidth = out.occupied_bandwidth().max(self.bandwidth.max(other.bandwidth));
        Ok(out)
    }

    /// Conjugation by the mode exchange `|N-k, k> -> |k, N-k>`.
    pub fn mode_swapped(&self) -> Self {
        let d = self.dim();
        let diag = self.diag.iter().rev().copied().collect();
        // new (k, k+1) = old (N-k, N-k-1) = conj(old sup1[N-k-1])
        let sup1 = (0..d - 1).map(|k| self.sup1[d - 2 - k].conj()).collect();
        let sup2 = (0..d.saturating_sub(2)).map(|k| self.sup2[d - 3 - k].conj()).collect();
        Self { n: self.n, bandwidth: self.bandwidth, diag, sup1, sup2 }
    }

    /// Largest absolute entry; a cheap scale for tolerances.
    pub fn max_abs_entry(&self) -> f64 {
        self.diag
            .iter()
            .map(|x| x.abs())
            .chain(self.sup1.iter().chain(&self.sup2).map(|c| c.norm()))
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpinAxis {
    X,
    Y,
    Z,
}

/// Schwinger-boson spin operator `J_x`, `J_y` or `J_z` on the `N` sector.
pub fn build_su2(n: ParticleNumber, axis: SpinAxis) -> BandedHermitian {
    let mut op = BandedHermitian::zeros(n);
    let half_n = n.as_f64() / 2.0;
    match axis {
        SpinAxis::Z => {
            for (k, d) in op.diag.iter_mut().enumerate() {
                *d = k as f64 - half_n;
            }
            op.bandwidth = 0;
        }
        SpinAxis::X => {
            for (k, e) in op.sup1.iter_mut().enumerate() {
                *e = C64::new(hop_amplitude(n, k) / 2.0, 0.0);
            }
            op.bandwidth = 1;
        }
        SpinAxis::Y => {
            // J_y = (i a₀†a₁ - i a₁†a₀)/2; a₀†a₁ lowers k
            for (k, e) in op.sup1.iter_mut().enumerate() {
                *e = C64::new(0.0, hop_amplitude(n, k) / 2.0);
            }
            op.bandwidth = 1;
        }
    }
    op
}

/// `n̂·J` for a real unit vector (not renormalized).
pub fn spin_along(n: ParticleNumber, dir: [f64; 3]) -> BandedHermitian {
    let mut op = BandedHermitian::zeros(n);
    op.add_real(&build_su2(n, SpinAxis::X), dir[0]);
    op.add_real(&build_su2(n, SpinAxis::Y), dir[1]);
    op.add_real(&build_su2(n, SpinAxis::Z), dir[2]);
    op.bandwidth = op.occupied_bandwidth();
    op
}

/// The unit-coefficient terms of the generic two-mode Hamiltonian.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Term {
    /// `a₁†a₁ - a₀†a₀`
    Dephasing,
    /// `(a₀†a₀)²`
    Self0,
    /// `(a₁†a₁)²`
    Self1,
    /// `a₁†a₁ a₀†a₀`
    Contact,
    /// `a₀†a₁ + a₁†a₀ = 2J_x`
    Tunnel1,
    /// `a₀†²a₁² + a₁†²a₀² = J₊² + J₋²`
    Pair,
    /// `a₀†a₀ a₀†a₁ + h.c.`
    Weighted0,
    /// `a₁†a₁ a₀†a₁ + h.c.`
    Weighted1,
}

impl Term {
    pub const ALL: [Term; 8] = [
        Term::Dephasing,
        Term::Self0,
        Term::Self1,
        Term::Contact,
        Term::Tunnel1,
        Term::Pair,
        Term::Weighted0,
        Term::Weighted1,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Term::Dephasing => "dephasing",
            Term::Self0 => "self0",
            Term::Self1 => "self1",
            Term::Contact => "contact",
            Term::Tunnel1 => "tunnel1",
            Term::Pair => "pair",
            Term::Weighted0 => "weighted0",
            Term::Weighted1 => "weighted1",
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Term {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Term::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::Precondition(format!("unknown term '{s}'")))
    }
}

pub fn build_term(n: ParticleNumber, term: Term) -> BandedHermitian {
    let mut op = BandedHermitian::zeros(n);
    let nn = n.get() as usize;
    let dim = n.dim();
    match term {
        Term::Dephasing => {
            for k in 0..dim {
                op.diag[k] = 2.0 * k as f64 - nn as f64;
            }
        }
        Term::Self0 => {
            for k in 0..dim {
                op.diag[k] = ((nn - k) * (nn - k)) as f64;
            }
        }
        Term::Self1 => {
            for k in 0..dim {
                op.diag[k] = (k * k) as f64;
            }
        }
        Term::Contact => {
            for k in 0..dim {
                op.diag[k] = (k * (nn - k)) as f64;
            }
        }
        Term::Tunnel1 => {
            for k in 0..nn {
                op.sup1[k] = C64::new(hop_amplitude(n, k), 0.0);
            }
        }
        Term::Pair => {
            for k in 0..nn.saturating_sub(1) {
                op.sup2[k] = C64::new(pair_amplitude(n, k), 0.0);
            }
        }
        Term::Weighted0 => {
            // a₀†a₁ takes k+1 to k, then a₀†a₀ reads N-k
            for k in 0..nn {
                op.sup1[k] = C64::new((nn - k) as f64 * hop_amplitude(n, k), 0.0);
            }
        }
        Term::Weighted1 => {
            // a₀†a₁ takes k+1 to k, then a₁†a₁ reads k
            for k in 0..nn {
                op.sup1[k] = C64::new(k as f64 * hop_amplitude(n, k), 0.0);
            }
        }
    }
    op.bandwidth = op.occupied_bandwidth();
    op
}

/// The twelve real parameters of the generic number-conserving two-mode
/// Hamiltonian. Complex parameters serialize as `[re, im]`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CouplingSet {
    pub vartheta: f64,
    #[serde(rename = "V00")]
    pub v00: f64,
    #[serde(rename = "V01")]
    pub v01: f64,
    #[serde(rename = "V11")]
    pub v11: f64,
    #[serde(rename = "A1")]
    pub a1: C64,
    #[serde(rename = "A2")]
    pub a2: C64,
    #[serde(rename = "T0")]
    pub t0: C64,
    #[serde(rename = "T1")]
    pub t1: C64,
}

impl CouplingSet {
    pub fn validate(&self) -> Result<()> {
        let reals = [self.vartheta, self.v00, self.v01, self.v11];
        let cplx = [self.a1, self.a2, self.t0, self.t1];
        if reals.iter().all(|x| x.is_finite())
            && cplx.iter().all(|c| c.re.is_finite() && c.im.is_finite())
        {
            Ok(())
        } else {
            Err(Error::NonFinite("coupling set"))
        }
    }
}

impl Add for CouplingSet {
    type Output = CouplingSet;
    fn add(self, o: CouplingSet) -> CouplingSet {
        CouplingSet {
            vartheta: self.vartheta + o.vartheta,
            v00: self.v00 + o.v00,
            v01: self.v01 + o.v01,
            v11: self.v11 + o.v11,
            a1: self.a1 + o.a1,
            a2: self.a2 + o.a2,
            t0: self.t0 + o.t0,
            t1: self.t1 + o.t1,
        }
    }
}

/// Assembles the full Hamiltonian. The `V` double sum counts `V01` twice.
/// The result always reports bandwidth 2.
pub fn assemble_hamiltonian(n: ParticleNumber, c: &CouplingSet) -> BandedHermitian {
    let mut h = BandedHermitian::zeros(n);
    h.add_real(&build_term(n, Term::Dephasing), c.vartheta);
    h.add_real(&build_term(n, Term::Self0), c.v00);
    h.add_real(&build_term(n, Term::Self1), c.v11);
    h.add_real(&build_term(n, Term::Contact), 2.0 * c.v01);
    // the unit terms store the a₀†...a₁ ordering in the upper triangle
    h.add_weighted_upper(&build_term(n, Term::Tunnel1), c.a1);
    h.add_weighted_upper(&build_term(n, Term::Pair), c.a2);
    h.add_weighted_upper(&build_term(n, Term::Weighted0), c.t0);
    h.add_weighted_upper(&build_term(n, Term::Weighted1), c.t1);
    h.bandwidth = 2;
    h
}

/// Mode-function overlap integrals that fix the interaction couplings.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ModeOverlaps {
    pub z: C64,
    #[serde(rename = "V0")]
    pub v0: f64,
    pub o_0000: f64,
    pub o_1111: f64,
    pub o_0011: f64,
    pub o_pair: C64,
    pub o_t0: C64,
    pub o_t1: C64,
    pub vartheta_in: f64,
    #[serde(rename = "A1_in")]
    pub a1_in: C64,
}

impl ModeOverlaps {
    pub fn validate(&self) -> Result<()> {
        if !self.v0.is_finite() {
            return Err(Error::NonFinite("V0"));
        }
        for (name, o) in [("o_0000", self.o_0000), ("o_1111", self.o_1111), ("o_0011", self.o_0011)] {
            if !(o >= 0.0) {
                return Err(Error::Precondition(format!(
                    "density overlap {name} must be non-negative, got {o}"
                )));
            }
        }
        Ok(())
    }
}

pub fn couplings_from_overlaps(m: &ModeOverlaps) -> CouplingSet {
    let r2 = m.z.norm_sqr();
    let g = (m.v0 / 2.0) / ((1.0 + r2) * (1.0 + r2));
    CouplingSet {
        vartheta: m.vartheta_in,
        v00: g * m.o_0000,
        v11: r2 * r2 * g * m.o_1111,
        v01: 4.0 * r2 * g * m.o_0011,
        a1: m.a1_in,
        a2: m.z * m.z * g * m.o_pair,
        t0: m.z * g * m.o_t0,
        t1: m.z * r2 * g * m.o_t1,
    }
}
