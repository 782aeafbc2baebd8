//! Probe-state constructors: spin coherent states and their superpositions,
//! NOON-type states, the `ω±(c)` and `Ξ(w, z)` pair-condensate families, and
//! closed-form coherent-state matrix elements of `J₋ᵐJ₊ⁿ` and `J₊ᵐJ₋ⁿ`.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock_dicke::{hop_amplitude, inner, DickeVector, ParticleNumber};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// `ln k!` for `k = 0..=n`.
pub(crate) fn ln_factorials(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for k in 1..=n {
        acc += (k as f64).ln();
        out.push(acc);
    }
    out
}

/// `e · ln|x|` with the convention `0 · ln 0 = 0`.
fn ln_pow(x: f64, e: usize) -> f64 {
    if e == 0 {
        0.0
    } else {
        e as f64 * x.abs().ln()
    }
}

/// A point on the Bloch sphere in stereographic coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpherePoint {
    Finite(C64),
    Infinity,
}

impl SpherePoint {
    pub fn zeta(z: C64) -> Self {
        SpherePoint::Finite(z)
    }

    /// `ζ = tan(θ/2) e^{iφ}`; `θ = π` maps to the point at infinity.
    pub fn from_angles(theta: f64, phi: f64) -> Self {
        if theta >= PI {
            SpherePoint::Infinity
        } else {
            SpherePoint::Finite(C64::from_polar((theta / 2.0).tan(), phi))
        }
    }

    /// `ζ(n̂)` for `n̂ = (sin θ cos φ, sin θ sin φ, cos θ)`.
    pub fn from_direction(n: [f64; 3]) -> Result<Self> {
        let len = n.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(len > 0.0) || !len.is_finite() {
            return Err(Error::Precondition("direction must be a nonzero finite vector".into()));
        }
        let theta = (n[2] / len).clamp(-1.0, 1.0).acos();
        let phi = n[1].atan2(n[0]);
        Ok(Self::from_angles(theta, phi))
    }

    /// `(θ, φ)` with `φ ∈ [0, 2π)`.
    pub fn angles(self) -> (f64, f64) {
        match self {
            SpherePoint::Infinity => (PI, 0.0),
            SpherePoint::Finite(z) => {
                let phi = if z == ZERO { 0.0 } else { z.arg().rem_euclid(2.0 * PI) };
                (2.0 * z.norm().atan(), phi)
            }
        }
    }

    /// `−conj(ζ)`.
    pub fn neg_conj(self) -> Self {
        match self {
            SpherePoint::Infinity => SpherePoint::Infinity,
            SpherePoint::Finite(z) => SpherePoint::Finite(-z.conj()),
        }
    }

    /// `1/ζ`.
    pub fn inverse(self) -> Self {
        match self {
            SpherePoint::Infinity => SpherePoint::Finite(ZERO),
            SpherePoint::Finite(z) if z == ZERO => SpherePoint::Infinity,
            SpherePoint::Finite(z) => SpherePoint::Finite(z.inv()),
        }
    }

    /// The antipodal point `−1/conj(ζ)`.
    pub fn antipode(self) -> Self {
        self.neg_conj().inverse()
    }
}

/// Spin coherent state `C_k = binom(N,k)^{1/2} ζᵏ (1+|ζ|²)^{−N/2}`.
pub fn coherent(n: ParticleNumber, p: SpherePoint) -> DickeVector {
    let nn = n.get() as usize;
    let z = match p {
        SpherePoint::Infinity => return DickeVector::basis(n, nn),
        SpherePoint::Finite(z) if z == ZERO => return DickeVector::basis(n, 0),
        SpherePoint::Finite(z) => z,
    };
    let lf = ln_factorials(nn);
    let r = z.norm();
    let ln_norm = 0.5 * n.as_f64() * r.hypot(1.0).powi(2).ln();
    let amps = (0..=nn)
        .map(|k| {
            let ln_mag = 0.5 * (lf[nn] - lf[k] - lf[nn - k]) + ln_pow(r, k) - ln_norm;
            C64::from_polar(ln_mag.exp(), k as f64 * z.arg())
        })
        .collect();
    DickeVector::from_normalized(n, amps)
}

/// NOON state `(|0,N⟩ + e^{iφ}|N,0⟩)/√2`.
pub fn noon(n: ParticleNumber, phi: f64) -> DickeVector {
    psi_theta_phi(n, PI / 2.0, phi)
}

/// `cos(θ/2)|0,N⟩ + sin(θ/2) e^{iφ}|N,0⟩`.
pub fn psi_theta_phi(n: ParticleNumber, theta: f64, phi: f64) -> DickeVector {
    let mut amps = vec![ZERO; n.dim()];
    amps[n.dim() - 1] += C64::new((theta / 2.0).cos(), 0.0);
    amps[0] += C64::from_polar((theta / 2.0).sin(), phi);
    DickeVector::from_normalized(n, amps)
}

/// Maximal-variance family of the contact term for even `N`:
/// `(|N/2,N/2⟩ + e^{iη} ψ_{θ,φ})/√2`.
pub fn psi_v01(n: ParticleNumber, theta: f64, phi: f64, eta: f64) -> Result<DickeVector> {
    if !n.is_even() {
        return Err(Error::Unsupported(format!(
            "psi_v01 needs even N (got {n}); use psi_v01_odd"
        )));
    }
    let base = psi_theta_phi(n, theta, phi);
    let e = C64::from_polar(1.0, eta);
    let mut amps: Vec<C64> = base.amplitudes().iter().map(|c| c * e).collect();
    amps[n.dim() / 2] += ONE;
    DickeVector::new(n, amps)
}

/// Odd-`N` analogue of [`psi_v01`]: the maximal-eigenvalue subspace of the
/// contact term is spanned by `k = (N∓1)/2`, parametrized by `(θ′, φ′)`.
pub fn psi_v01_odd(
    n: ParticleNumber,
    theta: f64,
    phi: f64,
    theta_p: f64,
    phi_p: f64,
    eta: f64,
) -> Result<DickeVector> {
    if n.is_even() {
        return Err(Error::Unsupported(format!("psi_v01_odd needs odd N, got {n}")));
    }
    let base = psi_theta_phi(n, theta, phi);
    let e = C64::from_polar(1.0, eta);
    let mut amps: Vec<C64> = base.amplitudes().iter().map(|c| c * e).collect();
    let lo = (n.get() as usize - 1) / 2;
    amps[lo + 1] += C64::new((theta_p / 2.0).cos(), 0.0);
    amps[lo] += C64::from_polar((theta_p / 2.0).sin(), phi_p);
    DickeVector::new(n, amps)
}

/// `(|−conj ζ⟩ + e^{iη}|1/ζ⟩)/√2`, the maximal-variance probe of `n̂·J`.
pub fn antipodal_superposition(n: ParticleNumber, p: SpherePoint, eta: f64) -> DickeVector {
    let a = coherent(n, p.neg_conj());
    let b = coherent(n, p.inverse());
    let e = C64::from_polar(1.0, eta);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let amps = a.amplitudes().iter().zip(b.amplitudes()).map(|(x, y)| (x + e * y) * s).collect();
    DickeVector::from_normalized(n, amps)
}

/// Unnormalized amplitudes of `(a₀†² + 2β a₀†a₁† + γ a₁†²)^M |0,0⟩`,
/// rescaled by a common positive factor to avoid overflow. When `parity`
/// is given, only `k` of that parity is kept.
fn pair_condensate(n: ParticleNumber, beta: C64, gamma: C64, parity: Option<usize>) -> Vec<C64> {
    let nn = n.get() as usize;
    let m = nn / 2;
    let lf = ln_factorials(nn);
    let two_beta = beta * 2.0;
    let (rb, ab) = (two_beta.norm(), two_beta.arg());
    let (rg, ag) = (gamma.norm(), gamma.arg());

    let mut terms: Vec<(usize, f64, f64)> = Vec::new();
    for r in 0..=m {
        for q in 0..=(m - r) {
            if (q > 0 && rb == 0.0) || (r > 0 && rg == 0.0) {
                continue;
            }
            let p = m - q - r;
            let k = q + 2 * r;
            if parity.is_some_and(|par| k % 2 != par) {
                continue;
            }
            let ln_mag = lf[m] - lf[p] - lf[q] - lf[r]
                + ln_pow(rb, q)
                + ln_pow(rg, r)
                + 0.5 * (lf[nn - k] + lf[k]);
            terms.push((k, ln_mag, q as f64 * ab + r as f64 * ag));
        }
    }
    let shift = terms.iter().map(|t| t.1).fold(f64::NEG_INFINITY, f64::max);
    let mut amps = vec![ZERO; nn + 1];
    for (k, ln_mag, phase) in terms {
        amps[k] += C64::from_polar((ln_mag - shift).exp(), phase);
    }
    amps
}

fn require_even(n: ParticleNumber, what: &str) -> Result<()> {
    if n.is_even() {
        Ok(())
    } else {
        Err(Error::Unsupported(format!("{what} needs even N, got {n}")))
    }
}

/// Branch selector for [`omega`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OmegaSign {
    Plus,
    Minus,
}

impl OmegaSign {
    /// Parity of the Dicke indices carrying weight.
    pub fn parity(self) -> usize {
        match self {
            OmegaSign::Plus => 0,
            OmegaSign::Minus => 1,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            OmegaSign::Plus => '+',
            OmegaSign::Minus => '-',
        }
    }
}

/// `ω±(c) ∝ [(a₀†² + 2ic a₀†a₁† − a₁†²)^M ± (a₀†² − 2ic a₀†a₁† − a₁†²)^M]|0,0⟩`.
///
/// The two brackets differ only in the sign of odd powers of the middle
/// term, so the sum keeps the even-`k` part of the first and the
/// difference its odd-`k` part.
pub fn omega(n: ParticleNumber, c: f64, sign: OmegaSign) -> Result<DickeVector> {
    require_even(n, "omega")?;
    if !c.is_finite() {
        return Err(Error::NonFinite("omega parameter c"));
    }
    let amps = pair_condensate(n, C64::new(0.0, c), -ONE, Some(sign.parity()));
    DickeVector::new(n, amps).map_err(|e| match e {
        Error::ZeroNorm { .. } => {
            Error::zero_norm(format!("omega{}(c = {c}) at N = {n}", sign.symbol()))
        }
        other => other,
    })
}

/// Bivariational pair state `Ξ(w, z) ∝ (a₀†² + 2w a₀†a₁† + z² a₁†²)^M |0,0⟩`.
pub fn xi_pair(n: ParticleNumber, w: C64, z: C64) -> Result<DickeVector> {
    require_even(n, "xi_pair")?;
    if !(w.re.is_finite() && w.im.is_finite() && z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::NonFinite("xi_pair parameters"));
    }
    DickeVector::new(n, pair_condensate(n, w, z * z, None))
}

/// `|ψ₄⟩ ∝ |ζ=i⟩ + |ζ=−i⟩ + |ζ=1⟩ + |ζ=−1⟩`.
pub fn psi4(n: ParticleNumber) -> Result<DickeVector> {
    let points = [C64::i(), -C64::i(), ONE, -ONE];
    let mut amps = vec![ZERO; n.dim()];
    for z in points {
        for (a, c) in amps.iter_mut().zip(coherent(n, SpherePoint::Finite(z)).amplitudes()) {
            *a += c;
        }
    }
    DickeVector::new(n, amps).map_err(|e| match e {
        Error::ZeroNorm { .. } => Error::zero_norm(format!("psi4 at N = {n}")),
        other => other,
    })
}

/// `(|ζ=i⟩ ± |ζ=−i⟩)/√2`, normalized.
pub fn coherent_pair_y(n: ParticleNumber, sign: OmegaSign) -> Result<DickeVector> {
    let a = coherent(n, SpherePoint::Finite(C64::i()));
    let b = coherent(n, SpherePoint::Finite(-C64::i()));
    let s = if sign == OmegaSign::Plus { 1.0 } else { -1.0 };
    let amps = a.amplitudes().iter().zip(b.amplitudes()).map(|(x, y)| x + y * s).collect();
    DickeVector::new(n, amps)
}

/// Two variational states approximating the extremal eigenvectors of a
/// generator, combined with relative phase `η`.
#[derive(Clone, Debug, PartialEq)]
pub struct SuperpositionSpec {
    pub psi_min: DickeVector,
    pub psi_max: DickeVector,
    pub eta: f64,
}

impl SuperpositionSpec {
    pub fn new(psi_min: DickeVector, psi_max: DickeVector, eta: f64) -> Result<Self> {
        psi_min.check_same_space(&psi_max)?;
        Ok(Self { psi_min, psi_max, eta })
    }

    /// `w = ⟨ψ_min|ψ_max⟩`.
    pub fn overlap(&self) -> C64 {
        inner(self.psi_min.amplitudes(), self.psi_max.amplitudes())
    }
}

/// State of the span of `ψ_min`, `ψ_max` closest to the optimal family:
/// `[(1 − w e^{iη})ψ_min + (e^{iη} − w)ψ_max] / √(2(1−w²)(1−w cos η))`.
///
/// A complex overlap is first made real and non-negative by rephasing
/// `ψ_max`.
pub fn variational_superposition(s: &SuperpositionSpec) -> Result<DickeVector> {
    let w_c = s.overlap();
    let w = w_c.norm();
    let gauge = if w > 0.0 { w_c.conj() / w } else { ONE };
    let e = C64::from_polar(1.0, s.eta);
    let denom = 2.0 * (1.0 - w * w) * (1.0 - w * s.eta.cos());
    if w >= 1.0 - 1e-14 || denom < 1e-14 {
        return Err(Error::Precondition(format!(
            "variational superposition is singular (|w| = {w}, denominator {denom:e})"
        )));
    }
    let a = ONE - e * w;
    let b = (e - w) * gauge;
    let scale = denom.sqrt().recip();
    let amps = s
        .psi_min
        .amplitudes()
        .iter()
        .zip(s.psi_max.amplitudes())
        .map(|(x, y)| (a * x + b * y) * scale)
        .collect();
    DickeVector::new(s.psi_min.n(), amps)
}

/// `e^{−iαJ_z}`: multiplies `C_k` by `e^{−iα(k − N/2)}`.
pub fn rotate_z(v: &DickeVector, alpha: f64) -> DickeVector {
    let half = v.n().as_f64() / 2.0;
    let amps = v
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(k, c)| c * C64::from_polar(1.0, -alpha * (k as f64 - half)))
        .collect();
    DickeVector::from_normalized(v.n(), amps)
}

/// `|⟨a|b⟩|²`.
pub fn fidelity(a: &DickeVector, b: &DickeVector) -> Result<f64> {
    Ok(a.inner(b)?.norm_sqr().min(1.0))
}

/// Operator ordering for [`coherent_matrix_element`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Ordering {
    /// `J₋ᵐ J₊ⁿ`
    LowerRaise,
    /// `J₊ᵐ J₋ⁿ`
    RaiseLower,
}

/// `⟨ζ′| J₋ᵐJ₊ⁿ |ζ⟩` or `⟨ζ′| J₊ᵐJ₋ⁿ |ζ⟩` from the derivative formulas,
/// expanded as finite sums. With `u = conj(ζ′)`:
///
/// `∂ᵤᵐ ∂_ζⁿ (1+uζ)^N = Σ_j binom(N,j) j!/(j−m)! j!/(j−n)! u^{j−m} ζ^{j−n}`
///
/// and for the second ordering the same sum in `1/u`, `1/ζ` times the
/// prefactor `(uζ)^N`, which turns every term into a polynomial. Points at
/// infinity fall back to [`direct_matrix_element`].
pub fn coherent_matrix_element(
    n: ParticleNumber,
    bra: SpherePoint,
    ket: SpherePoint,
    m: usize,
    p: usize,
    ordering: Ordering,
) -> C64 {
    let (SpherePoint::Finite(zb), SpherePoint::Finite(zk)) = (bra, ket) else {
        return direct_matrix_element(n, bra, ket, m, p, ordering);
    };
    let nn = n.get() as usize;
    let lf = ln_factorials(nn);
    let u = zb.conj();
    let ln_norm = 0.5 * n.as_f64() * (zb.norm().hypot(1.0).powi(2) * zk.norm().hypot(1.0).powi(2)).ln();
    let mut sum = ZERO;
    for j in m.max(p)..=nn {
        let (eu, ez) = match ordering {
            Ordering::LowerRaise => (j - m, j - p),
            Ordering::RaiseLower => (nn - j + m, nn - j + p),
        };
        if (eu > 0 && u == ZERO) || (ez > 0 && zk == ZERO) {
            continue;
        }
        let ln_c = lf[nn] - lf[nn - j] - lf[j - m] - lf[j - p] + lf[j];
        let ln_mag = ln_c + ln_pow(u.norm(), eu) + ln_pow(zk.norm(), ez) - ln_norm;
        let phase = eu as f64 * u.arg() + ez as f64 * zk.arg();
        sum += C64::from_polar(ln_mag.exp(), phase);
    }
    sum
}

fn raise(n: ParticleNumber, x: &[C64]) -> Vec<C64> {
    let mut y = vec![ZERO; x.len()];
    for k in 0..x.len() - 1 {
        y[k + 1] = x[k] * hop_amplitude(n, k);
    }
    y
}

fn lower(n: ParticleNumber, x: &[C64]) -> Vec<C64> {
    let mut y = vec![ZERO; x.len()];
    for k in 0..x.len() - 1 {
        y[k] = x[k + 1] * hop_amplitude(n, k);
    }
    y
}

/// The same matrix element by applying `J±` to Dicke vectors.
pub fn direct_matrix_element(
    n: ParticleNumber,
    bra: SpherePoint,
    ket: SpherePoint,
    m: usize,
    p: usize,
    ordering: Ordering,
) -> C64 {
    let (first, second): (fn(ParticleNumber, &[C64]) -> Vec<C64>, fn(ParticleNumber, &[C64]) -> Vec<C64>) =
        match ordering {
            Ordering::LowerRaise => (raise, lower),
            Ordering::RaiseLower => (lower, raise),
        };
    let mut x = coherent(n, ket).into_amplitudes();
    for _ in 0..p {
        x = first(n, &x);
    }
    for _ in 0..m {
        x = second(n, &x);
    }
    inner(coherent(n, bra).amplitudes(), &x)
}
