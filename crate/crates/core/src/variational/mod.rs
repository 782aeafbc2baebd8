//! Variational ground states for the pair-tunneling and number-weighted
//! tunneling terms, and the near-optimal probe families built from them.

mod simplex;

pub use simplex::{nelder_mead, nelder_mead_traced, Minimum, OptimizerConfig, TraceRow, RESTART_PERTURBATION};

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock_dicke::{build_term, pair_amplitude, BandedHermitian, DickeVector, ParticleNumber, Term};
use crate::spectral::parity_split;
use crate::states::{omega, rotate_z, variational_superposition, xi_pair, OmegaSign, SuperpositionSpec};

/// Which pair of consistency rows fixes the `ω(c)` parameter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConsistencyRows {
    /// `k = 0, 2` applied to `ω₊(c)`.
    Even,
    /// `k = 1, 3` applied to `ω₋(c)`.
    Odd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolutionSource {
    ClosedForm,
    TwoEquationSolve,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConsistencySolution {
    pub c_tilde: f64,
    /// Eigenvalue implied by the first applied row.
    pub lambda_tilde: f64,
    /// `−2N(1+2c̃²) − 4N²c̃²` evaluated as printed, for comparison only.
    pub lambda_printed: f64,
    pub source: SolutionSource,
    pub rows: ConsistencyRows,
}

/// `ω₊(c)` amplitudes `C₂/C₀` and `C₄/C₀` without building the state, valid
/// for any even `N ≥ 4` (also beyond [`crate::fock_dicke::MAX_PARTICLES`]).
fn omega_plus_ratios(n: f64, c: f64) -> (f64, f64) {
    let m = n / 2.0;
    let c2 = c * c;
    let r2 = -m * (1.0 + 2.0 * (m - 1.0) * c2) * (2.0 / (n * (n - 1.0))).sqrt();
    let r4 = (m * (m - 1.0) / 2.0
        + 2.0 * m * (m - 1.0) * (m - 2.0) * c2
        + 2.0 / 3.0 * m * (m - 1.0) * (m - 2.0) * (m - 3.0) * c2 * c2)
        * (24.0 / (n * (n - 1.0) * (n - 2.0) * (n - 3.0))).sqrt();
    (r2, r4)
}

/// `ω₋(c)` amplitudes `C₃/C₁` and `C₅/C₁`.
fn omega_minus_ratios(n: f64, c: f64) -> (f64, f64) {
    let m = n / 2.0;
    let c2 = c * c;
    let c1 = 2.0 * m * c;
    let c3 = -(2.0 * m * (m - 1.0) * c + 4.0 / 3.0 * m * (m - 1.0) * (m - 2.0) * c * c2)
        * (6.0 / ((n - 1.0) * (n - 2.0))).sqrt();
    let c5 = (m * (m - 1.0) * (m - 2.0) * c
        + 4.0 / 3.0 * m * (m - 1.0) * (m - 2.0) * (m - 3.0) * c * c2
        + 4.0 / 15.0 * m * (m - 1.0) * (m - 2.0) * (m - 3.0) * (m - 4.0) * c * c2 * c2)
        * (120.0 / ((n - 1.0) * (n - 2.0) * (n - 3.0) * (n - 4.0))).sqrt();
    (c3 / c1, c5 / c1)
}

/// `f_k` for real `N` (no particle-number cap).
fn f_k(n: f64, k: f64) -> f64 {
    ((n - k - 1.0) * (n - k) * (k + 1.0) * (k + 2.0)).sqrt()
}

/// Residual of the two applied rows, relative to `f₀|C₀|` (even rows) or
/// `f₁|C₁|` (odd rows), given the first row's eigenvalue.
pub fn two_row_residual(n: u32, c: f64, rows: ConsistencyRows) -> f64 {
    let x = n as f64;
    match rows {
        ConsistencyRows::Even => {
            let (r2, r4) = omega_plus_ratios(x, c);
            let f0 = f_k(x, 0.0);
            let lam = f0 * r2;
            (f0 + f_k(x, 2.0) * r4 - lam * r2) / f0
        }
        ConsistencyRows::Odd => {
            let (r3, r5) = omega_minus_ratios(x, c);
            let f1 = f_k(x, 1.0);
            let lam = f1 * r3;
            (f1 + f_k(x, 3.0) * r5 - lam * r3) / f1
        }
    }
}

/// Variational parameter `c̃` for `ω(c)`.
///
/// For the even rows the two equations reduce to a quadratic in `c²` with
/// root `c̃² = (M−3+√(M²−2M+3))/(4M−6)`, `M = N/2`; at `N = 4` this is the
/// exact ground state `c² = (√3−1)/2`. The odd rows are solved by
/// bisection for the positive root. `λ̃` is taken from the first row.
pub fn tilde_c(n: u32, rows: ConsistencyRows) -> Result<ConsistencySolution> {
    let min_n = match rows {
        ConsistencyRows::Even => 4,
        ConsistencyRows::Odd => 6,
    };
    if n % 2 == 1 || n < min_n {
        return Err(Error::Precondition(format!("tilde_c needs even N >= {min_n}, got {n}")));
    }
    let x = n as f64;
    let (c, lambda, source) = match rows {
        ConsistencyRows::Even => {
            let m = x / 2.0;
            let c = ((m - 3.0 + (m * m - 2.0 * m + 3.0).sqrt()) / (4.0 * m - 6.0)).sqrt();
            (c, f_k(x, 0.0) * omega_plus_ratios(x, c).0, SolutionSource::ClosedForm)
        }
        ConsistencyRows::Odd => {
            let g = |c: f64| two_row_residual(n, c, rows);
            let c = bisect(g, 1e-3, 5.0)
                .ok_or_else(|| Error::NoRealSolution(format!("odd consistency rows at N = {n}")))?;
            (c, f_k(x, 1.0) * omega_minus_ratios(x, c).0, SolutionSource::TwoEquationSolve)
        }
    };
    Ok(ConsistencySolution {
        c_tilde: c,
        lambda_tilde: lambda,
        lambda_printed: -2.0 * x * (1.0 + 2.0 * c * c) - 4.0 * x * x * c * c,
        source,
        rows,
    })
}

/// First sign change of `g` on a uniform grid over `[lo, hi]`, refined by
/// bisection.
fn bisect<G: Fn(f64) -> f64>(g: G, lo: f64, hi: f64) -> Option<f64> {
    const GRID: usize = 4000;
    let step = (hi - lo) / GRID as f64;
    let mut a = lo;
    let mut ga = g(a);
    for i in 1..=GRID {
        let b = lo + i as f64 * step;
        let gb = g(b);
        if ga == 0.0 {
            return Some(a);
        }
        if ga.signum() != gb.signum() {
            let (mut a, mut b) = (a, b);
            for _ in 0..200 {
                let mid = 0.5 * (a + b);
                if mid == a || mid == b {
                    break;
                }
                if g(mid).signum() == ga.signum() {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            return Some(0.5 * (a + b));
        }
        a = b;
        ga = gb;
    }
    None
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConsistencyKind {
    /// `f_{k−2}C_{k−2} + f_kC_{k+2} = λC_k`
    Pair,
    /// `(N−k)√((N−k)(k+1))C_{k+1} + (N−k+1)√((N−k+1)k)C_{k−1} = λC_k`
    Weighted0,
}

impl ConsistencyKind {
    pub fn term(self) -> Term {
        match self {
            ConsistencyKind::Pair => Term::Pair,
            ConsistencyKind::Weighted0 => Term::Weighted0,
        }
    }
}

/// `LHS_k − λC_k` of the eigenvector recurrence, for every `k`.
pub fn consistency_rows(v: &DickeVector, kind: ConsistencyKind, lambda: f64) -> Vec<C64> {
    let n = v.n();
    let nn = n.get() as usize;
    let c = v.amplitudes();
    let at = |k: isize| if k < 0 || k as usize > nn { C64::new(0.0, 0.0) } else { c[k as usize] };
    (0..=nn)
        .map(|k| {
            let ki = k as isize;
            let lhs = match kind {
                ConsistencyKind::Pair => {
                    let down = if k >= 2 { pair_amplitude(n, k - 2) } else { 0.0 };
                    let up = if k + 2 <= nn { pair_amplitude(n, k) } else { 0.0 };
                    at(ki - 2) * down + at(ki + 2) * up
                }
                ConsistencyKind::Weighted0 => {
                    let (x, kf) = (nn as f64, k as f64);
                    let up = (x - kf) * ((x - kf) * (kf + 1.0)).sqrt();
                    let down = (x - kf + 1.0) * ((x - kf + 1.0) * kf).sqrt();
                    at(ki + 1) * up + at(ki - 1) * down
                }
            };
            lhs - c[k] * lambda
        })
        .collect()
}

/// `max_k |LHS_k − λC_k| / (‖A‖·max|C|)` with `‖A‖` from the spectrum.
pub fn consistency_residual(v: &DickeVector, kind: ConsistencyKind, lambda: f64) -> Result<f64> {
    let (lo, hi) = crate::metrology::extremal_eigenvalues(&build_term(v.n(), kind.term()))?;
    let scale = lo.abs().max(hi.abs()) * v.amplitudes().iter().map(|c| c.norm()).fold(0.0, f64::max);
    let worst = consistency_rows(v, kind, lambda).iter().map(|r| r.norm()).fold(0.0, f64::max);
    Ok(worst / scale)
}

/// `(w̃, z̃)` for `Ξ(w, z)` from the `k = 0, 1` rows of the weighted0
/// recurrence with eigenvalue `λ₀`.
///
/// `C₁/C₀ = w√N` and `C₂/C₀ = (2M(M−1)w² + Mz²)√(2/(N(N−1)))`; the `k = 0`
/// row gives `w̃ = λ₀/N²` and the `k = 1` row then fixes `z̃²`.
pub fn xi_two_equation_solve(n: u32, lambda0: f64) -> Result<(f64, f64)> {
    if n % 2 == 1 || n < 2 {
        return Err(Error::Precondition(format!("xi_two_equation_solve needs even N >= 2, got {n}")));
    }
    if !lambda0.is_finite() {
        return Err(Error::NonFinite("ground-state energy"));
    }
    let x = n as f64;
    let m = x / 2.0;
    let w = lambda0 / (x * x);
    let r2 = (lambda0 * w * x.sqrt() - x * x.sqrt()) / ((x - 1.0) * (2.0 * (x - 1.0)).sqrt());
    let z2 = (r2 * (x * (x - 1.0) / 2.0).sqrt() - 2.0 * m * (m - 1.0) * w * w) / m;
    if !(z2 >= 0.0) {
        return Err(Error::NoRealSolution(format!(
            "z̃² = {z2} < 0 at N = {n} (complex branch z̃ = ±i√{})",
            -z2
        )));
    }
    Ok((w, z2.sqrt()))
}

/// `⟨ζ| a₀†a₀a₀†a₁ + h.c. |ζ⟩ = 2N(N−1)ζ/(1+ζ²)² + 2Nζ/(1+ζ²)` for real `ζ`.
pub fn coherent_energy(n: u32, zeta: f64) -> f64 {
    let x = n as f64;
    let d = 1.0 + zeta * zeta;
    2.0 * x * (x - 1.0) * zeta / (d * d) + 2.0 * x * zeta / d
}

/// Real minimizer of [`coherent_energy`] on `[−10, 0]`.
pub fn minimize_coherent(n: u32) -> f64 {
    brent_minimize(|z| coherent_energy(n, z), -10.0, 0.0, 1e-12).0
}

/// Brent's method: golden-section steps with parabolic interpolation.
/// Returns `(x, f(x))`.
pub fn brent_minimize<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> (f64, f64) {
    const GOLD: f64 = 0.381_966_011_250_105_1;
    let (mut a, mut b) = (lo, hi);
    let mut x = a + GOLD * (b - a);
    let (mut w, mut v) = (x, x);
    let mut fx = f(x);
    let (mut fw, mut fv) = (fx, fx);
    let (mut d, mut e): (f64, f64) = (0.0, 0.0);
    for _ in 0..500 {
        let xm = 0.5 * (a + b);
        let tol1 = tol * x.abs() + 1e-15;
        let tol2 = 2.0 * tol1;
        if (x - xm).abs() <= tol2 - 0.5 * (b - a) {
            break;
        }
        let mut golden = true;
        if e.abs() > tol1 {
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            }
            q = q.abs();
            if p.abs() < (0.5 * q * e).abs() && p > q * (a - x) && p < q * (b - x) {
                e = d;
                d = p / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = if xm >= x { tol1 } else { -tol1 };
                }
                golden = false;
            }
        }
        if golden {
            e = if x >= xm { a - x } else { b - x };
            d = GOLD * e;
        }
        let u = if d.abs() >= tol1 { x + d } else { x + tol1.copysign(d) };
        let fu = f(u);
        if fu <= fx {
            if u >= x {
                a = x;
            } else {
                b = x;
            }
            (v, fv) = (w, fw);
            (w, fw) = (x, fx);
            (x, fx) = (u, fu);
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                (v, fv) = (w, fw);
                (w, fw) = (u, fu);
            } else if fu <= fv || v == x || v == w {
                (v, fv) = (u, fu);
            }
        }
    }
    (x, fx)
}

/// Full pair-operator consistency residual of `ω(c)` along a grid of `c`,
/// with `λ` the Rayleigh quotient; zeros mark exact eigenvectors.
pub fn omega_residual_scan(n: ParticleNumber, sign: OmegaSign, cs: &[f64]) -> Result<Vec<(f64, f64)>> {
    let pair = build_term(n, Term::Pair);
    let (lo, hi) = crate::metrology::extremal_eigenvalues(&pair)?;
    let norm = lo.abs().max(hi.abs());
    cs.iter()
        .map(|&c| {
            let v = omega(n, c, sign)?;
            let lam = pair.expectation(&v)?;
            let r = crate::spectral::eigen_residual(&pair, &v, lam)?;
            Ok((c, r / norm))
        })
        .collect()
}

/// Which of `ω₊(c)`, `ω₋(c)` has the lower pair energy.
pub fn lower_omega(n: ParticleNumber, c: f64) -> Result<OmegaSign> {
    let pair = build_term(n, Term::Pair);
    let e_plus = pair.expectation(&omega(n, c, OmegaSign::Plus)?)?;
    let e_minus = pair.expectation(&omega(n, c, OmegaSign::Minus)?)?;
    Ok(if e_minus < e_plus { OmegaSign::Minus } else { OmegaSign::Plus })
}

/// Near-optimal probe families for `A₂` and `T₀`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NearOptimal {
    /// Even `N`: built from the lower of `ω±(c̃)` and its image under
    /// `e^{−i(π/2)J_z}`.
    A2Even,
    /// Odd `N`: the degenerate even/odd ground pair mixed by `(θ, φ)` and
    /// its rotated partner mixed by `(θ′, φ′)`.
    A2Odd { theta: f64, phi: f64, theta_p: f64, phi_p: f64 },
    /// `Ξ(w₀, z₀)` and its image under `e^{iπJ_z}`.
    T0 { w0: f64, z0: f64 },
}

pub fn near_optimal_family(kind: NearOptimal, n: ParticleNumber, eta: f64) -> Result<DickeVector> {
    match kind {
        NearOptimal::A2Even => {
            if !n.is_even() {
                return Err(Error::Precondition(format!("A2_even family needs even N, got {n}")));
            }
            let sol = tilde_c(n.get(), ConsistencyRows::Even)?;
            let psi_min = omega(n, sol.c_tilde, lower_omega(n, sol.c_tilde)?)?;
            let psi_max = rotate_z(&psi_min, PI / 2.0);
            variational_superposition(&SuperpositionSpec::new(psi_min, psi_max, eta)?)
        }
        NearOptimal::A2Odd { theta, phi, theta_p, phi_p } => {
            if n.is_even() {
                return Err(Error::Precondition(format!("A2_odd family needs odd N, got {n}")));
            }
            let (even, odd) = parity_ground_pair(&build_term(n, Term::Pair))?;
            let mix = |a: &DickeVector, b: &DickeVector, t: f64, p: f64| -> Vec<C64> {
                let cb = C64::from_polar((t / 2.0).sin(), p);
                a.amplitudes().iter().zip(b.amplitudes()).map(|(x, y)| x * (t / 2.0).cos() + y * cb).collect()
            };
            let lo = mix(&even, &odd, theta, phi);
            let hi = mix(&rotate_z(&even, PI / 2.0), &rotate_z(&odd, PI / 2.0), theta_p, phi_p);
            let e = C64::from_polar(1.0, eta);
            DickeVector::new(n, lo.iter().zip(&hi).map(|(x, y)| x + e * y).collect())
        }
        NearOptimal::T0 { w0, z0 } => {
            let psi_min = xi_pair(n, C64::new(w0, 0.0), C64::new(z0, 0.0))?;
            let psi_max = rotate_z(&psi_min, -PI);
            variational_superposition(&SuperpositionSpec::new(psi_min, psi_max, eta)?)
        }
    }
}

/// Lowest eigenvectors of the even and odd parity blocks of a
/// parity-preserving operator, embedded in the full space.
pub fn parity_ground_pair(op: &BandedHermitian) -> Result<(DickeVector, DickeVector)> {
    let blocks = parity_split(op)?;
    let dim = op.dim();
    let ground = |b: &crate::spectral::ParityBlock| -> Result<DickeVector> {
        let (_, vecs) = b.eigh()?;
        let v = vecs.into_iter().next().ok_or_else(|| Error::Precondition("empty parity block".into()))?;
        DickeVector::new(op.n(), b.embed(&v, dim))
    };
    Ok((ground(&blocks.even)?, ground(&blocks.odd)?))
}
