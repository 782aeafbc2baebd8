//! Quantum Fisher information of pure probes on unitary paths `e^{−iθA}`,
//! the quantum Cramér-Rao bound, SLD measurements, fragmentation, and the
//! bounds used to compare variational probes with optimal ones.

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock_dicke::{build_su2, inner, l2_norm, BandedHermitian, DickeVector, SpinAxis};
use crate::spectral::{eigh, SpectralDecomposition, DEFAULT_TOL};
use crate::states::{coherent_matrix_element, Ordering, SpherePoint};

/// Variances below this are treated as an eigenvector probe.
pub const DEGENERATE_VARIANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QFIReport {
    pub mean: f64,
    pub variance: f64,
    pub qfi: f64,
    /// `‖A‖ = max |λ|`.
    pub generator_norm: f64,
    /// `(λ_max − λ_min)²`, the largest QFI any probe reaches.
    pub max_qfi: f64,
}

impl QFIReport {
    /// `1/(ν·QFI)`; infinite for an eigenvector probe.
    pub fn qcr_bound(&self, nu: f64) -> f64 {
        1.0 / (nu * self.qfi)
    }
}

/// Extremal eigenvalues `(λ_min, λ_max)` of a generator.
pub fn extremal_eigenvalues(a: &BandedHermitian) -> Result<(f64, f64)> {
    let dec = eigh(a, DEFAULT_TOL)?;
    Ok((dec.ground().0, dec.highest().0))
}

/// QFI `4·Var(A)` of a pure probe.
pub fn qfi_pure(v: &DickeVector, a: &BandedHermitian) -> Result<QFIReport> {
    let (lo, hi) = extremal_eigenvalues(a)?;
    qfi_with_spectrum(v, a, lo, hi)
}

/// As [`qfi_pure`] with the extremal eigenvalues already known.
pub fn qfi_with_spectrum(v: &DickeVector, a: &BandedHermitian, lo: f64, hi: f64) -> Result<QFIReport> {
    let mean = a.expectation(v)?;
    let variance = a.variance(v)?;
    Ok(QFIReport {
        mean,
        variance,
        qfi: 4.0 * variance,
        generator_norm: lo.abs().max(hi.abs()),
        max_qfi: (hi - lo).powi(2),
    })
}

/// `e^{−iθA} v` through the eigendecomposition of `A`.
pub fn evolve(dec: &SpectralDecomposition, v: &DickeVector, theta: f64) -> Result<DickeVector> {
    if dec.dim() != v.dim() {
        return Err(Error::DimensionMismatch { expected: dec.dim(), found: v.dim() });
    }
    let mut out = vec![C64::new(0.0, 0.0); v.dim()];
    for (lam, phi) in dec.eigenvalues().iter().zip(dec.eigenvectors()) {
        let c = inner(phi.amplitudes(), v.amplitudes()) * C64::from_polar(1.0, -theta * lam);
        for (o, p) in out.iter_mut().zip(phi.amplitudes()) {
            *o += c * p;
        }
    }
    DickeVector::new(v.n(), out)
}

/// `(|λ_min⟩ + e^{iη}|λ_max⟩)/√2` from a decomposition.
pub fn optimal_superposition(dec: &SpectralDecomposition, eta: f64) -> DickeVector {
    let (_, lo) = dec.ground();
    let (_, hi) = dec.highest();
    let e = C64::from_polar(1.0, eta);
    let amps = lo.amplitudes().iter().zip(hi.amplitudes()).map(|(x, y)| x + e * y).collect();
    DickeVector::new(lo.n(), amps).expect("extremal eigenvectors are orthonormal")
}

/// The rank-2 symmetric logarithmic derivative at `θ = 0` with its
/// nonzero-eigenvalue eigenvectors.
#[derive(Clone, Debug, PartialEq)]
pub struct SLDMeasurement {
    /// `[+2ΔA, −2ΔA]`
    pub eigenvalues: [f64; 2],
    pub projectors: [DickeVector; 2],
}

impl SLDMeasurement {
    /// Row-major `L = Σ_j ℓ_j |ℓ_j⟩⟨ℓ_j|`.
    pub fn dense(&self) -> Vec<C64> {
        let d = self.projectors[0].dim();
        let mut m = vec![C64::new(0.0, 0.0); d * d];
        for (lam, p) in self.eigenvalues.iter().zip(&self.projectors) {
            let a = p.amplitudes();
            for i in 0..d {
                for j in 0..d {
                    m[i * d + j] += a[i] * a[j].conj() * *lam;
                }
            }
        }
        m
    }

    /// `L x`.
    pub fn apply(&self, x: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); x.len()];
        for (lam, p) in self.eigenvalues.iter().zip(&self.projectors) {
            let c = inner(p.amplitudes(), x) * *lam;
            for (o, a) in out.iter_mut().zip(p.amplitudes()) {
                *o += c * a;
            }
        }
        out
    }
}

/// `L = 2i(|v⟩⟨v|A − A|v⟩⟨v|)`.
///
/// With `u = (A − ⟨A⟩)v = ΔA·e`, `L = 2iΔA(|v⟩⟨e| − |e⟩⟨v|)`, whose
/// eigenvectors are `(v ∓ i e)/√2` with eigenvalues `±2ΔA`.
pub fn sld(v: &DickeVector, a: &BandedHermitian) -> Result<SLDMeasurement> {
    let av = a.apply(v)?;
    let mean = inner(v.amplitudes(), &av).re;
    let u: Vec<C64> = av.iter().zip(v.amplitudes()).map(|(x, y)| x - y * mean).collect();
    let delta = l2_norm(&u);
    if delta * delta < DEGENERATE_VARIANCE {
        return Err(Error::DegenerateProbe { variance: delta * delta });
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let i = C64::i();
    let plus = v.amplitudes().iter().zip(&u).map(|(x, e)| (x - i * e / delta) * s).collect();
    let minus = v.amplitudes().iter().zip(&u).map(|(x, e)| (x + i * e / delta) * s).collect();
    Ok(SLDMeasurement {
        eigenvalues: [2.0 * delta, -2.0 * delta],
        projectors: [DickeVector::new(v.n(), plus)?, DickeVector::new(v.n(), minus)?],
    })
}

/// Matrix of `Im⟨v|A_i A_j|v⟩ = ⟨[A_i, A_j]⟩/2i`; the generators are
/// jointly estimable at the QCR bound when it vanishes.
pub fn multiparam_compatible(v: &DickeVector, ops: &[BandedHermitian]) -> Result<Vec<Vec<f64>>> {
    let images: Vec<Vec<C64>> = ops.iter().map(|a| a.apply(v)).collect::<Result<_>>()?;
    Ok(images
        .iter()
        .map(|ai| images.iter().map(|aj| inner(ai, aj).im).collect())
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FragmentationReport {
    /// `ρ⁽¹⁾_{μν} = ⟨a_μ† a_ν⟩`
    pub opdm: [[C64; 2]; 2],
    /// `(⟨J_x⟩, ⟨J_y⟩, ⟨J_z⟩)`
    pub jvec: [f64; 3],
    /// `F_D = 1 − 2‖jvec‖/N`
    pub fd: f64,
}

pub fn fragmentation(v: &DickeVector) -> FragmentationReport {
    let n = v.n();
    let ev = |axis| build_su2(n, axis).expectation(v).expect("same particle number");
    let jvec = [ev(SpinAxis::X), ev(SpinAxis::Y), ev(SpinAxis::Z)];
    let half = n.as_f64() / 2.0;
    // a₀†a₁ = J₋ = J_x − iJ_y
    let off = C64::new(jvec[0], -jvec[1]);
    let opdm = [
        [C64::new(half - jvec[2], 0.0), off],
        [off.conj(), C64::new(half + jvec[2], 0.0)],
    ];
    let len = jvec.iter().map(|x| x * x).sum::<f64>().sqrt();
    let fd = (1.0 - len / half).clamp(0.0, 1.0);
    FragmentationReport { opdm, jvec, fd }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GapBound {
    /// `Var_true − Var_var`
    pub lhs: f64,
    /// `‖A‖²(1 − |⟨ψ_true|ψ_var⟩|²)`
    pub rhs: f64,
    /// `⟨ψ_var|A|ψ_var⟩`
    pub var_energy: f64,
    /// Whether the zero-energy precondition holds within `1e-8·‖A‖`.
    pub precondition: bool,
}

impl GapBound {
    /// QFI difference `4·lhs`.
    pub fn qfi_gap(&self) -> f64 {
        4.0 * self.lhs
    }
}

/// Compares a variational probe with a member of the optimal family.
pub fn qfi_gap_bound(psi_true: &DickeVector, psi_var: &DickeVector, a: &BandedHermitian) -> Result<GapBound> {
    psi_true.check_same_space(psi_var)?;
    let (lo, hi) = extremal_eigenvalues(a)?;
    gap_bound_with_norm(psi_true, psi_var, a, lo.abs().max(hi.abs()))
}

/// As [`qfi_gap_bound`] with `‖A‖` supplied.
pub fn gap_bound_with_norm(
    psi_true: &DickeVector,
    psi_var: &DickeVector,
    a: &BandedHermitian,
    norm: f64,
) -> Result<GapBound> {
    let fid = psi_true.inner(psi_var)?.norm_sqr();
    let var_energy = a.expectation(psi_var)?;
    Ok(GapBound {
        lhs: a.variance(psi_true)? - a.variance(psi_var)?,
        rhs: norm * norm * (1.0 - fid),
        var_energy,
        precondition: var_energy.abs() <= 1e-8 * norm,
    })
}

/// `ν_B/ν_A = (1 − x_A/F_max)/(1 − x_B/F_max)`: the extra runs a probe with
/// QFI deficit `x_B` needs to match one with deficit `x_A`.
pub fn run_ratio(x_a: f64, x_b: f64, f_max: f64) -> Result<f64> {
    if !(f_max > 0.0) {
        return Err(Error::Precondition(format!("F_max must be positive, got {f_max}")));
    }
    let den = 1.0 - x_b / f_max;
    if den == 0.0 {
        return Err(Error::Precondition("x_B equals F_max".into()));
    }
    Ok((1.0 - x_a / f_max) / den)
}

/// The printed closed form for `Var(J₊²+J₋²)` in `|ψ₄⟩`:
/// `[N(N−1)(N−2)(N−3)/4 − 2^{−N/2+1}(N−1)(N−2)(N−3)cos((N−4)π/4)]
///  / (1 + 2^{−N/2+1}cos(Nπ/4))`.
pub fn closed_form_psi4_variance(n: u32) -> Result<f64> {
    if n % 2 == 1 || n == 0 {
        return Err(Error::Unsupported(format!("closed form is stated for even N, got {n}")));
    }
    let x = n as f64;
    let eps = 2f64.powf(-x / 2.0 + 1.0);
    // cos(jπ/4) from the residue of j mod 8 keeps the exact zeros exact
    let cos_q = |j: i64| -> f64 {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        [1.0, s, 0.0, -s, -1.0, -s, 0.0, s][j.rem_euclid(8) as usize]
    };
    let den = 1.0 + eps * cos_q(n as i64);
    if den.abs() < 1e-300 {
        return Err(Error::Precondition(format!("closed form denominator vanishes at N = {n}")));
    }
    let p3 = (x - 1.0) * (x - 2.0) * (x - 3.0);
    Ok((x * p3 / 4.0 - eps * p3 * cos_q(n as i64 - 4)) / den)
}

/// Exact `Var(J₊²+J₋²)` in `|ψ₄⟩` from the coherent-state matrix elements.
pub fn psi4_pair_variance(n: crate::fock_dicke::ParticleNumber) -> f64 {
    let i = C64::i();
    let one = C64::new(1.0, 0.0);
    let pts = [i, -i, one, -one].map(SpherePoint::Finite);
    let el = |a, b, m, p, o| coherent_matrix_element(n, a, b, m, p, o);
    let (mut norm2, mut first, mut second) = (C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0));
    for &a in &pts {
        for &b in &pts {
            norm2 += el(a, b, 0, 0, Ordering::LowerRaise);
            first += el(a, b, 0, 2, Ordering::LowerRaise) + el(a, b, 2, 0, Ordering::LowerRaise);
            second += el(a, b, 0, 4, Ordering::LowerRaise)
                + el(a, b, 4, 0, Ordering::LowerRaise)
                + el(a, b, 2, 2, Ordering::LowerRaise)
                + el(a, b, 2, 2, Ordering::RaiseLower);
        }
    }
    let mean = first.re / norm2.re;
    (second.re / norm2.re - mean * mean).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock_dicke::{build_term, ParticleNumber, Term};
    use crate::states::{antipodal_superposition, coherent, noon, psi4};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn pn(n: u32) -> ParticleNumber {
        ParticleNumber::new(n).unwrap()
    }

    fn random_state(n: ParticleNumber, rng: &mut ChaCha8Rng) -> DickeVector {
        let amps = (0..n.dim()).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        DickeVector::new(n, amps).unwrap()
    }

    #[test]
    fn noon_qfi() {
        for n in [1, 4, 9] {
            let v = noon(pn(n), 0.3);
            let x = n as f64;
            let r = qfi_pure(&v, &build_term(pn(n), Term::Dephasing)).unwrap();
            assert_abs_diff_eq!(r.qfi, 4.0 * x * x, epsilon = 1e-10);
            assert_abs_diff_eq!(r.qcr_bound(1.0), 1.0 / (4.0 * x * x), epsilon = 1e-12);
            assert_abs_diff_eq!(r.qfi, r.max_qfi, epsilon = 1e-10);
            let r = qfi_pure(&v, &build_su2(pn(n), SpinAxis::Z)).unwrap();
            assert_abs_diff_eq!(r.qfi, x * x, epsilon = 1e-10);
        }
    }

    #[test]
    fn coherent_along_own_axis_has_zero_qfi() {
        let n = pn(7);
        let dir = [0.3f64, -0.5, 0.81];
        let len = dir.iter().map(|x| x * x).sum::<f64>().sqrt();
        let dir = dir.map(|x| x / len);
        let p = SpherePoint::from_direction(dir).unwrap();
        let v = coherent(n, p.neg_conj());
        let r = qfi_pure(&v, &crate::fock_dicke::spin_along(n, dir)).unwrap();
        assert!(r.qfi.abs() < 1e-12);
    }

    #[test]
    fn table_value_at_n4() {
        let n = pn(4);
        let a = build_term(n, Term::Pair).scaled(-1.0);
        let dec = eigh(&a, DEFAULT_TOL).unwrap();
        let r = qfi_pure(dec.ground().1, &build_term(n, Term::Tunnel1)).unwrap();
        // normalized by the spread (λ_max − λ_min)² = 4N² of 2J_x
        assert_abs_diff_eq!(r.qfi / r.max_qfi, 0.9330, epsilon = 5e-5);
    }

    #[test]
    fn sld_two_level() {
        let n = pn(1);
        let v = DickeVector::from_real(n, &[1.0, 1.0]).unwrap();
        let m = sld(&v, &build_su2(n, SpinAxis::Z)).unwrap();
        assert_abs_diff_eq!(m.eigenvalues[0], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(m.eigenvalues[1], -1.0, epsilon = 1e-15);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        for (p, sign) in m.projectors.iter().zip([-1.0, 1.0]) {
            let target = DickeVector::new(n, vec![C64::new(s, 0.0), C64::new(0.0, sign * s)]).unwrap();
            assert_abs_diff_eq!(p.inner(&target).unwrap().norm(), 1.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn sld_matches_definition_and_is_traceless_on_probe() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = pn(6);
        for term in Term::ALL {
            let v = random_state(n, &mut rng);
            let a = build_term(n, term);
            let m = sld(&v, &a).unwrap();
            // L x = 2i(v⟨v|Ax⟩ − Av⟨v|x⟩)
            let x = random_state(n, &mut rng);
            let av = a.apply(&v).unwrap();
            let ax = a.apply(&x).unwrap();
            let vx = inner(v.amplitudes(), x.amplitudes());
            let vax = inner(v.amplitudes(), &ax);
            let lx = m.apply(x.amplitudes());
            for k in 0..n.dim() {
                let want = C64::i() * 2.0 * (v.amplitude(k) * vax - av[k] * vx);
                assert!((lx[k] - want).norm() < 1e-10);
            }
            let lv = m.apply(v.amplitudes());
            assert!(inner(v.amplitudes(), &lv).norm() < 1e-10);
        }
    }

    #[test]
    fn sld_rejects_eigenvector() {
        let v = DickeVector::basis(pn(3), 1);
        assert!(matches!(
            sld(&v, &build_su2(pn(3), SpinAxis::Z)),
            Err(Error::DegenerateProbe { .. })
        ));
    }

    #[test]
    fn compatibility_matrix() {
        let n = pn(6);
        let jz = build_su2(n, SpinAxis::Z);
        let jz2 = build_term(n, Term::Self1);
        let v = random_state(n, &mut ChaCha8Rng::seed_from_u64(3));
        let m = multiparam_compatible(&v, &[jz, jz2]).unwrap();
        assert!(m.iter().flatten().all(|x| x.abs() < 1e-12));
        let ops = [build_su2(n, SpinAxis::X), build_su2(n, SpinAxis::Y)];
        for k in 0..=6 {
            let m = multiparam_compatible(&DickeVector::basis(n, k), &ops).unwrap();
            assert_abs_diff_eq!(m[0][1].abs(), (k as f64 - 3.0).abs() / 2.0, epsilon = 1e-12);
        }
        let m = multiparam_compatible(&noon(n, 0.4), &ops).unwrap();
        assert!(m[0][1].abs() < 1e-14);
    }

    #[test]
    fn fragmentation_cases() {
        let n = pn(8);
        let r = fragmentation(&coherent(n, SpherePoint::Finite(C64::new(0.4, -1.1))));
        assert_abs_diff_eq!(r.fd, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!((r.opdm[0][0] + r.opdm[1][1]).re, 8.0, epsilon = 1e-12);
        assert_abs_diff_eq!(fragmentation(&DickeVector::basis(n, 4)).fd, 1.0, epsilon = 1e-15);
        let v = antipodal_superposition(n, SpherePoint::Finite(C64::new(0.7, 0.2)), 1.0);
        assert_abs_diff_eq!(fragmentation(&v).fd, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn gap_bound_trivial() {
        let n = pn(6);
        let a = build_term(n, Term::Pair);
        let v = psi4(n).unwrap();
        let g = qfi_gap_bound(&v, &v, &a).unwrap();
        assert_abs_diff_eq!(g.lhs, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(g.rhs, 0.0, epsilon = 1e-10);
    }

    #[test]
    fn run_ratio_arithmetic() {
        assert_eq!(run_ratio(3.0, 3.0, 10.0).unwrap(), 1.0);
        assert_eq!(run_ratio(0.0, 5.0, 10.0).unwrap(), 2.0);
        assert!(run_ratio(0.0, 10.0, 10.0).is_err());
    }

    #[test]
    fn closed_form_values() {
        // N ≡ ±2 mod 8: exactly N(N−1)(N−2)(N−3)/4
        for n in [6u32, 10, 14, 18, 22, 26] {
            let x = n as f64;
            let exact = x * (x - 1.0) * (x - 2.0) * (x - 3.0) / 4.0;
            assert_abs_diff_eq!(closed_form_psi4_variance(n).unwrap() / exact, 1.0, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(closed_form_psi4_variance(4).unwrap(), 6.0, epsilon = 1e-12);
        let x = 160f64;
        let lead = x * (x - 1.0) * (x - 2.0) * (x - 3.0) / 4.0;
        assert!((closed_form_psi4_variance(160).unwrap() / lead - 1.0).abs() < 1e-20);
        assert!(closed_form_psi4_variance(5).is_err());
    }

    #[test]
    fn psi4_variance_brute_force() {
        // at N = 4, ψ₄ = (|4,0⟩ + |0,4⟩)/√2 and J₊²+J₋² maps it to √24·√2|2,2⟩
        let pair = build_term(pn(4), Term::Pair);
        assert_abs_diff_eq!(pair.variance(&psi4(pn(4)).unwrap()).unwrap(), 48.0, epsilon = 1e-10);
        for n in (2..=40).step_by(2).chain([160]) {
            let brute = build_term(pn(n), Term::Pair).variance(&psi4(pn(n)).unwrap()).unwrap();
            let exact = psi4_pair_variance(pn(n));
            assert!((exact / brute - 1.0).abs() < 1e-10, "N={n}: {exact} vs {brute}");
        }
    }

    proptest! {
        #[test]
        fn qfi_is_invariant_along_the_path(seed in 0u64..1000, theta in 0.0f64..6.283, ti in 0usize..8) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = pn(rng.gen_range(1..12));
            let a = build_term(n, Term::ALL[ti]);
            let dec = eigh(&a, DEFAULT_TOL).unwrap();
            let v = random_state(n, &mut rng);
            let q0 = qfi_pure(&v, &a).unwrap();
            let q1 = qfi_pure(&evolve(&dec, &v, theta).unwrap(), &a).unwrap();
            prop_assert!((q0.qfi - q1.qfi).abs() <= 1e-10 * (1.0 + q0.qfi));
            prop_assert!(q0.qfi <= q0.max_qfi * (1.0 + 1e-12));
        }

        #[test]
        fn fd_in_unit_interval_and_rotation_invariant(seed in 0u64..1000, alpha in -7.0f64..7.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = pn(rng.gen_range(1..20));
            let v = random_state(n, &mut rng);
            let fd = fragmentation(&v).fd;
            prop_assert!((0.0..=1.0).contains(&fd));
            let fr = fragmentation(&crate::states::rotate_z(&v, alpha)).fd;
            prop_assert!((fd - fr).abs() < 1e-12);
        }
    }
}
