use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use proptest::prelude::*;

use twomode::fock_dicke::{
    assemble_hamiltonian, build_su2, build_term, spin_along, BandedHermitian, CouplingSet, DickeVector,
    ParticleNumber, SpinAxis, Term,
};
use twomode::metrology::{fragmentation, multiparam_compatible, qfi_gap_bound, qfi_pure};
use twomode::spectral::{eigh, parity_split, DEFAULT_TOL};
use twomode::states::{antipodal_superposition, coherent, fidelity, noon, psi4, SpherePoint};
use twomode::variational::{near_optimal_family, NearOptimal};

fn pn(n: u32) -> ParticleNumber {
    ParticleNumber::new(n).unwrap()
}

fn dense(op: &BandedHermitian) -> DMatrix<C64> {
    let d = op.dim();
    DMatrix::from_fn(d, d, |i, j| op.entry(i, j))
}

fn oracle_eigenvalues(op: &BandedHermitian) -> Vec<f64> {
    let mut ev: Vec<f64> = dense(op).symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

fn couplings() -> impl Strategy<Value = CouplingSet> {
    let c = || (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(a, b)| C64::new(a, b));
    (-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0, c(), c(), c(), c()).prop_map(
        |(vartheta, v00, v01, v11, a1, a2, t0, t1)| CouplingSet { vartheta, v00, v01, v11, a1, a2, t0, t1 },
    )
}

fn state(n: u32) -> impl Strategy<Value = DickeVector> {
    let d = n as usize + 1;
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), d).prop_filter_map("zero vector", move |v| {
        DickeVector::new(pn(n), v.into_iter().map(|(a, b)| C64::new(a, b)).collect()).ok()
    })
}

#[test]
fn pair_spectrum_matches_dense_oracle_at_160() {
    let op = build_term(pn(160), Term::Pair);
    let dec = eigh(&op, DEFAULT_TOL).unwrap();
    let scale = dec.operator_norm();
    for (a, b) in dec.eigenvalues().iter().zip(oracle_eigenvalues(&op)) {
        assert!((a - b).abs() <= 1e-12 * scale);
    }
}

#[test]
fn odd_n_parity_blocks_share_a_spectrum() {
    for n in (1..=41).step_by(2) {
        let blocks = parity_split(&build_term(pn(n), Term::Pair)).unwrap();
        let (e, o) = (blocks.even.eigenvalues().unwrap(), blocks.odd.eigenvalues().unwrap());
        let scale = e.iter().chain(&o).fold(1.0f64, |m, x| m.max(x.abs()));
        assert_eq!(e.len(), o.len());
        for (a, b) in e.iter().zip(&o) {
            assert!((a - b).abs() <= 1e-12 * scale, "N={n}");
        }
    }
}

#[test]
fn mode_swap_maps_weighted0_to_weighted1_plus_tunneling() {
    for n in [1u32, 2, 7, 20] {
        let p = pn(n);
        let lhs = build_term(p, Term::Weighted0).mode_swapped();
        let rhs = build_term(p, Term::Weighted1).try_add(&build_term(p, Term::Tunnel1)).unwrap();
        for i in 0..p.dim() {
            for j in 0..p.dim() {
                assert!((lhs.entry(i, j) - rhs.entry(i, j)).norm() < 1e-12, "N={n} ({i},{j})");
            }
        }
    }
}

#[test]
fn psi4_has_zero_pair_energy_and_large_qfi() {
    let p = pn(160);
    let pair = build_term(p, Term::Pair);
    let v = psi4(p).unwrap();
    assert!(pair.expectation(&v).unwrap().abs() < 1e-6);
    let r = qfi_pure(&v, &pair).unwrap();
    assert!(r.qfi / r.max_qfi > 0.99);
}

#[test]
fn noon_spin_components_commute_in_expectation() {
    let p = pn(12);
    let ops = [SpinAxis::X, SpinAxis::Y, SpinAxis::Z].map(|a| build_su2(p, a));
    let m = multiparam_compatible(&noon(p, 0.3), &ops).unwrap();
    for row in &m {
        for x in row {
            assert!(x.abs() < 1e-12);
        }
    }
    // a coherent state on the x axis has ⟨[J_y, J_z]⟩ = i⟨J_x⟩ ≠ 0
    let c = coherent(p, SpherePoint::from_angles(std::f64::consts::FRAC_PI_2, 0.0));
    let m = multiparam_compatible(&c, &ops).unwrap();
    assert!((m[1][2].abs() - 3.0).abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn eigh_matches_dense_oracle(n in 1u32..24, c in couplings()) {
        let h = assemble_hamiltonian(pn(n), &c);
        let dec = eigh(&h, DEFAULT_TOL).unwrap();
        let scale = dec.operator_norm().max(1.0);
        for (a, b) in dec.eigenvalues().iter().zip(oracle_eigenvalues(&h)) {
            prop_assert!((a - b).abs() <= 1e-11 * scale);
        }
        prop_assert!(dec.max_residual() <= DEFAULT_TOL * scale);
    }

    #[test]
    fn eigenvectors_are_orthonormal(n in 1u32..20, c in couplings()) {
        let dec = eigh(&assemble_hamiltonian(pn(n), &c), DEFAULT_TOL).unwrap();
        let vs = dec.eigenvectors();
        for i in 0..vs.len() {
            for j in 0..vs.len() {
                let g = vs[i].inner(&vs[j]).unwrap();
                let target = if i == j { 1.0 } else { 0.0 };
                prop_assert!((g - target).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn chiral_mirror(n in 1u32..120) {
        let dec = eigh(&build_term(pn(n), Term::Pair), DEFAULT_TOL).unwrap();
        let ev = dec.eigenvalues();
        let scale = dec.operator_norm().max(1.0);
        for (a, b) in ev.iter().zip(ev.iter().rev()) {
            prop_assert!((a + b).abs() <= 1e-10 * scale);
        }
    }

    #[test]
    fn number_terms_sum_to_n_squared(n in 1u32..200) {
        let p = pn(n);
        let s = build_term(p, Term::Self0)
            .try_add(&build_term(p, Term::Self1)).unwrap()
            .try_add(&build_term(p, Term::Contact).scaled(2.0)).unwrap();
        let x = p.as_f64();
        for (k, d) in s.diagonal().iter().enumerate() {
            prop_assert_eq!(*d, x * x, "k={}", k);
        }
        prop_assert!(s.max_abs_entry() == x * x);
    }

    #[test]
    fn equal_weighted_tunneling_renormalizes_a1(n in 1u32..30, c in couplings(), tr in -1.0f64..1.0, ti in -1.0f64..1.0) {
        let t = C64::new(tr, ti);
        let base = CouplingSet { t0: C64::new(0.0, 0.0), t1: C64::new(0.0, 0.0), ..c };
        let a = assemble_hamiltonian(pn(n), &CouplingSet { t0: t, t1: t, ..base });
        let b = assemble_hamiltonian(pn(n), &CouplingSet { a1: base.a1 + t * n as f64, ..base });
        for i in 0..=n as usize {
            for j in 0..=n as usize {
                prop_assert!((a.entry(i, j) - b.entry(i, j)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn extremal_spin_states_are_antipodal_coherent(n in 1u32..40, th in 0.01f64..3.13, ph in 0.0f64..6.28) {
        let p = pn(n);
        let dir = [th.sin() * ph.cos(), th.sin() * ph.sin(), th.cos()];
        let dec = eigh(&spin_along(p, dir), DEFAULT_TOL).unwrap();
        let pt = SpherePoint::from_angles(th, ph);
        prop_assert!(fidelity(&coherent(p, pt.neg_conj()), dec.ground().1).unwrap() > 1.0 - 1e-10);
        prop_assert!(fidelity(&coherent(p, pt.inverse()), dec.highest().1).unwrap() > 1.0 - 1e-10);
        prop_assert!((dec.highest().0 - n as f64 / 2.0).abs() < 1e-10);
    }

    #[test]
    fn antipodal_superposition_is_ghz_like(n in 2u32..40, th in 0.0f64..3.14, ph in 0.0f64..6.28, eta in 0.0f64..6.28) {
        let p = pn(n);
        let pt = SpherePoint::from_angles(th, ph);
        let v = antipodal_superposition(p, pt, eta);
        let dir = [th.sin() * ph.cos(), th.sin() * ph.sin(), th.cos()];
        let r = qfi_pure(&v, &spin_along(p, dir)).unwrap();
        prop_assert!((r.qfi - (n * n) as f64).abs() < 1e-9 * (n * n) as f64);
        prop_assert!((fragmentation(&v).fd - 1.0).abs() < 1e-10);
        prop_assert!(fragmentation(&coherent(p, pt)).fd < 1e-10);
    }

    #[test]
    fn qfi_gap_is_bounded_by_infidelity(n in (4u32..40).prop_map(|m| 2 * m), eta in 0.0f64..6.28) {
        let p = pn(n);
        let pair = build_term(p, Term::Pair);
        let dec = eigh(&pair, DEFAULT_TOL).unwrap();
        let truth = twomode::metrology::optimal_superposition(&dec, eta);
        let var = near_optimal_family(NearOptimal::A2Even, p, eta).unwrap();
        let g = qfi_gap_bound(&truth, &var, &pair).unwrap();
        prop_assert!(g.precondition);
        prop_assert!(g.lhs >= -1e-9 * g.rhs.max(1.0));
    }

    #[test]
    fn variance_is_nonnegative_and_bounded(n in 1u32..24, v in (1u32..24).prop_flat_map(state), t in 0usize..8) {
        let _ = n;
        let a = build_term(v.n(), Term::ALL[t]);
        let r = qfi_pure(&v, &a).unwrap();
        prop_assert!(r.variance >= 0.0);
        prop_assert!(r.qfi <= r.max_qfi * (1.0 + 1e-12) + 1e-12);
    }
}
