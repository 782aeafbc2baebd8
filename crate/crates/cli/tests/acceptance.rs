//! One PASS/FAIL line per acceptance criterion. Exits nonzero when any
//! criterion fails.

use std::f64::consts::PI;
use std::time::Instant;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use experiments::figures::{fig2, fig3, fig4, scalars, table1};
use experiments::{RunOptions, Sweep, TABLE1_NS};
use twomode::fock_dicke::{
    assemble_hamiltonian, build_term, hop_amplitude, spin_along, BandedHermitian, CouplingSet, DickeVector,
    ParticleNumber, Term,
};
use twomode::metrology::{closed_form_psi4_variance, evolve, fragmentation, qfi_pure, sld};
use twomode::spectral::{appendix_partner, eigen_residual, eigh, parity_split, DEFAULT_TOL};
use twomode::states::{antipodal_superposition, coherent, fidelity, omega, psi4, OmegaSign, SpherePoint};

const TABLE1_PAPER: [f64; 6] = [0.9330, 0.9965, 0.9982, 0.9988, 0.9991, 0.9992];
const TABLE1_TOL: f64 = 5e-4;
const TABLE1_SECONDS: f64 = 10.0;
const FAMILY_GAP: (f64, f64) = (9.2258, 1e-2);
const PSI4_GAP: (f64, f64) = (1.3e6, 0.05);
const RUN_RATIO: (f64, f64) = (1.01, 5e-3);
const SCALARS_SECONDS: f64 = 30.0;
const EXACT_RESIDUAL: f64 = 1e-12;
const CLOSED_FORM_REL: f64 = 1e-9;
const CLOSED_FORM_EXACT_REL: f64 = 1e-12;
const PARTNER_ORTHO: f64 = 1e-10;
const PARTNER_RESIDUAL: f64 = 1e-9;
const CLUSTER_REL: f64 = 1e-10;
const PROP1_FIDELITY: f64 = 1e-10;
const LEMMA1_TOL: f64 = 1e-10;
const FD_TOL: f64 = 1e-10;
const SLD_STEP: f64 = 1e-5;
const SLD_REL: f64 = 1e-6;
const BEST_OMEGA_INFID: f64 = 1e-3;
const MIRROR_REL: f64 = 1e-10;
const RENORM_REL: f64 = 1e-12;
const INVARIANT_SECONDS: f64 = 300.0;

struct Outcome {
    pass: bool,
    detail: String,
}

fn pn(n: u32) -> ParticleNumber {
    ParticleNumber::new(n).unwrap()
}

fn opts() -> RunOptions {
    RunOptions::new(std::env::temp_dir())
}

fn dense_eigenvalues(op: &BandedHermitian) -> Vec<f64> {
    let d = op.dim();
    let m = DMatrix::from_fn(d, d, |i, j| op.entry(i, j));
    let mut ev: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

fn random_state(rng: &mut ChaCha8Rng, n: ParticleNumber) -> DickeVector {
    let amps = (0..n.dim()).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    DickeVector::new(n, amps).unwrap()
}

fn random_unit(rng: &mut ChaCha8Rng) -> [f64; 3] {
    loop {
        let v: [f64; 3] = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        let r = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if r > 1e-3 && r <= 1.0 {
            return v.map(|x| x / r);
        }
    }
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let rows = table1(&TABLE1_NS, &opts()).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let errs: Vec<f64> = rows.iter().zip(TABLE1_PAPER).map(|(r, p)| (r.normalized - p).abs()).collect();
    let worst = errs.iter().copied().fold(0.0, f64::max);
    let got: Vec<String> = rows.iter().map(|r| format!("{:.4}", r.normalized)).collect();
    let raw: Vec<String> = rows.iter().map(|r| format!("{:.4}", r.qfi_over_n2)).collect();
    Outcome {
        pass: worst <= TABLE1_TOL && secs < TABLE1_SECONDS,
        detail: format!(
            "QFI/(λmax−λmin)² = [{}], max |err| {worst:.1e} (tol {TABLE1_TOL:.0e}); raw QFI/N² = [{}]; {secs:.2} s",
            got.join(", "),
            raw.join(", ")
        ),
    }
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let s = scalars(160, 0.0, DEFAULT_TOL).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let gap_ok = (s.family_gap - FAMILY_GAP.0).abs() <= FAMILY_GAP.1;
    let psi4_ok = ((s.psi4_gap - PSI4_GAP.0) / PSI4_GAP.0).abs() <= PSI4_GAP.1;
    let ratio_ok = (s.run_ratio - RUN_RATIO.0).abs() <= RUN_RATIO.1;
    Outcome {
        pass: gap_ok && psi4_ok && ratio_ok && secs < SCALARS_SECONDS,
        detail: format!(
            "family gap {:.4} [{}]; ψ4 gap {:.4e} [{}]; ν_B/ν_A {:.4} with F_max = max QFI [{}] \
             ({:.4} with F_max = λmax²); {secs:.2} s",
            s.family_gap,
            ok(gap_ok),
            s.psi4_gap,
            ok(psi4_ok),
            s.run_ratio,
            ok(ratio_ok),
            s.run_ratio_max_variance
        ),
    }
}

fn criterion_3() -> Outcome {
    let n = pn(4);
    let c = ((3f64.sqrt() - 1.0) / 2.0).sqrt();
    let v = omega(n, c, OmegaSign::Plus).unwrap();
    let pair = build_term(n, Term::Pair);
    let lam = pair.expectation(&v).unwrap();
    let res = eigen_residual(&pair, &v, lam).unwrap();
    let res_ok = res <= EXACT_RESIDUAL;

    let mut worst = 0.0f64;
    let mut worst_n = 0;
    for m in (4..=40).step_by(2) {
        let p = pn(m);
        let brute = build_term(p, Term::Pair).variance(&psi4(p).unwrap()).unwrap();
        let rel = ((closed_form_psi4_variance(m).unwrap() - brute) / brute).abs();
        if rel > worst {
            worst = rel;
            worst_n = m;
        }
    }
    let brute_ok = worst <= CLOSED_FORM_REL;

    let mut exact_worst = 0.0f64;
    for m in (4..=40u32).step_by(2).filter(|m| m % 8 == 2 || m % 8 == 6) {
        let x = m as f64;
        let target = x * (x - 1.0) * (x - 2.0) * (x - 3.0) / 4.0;
        exact_worst = exact_worst.max(((closed_form_psi4_variance(m).unwrap() - target) / target).abs());
    }
    let exact_ok = exact_worst <= CLOSED_FORM_EXACT_REL;
    Outcome {
        pass: res_ok && brute_ok && exact_ok,
        detail: format!(
            "ω+(4) residual {res:.1e} [{}]; closed form vs brute force worst rel {worst:.3} at N = {worst_n} [{}]; \
             N ≡ ±2 mod 8 equality {exact_worst:.1e} [{}]",
            ok(res_ok),
            ok(brute_ok),
            ok(exact_ok)
        ),
    }
}

fn criterion_4() -> Outcome {
    let mut odd_fail = Vec::new();
    let mut worst_ortho = 0.0f64;
    let mut worst_res = 0.0f64;
    for m in (1..=41).step_by(2) {
        let p = pn(m);
        let pair = build_term(p, Term::Pair);
        let dec = eigh(&pair, DEFAULT_TOL).unwrap();
        let scale = dec.operator_norm().max(1.0);
        let mult_ok = dec.clusters_at(CLUSTER_REL).iter().all(|c| c.len() == 2);
        for (i, v) in dec.eigenvectors().iter().enumerate() {
            let lam = dec.eigenvalues()[i];
            let w = appendix_partner(v, lam).unwrap();
            worst_ortho = worst_ortho.max(v.inner(&w).unwrap().norm());
            worst_res = worst_res.max(eigen_residual(&pair, &w, lam).unwrap() / scale);
        }
        if !mult_ok {
            odd_fail.push(m);
        }
    }
    let odd_ok = odd_fail.is_empty() && worst_ortho <= PARTNER_ORTHO && worst_res <= PARTNER_RESIDUAL;

    let mut even_fail = Vec::new();
    for m in (2..=40).step_by(2) {
        let dec = eigh(&build_term(pn(m), Term::Pair), DEFAULT_TOL).unwrap();
        if dec.clusters_at(CLUSTER_REL).iter().any(|c| c.len() > 1) {
            even_fail.push(m);
        }
    }
    let even_ok = even_fail.is_empty();
    Outcome {
        pass: odd_ok && even_ok,
        detail: format!(
            "odd N ≤ 41: multiplicity-2 failures {odd_fail:?}, partner overlap ≤ {worst_ortho:.1e}, \
             residual ≤ {worst_res:.1e} [{}]; even N ≤ 40 with a cluster at 1e-10·‖A‖: {even_fail:?} [{}]",
            ok(odd_ok),
            ok(even_ok)
        ),
    }
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut worst_fid, mut worst_lemma, mut worst_qfi, mut worst_fd) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..100 {
        // a one-particle antipodal superposition is itself coherent
        let n = pn(rng.gen_range(2..=40));
        let x = n.as_f64();
        let dir = random_unit(&mut rng);
        let op = spin_along(n, dir);
        let dec = eigh(&op, DEFAULT_TOL).unwrap();
        let p = SpherePoint::from_direction(dir).unwrap();
        let lo = coherent(n, p.neg_conj());
        let hi = coherent(n, p.inverse());
        worst_fid = worst_fid.max(1.0 - fidelity(&lo, dec.ground().1).unwrap());
        worst_fid = worst_fid.max(1.0 - fidelity(&hi, dec.highest().1).unwrap());

        let zeta = C64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let raw = lemma1_amplitudes(n, zeta);
        let raw_norm = raw.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        let lemma = DickeVector::new(n, raw).unwrap();
        let direct = coherent(n, SpherePoint::zeta(zeta).inverse());
        worst_lemma = worst_lemma.max(1.0 - fidelity(&lemma, &direct).unwrap());
        worst_lemma = worst_lemma.max((raw_norm - 1.0).abs());

        let eta = rng.gen_range(0.0..2.0 * PI);
        let ghz = antipodal_superposition(n, p, eta);
        let r = qfi_pure(&ghz, &op).unwrap();
        worst_qfi = worst_qfi.max((r.qfi - x * x).abs() / (x * x));
        worst_fd = worst_fd.max((fragmentation(&ghz).fd - 1.0).abs());
    }
    let pass = worst_fid <= PROP1_FIDELITY && worst_lemma <= LEMMA1_TOL && worst_qfi <= 1e-10 && worst_fd <= FD_TOL;
    Outcome {
        pass,
        detail: format!(
            "100 random n̂, 2 ≤ N ≤ 40: worst extremal infidelity {worst_fid:.1e}; Lemma 1 {worst_lemma:.1e}; \
             |4Var/N² − 1| {worst_qfi:.1e}; |F_D − 1| {worst_fd:.1e}"
        ),
    }
}

/// `(1+|ζ|²)^{−N/2} e^{ζJ₋}|0,N⟩` by summing the series, unnormalized.
fn lemma1_amplitudes(n: ParticleNumber, zeta: C64) -> Vec<C64> {
    let nn = n.get() as usize;
    let mut term = vec![C64::new(0.0, 0.0); nn + 1];
    term[nn] = C64::new(1.0, 0.0);
    let mut acc = term.clone();
    for j in 1..=nn {
        let mut next = vec![C64::new(0.0, 0.0); nn + 1];
        for k in 1..=nn {
            next[k - 1] = term[k] * hop_amplitude(n, k - 1) * zeta / j as f64;
        }
        term = next;
        for (a, t) in acc.iter_mut().zip(&term) {
            *a += t;
        }
    }
    let scale = (1.0 + zeta.norm_sqr()).powf(-n.as_f64() / 2.0);
    acc.iter().map(|a| a * scale).collect()
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst = 0.0f64;
    let mut skipped = 0;
    let mut done = 0;
    while done < 50 {
        let n = pn(rng.gen_range(1..=32));
        let term = Term::ALL[rng.gen_range(0..Term::ALL.len())];
        let a = build_term(n, term);
        let v = random_state(&mut rng, n);
        let Ok(m) = sld(&v, &a) else {
            skipped += 1;
            continue;
        };
        let q = qfi_pure(&v, &a).unwrap().qfi;
        let dec = eigh(&a, DEFAULT_TOL).unwrap();
        let probs = |theta: f64| -> Vec<f64> {
            let w = evolve(&dec, &v, theta).unwrap();
            m.projectors.iter().map(|p| p.inner(&w).unwrap().norm_sqr()).collect()
        };
        // five-point stencil: the central difference has error ~(h‖A‖)², ~1e-5 for ‖A‖ ~ N²
        let h = SLD_STEP;
        let (p0, p1, m1, p2, m2) = (probs(0.0), probs(h), probs(-h), probs(2.0 * h), probs(-2.0 * h));
        let fisher: f64 =
            (0..2).map(|j| ((8.0 * (p1[j] - m1[j]) - (p2[j] - m2[j])) / (12.0 * h)).powi(2) / p0[j]).sum();
        worst = worst.max(((fisher - q) / q).abs());
        done += 1;
    }
    Outcome {
        pass: worst <= SLD_REL,
        detail: format!("50 random (state, term) pairs, N ≤ 32: worst |F_C/F_Q − 1| {worst:.1e} ({skipped} degenerate draws redrawn)"),
    }
}

fn criterion_7() -> Outcome {
    let o = opts();
    let f2 = fig2(Sweep::DEFAULT, &o).unwrap();
    let f3 = fig3(Sweep::DEFAULT, &o).unwrap();
    let f4 = fig4(Sweep::DEFAULT, 8, &o, None).unwrap();

    let at160 = f2.iter().find(|r| r.n == 160).unwrap().best_ground_infidelity();
    let omega_ok = at160 < BEST_OMEGA_INFID;

    let coh_bad: Vec<u32> = f4
        .iter()
        .filter(|r| r.n <= 40 && r.infid_two_eq.is_none_or(|x| r.infid_coherent < x))
        .map(|r| r.n)
        .collect();
    let opt: Vec<(u32, f64, f64, f64)> = f4
        .iter()
        .filter_map(|r| {
            r.optimized
                .as_ref()
                .map(|o| (r.n, o.infid, r.infid_coherent, r.infid_two_eq.unwrap_or(f64::INFINITY)))
        })
        .collect();
    let not_min: Vec<u32> = opt.iter().filter(|o| o.1 > o.2.min(o.3)).map(|o| o.0).collect();
    let not_mono: Vec<u32> = opt.windows(2).filter(|w| w[1].1 > w[0].1).map(|w| w[1].0).collect();
    let fig4_ok = coh_bad.is_empty() && not_min.is_empty() && not_mono.is_empty() && !opt.is_empty();

    let fig3_bad: Vec<u32> = f3
        .iter()
        .filter(|r3| {
            f2.iter()
                .find(|r2| r2.n == r3.n)
                .is_some_and(|r2| r3.best() <= r2.best_ground_infidelity())
        })
        .map(|r| r.n)
        .collect();
    let fig3_ok = fig3_bad.is_empty();
    Outcome {
        pass: omega_ok && fig4_ok && fig3_ok,
        detail: format!(
            "best ω± infidelity at N=160 {at160:.2e} [{}]; fig4 coherent<two-eq at {coh_bad:?}, \
             optimized not minimal at {not_min:?}, not monotone at {not_mono:?} [{}]; \
             fig3 ≤ fig2 at {fig3_bad:?} [{}]",
            ok(omega_ok),
            ok(fig4_ok),
            ok(fig3_ok)
        ),
    }
}

fn criterion_8() -> Outcome {
    let start = Instant::now();
    let mut worst_mirror = 0.0f64;
    let mut worst_blocks = 0.0f64;
    let mut worst_number = 0.0f64;
    for m in 1..=60 {
        let p = pn(m);
        let pair = build_term(p, Term::Pair);
        let dec = eigh(&pair, DEFAULT_TOL).unwrap();
        let ev = dec.eigenvalues();
        let scale = dec.operator_norm().max(1.0);
        for (a, b) in ev.iter().zip(ev.iter().rev()) {
            worst_mirror = worst_mirror.max((a + b).abs() / scale);
        }

        let blocks = parity_split(&pair).unwrap();
        let mut union: Vec<f64> = blocks.even.eigenvalues().unwrap();
        union.extend(blocks.odd.eigenvalues().unwrap());
        union.sort_by(f64::total_cmp);
        for (a, b) in union.iter().zip(dense_eigenvalues(&pair)) {
            worst_blocks = worst_blocks.max((a - b).abs() / scale);
        }

        let sum = build_term(p, Term::Self0)
            .try_add(&build_term(p, Term::Self1))
            .unwrap()
            .try_add(&build_term(p, Term::Contact).scaled(2.0))
            .unwrap();
        let x = p.as_f64();
        for i in 0..p.dim() {
            for j in 0..p.dim() {
                let target = if i == j { x * x } else { 0.0 };
                worst_number = worst_number.max((sum.entry(i, j) - target).norm());
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst_renorm = 0.0f64;
    for _ in 0..20 {
        let n = pn(rng.gen_range(1..=24));
        let mut r = || rng.gen_range(-1.0..1.0);
        let t = C64::new(r(), r());
        let base = CouplingSet {
            vartheta: r(),
            v00: r(),
            v01: r(),
            v11: r(),
            a1: C64::new(r(), r()),
            a2: C64::new(r(), r()),
            ..CouplingSet::default()
        };
        let with_t = CouplingSet { t0: t, t1: t, ..base };
        let renorm = CouplingSet { a1: base.a1 + t * n.as_f64(), ..base };
        let e1 = eigh(&assemble_hamiltonian(n, &with_t), DEFAULT_TOL).unwrap();
        let e2 = eigh(&assemble_hamiltonian(n, &renorm), DEFAULT_TOL).unwrap();
        let scale = e1.operator_norm().max(1.0);
        for (a, b) in e1.eigenvalues().iter().zip(e2.eigenvalues()) {
            worst_renorm = worst_renorm.max((a - b).abs() / scale);
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let pass = worst_mirror <= MIRROR_REL
        && worst_blocks <= MIRROR_REL
        && worst_number == 0.0
        && worst_renorm <= RENORM_REL
        && secs < INVARIANT_SECONDS;
    Outcome {
        pass,
        detail: format!(
            "mirror {worst_mirror:.1e}; parity blocks vs dense {worst_blocks:.1e}; \
             self0+self1+2·contact − N² {worst_number:.1e}; T0=T1 renormalization {worst_renorm:.1e}; {secs:.2} s"
        ),
    }
}

fn ok(b: bool) -> &'static str {
    if b {
        "ok"
    } else {
        "FAIL"
    }
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("Table 1 reproduction", criterion_1),
        ("headline scalars at N=160", criterion_2),
        ("exactness anchors", criterion_3),
        ("degeneracy and partner suite", criterion_4),
        ("extremal coherent states and GHZ probes", criterion_5),
        ("SLD classical Fisher oracle", criterion_6),
        ("figure contracts", criterion_7),
        ("structural invariants", criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let o = f();
        if !o.pass {
            failed += 1;
        }
        println!("[{}] {}. {name}: {}", if o.pass { "PASS" } else { "FAIL" }, i + 1, o.detail);
    }
    println!("acceptance: {}/{} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
