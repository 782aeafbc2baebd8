//! Figure, table and headline-scalar commands.

use std::path::{Path, PathBuf};
use std::time::Instant;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::Serialize;

use twomode::fock_dicke::{build_su2, build_term, ParticleNumber, SpinAxis, Term};
use twomode::metrology::{qfi_pure, run_ratio};
use twomode::spectral::{eigh, gap_pairs, interpair_gaps, SpectralDecomposition};
use twomode::states::{coherent, coherent_pair_y, fidelity, omega, psi4, xi_pair, OmegaSign, SpherePoint};
use twomode::variational::{
    minimize_coherent, near_optimal_family, nelder_mead_traced, tilde_c, xi_two_equation_solve, ConsistencyRows,
    NearOptimal, OptimizerConfig, TraceRow,
};
use twomode::DickeVector;

use crate::output::{ensure_dir, fmt_f, fmt_opt, svg_plot, write_csv, write_svg, RunManifest, Series};
use crate::{CliError, CliResult, Sweep};

/// Options shared by every figure command.
#[derive(Clone, Debug)]
pub struct RunOptions {
    pub out: PathBuf,
    pub svg: bool,
    pub tol: f64,
    pub threads: usize,
}

impl RunOptions {
    pub fn new(out: impl Into<PathBuf>) -> Self {
        RunOptions { out: out.into(), svg: false, tol: twomode::spectral::DEFAULT_TOL, threads: 0 }
    }

    fn validate(&self) -> CliResult<()> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(CliError::Validation(format!("--tol must be positive, got {}", self.tol)));
        }
        Ok(())
    }
}

fn pn(n: u32) -> CliResult<ParticleNumber> {
    Ok(ParticleNumber::new(n)?)
}

fn pair_spectrum(n: u32, tol: f64) -> CliResult<SpectralDecomposition> {
    Ok(eigh(&build_term(pn(n)?, Term::Pair), tol)?)
}

fn par_rows<T, F>(ns: &[u32], threads: usize, f: F) -> CliResult<Vec<T>>
where
    T: Send,
    F: Fn(u32) -> CliResult<T> + Sync,
{
    let pool = crate::thread_pool(threads)?;
    pool.install(|| ns.par_iter().map(|&n| f(n)).collect())
}

fn finish(mut m: RunManifest, outputs: Vec<PathBuf>, start: Instant, out: &Path) -> CliResult<RunManifest> {
    m.outputs = outputs;
    m.wall_time = start.elapsed().as_secs_f64();
    m.write(out)?;
    Ok(m)
}

// ---------------------------------------------------------------- fig1

#[derive(Clone, Debug, Serialize)]
pub struct Fig1Result {
    pub n: u32,
    pub eigenvalues: Vec<f64>,
    /// `(n, ℰ_{2n} − ℰ_{2n−1})`
    pub intrapair: Vec<(usize, f64)>,
    /// `(n, ℰ_{2n+1} − ℰ_{2n})`
    pub interpair: Vec<(usize, f64)>,
}

pub fn fig1(n: u32, tol: f64) -> CliResult<Fig1Result> {
    let dec = pair_spectrum(n, tol)?;
    Ok(Fig1Result {
        n,
        eigenvalues: dec.eigenvalues().to_vec(),
        intrapair: gap_pairs(&dec),
        interpair: interpair_gaps(&dec),
    })
}

pub fn cmd_fig1(n: u32, opts: &RunOptions) -> CliResult<(Fig1Result, RunManifest)> {
    let start = Instant::now();
    opts.validate()?;
    if n % 2 == 1 {
        return Err(CliError::Validation(format!("fig1 needs even N, got {n}")));
    }
    ensure_dir(&opts.out)?;
    let r = fig1(n, opts.tol)?;
    let ev_path = opts.out.join("fig1_eigenvalues.csv");
    let rows: Vec<Vec<String>> =
        r.eigenvalues.iter().enumerate().map(|(i, e)| vec![(i + 1).to_string(), fmt_f(*e)]).collect();
    write_csv(&ev_path, "fig1_eigenvalues", &["n", "eigenvalue"], &rows)?;
    let gap_path = opts.out.join("fig1_gaps.csv");
    let rows: Vec<Vec<String>> = r
        .intrapair
        .iter()
        .map(|&(i, g)| {
            let inter = r.interpair.iter().find(|p| p.0 == i).map(|p| p.1);
            vec![i.to_string(), fmt_f(g), fmt_opt(inter)]
        })
        .collect();
    write_csv(&gap_path, "fig1_gaps", &["n", "intrapair_gap", "interpair_gap"], &rows)?;
    let mut outputs = vec![ev_path, gap_path];
    if opts.svg {
        let p = opts.out.join("fig1.svg");
        let pts = r.eigenvalues.iter().enumerate().map(|(i, e)| ((i + 1) as f64, *e)).collect();
        let gaps = r.intrapair.iter().map(|&(i, g)| (i as f64, g)).collect();
        write_svg(&p, &svg_plot(&format!("pair-tunneling spectrum, N = {n}"), "n", "E_n", &[
            Series { label: "eigenvalue".into(), points: pts, lines: false },
        ], false))?;
        let pg = opts.out.join("fig1_gaps.svg");
        write_svg(&pg, &svg_plot("intrapair gap", "n", "gap", &[
            Series { label: "E_2n - E_2n-1".into(), points: gaps, lines: false },
        ], true))?;
        outputs.extend([p, pg]);
    }
    let m = RunManifest::new("fig1").param("N", n).tolerance("eigen_residual", opts.tol);
    let m = finish(m, outputs, start, &opts.out)?;
    Ok((r, m))
}

// ---------------------------------------------------------------- fig2

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Fig2Row {
    pub n: u32,
    pub c: f64,
    /// `fid[s][j]`: `s` = 0 for `ω₊`, 1 for `ω₋`; `j` = 0 ground, 1 first excited.
    pub fid: [[f64; 2]; 2],
    /// True for the appended exact-`c` row.
    pub exact_c: bool,
}

impl Fig2Row {
    pub fn ground_best(&self) -> OmegaSign {
        if self.fid[1][0] > self.fid[0][0] {
            OmegaSign::Minus
        } else {
            OmegaSign::Plus
        }
    }

    pub fn excited_best(&self) -> OmegaSign {
        if self.fid[1][1] > self.fid[0][1] {
            OmegaSign::Minus
        } else {
            OmegaSign::Plus
        }
    }

    /// Infidelity of the better of `ω±` with the ground state.
    pub fn best_ground_infidelity(&self) -> f64 {
        1.0 - self.fid[0][0].max(self.fid[1][0])
    }

    pub fn max_fidelity(&self) -> f64 {
        self.fid.iter().flatten().copied().fold(0.0, f64::max)
    }
}

pub fn fig2_row(n: u32, tol: f64) -> CliResult<Fig2Row> {
    let p = pn(n)?;
    let sol = tilde_c(n, ConsistencyRows::Even)?;
    let dec = pair_spectrum(n, tol)?;
    let mut fid = [[0.0; 2]; 2];
    for (s, sign) in [OmegaSign::Plus, OmegaSign::Minus].into_iter().enumerate() {
        // ω₋ needs at least one odd amplitude pair
        let Ok(w) = omega(p, sol.c_tilde, sign) else { continue };
        for (j, f) in fid[s].iter_mut().enumerate() {
            *f = fidelity(&w, dec.eigenvector(j))?;
        }
    }
    Ok(Fig2Row { n, c: sol.c_tilde, fid, exact_c: n == 4 })
}

pub fn fig2(sweep: Sweep, opts: &RunOptions) -> CliResult<Vec<Fig2Row>> {
    sweep.validate()?;
    if sweep.nmin < 4 {
        return Err(CliError::Validation(format!("fig2 needs N >= 4, got --nmin {}", sweep.nmin)));
    }
    let mut ns = sweep.values();
    if !ns.contains(&4) {
        ns.push(4);
    }
    par_rows(&ns, opts.threads, |n| fig2_row(n, opts.tol))
}

pub fn cmd_fig2(sweep: Sweep, opts: &RunOptions) -> CliResult<(Vec<Fig2Row>, RunManifest)> {
    let start = Instant::now();
    opts.validate()?;
    ensure_dir(&opts.out)?;
    let rows = fig2(sweep, opts)?;
    let path = opts.out.join("fig2.csv");
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.n.to_string(),
                fmt_f(r.c),
                fmt_f(r.fid[0][0]),
                fmt_f(r.fid[0][1]),
                fmt_f(r.fid[1][0]),
                fmt_f(r.fid[1][1]),
                r.ground_best().symbol().to_string(),
                r.excited_best().symbol().to_string(),
                r.exact_c.to_string(),
            ]
        })
        .collect();
    write_csv(
        &path,
        "fig2",
        &["N", "c_tilde", "fid_plus_E1", "fid_plus_E2", "fid_minus_E1", "fid_minus_E2", "ground_best", "excited_best", "exact_c"],
        &body,
    )?;
    let mut outputs = vec![path];
    if opts.svg {
        let p = opts.out.join("fig2.svg");
        let series = [(0, 0, "1-F(w+, E1)"), (0, 1, "1-F(w+, E2)"), (1, 0, "1-F(w-, E1)"), (1, 1, "1-F(w-, E2)")]
            .iter()
            .map(|&(s, j, label)| Series {
                label: label.into(),
                points: rows.iter().filter(|r| !r.exact_c).map(|r| (r.n as f64, 1.0 - r.fid[s][j])).collect(),
                lines: false,
            })
            .collect::<Vec<_>>();
        write_svg(&p, &svg_plot("omega(c~) infidelity", "N", "1 - F", &series, true))?;
        outputs.push(p);
    }
    let m = RunManifest::new("fig2")
        .param("nmin", sweep.nmin)
        .param("nmax", sweep.nmax)
        .param("step", sweep.step)
        .tolerance("eigen_residual", opts.tol);
    let m = finish(m, outputs, start, &opts.out)?;
    Ok((rows, m))
}

// ---------------------------------------------------------------- fig3

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Fig3Row {
    pub n: u32,
    pub infid_plus: f64,
    pub infid_minus: f64,
}

impl Fig3Row {
    pub fn best_sign(&self) -> OmegaSign {
        if self.infid_minus < self.infid_plus {
            OmegaSign::Minus
        } else {
            OmegaSign::Plus
        }
    }

    pub fn best(&self) -> f64 {
        self.infid_plus.min(self.infid_minus)
    }
}

pub fn fig3_row(n: u32, tol: f64) -> CliResult<Fig3Row> {
    let p = pn(n)?;
    let dec = pair_spectrum(n, tol)?;
    let ground = dec.eigenvector(0);
    let infid = |s| -> CliResult<f64> { Ok(1.0 - fidelity(&coherent_pair_y(p, s)?, ground)?) };
    Ok(Fig3Row { n, infid_plus: infid(OmegaSign::Plus)?, infid_minus: infid(OmegaSign::Minus)? })
}

pub fn fig3(sweep: Sweep, opts: &RunOptions) -> CliResult<Vec<Fig3Row>> {
    sweep.validate()?;
    par_rows(&sweep.values(), opts.threads, |n| fig3_row(n, opts.tol))
}

pub fn cmd_fig3(sweep: Sweep, opts: &RunOptions) -> CliResult<(Vec<Fig3Row>, RunManifest)> {
    let start = Instant::now();
    opts.validate()?;
    ensure_dir(&opts.out)?;
    let rows = fig3(sweep, opts)?;
    let path = opts.out.join("fig3.csv");
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.n.to_string(),
                fmt_f(r.infid_plus),
                fmt_f(r.infid_minus),
                r.best_sign().symbol().to_string(),
                fmt_f(r.best()),
            ]
        })
        .collect();
    write_csv(&path, "fig3", &["N", "infid_plus", "infid_minus", "best_sign", "best_infid"], &body)?;
    let mut outputs = vec![path];
    if opts.svg {
        let p = opts.out.join("fig3.svg");
        let pick = |s: OmegaSign| Series {
            label: format!("best sign {}", s.symbol()),
            points: rows.iter().filter(|r| r.best_sign() == s).map(|r| (r.n as f64, r.best())).collect(),
            lines: false,
        };
        write_svg(&p, &svg_plot("|i> +- |-i> infidelity", "N", "1 - F", &[pick(OmegaSign::Plus), pick(OmegaSign::Minus)], true))?;
        outputs.push(p);
    }
    let m = RunManifest::new("fig3")
        .param("nmin", sweep.nmin)
        .param("nmax", sweep.nmax)
        .param("step", sweep.step)
        .tolerance("eigen_residual", opts.tol);
    let m = finish(m, outputs, start, &opts.out)?;
    Ok((rows, m))
}

// ---------------------------------------------------------------- fig4

#[derive(Clone, Debug, Serialize)]
pub struct OptimizedXi {
    pub w0: f64,
    pub z0: f64,
    pub infid: f64,
    pub converged: bool,
    pub iterations: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Fig4Row {
    pub n: u32,
    pub zeta0: f64,
    pub infid_coherent: f64,
    pub lambda0: f64,
    /// `(w̃, z̃)` or the reason no real solution exists.
    pub two_eq: Result<(f64, f64), String>,
    pub infid_two_eq: Option<f64>,
    pub optimized: Option<OptimizedXi>,
}

fn xi_infidelity(p: ParticleNumber, ground: &DickeVector, w: f64, z: f64) -> f64 {
    match xi_pair(p, C64::new(w, 0.0), C64::new(z, 0.0)) {
        Ok(v) => fidelity(&v, ground).map(|f| (1.0 - f).max(0.0)).unwrap_or(f64::INFINITY),
        Err(_) => f64::INFINITY,
    }
}

/// `log(1 − F)` carries rounding noise near `1e-10` once `1 − F ~ 1e-6`,
/// so the simplex stops at `tol_f = 1e-9`; the minimum is flat to
/// `√tol_f` in the parameters.
pub fn fig4_optimizer(init: Vec<f64>) -> OptimizerConfig {
    OptimizerConfig { tol_f: 1e-9, tol_x: 1e-5, ..OptimizerConfig::new(init) }
}

/// One fig4 row. With `optimize`, `(w, z)` is refined by the downhill
/// simplex on `log(1 − F)`, starting at `(w̃, z̃)` (or `(w̃, 0)` when
/// `z̃² < 0`).
pub fn fig4_row(n: u32, tol: f64, optimize: bool, trace: Option<&mut Vec<TraceRow>>) -> CliResult<Fig4Row> {
    let p = pn(n)?;
    let op = build_term(p, Term::Weighted0);
    let dec = eigh(&op, tol)?;
    let (lambda0, ground) = dec.ground();
    let zeta0 = minimize_coherent(n);
    let coh = coherent(p, SpherePoint::Finite(C64::new(zeta0, 0.0)));
    let infid_coherent = 1.0 - fidelity(&coh, ground)?;
    let two_eq = xi_two_equation_solve(n, lambda0).map_err(|e| e.to_string());
    let infid_two_eq = two_eq.as_ref().ok().map(|&(w, z)| xi_infidelity(p, ground, w, z));
    let optimized = if optimize {
        let init = match two_eq {
            Ok((w, z)) => vec![w, z],
            Err(_) => vec![lambda0 / (n as f64 * n as f64), 0.0],
        };
        let objective = |x: &[f64]| xi_infidelity(p, ground, x[0], x[1]).max(1e-300).ln();
        let m = nelder_mead_traced(objective, &fig4_optimizer(init), trace)?;
        Some(OptimizedXi {
            w0: m.params[0],
            z0: m.params[1],
            infid: m.value.exp(),
            converged: m.converged,
            iterations: m.iterations,
        })
    } else {
        None
    };
    Ok(Fig4Row { n, zeta0, infid_coherent, lambda0, two_eq, infid_two_eq, optimized })
}

pub fn fig4(sweep: Sweep, opt_step: u32, opts: &RunOptions, trace_dir: Option<&Path>) -> CliResult<Vec<Fig4Row>> {
    sweep.validate()?;
    if sweep.nmin < 2 {
        return Err(CliError::Validation("fig4 needs N >= 2".into()));
    }
    if opt_step == 0 {
        return Err(CliError::Validation("--opt-step must be positive".into()));
    }
    par_rows(&sweep.values(), opts.threads, |n| {
        let optimize = (n - sweep.nmin) % opt_step == 0;
        let mut trace = Vec::new();
        let row = fig4_row(n, opts.tol, optimize, trace_dir.map(|_| &mut trace))?;
        if let (Some(dir), true) = (trace_dir, optimize) {
            let rows: Vec<Vec<String>> = trace
                .iter()
                .map(|t| vec![t.iter.to_string(), fmt_f(t.params[0]), fmt_f(t.params[1]), fmt_f(t.value)])
                .collect();
            write_csv(&dir.join(format!("fig4_trace_N{n}.csv")), "fig4_trace", &["iter", "w", "z", "value"], &rows)?;
        }
        Ok(row)
    })
}

pub fn cmd_fig4(sweep: Sweep, opt_step: u32, trace: bool, opts: &RunOptions) -> CliResult<(Vec<Fig4Row>, RunManifest)> {
    let start = Instant::now();
    opts.validate()?;
    ensure_dir(&opts.out)?;
    let rows = fig4(sweep, opt_step, opts, trace.then_some(opts.out.as_path()))?;
    let path = opts.out.join("fig4.csv");
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            let (w, z, note) = match &r.two_eq {
                Ok((w, z)) => (Some(*w), Some(*z), String::new()),
                Err(e) => (None, None, e.clone()),
            };
            let o = r.optimized.as_ref();
            vec![
                r.n.to_string(),
                fmt_f(r.zeta0),
                fmt_f(r.infid_coherent),
                fmt_opt(w),
                fmt_opt(z),
                fmt_opt(r.infid_two_eq),
                fmt_opt(o.map(|o| o.w0)),
                fmt_opt(o.map(|o| o.z0)),
                fmt_opt(o.map(|o| o.infid)),
                o.map(|o| o.converged.to_string()).unwrap_or_default(),
                note,
            ]
        })
        .collect();
    write_csv(
        &path,
        "fig4",
        &["N", "zeta0", "infid_coherent", "w_tilde", "z_tilde", "infid_two_eq", "w0", "z0", "infid_optimized", "optimizer_converged", "note"],
        &body,
    )?;
    let mut outputs = vec![path];
    if trace {
        outputs.extend(
            rows.iter()
                .filter(|r| r.optimized.is_some())
                .map(|r| opts.out.join(format!("fig4_trace_N{}.csv", r.n))),
        );
    }
    if opts.svg {
        let p = opts.out.join("fig4.svg");
        let series = vec![
            Series { label: "coherent".into(), points: rows.iter().map(|r| (r.n as f64, r.infid_coherent)).collect(), lines: false },
            Series {
                label: "Xi(w~, z~)".into(),
                points: rows.iter().filter_map(|r| r.infid_two_eq.map(|f| (r.n as f64, f))).collect(),
                lines: false,
            },
            Series {
                label: "Xi(w0, z0)".into(),
                points: rows.iter().filter_map(|r| r.optimized.as_ref().map(|o| (r.n as f64, o.infid))).collect(),
                lines: false,
            },
        ];
        write_svg(&p, &svg_plot("weighted-tunneling ground-state infidelity", "N", "1 - F", &series, true))?;
        outputs.push(p);
    }
    let cfg = fig4_optimizer(vec![0.0, 0.0]);
    let m = RunManifest::new("fig4")
        .param("nmin", sweep.nmin)
        .param("nmax", sweep.nmax)
        .param("step", sweep.step)
        .param("opt_step", opt_step)
        .param("simplex_scale", cfg.simplex_scale)
        .param("max_iter", cfg.max_iter)
        .param("restarts", cfg.restarts)
        .tolerance("eigen_residual", opts.tol)
        .tolerance("optimizer_tol_f", cfg.tol_f)
        .tolerance("optimizer_tol_x", cfg.tol_x)
        .tolerance("coherent_search", 1e-12);
    let m = finish(m, outputs, start, &opts.out)?;
    Ok((rows, m))
}

// ---------------------------------------------------------------- table1

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Table1Row {
    pub n: u32,
    /// QFI with generator `2J_x`.
    pub qfi: f64,
    pub qfi_over_n2: f64,
    /// `QFI / (λ_max − λ_min)²` of `2J_x`, i.e. `Var(2J_x)/N²`.
    pub normalized: f64,
}

pub fn table1_row(n: u32, tol: f64) -> CliResult<Table1Row> {
    let p = pn(n)?;
    let h = build_term(p, Term::Pair).scaled(-1.0);
    let dec = eigh(&h, tol)?;
    let gen = build_su2(p, SpinAxis::X).scaled(2.0);
    let r = qfi_pure(dec.eigenvector(0), &gen)?;
    let n2 = (n as f64).powi(2);
    Ok(Table1Row { n, qfi: r.qfi, qfi_over_n2: r.qfi / n2, normalized: r.qfi / r.max_qfi })
}

pub fn table1(ns: &[u32], opts: &RunOptions) -> CliResult<Vec<Table1Row>> {
    par_rows(ns, opts.threads, |n| table1_row(n, opts.tol))
}

pub fn cmd_table1(ns: &[u32], opts: &RunOptions) -> CliResult<(Vec<Table1Row>, RunManifest)> {
    let start = Instant::now();
    opts.validate()?;
    ensure_dir(&opts.out)?;
    let rows = table1(ns, opts)?;
    let path = opts.out.join("table1.csv");
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|r| vec![r.n.to_string(), fmt_f(r.qfi), fmt_f(r.qfi_over_n2), fmt_f(r.normalized)])
        .collect();
    write_csv(&path, "table1", &["N", "qfi", "qfi_over_N2", "qfi_normalized"], &body)?;
    let m = RunManifest::new("table1").param("N", ns).tolerance("eigen_residual", opts.tol);
    let m = finish(m, vec![path], start, &opts.out)?;
    Ok((rows, m))
}

// ---------------------------------------------------------------- scalars

#[derive(Clone, Debug, Serialize)]
pub struct Scalars {
    pub n: u32,
    pub eta: f64,
    pub c_tilde: f64,
    pub lambda_tilde: f64,
    pub lambda_tilde_printed: f64,
    pub c_tilde_odd_rows: f64,
    pub lambda_tilde_odd_rows: f64,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub max_qfi: f64,
    pub family_sign: char,
    pub family_qfi: f64,
    /// `max_qfi − QFI(near-optimal family)`
    pub family_gap: f64,
    pub psi4_qfi: f64,
    pub psi4_gap: f64,
    /// `ν_B/ν_A` with `F_max` the maximal QFI `(λ_max − λ_min)²`.
    pub run_ratio: f64,
    /// `ν_B/ν_A` with `F_max = λ_max²`, the maximal variance.
    pub run_ratio_max_variance: f64,
}

pub fn scalars(n: u32, eta: f64, tol: f64) -> CliResult<Scalars> {
    let p = pn(n)?;
    let pair = build_term(p, Term::Pair);
    let dec = eigh(&pair, tol)?;
    let (lo, hi) = (dec.ground().0, dec.highest().0);
    let max_qfi = (hi - lo).powi(2);
    let even = tilde_c(n, ConsistencyRows::Even)?;
    let odd = tilde_c(n, ConsistencyRows::Odd)?;
    let sign = twomode::variational::lower_omega(p, even.c_tilde)?;
    let family = near_optimal_family(NearOptimal::A2Even, p, eta)?;
    let family_qfi = 4.0 * pair.variance(&family)?;
    let psi4_qfi = 4.0 * pair.variance(&psi4(p)?)?;
    let family_gap = max_qfi - family_qfi;
    let psi4_gap = max_qfi - psi4_qfi;
    Ok(Scalars {
        n,
        eta,
        c_tilde: even.c_tilde,
        lambda_tilde: even.lambda_tilde,
        lambda_tilde_printed: even.lambda_printed,
        c_tilde_odd_rows: odd.c_tilde,
        lambda_tilde_odd_rows: odd.lambda_tilde,
        lambda_min: lo,
        lambda_max: hi,
        max_qfi,
        family_sign: sign.symbol(),
        family_qfi,
        family_gap,
        psi4_qfi,
        psi4_gap,
        run_ratio: run_ratio(family_gap, psi4_gap, max_qfi)?,
        run_ratio_max_variance: run_ratio(family_gap, psi4_gap, hi * hi)?,
    })
}

pub fn cmd_scalars(n: u32, eta: f64, opts: &RunOptions) -> CliResult<(Scalars, RunManifest)> {
    let start = Instant::now();
    opts.validate()?;
    if n % 2 == 1 || n < 6 {
        return Err(CliError::Validation(format!("scalars needs even N >= 6, got {n}")));
    }
    ensure_dir(&opts.out)?;
    let s = scalars(n, eta, opts.tol)?;
    let path = opts.out.join("scalars.json");
    std::fs::write(&path, serde_json::to_string_pretty(&s)?).map_err(|e| CliError::io(&path, e))?;
    let m = RunManifest::new("scalars").param("N", n).param("eta", eta).tolerance("eigen_residual", opts.tol);
    let m = finish(m, vec![path], start, &opts.out)?;
    Ok((s, m))
}
