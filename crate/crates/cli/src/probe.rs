//! End-to-end probe evaluation from a JSON configuration.

use std::path::Path;
use std::time::Instant;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use twomode::fock_dicke::{
    assemble_hamiltonian, build_term, couplings_from_overlaps, spin_along, BandedHermitian, CouplingSet,
    DickeVector, ModeOverlaps, ParticleNumber, Term,
};
use twomode::metrology::{fragmentation, optimal_superposition, qfi_pure, sld, FragmentationReport, QFIReport};
use twomode::spectral::{eigh, DEFAULT_TOL};
use twomode::states::{
    antipodal_superposition, coherent, coherent_pair_y, noon, omega, psi4, psi_theta_phi, psi_v01, xi_pair,
    OmegaSign, SpherePoint,
};
use twomode::variational::{near_optimal_family, tilde_c, ConsistencyRows, NearOptimal};

use crate::output::{ensure_dir, RunManifest};
use crate::{CliError, CliResult};

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeConfig {
    pub n: u32,
    #[serde(default)]
    pub couplings: Option<CouplingSet>,
    #[serde(default)]
    pub overlaps: Option<ModeOverlaps>,
    pub state: StateSpec,
    pub generator: GeneratorSpec,
    #[serde(default = "one")]
    pub nu: f64,
    #[serde(default)]
    pub sld: bool,
    #[serde(default)]
    pub fragmentation: bool,
}

fn one() -> f64 {
    1.0
}

/// A term name, `"hamiltonian"` for the assembled couplings, or a spin
/// direction `{"spin": [x, y, z]}`.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(untagged)]
pub enum GeneratorSpec {
    Named(String),
    Spin { spin: [f64; 3] },
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StateSpec {
    Noon { phi: f64 },
    Coherent { theta: f64, phi: f64 },
    Antipodal { theta: f64, phi: f64, eta: f64 },
    PsiThetaPhi { theta: f64, phi: f64 },
    PsiV01 { theta: f64, phi: f64, eta: f64 },
    /// `c` defaults to the variational `c̃`.
    Omega { sign: OmegaSign, #[serde(default)] c: Option<f64> },
    Xi { w: [f64; 2], z: [f64; 2] },
    Psi4,
    CoherentPairY { sign: OmegaSign },
    NearOptimal { family: NearOptimal, eta: f64 },
    /// `(|λ_min⟩ + e^{iη}|λ_max⟩)/√2` of the generator.
    Optimal { eta: f64 },
    /// Ground state of the assembled Hamiltonian.
    Ground,
    Amplitudes { re: Vec<f64>, #[serde(default)] im: Option<Vec<f64>> },
}

#[derive(Clone, Debug, Serialize)]
pub struct SldReport {
    pub eigenvalues: [f64; 2],
    /// `[re, im]` amplitude pairs.
    pub projectors: [Vec<[f64; 2]>; 2],
}

#[derive(Clone, Debug, Serialize)]
pub struct ProbeReport {
    pub n: u32,
    pub couplings: Option<CouplingSet>,
    pub qfi: QFIReport,
    pub nu: f64,
    pub qcr: f64,
    pub sld: Option<SldReport>,
    pub fragmentation: Option<FragmentationReport>,
}

impl ProbeConfig {
    pub fn from_json(s: &str) -> CliResult<Self> {
        let cfg: ProbeConfig =
            serde_json::from_str(s).map_err(|e| CliError::Validation(format!("probe config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> CliResult<()> {
        ParticleNumber::new(self.n).map_err(|e| CliError::Validation(format!("n: {e}")))?;
        if self.couplings.is_some() && self.overlaps.is_some() {
            return Err(CliError::Validation("give either couplings or overlaps, not both".into()));
        }
        if let Some(c) = &self.couplings {
            c.validate().map_err(|e| CliError::Validation(format!("couplings: {e}")))?;
        }
        if let Some(o) = &self.overlaps {
            o.validate().map_err(|e| CliError::Validation(format!("overlaps: {e}")))?;
        }
        if !(self.nu > 0.0 && self.nu.is_finite()) {
            return Err(CliError::Validation(format!("nu: must be positive, got {}", self.nu)));
        }
        Ok(())
    }

    fn coupling_set(&self) -> Option<CouplingSet> {
        self.couplings.or_else(|| self.overlaps.as_ref().map(couplings_from_overlaps))
    }

    fn hamiltonian(&self, n: ParticleNumber) -> CliResult<BandedHermitian> {
        let c = self.coupling_set().ok_or_else(|| {
            CliError::Validation("couplings or overlaps are required for the hamiltonian".into())
        })?;
        Ok(assemble_hamiltonian(n, &c))
    }

    fn generator(&self, n: ParticleNumber) -> CliResult<BandedHermitian> {
        match &self.generator {
            GeneratorSpec::Named(s) if s == "hamiltonian" => self.hamiltonian(n),
            GeneratorSpec::Named(s) => {
                let t: Term = s.parse().map_err(|e| CliError::Validation(format!("generator: {e}")))?;
                Ok(build_term(n, t))
            }
            GeneratorSpec::Spin { spin } => {
                let len = spin.iter().map(|x| x * x).sum::<f64>().sqrt();
                if !(len > 0.0 && len.is_finite()) {
                    return Err(CliError::Validation("generator.spin: needs a nonzero finite vector".into()));
                }
                Ok(spin_along(n, spin.map(|x| x / len)))
            }
        }
    }

    fn state(&self, n: ParticleNumber, gen: &BandedHermitian) -> CliResult<DickeVector> {
        let v = match &self.state {
            StateSpec::Noon { phi } => noon(n, *phi),
            StateSpec::Coherent { theta, phi } => coherent(n, SpherePoint::from_angles(*theta, *phi)),
            StateSpec::Antipodal { theta, phi, eta } => {
                antipodal_superposition(n, SpherePoint::from_angles(*theta, *phi), *eta)
            }
            StateSpec::PsiThetaPhi { theta, phi } => psi_theta_phi(n, *theta, *phi),
            StateSpec::PsiV01 { theta, phi, eta } => psi_v01(n, *theta, *phi, *eta)?,
            StateSpec::Omega { sign, c } => {
                let c = match c {
                    Some(c) => *c,
                    None => tilde_c(n.get(), ConsistencyRows::Even)?.c_tilde,
                };
                omega(n, c, *sign)?
            }
            StateSpec::Xi { w, z } => xi_pair(n, C64::new(w[0], w[1]), C64::new(z[0], z[1]))?,
            StateSpec::Psi4 => psi4(n)?,
            StateSpec::CoherentPairY { sign } => coherent_pair_y(n, *sign)?,
            StateSpec::NearOptimal { family, eta } => near_optimal_family(*family, n, *eta)?,
            StateSpec::Optimal { eta } => optimal_superposition(&eigh(gen, DEFAULT_TOL)?, *eta),
            StateSpec::Ground => eigh(&self.hamiltonian(n)?, DEFAULT_TOL)?.ground().1.clone(),
            StateSpec::Amplitudes { re, im } => {
                let im = im.clone().unwrap_or_else(|| vec![0.0; re.len()]);
                if im.len() != re.len() {
                    return Err(CliError::Validation(format!(
                        "state.im: length {} differs from state.re length {}",
                        im.len(),
                        re.len()
                    )));
                }
                DickeVector::new(n, re.iter().zip(&im).map(|(a, b)| C64::new(*a, *b)).collect())
                    .map_err(|e| CliError::Validation(format!("state.re: {e}")))?
            }
        };
        Ok(v)
    }
}

pub fn run_probe(cfg: &ProbeConfig) -> CliResult<ProbeReport> {
    cfg.validate()?;
    let n = ParticleNumber::new(cfg.n)?;
    let gen = cfg.generator(n)?;
    let v = cfg.state(n, &gen)?;
    let qfi = qfi_pure(&v, &gen)?;
    let sld = if cfg.sld {
        let m = sld(&v, &gen)?;
        let amps = |d: &DickeVector| d.amplitudes().iter().map(|c| [c.re, c.im]).collect();
        Some(SldReport { eigenvalues: m.eigenvalues, projectors: [amps(&m.projectors[0]), amps(&m.projectors[1])] })
    } else {
        None
    };
    Ok(ProbeReport {
        n: cfg.n,
        couplings: cfg.coupling_set(),
        qcr: qfi.qcr_bound(cfg.nu),
        qfi,
        nu: cfg.nu,
        sld,
        fragmentation: cfg.fragmentation.then(|| fragmentation(&v)),
    })
}

/// Reads the configuration, writes `probe.json` and the manifest.
pub fn cmd_probe(config: &Path, out: &Path) -> CliResult<(ProbeReport, RunManifest)> {
    let start = Instant::now();
    let text = std::fs::read_to_string(config).map_err(|e| CliError::io(config, e))?;
    let cfg = ProbeConfig::from_json(&text)?;
    ensure_dir(out)?;
    let report = run_probe(&cfg)?;
    let path = out.join("probe.json");
    std::fs::write(&path, serde_json::to_string_pretty(&report)?).map_err(|e| CliError::io(&path, e))?;
    let mut m = RunManifest::new("probe").param("config", &cfg);
    m.outputs = vec![path];
    m.wall_time = start.elapsed().as_secs_f64();
    m.write(out)?;
    Ok((report, m))
}
