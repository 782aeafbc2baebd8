//! Figure, table and scalar regeneration for the two-mode metrology toolkit.

pub mod figures;
pub mod output;
pub mod probe;

use std::path::PathBuf;

use thiserror::Error;

pub use figures::{
    cmd_fig1, cmd_fig2, cmd_fig3, cmd_fig4, cmd_scalars, cmd_table1, Fig1Result, Fig2Row, Fig3Row, Fig4Row,
    RunOptions, Scalars, Table1Row,
};
pub use output::RunManifest;
pub use probe::{cmd_probe, ProbeConfig, ProbeReport};

pub const TABLE1_NS: [u32; 6] = [4, 36, 68, 100, 132, 160];

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid input: {0}")]
    Validation(String),
    #[error("numerical failure: {0}")]
    NonConvergence(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) | CliError::Json(_) => 2,
            CliError::NonConvergence(_) => 3,
            CliError::Io { .. } | CliError::Csv(_) => 1,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }
}

impl From<twomode::Error> for CliError {
    fn from(e: twomode::Error) -> Self {
        match e {
            twomode::Error::NonConvergence { .. } => CliError::NonConvergence(e.to_string()),
            other => CliError::Validation(other.to_string()),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Inclusive even-`N` sweep.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Sweep {
    pub nmin: u32,
    pub nmax: u32,
    pub step: u32,
}

impl Sweep {
    pub const DEFAULT: Sweep = Sweep { nmin: 8, nmax: 160, step: 4 };

    pub fn validate(&self) -> CliResult<()> {
        if self.step == 0 || self.step % 2 == 1 {
            return Err(CliError::Validation(format!("--step must be positive and even, got {}", self.step)));
        }
        if self.nmin % 2 == 1 || self.nmax % 2 == 1 {
            return Err(CliError::Validation(format!(
                "--nmin and --nmax must be even, got {} and {}",
                self.nmin, self.nmax
            )));
        }
        if self.nmin > self.nmax {
            return Err(CliError::Validation(format!("--nmin {} exceeds --nmax {}", self.nmin, self.nmax)));
        }
        if self.nmax > twomode::fock_dicke::MAX_PARTICLES {
            return Err(CliError::Validation(format!(
                "--nmax {} exceeds {}",
                self.nmax,
                twomode::fock_dicke::MAX_PARTICLES
            )));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<u32> {
        (self.nmin..=self.nmax).step_by(self.step as usize).collect()
    }
}

/// Thread pool for row-parallel sweeps; `METRO_THREADS` wins over `threads`.
/// Zero means one thread per core.
pub fn thread_pool(threads: usize) -> CliResult<rayon::ThreadPool> {
    let n = match std::env::var("METRO_THREADS") {
        Ok(s) => s
            .trim()
            .parse::<usize>()
            .map_err(|_| CliError::Validation(format!("METRO_THREADS must be an integer, got '{s}'")))?,
        Err(_) => threads,
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build()
        .map_err(|e| CliError::Validation(format!("thread pool: {e}")))
}
