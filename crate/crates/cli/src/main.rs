use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use experiments::figures::RunOptions;
use experiments::{CliResult, Sweep, TABLE1_NS};

#[derive(Parser)]
#[command(name = "twomode", version, about = "Regenerate the two-mode metrology figures, table and scalars")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Eigen-residual tolerance.
    #[arg(long, default_value_t = twomode::spectral::DEFAULT_TOL)]
    tol: f64,
    /// Worker threads, 0 for one per core (METRO_THREADS overrides).
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// Also write SVG plots.
    #[arg(long)]
    svg: bool,
}

impl Common {
    fn options(&self) -> RunOptions {
        RunOptions { out: self.out.clone(), svg: self.svg, tol: self.tol, threads: self.threads }
    }
}

#[derive(Args, Clone)]
struct SweepArgs {
    #[arg(long, default_value_t = Sweep::DEFAULT.nmin)]
    nmin: u32,
    #[arg(long, default_value_t = Sweep::DEFAULT.nmax)]
    nmax: u32,
    #[arg(long, default_value_t = Sweep::DEFAULT.step)]
    step: u32,
}

impl SweepArgs {
    fn sweep(&self) -> Sweep {
        Sweep { nmin: self.nmin, nmax: self.nmax, step: self.step }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Pair-tunneling spectrum and gaps.
    Fig1 {
        #[arg(long, default_value_t = 160)]
        n: u32,
        #[command(flatten)]
        common: Common,
    },
    /// Fidelity of ω±(c̃) with the two lowest eigenstates.
    Fig2 {
        #[command(flatten)]
        sweep: SweepArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Infidelity of the |i⟩ ± |−i⟩ coherent pair.
    Fig3 {
        #[command(flatten)]
        sweep: SweepArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Weighted-tunneling ground-state infidelities.
    Fig4 {
        #[command(flatten)]
        sweep: SweepArgs,
        /// Run the optimizer every `opt-step` particles from `nmin`.
        #[arg(long, default_value_t = 8)]
        opt_step: u32,
        /// Dump optimizer traces as CSV.
        #[arg(long)]
        trace: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Normalized QFI of the −2(Jx²−Jy²) ground state.
    Table1 {
        #[arg(long, value_delimiter = ',', default_values_t = TABLE1_NS)]
        n: Vec<u32>,
        #[command(flatten)]
        common: Common,
    },
    /// Headline QFI gaps and run ratio.
    Scalars {
        #[arg(long, default_value_t = 160)]
        n: u32,
        #[arg(long, default_value_t = 0.0)]
        eta: f64,
        #[command(flatten)]
        common: Common,
    },
    /// QFI report for a JSON probe configuration.
    Probe {
        config: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

fn run(cli: Cli) -> CliResult<String> {
    Ok(match cli.command {
        Command::Fig1 { n, common } => {
            let (r, _) = experiments::cmd_fig1(n, &common.options())?;
            format!("fig1: N = {n}, {} eigenvalues, lowest {:.6}", r.eigenvalues.len(), r.eigenvalues[0])
        }
        Command::Fig2 { sweep, common } => {
            let (rows, _) = experiments::cmd_fig2(sweep.sweep(), &common.options())?;
            format!("fig2: {} rows", rows.len())
        }
        Command::Fig3 { sweep, common } => {
            let (rows, _) = experiments::cmd_fig3(sweep.sweep(), &common.options())?;
            format!("fig3: {} rows", rows.len())
        }
        Command::Fig4 { sweep, opt_step, trace, common } => {
            let (rows, _) = experiments::cmd_fig4(sweep.sweep(), opt_step, trace, &common.options())?;
            let flagged = rows.iter().filter(|r| r.optimized.as_ref().is_some_and(|o| !o.converged)).count();
            format!("fig4: {} rows, {flagged} optimizer runs not converged", rows.len())
        }
        Command::Table1 { n, common } => {
            let (rows, _) = experiments::cmd_table1(&n, &common.options())?;
            rows.iter()
                .map(|r| format!("N = {:>3}  QFI/max = {:.4}  QFI/N^2 = {:.4}", r.n, r.normalized, r.qfi_over_n2))
                .collect::<Vec<_>>()
                .join("\n")
        }
        Command::Scalars { n, eta, common } => json(&experiments::cmd_scalars(n, eta, &common.options())?.0)?,
        Command::Probe { config, out } => json(&experiments::cmd_probe(&config, &out)?.0)?,
    })
}

fn json<T: serde::Serialize>(v: &T) -> CliResult<String> {
    Ok(serde_json::to_string_pretty(v)?)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(msg) => {
            println!("{msg}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
