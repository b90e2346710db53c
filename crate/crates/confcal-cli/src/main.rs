//! Experiment CLI for conformal calibration of predictive systems.
//!
//! Exit codes: 0 success, 1 configuration error, 2 I/O error, 3 detected
//! contract violation.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use confcal::datagen::{DriftMode, ToyConfig};
use confcal_cli::{
    emit_report, log_space, run_demo_noniid, run_gen, run_heatmap, run_prop1, run_semionline,
    BaseKind, CliResult, DemoConfig, HeatmapConfig, Prop1Config, Report, SemiOnlineConfig,
    TauMode,
};

#[derive(Parser)]
#[command(
    name = "confcal",
    about = "Conformal calibration experiments: dataset generation, bandwidth sweeps, \
             convergence checks, semi-online uniformity and the miscalibration demo",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DriftArg {
    /// Objects drawn independently from U[-1, 1].
    IidUniform,
    /// Objects drift deterministically along sin(i/50).
    DeterministicDrift,
}

impl From<DriftArg> for DriftMode {
    fn from(v: DriftArg) -> Self {
        match v {
            DriftArg::IidUniform => DriftMode::IidUniform,
            DriftArg::DeterministicDrift => DriftMode::DeterministicDrift,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TauArg {
    /// One independent uniform draw per prediction.
    Random,
    /// τ = 0.5 everywhere (bit-reproducible runs).
    #[value(name = "fixed-0.5", alias = "fixed")]
    Fixed,
}

impl From<TauArg> for TauMode {
    fn from(v: TauArg) -> Self {
        match v {
            TauArg::Random => TauMode::Random,
            TauArg::Fixed => TauMode::Fixed,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BaseArg {
    /// Kernel-smoothed label sigmoids (needs --g/--h).
    Nw,
    /// The toy model's exact conditional distribution.
    Oracle,
    /// The oracle distorted by φ(u) = u².
    Miscalibrated,
}

impl From<BaseArg> for BaseKind {
    fn from(v: BaseArg) -> Self {
        match v {
            BaseArg::Nw => BaseKind::Nw,
            BaseArg::Oracle => BaseKind::Oracle,
            BaseArg::Miscalibrated => BaseKind::Miscalibrated,
        }
    }
}

#[derive(Args)]
struct GridArgs {
    /// Left edge of the label evaluation grid.
    #[arg(long = "grid-lo", default_value_t = -5.0)]
    grid_lo: f64,
    /// Right edge of the label evaluation grid.
    #[arg(long = "grid-hi", default_value_t = 5.0)]
    grid_hi: f64,
    /// Number of grid points.
    #[arg(long = "grid-points", default_value_t = 1001)]
    grid_points: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a toy dataset CSV (header `x,y`).
    Gen {
        /// Number of observations.
        #[arg(long, default_value_t = 2000)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Slope of the conditional mean.
        #[arg(long, default_value_t = 2.0)]
        slope: f64,
        #[arg(long, value_enum, default_value_t = DriftArg::IidUniform)]
        drift: DriftArg,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Bandwidth sweep: mean test CRPS of the kernel system and of its
    /// conformal calibration per (g, h) cell.
    Heatmap {
        /// Object-kernel bandwidths (comma separated). Default: 8 log-spaced
        /// values in [0.01, 1].
        #[arg(long, value_delimiter = ',')]
        g: Vec<f64>,
        /// Label-sigmoid bandwidths (comma separated). Default: 8 log-spaced
        /// values in [0.01, 1].
        #[arg(long, value_delimiter = ',')]
        h: Vec<f64>,
        /// Size of the training sequence proper.
        #[arg(long = "n-train", default_value_t = 2000)]
        n_train: usize,
        #[arg(long = "n-calib", default_value_t = 1000)]
        n_calib: usize,
        #[arg(long = "n-test", default_value_t = 1000)]
        n_test: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long = "tau-mode", value_enum, default_value_t = TauArg::Random)]
        tau_mode: TauArg,
        /// Calibrate by fold-pooled cross-conformal ranks over the whole
        /// training sequence instead of a held-out split.
        #[arg(long)]
        folds: Option<usize>,
        /// Report path (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Convergence of the ideal calibrator: worst sup-discrepancy against the
    /// 1/(n+1) bound, plus the scaled KS statistic of the data transforms.
    Prop1 {
        /// Training sizes (comma separated).
        #[arg(long, value_delimiter = ',', default_value = "10,100,1000")]
        n: Vec<usize>,
        #[arg(long, default_value_t = 50)]
        replications: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Probe levels across (0, 1).
        #[arg(long = "t-points", default_value_t = 1024)]
        t_points: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Semi-online protocol: sequential test transforms, their KS distance
    /// from uniformity and the asymptotic p-value.
    Semionline {
        #[arg(long = "n-train", default_value_t = 1000)]
        n_train: usize,
        #[arg(long = "n-calib", default_value_t = 1000)]
        n_calib: usize,
        #[arg(long = "n-test", default_value_t = 1000)]
        n_test: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = BaseArg::Nw)]
        base: BaseArg,
        /// Object-kernel bandwidth for the kernel base.
        #[arg(long, default_value_t = 0.1)]
        g: f64,
        /// Label-sigmoid bandwidth for the kernel base.
        #[arg(long, default_value_t = 0.1)]
        h: f64,
        #[arg(long, value_enum, default_value_t = DriftArg::IidUniform)]
        drift: DriftArg,
        #[arg(long = "tau-mode", value_enum, default_value_t = TauArg::Random)]
        tau_mode: TauArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Drifting-data demo: the miscalibrated oracle stays poor while its
    /// conformal calibration approaches the oracle's CRPS.
    DemoNoniid {
        /// Calibration sizes (comma separated).
        #[arg(long = "n-calib", value_delimiter = ',', default_value = "0,10,100,1000")]
        n_calib: Vec<usize>,
        #[arg(long = "n-test", default_value_t = 1000)]
        n_test: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long = "tau-mode", value_enum, default_value_t = TauArg::Random)]
        tau_mode: TauArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Gen { n, seed, slope, drift, out } => {
            let config =
                ToyConfig { n, seed, slope, drift: drift.into() };
            run_gen(&config, &out)
        }
        Command::Heatmap {
            g,
            h,
            n_train,
            n_calib,
            n_test,
            seed,
            grid,
            tau_mode,
            folds,
            out,
        } => {
            let config = HeatmapConfig {
                g_values: if g.is_empty() { log_space(0.01, 1.0, 8) } else { g },
                h_values: if h.is_empty() { log_space(0.01, 1.0, 8) } else { h },
                n_train_proper: n_train,
                n_calib,
                n_test,
                seed,
                grid_lo: grid.grid_lo,
                grid_hi: grid.grid_hi,
                grid_points: grid.grid_points,
                tau_mode: tau_mode.into(),
                folds,
            };
            let (results, warnings) = run_heatmap(&config)?;
            emit_report(
                &Report { command: "heatmap".into(), config, results, warnings },
                out.as_deref(),
            )
        }
        Command::Prop1 { n, replications, seed, t_points, out } => {
            let config = Prop1Config { n_list: n, replications, seed, t_points };
            let results = run_prop1(&config)?;
            emit_report(
                &Report { command: "prop1".into(), config, results, warnings: vec![] },
                out.as_deref(),
            )
        }
        Command::Semionline {
            n_train,
            n_calib,
            n_test,
            seed,
            base,
            g,
            h,
            drift,
            tau_mode,
            out,
        } => {
            let config = SemiOnlineConfig {
                n_train_proper: n_train,
                n_calib,
                n_test,
                seed,
                base: base.into(),
                g,
                h,
                drift: drift.into(),
                tau_mode: tau_mode.into(),
            };
            let results = run_semionline(&config)?;
            emit_report(
                &Report { command: "semionline".into(), config, results, warnings: vec![] },
                out.as_deref(),
            )
        }
        Command::DemoNoniid { n_calib, n_test, seed, grid, tau_mode, out } => {
            let config = DemoConfig {
                n_calib_list: n_calib,
                n_test,
                seed,
                grid_lo: grid.grid_lo,
                grid_hi: grid.grid_hi,
                grid_points: grid.grid_points,
                tau_mode: tau_mode.into(),
            };
            let (results, warnings) = run_demo_noniid(&config)?;
            emit_report(
                &Report { command: "demo-noniid".into(), config, results, warnings },
                out.as_deref(),
            )
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            // Malformed invocation: a configuration error.
            eprint!("{e}");
            return ExitCode::from(1);
        }
        Err(e) => {
            // --help / --version.
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
