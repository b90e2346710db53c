//! Experiment drivers behind the `confcal` binary.
//!
//! Every run is a pure function of its configuration: datasets come from the
//! seeded generators, τ draws from their dedicated substream, and per-task
//! seeds are derived with a splitmix chain, so results are independent of
//! scheduling. Reports share one envelope: `{command, config, results,
//! warnings}`.

// Validation deliberately writes `!(x > 0.0)` so NaN fails the check too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use confcal::calibrate::{scps_pvalue_sorted, FoldSpec, SplitSpec};
use confcal::datagen::{gen_taus, gen_toy, write_csv, DriftMode, ToyConfig};
use confcal::evaluate::{
    crps, kolmogorov_cdf, kolmogorov_quantile, ks_statistic, prop1_check, semi_online_pits,
    PitSample,
};
use confcal::numeric::eval_on_grid;
use confcal::predictors::{
    nw_evaluate, MiscalibratedSystem, NwGridEvaluator, NwParams, NwSystem, OracleParams,
    OracleSystem,
};
use confcal::types::{ConditionalDistribution, DistributionEvaluation, LabeledSequence};

/// Experiment-level errors, mapped onto the binary's exit codes.
#[derive(Debug)]
pub enum CliError {
    /// Invalid configuration (exit code 1).
    Config(String),
    /// I/O failure (exit code 2).
    Io(String),
    /// A predictive-system contract was breached mid-run (exit code 3).
    Contract(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "configuration error: {msg}"),
            CliError::Io(msg) => write!(f, "io error: {msg}"),
            CliError::Contract(msg) => write!(f, "contract violation: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Io(_) => 2,
            CliError::Contract(_) => 3,
        }
    }
}

impl From<confcal::Error> for CliError {
    fn from(e: confcal::Error) -> Self {
        match e {
            confcal::Error::InvalidArgument(msg) => CliError::Config(msg),
            confcal::Error::Io(e) => CliError::Io(e.to_string()),
            other => CliError::Contract(other.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Report envelope shared by all subcommands.
#[derive(Debug, Serialize)]
pub struct Report<C: Serialize, R: Serialize> {
    pub command: String,
    pub config: C,
    pub results: R,
    pub warnings: Vec<String>,
}

/// How τ is chosen for each prediction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TauMode {
    /// One independent uniform draw per test observation.
    Random,
    /// τ = 0.5 everywhere, for bit-reproducible regression runs.
    Fixed,
}

fn taus_for(mode: TauMode, seed: u64, count: usize) -> Vec<f64> {
    match mode {
        TauMode::Random => gen_taus(seed, count),
        TauMode::Fixed => vec![0.5; count],
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a task seed from the run seed and a tag path; stable across runs
/// and independent of scheduling.
pub fn derive_seed(base: u64, tags: &[u64]) -> u64 {
    let mut state = splitmix64(base);
    for &tag in tags {
        state = splitmix64(state ^ splitmix64(tag));
    }
    state
}

pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1).max(1) as f64).collect()
}

/// Logarithmically spaced values, endpoints included.
pub fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    linspace(lo.ln(), hi.ln(), n).into_iter().map(f64::exp).collect()
}

// ---------------------------------------------------------------------------
// gen
// ---------------------------------------------------------------------------

/// Writes the toy dataset CSV for `config` to `out`.
pub fn run_gen(config: &ToyConfig, out: &Path) -> CliResult<()> {
    let data = gen_toy(config);
    let file = std::fs::File::create(out)
        .map_err(|e| CliError::Io(format!("cannot create {}: {e}", out.display())))?;
    let mut w = std::io::BufWriter::new(file);
    write_csv(&mut w, &data).map_err(|e| CliError::Io(e.to_string()))?;
    w.flush().map_err(|e| CliError::Io(e.to_string()))?;
    Ok(())
}

// ---------------------------------------------------------------------------
// heatmap
// ---------------------------------------------------------------------------

/// Bandwidth sweep of the kernel predictive system against its
/// split-conformal calibration.
#[derive(Debug, Clone, Serialize)]
pub struct HeatmapConfig {
    pub g_values: Vec<f64>,
    pub h_values: Vec<f64>,
    pub n_train_proper: usize,
    pub n_calib: usize,
    pub n_test: usize,
    pub seed: u64,
    pub grid_lo: f64,
    pub grid_hi: f64,
    pub grid_points: usize,
    pub tau_mode: TauMode,
    /// When set, calibrate by fold-pooled cross-conformal ranks over the
    /// whole training sequence instead of a held-out split.
    pub folds: Option<usize>,
}

impl Default for HeatmapConfig {
    fn default() -> Self {
        HeatmapConfig {
            g_values: log_space(0.01, 1.0, 8),
            h_values: log_space(0.01, 1.0, 8),
            n_train_proper: 2000,
            n_calib: 1000,
            n_test: 1000,
            seed: 1,
            grid_lo: -5.0,
            grid_hi: 5.0,
            grid_points: 1001,
            tau_mode: TauMode::Random,
            folds: None,
        }
    }
}

impl HeatmapConfig {
    fn validate(&self) -> CliResult<()> {
        if self.g_values.is_empty() || self.h_values.is_empty() {
            return Err(CliError::Config("bandwidth lists must be nonempty".into()));
        }
        if let Some(&b) = self.g_values.iter().chain(&self.h_values).find(|&&b| !(b > 0.0)) {
            return Err(CliError::Config(format!("bandwidths must be positive, got {b}")));
        }
        if self.n_train_proper < 1 || self.n_calib < 1 || self.n_test < 1 {
            return Err(CliError::Config("all sample counts must be at least 1".into()));
        }
        if !(self.grid_lo < self.grid_hi) || self.grid_points < 2 {
            return Err(CliError::Config(format!(
                "need grid_lo < grid_hi and at least 2 grid points, got [{}, {}] with {}",
                self.grid_lo, self.grid_hi, self.grid_points
            )));
        }
        if let Some(k) = self.folds {
            if k < 2 {
                return Err(CliError::Config(format!("cross-conformal needs at least 2 folds, got {k}")));
            }
            if k > self.n_train_proper + self.n_calib {
                return Err(CliError::Config("more folds than training observations".into()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct HeatmapCell {
    pub g: f64,
    pub h: f64,
    pub crps_base: f64,
    pub crps_calibrated: f64,
}

#[derive(Debug, Serialize)]
pub struct HeatmapResults {
    pub cells: Vec<HeatmapCell>,
    /// Fraction of (g, h) cells where calibration did not hurt the mean CRPS.
    pub improvement_fraction: f64,
}

struct CellOutcome {
    cell: HeatmapCell,
    width_warnings: usize,
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

fn heatmap_cell_split(
    g: f64,
    h: f64,
    proper: &LabeledSequence,
    calib: &[confcal::Observation],
    tests: &[confcal::Observation],
    taus: &[f64],
    grid: &[f64],
) -> CliResult<CellOutcome> {
    let params = NwParams::new(g, h)?;
    let evaluator = NwGridEvaluator::new(proper, grid, params)?;
    let mut scores: Vec<f64> = calib
        .iter()
        .map(|obs| nw_evaluate(proper, obs.x, obs.y, &params))
        .collect::<confcal::Result<_>>()?;
    scores.sort_unstable_by(f64::total_cmp);

    let mut crps_base = Vec::with_capacity(tests.len());
    let mut crps_cal = Vec::with_capacity(tests.len());
    let mut width_warnings = 0usize;
    for (obs, &tau) in tests.iter().zip(taus) {
        let base_values = evaluator.distribution(obs.x);
        let calibrated: Vec<f64> =
            base_values.iter().map(|&v| scps_pvalue_sorted(&scores, v, tau)).collect();
        let base_dist = DistributionEvaluation::new(grid.to_vec(), base_values)?;
        let cal_dist = DistributionEvaluation::new(grid.to_vec(), calibrated)?;
        let b = crps(&base_dist, obs.y)?;
        let c = crps(&cal_dist, obs.y)?;
        width_warnings += usize::from(b.width_warning) + usize::from(c.width_warning);
        crps_base.push(b.value);
        crps_cal.push(c.value);
    }
    Ok(CellOutcome {
        cell: HeatmapCell { g, h, crps_base: mean(&crps_base), crps_calibrated: mean(&crps_cal) },
        width_warnings,
    })
}

fn heatmap_cell_cross(
    g: f64,
    h: f64,
    train: &LabeledSequence,
    folds: &FoldSpec,
    tests: &[confcal::Observation],
    taus: &[f64],
    grid: &[f64],
) -> CliResult<CellOutcome> {
    let params = NwParams::new(g, h)?;
    let n = train.len();
    let full_evaluator = NwGridEvaluator::new(train, grid, params)?;

    // Pooled below/equal counts per (test, grid) accumulated fold by fold so
    // only one fold's sigmoid matrix is alive at a time.
    let mut below = vec![0u32; tests.len() * grid.len()];
    let mut equal = vec![0u32; tests.len() * grid.len()];
    for fold in 0..folds.fold_count() {
        let complement: Vec<confcal::Observation> = train
            .iter()
            .zip(folds.assignment())
            .filter_map(|(obs, &f)| (f != fold).then_some(*obs))
            .collect();
        let members: Vec<confcal::Observation> = train
            .iter()
            .zip(folds.assignment())
            .filter_map(|(obs, &f)| (f == fold).then_some(*obs))
            .collect();
        let complement = LabeledSequence::new(complement);
        let fold_evaluator = NwGridEvaluator::new(&complement, grid, params)?;
        let mut fold_scores: Vec<f64> = members
            .iter()
            .map(|obs| nw_evaluate(&complement, obs.x, obs.y, &params))
            .collect::<confcal::Result<_>>()?;
        fold_scores.sort_unstable_by(f64::total_cmp);
        for (t, obs) in tests.iter().enumerate() {
            let dist = fold_evaluator.distribution(obs.x);
            let row = &mut below[t * grid.len()..(t + 1) * grid.len()];
            let row_eq = &mut equal[t * grid.len()..(t + 1) * grid.len()];
            for (i, &v) in dist.iter().enumerate() {
                let b = fold_scores.partition_point(|&s| s < v);
                let be = fold_scores.partition_point(|&s| s <= v);
                row[i] += b as u32;
                row_eq[i] += (be - b) as u32;
            }
        }
    }

    let mut crps_base = Vec::with_capacity(tests.len());
    let mut crps_cal = Vec::with_capacity(tests.len());
    let mut width_warnings = 0usize;
    for (t, (obs, &tau)) in tests.iter().zip(taus).enumerate() {
        let base_values = full_evaluator.distribution(obs.x);
        let calibrated: Vec<f64> = (0..grid.len())
            .map(|i| {
                let b = below[t * grid.len() + i] as f64;
                let e = equal[t * grid.len() + i] as f64;
                (b + tau * e + tau) / (n + 1) as f64
            })
            .collect();
        let base_dist = DistributionEvaluation::new(grid.to_vec(), base_values)?;
        let cal_dist = DistributionEvaluation::new(grid.to_vec(), calibrated)?;
        let b = crps(&base_dist, obs.y)?;
        let c = crps(&cal_dist, obs.y)?;
        width_warnings += usize::from(b.width_warning) + usize::from(c.width_warning);
        crps_base.push(b.value);
        crps_cal.push(c.value);
    }
    Ok(CellOutcome {
        cell: HeatmapCell { g, h, crps_base: mean(&crps_base), crps_calibrated: mean(&crps_cal) },
        width_warnings,
    })
}

/// Runs the bandwidth-sweep experiment. Cells are independent parallel tasks;
/// the output is ordered by (g, h) regardless of scheduling.
pub fn run_heatmap(config: &HeatmapConfig) -> CliResult<(HeatmapResults, Vec<String>)> {
    config.validate()?;
    let total_train = config.n_train_proper + config.n_calib;
    let data = gen_toy(&ToyConfig::new(total_train + config.n_test, config.seed));
    let (train, tests) = data.split_proper(total_train)?;
    let train = LabeledSequence::new(train.to_vec());
    let (proper_slice, calib) = train.split_proper(config.n_train_proper)?;
    let proper = LabeledSequence::new(proper_slice.to_vec());
    let taus = taus_for(config.tau_mode, config.seed, config.n_test);
    let grid = linspace(config.grid_lo, config.grid_hi, config.grid_points);

    let fold_spec = match config.folds {
        Some(k) => Some(FoldSpec::contiguous(train.len(), k).map_err(CliError::from)?),
        None => None,
    };

    let mut jobs: Vec<(f64, f64)> = Vec::new();
    for &g in &config.g_values {
        for &h in &config.h_values {
            jobs.push((g, h));
        }
    }
    let outcomes: Vec<CliResult<CellOutcome>> = jobs
        .par_iter()
        .map(|&(g, h)| match &fold_spec {
            None => heatmap_cell_split(g, h, &proper, calib, tests, &taus, &grid),
            Some(folds) => heatmap_cell_cross(g, h, &train, folds, tests, &taus, &grid),
        })
        .collect();

    let mut cells = Vec::with_capacity(outcomes.len());
    let mut width_warnings = 0usize;
    for outcome in outcomes {
        let outcome = outcome?;
        cells.push(outcome.cell);
        width_warnings += outcome.width_warnings;
    }
    cells.sort_by(|a, b| a.g.total_cmp(&b.g).then(a.h.total_cmp(&b.h)));

    let improved = cells.iter().filter(|c| c.crps_calibrated <= c.crps_base).count();
    let mut warnings = Vec::new();
    if width_warnings > 0 {
        warnings.push(format!(
            "{width_warnings} CRPS evaluations hit the grid-width warning; consider widening \
             [--grid-lo, --grid-hi]"
        ));
    }
    Ok((
        HeatmapResults {
            improvement_fraction: improved as f64 / cells.len() as f64,
            cells,
        },
        warnings,
    ))
}

// ---------------------------------------------------------------------------
// prop1
// ---------------------------------------------------------------------------

/// Convergence experiment for the ideal calibrator.
#[derive(Debug, Clone, Serialize)]
pub struct Prop1Config {
    pub n_list: Vec<usize>,
    pub replications: usize,
    pub seed: u64,
    pub t_points: usize,
}

impl Default for Prop1Config {
    fn default() -> Self {
        Prop1Config { n_list: vec![10, 100, 1000], replications: 50, seed: 1, t_points: 1024 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Prop1Entry {
    pub n: usize,
    pub replications: usize,
    /// Worst sup-discrepancy across replications and τ ∈ {0, 0.5, 1}.
    pub max_sup_discrepancy: f64,
    pub bound: f64,
    pub pass: bool,
    pub median_scaled_ks: f64,
    /// Median of the Kolmogorov distribution, for comparison with
    /// `median_scaled_ks` at large n.
    pub kolmogorov_median: f64,
}

pub fn run_prop1(config: &Prop1Config) -> CliResult<Vec<Prop1Entry>> {
    if config.n_list.is_empty() || config.n_list.iter().any(|&n| n < 1) {
        return Err(CliError::Config("every n must be at least 1".into()));
    }
    if config.replications < 1 {
        return Err(CliError::Config("need at least one replication".into()));
    }
    if config.t_points < 1 {
        return Err(CliError::Config("need at least one probe level".into()));
    }
    let oracle = OracleSystem::new(OracleParams::default());
    let t_grid: Vec<f64> =
        (1..=config.t_points).map(|i| i as f64 / (config.t_points + 1) as f64).collect();
    let kolmogorov_median = kolmogorov_quantile(0.5)?;

    let mut entries = Vec::with_capacity(config.n_list.len());
    for &n in &config.n_list {
        let reps: Vec<CliResult<(f64, f64)>> = (0..config.replications)
            .into_par_iter()
            .map(|rep| {
                let rep_seed = derive_seed(config.seed, &[n as u64, rep as u64]);
                // One extra observation supplies the test object.
                let full = gen_toy(&ToyConfig::new(n + 1, rep_seed));
                let (data_slice, test) = full.split_proper(n)?;
                let data = LabeledSequence::new(data_slice.to_vec());
                let x = test[0].x;
                let mut worst = 0.0f64;
                let mut scaled_ks = 0.0;
                for &tau in &[0.0, 0.5, 1.0] {
                    let report = prop1_check(&oracle, &data, x, tau, &t_grid)?;
                    worst = worst.max(report.sup_discrepancy);
                    scaled_ks = report.scaled_ks;
                }
                Ok((worst, scaled_ks))
            })
            .collect();

        let mut max_sup = 0.0f64;
        let mut ks_values = Vec::with_capacity(config.replications);
        for rep in reps {
            let (worst, ks) = rep?;
            max_sup = max_sup.max(worst);
            ks_values.push(ks);
        }
        ks_values.sort_unstable_by(f64::total_cmp);
        let mid = ks_values.len() / 2;
        let median_scaled_ks = if ks_values.len() % 2 == 1 {
            ks_values[mid]
        } else {
            0.5 * (ks_values[mid - 1] + ks_values[mid])
        };
        let bound = 1.0 / (n + 1) as f64;
        entries.push(Prop1Entry {
            n,
            replications: config.replications,
            max_sup_discrepancy: max_sup,
            bound,
            pass: max_sup <= bound + 1e-12,
            median_scaled_ks,
            kolmogorov_median,
        });
    }
    Ok(entries)
}

// ---------------------------------------------------------------------------
// semionline
// ---------------------------------------------------------------------------

/// Base system used by the semi-online run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BaseKind {
    Nw,
    Oracle,
    Miscalibrated,
}

/// Sequential-prediction experiment checking that the calibrated transforms
/// are uniform.
#[derive(Debug, Clone, Serialize)]
pub struct SemiOnlineConfig {
    pub n_train_proper: usize,
    pub n_calib: usize,
    pub n_test: usize,
    pub seed: u64,
    pub base: BaseKind,
    pub g: f64,
    pub h: f64,
    pub drift: DriftMode,
    pub tau_mode: TauMode,
}

impl Default for SemiOnlineConfig {
    fn default() -> Self {
        SemiOnlineConfig {
            n_train_proper: 1000,
            n_calib: 1000,
            n_test: 1000,
            seed: 1,
            base: BaseKind::Nw,
            g: 0.1,
            h: 0.1,
            drift: DriftMode::IidUniform,
            tau_mode: TauMode::Random,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct SemiOnlineResults {
    pub pits: Vec<f64>,
    pub ks: f64,
    pub p_value: f64,
}

pub fn run_semionline(config: &SemiOnlineConfig) -> CliResult<SemiOnlineResults> {
    if config.n_test < 1 {
        return Err(CliError::Config("need at least one test observation".into()));
    }
    if config.base == BaseKind::Nw && config.n_train_proper < 1 {
        return Err(CliError::Config(
            "the kernel base needs a nonempty training sequence proper".into(),
        ));
    }
    let total = config.n_train_proper + config.n_calib + config.n_test;
    let data = gen_toy(&ToyConfig::new(total, config.seed).with_drift(config.drift));
    let (train, tests) = data.split_proper(config.n_train_proper + config.n_calib)?;
    let train = LabeledSequence::new(train.to_vec());
    let tests = LabeledSequence::new(tests.to_vec());
    let taus = taus_for(config.tau_mode, config.seed, config.n_test);
    let split = SplitSpec::new(config.n_train_proper);

    let pits = match config.base {
        BaseKind::Nw => {
            let base = NwSystem::new(NwParams::new(config.g, config.h)?);
            semi_online_pits(&base, &train, split, &tests, &taus)?
        }
        BaseKind::Oracle => {
            let base = OracleSystem::new(OracleParams::default());
            semi_online_pits(&base, &train, split, &tests, &taus)?
        }
        BaseKind::Miscalibrated => {
            let base = MiscalibratedSystem::squared(OracleParams::default());
            semi_online_pits(&base, &train, split, &tests, &taus)?
        }
    };
    let ks = ks_statistic(&pits)?;
    let p_value = 1.0 - kolmogorov_cdf((config.n_test as f64).sqrt() * ks);
    Ok(SemiOnlineResults { pits: pits.values().to_vec(), ks, p_value })
}

// ---------------------------------------------------------------------------
// demo-noniid
// ---------------------------------------------------------------------------

/// Calibrating a deliberately miscalibrated oracle on drifting data.
#[derive(Debug, Clone, Serialize)]
pub struct DemoConfig {
    pub n_calib_list: Vec<usize>,
    pub n_test: usize,
    pub seed: u64,
    pub grid_lo: f64,
    pub grid_hi: f64,
    pub grid_points: usize,
    pub tau_mode: TauMode,
}

impl Default for DemoConfig {
    fn default() -> Self {
        DemoConfig {
            n_calib_list: vec![0, 10, 100, 1000],
            n_test: 1000,
            seed: 1,
            grid_lo: -5.0,
            grid_hi: 5.0,
            grid_points: 1001,
            tau_mode: TauMode::Random,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct DemoEntry {
    pub n_calib: usize,
    pub crps_oracle: f64,
    pub crps_miscalibrated: f64,
    pub crps_conformalized: f64,
    /// Conformalizing the oracle itself; agrees with `crps_conformalized`
    /// because strictly increasing score distortions cannot change conformal
    /// output.
    pub crps_conformalized_oracle: f64,
}

pub fn run_demo_noniid(config: &DemoConfig) -> CliResult<(Vec<DemoEntry>, Vec<String>)> {
    if config.n_test < 1 {
        return Err(CliError::Config("need at least one test observation".into()));
    }
    if !(config.grid_lo < config.grid_hi) || config.grid_points < 2 {
        return Err(CliError::Config("invalid evaluation grid".into()));
    }
    let params = OracleParams::default();
    let oracle = OracleSystem::new(params);
    let grid = linspace(config.grid_lo, config.grid_hi, config.grid_points);
    let square = |u: f64| u * u;

    let mut entries = Vec::with_capacity(config.n_calib_list.len());
    let mut width_warnings = 0usize;
    for &n_calib in &config.n_calib_list {
        let total = n_calib + config.n_test;
        let data = gen_toy(
            &ToyConfig::new(total, derive_seed(config.seed, &[n_calib as u64]))
                .with_drift(DriftMode::DeterministicDrift),
        );
        let (calib, tests) = data.split_proper(n_calib)?;
        let taus = taus_for(config.tau_mode, config.seed, config.n_test);

        let mut oracle_scores: Vec<f64> =
            calib.iter().map(|o| ConditionalDistribution::cdf(&oracle, o.x, o.y)).collect();
        oracle_scores.sort_unstable_by(f64::total_cmp);
        let misc_scores: Vec<f64> = oracle_scores.iter().map(|&s| square(s)).collect();

        let mut sums = [0.0f64; 4];
        for (obs, &tau) in tests.iter().zip(&taus) {
            let oracle_dist = eval_on_grid(&oracle, &LabeledSequence::default(), obs.x, &grid)?;
            let oracle_values = oracle_dist.values().to_vec();
            let misc_values: Vec<f64> = oracle_values.iter().map(|&v| square(v)).collect();
            let conf_misc: Vec<f64> = misc_values
                .iter()
                .map(|&v| scps_pvalue_sorted(&misc_scores, v, tau))
                .collect();
            let conf_oracle: Vec<f64> = oracle_values
                .iter()
                .map(|&v| scps_pvalue_sorted(&oracle_scores, v, tau))
                .collect();

            let misc_dist = DistributionEvaluation::new(grid.clone(), misc_values)?;
            let conf_misc_dist = DistributionEvaluation::new(grid.clone(), conf_misc)?;
            let conf_oracle_dist = DistributionEvaluation::new(grid.clone(), conf_oracle)?;
            for (slot, dist) in
                [&oracle_dist, &misc_dist, &conf_misc_dist, &conf_oracle_dist].iter().enumerate()
            {
                let score = crps(dist, obs.y)?;
                width_warnings += usize::from(score.width_warning);
                sums[slot] += score.value;
            }
        }
        let n = config.n_test as f64;
        entries.push(DemoEntry {
            n_calib,
            crps_oracle: sums[0] / n,
            crps_miscalibrated: sums[1] / n,
            crps_conformalized: sums[2] / n,
            crps_conformalized_oracle: sums[3] / n,
        });
    }
    let mut warnings = Vec::new();
    if width_warnings > 0 {
        warnings.push(format!(
            "{width_warnings} CRPS evaluations hit the grid-width warning (expected for the \
             constant-τ output at n_calib=0)"
        ));
    }
    Ok((entries, warnings))
}

// ---------------------------------------------------------------------------
// shared helpers for the binary and tests
// ---------------------------------------------------------------------------

/// Serializes a report and writes it to `out` (or stdout when absent).
pub fn emit_report<C: Serialize, R: Serialize>(
    report: &Report<C, R>,
    out: Option<&Path>,
) -> CliResult<()> {
    let json = serde_json::to_string_pretty(report)
        .map_err(|e| CliError::Io(format!("serialization failed: {e}")))?;
    match out {
        Some(path) => std::fs::write(path, json + "\n")
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display()))),
        None => {
            println!("{json}");
            Ok(())
        }
    }
}

/// KS statistic and asymptotic p-value for a raw PIT vector.
pub fn uniformity_p_value(pits: &[f64]) -> CliResult<(f64, f64)> {
    let sample = PitSample::new(pits.to_vec()).map_err(CliError::from)?;
    let ks = ks_statistic(&sample)?;
    let p = 1.0 - kolmogorov_cdf((pits.len() as f64).sqrt() * ks);
    Ok((ks, p))
}
