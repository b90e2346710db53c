//! Concrete predictive systems usable as split conformity measures.
//!
//! All of them return values inside (0, 1) and are monotone increasing in the
//! label, so they satisfy the predictive-system contract on every input:
//!
//! - [`nw_evaluate`]: Nadaraya–Watson smoothing of label sigmoids with a
//!   Gaussian kernel over objects.
//! - [`residual_conformity`]: sigmoid-squashed normalized regression residual
//!   (kernel regression mean, kernel-smoothed absolute-residual scale).
//! - [`oracle_cdf`]: the exact conditional distribution of the toy data model
//!   (linear mean, noise scale |x|/2, floored so it stays strictly increasing).
//! - [`miscalibrated_cdf`]: the oracle pushed through a distorting map φ,
//!   giving perfect resolution with deliberately bad calibration.
//! - [`dempster_hill_conformity`]: σ(y), ignoring object and training data.

use crate::error::{Error, Result};
use crate::numeric::{gaussian_kernel, sigmoid, standard_normal_cdf, standard_normal_quantile};
use crate::types::{ConditionalDistribution, LabeledSequence, PredictiveSystem};

/// Bandwidths of the Nadaraya–Watson predictive system: `g` for the Gaussian
/// object kernel, `h` for the label sigmoid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NwParams {
    pub g: f64,
    pub h: f64,
}

impl NwParams {
    pub fn new(g: f64, h: f64) -> Result<Self> {
        if !(g > 0.0) || !(h > 0.0) || !g.is_finite() || !h.is_finite() {
            return Err(Error::invalid(format!("bandwidths must be positive, got g={g}, h={h}")));
        }
        Ok(NwParams { g, h })
    }
}

/// Parameters of the residual conformity measure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualParams {
    /// Gaussian bandwidth of the underlying kernel regression.
    pub g: f64,
    /// Lower clamp on the estimated residual scale.
    pub sigma_floor: f64,
}

impl ResidualParams {
    pub fn new(g: f64) -> Result<Self> {
        Self::with_sigma_floor(g, 1e-3)
    }

    pub fn with_sigma_floor(g: f64, sigma_floor: f64) -> Result<Self> {
        if !(g > 0.0) || !g.is_finite() {
            return Err(Error::invalid(format!("bandwidth must be positive, got g={g}")));
        }
        if !(sigma_floor > 0.0) || !sigma_floor.is_finite() {
            return Err(Error::invalid(format!(
                "sigma floor must be positive, got {sigma_floor}"
            )));
        }
        Ok(ResidualParams { g, sigma_floor })
    }
}

/// Parameters of the toy-model oracle: mean `slope·x`, noise scale `|x|/2`
/// floored at `sigma_floor` so the conditional CDF is strictly increasing
/// even at `x = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleParams {
    pub slope: f64,
    pub sigma_floor: f64,
}

impl Default for OracleParams {
    fn default() -> Self {
        OracleParams { slope: 2.0, sigma_floor: 1e-3 }
    }
}

impl OracleParams {
    pub fn noise_scale(&self, x: f64) -> f64 {
        (x.abs() / 2.0).max(self.sigma_floor)
    }
}

fn require_nonempty(training: &LabeledSequence, what: &str) -> Result<()> {
    if training.is_empty() {
        return Err(Error::invalid(format!("{what} requires a nonempty training sequence")));
    }
    Ok(())
}

/// Nadaraya–Watson predictive distribution value at `(x, y)`:
/// kernel-weighted average of per-observation label sigmoids.
///
/// When every kernel weight underflows to zero (test object extremely far
/// from all training objects) the weights fall back to uniform rather than
/// producing NaN.
pub fn nw_evaluate(training: &LabeledSequence, x: f64, y: f64, params: &NwParams) -> Result<f64> {
    require_nonempty(training, "nw_evaluate")?;
    let mut num = 0.0;
    let mut den = 0.0;
    for obs in training {
        let w = gaussian_kernel((x - obs.x) / params.g);
        num += sigmoid((y - obs.y) / params.h) * w;
        den += w;
    }
    if den == 0.0 {
        let mut sum = 0.0;
        for obs in training {
            sum += sigmoid((y - obs.y) / params.h);
        }
        return Ok(sum / training.len() as f64);
    }
    Ok(num / den)
}

/// Kernel regression mean of the labels at `x` (uniform weights on total
/// kernel underflow).
fn nw_regression_mean(training: &LabeledSequence, x: f64, g: f64) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for obs in training {
        let w = gaussian_kernel((x - obs.x) / g);
        num += obs.y * w;
        den += w;
    }
    if den == 0.0 {
        let sum: f64 = training.iter().map(|o| o.y).sum();
        return sum / training.len() as f64;
    }
    num / den
}

/// Sigmoid-squashed residual conformity σ((y − ŷ(x)) / σ̂(x)).
///
/// ŷ is the kernel regression mean; σ̂ is the kernel-smoothed mean absolute
/// training residual, clamped below at `sigma_floor`. The squashing keeps the
/// conformity measure strictly inside (0, 1).
pub fn residual_conformity(
    training: &LabeledSequence,
    x: f64,
    y: f64,
    params: &ResidualParams,
) -> Result<f64> {
    require_nonempty(training, "residual_conformity")?;
    let predicted = nw_regression_mean(training, x, params.g);

    let residuals: Vec<f64> = training
        .iter()
        .map(|obs| (obs.y - nw_regression_mean(training, obs.x, params.g)).abs())
        .collect();
    let mut num = 0.0;
    let mut den = 0.0;
    for (obs, r) in training.iter().zip(&residuals) {
        let w = gaussian_kernel((x - obs.x) / params.g);
        num += r * w;
        den += w;
    }
    let smoothed = if den == 0.0 {
        residuals.iter().sum::<f64>() / residuals.len() as f64
    } else {
        num / den
    };
    let scale = smoothed.max(params.sigma_floor);
    Ok(sigmoid((y - predicted) / scale))
}

/// Conditional distribution function of the toy model:
/// Φ((y − slope·x) / max(|x|/2, sigma_floor)).
pub fn oracle_cdf(x: f64, y: f64, params: &OracleParams) -> f64 {
    standard_normal_cdf((y - params.slope * x) / params.noise_scale(x))
}

/// Number of probe points used to check a distortion map.
const PHI_PROBE_POINTS: usize = 101;

pub(crate) fn validate_phi<F: Fn(f64) -> f64>(phi: &F) -> Result<()> {
    if phi(0.0) != 0.0 || phi(1.0) != 1.0 {
        return Err(Error::contract(format!(
            "distortion map must fix the endpoints: phi(0)={}, phi(1)={}",
            phi(0.0),
            phi(1.0)
        )));
    }
    let mut prev = 0.0;
    for i in 1..PHI_PROBE_POINTS {
        let u = i as f64 / (PHI_PROBE_POINTS - 1) as f64;
        let v = phi(u);
        if !(v > prev) {
            return Err(Error::contract(format!(
                "distortion map not strictly increasing on probe grid near u={u}: phi={v}, previous={prev}"
            )));
        }
        prev = v;
    }
    Ok(())
}

/// The oracle's output pushed through a strictly increasing distortion
/// φ : \[0,1\] → \[0,1\] with φ(0)=0 and φ(1)=1 (checked on a probe grid).
/// `phi(u) = u²` is the canonical badly miscalibrated choice.
pub fn miscalibrated_cdf<F: Fn(f64) -> f64>(
    x: f64,
    y: f64,
    phi: &F,
    params: &OracleParams,
) -> Result<f64> {
    validate_phi(phi)?;
    Ok(phi(oracle_cdf(x, y, params)))
}

/// The object-free conformity measure σ(y): training data and test object are
/// ignored entirely.
pub fn dempster_hill_conformity(_training: &LabeledSequence, _x: f64, y: f64) -> f64 {
    sigmoid(y)
}

/// [`PredictiveSystem`] wrapper around [`nw_evaluate`].
#[derive(Debug, Clone, Copy)]
pub struct NwSystem {
    params: NwParams,
}

impl NwSystem {
    pub fn new(params: NwParams) -> Self {
        NwSystem { params }
    }

    pub fn params(&self) -> &NwParams {
        &self.params
    }
}

impl PredictiveSystem for NwSystem {
    fn evaluate(&self, training: &LabeledSequence, x: f64, y: f64) -> Result<f64> {
        nw_evaluate(training, x, y, &self.params)
    }
}

/// [`PredictiveSystem`] wrapper around [`residual_conformity`].
#[derive(Debug, Clone, Copy)]
pub struct ResidualSystem {
    params: ResidualParams,
}

impl ResidualSystem {
    pub fn new(params: ResidualParams) -> Self {
        ResidualSystem { params }
    }
}

impl PredictiveSystem for ResidualSystem {
    fn evaluate(&self, training: &LabeledSequence, x: f64, y: f64) -> Result<f64> {
        residual_conformity(training, x, y, &self.params)
    }
}

/// The toy-model oracle as both a predictive system (training data ignored)
/// and an invertible conditional distribution.
#[derive(Debug, Clone, Copy, Default)]
pub struct OracleSystem {
    params: OracleParams,
}

impl OracleSystem {
    pub fn new(params: OracleParams) -> Self {
        OracleSystem { params }
    }

    pub fn params(&self) -> &OracleParams {
        &self.params
    }
}

impl PredictiveSystem for OracleSystem {
    fn evaluate(&self, _training: &LabeledSequence, x: f64, y: f64) -> Result<f64> {
        Ok(oracle_cdf(x, y, &self.params))
    }
}

impl ConditionalDistribution for OracleSystem {
    fn cdf(&self, x: f64, y: f64) -> f64 {
        oracle_cdf(x, y, &self.params)
    }

    fn quantile(&self, x: f64, t: f64) -> Option<f64> {
        Some(self.params.slope * x + self.params.noise_scale(x) * standard_normal_quantile(t))
    }
}

/// The oracle distorted by a fixed φ; validated once at construction.
pub struct MiscalibratedSystem<F> {
    params: OracleParams,
    phi: F,
}

impl<F: Fn(f64) -> f64> MiscalibratedSystem<F> {
    pub fn new(params: OracleParams, phi: F) -> Result<Self> {
        validate_phi(&phi)?;
        Ok(MiscalibratedSystem { params, phi })
    }
}

/// The default distortion φ(u) = u².
pub fn phi_square(u: f64) -> f64 {
    u * u
}

impl MiscalibratedSystem<fn(f64) -> f64> {
    /// Oracle distorted by φ(u) = u².
    pub fn squared(params: OracleParams) -> Self {
        MiscalibratedSystem { params, phi: phi_square }
    }
}

impl<F: Fn(f64) -> f64> PredictiveSystem for MiscalibratedSystem<F> {
    fn evaluate(&self, _training: &LabeledSequence, x: f64, y: f64) -> Result<f64> {
        Ok((self.phi)(oracle_cdf(x, y, &self.params)))
    }
}

impl<F: Fn(f64) -> f64> ConditionalDistribution for MiscalibratedSystem<F> {
    fn cdf(&self, x: f64, y: f64) -> f64 {
        (self.phi)(oracle_cdf(x, y, &self.params))
    }
}

/// [`PredictiveSystem`] wrapper around [`dempster_hill_conformity`].
#[derive(Debug, Clone, Copy, Default)]
pub struct DempsterHillSystem;

impl PredictiveSystem for DempsterHillSystem {
    fn evaluate(&self, training: &LabeledSequence, x: f64, y: f64) -> Result<f64> {
        Ok(dempster_hill_conformity(training, x, y))
    }
}

/// Batched Nadaraya–Watson evaluation over a fixed grid of labels.
///
/// Precomputes the label-sigmoid matrix once so that evaluating the
/// distribution for many test objects against the same training sequence
/// costs one kernel-weight pass plus a matrix–vector product per object.
/// Produces bit-identical values to [`nw_evaluate`].
pub struct NwGridEvaluator {
    params: NwParams,
    train_x: Vec<f64>,
    /// Row-major: `sig[grid_index * n_train + train_index]`.
    sig: Vec<f64>,
    n_grid: usize,
}

impl NwGridEvaluator {
    pub fn new(training: &LabeledSequence, grid: &[f64], params: NwParams) -> Result<Self> {
        require_nonempty(training, "NwGridEvaluator")?;
        crate::types::validate_grid(grid)?;
        let n_train = training.len();
        let mut sig = Vec::with_capacity(grid.len() * n_train);
        for &y in grid {
            for obs in training {
                sig.push(sigmoid((y - obs.y) / params.h));
            }
        }
        Ok(NwGridEvaluator {
            params,
            train_x: training.iter().map(|o| o.x).collect(),
            sig,
            n_grid: grid.len(),
        })
    }

    /// Distribution values over the grid for test object `x`.
    pub fn distribution(&self, x: f64) -> Vec<f64> {
        let n = self.train_x.len();
        let mut weights = Vec::with_capacity(n);
        let mut den = 0.0;
        for &tx in &self.train_x {
            let w = gaussian_kernel((x - tx) / self.params.g);
            weights.push(w);
            den += w;
        }
        let mut out = Vec::with_capacity(self.n_grid);
        if den == 0.0 {
            for row in self.sig.chunks_exact(n) {
                out.push(row.iter().sum::<f64>() / n as f64);
            }
        } else {
            for row in self.sig.chunks_exact(n) {
                let mut num = 0.0;
                for (s, w) in row.iter().zip(&weights) {
                    num += s * w;
                }
                out.push(num / den);
            }
        }
        out
    }
}
