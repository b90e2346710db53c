//! Scoring and calibration diagnostics: CRPS, probability integral
//! transforms, the semi-online protocol, the Kolmogorov–Smirnov machinery and
//! the finite-sample closeness check for ideal conformal calibration.

use serde::Serialize;

use crate::calibrate::{calibration_scores, scps_pvalue, SplitSpec};
use crate::error::{Error, Result};
use crate::numeric::{bisect_monotone, BisectMode, DEFAULT_BISECT_TOL};
use crate::types::{ConditionalDistribution, DistributionEvaluation, LabeledSequence, PredictiveSystem};

/// A sequence of probability integral transforms, each in [0, 1].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PitSample {
    values: Vec<f64>,
}

impl PitSample {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(v) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::invalid(format!("PIT values must lie in [0, 1], got {v}")));
        }
        Ok(PitSample { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Extracts the probability integral transform from a predictive distribution
/// evaluated at the true label. The identity map, kept for the data-flow
/// contract.
pub fn pit(dist_value_at_true_label: f64) -> f64 {
    dist_value_at_true_label
}

/// A CRPS value together with a flag raised when the evaluation grid was too
/// narrow to make the truncated integral trustworthy (distribution above
/// 0.001 at the left edge or below 0.999 at the right edge).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CrpsScore {
    pub value: f64,
    pub width_warning: bool,
}

/// Continuous ranked probability score ∫ (F(t) − 1{t ≥ y})² dt, integrated by
/// the trapezoid rule over the evaluation grid with the distribution treated
/// as linear between grid points. The cell containing the label is split at
/// the label so the indicator jump is handled exactly; mass outside the grid
/// contributes nothing.
pub fn crps(dist: &DistributionEvaluation, y: f64) -> Result<CrpsScore> {
    let grid = dist.grid();
    let values = dist.values();
    let first = grid[0];
    let last = *grid.last().unwrap();
    if !(y >= first && y <= last) {
        return Err(Error::invalid(format!(
            "label {y} outside the evaluation grid [{first}, {last}]; widen the grid"
        )));
    }

    let mut total = 0.0;
    for i in 0..grid.len() - 1 {
        let (a, b) = (grid[i], grid[i + 1]);
        let (fa, fb) = (values[i], values[i + 1]);
        if y <= a {
            let ga = (fa - 1.0) * (fa - 1.0);
            let gb = (fb - 1.0) * (fb - 1.0);
            total += (b - a) * 0.5 * (ga + gb);
        } else if y >= b {
            total += (b - a) * 0.5 * (fa * fa + fb * fb);
        } else {
            let fy = fa + (fb - fa) * (y - a) / (b - a);
            total += (y - a) * 0.5 * (fa * fa + fy * fy);
            let gy = (fy - 1.0) * (fy - 1.0);
            let gb = (fb - 1.0) * (fb - 1.0);
            total += (b - y) * 0.5 * (gy + gb);
        }
    }

    let width_warning = !(values[0] < 1e-3 && *values.last().unwrap() > 1.0 - 1e-3);
    Ok(CrpsScore { value: total, width_warning })
}

/// Runs the semi-online protocol: test observations are predicted in order
/// and each one's conformity score joins the calibration pool as soon as it
/// has been processed, which makes the resulting transforms independent.
pub fn semi_online_pits<P: PredictiveSystem + ?Sized>(
    base: &P,
    training: &LabeledSequence,
    split: SplitSpec,
    tests: &LabeledSequence,
    taus: &[f64],
) -> Result<PitSample> {
    if taus.len() != tests.len() {
        return Err(Error::invalid(format!(
            "need one tau per test observation: {} taus for {} tests",
            taus.len(),
            tests.len()
        )));
    }
    let (proper, mut scores) = calibration_scores(base, training, split)?;
    let mut pits = Vec::with_capacity(tests.len());
    for (obs, &tau) in tests.iter().zip(taus) {
        let test_score = base.evaluate(&proper, obs.x, obs.y)?;
        pits.push(pit(scps_pvalue(&scores, test_score, tau)?));
        scores.push(test_score);
    }
    PitSample::new(pits)
}

/// Kolmogorov–Smirnov distance between the sample and the uniform
/// distribution, computed exactly from the sorted sample:
/// maxᵢ max(i/n − u₍ᵢ₎, u₍ᵢ₎ − (i−1)/n).
pub fn ks_statistic(sample: &PitSample) -> Result<f64> {
    if sample.is_empty() {
        return Err(Error::invalid("KS statistic of an empty sample"));
    }
    let mut sorted = sample.values().to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut sup: f64 = 0.0;
    for (i, &u) in sorted.iter().enumerate() {
        let hi = (i + 1) as f64 / n - u;
        let lo = u - i as f64 / n;
        sup = sup.max(hi).max(lo);
    }
    Ok(sup)
}

/// Distribution function of the Kolmogorov distribution,
/// K(t) = 1 − 2 Σ_{j≥1} (−1)^{j−1} e^{−2j²t²}, truncated once a term drops
/// below 1e−12. Values of `t` below 1e−4 map to 0: there K is far beneath
/// f64 resolution.
pub fn kolmogorov_cdf(t: f64) -> f64 {
    if t < 1e-4 {
        return 0.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    let mut j = 1u64;
    loop {
        let term = (-2.0 * (j as f64 * t) * (j as f64 * t)).exp();
        if term < 1e-12 {
            break;
        }
        sum += sign * term;
        sign = -sign;
        j += 1;
    }
    (1.0 - 2.0 * sum).clamp(0.0, 1.0)
}

/// Quantile of the Kolmogorov distribution, by bisection of
/// [`kolmogorov_cdf`].
pub fn kolmogorov_quantile(p: f64) -> Result<f64> {
    if !(0.0 < p && p < 1.0) {
        return Err(Error::invalid(format!("Kolmogorov quantile needs p in (0, 1), got {p}")));
    }
    bisect_monotone(|t| Ok(kolmogorov_cdf(t)), p, 1e-3, 5.0, BisectMode::FirstAbove, 1e-9)
}

/// Inverts a conditional distribution function in the label at fixed `x`,
/// preferring the analytic quantile when the distribution provides one and
/// falling back to monotone bisection over an expanding bracket.
pub fn invert_conditional<A: ConditionalDistribution + ?Sized>(
    oracle: &A,
    x: f64,
    t: f64,
    bracket: (f64, f64),
    tol: f64,
) -> Result<f64> {
    if let Some(q) = oracle.quantile(x, t) {
        return Ok(q);
    }
    let (mut lo, mut hi) = bracket;
    if !(lo < hi) {
        return Err(Error::invalid(format!("invalid inversion bracket [{lo}, {hi}]")));
    }
    let mut expansions = 0;
    while oracle.cdf(x, lo) > t || oracle.cdf(x, hi) < t {
        let span = hi - lo;
        lo -= span;
        hi += span;
        expansions += 1;
        if expansions > 60 || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::TargetOutOfRange {
                target: t,
                f_lo: oracle.cdf(x, lo.max(f64::MIN)),
                f_hi: oracle.cdf(x, hi.min(f64::MAX)),
            });
        }
    }
    bisect_monotone(|y| Ok(oracle.cdf(x, y)), t, lo, hi, BisectMode::LastBelow, tol)
}

/// Finite-sample closeness of the ideal conformalized system to its base
/// oracle, measured along a probe grid in PIT space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvergenceReport {
    /// Training-sequence length.
    pub n: usize,
    /// sup over the probe grid of |ICPS ∘ A_x⁻¹ − 𝔾ₙ|.
    pub sup_discrepancy: f64,
    /// The deterministic bound 1/(n+1) the discrepancy must respect.
    pub bound: f64,
    /// √n times the KS distance of the training PITs from uniformity.
    pub scaled_ks: f64,
}

/// Compares the ideal conformalized system against the empirical distribution
/// function of the training PITs at every `t` in the probe grid.
///
/// For each probe level the label is recovered through the oracle's quantile
/// and the conformal value computed there; the counts are accumulated against
/// the presorted PITs, which reproduces `icps_evaluate` bit for bit.
pub fn prop1_check<A: ConditionalDistribution + ?Sized>(
    oracle: &A,
    data: &LabeledSequence,
    x: f64,
    tau: f64,
    t_grid: &[f64],
) -> Result<ConvergenceReport> {
    if data.is_empty() {
        return Err(Error::invalid("convergence check needs at least one observation"));
    }
    if t_grid.is_empty() {
        return Err(Error::invalid("probe grid must be nonempty"));
    }
    if let Some(t) = t_grid.iter().find(|t| !(0.0 < **t && **t < 1.0)) {
        return Err(Error::invalid(format!("probe levels must lie strictly inside (0, 1), got {t}")));
    }
    if !(0.0..=1.0).contains(&tau) {
        return Err(Error::invalid(format!("tau must lie in [0, 1], got {tau}")));
    }

    let n = data.len();
    let pits: Vec<f64> = data.iter().map(|obs| oracle.cdf(obs.x, obs.y)).collect();
    let mut sorted = pits.clone();
    sorted.sort_unstable_by(f64::total_cmp);

    let bracket = data.default_label_bracket();
    let denom = (n + 1) as f64;
    let mut sup: f64 = 0.0;
    for &t in t_grid {
        let y_t = invert_conditional(oracle, x, t, bracket, DEFAULT_BISECT_TOL)?;
        let test_score = oracle.cdf(x, y_t);
        let below = sorted.partition_point(|&p| p < test_score);
        let equal = sorted.partition_point(|&p| p <= test_score) - below;
        let icps = (below as f64 + tau * equal as f64 + tau) / denom;
        let empirical = sorted.partition_point(|&p| p <= t) as f64 / n as f64;
        sup = sup.max((icps - empirical).abs());
    }

    let ks = ks_statistic(&PitSample::new(pits)?)?;
    Ok(ConvergenceReport {
        n,
        sup_discrepancy: sup,
        bound: 1.0 / denom,
        scaled_ks: (n as f64).sqrt() * ks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calibrate::icps_evaluate;
    use crate::predictors::{DempsterHillSystem, OracleParams, OracleSystem};
    use crate::types::{DistributionEvaluation, FnSystem};
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn uniform_cdf_on_grid(points: usize) -> DistributionEvaluation {
        let grid: Vec<f64> = (0..points).map(|i| i as f64 / (points - 1) as f64).collect();
        let values = grid.clone();
        DistributionEvaluation::new(grid, values).unwrap()
    }

    #[test]
    fn crps_of_perfect_step_is_zero() {
        // Step exactly at the label: 0 before, 1 from the label on.
        let grid = vec![-1.0, 0.0, 0.0 + 1e-12, 1.0];
        let values = vec![0.0, 0.0, 1.0, 1.0];
        let dist = DistributionEvaluation::new(grid, values).unwrap();
        let score = crps(&dist, 0.0).unwrap();
        assert!(score.value.abs() < 1e-12, "got {}", score.value);
    }

    #[test]
    fn crps_uniform_forecast_closed_form() {
        // Oracle: ∫₀¹ (t−1)² dt = 1/3 for a label at the left end, and
        // ∫₀¹ t² dt = 1/3 at the right end.
        let dist = uniform_cdf_on_grid(1001);
        let left = crps(&dist, 0.0).unwrap();
        let right = crps(&dist, 1.0).unwrap();
        assert_relative_eq!(left.value, 1.0 / 3.0, epsilon = 1e-3);
        assert_relative_eq!(right.value, 1.0 / 3.0, epsilon = 1e-3);
        // The uniform CDF starts at 0 and ends at 1, so no width warning.
        assert!(!left.width_warning);
    }

    #[test]
    fn crps_warns_on_narrow_grid() {
        let grid = vec![0.4, 0.5, 0.6];
        let values = vec![0.3, 0.5, 0.7];
        let dist = DistributionEvaluation::new(grid, values).unwrap();
        assert!(crps(&dist, 0.5).unwrap().width_warning);
    }

    #[test]
    fn crps_rejects_label_outside_grid() {
        let dist = uniform_cdf_on_grid(11);
        assert!(crps(&dist, 2.0).is_err());
        assert!(crps(&dist, -0.5).is_err());
    }

    #[test]
    fn crps_translation_consistent() {
        let grid: Vec<f64> = (0..501).map(|i| -2.0 + i as f64 * 0.012).collect();
        let values: Vec<f64> =
            grid.iter().map(|&t| crate::numeric::sigmoid(2.0 * t)).collect();
        let base = DistributionEvaluation::new(grid.clone(), values.clone()).unwrap();
        let score = crps(&base, 0.7).unwrap();
        for shift in [-3.0, 1.0, 25.0] {
            let shifted_grid: Vec<f64> = grid.iter().map(|&t| t + shift).collect();
            let shifted = DistributionEvaluation::new(shifted_grid, values.clone()).unwrap();
            let shifted_score = crps(&shifted, 0.7 + shift).unwrap();
            assert!(
                (score.value - shifted_score.value).abs() < 1e-9,
                "shift {shift}: {} vs {}",
                score.value,
                shifted_score.value
            );
        }
    }

    #[test]
    fn pit_is_identity() {
        assert_eq!(pit(0.5), 0.5);
        assert_eq!(pit(0.0), 0.0);
        assert_eq!(pit(1.0), 1.0);
    }

    #[test]
    fn semi_online_single_step_reduces_to_pvalue() {
        let training = seq(&[(0.0, 1.0), (0.0, 2.0)]);
        let tests = seq(&[(0.0, 1.5)]);
        let direct = {
            let (proper, scores) =
                calibration_scores(&DempsterHillSystem, &training, SplitSpec::new(0)).unwrap();
            let s = DempsterHillSystem.evaluate(&proper, 0.0, 1.5).unwrap();
            scps_pvalue(&scores, s, 0.4).unwrap()
        };
        let pits =
            semi_online_pits(&DempsterHillSystem, &training, SplitSpec::new(0), &tests, &[0.4])
                .unwrap();
        assert_eq!(pits.values(), &[direct]);
    }

    #[test]
    fn semi_online_empty_calibration_starts_at_tau() {
        let tests = seq(&[(0.0, 3.0)]);
        let pits = semi_online_pits(
            &DempsterHillSystem,
            &LabeledSequence::default(),
            SplitSpec::new(0),
            &tests,
            &[0.3],
        )
        .unwrap();
        assert_eq!(pits.values(), &[0.3]);
    }

    #[test]
    fn semi_online_appends_processed_scores() {
        // Hand trace: first PIT sees no calibration scores (τ=0 → 0); the
        // second sees σ(0) and its own score σ(1) ranks above it: 1/2.
        let tests = seq(&[(0.0, 0.0), (0.0, 1.0)]);
        let pits = semi_online_pits(
            &DempsterHillSystem,
            &LabeledSequence::default(),
            SplitSpec::new(0),
            &tests,
            &[0.0, 0.0],
        )
        .unwrap();
        assert_eq!(pits.values(), &[0.0, 0.5]);
    }

    fn seq(pairs: &[(f64, f64)]) -> LabeledSequence {
        LabeledSequence::from_pairs(pairs).unwrap()
    }

    #[test]
    fn ks_on_singleton_and_thirds() {
        let single = PitSample::new(vec![0.5]).unwrap();
        assert_eq!(ks_statistic(&single).unwrap(), 0.5);

        // Oracle, by the sorted-sample formula: terms for u=(1/3, 2/3) are
        // max(1/2−1/3, 1/3−0) and max(1−2/3, 2/3−1/2), all equal to 1/3.
        let thirds = PitSample::new(vec![2.0 / 3.0, 1.0 / 3.0]).unwrap();
        assert_relative_eq!(ks_statistic(&thirds).unwrap(), 1.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn ks_on_evenly_spaced_sample() {
        let n = 9;
        let sample: Vec<f64> = (1..=n).map(|i| i as f64 / (n + 1) as f64).collect();
        let ks = ks_statistic(&PitSample::new(sample).unwrap()).unwrap();
        assert_relative_eq!(ks, 0.1, epsilon = 1e-15);
    }

    #[test]
    fn ks_rejects_empty_sample() {
        assert!(ks_statistic(&PitSample::new(vec![]).unwrap()).is_err());
    }

    #[test]
    fn ks_matches_brute_force_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..8 {
            let n = rng.random_range(3..40);
            let values: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
            let sample = PitSample::new(values.clone()).unwrap();
            let fast = ks_statistic(&sample).unwrap();

            // Brute force: scan a 10⁵-point grid augmented with the sample
            // points and their left limits.
            let mut probes: Vec<f64> = (0..=100_000).map(|i| i as f64 / 100_000.0).collect();
            for &v in &values {
                probes.push(v);
                probes.push((v - 1e-12).max(0.0));
            }
            let nf = n as f64;
            let mut sup: f64 = 0.0;
            for &t in &probes {
                let ecdf = values.iter().filter(|&&v| v <= t).count() as f64 / nf;
                sup = sup.max((ecdf - t).abs());
            }
            assert!((fast - sup).abs() <= 1e-6, "n={n}: fast={fast}, brute={sup}");
        }
    }

    #[test]
    fn kolmogorov_cdf_limits() {
        assert_eq!(kolmogorov_cdf(0.0), 0.0);
        assert_eq!(kolmogorov_cdf(-1.0), 0.0);
        assert!(kolmogorov_cdf(50.0) == 1.0);
        assert!(kolmogorov_cdf(2.0) > 0.999);
    }

    /// Independent route to K(t): the theta-transformed series
    /// K(t) = √(2π)/t · Σ_{j≥1} e^{−(2j−1)²π²/(8t²)}.
    fn kolmogorov_cdf_dual(t: f64) -> f64 {
        let mut sum = 0.0;
        for j in 1..200u32 {
            let m = (2 * j - 1) as f64;
            let term = (-m * m * std::f64::consts::PI.powi(2) / (8.0 * t * t)).exp();
            if term < 1e-18 {
                break;
            }
            sum += term;
        }
        (2.0 * std::f64::consts::PI).sqrt() / t * sum
    }

    #[test]
    fn kolmogorov_cdf_median_against_dual_series() {
        let direct = kolmogorov_cdf(0.8276);
        let dual = kolmogorov_cdf_dual(0.8276);
        assert!((direct - dual).abs() < 1e-10, "{direct} vs {dual}");
        assert!((direct - 0.5).abs() < 5e-4, "median check: {direct}");
        let median = kolmogorov_quantile(0.5).unwrap();
        assert!((median - 0.8276).abs() < 5e-4, "quantile: {median}");
    }

    #[test]
    fn kolmogorov_median_against_brownian_bridge_simulation() {
        // Simulate sup|B| for Brownian bridges on a 1024-step grid, 10⁵
        // paths. Grid discretization biases the sup slightly low and the
        // Monte-Carlo median has noise ~1e-3, hence the loose tolerance.
        let steps = 1024;
        let paths = 100_000;
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let scale = 1.0 / (steps as f64).sqrt();
        let mut sups = Vec::with_capacity(paths);
        let mut increments = vec![0.0f64; steps];
        for _ in 0..paths {
            let mut w = 0.0;
            for inc in increments.iter_mut() {
                let z: f64 = StandardNormal.sample(&mut rng);
                w += z * scale;
                *inc = w;
            }
            let w_total = w;
            let mut sup: f64 = 0.0;
            for (k, &wk) in increments.iter().enumerate() {
                let t = (k + 1) as f64 / steps as f64;
                sup = sup.max((wk - t * w_total).abs());
            }
            sups.push(sup);
        }
        sups.sort_unstable_by(f64::total_cmp);
        let median = sups[paths / 2];
        assert!((median - 0.8276).abs() < 0.025, "bridge median: {median}");
    }

    #[test]
    fn invert_conditional_uses_quantile_and_bisection() {
        let oracle = OracleSystem::new(OracleParams::default());
        let y = invert_conditional(&oracle, 0.4, 0.3, (-5.0, 5.0), 1e-10).unwrap();
        assert_relative_eq!(oracle.cdf(0.4, y), 0.3, epsilon = 1e-9);

        // A distribution without an analytic quantile goes through bisection.
        struct Plain;
        impl ConditionalDistribution for Plain {
            fn cdf(&self, _x: f64, y: f64) -> f64 {
                crate::numeric::sigmoid(y)
            }
        }
        let y = invert_conditional(&Plain, 0.0, 0.25, (-1.0, 1.0), 1e-10).unwrap();
        assert_relative_eq!(y, (0.25f64 / 0.75).ln(), epsilon = 1e-8);
    }

    #[test]
    fn prop1_rejects_empty_data() {
        let oracle = OracleSystem::default();
        let err = prop1_check(&oracle, &LabeledSequence::default(), 0.0, 0.0, &[0.5]);
        assert!(err.is_err());
    }

    #[test]
    fn prop1_hand_traces_at_n_one() {
        let oracle = OracleSystem::default();
        let x0 = 0.5;
        let data = seq(&[(x0, oracle.quantile(x0, 0.5).unwrap())]);

        let report = prop1_check(&oracle, &data, 0.3, 0.0, &[0.25]).unwrap();
        assert_eq!(report.sup_discrepancy, 0.0);
        assert_eq!(report.bound, 0.5);

        let report = prop1_check(&oracle, &data, 0.3, 1.0, &[0.75]).unwrap();
        assert_eq!(report.sup_discrepancy, 0.0);
        // The single PIT is 0.5: KS distance is 0.5, scaled by √1.
        assert_eq!(report.scaled_ks, 0.5);
    }

    #[test]
    fn prop1_matches_literal_icps_calls() {
        let oracle = OracleSystem::default();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let data = seq(&(0..40)
            .map(|_| {
                let x: f64 = rng.random_range(-1.0..=1.0);
                let z: f64 = StandardNormal.sample(&mut rng);
                (x, 2.0 * x + z * (x.abs() / 2.0))
            })
            .collect::<Vec<_>>());
        let x = 0.37;
        let tau = 0.5;
        let t_grid: Vec<f64> = (1..=64).map(|i| i as f64 / 65.0).collect();
        let report = prop1_check(&oracle, &data, x, tau, &t_grid).unwrap();

        let mut sup: f64 = 0.0;
        let sorted = {
            let mut p: Vec<f64> =
                data.iter().map(|o| oracle.cdf(o.x, o.y)).collect();
            p.sort_unstable_by(f64::total_cmp);
            p
        };
        for &t in &t_grid {
            let y_t = oracle.quantile(x, t).unwrap();
            let v = icps_evaluate(&oracle, &data, x, y_t, tau).unwrap();
            let gn = sorted.partition_point(|&p| p <= t) as f64 / data.len() as f64;
            sup = sup.max((v - gn).abs());
        }
        assert_eq!(report.sup_discrepancy, sup);
        assert!(report.sup_discrepancy <= report.bound + 1e-12);
    }

    #[test]
    fn prop1_bound_holds_across_sizes_and_taus() {
        let oracle = OracleSystem::default();
        let t_grid: Vec<f64> = (1..=256).map(|i| i as f64 / 257.0).collect();
        for &n in &[10usize, 100, 1000] {
            for seed in 0..5u64 {
                let mut rng = ChaCha8Rng::seed_from_u64(900 + seed);
                let data = seq(&(0..n)
                    .map(|_| {
                        let x: f64 = rng.random_range(-1.0..=1.0);
                        let z: f64 = StandardNormal.sample(&mut rng);
                        (x, 2.0 * x + z * (x.abs() / 2.0))
                    })
                    .collect::<Vec<_>>());
                let x: f64 = rng.random_range(-1.0..=1.0);
                for &tau in &[0.0, 0.5, 1.0] {
                    let report = prop1_check(&oracle, &data, x, tau, &t_grid).unwrap();
                    assert!(
                        report.sup_discrepancy <= report.bound + 1e-12,
                        "n={n} seed={seed} tau={tau}: {} > {}",
                        report.sup_discrepancy,
                        report.bound
                    );
                }
            }
        }
    }

    #[test]
    fn fn_system_usable_as_base() {
        // Guards the FnSystem plumbing the tests above rely on.
        let base = FnSystem(|_: &LabeledSequence, _, y: f64| crate::numeric::sigmoid(y));
        let training = seq(&[(0.0, 0.0)]);
        assert_eq!(base.evaluate(&training, 0.0, 0.0).unwrap(), 0.5);
    }
}
