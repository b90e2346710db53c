//! Conformal calibrators: split, cross and ideal.
//!
//! A calibrator turns any base predictive system into a randomized predictive
//! system whose output is calibrated in probability under exchangeable data.
//! The split calibrator ranks the test candidate's conformity score against
//! scores computed on a held-out calibration sequence; the cross variant
//! pools those ranks over folds; the ideal variant uses a true conditional
//! distribution function as the base, with the whole training sequence acting
//! as calibration.
//!
//! Tie comparisons use exact floating-point equality, so conformity measures
//! should avoid producing gratuitous exact ties; the random τ input resolves
//! the ties that do occur.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{bisect_monotone, BisectMode, DEFAULT_BISECT_TOL};
use crate::types::{
    ConditionalDistribution, DistributionEvaluation, LabeledSequence, Observation,
    PredictiveSystem, TauInterval,
};

/// Size of the training sequence proper; observations `m..n` form the
/// calibration sequence. `m == n` is the degenerate split whose calibrated
/// output is the constant τ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SplitSpec {
    pub m: usize,
}

impl SplitSpec {
    pub fn new(m: usize) -> Self {
        SplitSpec { m }
    }
}

/// Assignment of training indices to folds for the cross-conformal
/// calibrator. Folds partition the index range and every fold is nonempty.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FoldSpec {
    k: usize,
    assignment: Vec<usize>,
}

impl FoldSpec {
    pub fn new(k: usize, assignment: Vec<usize>) -> Result<Self> {
        if k < 2 {
            return Err(Error::invalid(format!("cross-conformal needs at least 2 folds, got {k}")));
        }
        let mut sizes = vec![0usize; k];
        for (i, &fold) in assignment.iter().enumerate() {
            if fold >= k {
                return Err(Error::invalid(format!(
                    "observation {i} assigned to fold {fold}, but only {k} folds exist"
                )));
            }
            sizes[fold] += 1;
        }
        if let Some(empty) = sizes.iter().position(|&s| s == 0) {
            return Err(Error::invalid(format!("fold {empty} is empty")));
        }
        Ok(FoldSpec { k, assignment })
    }

    /// Splits `0..n` into `k` contiguous blocks of near-equal size.
    pub fn contiguous(n: usize, k: usize) -> Result<Self> {
        if k < 2 || n < k {
            return Err(Error::invalid(format!(
                "cannot split {n} observations into {k} nonempty folds"
            )));
        }
        let mut assignment = Vec::with_capacity(n);
        for fold in 0..k {
            let start = fold * n / k;
            let end = (fold + 1) * n / k;
            assignment.extend(std::iter::repeat_n(fold, end - start));
        }
        FoldSpec::new(k, assignment)
    }

    pub fn fold_count(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    fn fold_indices(&self, fold: usize) -> impl Iterator<Item = usize> + '_ {
        self.assignment
            .iter()
            .enumerate()
            .filter_map(move |(i, &f)| (f == fold).then_some(i))
    }
}

fn check_tau(tau: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&tau) {
        return Err(Error::invalid(format!("tau must lie in [0, 1], got {tau}")));
    }
    Ok(())
}

/// The split-conformal p-value
/// (#{αᵢ < α^y} + τ·#{αᵢ = α^y} + τ) / (|calibration| + 1).
pub fn scps_pvalue(calib_scores: &[f64], test_score: f64, tau: f64) -> Result<f64> {
    check_tau(tau)?;
    let mut below = 0usize;
    let mut equal = 0usize;
    for &s in calib_scores {
        if s < test_score {
            below += 1;
        } else if s == test_score {
            equal += 1;
        }
    }
    Ok((below as f64 + tau * equal as f64 + tau) / (calib_scores.len() + 1) as f64)
}

/// The same p-value computed against scores sorted ascending. Produces values
/// bit-identical to [`scps_pvalue`].
pub fn scps_pvalue_sorted(sorted_scores: &[f64], test_score: f64, tau: f64) -> f64 {
    debug_assert!(sorted_scores.windows(2).all(|w| w[0] <= w[1]));
    let below = sorted_scores.partition_point(|&s| s < test_score);
    let below_or_equal = sorted_scores.partition_point(|&s| s <= test_score);
    let equal = below_or_equal - below;
    (below as f64 + tau * equal as f64 + tau) / (sorted_scores.len() + 1) as f64
}

/// Conformity scores of the calibration part of `training` under `base`
/// trained on the sequence proper, plus the proper sequence itself.
pub fn calibration_scores<P: PredictiveSystem + ?Sized>(
    base: &P,
    training: &LabeledSequence,
    split: SplitSpec,
) -> Result<(LabeledSequence, Vec<f64>)> {
    let (proper, calib) = training.split_proper(split.m)?;
    let proper = LabeledSequence::new(proper.to_vec());
    let scores = calib
        .iter()
        .map(|obs| base.evaluate(&proper, obs.x, obs.y))
        .collect::<Result<Vec<_>>>()?;
    Ok((proper, scores))
}

/// Split-conformal calibration of `base`, evaluated over a grid of labels.
pub fn scps_grid<P: PredictiveSystem + ?Sized>(
    base: &P,
    training: &LabeledSequence,
    split: SplitSpec,
    x: f64,
    tau: f64,
    grid: &[f64],
) -> Result<DistributionEvaluation> {
    check_tau(tau)?;
    crate::types::validate_grid(grid)?;
    let (proper, mut scores) = calibration_scores(base, training, split)?;
    scores.sort_unstable_by(f64::total_cmp);
    let values = grid
        .iter()
        .map(|&y| Ok(scps_pvalue_sorted(&scores, base.evaluate(&proper, x, y)?, tau)))
        .collect::<Result<Vec<_>>>()?;
    DistributionEvaluation::new(grid.to_vec(), values)
}

/// Which side of a conformity level a clamped threshold belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ThresholdSide {
    Lower,
    Upper,
}

/// Records a threshold search whose target score was not straddled by the
/// label bracket, so the threshold was clamped to a bracket edge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClampWarning {
    pub score_index: usize,
    pub side: ThresholdSide,
    pub edge: f64,
}

/// Exact piecewise form of a split-conformal predictive distribution.
///
/// `scores` are the distinct calibration conformity scores in increasing
/// order with multiplicities `counts`; `lower[j]`/`upper[j]` bracket the
/// label region where the distribution climbs through jump `j`:
/// `lower[j] = sup{y : A(y) < scores[j]}` and
/// `upper[j] = inf{y : A(y) > scores[j]}`. The thresholds form the chain
/// `lower[0] ≤ upper[0] ≤ lower[1] ≤ … ≤ upper[k−1]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepDistribution {
    scores: Vec<f64>,
    counts: Vec<usize>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    /// cumulative[j] = counts[0] + … + counts[j−1].
    cumulative: Vec<usize>,
    total: usize,
    clamp_warnings: Vec<ClampWarning>,
}

impl StepDistribution {
    pub fn new(
        scores: Vec<f64>,
        counts: Vec<usize>,
        lower: Vec<f64>,
        upper: Vec<f64>,
        total: usize,
        clamp_warnings: Vec<ClampWarning>,
    ) -> Result<Self> {
        let k = scores.len();
        if counts.len() != k || lower.len() != k || upper.len() != k {
            return Err(Error::invalid("step distribution components must have equal length"));
        }
        if k == 0 || k > total {
            return Err(Error::invalid(format!(
                "step distribution needs 1 ≤ k ≤ total, got k={k}, total={total}"
            )));
        }
        if scores.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::invalid("distinct scores must be strictly increasing"));
        }
        if counts.iter().sum::<usize>() != total {
            return Err(Error::invalid("multiplicities must sum to the calibration size"));
        }
        let mut prev = f64::NEG_INFINITY;
        for j in 0..k {
            if !(lower[j] >= prev) || !(upper[j] >= lower[j]) {
                return Err(Error::contract(format!(
                    "threshold chain violated at jump {j}: … ≤ {prev} ≤ {} ≤ {} fails",
                    lower[j], upper[j]
                )));
            }
            prev = upper[j];
        }
        let mut cumulative = Vec::with_capacity(k + 1);
        cumulative.push(0);
        for &c in &counts {
            cumulative.push(cumulative.last().unwrap() + c);
        }
        Ok(StepDistribution { scores, counts, lower, upper, cumulative, total, clamp_warnings })
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn lower_thresholds(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper_thresholds(&self) -> &[f64] {
        &self.upper
    }

    pub fn total(&self) -> usize {
        self.total
    }

    pub fn clamp_warnings(&self) -> &[ClampWarning] {
        &self.clamp_warnings
    }

    /// Jump mass already completed strictly below `y` and the mass whose jump
    /// region starts at or before `y`.
    fn bracketing_masses(&self, y: f64) -> (usize, usize) {
        let completed = self.cumulative[self.upper.partition_point(|&u| u < y)];
        let started = self.cumulative[self.lower.partition_point(|&l| l <= y)];
        (completed, started)
    }

    /// The τ-range of the distribution at `y`.
    ///
    /// Away from the thresholds this is the piecewise value at τ=0 and τ=1;
    /// at a threshold it is the union of the ranges at the adjacent pieces.
    pub fn tau_interval(&self, y: f64) -> TauInterval {
        let (completed, started) = self.bracketing_masses(y);
        let denom = (self.total + 1) as f64;
        TauInterval { lo: completed as f64 / denom, hi: (started + 1) as f64 / denom }
    }

    /// Value of the predictive distribution at `(y, τ)`.
    ///
    /// Implements the piecewise form: τ/(N+1) below every jump,
    /// (n₁+…+n_{j−1} + τ·n_j + τ)/(N+1) inside jump j's region,
    /// (n₁+…+n_j + τ)/(N+1) between jumps j and j+1, and (N+τ)/(N+1) above
    /// every jump. At the finitely many threshold points the value
    /// interpolates across the union of the adjacent pieces' τ-ranges.
    pub fn evaluate(&self, y: f64, tau: f64) -> Result<f64> {
        check_tau(tau)?;
        let (completed, started) = self.bracketing_masses(y);
        let span = (started - completed + 1) as f64;
        Ok((completed as f64 + tau * span) / (self.total + 1) as f64)
    }
}

/// Runs the split-conformal calibrator in its exact piecewise form.
///
/// Calibration scores are deduplicated into the distinct values and their
/// multiplicities; the jump thresholds are located by monotone bisection of
/// the base system over `[y_lo, y_hi]`. A score the bracket does not straddle
/// gets its threshold clamped to the nearer bracket edge, recorded in the
/// result's clamp warnings.
pub fn scps_exact<P: PredictiveSystem + ?Sized>(
    base: &P,
    training: &LabeledSequence,
    split: SplitSpec,
    x: f64,
    y_lo: f64,
    y_hi: f64,
) -> Result<StepDistribution> {
    if !(y_lo < y_hi) || !y_lo.is_finite() || !y_hi.is_finite() {
        return Err(Error::invalid(format!("invalid label bracket [{y_lo}, {y_hi}]")));
    }
    let (proper, raw_scores) = calibration_scores(base, training, split)?;
    if raw_scores.is_empty() {
        return Err(Error::invalid("exact split-conformal form needs a nonempty calibration sequence"));
    }
    let total = raw_scores.len();

    let mut sorted = raw_scores;
    sorted.sort_unstable_by(f64::total_cmp);
    let mut scores: Vec<f64> = Vec::new();
    let mut counts: Vec<usize> = Vec::new();
    for s in sorted {
        match scores.last() {
            Some(&last) if last == s => *counts.last_mut().unwrap() += 1,
            _ => {
                scores.push(s);
                counts.push(1);
            }
        }
    }

    let f = |y: f64| base.evaluate(&proper, x, y);
    let f_lo = f(y_lo)?;
    let f_hi = f(y_hi)?;
    if !(f_lo <= f_hi) {
        return Err(Error::contract(format!(
            "base system not monotone over the bracket: f({y_lo})={f_lo} > f({y_hi})={f_hi}"
        )));
    }

    let tol = DEFAULT_BISECT_TOL;
    let mut lower = Vec::with_capacity(scores.len());
    let mut upper = Vec::with_capacity(scores.len());
    let mut clamp_warnings = Vec::new();
    for (j, &p) in scores.iter().enumerate() {
        let mut clamped = |side: ThresholdSide, edge: f64| {
            clamp_warnings.push(ClampWarning { score_index: j, side, edge });
            edge
        };
        let m_j = if p < f_lo {
            clamped(ThresholdSide::Lower, y_lo)
        } else if p > f_hi {
            clamped(ThresholdSide::Lower, y_hi)
        } else {
            bisect_monotone(f, p, y_lo, y_hi, BisectMode::LastBelow, tol)?
        };
        lower.push(m_j);
        let big_m_j = if p > f_hi {
            clamped(ThresholdSide::Upper, y_hi)
        } else if p < f_lo {
            clamped(ThresholdSide::Upper, y_lo)
        } else {
            bisect_monotone(f, p, y_lo, y_hi, BisectMode::FirstAbove, tol)?
        };
        upper.push(big_m_j);
    }

    // Independent bisections can disorder the chain by up to ~2·tol; snap it
    // monotone and treat anything larger as a broken base contract.
    let slack = 2.0 * tol + 1e-12;
    let mut prev = f64::NEG_INFINITY;
    for j in 0..scores.len() {
        for t in [&mut lower[j], &mut upper[j]] {
            if *t < prev - slack {
                return Err(Error::contract(format!(
                    "threshold chain out of order at jump {j}: {t} < {prev}"
                )));
            }
            *t = t.max(prev);
            prev = *t;
        }
    }

    StepDistribution::new(scores, counts, lower, upper, total, clamp_warnings)
}

/// Cross-conformal calibration: pooled conformity ranks over folds,
/// normalized by n + 1.
///
/// For each fold, the base system is trained on the fold's complement; the
/// fold's observations are scored against that training, as is the test
/// candidate. Counts are pooled across folds:
/// (Σ_k #{i ∈ fold k : αᵢᵏ < α_k^y} + τ·Σ_k #{ties} + τ) / (n + 1).
pub fn ccps_evaluate<P: PredictiveSystem + ?Sized>(
    base: &P,
    training: &LabeledSequence,
    folds: &FoldSpec,
    x: f64,
    y: f64,
    tau: f64,
) -> Result<f64> {
    check_tau(tau)?;
    let n = training.len();
    if folds.len() != n {
        return Err(Error::invalid(format!(
            "fold assignment covers {} observations but the training sequence has {n}",
            folds.len()
        )));
    }
    let items = training.as_slice();
    let mut below = 0usize;
    let mut equal = 0usize;
    for fold in 0..folds.fold_count() {
        let complement: Vec<Observation> = items
            .iter()
            .zip(folds.assignment())
            .filter_map(|(obs, &f)| (f != fold).then_some(*obs))
            .collect();
        if complement.is_empty() {
            return Err(Error::invalid(format!("fold {fold} has an empty complement")));
        }
        let complement = LabeledSequence::new(complement);
        let test_score = base.evaluate(&complement, x, y)?;
        for i in folds.fold_indices(fold) {
            let s = base.evaluate(&complement, items[i].x, items[i].y)?;
            if s < test_score {
                below += 1;
            } else if s == test_score {
                equal += 1;
            }
        }
    }
    Ok((below as f64 + tau * equal as f64 + tau) / (n + 1) as f64)
}

/// Ideal conformalized predictive system: the base is a true conditional
/// distribution function and the whole training sequence acts as the
/// calibration sequence.
pub fn icps_evaluate<A: ConditionalDistribution + ?Sized>(
    oracle: &A,
    training: &LabeledSequence,
    x: f64,
    y: f64,
    tau: f64,
) -> Result<f64> {
    check_tau(tau)?;
    let test_score = oracle.cdf(x, y);
    let mut below = 0usize;
    let mut equal = 0usize;
    for obs in training {
        let s = oracle.cdf(obs.x, obs.y);
        if s < test_score {
            below += 1;
        } else if s == test_score {
            equal += 1;
        }
    }
    Ok((below as f64 + tau * equal as f64 + tau) / (training.len() + 1) as f64)
}
