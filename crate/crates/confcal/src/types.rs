//! Domain types and the behavioural contracts shared by every calibrator.
//!
//! A *predictive system* maps a training sequence and a test object to a
//! CDF-like function of the label: monotonically increasing in `y` (in the
//! wide sense), tending to 0 at −∞ and to 1 at +∞. Right-continuity is not
//! required. The randomized variant additionally takes `τ ∈ [0, 1]` and must
//! be monotone in it; calibrator outputs in [`crate::calibrate`] follow that
//! contract.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A single (object, label) pair. Both coordinates are finite reals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub x: f64,
    pub y: f64,
}

impl Observation {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !x.is_finite() || !y.is_finite() {
            return Err(Error::invalid(format!(
                "observation coordinates must be finite, got ({x}, {y})"
            )));
        }
        Ok(Observation { x, y })
    }
}

/// An ordered sequence of observations.
///
/// Order matters: the split into training sequence proper and calibration
/// sequence is by index.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LabeledSequence(Vec<Observation>);

impl LabeledSequence {
    pub fn new(items: Vec<Observation>) -> Self {
        LabeledSequence(items)
    }

    /// Builds a sequence from raw pairs, validating finiteness.
    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        pairs
            .iter()
            .map(|&(x, y)| Observation::new(x, y))
            .collect::<Result<Vec<_>>>()
            .map(LabeledSequence)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[Observation] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Observation> {
        self.0.iter()
    }

    pub fn push(&mut self, obs: Observation) {
        self.0.push(obs);
    }

    /// Splits into (training sequence proper, calibration sequence) at `m`.
    pub fn split_proper(&self, m: usize) -> Result<(&[Observation], &[Observation])> {
        if m > self.len() {
            return Err(Error::invalid(format!(
                "split index {m} exceeds sequence length {}",
                self.len()
            )));
        }
        Ok(self.0.split_at(m))
    }

    /// Smallest and largest label in the sequence, if nonempty.
    pub fn label_range(&self) -> Option<(f64, f64)> {
        let mut it = self.iter();
        let first = it.next()?.y;
        let (mut lo, mut hi) = (first, first);
        for obs in it {
            lo = lo.min(obs.y);
            hi = hi.max(obs.y);
        }
        Some((lo, hi))
    }

    /// Default label bracket for threshold searches: the label range widened
    /// by ten times its own width on each side (or ±10 for degenerate ranges).
    pub fn default_label_bracket(&self) -> (f64, f64) {
        match self.label_range() {
            None => (-10.0, 10.0),
            Some((lo, hi)) => {
                let span = (hi - lo).max(1.0);
                (lo - 10.0 * span, hi + 10.0 * span)
            }
        }
    }
}

impl From<Vec<Observation>> for LabeledSequence {
    fn from(items: Vec<Observation>) -> Self {
        LabeledSequence(items)
    }
}

impl<'a> IntoIterator for &'a LabeledSequence {
    type Item = &'a Observation;
    type IntoIter = std::slice::Iter<'a, Observation>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// A predictive distribution sampled on a grid of label values.
///
/// Invariants: the grid is strictly increasing; the values are monotonically
/// increasing in the wide sense, start at ≥ 0 and end at ≤ 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionEvaluation {
    grid: Vec<f64>,
    values: Vec<f64>,
}

impl DistributionEvaluation {
    pub fn new(grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        validate_grid(&grid)?;
        if values.len() != grid.len() {
            return Err(Error::invalid(format!(
                "grid has {} points but {} values were supplied",
                grid.len(),
                values.len()
            )));
        }
        for (i, pair) in values.windows(2).enumerate() {
            if !(pair[1] >= pair[0]) {
                return Err(Error::contract(format!(
                    "distribution values decrease between grid[{i}]={} (value {}) and grid[{}]={} (value {})",
                    grid[i],
                    pair[0],
                    i + 1,
                    grid[i + 1],
                    pair[1]
                )));
            }
        }
        let first = values[0];
        let last = *values.last().unwrap();
        if !(first >= 0.0) || !(last <= 1.0) {
            return Err(Error::contract(format!(
                "distribution values must stay in [0, 1]; got first {first}, last {last}"
            )));
        }
        Ok(DistributionEvaluation { grid, values })
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }
}

pub(crate) fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::invalid("evaluation grid must be nonempty"));
    }
    if grid.iter().any(|g| !g.is_finite()) {
        return Err(Error::invalid("evaluation grid must be finite"));
    }
    for pair in grid.windows(2) {
        if !(pair[1] > pair[0]) {
            return Err(Error::invalid(format!(
                "evaluation grid must be strictly increasing, got {} then {}",
                pair[0], pair[1]
            )));
        }
    }
    Ok(())
}

/// The range a randomized predictive system spans at a point as τ sweeps
/// [0, 1]: `lo` is the value at τ=0 and `hi` the value at τ=1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TauInterval {
    pub lo: f64,
    pub hi: f64,
}

impl TauInterval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(0.0 <= lo && lo <= hi && hi <= 1.0) {
            return Err(Error::invalid(format!(
                "tau interval must satisfy 0 ≤ lo ≤ hi ≤ 1, got [{lo}, {hi}]"
            )));
        }
        Ok(TauInterval { lo, hi })
    }

    /// Linear interpolation across the interval at the given τ.
    pub fn at_tau(&self, tau: f64) -> f64 {
        self.lo + tau * (self.hi - self.lo)
    }
}

/// The predictive-system contract.
///
/// `evaluate` must be monotonically increasing in `y` for every fixed
/// `(training, x)` and tend to 0 / 1 in the tails. Implementations are pure:
/// identical inputs give bit-identical outputs.
pub trait PredictiveSystem {
    fn evaluate(&self, training: &LabeledSequence, x: f64, y: f64) -> Result<f64>;
}

impl<P: PredictiveSystem + ?Sized> PredictiveSystem for &P {
    fn evaluate(&self, training: &LabeledSequence, x: f64, y: f64) -> Result<f64> {
        (**self).evaluate(training, x, y)
    }
}

/// Adapter turning a plain closure into a [`PredictiveSystem`].
pub struct FnSystem<F>(pub F);

impl<F> PredictiveSystem for FnSystem<F>
where
    F: Fn(&LabeledSequence, f64, f64) -> f64,
{
    fn evaluate(&self, training: &LabeledSequence, x: f64, y: f64) -> Result<f64> {
        Ok((self.0)(training, x, y))
    }
}

/// A conditional distribution function of the label given the object.
///
/// `cdf(x, ·)` must be a distribution function for every `x`; `quantile`
/// is its inverse where an analytic form exists (numeric inversion is used
/// otherwise, see [`crate::evaluate::invert_conditional`]).
pub trait ConditionalDistribution {
    fn cdf(&self, x: f64, y: f64) -> f64;

    fn quantile(&self, _x: f64, _t: f64) -> Option<f64> {
        None
    }
}

impl<A: ConditionalDistribution + ?Sized> ConditionalDistribution for &A {
    fn cdf(&self, x: f64, y: f64) -> f64 {
        (**self).cdf(x, y)
    }

    fn quantile(&self, x: f64, t: f64) -> Option<f64> {
        (**self).quantile(x, t)
    }
}
