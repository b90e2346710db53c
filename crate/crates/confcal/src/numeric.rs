//! Shared numeric utilities: the logistic sigmoid, Gaussian kernel, standard
//! normal CDF/quantile, monotone bisection and grid evaluation.

use crate::error::{Error, Result};
use crate::types::{validate_grid, DistributionEvaluation, LabeledSequence, PredictiveSystem};

/// Default tolerance for threshold searches, in label units.
pub const DEFAULT_BISECT_TOL: f64 = 1e-9;

/// Iteration cap for [`bisect_monotone`]; exceeding it is reported as
/// [`Error::NoConvergence`].
pub const MAX_BISECT_ITERATIONS: usize = 200;

/// Logistic sigmoid 1 / (1 + e^{-u}), evaluated in overflow-safe form.
pub fn sigmoid(u: f64) -> f64 {
    if u >= 0.0 {
        1.0 / (1.0 + (-u).exp())
    } else {
        let e = u.exp();
        e / (1.0 + e)
    }
}

/// Standard Gaussian density (2π)^{-1/2} e^{-u²/2}.
pub fn gaussian_kernel(u: f64) -> f64 {
    (-0.5 * u * u).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

const FRAC_2_SQRT_PI: f64 = std::f64::consts::FRAC_2_SQRT_PI;
const INV_SQRT_PI: f64 = std::f64::consts::FRAC_2_SQRT_PI / 2.0;

/// erf by its Maclaurin series; accurate for |x| ≲ 1.5 where the alternating
/// terms stay small enough to avoid cancellation.
fn erf_series(x: f64) -> f64 {
    let mut term = x;
    let mut sum = x;
    let mut n = 0u32;
    loop {
        n += 1;
        term *= -x * x / n as f64;
        let contribution = term / (2 * n + 1) as f64;
        sum += contribution;
        if contribution.abs() <= 1e-18 * sum.abs() || n > 200 {
            return sum * FRAC_2_SQRT_PI;
        }
    }
}

/// erfc for x ≥ 1.5 via the Laplace continued fraction
/// √π e^{x²} erfc(x) = 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + …)))),
/// evaluated by the modified Lentz algorithm.
fn erfc_continued_fraction(x: f64) -> f64 {
    let tiny = 1e-300;
    let mut f: f64 = tiny;
    let mut c: f64 = f;
    let mut d: f64 = 0.0;
    for n in 1..400u32 {
        let a = if n == 1 { 1.0 } else { (n - 1) as f64 / 2.0 };
        d = x + a * d;
        if d == 0.0 {
            d = tiny;
        }
        c = x + a / c;
        if c == 0.0 {
            c = tiny;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-17 {
            break;
        }
    }
    (-x * x).exp() * INV_SQRT_PI * f
}

/// Complementary error function, accurate to a few ulps over the real line.
pub fn erfc(x: f64) -> f64 {
    if x >= 1.5 {
        erfc_continued_fraction(x)
    } else if x <= -1.5 {
        2.0 - erfc_continued_fraction(-x)
    } else {
        1.0 - erf_series(x)
    }
}

/// Standard normal distribution function Φ.
pub fn standard_normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / std::f64::consts::SQRT_2)
}

/// Standard normal quantile Φ⁻¹: coarse bisection bracket followed by
/// bracket-guarded Newton steps on [`standard_normal_cdf`]. The round-trip
/// Φ(Φ⁻¹(p)) − p lands within a few ulps of zero.
pub fn standard_normal_quantile(p: f64) -> f64 {
    if !(p > 0.0) {
        return if p == 0.0 { f64::NEG_INFINITY } else { f64::NAN };
    }
    if !(p < 1.0) {
        return if p == 1.0 { f64::INFINITY } else { f64::NAN };
    }
    let (mut lo, mut hi) = (-40.0f64, 40.0f64);
    for _ in 0..10 {
        let mid = 0.5 * (lo + hi);
        if standard_normal_cdf(mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut z = 0.5 * (lo + hi);
    for _ in 0..60 {
        let f = standard_normal_cdf(z) - p;
        if f < 0.0 {
            lo = lo.max(z);
        } else {
            hi = hi.min(z);
        }
        let density = gaussian_kernel(z);
        if density <= 0.0 {
            break;
        }
        let mut next = z - f / density;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - z).abs() <= 1e-16 * z.abs().max(1.0) {
            return next;
        }
        z = next;
    }
    z
}

/// Which boundary of the target level set a bisection searches for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BisectMode {
    /// sup{y : f(y) < target}. Returns `lo` when no point of the bracket
    /// lies below the target.
    LastBelow,
    /// inf{y : f(y) > target}. Returns `hi` when no point of the bracket
    /// lies above the target.
    FirstAbove,
}

/// Locates a level-set boundary of a monotonically increasing function.
///
/// On a constancy plateau exactly at `target`, `LastBelow` converges to the
/// left edge of the plateau and `FirstAbove` to the right edge, matching the
/// sup/inf they compute. The result is within `tol` of the true boundary.
pub fn bisect_monotone<F>(
    mut f: F,
    target: f64,
    lo: f64,
    hi: f64,
    mode: BisectMode,
    tol: f64,
) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(tol > 0.0) {
        return Err(Error::invalid(format!("bisection tolerance must be positive, got {tol}")));
    }
    if !(lo <= hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::invalid(format!("invalid bracket [{lo}, {hi}]")));
    }
    let f_lo = f(lo)?;
    let f_hi = f(hi)?;
    if target < f_lo || target > f_hi {
        return Err(Error::TargetOutOfRange { target, f_lo, f_hi });
    }

    match mode {
        BisectMode::LastBelow => {
            // No point of the bracket is strictly below the target.
            if f_lo >= target {
                return Ok(lo);
            }
            // Invariant: f(a) < target ≤ f(b).
            let (mut a, mut b) = (lo, hi);
            for _ in 0..MAX_BISECT_ITERATIONS {
                if b - a <= tol {
                    return Ok(0.5 * (a + b));
                }
                let mid = 0.5 * (a + b);
                if f(mid)? < target {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            Err(Error::NoConvergence { iterations: MAX_BISECT_ITERATIONS, width: b - a })
        }
        BisectMode::FirstAbove => {
            if f_hi <= target {
                return Ok(hi);
            }
            if f_lo > target {
                return Ok(lo);
            }
            // Invariant: f(a) ≤ target < f(b).
            let (mut a, mut b) = (lo, hi);
            for _ in 0..MAX_BISECT_ITERATIONS {
                if b - a <= tol {
                    return Ok(0.5 * (a + b));
                }
                let mid = 0.5 * (a + b);
                if f(mid)? > target {
                    b = mid;
                } else {
                    a = mid;
                }
            }
            Err(Error::NoConvergence { iterations: MAX_BISECT_ITERATIONS, width: b - a })
        }
    }
}

/// Evaluates a predictive system over a strictly increasing grid of labels.
///
/// Fails with a contract violation (naming the offending adjacent pair) when
/// the system's output is not monotone over the grid.
pub fn eval_on_grid<P: PredictiveSystem + ?Sized>(
    ps: &P,
    training: &LabeledSequence,
    x: f64,
    grid: &[f64],
) -> Result<DistributionEvaluation> {
    validate_grid(grid)?;
    let values = grid
        .iter()
        .map(|&y| ps.evaluate(training, x, y))
        .collect::<Result<Vec<_>>>()?;
    DistributionEvaluation::new(grid.to_vec(), values)
}
