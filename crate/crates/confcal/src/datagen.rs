//! Seeded generators for the toy data model and its non-identically
//! distributed variant, plus the CSV dataset format.
//!
//! Randomness comes from ChaCha8 with one substream per purpose (objects,
//! noise, taus), so extending one stream never perturbs the others and the
//! output is a pure function of the configuration.

use std::io::{BufRead, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::{LabeledSequence, Observation};

const STREAM_OBJECTS: u64 = 0;
const STREAM_NOISE: u64 = 1;
const STREAM_TAU: u64 = 2;

/// How the objects are generated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DriftMode {
    /// Objects drawn independently from U[−1, 1].
    IidUniform,
    /// Objects follow the deterministic drift x_i = sin(i/50), i = 1, 2, …:
    /// identical conditional label law, non-identically distributed objects.
    DeterministicDrift,
}

/// Configuration of the toy generator: labels are `slope·x + ε` with
/// ε ~ N(0, (|x|/2)²), all draws independent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToyConfig {
    pub n: usize,
    pub seed: u64,
    pub slope: f64,
    pub drift: DriftMode,
}

impl ToyConfig {
    pub fn new(n: usize, seed: u64) -> Self {
        ToyConfig { n, seed, slope: 2.0, drift: DriftMode::IidUniform }
    }

    pub fn with_drift(mut self, drift: DriftMode) -> Self {
        self.drift = drift;
        self
    }
}

fn stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Generates a toy dataset deterministically from its configuration.
pub fn gen_toy(config: &ToyConfig) -> LabeledSequence {
    let mut x_rng = stream(config.seed, STREAM_OBJECTS);
    let mut noise_rng = stream(config.seed, STREAM_NOISE);
    let mut items = Vec::with_capacity(config.n);
    for i in 0..config.n {
        let x = match config.drift {
            DriftMode::IidUniform => x_rng.random_range(-1.0..=1.0),
            DriftMode::DeterministicDrift => ((i + 1) as f64 / 50.0).sin(),
        };
        let z: f64 = StandardNormal.sample(&mut noise_rng);
        let y = config.slope * x + z * (x.abs() / 2.0);
        items.push(Observation { x, y });
    }
    LabeledSequence::new(items)
}

/// Independent uniform τ draws from the seed's dedicated substream.
pub fn gen_taus(seed: u64, count: usize) -> Vec<f64> {
    let mut rng = stream(seed, STREAM_TAU);
    (0..count).map(|_| rng.random::<f64>()).collect()
}

/// Writes the dataset CSV: header `x,y`, one row per observation, 17
/// significant digits, LF line endings.
pub fn write_csv<W: Write>(mut w: W, seq: &LabeledSequence) -> std::io::Result<()> {
    w.write_all(b"x,y\n")?;
    for obs in seq {
        writeln!(w, "{:.16e},{:.16e}", obs.x, obs.y)?;
    }
    Ok(())
}

/// Reads a dataset CSV produced by [`write_csv`]; round-trips losslessly.
pub fn read_csv<R: BufRead>(r: R) -> Result<LabeledSequence> {
    let mut lines = r.lines();
    match lines.next() {
        Some(Ok(header)) if header.trim() == "x,y" => {}
        Some(Ok(header)) => {
            return Err(Error::invalid(format!("expected header 'x,y', got '{header}'")))
        }
        Some(Err(e)) => return Err(e.into()),
        None => return Err(Error::invalid("empty dataset file")),
    }
    let mut items = Vec::new();
    for (lineno, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split(',');
        let (x, y) = match (fields.next(), fields.next(), fields.next()) {
            (Some(x), Some(y), None) => (x, y),
            _ => {
                return Err(Error::invalid(format!(
                    "line {}: expected two comma-separated fields",
                    lineno + 2
                )))
            }
        };
        let parse = |s: &str, what: &str| {
            s.trim().parse::<f64>().map_err(|e| {
                Error::invalid(format!("line {}: bad {what} value '{s}': {e}", lineno + 2))
            })
        };
        items.push(Observation::new(parse(x, "x")?, parse(y, "y")?)?);
    }
    Ok(LabeledSequence::new(items))
}
