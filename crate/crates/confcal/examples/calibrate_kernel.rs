//! Split-conformal calibration of a kernel predictive system on toy data.

use confcal::calibrate::{scps_grid, SplitSpec};
use confcal::datagen::{gen_toy, ToyConfig};
use confcal::evaluate::crps;
use confcal::predictors::{NwParams, NwSystem};

fn main() -> confcal::Result<()> {
    let data = gen_toy(&ToyConfig::new(300, 7));
    let base = NwSystem::new(NwParams::new(0.1, 0.1)?);
    let grid: Vec<f64> = (0..1001).map(|i| -5.0 + i as f64 * 0.01).collect();
    // First 200 observations train the base; the rest calibrate it.
    let dist = scps_grid(&base, &data, SplitSpec::new(200), 0.3, 0.5, &grid)?;
    let score = crps(&dist, 0.6)?;
    println!("CRPS at the candidate label: {}", score.value);
    Ok(())
}
