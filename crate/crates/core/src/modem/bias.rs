use crate::error::{invalid, Result};

/// `μ = √(10^(dB/10) − 1)`: the DC level is `μ` standard deviations of the signal.
pub fn dc_bias_factor(bias_db: f64) -> Result<f64> {
    if !(bias_db >= 0.0) {
        return invalid(format!("DC bias must be nonnegative, got {bias_db} dB"));
    }
    Ok((10f64.powf(bias_db / 10.0) - 1.0).sqrt())
}

/// DC level `μ·√P` for a signal of average power `signal_power`.
pub fn dc_level(bias_db: f64, signal_power: f64) -> Result<f64> {
    if !(signal_power >= 0.0) {
        return invalid("signal power must be nonnegative");
    }
    Ok(dc_bias_factor(bias_db)? * signal_power.sqrt())
}

/// Adds `dc` to every sample and, if `clip`, zeroes what is still negative.
/// Returns the number of clipped samples.
pub fn bias_and_clip(frame: &mut [f64], dc: f64, clip: bool) -> usize {
    let mut clipped = 0;
    for s in frame.iter_mut() {
        *s += dc;
        if clip && *s < 0.0 {
            *s = 0.0;
            clipped += 1;
        }
    }
    clipped
}
