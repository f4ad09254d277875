use crate::error::{invalid, Result};

/// Peak-to-average power ratio `10·log10(max x² / mean x²)` in dB.
pub fn papr_db(x: &[f64]) -> Result<f64> {
    if x.is_empty() {
        return invalid("PAPR of an empty frame");
    }
    let (peak, sum) = x
        .iter()
        .fold((0.0f64, 0.0), |(p, s), v| (p.max(v * v), s + v * v));
    if sum == 0.0 {
        return invalid("PAPR of an all-zero frame");
    }
    Ok(10.0 * (peak * x.len() as f64 / sum).log10())
}
