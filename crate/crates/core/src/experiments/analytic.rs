use statrs::distribution::{Continuous, ContinuousCDF, Normal};

use crate::error::{invalid, Result};

fn std_normal() -> Normal {
    Normal::standard()
}

/// Gaussian tail `Q(x) = P[Z > x]`.
pub fn q_function(x: f64) -> f64 {
    std_normal().sf(x)
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Bit error probability of Gray-coded `M`-PAM with unit symbol energy in
/// real AWGN, at SNR per bit `γ_b` (dB). Every symbol-to-region transition is
/// weighted by its Hamming distance, so the result is exact rather than the
/// nearest-neighbor approximation.
pub fn analytic_pam_ber(order: usize, snr_per_bit_db: f64) -> Result<f64> {
    if ![2, 4, 8, 16].contains(&order) {
        return invalid(format!(
            "analytic PAM BER supports M in {{2, 4, 8, 16}}, got {order}"
        ));
    }
    let m = order as f64;
    let k = order.trailing_zeros() as usize;
    let gamma = db_to_linear(snr_per_bit_db);
    // Unit symbol energy: E_b = 1/k, σ² = E_b / (2γ_b).
    let sigma = (1.0 / (k as f64 * 2.0 * gamma)).sqrt();
    let scale = (3.0 / (m * m - 1.0)).sqrt();
    let level = |i: usize| (2.0 * i as f64 - (m - 1.0)) * scale;
    let gray = |i: usize| i ^ (i >> 1);
    let mut total = 0.0;
    for i in 0..order {
        let s = level(i);
        for j in 0..order {
            if i == j {
                continue;
            }
            let lo = if j == 0 {
                f64::NEG_INFINITY
            } else {
                level(j) - scale
            };
            let hi = if j == order - 1 {
                f64::INFINITY
            } else {
                level(j) + scale
            };
            let p = q_function((lo - s) / sigma) - q_function((hi - s) / sigma);
            total += p * (gray(i) ^ gray(j)).count_ones() as f64;
        }
    }
    Ok(total / (m * k as f64))
}

/// Square Gray-coded `M`-QAM: each rail is an independent `√M`-PAM at the same
/// SNR per bit.
pub fn analytic_qam_ber(order: usize, snr_per_bit_db: f64) -> Result<f64> {
    let root = (order as f64).sqrt().round() as usize;
    if root * root != order {
        return invalid(format!("QAM order must be square, got {order}"));
    }
    analytic_pam_ber(root, snr_per_bit_db)
}

/// Bit error probability of `M`-ary orthogonal signaling with coherent ML
/// detection at SNR per bit `γ_b` (dB).
pub fn analytic_orthogonal_ber(order: usize, snr_per_bit_db: f64) -> Result<f64> {
    if order < 2 || !order.is_power_of_two() {
        return invalid(format!(
            "orthogonal order must be a power of two >= 2, got {order}"
        ));
    }
    let k = order.trailing_zeros() as f64;
    let shift = (2.0 * k * db_to_linear(snr_per_bit_db)).sqrt();
    let n = std_normal();
    // P_c = ∫ φ(u) Φ(u + shift)^(M−1) du, composite Simpson over ±12σ.
    let (lo, hi, steps) = (-12.0f64, 12.0f64, 4800usize);
    let h = (hi - lo) / steps as f64;
    let f = |u: f64| n.pdf(u) * n.cdf(u + shift).powi(order as i32 - 1);
    let mut acc = f(lo) + f(hi);
    for i in 1..steps {
        acc += f(lo + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    let ps = (1.0 - acc * h / 3.0).max(0.0);
    Ok(ps * (order as f64 / 2.0) / (order as f64 - 1.0))
}
