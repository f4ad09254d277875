use super::constellation::{bits_to_index, index_to_bits, mld_detect};
use crate::error::{invalid, Result};
use crate::photometry::SpectralDistribution;

pub const BANDS: usize = 4;

/// `K[i][j]`: fraction of LED channel `j`'s optical power caught by receiver band `i`.
pub type CrosstalkMatrix = [[f64; BANDS]; BANDS];

/// Crosstalk of four LED spectra through four ideal unit-gain filter bands (nm).
pub fn crosstalk_matrix(
    spds: &[SpectralDistribution; BANDS],
    bands: &[(f64, f64); BANDS],
) -> Result<CrosstalkMatrix> {
    for (i, &(lo, hi)) in bands.iter().enumerate() {
        if !(lo < hi) {
            return invalid(format!("band {i} is empty: [{lo}, {hi}]"));
        }
        for &(lo2, hi2) in &bands[i + 1..] {
            if lo < hi2 && lo2 < hi {
                return invalid("receiver bands overlap");
            }
        }
    }
    let mut k = [[0.0; BANDS]; BANDS];
    for (j, spd) in spds.iter().enumerate() {
        let total = spd.integrate();
        if !(total > 0.0) {
            return invalid(format!("LED channel {j} has no optical power"));
        }
        for (i, &(lo, hi)) in bands.iter().enumerate() {
            k[i][j] = spd.integrate_range(lo, hi) / total;
        }
    }
    Ok(k)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CskConfig {
    pub crosstalk: CrosstalkMatrix,
    /// Time-average electrical power over all bands.
    pub avg_power: f64,
}

/// One-hot four-band intensity shift keying, two bits per symbol.
#[derive(Debug, Clone)]
pub struct Csk {
    cfg: CskConfig,
    amplitude: f64,
    /// Noiseless received vectors `K·p_i`.
    received: [[f64; BANDS]; BANDS],
}

impl Csk {
    pub fn new(cfg: CskConfig) -> Result<Self> {
        if cfg
            .crosstalk
            .iter()
            .flatten()
            .any(|&v| !(0.0..=1.0).contains(&v))
        {
            return invalid("crosstalk entries must lie in [0, 1]");
        }
        if !(cfg.avg_power > 0.0 && cfg.avg_power.is_finite()) {
            return invalid("CSK average power must be positive");
        }
        // One band is on at a time, so each symbol carries the full average power.
        let amplitude = cfg.avg_power.sqrt();
        let received =
            std::array::from_fn(|s| std::array::from_fn(|i| cfg.crosstalk[i][s] * amplitude));
        Ok(Self {
            cfg,
            amplitude,
            received,
        })
    }

    pub fn config(&self) -> &CskConfig {
        &self.cfg
    }

    /// Drive level of the active band.
    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn pattern(&self, symbol: usize) -> [f64; BANDS] {
        std::array::from_fn(|i| if i == symbol { self.amplitude } else { 0.0 })
    }

    pub fn received_points(&self) -> &[[f64; BANDS]; BANDS] {
        &self.received
    }

    /// `00` lights channel 0, `01` channel 1, and so on.
    pub fn modulate(&self, bits: &[bool]) -> Result<Vec<[f64; BANDS]>> {
        if !bits.len().is_multiple_of(2) {
            return invalid("CSK needs an even number of bits");
        }
        Ok(bits
            .chunks_exact(2)
            .map(|c| self.pattern(bits_to_index(c)))
            .collect())
    }

    pub fn detect(&self, rx: &[f64; BANDS]) -> usize {
        mld_detect(rx, &self.received)
    }

    pub fn demodulate_into(&self, rx: &[[f64; BANDS]], out: &mut Vec<bool>) {
        for r in rx {
            index_to_bits(self.detect(r), 2, out);
        }
    }

    pub fn demodulate(&self, rx: &[[f64; BANDS]]) -> Vec<bool> {
        let mut out = Vec::with_capacity(rx.len() * 2);
        self.demodulate_into(rx, &mut out);
        out
    }
}

/// `K·s` for one symbol vector.
pub fn apply_crosstalk(k: &CrosstalkMatrix, s: &[f64; BANDS]) -> [f64; BANDS] {
    std::array::from_fn(|i| (0..BANDS).map(|j| k[i][j] * s[j]).sum())
}
