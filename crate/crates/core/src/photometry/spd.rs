use std::ops::{Add, Mul};

use crate::error::{invalid, Result};

pub const GRID_START_NM: f64 = 380.0;
pub const GRID_END_NM: f64 = 780.0;
pub const GRID_LEN: usize = 401;

/// Wavelengths of the shared 1 nm grid.
pub fn wavelengths() -> impl Iterator<Item = f64> {
    (0..GRID_LEN).map(|i| GRID_START_NM + i as f64)
}

/// Spectral power density sampled on the shared grid (W/nm).
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDistribution {
    values: Vec<f64>,
}

impl SpectralDistribution {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() != GRID_LEN {
            return invalid(format!(
                "spectrum needs {GRID_LEN} samples, got {}",
                values.len()
            ));
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return invalid("spectral values must be finite and nonnegative");
        }
        Ok(Self { values })
    }

    pub fn zeros() -> Self {
        Self {
            values: vec![0.0; GRID_LEN],
        }
    }

    /// Samples `f(λ)`; negative values are clamped to zero.
    pub fn from_fn(f: impl Fn(f64) -> f64) -> Self {
        Self {
            values: wavelengths().map(|l| f(l).max(0.0)).collect(),
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn at(&self, wavelength_nm: f64) -> Option<f64> {
        let i = (wavelength_nm - GRID_START_NM).round();
        (0.0..GRID_LEN as f64)
            .contains(&i)
            .then(|| self.values[i as usize])
    }

    /// Trapezoidal integral over the whole grid.
    pub fn integrate(&self) -> f64 {
        self.integrate_range(GRID_START_NM, GRID_END_NM)
    }

    /// Trapezoidal integral over `[lo, hi]`, linearly interpolating at
    /// band edges that fall between grid points.
    pub fn integrate_range(&self, lo: f64, hi: f64) -> f64 {
        let lo = lo.max(GRID_START_NM);
        let hi = hi.min(GRID_END_NM);
        if hi <= lo {
            return 0.0;
        }
        let value = |l: f64| {
            let x = l - GRID_START_NM;
            let i = (x.floor() as usize).min(GRID_LEN - 2);
            let f = x - i as f64;
            self.values[i] * (1.0 - f) + self.values[i + 1] * f
        };
        let mut knots = vec![lo];
        let first = lo.floor() as i64 + 1;
        let last = hi.ceil() as i64 - 1;
        knots.extend((first..=last).map(|l| l as f64));
        knots.push(hi);
        knots
            .windows(2)
            .map(|w| 0.5 * (value(w[0]) + value(w[1])) * (w[1] - w[0]))
            .sum()
    }

    /// Grid wavelength holding the maximum value (first one on ties).
    pub fn peak_wavelength(&self) -> f64 {
        let (i, _) = self
            .values
            .iter()
            .enumerate()
            .fold(
                (0, f64::MIN),
                |best, (i, &v)| if v > best.1 { (i, v) } else { best },
            );
        GRID_START_NM + i as f64
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            values: self.values.iter().map(|v| v * factor).collect(),
        }
    }
}

impl Add for &SpectralDistribution {
    type Output = SpectralDistribution;

    fn add(self, rhs: Self) -> SpectralDistribution {
        SpectralDistribution {
            values: self
                .values
                .iter()
                .zip(&rhs.values)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Mul<f64> for &SpectralDistribution {
    type Output = SpectralDistribution;

    fn mul(self, rhs: f64) -> SpectralDistribution {
        self.scaled(rhs)
    }
}

impl std::iter::Sum for SpectralDistribution {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(SpectralDistribution::zeros(), |acc, s| &acc + &s)
    }
}

/// Asymmetric Gaussian-composite LED spectrum parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HModelParams {
    pub peak_nm: f64,
    /// half spectral width below the peak
    pub width_left_nm: f64,
    /// half spectral width above the peak
    pub width_right_nm: f64,
    pub k1: f64,
    pub k2: f64,
}

impl HModelParams {
    pub fn new(
        peak_nm: f64,
        width_left_nm: f64,
        width_right_nm: f64,
        k1: f64,
        k2: f64,
    ) -> Result<Self> {
        if !(width_left_nm > 0.0 && width_right_nm > 0.0) {
            return invalid("spectral half widths must be positive");
        }
        if !(k1 >= 0.0 && k2 >= 1.0) || !peak_nm.is_finite() {
            return invalid("shape parameters need k1 >= 0 and k2 >= 1");
        }
        Ok(Self {
            peak_nm,
            width_left_nm,
            width_right_nm,
            k1,
            k2,
        })
    }

    /// Relative power at `wavelength_nm`, unit at the peak.
    pub fn evaluate(&self, wavelength_nm: f64) -> f64 {
        let width = if wavelength_nm < self.peak_nm {
            self.width_left_nm
        } else {
            self.width_right_nm
        };
        let d = wavelength_nm - self.peak_nm;
        let g = (-(d * d) / (width * width)).exp();
        (g + self.k1 * g.powf(self.k2)) / (1.0 + self.k1)
    }
}

/// Color channels of the RAGB LED, in stream order. Channels are identified
/// by peak wavelength: 632.5 nm red, 600 nm amber, 517.7 nm green, 453 nm
/// blue.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LedChannel {
    Red,
    Amber,
    Green,
    Blue,
}

impl LedChannel {
    pub const ALL: [LedChannel; 4] = [
        LedChannel::Red,
        LedChannel::Amber,
        LedChannel::Green,
        LedChannel::Blue,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            LedChannel::Red => "red",
            LedChannel::Amber => "amber",
            LedChannel::Green => "green",
            LedChannel::Blue => "blue",
        }
    }

    /// Fitted shape of the LUXEON C Color channel.
    pub fn params(&self) -> HModelParams {
        let (p, l, r, k1, k2) = match self {
            LedChannel::Red => (632.5, 23.84, 14.74, 2.0, 6.0),
            LedChannel::Amber => (600.0, 19.66, 14.97, 2.0, 5.0),
            LedChannel::Green => (517.7, 29.38, 45.21, 2.0, 3.0),
            LedChannel::Blue => (453.0, 18.99, 25.5, 2.0, 5.0),
        };
        HModelParams {
            peak_nm: p,
            width_left_nm: l,
            width_right_nm: r,
            k1,
            k2,
        }
    }

    /// Receiver filter passband matched to this channel, in nm.
    pub fn filter_band(&self) -> (f64, f64) {
        match self {
            LedChannel::Red => (612.0, 680.0),
            LedChannel::Amber => (575.0, 612.0),
            LedChannel::Green => (483.0, 575.0),
            LedChannel::Blue => (400.0, 483.0),
        }
    }
}

/// Unit-peak H-model spectrum sampled on the grid.
pub fn h_model_spd(params: &HModelParams) -> SpectralDistribution {
    SpectralDistribution::from_fn(|l| params.evaluate(l))
}

/// Rescales `spd` so its trapezoidal integral equals `optical_watts`.
pub fn scale_to_power(
    spd: &SpectralDistribution,
    optical_watts: f64,
) -> Result<SpectralDistribution> {
    if !(optical_watts >= 0.0) {
        return invalid("optical power must be nonnegative");
    }
    let total = spd.integrate();
    if total <= 0.0 {
        return invalid("cannot scale a spectrum with zero integral");
    }
    Ok(spd.scaled(optical_watts / total))
}

/// First radiation constant for spectral radiance, 2hc² (W·m²/sr).
const C1L: f64 = 1.191_042_972e-16;
/// Second radiation constant (m·K).
pub(crate) const C2: f64 = 1.4388e-2;

pub(crate) fn planck_radiance(wavelength_nm: f64, kelvin: f64) -> f64 {
    let l = wavelength_nm * 1e-9;
    C1L / (l.powi(5) * ((C2 / (l * kelvin)).exp_m1()))
}

/// Blackbody spectrum at `kelvin`, normalized to unit peak on the grid.
pub fn planckian_spd(kelvin: f64) -> Result<SpectralDistribution> {
    if !(1000.0..=20000.0).contains(&kelvin) {
        return invalid(format!(
            "blackbody temperature {kelvin} K outside 1000-20000 K"
        ));
    }
    let raw = SpectralDistribution::from_fn(|l| planck_radiance(l, kelvin));
    let peak = raw.max_value();
    Ok(raw.scaled(1.0 / peak))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn h_model_peak_and_shoulder() {
        for ch in LedChannel::ALL {
            let p = ch.params();
            assert_eq!(p.evaluate(p.peak_nm), 1.0);
        }
        let red = LedChannel::Red.params();
        assert_eq!(
            (
                red.peak_nm,
                red.width_left_nm,
                red.width_right_nm,
                red.k1,
                red.k2
            ),
            (632.5, 23.84, 14.74, 2.0, 6.0)
        );
        let expected = ((-1.0f64).exp() + 2.0 * (-6.0f64).exp()) / 3.0;
        assert!((red.evaluate(red.peak_nm + red.width_right_nm) - expected).abs() < 1e-12);
        assert!((expected - 0.124279).abs() < 1e-6);
    }

    #[test]
    fn h_model_grid_peak() {
        // integer peaks land exactly on the grid
        let spd = h_model_spd(&LedChannel::Amber.params());
        assert_eq!(spd.at(600.0), Some(1.0));
        assert_eq!(spd.peak_wavelength(), 600.0);
        let red = h_model_spd(&LedChannel::Red.params());
        assert!((red.peak_wavelength() - 632.5).abs() <= 0.5);
    }

    #[test]
    fn params_validation() {
        assert!(HModelParams::new(500.0, 0.0, 10.0, 1.0, 2.0).is_err());
        assert!(HModelParams::new(500.0, 10.0, 10.0, -1.0, 2.0).is_err());
        assert!(HModelParams::new(500.0, 10.0, 10.0, 1.0, 0.5).is_err());
        assert!(HModelParams::new(500.0, 10.0, 10.0, 1.0, 2.0).is_ok());
    }

    #[test]
    fn scaling() {
        let spd = h_model_spd(&LedChannel::Green.params());
        let s = scale_to_power(&spd, 25.0).unwrap();
        assert!((s.integrate() - 25.0).abs() < 25.0 * 1e-9);
        let z = scale_to_power(&spd, 0.0).unwrap();
        assert!(z.values().iter().all(|&v| v == 0.0));
        let d = scale_to_power(&spd, 50.0).unwrap();
        assert!(d
            .values()
            .iter()
            .zip(s.values())
            .all(|(a, b)| *a == 2.0 * b));
        assert!(scale_to_power(&SpectralDistribution::zeros(), 1.0).is_err());
    }

    #[test]
    fn band_integration() {
        let flat = SpectralDistribution::from_fn(|_| 1.0);
        assert!((flat.integrate() - 400.0).abs() < 1e-12);
        assert!((flat.integrate_range(400.0, 483.0) - 83.0).abs() < 1e-12);
        assert!((flat.integrate_range(400.5, 401.25) - 0.75).abs() < 1e-12);
        assert_eq!(flat.integrate_range(800.0, 900.0), 0.0);
    }

    #[test]
    fn planck_peak_moves_blue_with_temperature() {
        let mut last = f64::MAX;
        for t in [1500.0, 3000.0, 5000.0, 7000.0] {
            let s = planckian_spd(t).unwrap();
            assert!((s.max_value() - 1.0).abs() < 1e-15);
            assert!(s.peak_wavelength() <= last);
            last = s.peak_wavelength();
        }
        assert!(planckian_spd(500.0).is_err());
        assert!(planckian_spd(25000.0).is_err());
    }
}
