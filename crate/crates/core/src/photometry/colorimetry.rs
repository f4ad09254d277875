use super::spd::{planck_radiance, wavelengths, SpectralDistribution};
use super::tables::CieTables;
use crate::error::{invalid, Error, Result};

/// Maximum luminous efficacy of radiation, lm/W.
pub const LUMINOUS_EFFICACY: f64 = 683.0;

const CCT_MIN: f64 = 1000.0;
const CCT_MAX: f64 = 20000.0;
const CCT_SCAN_STEP: f64 = 10.0;
const CCT_TOLERANCE: f64 = 0.1;
const DUV_LIMIT: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TristimulusXYZ {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl TristimulusXYZ {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn scaled(&self, k: f64) -> Self {
        Self {
            x: self.x * k,
            y: self.y * k,
            z: self.z * k,
        }
    }
}

/// CIE 1931 `(x, y)` chromaticity.
pub fn chromaticity(xyz: &TristimulusXYZ) -> Result<(f64, f64)> {
    let sum = xyz.x + xyz.y + xyz.z;
    if !(sum > 0.0) {
        return Err(Error::UndefinedChromaticity);
    }
    Ok((xyz.x / sum, xyz.y / sum))
}

/// CIE 1960 UCS `(u, v)` from `(x, y)`.
pub fn uv_1960(x: f64, y: f64) -> (f64, f64) {
    let d = -2.0 * x + 12.0 * y + 3.0;
    (4.0 * x / d, 6.0 * y / d)
}

/// Illuminance in lux from a flux spread over `area_m2`.
pub fn illuminance(flux_lm: f64, area_m2: f64) -> Result<f64> {
    if !(area_m2 > 0.0) {
        return invalid("illuminated area must be positive");
    }
    Ok(flux_lm / area_m2)
}

/// Correlated colour temperature and the distance to the Planckian locus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cct {
    pub kelvin: f64,
    /// Euclidean `(u, v)` distance to the nearest locus point.
    pub duv: f64,
}

impl CieTables {
    /// `683·Σ S(λ)·V(λ)·Δλ` with `Δλ = 1 nm`.
    pub fn luminous_flux(&self, spd: &SpectralDistribution) -> f64 {
        LUMINOUS_EFFICACY
            * spd
                .values()
                .iter()
                .zip(&self.y_bar)
                .map(|(s, v)| s * v)
                .sum::<f64>()
    }

    pub fn tristimulus(&self, spd: &SpectralDistribution) -> TristimulusXYZ {
        self.tristimulus_weighted(spd.values(), None)
    }

    /// Tristimulus values of `source` (optionally times a reflectance).
    pub(crate) fn tristimulus_weighted(
        &self,
        source: &[f64],
        reflectance: Option<&[f64]>,
    ) -> TristimulusXYZ {
        let mut xyz = TristimulusXYZ::new(0.0, 0.0, 0.0);
        for i in 0..source.len() {
            let s = source[i] * reflectance.map_or(1.0, |r| r[i]);
            xyz.x += s * self.x_bar[i];
            xyz.y += s * self.y_bar[i];
            xyz.z += s * self.z_bar[i];
        }
        xyz
    }

    /// `(u, v)` of a blackbody at `kelvin` (unnormalized radiance suffices).
    pub fn planck_uv(&self, kelvin: f64) -> (f64, f64) {
        let s: Vec<f64> = wavelengths().map(|l| planck_radiance(l, kelvin)).collect();
        let xyz = self.tristimulus_weighted(&s, None);
        let sum = xyz.x + xyz.y + xyz.z;
        uv_1960(xyz.x / sum, xyz.y / sum)
    }

    fn locus(&self) -> &[(f64, f64, f64)] {
        self.locus.get_or_init(|| {
            let steps = ((CCT_MAX - CCT_MIN) / CCT_SCAN_STEP).round() as usize;
            (0..=steps)
                .map(|i| {
                    let t = CCT_MIN + i as f64 * CCT_SCAN_STEP;
                    let (u, v) = self.planck_uv(t);
                    (t, u, v)
                })
                .collect()
        })
    }

    /// CCT of a chromaticity: coarse scan of the locus at 10 K, then ternary
    /// search on the bracketing interval down to 0.1 K.
    pub fn cct_from_xy(&self, x: f64, y: f64) -> Result<Cct> {
        let (u, v) = uv_1960(x, y);
        let dist = |(lu, lv): (f64, f64)| ((u - lu).powi(2) + (v - lv).powi(2)).sqrt();
        let (best, _) = self
            .locus()
            .iter()
            .map(|&(t, lu, lv)| (t, dist((lu, lv))))
            .fold(
                (CCT_MIN, f64::MAX),
                |acc, cur| if cur.1 < acc.1 { cur } else { acc },
            );
        let (mut lo, mut hi) = (
            (best - CCT_SCAN_STEP).max(CCT_MIN),
            (best + CCT_SCAN_STEP).min(CCT_MAX),
        );
        while hi - lo > CCT_TOLERANCE {
            let m1 = lo + (hi - lo) / 3.0;
            let m2 = hi - (hi - lo) / 3.0;
            if dist(self.planck_uv(m1)) <= dist(self.planck_uv(m2)) {
                hi = m2;
            } else {
                lo = m1;
            }
        }
        let kelvin = 0.5 * (lo + hi);
        let duv = dist(self.planck_uv(kelvin));
        if duv > DUV_LIMIT {
            return Err(Error::NoMeaningfulCct { duv });
        }
        Ok(Cct { kelvin, duv })
    }

    pub fn cct(&self, spd: &SpectralDistribution) -> Result<Cct> {
        let (x, y) = chromaticity(&self.tristimulus(spd))?;
        self.cct_from_xy(x, y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::photometry::{h_model_spd, planckian_spd, LedChannel};

    fn tables() -> &'static CieTables {
        CieTables::standard()
    }

    #[test]
    fn monochromatic_555_gives_683_lm() {
        let spd = SpectralDistribution::from_fn(|l| if l == 555.0 { 1.0 } else { 0.0 });
        assert!((tables().luminous_flux(&spd) - 683.0).abs() < 1e-9);
        assert_eq!(tables().luminous_flux(&SpectralDistribution::zeros()), 0.0);
    }

    #[test]
    fn flux_is_linear() {
        let a = h_model_spd(&LedChannel::Red.params());
        let b = h_model_spd(&LedChannel::Blue.params());
        let mix = &a.scaled(2.5) + &b.scaled(0.75);
        let direct = 2.5 * tables().luminous_flux(&a) + 0.75 * tables().luminous_flux(&b);
        assert!((tables().luminous_flux(&mix) - direct).abs() < 1e-9 * direct);
    }

    #[test]
    fn illuminance_examples() {
        assert_eq!(illuminance(683.0, 1.0).unwrap(), 683.0);
        assert_eq!(illuminance(0.0, 2.0).unwrap(), 0.0);
        assert!(illuminance(1.0, 0.0).is_err());
    }

    #[test]
    fn chromaticity_examples() {
        let (x, y) = chromaticity(&TristimulusXYZ::new(1.0, 1.0, 1.0)).unwrap();
        assert!((x - 1.0 / 3.0).abs() < 1e-15 && (y - 1.0 / 3.0).abs() < 1e-15);
        let (x, y) =
            chromaticity(&tables().tristimulus(&SpectralDistribution::from_fn(|_| 1.0))).unwrap();
        assert!(
            (x - 0.3333).abs() < 5e-4 && (y - 0.3333).abs() < 5e-4,
            "{x} {y}"
        );
        assert_eq!(
            chromaticity(&TristimulusXYZ::new(0.0, 0.0, 0.0)),
            Err(Error::UndefinedChromaticity)
        );
        let xyz = TristimulusXYZ::new(0.3, 0.5, 0.9);
        let a = chromaticity(&xyz).unwrap();
        let b = chromaticity(&xyz.scaled(17.0)).unwrap();
        assert!((a.0 - b.0).abs() < 1e-15 && (a.1 - b.1).abs() < 1e-15);
    }

    #[test]
    fn red_channel_sits_near_spectral_locus() {
        let (x, y) =
            chromaticity(&tables().tristimulus(&h_model_spd(&LedChannel::Red.params()))).unwrap();
        // monochromatic 630 nm is (0.7079, 0.2920)
        assert!(x > 0.68 && y < 0.32, "{x} {y}");
        assert!(x + y > 0.99);
    }

    #[test]
    fn illuminant_a_chromaticity() {
        let (x, y) = chromaticity(&tables().tristimulus(&planckian_spd(2856.0).unwrap())).unwrap();
        assert!(
            (x - 0.4476).abs() < 0.002 && (y - 0.4074).abs() < 0.002,
            "{x} {y}"
        );
    }

    #[test]
    fn cct_round_trip_on_locus() {
        for t in [2500.0, 2856.0, 3000.0, 3500.0, 4000.0, 5000.0] {
            let c = tables().cct(&planckian_spd(t).unwrap()).unwrap();
            assert!((c.kelvin - t).abs() / t < 0.005, "{t}: {c:?}");
            assert!(c.duv < 1e-6);
        }
    }

    #[test]
    fn far_from_locus_is_rejected() {
        let blue = h_model_spd(&LedChannel::Blue.params());
        assert!(matches!(
            tables().cct(&blue),
            Err(Error::NoMeaningfulCct { .. })
        ));
        assert_eq!(
            tables().cct(&SpectralDistribution::zeros()),
            Err(Error::UndefinedChromaticity)
        );
    }
}
