//! General colour rendering index by the CIE 13.3 test-sample method.
//!
//! The reference illuminant is a blackbody at the test source's CCT. Sample
//! colours under the test source are Von Kries adapted to the reference white
//! in CIE 1960 `(u, v)` and compared in CIE 1964 `U*V*W*`.

use super::colorimetry::{chromaticity, uv_1960, TristimulusXYZ};
use super::spd::{planckian_spd, SpectralDistribution};
use super::tables::{CieTables, TCS_COUNT};
use crate::error::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct CriReport {
    /// `R_1 … R_14`
    pub special: [f64; TCS_COUNT],
    /// `R_a`, the mean of `R_1 … R_8`.
    pub general: f64,
    pub reference_cct: f64,
    /// Test source distance from the Planckian locus in `(u, v)`.
    pub duv: f64,
}

struct Adapted {
    u: f64,
    v: f64,
    y: f64,
}

fn cd(u: f64, v: f64) -> (f64, f64) {
    (
        (4.0 - u - 10.0 * v) / v,
        (1.708 * v + 0.404 - 1.481 * u) / v,
    )
}

fn uvw(sample: &Adapted, white: (f64, f64)) -> [f64; 3] {
    let w = 25.0 * sample.y.cbrt() - 17.0;
    [
        13.0 * w * (sample.u - white.0),
        13.0 * w * (sample.v - white.1),
        w,
    ]
}

impl CieTables {
    fn sample_colours(
        &self,
        source: &SpectralDistribution,
    ) -> Result<(TristimulusXYZ, Vec<TristimulusXYZ>)> {
        let white = self.tristimulus(source);
        let k = 100.0 / white.y;
        let samples = (0..TCS_COUNT)
            .map(|i| {
                self.tristimulus_weighted(source.values(), Some(self.tcs(i)))
                    .scaled(k)
            })
            .collect();
        Ok((white.scaled(k), samples))
    }

    pub fn cri(&self, spd: &SpectralDistribution) -> Result<CriReport> {
        let cct = self.cct(spd)?;
        let reference = planckian_spd(cct.kelvin)?;

        let (test_white, test_samples) = self.sample_colours(spd)?;
        let (ref_white, ref_samples) = self.sample_colours(&reference)?;

        let uv = |xyz: &TristimulusXYZ| -> Result<(f64, f64)> {
            let (x, y) = chromaticity(xyz)?;
            Ok(uv_1960(x, y))
        };
        let (uk, vk) = uv(&test_white)?;
        let (ur, vr) = uv(&ref_white)?;
        let (ck, dk) = cd(uk, vk);
        let (cr, dr) = cd(ur, vr);

        let mut special = [0.0; TCS_COUNT];
        for (i, r) in special.iter_mut().enumerate() {
            let (uki, vki) = uv(&test_samples[i])?;
            let (cki, dki) = cd(uki, vki);
            let denom = 16.518 + 1.481 * (cr / ck) * cki - (dr / dk) * dki;
            let adapted = Adapted {
                u: (10.872 + 0.404 * (cr / ck) * cki - 4.0 * (dr / dk) * dki) / denom,
                v: 5.520 / denom,
                y: test_samples[i].y,
            };
            let (uri, vri) = uv(&ref_samples[i])?;
            let refc = Adapted {
                u: uri,
                v: vri,
                y: ref_samples[i].y,
            };
            let a = uvw(&adapted, (ur, vr));
            let b = uvw(&refc, (ur, vr));
            let de = ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt();
            *r = 100.0 - 4.6 * de;
        }
        let general = special[..8].iter().sum::<f64>() / 8.0;
        Ok(CriReport {
            special,
            general,
            reference_cct: cct.kelvin,
            duv: cct.duv,
        })
    }
}
