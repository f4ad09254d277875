use rayon::prelude::*;
use serde::Serialize;

use crate::channel::{los_gain, AwgnSpec, RoomGeometry};
use crate::error::{invalid, Result};
use crate::modem::{dc_bias_factor, CrosstalkMatrix, QctConfig, QctModem, BANDS};
use crate::photometry::{CieTables, SpectralDistribution};
use crate::rng::substream;

/// How LED channels are driven. Electrical power is `E[i²]` of the drive
/// signal and emitted optical power is `E[i]` (unit slope).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EmissionScheme {
    /// Every channel continuously biased at `bias_db`.
    Qct { bias_db: f64 },
    /// One channel on at a time with duty cycle ¼.
    Csk { crosstalk: CrosstalkMatrix },
}

impl EmissionScheme {
    pub fn name(&self) -> &'static str {
        match self {
            EmissionScheme::Qct { .. } => "qct",
            EmissionScheme::Csk { .. } => "csk",
        }
    }
}

/// Drive statistics of one color channel at electrical power `P_e`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelDrive {
    /// Time-average optical power.
    pub mean: f64,
    /// RMS of the data-bearing part.
    pub signal_rms: f64,
    /// Level while the channel is on (CSK) or the DC level (QCT).
    pub peak: f64,
}

pub fn channel_drive(scheme: &EmissionScheme, electrical_power: f64) -> Result<ChannelDrive> {
    if !(electrical_power >= 0.0) {
        return invalid("electrical power must be nonnegative");
    }
    Ok(match scheme {
        EmissionScheme::Qct { bias_db } => {
            let mu2 = dc_bias_factor(*bias_db)?.powi(2);
            let mean = (electrical_power * mu2 / (mu2 + 1.0)).sqrt();
            ChannelDrive {
                mean,
                signal_rms: (electrical_power / (mu2 + 1.0)).sqrt(),
                peak: mean,
            }
        }
        EmissionScheme::Csk { .. } => {
            let on = (BANDS as f64 * electrical_power).sqrt();
            ChannelDrive {
                mean: on / BANDS as f64,
                signal_rms: on,
                peak: on,
            }
        }
    })
}

/// A scalar field over the floor grid. `values[j][i]` sits at `(xs[i], ys[j])`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HeatMap {
    pub spacing: f64,
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub values: Vec<Vec<f64>>,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
}

impl HeatMap {
    pub fn new(spacing: f64, xs: Vec<f64>, ys: Vec<f64>, values: Vec<Vec<f64>>) -> Self {
        let flat: Vec<f64> = values.iter().flatten().copied().collect();
        let min = flat.iter().copied().fold(f64::INFINITY, f64::min);
        let max = flat.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mean = flat.iter().sum::<f64>() / flat.len() as f64;
        Self {
            spacing,
            xs,
            ys,
            values,
            min,
            max,
            mean,
        }
    }

    pub fn cells(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.ys
            .iter()
            .zip(&self.values)
            .flat_map(move |(&y, row)| self.xs.iter().zip(row).map(move |(&x, &v)| (x, y, v)))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoomMaps {
    pub scheme: String,
    /// Illuminance relative to the peak of the same room driven unmodulated at full budget.
    pub lux: HeatMap,
    /// Absolute floor illuminance, lx.
    pub lux_absolute: HeatMap,
    pub snr_db: HeatMap,
}

/// Per-cell LOS gains, `[cell][led]`, cells in row-major `(y, x)` order.
fn gain_table(room: &RoomGeometry, xs: &[f64], ys: &[f64]) -> Result<Vec<Vec<f64>>> {
    ys.iter()
        .flat_map(|&y| xs.iter().map(move |&x| [x, y]))
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&p| {
            room.luminaires
                .iter()
                .map(|l| los_gain(l, p, &room.receiver))
                .collect()
        })
        .collect()
}

fn to_grid(flat: Vec<f64>, width: usize) -> Vec<Vec<f64>> {
    flat.chunks(width).map(<[f64]>::to_vec).collect()
}

/// Luminous efficacy of radiation (lm/W) of each channel spectrum.
fn efficacies(tables: &CieTables, spectra: &[SpectralDistribution; BANDS]) -> Result<[f64; BANDS]> {
    let mut out = [0.0; BANDS];
    for (o, s) in out.iter_mut().zip(spectra) {
        let p = s.integrate();
        if !(p > 0.0) {
            return invalid("LED spectrum has no power");
        }
        *o = tables.luminous_flux(s) / p;
    }
    Ok(out)
}

/// Floor illuminance when each channel emits `optical(led, channel)` watts.
fn lux_field(
    room: &RoomGeometry,
    gains: &[Vec<f64>],
    eff: &[f64; BANDS],
    optical: impl Fn(usize, usize) -> f64 + Sync,
) -> Vec<f64> {
    let area = room.receiver.area;
    let per_led: Vec<f64> = (0..room.luminaires.len())
        .map(|l| (0..BANDS).map(|c| optical(l, c) * eff[c]).sum())
        .collect();
    gains
        .iter()
        .map(|g| g.iter().zip(&per_led).map(|(h, lm)| h * lm).sum::<f64>() / area)
        .collect()
}

/// Lux and SNR maps over the receiver plane for one scheme. `spectra` are the
/// red, amber, green and blue channel shapes.
pub fn run_room_maps(
    room: &RoomGeometry,
    scheme: &EmissionScheme,
    spectra: &[SpectralDistribution; BANDS],
    noise: &AwgnSpec,
    tables: &CieTables,
) -> Result<RoomMaps> {
    room.validate()?;
    let (xs, ys) = room.grid();
    let gains = gain_table(room, &xs, &ys)?;
    let eff = efficacies(tables, spectra)?;

    let drives: Vec<[ChannelDrive; BANDS]> = room
        .luminaires
        .iter()
        .map(|l| {
            let mut d = [ChannelDrive {
                mean: 0.0,
                signal_rms: 0.0,
                peak: 0.0,
            }; BANDS];
            for (c, slot) in d.iter_mut().enumerate() {
                *slot = channel_drive(scheme, l.channel_power(c))?;
            }
            Ok(d)
        })
        .collect::<Result<_>>()?;

    let lux = lux_field(room, &gains, &eff, |l, c| drives[l][c].mean);
    let reference = lux_field(room, &gains, &eff, |l, c| {
        room.luminaires[l].channel_power(c).sqrt()
    });
    let peak = reference.iter().copied().fold(0.0, f64::max);
    if !(peak > 0.0) {
        return invalid("no light reaches the receiver plane");
    }
    let normalized: Vec<f64> = lux.iter().map(|v| v / peak).collect();

    let r = room.receiver.responsivity;
    let noise_power = noise.variance();
    let snr: Vec<f64> = gains
        .iter()
        .map(|g| {
            let linear = match scheme {
                EmissionScheme::Qct { .. } => {
                    // The four streams are orthogonal, so their powers add per LED;
                    // all LEDs carry the same waveform, so amplitudes add across LEDs.
                    let amp: f64 = g
                        .iter()
                        .zip(&drives)
                        .map(|(h, d)| {
                            h * d
                                .iter()
                                .map(|c| c.signal_rms * c.signal_rms)
                                .sum::<f64>()
                                .sqrt()
                        })
                        .sum();
                    (r * amp).powi(2) / noise_power
                }
                EmissionScheme::Csk { crosstalk } => {
                    (0..BANDS)
                        .map(|i| {
                            let amp: f64 = g
                                .iter()
                                .zip(&drives)
                                .map(|(h, d)| h * d[i].peak * crosstalk[i][i])
                                .sum();
                            (r * amp).powi(2) / noise_power
                        })
                        .sum::<f64>()
                        / BANDS as f64
                }
            };
            10.0 * linear.log10()
        })
        .collect();

    let w = xs.len();
    let spacing = room.resolution;
    Ok(RoomMaps {
        scheme: scheme.name().to_string(),
        lux: HeatMap::new(spacing, xs.clone(), ys.clone(), to_grid(normalized, w)),
        lux_absolute: HeatMap::new(spacing, xs.clone(), ys.clone(), to_grid(lux, w)),
        snr_db: HeatMap::new(spacing, xs, ys, to_grid(snr, w)),
    })
}

/// Time-average emitted spectrum of one LED, each channel shape scaled to its
/// mean optical power.
pub fn average_spectrum(
    scheme: &EmissionScheme,
    channel_power: [f64; BANDS],
    spectra: &[SpectralDistribution; BANDS],
) -> Result<SpectralDistribution> {
    let mut acc = SpectralDistribution::zeros();
    for c in 0..BANDS {
        let total = spectra[c].integrate();
        if !(total > 0.0) {
            return invalid("LED spectrum has no power");
        }
        acc = &acc + &spectra[c].scaled(channel_drive(scheme, channel_power[c])?.mean / total);
    }
    Ok(acc)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SchemeIllumination {
    pub scheme: String,
    pub cri: f64,
    pub special_cri: Vec<f64>,
    pub cct_k: f64,
    pub duv: f64,
    pub mean_lux: f64,
    pub max_lux: f64,
    pub mean_snr_db: f64,
    pub clipped_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IlluminationReport {
    pub schemes: Vec<SchemeIllumination>,
    /// Mean normalized lux of the first scheme over the second.
    pub lux_ratio: f64,
    /// Mean SNR of the first scheme minus the second, dB.
    pub snr_gap_db: f64,
}

/// Fraction of QCT drive samples clipped at the configured bias, counted over
/// `frames` random frames.
pub fn qct_clipped_fraction(cfg: QctConfig, frames: usize, seed: u64) -> Result<f64> {
    use rand::Rng;
    let modem = QctModem::new(cfg)?;
    let counts = (0..frames)
        .into_par_iter()
        .map(|f| {
            let mut rng = substream(seed, 0, f as u64);
            let bits: Vec<bool> = (0..modem.bits_per_frame()).map(|_| rng.random()).collect();
            let w = modem.modulate(&bits)?;
            let total: usize = w.streams.iter().map(|s| s.total_samples()).sum();
            Ok((w.clipped_samples(), total))
        })
        .collect::<Result<Vec<_>>>()?;
    let (clipped, total) = counts.iter().fold((0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    Ok(clipped as f64 / total.max(1) as f64)
}

/// CRI, CCT and floor illuminance for QCT and CSK under the same room and budget.
#[allow(clippy::too_many_arguments)]
pub fn run_illumination_report(
    room: &RoomGeometry,
    qct: QctConfig,
    crosstalk: CrosstalkMatrix,
    spectra: &[SpectralDistribution; BANDS],
    noise: &AwgnSpec,
    tables: &CieTables,
    clip_frames: usize,
    seed: u64,
) -> Result<IlluminationReport> {
    let schemes = [
        EmissionScheme::Qct {
            bias_db: qct.bias_db,
        },
        EmissionScheme::Csk { crosstalk },
    ];
    let budget = std::array::from_fn(|c| room.channel_power(c) / room.luminaires.len() as f64);
    let mut out = Vec::with_capacity(2);
    for scheme in &schemes {
        let spd = average_spectrum(scheme, budget, spectra)?;
        let cri = tables.cri(&spd)?;
        let maps = run_room_maps(room, scheme, spectra, noise, tables)?;
        let clipped_fraction = match scheme {
            EmissionScheme::Qct { .. } => qct_clipped_fraction(qct, clip_frames, seed)?,
            EmissionScheme::Csk { .. } => 0.0,
        };
        out.push(SchemeIllumination {
            scheme: scheme.name().to_string(),
            cri: cri.general,
            special_cri: cri.special.to_vec(),
            cct_k: cri.reference_cct,
            duv: cri.duv,
            mean_lux: maps.lux.mean,
            max_lux: maps.lux.max,
            mean_snr_db: maps.snr_db.mean,
            clipped_fraction,
        });
    }
    Ok(IlluminationReport {
        lux_ratio: out[0].mean_lux / out[1].mean_lux,
        snr_gap_db: out[0].mean_snr_db - out[1].mean_snr_db,
        schemes: out,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{default_room, lambertian_order, RoomLayout};
    use crate::photometry::{h_model_spd, LedChannel};
    use crate::spectral::AssignmentPolicy;

    fn spectra() -> [SpectralDistribution; BANDS] {
        LedChannel::ALL.map(|c| h_model_spd(&c.params()))
    }

    fn noise() -> AwgnSpec {
        AwgnSpec::new(1e-22, 2e7).unwrap()
    }

    const IDENTITY: CrosstalkMatrix = [
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
    ];

    #[test]
    fn drive_powers_match_budget() {
        let pe = 0.7;
        let q = channel_drive(&EmissionScheme::Qct { bias_db: 13.0 }, pe).unwrap();
        assert!((q.mean.powi(2) + q.signal_rms.powi(2) - pe).abs() < 1e-12);
        let c = channel_drive(
            &EmissionScheme::Csk {
                crosstalk: IDENTITY,
            },
            pe,
        )
        .unwrap();
        assert!((c.peak.powi(2) / 4.0 - pe).abs() < 1e-12);
        assert!((c.mean - pe.sqrt() / 2.0).abs() < 1e-12);
    }

    #[test]
    fn maps_are_mirror_symmetric() {
        let room = default_room();
        let m = run_room_maps(
            &room,
            &EmissionScheme::Qct { bias_db: 13.0 },
            &spectra(),
            &noise(),
            CieTables::standard(),
        )
        .unwrap();
        for map in [&m.lux, &m.snr_db] {
            let n = map.values.len();
            for j in 0..n {
                for i in 0..n {
                    let v = map.values[j][i];
                    assert!((v - map.values[j][n - 1 - i]).abs() < 1e-9 * v.abs().max(1.0));
                    assert!((v - map.values[n - 1 - j][i]).abs() < 1e-9 * v.abs().max(1.0));
                }
            }
        }
        let flat: Vec<f64> = m.lux.values.iter().flatten().copied().collect();
        assert!((m.lux.mean - flat.iter().sum::<f64>() / flat.len() as f64).abs() < 1e-15);
    }

    #[test]
    fn lux_is_linear_in_optical_drive() {
        // Optical output grows with the square root of electrical power.
        let tables = CieTables::standard();
        let scheme = EmissionScheme::Qct { bias_db: 13.0 };
        let a = run_room_maps(
            &RoomLayout {
                semi_angle: 0.5,
                total_power: 100.0,
                ..Default::default()
            }
            .build()
            .unwrap(),
            &scheme,
            &spectra(),
            &noise(),
            tables,
        )
        .unwrap();
        let b = run_room_maps(
            &RoomLayout {
                semi_angle: 0.5,
                total_power: 400.0,
                ..Default::default()
            }
            .build()
            .unwrap(),
            &scheme,
            &spectra(),
            &noise(),
            tables,
        )
        .unwrap();
        for (x, y) in a
            .lux_absolute
            .values
            .iter()
            .flatten()
            .zip(b.lux_absolute.values.iter().flatten())
        {
            assert!((2.0 * x - y).abs() < 1e-9 * y);
        }
        for (x, y) in a
            .lux
            .values
            .iter()
            .flatten()
            .zip(b.lux.values.iter().flatten())
        {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn grid_oracle_for_one_cell() {
        let room = default_room();
        let tables = CieTables::standard();
        let s = spectra();
        let scheme = EmissionScheme::Csk {
            crosstalk: IDENTITY,
        };
        let m = run_room_maps(&room, &scheme, &s, &noise(), tables).unwrap();
        // Center cell by direct summation over LEDs and channels.
        let (xs, _) = room.grid();
        let mid = xs.len() / 2;
        let mut lux = 0.0;
        for l in &room.luminaires {
            let g = los_gain(l, [0.0, 0.0], &room.receiver).unwrap();
            for (c, spd) in s.iter().enumerate() {
                let mean = (4.0 * l.channel_power(c)).sqrt() / 4.0;
                lux += g * mean * tables.luminous_flux(spd) / spd.integrate() / room.receiver.area;
            }
        }
        assert!((m.lux_absolute.values[mid][mid] - lux).abs() < 1e-9 * lux);
    }

    #[test]
    fn snr_spread_follows_geometry() {
        let m = lambertian_order(30f64.to_radians()).unwrap();
        assert!((m - 4.8188).abs() < 1e-4);
        let maps = run_room_maps(
            &default_room(),
            &EmissionScheme::Qct { bias_db: 13.0 },
            &spectra(),
            &noise(),
            CieTables::standard(),
        )
        .unwrap();
        let spread = maps.snr_db.max - maps.snr_db.min;
        assert!(spread > 5.0 && spread < 20.0);
    }

    #[test]
    fn equal_duty_gives_equal_average_spectrum_shape() {
        let s = spectra();
        let budget = [0.7; 4];
        let q = average_spectrum(&EmissionScheme::Qct { bias_db: 13.0 }, budget, &s).unwrap();
        let c = average_spectrum(
            &EmissionScheme::Csk {
                crosstalk: IDENTITY,
            },
            budget,
            &s,
        )
        .unwrap();
        let tables = CieTables::standard();
        let (tq, tc) = (tables.cct(&q).unwrap(), tables.cct(&c).unwrap());
        assert!((tq.kelvin - tc.kelvin).abs() < 10.0);
    }

    #[test]
    fn clipping_is_rare_at_thirteen_db() {
        let cfg = QctConfig {
            n: 512,
            cp_len: 4,
            bias_db: 13.0,
            pam_order: 4,
            policy: AssignmentPolicy::RoundRobin,
            clip: true,
        };
        let f = qct_clipped_fraction(cfg, 500, 1).unwrap();
        assert!(f < 1e-4);
        let low = qct_clipped_fraction(
            QctConfig {
                bias_db: 3.0,
                ..cfg
            },
            50,
            1,
        )
        .unwrap();
        // Gaussian tail P[Z < −μ] at 3 dB.
        let mu = dc_bias_factor(3.0).unwrap();
        let tail = crate::experiments::analytic::q_function(mu);
        assert!((low - tail).abs() < 0.2 * tail);
    }
}
