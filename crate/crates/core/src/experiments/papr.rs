use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::modem::{DcoOfdm, OfdmConfig, QctConfig, QctModem};
use crate::rng::substream;
use crate::spectral::{papr_db, STREAMS};

/// Empirical complementary CDF `P[PAPR > γ]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PaprCcdf {
    pub label: String,
    pub n: usize,
    pub frames_simulated: usize,
    pub thresholds_db: Vec<f64>,
    pub ccdf: Vec<f64>,
    #[serde(skip)]
    pub samples_db: Vec<f64>,
}

impl PaprCcdf {
    pub fn from_samples(
        label: impl Into<String>,
        n: usize,
        samples_db: Vec<f64>,
        thresholds_db: &[f64],
    ) -> Self {
        let mut sorted = samples_db.clone();
        sorted.sort_by(f64::total_cmp);
        let total = sorted.len().max(1) as f64;
        let ccdf = thresholds_db
            .iter()
            .map(|&g| {
                let at_or_below = sorted.partition_point(|&v| v <= g);
                (sorted.len() - at_or_below) as f64 / total
            })
            .collect();
        Self {
            label: label.into(),
            n,
            frames_simulated: samples_db.len(),
            thresholds_db: thresholds_db.to_vec(),
            ccdf,
            samples_db,
        }
    }
}

/// Which transmitter to measure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PaprSource {
    Ofdm(OfdmConfig),
    Qct(QctConfig),
}

/// PAPR of unbiased frames (no cyclic prefix). For QCT every LED stream is
/// measured separately and the four-stream sum is reported as well.
pub fn run_papr_ccdf(
    source: PaprSource,
    n_frames: usize,
    thresholds_db: &[f64],
    seed: u64,
) -> Result<Vec<PaprCcdf>> {
    if n_frames == 0 {
        return invalid("PAPR estimate needs at least one frame");
    }
    match source {
        PaprSource::Ofdm(cfg) => {
            let modem = DcoOfdm::new(cfg)?;
            let samples = (0..n_frames)
                .into_par_iter()
                .map(|f| {
                    let mut rng = substream(seed, 0, f as u64);
                    let bits: Vec<bool> =
                        (0..modem.bits_per_frame()).map(|_| rng.random()).collect();
                    papr_db(&modem.frame_samples(&bits)?)
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(vec![PaprCcdf::from_samples(
                "dco-ofdm",
                cfg.n,
                samples,
                thresholds_db,
            )])
        }
        PaprSource::Qct(cfg) => {
            let modem = QctModem::new(cfg)?;
            let per_frame = (0..n_frames)
                .into_par_iter()
                .map(|f| {
                    let mut rng = substream(seed, 0, f as u64);
                    let bits: Vec<bool> =
                        (0..modem.bits_per_frame()).map(|_| rng.random()).collect();
                    let streams = modem.precode(&modem.constellation().map(&bits)?)?;
                    let mut out = [0.0; STREAMS + 1];
                    for (v, s) in streams.iter().enumerate() {
                        out[v] = papr_db(s)?;
                    }
                    let sum: Vec<f64> = (0..cfg.n)
                        .map(|t| streams.iter().map(|s| s[t]).sum())
                        .collect();
                    out[STREAMS] = papr_db(&sum)?;
                    Ok(out)
                })
                .collect::<Result<Vec<_>>>()?;
            Ok((0..=STREAMS)
                .map(|v| {
                    let label = if v < STREAMS {
                        format!("qct-stream{}", v + 1)
                    } else {
                        "qct-sum".into()
                    };
                    PaprCcdf::from_samples(
                        label,
                        cfg.n,
                        per_frame.iter().map(|p| p[v]).collect(),
                        thresholds_db,
                    )
                })
                .collect())
        }
    }
}
