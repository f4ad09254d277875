//! Experiment execution and output files.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::json;

use vlcsim_core::experiments::{
    analytic_orthogonal_ber, analytic_pam_ber, analytic_qam_ber, crossover_db, run_ber_sweep,
    run_illumination_report, run_papr_ccdf, run_room_maps, write_atomic, BerCurve, BerPoint,
    CskLink, CsvTable, EmissionScheme, IlluminationReport, OfdmLink, PaprCcdf, PaprSource, QctLink,
    RoomMaps, StopRule,
};
use vlcsim_core::modem::{crosstalk_matrix, CrosstalkMatrix};
use vlcsim_core::photometry::CieTables;

use crate::config::Config;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Experiment {
    Ber,
    Papr,
    Roommap,
    Illum,
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::Ber => "ber",
            Experiment::Papr => "papr",
            Experiment::Roommap => "roommap",
            Experiment::Illum => "illum",
        }
    }
}

/// Files written by a run and the lines echoed to the terminal.
#[derive(Debug, Default)]
pub struct RunOutput {
    pub files: Vec<PathBuf>,
    pub lines: Vec<String>,
}

pub fn crosstalk(cfg: &Config) -> Result<CrosstalkMatrix> {
    Ok(crosstalk_matrix(&cfg.spectra()?, &cfg.bands())?)
}

#[derive(Debug, Clone, Serialize)]
pub struct BerResults {
    pub qct: BerCurve,
    pub ofdm: BerCurve,
    pub csk: BerCurve,
    pub analytic: Vec<BerCurve>,
    /// SNR where QCT stops beating CSK.
    pub qct_csk_crossover_db: Option<f64>,
}

fn analytic_curve(
    name: &str,
    snr: &[f64],
    f: impl Fn(f64) -> vlcsim_core::Result<f64>,
) -> Result<BerCurve> {
    let points = snr
        .iter()
        .map(|&db| {
            Ok(BerPoint {
                snr_per_bit_db: db,
                ber: f(db)?,
                bits: 0,
                errors: 0,
                unreliable: false,
            })
        })
        .collect::<Result<_>>()?;
    Ok(BerCurve {
        scheme: name.into(),
        seed: 0,
        points,
    })
}

pub fn ber_results(cfg: &Config) -> Result<BerResults> {
    let h = cfg.channel()?;
    let stop = StopRule {
        min_errors: cfg.ber.min_errors,
        max_bits: cfg.ber.max_bits,
    };
    let snr = &cfg.ber.snr_db;
    let seed = cfg.seed;
    // Distinct seeds per scheme keep the three sweeps statistically independent.
    let qct = run_ber_sweep(
        &QctLink::new(cfg.qct_config()?, h.clone())?,
        snr,
        stop,
        seed,
    )?;
    let ofdm = run_ber_sweep(
        &OfdmLink::new(cfg.ofdm_config()?, h)?,
        snr,
        stop,
        seed.wrapping_add(1),
    )?;
    let csk = run_ber_sweep(
        &CskLink::new(crosstalk(cfg)?, cfg.ber.csk_slots)?,
        snr,
        stop,
        seed.wrapping_add(2),
    )?;
    let (m, q) = (cfg.qct.pam_order, cfg.ofdm.qam_order);
    let analytic = vec![
        analytic_curve("analytic-pam", snr, |db| analytic_pam_ber(m, db))?,
        analytic_curve("analytic-qam", snr, |db| analytic_qam_ber(q, db))?,
        analytic_curve("analytic-orthogonal", snr, |db| {
            analytic_orthogonal_ber(4, db)
        })?,
    ];
    let qct_csk_crossover_db = crossover_db(&qct, &csk);
    Ok(BerResults {
        qct,
        ofdm,
        csk,
        analytic,
        qct_csk_crossover_db,
    })
}

pub fn papr_results(cfg: &Config) -> Result<(Vec<PaprCcdf>, Vec<PaprCcdf>)> {
    let th = cfg.papr_thresholds();
    let qct = run_papr_ccdf(
        PaprSource::Qct(cfg.qct_config()?),
        cfg.papr.frames,
        &th,
        cfg.seed,
    )?;
    let ofdm = run_papr_ccdf(
        PaprSource::Ofdm(cfg.ofdm_config()?),
        cfg.papr.frames,
        &th,
        cfg.seed.wrapping_add(1),
    )?;
    Ok((qct, ofdm))
}

pub fn room_results(cfg: &Config) -> Result<(RoomMaps, RoomMaps)> {
    let tables = CieTables::from_env()?;
    let (room, spectra, noise) = (cfg.room()?, cfg.spectra()?, cfg.noise()?);
    let qct = run_room_maps(
        &room,
        &EmissionScheme::Qct {
            bias_db: cfg.qct.bias_db,
        },
        &spectra,
        &noise,
        &tables,
    )?;
    let csk = run_room_maps(
        &room,
        &EmissionScheme::Csk {
            crosstalk: crosstalk(cfg)?,
        },
        &spectra,
        &noise,
        &tables,
    )?;
    Ok((qct, csk))
}

pub fn illumination_results(cfg: &Config) -> Result<IlluminationReport> {
    let tables = CieTables::from_env()?;
    Ok(run_illumination_report(
        &cfg.room()?,
        cfg.qct_config()?,
        crosstalk(cfg)?,
        &cfg.spectra()?,
        &cfg.noise()?,
        &tables,
        cfg.illum.clip_frames,
        cfg.seed,
    )?)
}

struct Writer<'a> {
    dir: &'a Path,
    experiment: &'static str,
    hash: String,
    out: RunOutput,
}

impl Writer<'_> {
    fn csv(&mut self, scheme: &str, table: &CsvTable) -> Result<()> {
        let path = self
            .dir
            .join(format!("{}_{scheme}_{}.csv", self.experiment, self.hash));
        write_atomic(&path, &table.to_bytes()?)
            .with_context(|| format!("writing {}", path.display()))?;
        self.out.files.push(path);
        Ok(())
    }

    fn json(&mut self, value: &serde_json::Value) -> Result<()> {
        let path = self
            .dir
            .join(format!("{}_summary_{}.json", self.experiment, self.hash));
        let mut bytes = serde_json::to_vec_pretty(value)?;
        bytes.push(b'\n');
        write_atomic(&path, &bytes).with_context(|| format!("writing {}", path.display()))?;
        self.out.files.push(path);
        Ok(())
    }

    fn say(&mut self, line: String) {
        self.out.lines.push(line);
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or("none".into(), |v| format!("{v:.2} dB"))
}

/// Runs `experiment` and writes its CSV and JSON files under `dir`.
pub fn run(cfg: &Config, experiment: Experiment, dir: &Path) -> Result<RunOutput> {
    let mut w = Writer {
        dir,
        experiment: experiment.name(),
        hash: cfg.hash(),
        out: RunOutput::default(),
    };
    let meta =
        json!({ "experiment": experiment.name(), "config_hash": cfg.hash(), "seed": cfg.seed });
    match experiment {
        Experiment::Ber => {
            let r = ber_results(cfg)?;
            w.csv("qct", &CsvTable::ber(&[&r.qct]))?;
            w.csv("dco-ofdm", &CsvTable::ber(&[&r.ofdm]))?;
            w.csv("csk", &CsvTable::ber(&[&r.csk]))?;
            w.csv(
                "analytic",
                &CsvTable::ber(&r.analytic.iter().collect::<Vec<_>>()),
            )?;
            w.json(&json!({ "meta": meta, "channel": cfg.channel.name, "results": r }))?;
            for c in [&r.qct, &r.ofdm, &r.csk] {
                let flagged = c.points.iter().filter(|p| p.unreliable).count();
                w.say(format!(
                    "{:<9} {} points, {} flagged unreliable",
                    c.scheme,
                    c.points.len(),
                    flagged
                ));
            }
            w.say(format!(
                "QCT/CSK crossover: {}",
                fmt_opt(r.qct_csk_crossover_db)
            ));
        }
        Experiment::Papr => {
            let (qct, ofdm) = papr_results(cfg)?;
            w.csv("qct", &CsvTable::papr(&qct))?;
            w.csv("dco-ofdm", &CsvTable::papr(&ofdm))?;
            let at = |c: &PaprCcdf, p: f64| {
                c.thresholds_db
                    .iter()
                    .zip(&c.ccdf)
                    .find(|(_, &v)| v <= p)
                    .map(|(g, _)| *g)
            };
            let rows: Vec<_> = qct
                .iter()
                .chain(&ofdm)
                .map(|c| json!({ "label": c.label, "papr_db_at_1e-1": at(c, 1e-1), "papr_db_at_1e-3": at(c, 1e-3) }))
                .collect();
            w.json(&json!({ "meta": meta, "curves": qct.iter().chain(&ofdm).collect::<Vec<_>>(), "comparison": rows }))?;
            for c in qct.iter().chain(&ofdm) {
                w.say(format!(
                    "{:<12} PAPR at CCDF 1e-3: {}",
                    c.label,
                    fmt_opt(at(c, 1e-3))
                ));
            }
        }
        Experiment::Roommap => {
            let (qct, csk) = room_results(cfg)?;
            for m in [&qct, &csk] {
                w.csv(
                    &m.scheme,
                    &CsvTable::heatmaps(
                        &["lux_normalized", "lux", "snr_db"],
                        &[&m.lux, &m.lux_absolute, &m.snr_db],
                    ),
                )?;
            }
            let stats = |m: &RoomMaps| {
                json!({
                    "lux_normalized": { "min": m.lux.min, "max": m.lux.max, "mean": m.lux.mean },
                    "lux": { "min": m.lux_absolute.min, "max": m.lux_absolute.max, "mean": m.lux_absolute.mean },
                    "snr_db": { "min": m.snr_db.min, "max": m.snr_db.max, "mean": m.snr_db.mean },
                })
            };
            let gap = qct.snr_db.mean - csk.snr_db.mean;
            w.json(&json!({
                "meta": meta,
                "qct": stats(&qct),
                "csk": stats(&csk),
                "lux_ratio": qct.lux.mean / csk.lux.mean,
                "snr_gap_db": gap,
            }))?;
            for m in [&qct, &csk] {
                w.say(format!(
                    "{:<4} mean normalized lux {:.4}, SNR mean {:.2} dB (min {:.2}, max {:.2}, spread {:.2})",
                    m.scheme,
                    m.lux.mean,
                    m.snr_db.mean,
                    m.snr_db.min,
                    m.snr_db.max,
                    m.snr_db.max - m.snr_db.min
                ));
            }
            w.say(format!(
                "lux ratio QCT/CSK {:.3}; average SNR gap QCT-CSK {gap:.2} dB",
                qct.lux.mean / csk.lux.mean
            ));
        }
        Experiment::Illum => {
            let r = illumination_results(cfg)?;
            let mut t = CsvTable::new(&[
                "scheme",
                "cri",
                "cct_k",
                "duv",
                "mean_lux_normalized",
                "max_lux_normalized",
                "mean_snr_db",
                "clipped_fraction",
            ]);
            for s in &r.schemes {
                t.push(vec![
                    s.scheme.clone(),
                    s.cri.to_string(),
                    s.cct_k.to_string(),
                    s.duv.to_string(),
                    s.mean_lux.to_string(),
                    s.max_lux.to_string(),
                    s.mean_snr_db.to_string(),
                    s.clipped_fraction.to_string(),
                ]);
            }
            w.csv("report", &t)?;
            w.json(&json!({ "meta": meta, "report": r }))?;
            for s in &r.schemes {
                w.say(format!(
                    "{:<4} CRI {:.2}  CCT {:.0} K  Duv {:+.4}  mean lux {:.4}  clipped {:.2e}",
                    s.scheme, s.cri, s.cct_k, s.duv, s.mean_lux, s.clipped_fraction
                ));
            }
            w.say(format!(
                "lux ratio QCT/CSK {:.3}; average SNR gap QCT-CSK {:.2} dB",
                r.lux_ratio, r.snr_gap_db
            ));
        }
    }
    Ok(w.out)
}
