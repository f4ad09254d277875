//! Acceptance suite. Runs every criterion at its pinned tolerance, prints one
//! `[PASS]`/`[FAIL]` line per criterion and exits nonzero if any failed.

use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use anyhow::{ensure, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use vlcsim_cli::{run, Config};
use vlcsim_core::channel::transmit;
use vlcsim_core::experiments::{
    analytic_pam_ber, analytic_qam_ber, run_ber_sweep, run_papr_ccdf, BerCurve, LinkSimulator,
    OfdmLink, PaprCcdf, PaprSource, QctLink, StopRule,
};
use vlcsim_core::modem::{OfdmConfig, QctConfig, QctModem};
use vlcsim_core::photometry::{
    chromaticity, planckian_spd, scale_to_power, CieTables, SpectralDistribution,
};
use vlcsim_core::spectral::{build_qct_family, AssignmentPolicy, ChannelImpulseResponse};

const ALGEBRA_SIZES: [usize; 3] = [4, 64, 512];
const ALGEBRA_CHANNELS: usize = 100;
const ALGEBRA_MAX_TAPS: usize = 8;
const ALGEBRA_TOL: f64 = 1e-9;
const ALGEBRA_BUDGET: Duration = Duration::from_secs(30);

const ISI_BITS: usize = 1_000_000;

const ORACLE_SNR_DB: [f64; 5] = [6.0, 8.0, 10.0, 12.0, 14.0];
const ORACLE_SIGMAS: f64 = 3.0;
const ORACLE_MIN_ERRORS: u64 = 100;
/// Per-point bit cap, chosen so both sweeps together fit the runtime budget.
const ORACLE_MAX_BITS: u64 = 2_000_000_000;
const ORACLE_BUDGET: Duration = Duration::from_secs(300);

const CROSSOVER_DB: f64 = 13.0;
const CROSSOVER_SLACK_DB: f64 = 3.0;

const CRI_RANGE: (f64, f64) = (77.0, 83.0);
const CCT_RANGE: (f64, f64) = (3350.0, 3650.0);
const ILLUM_BUDGET: Duration = Duration::from_secs(5);

const LUX_RATIO_RANGE: (f64, f64) = (1.8, 2.4);

const SNR_SPREAD_DB: f64 = 12.0;
const SNR_SPREAD_TOL_DB: f64 = 3.0;

const CCT_REL_TOL: f64 = 0.005;
const PLANCK_CRI_TOL: f64 = 0.5;
const ILLUMINANT_A_XY: (f64, f64) = (0.4476, 0.4074);
const ILLUMINANT_A_TOL: f64 = 0.002;
const COLORIMETRY_BUDGET: Duration = Duration::from_secs(5);

const PAPR_N: usize = 512;
const PAPR_FRAMES: usize = 10_000;
const PAPR_CCDF_FLOOR: f64 = 1e-3;
const PAPR_MIN_SPAN_DB: f64 = 6.0;

fn workspace_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn paper_defaults() -> Result<Config> {
    Ok(Config::load(
        &workspace_root().join("configs/paper_defaults.toml"),
    )?)
}

fn within(v: f64, (lo, hi): (f64, f64)) -> bool {
    (lo..=hi).contains(&v)
}

struct Outcome {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { passed, detail })
}

fn random_channel(rng: &mut ChaCha8Rng, n: usize) -> ChannelImpulseResponse {
    let taps = rng.random_range(1..=ALGEBRA_MAX_TAPS.min(n));
    loop {
        let h: Vec<f64> = (0..taps).map(|_| rng.random_range(-1.0..1.0)).collect();
        if let Ok(h) = ChannelImpulseResponse::new(h) {
            return h;
        }
    }
}

fn algebraic_core() -> Result<Outcome> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xa1);
    let mut worst = [0.0f64; 3];
    for (slot, &n) in ALGEBRA_SIZES.iter().enumerate() {
        let family = build_qct_family(n, AssignmentPolicy::RoundRobin)?;
        for _ in 0..ALGEBRA_CHANNELS {
            let r = family.residual(&random_channel(&mut rng, n))?;
            worst[slot] = worst[slot].max(r.worst());
        }
    }
    let elapsed = start.elapsed();
    let max = worst.iter().copied().fold(0.0, f64::max);
    verdict(
        max <= ALGEBRA_TOL && elapsed < ALGEBRA_BUDGET,
        format!(
            "worst residual N=4 {:.1e}, N=64 {:.1e}, N=512 {:.1e} (tol {ALGEBRA_TOL:.0e}), {:.1} s",
            worst[0],
            worst[1],
            worst[2],
            elapsed.as_secs_f64()
        ),
    )
}

fn isi_elimination() -> Result<Outcome> {
    let modem = QctModem::new(QctConfig {
        n: 64,
        cp_len: 4,
        bias_db: 13.0,
        pam_order: 4,
        policy: AssignmentPolicy::RoundRobin,
        clip: true,
    })?;
    let h = ChannelImpulseResponse::new(vec![1.0, 0.5, 0.25])?.normalized();
    let eq = modem.equalizer(&h)?;
    let mut rng = ChaCha8Rng::seed_from_u64(0xa2);
    let (mut bits_sent, mut errors, mut clipped) = (0usize, 0usize, 0usize);
    let mut out = Vec::new();
    while bits_sent < ISI_BITS {
        let bits: Vec<bool> = (0..modem.bits_per_frame()).map(|_| rng.random()).collect();
        let tx = modem.modulate(&bits)?;
        clipped += tx.clipped_samples();
        let rx = transmit(&tx.optical_sum()[0], &h, 4)?;
        out.clear();
        modem.demodulate_frame(&rx, &eq, &mut out)?;
        errors += bits.iter().zip(&out).filter(|(a, b)| a != b).count();
        bits_sent += bits.len();
    }
    verdict(
        errors == 0,
        format!("{errors} bit errors over {bits_sent} bits ({clipped} clipped samples)"),
    )
}

fn oracle_points(curve: &BerCurve, oracle: impl Fn(f64) -> Result<f64>) -> Result<(bool, String)> {
    let mut ok = true;
    let mut parts = Vec::new();
    for p in &curve.points {
        let expected = oracle(p.snr_per_bit_db)?;
        let sigma = p.std_dev(expected);
        let z = (p.ber - expected).abs() / sigma;
        let good = p.errors >= ORACLE_MIN_ERRORS && z <= ORACLE_SIGMAS;
        ok &= good;
        parts.push(format!(
            "{}dB:{}({} err, {:.1}σ)",
            p.snr_per_bit_db,
            if good { "ok" } else { "X" },
            p.errors,
            z
        ));
    }
    Ok((ok, parts.join(" ")))
}

fn oracle_match() -> Result<Outcome> {
    let start = Instant::now();
    let flat = ChannelImpulseResponse::identity();
    let stop = StopRule {
        min_errors: ORACLE_MIN_ERRORS,
        max_bits: ORACLE_MAX_BITS,
    };
    let qct = QctLink::new(
        QctConfig {
            n: 64,
            cp_len: 4,
            bias_db: 13.0,
            pam_order: 4,
            policy: AssignmentPolicy::RoundRobin,
            clip: false,
        },
        flat.clone(),
    )?;
    let ofdm = OfdmLink::new(
        OfdmConfig {
            n: 64,
            cp_len: 4,
            bias_db: 13.0,
            qam_order: 4,
            clip: false,
        },
        flat,
    )?;
    let run = |link: &dyn LinkSimulator, seed| run_ber_sweep(link, &ORACLE_SNR_DB, stop, seed);
    let (qct_ok, qct_detail) = oracle_points(&run(&qct, 31)?, |db| Ok(analytic_pam_ber(4, db)?))?;
    let (ofdm_ok, ofdm_detail) =
        oracle_points(&run(&ofdm, 32)?, |db| Ok(analytic_qam_ber(4, db)?))?;
    let elapsed = start.elapsed();
    verdict(
        qct_ok && ofdm_ok && elapsed < ORACLE_BUDGET,
        format!(
            "QCT 4-PAM [{qct_detail}]; DCO-OFDM 4-QAM [{ofdm_detail}]; {:.0} s",
            elapsed.as_secs_f64()
        ),
    )
}

fn crossover() -> Result<Outcome> {
    let r = run::ber_results(&paper_defaults()?)?;
    let edge = CROSSOVER_DB - CROSSOVER_SLACK_DB;
    let mut losing = Vec::new();
    for (q, c) in r.qct.points.iter().zip(&r.csk.points) {
        if q.snr_per_bit_db < edge && q.ber >= c.ber {
            losing.push(format!(
                "{} dB (QCT {:.2e} vs CSK {:.2e})",
                q.snr_per_bit_db, q.ber, c.ber
            ));
        }
    }
    let crossing = r
        .qct_csk_crossover_db
        .map_or("none".to_string(), |v| format!("{v:.2} dB"));
    let detail = if losing.is_empty() {
        format!("QCT below CSK for every point under {edge} dB; crossover {crossing}")
    } else {
        format!(
            "QCT not below CSK at {}; crossover {crossing}",
            losing.join(", ")
        )
    };
    verdict(losing.is_empty(), detail)
}

fn equal_power_ragb(cfg: &Config) -> Result<SpectralDistribution> {
    let mut total = SpectralDistribution::zeros();
    for spd in cfg.spectra()? {
        let one_watt = scale_to_power(&spd, 1.0)?;
        let sum: Vec<f64> = total
            .values()
            .iter()
            .zip(one_watt.values())
            .map(|(a, b)| a + b)
            .collect();
        total = SpectralDistribution::new(sum)?;
    }
    Ok(total)
}

fn illumination_metrics() -> Result<Outcome> {
    let start = Instant::now();
    let tables = CieTables::from_env()?;
    let spd = equal_power_ragb(&paper_defaults()?)?;
    let cri = tables.cri(&spd)?;
    let cct = tables.cct(&spd)?;
    let elapsed = start.elapsed();
    verdict(
        within(cri.general, CRI_RANGE) && within(cct.kelvin, CCT_RANGE) && elapsed < ILLUM_BUDGET,
        format!(
            "CRI {:.2} (want {:?}), CCT {:.0} K (want {:?}), Duv {:+.4}, {:.2} s",
            cri.general,
            CRI_RANGE,
            cct.kelvin,
            CCT_RANGE,
            cct.duv,
            elapsed.as_secs_f64()
        ),
    )
}

fn illuminance_ratio() -> Result<Outcome> {
    let (qct, csk) = run::room_results(&paper_defaults()?)?;
    let ratio = qct.lux.mean / csk.lux.mean;
    verdict(
        within(ratio, LUX_RATIO_RANGE),
        format!(
            "mean normalized lux QCT {:.4}, CSK {:.4}, ratio {ratio:.3} (want {LUX_RATIO_RANGE:?})",
            qct.lux.mean, csk.lux.mean
        ),
    )
}

fn snr_map_shape() -> Result<Outcome> {
    let (qct, csk) = run::room_results(&paper_defaults()?)?;
    let spread = qct.snr_db.max - qct.snr_db.min;
    verdict(
        (spread - SNR_SPREAD_DB).abs() <= SNR_SPREAD_TOL_DB,
        format!(
            "QCT spread {spread:.2} dB (want {SNR_SPREAD_DB}±{SNR_SPREAD_TOL_DB}); \
             averages QCT {:.2} dB, CSK {:.2} dB, gap QCT−CSK {:+.2} dB",
            qct.snr_db.mean,
            csk.snr_db.mean,
            qct.snr_db.mean - csk.snr_db.mean
        ),
    )
}

fn colorimetry_golden() -> Result<Outcome> {
    let start = Instant::now();
    let tables = CieTables::from_env()?;
    let mut cct_err = 0.0f64;
    let mut cri_err = 0.0f64;
    for t in [2000.0, 2856.0, 3500.0, 4000.0, 5000.0, 6500.0] {
        let spd = planckian_spd(t)?;
        cct_err = cct_err.max((tables.cct(&spd)?.kelvin - t).abs() / t);
        cri_err = cri_err.max((tables.cri(&spd)?.general - 100.0).abs());
    }
    let (x, y) = chromaticity(&tables.tristimulus(&planckian_spd(2856.0)?))?;
    let a_err = (x - ILLUMINANT_A_XY.0)
        .abs()
        .max((y - ILLUMINANT_A_XY.1).abs());
    let elapsed = start.elapsed();
    verdict(
        cct_err <= CCT_REL_TOL
            && cri_err <= PLANCK_CRI_TOL
            && a_err <= ILLUMINANT_A_TOL
            && elapsed < COLORIMETRY_BUDGET,
        format!(
            "CCT round trip {cct_err:.1e} rel, Planckian CRI off by {cri_err:.3}, \
             illuminant A ({x:.4}, {y:.4}), {:.2} s",
            elapsed.as_secs_f64()
        ),
    )
}

fn brute_force_matches(c: &PaprCcdf) -> bool {
    c.thresholds_db.iter().zip(&c.ccdf).all(|(&g, &p)| {
        let above = c.samples_db.iter().filter(|&&s| s > g).count();
        p == above as f64 / c.samples_db.len() as f64
    })
}

fn papr_pipeline() -> Result<Outcome> {
    let thresholds: Vec<f64> = (0..=80).map(|i| i as f64 * 0.25).collect();
    let ofdm = run_papr_ccdf(
        PaprSource::Ofdm(OfdmConfig {
            n: PAPR_N,
            cp_len: 0,
            bias_db: 13.0,
            qam_order: 4,
            clip: false,
        }),
        PAPR_FRAMES,
        &thresholds,
        91,
    )?;
    let qct = run_papr_ccdf(
        PaprSource::Qct(QctConfig {
            n: PAPR_N,
            cp_len: 0,
            bias_db: 13.0,
            pam_order: 4,
            policy: AssignmentPolicy::RoundRobin,
            clip: false,
        }),
        PAPR_FRAMES,
        &thresholds,
        92,
    )?;
    let recount = ofdm.iter().chain(&qct).all(brute_force_matches);
    let c = &ofdm[0];
    let monotone = c.ccdf.windows(2).all(|w| w[1] <= w[0]);
    let top = c.ccdf.iter().rposition(|&p| p == 1.0);
    let floor = c.ccdf.iter().position(|&p| p <= PAPR_CCDF_FLOOR);
    let span = match (top, floor) {
        (Some(a), Some(b)) => c.thresholds_db[b] - c.thresholds_db[a],
        _ => 0.0,
    };

    let mut cfg = paper_defaults()?;
    cfg.papr.frames = 2000;
    let dir = tempfile::tempdir()?;
    let out = run::run(&cfg, run::Experiment::Papr, dir.path())?;
    let artifact = out.files.iter().any(|f| {
        f.file_name()
            .and_then(|n| n.to_str())
            .is_some_and(|n| n.starts_with("papr_summary_"))
    }) && out.files.len() >= 3;

    verdict(
        recount && monotone && span >= PAPR_MIN_SPAN_DB && artifact,
        format!(
            "recount exact: {recount}, monotone: {monotone}, CCDF 1 → {PAPR_CCDF_FLOOR:.0e} spans \
             {span:.2} dB (want ≥ {PAPR_MIN_SPAN_DB}), comparison artifact: {artifact} ({} files)",
            out.files.len()
        ),
    )
}

const DETERMINISM_CONFIG: &str = r#"
seed = 7

[ber]
snr_db = [0.0, 4.0, 8.0]
min_errors = 50
max_bits = 200000

[papr]
frames = 500

[room]
grid_m = 0.5
"#;

fn csv_files(dir: &Path) -> Result<Vec<(String, Vec<u8>)>> {
    let mut files = Vec::new();
    for entry in std::fs::read_dir(dir)? {
        let path = entry?.path();
        if path.extension().is_some_and(|e| e == "csv") {
            let name = path.file_name().unwrap().to_string_lossy().into_owned();
            files.push((name, std::fs::read(&path)?));
        }
    }
    files.sort();
    Ok(files)
}

fn determinism() -> Result<Outcome> {
    let work = tempfile::tempdir()?;
    let config = work.path().join("small.toml");
    std::fs::write(&config, DETERMINISM_CONFIG)?;
    let mut runs = Vec::new();
    for threads in ["1", "8", "8"] {
        let out = work.path().join(format!("out-{}", runs.len()));
        for experiment in ["ber", "papr", "roommap"] {
            let status = Command::new(env!("CARGO_BIN_EXE_vlcsim"))
                .arg("run")
                .arg(&config)
                .arg(experiment)
                .args(["--threads", threads, "--out"])
                .arg(&out)
                .output()?;
            ensure!(
                status.status.success(),
                "vlcsim run {experiment} --threads {threads} failed: {}",
                String::from_utf8_lossy(&status.stderr)
            );
        }
        runs.push(csv_files(&out)?);
    }
    let count = runs[0].len();
    let identical = count > 0 && runs.iter().all(|r| *r == runs[0]);
    verdict(
        identical,
        format!("{count} CSVs, byte-identical across threads 1/8/8: {identical}"),
    )
}

type Criterion = (u32, &'static str, fn() -> Result<Outcome>);

const CRITERIA: [Criterion; 10] = [
    (1, "algebraic core", algebraic_core),
    (2, "ISI elimination", isi_elimination),
    (3, "BER oracle match", oracle_match),
    (4, "QCT/CSK crossover", crossover),
    (5, "illumination metrics", illumination_metrics),
    (6, "illuminance ratio", illuminance_ratio),
    (7, "SNR map shape", snr_map_shape),
    (8, "colorimetry golden values", colorimetry_golden),
    (9, "PAPR pipeline", papr_pipeline),
    (10, "determinism", determinism),
];

fn main() -> ExitCode {
    let only: Vec<u32> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let mut failed = 0;
    let mut ran = 0;
    for (id, name, f) in CRITERIA {
        if !only.is_empty() && !only.contains(&id) {
            continue;
        }
        ran += 1;
        let (passed, detail) = match f() {
            Ok(o) => (o.passed, o.detail),
            Err(e) => (false, format!("error: {e:#}")),
        };
        let tag = if passed { "PASS" } else { "FAIL" };
        println!("[{tag}] criterion {id} ({name}): {detail}");
        if !passed {
            failed += 1;
        }
    }
    println!("acceptance: {} of {ran} criteria passed", ran - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
