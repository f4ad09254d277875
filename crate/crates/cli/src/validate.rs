//! Built-in invariant suite.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use vlcsim_core::channel::transmit;
use vlcsim_core::modem::{
    apply_crosstalk, Csk, CskConfig, DcoOfdm, OfdmConfig, QctConfig, QctModem,
};
use vlcsim_core::photometry::{chromaticity, planckian_spd, CieTables};
use vlcsim_core::spectral::{
    build_qct_family, AssignmentPolicy, ChannelImpulseResponse, TransformFamily,
};

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub passed: usize,
    pub failed: usize,
    pub checks: Vec<Check>,
}

impl Summary {
    pub fn ok(&self) -> bool {
        self.failed == 0
    }
}

/// Test hooks for the suite.
#[derive(Debug, Clone, Copy, Default)]
pub struct Hooks {
    /// Offset one entry of `H_1` so the diagonalization check must fail.
    pub perturb_transform: bool,
}

fn check(name: &'static str, f: impl FnOnce() -> Result<String, String>) -> Check {
    match f() {
        Ok(detail) => Check {
            name,
            passed: true,
            detail,
        },
        Err(detail) => Check {
            name,
            passed: false,
            detail,
        },
    }
}

/// Up to eight taps, never more than the frame holds.
fn random_channel(rng: &mut ChaCha8Rng, n: usize) -> ChannelImpulseResponse {
    let taps = rng.random_range(1..=n.min(8));
    ChannelImpulseResponse::new((0..taps).map(|_| rng.random_range(-1.0..1.0)).collect())
        .expect("nonzero taps")
}

fn bits(n: usize, rng: &mut ChaCha8Rng) -> Vec<bool> {
    (0..n).map(|_| rng.random()).collect()
}

fn transform_check(hooks: Hooks) -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst = 0.0f64;
    for n in [4, 64, 512] {
        let mut family: TransformFamily =
            build_qct_family(n, AssignmentPolicy::RoundRobin).map_err(|e| e.to_string())?;
        if hooks.perturb_transform {
            family = family.with_fault(0, 0, 0, 1e-3);
        }
        let trials = if n == 512 { 3 } else { 20 };
        for _ in 0..trials {
            let r = family
                .residual(&random_channel(&mut rng, n))
                .map_err(|e| e.to_string())?;
            worst = worst.max(r.worst());
        }
    }
    if worst < 1e-9 {
        Ok(format!("worst residual {worst:.2e}"))
    } else {
        Err(format!("diagonalization residual {worst:.2e} exceeds 1e-9"))
    }
}

fn loopback_check() -> Result<String, String> {
    let e = |e: vlcsim_core::Error| e.to_string();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let h = ChannelImpulseResponse::new(vec![1.0, 0.5, 0.25])
        .map_err(e)?
        .normalized();

    let qct = QctModem::new(QctConfig {
        n: 64,
        cp_len: 4,
        bias_db: 13.0,
        pam_order: 4,
        policy: AssignmentPolicy::RoundRobin,
        clip: true,
    })
    .map_err(e)?;
    let b = bits(qct.bits_per_frame() * 16, &mut rng);
    let rx: Vec<_> = qct
        .modulate(&b)
        .map_err(e)?
        .optical_sum()
        .iter()
        .map(|f| transmit(f, &h, 4))
        .collect::<Result<_, _>>()
        .map_err(e)?;
    if qct.demodulate(&rx, &h).map_err(e)? != b {
        return Err("QCT loopback over three-tap channel has bit errors".into());
    }

    let ofdm = DcoOfdm::new(OfdmConfig {
        n: 64,
        cp_len: 4,
        bias_db: 13.0,
        qam_order: 4,
        clip: true,
    })
    .map_err(e)?;
    let b = bits(ofdm.bits_per_frame() * 16, &mut rng);
    let rx: Vec<_> = ofdm
        .modulate(&b)
        .map_err(e)?
        .frames
        .iter()
        .map(|f| transmit(f, &h, 4))
        .collect::<Result<_, _>>()
        .map_err(e)?;
    if ofdm.demodulate(&rx, &h).map_err(e)? != b {
        return Err("DCO-OFDM loopback over three-tap channel has bit errors".into());
    }

    let k = [
        [0.92, 0.05, 0.0, 0.0],
        [0.08, 0.9, 0.03, 0.0],
        [0.0, 0.05, 0.95, 0.02],
        [0.0, 0.0, 0.02, 0.97],
    ];
    let csk = Csk::new(CskConfig {
        crosstalk: k,
        avg_power: 1.0,
    })
    .map_err(e)?;
    let b = bits(2048, &mut rng);
    let rx: Vec<_> = csk
        .modulate(&b)
        .map_err(e)?
        .iter()
        .map(|s| apply_crosstalk(&k, s))
        .collect();
    if csk.demodulate(&rx) != b {
        return Err("CSK loopback has bit errors".into());
    }
    Ok("QCT, DCO-OFDM and CSK recover every bit".into())
}

fn photometry_checks(tables: &CieTables) -> Vec<Check> {
    vec![
        check("cct-round-trip", || {
            let mut worst = 0.0f64;
            for t in [2500.0, 3000.0, 3500.0, 4000.0, 5000.0] {
                let spd = planckian_spd(t).map_err(|e| e.to_string())?;
                let got = tables.cct(&spd).map_err(|e| e.to_string())?.kelvin;
                worst = worst.max((got - t).abs() / t);
            }
            if worst < 0.005 {
                Ok(format!("worst relative error {worst:.2e}"))
            } else {
                Err(format!("relative error {worst:.2e}"))
            }
        }),
        check("cri-planckian", || {
            let spd = planckian_spd(3500.0).map_err(|e| e.to_string())?;
            let ra = tables.cri(&spd).map_err(|e| e.to_string())?.general;
            if (ra - 100.0).abs() <= 0.5 {
                Ok(format!("Ra {ra:.3}"))
            } else {
                Err(format!("Ra {ra:.3}"))
            }
        }),
        check("illuminant-a", || {
            let spd = planckian_spd(2856.0).map_err(|e| e.to_string())?;
            let (x, y) = chromaticity(&tables.tristimulus(&spd)).map_err(|e| e.to_string())?;
            let d = (x - 0.4476).abs().max((y - 0.4074).abs());
            if d <= 0.002 {
                Ok(format!("(x, y) = ({x:.4}, {y:.4})"))
            } else {
                Err(format!("(x, y) = ({x:.4}, {y:.4})"))
            }
        }),
    ]
}

pub fn run_validation(hooks: Hooks) -> Summary {
    let mut checks = vec![
        check("transform-diagonalization", || transform_check(hooks)),
        check("noiseless-loopback", loopback_check),
    ];
    match CieTables::from_env() {
        Ok(tables) => {
            checks.push(Check {
                name: "cie-data",
                passed: true,
                detail: "tables loaded".into(),
            });
            checks.extend(photometry_checks(&tables));
        }
        Err(e) => checks.push(Check {
            name: "cie-data",
            passed: false,
            detail: e.to_string(),
        }),
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    Summary {
        passed: checks.len() - failed,
        failed,
        checks,
    }
}
