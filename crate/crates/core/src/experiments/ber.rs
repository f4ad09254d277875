use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::analytic::db_to_linear;
use crate::channel::{add_noise, transmit};
use crate::error::{invalid, Result};
use crate::modem::{
    apply_crosstalk, CrosstalkMatrix, Csk, CskConfig, DcoOfdm, OfdmConfig, QctConfig, QctEqualizer,
    QctModem, BANDS,
};
use crate::rng::{substream, SimRng};
use crate::spectral::ChannelImpulseResponse;

/// One Monte Carlo link: random bits in, bit errors out.
pub trait LinkSimulator: Sync {
    fn scheme(&self) -> &'static str;

    fn bits_per_frame(&self) -> usize;

    /// Per-sample noise standard deviation for SNR per bit `γ_b` (linear).
    /// Signal power is the expected data power, without DC bias or cyclic prefix.
    fn noise_sigma(&self, gamma_b: f64) -> f64;

    /// Simulates one frame and returns its bit error count.
    fn simulate_frame(&self, sigma: f64, rng: &mut SimRng) -> Result<usize>;
}

fn random_bits(n: usize, rng: &mut SimRng) -> Vec<bool> {
    (0..n).map(|_| rng.random()).collect()
}

fn count_errors(a: &[bool], b: &[bool]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}

fn sigma_from(frame_energy: f64, bits: usize, gamma_b: f64) -> f64 {
    (frame_energy / (bits as f64 * 2.0 * gamma_b)).sqrt()
}

pub struct QctLink {
    modem: QctModem,
    h: ChannelImpulseResponse,
    eq: QctEqualizer,
}

impl QctLink {
    pub fn new(cfg: QctConfig, h: ChannelImpulseResponse) -> Result<Self> {
        let modem = QctModem::new(cfg)?;
        let eq = modem.equalizer(&h)?;
        Ok(Self { modem, h, eq })
    }

    pub fn modem(&self) -> &QctModem {
        &self.modem
    }
}

impl LinkSimulator for QctLink {
    fn scheme(&self) -> &'static str {
        "qct"
    }

    fn bits_per_frame(&self) -> usize {
        self.modem.bits_per_frame()
    }

    fn noise_sigma(&self, gamma_b: f64) -> f64 {
        // The four precoded streams together carry N unit-energy symbols.
        sigma_from(self.modem.config().n as f64, self.bits_per_frame(), gamma_b)
    }

    fn simulate_frame(&self, sigma: f64, rng: &mut SimRng) -> Result<usize> {
        let bits = random_bits(self.bits_per_frame(), rng);
        let tx = self.modem.modulate(&bits)?.optical_sum();
        let mut rx = transmit(&tx[0], &self.h, self.modem.config().cp_len)?;
        add_noise(&mut rx, sigma, rng);
        let mut out = Vec::with_capacity(bits.len());
        self.modem.demodulate_frame(&rx, &self.eq, &mut out)?;
        Ok(count_errors(&bits, &out))
    }
}

pub struct OfdmLink {
    modem: DcoOfdm,
    h: ChannelImpulseResponse,
    eq: Vec<num_complex::Complex64>,
}

impl OfdmLink {
    pub fn new(cfg: OfdmConfig, h: ChannelImpulseResponse) -> Result<Self> {
        let modem = DcoOfdm::new(cfg)?;
        let eq = modem.equalizer(&h)?;
        Ok(Self { modem, h, eq })
    }
}

impl LinkSimulator for OfdmLink {
    fn scheme(&self) -> &'static str {
        "dco-ofdm"
    }

    fn bits_per_frame(&self) -> usize {
        self.modem.bits_per_frame()
    }

    fn noise_sigma(&self, gamma_b: f64) -> f64 {
        let n = self.modem.config().n;
        sigma_from(
            n as f64 * DcoOfdm::nominal_power(n),
            self.bits_per_frame(),
            gamma_b,
        )
    }

    fn simulate_frame(&self, sigma: f64, rng: &mut SimRng) -> Result<usize> {
        let bits = random_bits(self.bits_per_frame(), rng);
        let tx = self.modem.modulate(&bits)?;
        let mut rx = transmit(&tx.frames[0], &self.h, self.modem.config().cp_len)?;
        add_noise(&mut rx, sigma, rng);
        let mut out = Vec::with_capacity(bits.len());
        self.modem.demodulate_frame(&rx, &self.eq, &mut out)?;
        Ok(count_errors(&bits, &out))
    }
}

/// Four-band CSK through the crosstalk matrix. The link is memoryless; each
/// frame is a block of independent symbol slots.
pub struct CskLink {
    csk: Csk,
    slots: usize,
}

impl CskLink {
    pub fn new(crosstalk: CrosstalkMatrix, slots: usize) -> Result<Self> {
        if slots == 0 {
            return invalid("CSK frames need at least one slot");
        }
        Ok(Self {
            csk: Csk::new(CskConfig {
                crosstalk,
                avg_power: 1.0,
            })?,
            slots,
        })
    }
}

impl LinkSimulator for CskLink {
    fn scheme(&self) -> &'static str {
        "csk"
    }

    fn bits_per_frame(&self) -> usize {
        2 * self.slots
    }

    fn noise_sigma(&self, gamma_b: f64) -> f64 {
        let a = self.csk.amplitude();
        sigma_from(self.slots as f64 * a * a, self.bits_per_frame(), gamma_b)
    }

    fn simulate_frame(&self, sigma: f64, rng: &mut SimRng) -> Result<usize> {
        let bits = random_bits(self.bits_per_frame(), rng);
        let k = self.csk.config().crosstalk;
        let mut rx: Vec<[f64; BANDS]> = self
            .csk
            .modulate(&bits)?
            .iter()
            .map(|s| apply_crosstalk(&k, s))
            .collect();
        for r in rx.iter_mut() {
            add_noise(r, sigma, rng);
        }
        Ok(count_errors(&bits, &self.csk.demodulate(&rx)))
    }
}

/// Stopping rule for one SNR point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StopRule {
    pub min_errors: u64,
    pub max_bits: u64,
}

impl Default for StopRule {
    fn default() -> Self {
        Self {
            min_errors: 100,
            max_bits: 10_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BerPoint {
    pub snr_per_bit_db: f64,
    pub ber: f64,
    pub bits: u64,
    pub errors: u64,
    /// Fewer than the requested number of errors were observed.
    pub unreliable: bool,
}

impl BerPoint {
    /// Binomial standard deviation of the estimate, using `p` as the true rate.
    pub fn std_dev(&self, p: f64) -> f64 {
        (p * (1.0 - p) / self.bits as f64).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BerCurve {
    pub scheme: String,
    pub seed: u64,
    pub points: Vec<BerPoint>,
}

/// Frames per RNG substream. Fixed so results do not depend on the worker count.
const FRAMES_PER_CHUNK: usize = 8;
/// Chunks evaluated per parallel batch.
const CHUNKS_PER_BATCH: usize = 64;

fn run_chunk(
    link: &dyn LinkSimulator,
    sigma: f64,
    seed: u64,
    point: u64,
    chunk: u64,
) -> Result<u64> {
    let mut rng = substream(seed, point, chunk);
    let mut errors = 0;
    for _ in 0..FRAMES_PER_CHUNK {
        errors += link.simulate_frame(sigma, &mut rng)? as u64;
    }
    Ok(errors)
}

/// Bit error rate of `link` at each SNR per bit. Chunks of frames draw from
/// substreams keyed by `(seed, point, chunk)` and are accumulated in index
/// order, stopping at the first chunk that meets the stop rule.
pub fn run_ber_sweep(
    link: &dyn LinkSimulator,
    snr_db: &[f64],
    stop: StopRule,
    seed: u64,
) -> Result<BerCurve> {
    if stop.min_errors == 0 || stop.max_bits == 0 {
        return invalid("stop rule needs positive error and bit limits");
    }
    let chunk_bits = (FRAMES_PER_CHUNK * link.bits_per_frame()) as u64;
    let max_chunks = stop.max_bits.div_ceil(chunk_bits).max(1);
    let mut points = Vec::with_capacity(snr_db.len());
    for (p, &db) in snr_db.iter().enumerate() {
        let gamma = db_to_linear(db);
        let sigma = if gamma.is_infinite() {
            0.0
        } else {
            link.noise_sigma(gamma)
        };
        let (mut bits, mut errors, mut next) = (0u64, 0u64, 0u64);
        'outer: while next < max_chunks {
            let end = (next + CHUNKS_PER_BATCH as u64).min(max_chunks);
            let batch: Vec<u64> = (next..end)
                .into_par_iter()
                .map(|c| run_chunk(link, sigma, seed, p as u64, c))
                .collect::<Result<_>>()?;
            for e in batch {
                bits += chunk_bits;
                errors += e;
                if errors >= stop.min_errors {
                    break 'outer;
                }
            }
            next = end;
        }
        points.push(BerPoint {
            snr_per_bit_db: db,
            ber: errors as f64 / bits as f64,
            bits,
            errors,
            unreliable: errors < stop.min_errors,
        });
    }
    Ok(BerCurve {
        scheme: link.scheme().to_string(),
        seed,
        points,
    })
}

/// First SNR at which `a` stops being strictly below `b`, interpolated
/// linearly in log-BER between the bracketing points. `None` if `a` is below
/// `b` everywhere or nowhere.
pub fn crossover_db(a: &BerCurve, b: &BerCurve) -> Option<f64> {
    let diff: Vec<(f64, f64)> = a
        .points
        .iter()
        .zip(&b.points)
        .map(|(p, q)| {
            (
                p.snr_per_bit_db,
                (p.ber.max(1e-300)).ln() - (q.ber.max(1e-300)).ln(),
            )
        })
        .collect();
    for w in diff.windows(2) {
        let ((x0, d0), (x1, d1)) = (w[0], w[1]);
        if (d0 < 0.0) != (d1 < 0.0) {
            return Some(x0 + (x1 - x0) * d0 / (d0 - d1));
        }
    }
    None
}
