use num_complex::Complex64;

use super::bias::{bias_and_clip, dc_level};
use super::constellation::QamConstellation;
use super::Waveform;
use crate::channel::add_cp;
use crate::error::{invalid, Error, Result};
use crate::spectral::{hermitian_extend, ChannelImpulseResponse, FftKernel};

/// Gains below this magnitude are treated as spectral nulls.
const NULL_GAIN: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OfdmConfig {
    pub n: usize,
    pub cp_len: usize,
    pub bias_db: f64,
    pub qam_order: usize,
    pub clip: bool,
}

/// DC-biased optical OFDM: Hermitian-symmetric QAM on bins `1..N/2`.
#[derive(Debug)]
pub struct DcoOfdm {
    cfg: OfdmConfig,
    qam: QamConstellation,
    kernel: FftKernel,
    dc: f64,
}

impl DcoOfdm {
    pub fn new(cfg: OfdmConfig) -> Result<Self> {
        if cfg.n < 4 || !cfg.n.is_power_of_two() {
            return invalid(format!(
                "OFDM frame size must be a power of two >= 4, got {}",
                cfg.n
            ));
        }
        if cfg.cp_len >= cfg.n {
            return invalid("cyclic prefix must be shorter than the frame");
        }
        let qam = QamConstellation::new(cfg.qam_order)?;
        let dc = dc_level(cfg.bias_db, Self::nominal_power(cfg.n))?;
        Ok(Self {
            cfg,
            qam,
            kernel: FftKernel::new(cfg.n)?,
            dc,
        })
    }

    /// Expected time-domain power per sample of an unbiased frame with
    /// unit-energy symbols on `N − 2` occupied bins.
    pub fn nominal_power(n: usize) -> f64 {
        (n - 2) as f64 / (n * n) as f64
    }

    pub fn config(&self) -> &OfdmConfig {
        &self.cfg
    }

    pub fn constellation(&self) -> &QamConstellation {
        &self.qam
    }

    pub fn dc_level(&self) -> f64 {
        self.dc
    }

    pub fn symbols_per_frame(&self) -> usize {
        self.cfg.n / 2 - 1
    }

    pub fn bits_per_frame(&self) -> usize {
        self.symbols_per_frame() * self.qam.bits_per_symbol()
    }

    /// Unbiased time-domain frame, without cyclic prefix.
    pub fn frame_samples(&self, bits: &[bool]) -> Result<Vec<f64>> {
        if bits.len() != self.bits_per_frame() {
            return invalid(format!(
                "frame needs {} bits, got {}",
                self.bits_per_frame(),
                bits.len()
            ));
        }
        let mut spec = hermitian_extend(&self.qam.map(bits)?, self.cfg.n)?;
        self.kernel.inverse(&mut spec);
        Ok(spec.into_iter().map(|v| v.re).collect())
    }

    pub fn modulate(&self, bits: &[bool]) -> Result<Waveform> {
        let per = self.bits_per_frame();
        if !bits.len().is_multiple_of(per) {
            return invalid(format!(
                "{} bits do not fill {per}-bit OFDM frames",
                bits.len()
            ));
        }
        let mut frames = Vec::with_capacity(bits.len() / per);
        let mut clipped_samples = 0;
        for chunk in bits.chunks_exact(per) {
            let mut frame = add_cp(&self.frame_samples(chunk)?, self.cfg.cp_len)?;
            clipped_samples += bias_and_clip(&mut frame, self.dc, self.cfg.clip);
            frames.push(frame);
        }
        Ok(Waveform {
            frames,
            clipped_samples,
        })
    }

    /// Per-bin one-tap equalizer `1/H(k)` for the data bins.
    pub fn equalizer(&self, h: &ChannelImpulseResponse) -> Result<Vec<Complex64>> {
        let resp = h.frequency_response(self.cfg.n)?;
        (1..self.cfg.n / 2)
            .map(|k| {
                if resp[k].norm() < NULL_GAIN {
                    Err(Error::SingularChannel { bin: k })
                } else {
                    Ok(resp[k].inv())
                }
            })
            .collect()
    }

    pub fn demodulate(&self, rx: &[Vec<f64>], h: &ChannelImpulseResponse) -> Result<Vec<bool>> {
        let eq = self.equalizer(h)?;
        let mut out = Vec::with_capacity(rx.len() * self.bits_per_frame());
        for frame in rx {
            self.demodulate_frame(frame, &eq, &mut out)?;
        }
        Ok(out)
    }

    /// Demodulates one received frame (cyclic prefix included) with a
    /// precomputed [`equalizer`](Self::equalizer), appending bits to `out`.
    pub fn demodulate_frame(
        &self,
        frame: &[f64],
        eq: &[Complex64],
        out: &mut Vec<bool>,
    ) -> Result<()> {
        let (n, cp) = (self.cfg.n, self.cfg.cp_len);
        if frame.len() != n + cp {
            return invalid(format!(
                "received frame has {} samples, expected {}",
                frame.len(),
                n + cp
            ));
        }
        let mut spec: Vec<Complex64> = frame[cp..]
            .iter()
            .map(|&v| Complex64::new(v, 0.0))
            .collect();
        self.kernel.forward(&mut spec);
        let symbols: Vec<Complex64> = spec[1..n / 2].iter().zip(eq).map(|(y, g)| y * g).collect();
        self.qam.demap_into(&symbols, out);
        Ok(())
    }
}
