use num_complex::Complex64;

use super::bias::{bias_and_clip, dc_level};
use super::constellation::PamConstellation;
use super::Waveform;
use crate::channel::add_cp;
use crate::error::{invalid, Error, Result};
use crate::spectral::{
    build_qct_family, circulant_matched_apply, AssignmentPolicy, ChannelImpulseResponse, FftKernel,
    TransformFamily, STREAMS,
};

const NULL_GAIN: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QctConfig {
    pub n: usize,
    pub cp_len: usize,
    pub bias_db: f64,
    pub pam_order: usize,
    pub policy: AssignmentPolicy,
    pub clip: bool,
}

/// Four biased streams, one per LED color channel (red, amber, green, blue).
#[derive(Debug, Clone, PartialEq)]
pub struct QctWaveform {
    pub streams: [Waveform; STREAMS],
}

impl QctWaveform {
    pub fn clipped_samples(&self) -> usize {
        self.streams.iter().map(|s| s.clipped_samples).sum()
    }

    pub fn clipped_fraction(&self) -> f64 {
        let total: usize = self.streams.iter().map(Waveform::total_samples).sum();
        self.clipped_samples() as f64 / total.max(1) as f64
    }

    /// What a single photodetector sees before the channel: the sum of all
    /// four drive signals.
    pub fn optical_sum(&self) -> Vec<Vec<f64>> {
        let frames = self.streams[0].frames.len();
        (0..frames)
            .map(|f| {
                let mut acc = self.streams[0].frames[f].clone();
                for s in &self.streams[1..] {
                    for (a, v) in acc.iter_mut().zip(&s.frames[f]) {
                        *a += v;
                    }
                }
                acc
            })
            .collect()
    }
}

/// Per-stream one-tap equalizer `1/Λ_ν` for a given channel.
#[derive(Debug, Clone)]
pub struct QctEqualizer {
    h: ChannelImpulseResponse,
    inv_lambda: [Vec<f64>; STREAMS],
    /// Received level contributed by the four DC biases.
    bias_offset: f64,
}

/// DC-biased quartered composite transform modem.
#[derive(Debug)]
pub struct QctModem {
    cfg: QctConfig,
    pam: PamConstellation,
    family: TransformFamily,
    kernel: FftKernel,
    dc: f64,
}

impl QctModem {
    pub fn new(cfg: QctConfig) -> Result<Self> {
        let family = build_qct_family(cfg.n, cfg.policy)?;
        Self::with_family(cfg, family)
    }

    pub fn with_family(cfg: QctConfig, family: TransformFamily) -> Result<Self> {
        if family.n() != cfg.n {
            return invalid(format!(
                "transform family is for N={}, config says N={}",
                family.n(),
                cfg.n
            ));
        }
        if cfg.n < 4 || !cfg.n.is_power_of_two() {
            return invalid(format!(
                "QCT frame size must be a power of two >= 4, got {}",
                cfg.n
            ));
        }
        if cfg.cp_len >= cfg.n {
            return invalid("cyclic prefix must be shorter than the frame");
        }
        let pam = PamConstellation::new(cfg.pam_order)?;
        let dc = dc_level(cfg.bias_db, Self::nominal_power())?;
        Ok(Self {
            cfg,
            pam,
            family,
            kernel: FftKernel::new(cfg.n)?,
            dc,
        })
    }

    /// Expected per-sample power of one unbiased stream: `N/4` unit-energy
    /// symbols spread over `N` samples by orthonormal columns.
    pub fn nominal_power() -> f64 {
        0.25
    }

    pub fn config(&self) -> &QctConfig {
        &self.cfg
    }

    pub fn family(&self) -> &TransformFamily {
        &self.family
    }

    pub fn constellation(&self) -> &PamConstellation {
        &self.pam
    }

    /// DC level added to each stream.
    pub fn dc_level(&self) -> f64 {
        self.dc
    }

    pub fn bits_per_frame(&self) -> usize {
        self.cfg.n * self.pam.bits_per_symbol()
    }

    /// `x_cν = H_ν x_ν` for one frame of `N` symbols split into contiguous quarters.
    pub fn precode(&self, symbols: &[f64]) -> Result<[Vec<f64>; STREAMS]> {
        if symbols.len() != self.cfg.n {
            return invalid(format!(
                "frame needs {} symbols, got {}",
                self.cfg.n,
                symbols.len()
            ));
        }
        let q = self.cfg.n / 4;
        let mut out: [Vec<f64>; STREAMS] = Default::default();
        for (v, slot) in out.iter_mut().enumerate() {
            *slot = self
                .family
                .synthesize(v, &symbols[v * q..(v + 1) * q], &self.kernel)?;
        }
        Ok(out)
    }

    pub fn modulate(&self, bits: &[bool]) -> Result<QctWaveform> {
        let per = self.bits_per_frame();
        if !bits.len().is_multiple_of(per) {
            return invalid(format!(
                "{} bits do not fill {per}-bit QCT frames",
                bits.len()
            ));
        }
        let frames = bits.len() / per;
        let mut streams: [Waveform; STREAMS] = std::array::from_fn(|_| Waveform {
            frames: Vec::with_capacity(frames),
            clipped_samples: 0,
        });
        for chunk in bits.chunks_exact(per) {
            let precoded = self.precode(&self.pam.map(chunk)?)?;
            for (s, x) in streams.iter_mut().zip(precoded) {
                let mut frame = add_cp(&x, self.cfg.cp_len)?;
                s.clipped_samples += bias_and_clip(&mut frame, self.dc, self.cfg.clip);
                s.frames.push(frame);
            }
        }
        Ok(QctWaveform { streams })
    }

    pub fn equalizer(&self, h: &ChannelImpulseResponse) -> Result<QctEqualizer> {
        let power = h.power_response(self.cfg.n)?;
        let mut inv_lambda: [Vec<f64>; STREAMS] = Default::default();
        for (v, slot) in inv_lambda.iter_mut().enumerate() {
            let freqs = self.family.frequencies(v);
            *slot = self
                .family
                .eigenvalues(v, &power)
                .into_iter()
                .zip(freqs)
                .map(|(l, k)| {
                    if l < NULL_GAIN {
                        Err(Error::SingularChannel { bin: k })
                    } else {
                        Ok(1.0 / l)
                    }
                })
                .collect::<Result<_>>()?;
        }
        let bias_offset = STREAMS as f64 * self.dc * h.dc_gain();
        Ok(QctEqualizer {
            h: h.clone(),
            inv_lambda,
            bias_offset,
        })
    }

    pub fn demodulate(&self, rx: &[Vec<f64>], h: &ChannelImpulseResponse) -> Result<Vec<bool>> {
        let eq = self.equalizer(h)?;
        let mut out = Vec::with_capacity(rx.len() * self.bits_per_frame());
        for frame in rx {
            self.demodulate_frame(frame, &eq, &mut out)?;
        }
        Ok(out)
    }

    /// Equalized symbol estimates `x̂_ν` for one received frame.
    pub fn estimate(&self, frame: &[f64], eq: &QctEqualizer) -> Result<[Vec<f64>; STREAMS]> {
        let (n, cp) = (self.cfg.n, self.cfg.cp_len);
        if frame.len() != n + cp {
            return invalid(format!(
                "received frame has {} samples, expected {}",
                frame.len(),
                n + cp
            ));
        }
        let y: Vec<f64> = frame[cp..].iter().map(|v| v - eq.bias_offset).collect();
        let matched = circulant_matched_apply(&eq.h, &y)?;
        let mut spec: Vec<Complex64> = matched
            .into_iter()
            .map(|v| Complex64::new(v, 0.0))
            .collect();
        self.kernel.forward(&mut spec);
        Ok(std::array::from_fn(|v| {
            let mut x = self.family.analyze(v, &spec);
            for (s, g) in x.iter_mut().zip(&eq.inv_lambda[v]) {
                *s *= g;
            }
            x
        }))
    }

    /// Demodulates one received frame (cyclic prefix included), appending bits to `out`.
    pub fn demodulate_frame(
        &self,
        frame: &[f64],
        eq: &QctEqualizer,
        out: &mut Vec<bool>,
    ) -> Result<()> {
        for x in self.estimate(frame, eq)? {
            self.pam.demap_into(&x, out);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::transmit;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn bits(n: usize, seed: u64) -> Vec<bool> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| rng.random()).collect()
    }

    fn cfg(n: usize, cp_len: usize) -> QctConfig {
        QctConfig {
            n,
            cp_len,
            bias_db: 13.0,
            pam_order: 4,
            policy: AssignmentPolicy::RoundRobin,
            clip: true,
        }
    }

    #[test]
    fn four_point_streams_are_scaled_columns() {
        let m = QctModem::new(cfg(4, 0)).unwrap();
        let s = [0.3, -0.7, 1.1, -0.2];
        let x = m.precode(&s).unwrap();
        for v in 0..4 {
            let col = m.family().block(v).column(0).to_vec();
            for (a, c) in x[v].iter().zip(&col) {
                assert!((a - c * s[v]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn precoding_preserves_energy() {
        let m = QctModem::new(cfg(512, 0)).unwrap();
        let sym = m.constellation().map(&bits(m.bits_per_frame(), 6)).unwrap();
        let x = m.precode(&sym).unwrap();
        let e_in: f64 = sym.iter().map(|v| v * v).sum();
        let e_out: f64 = x.iter().flatten().map(|v| v * v).sum();
        assert!((e_in - e_out).abs() < 1e-10);
    }

    #[test]
    fn loopback_identity_and_multitap() {
        let b = bits(1024 * 4, 7);
        let m = QctModem::new(cfg(512, 0)).unwrap();
        let w = m.modulate(&b).unwrap();
        assert_eq!(
            m.demodulate(&w.optical_sum(), &ChannelImpulseResponse::identity())
                .unwrap(),
            b
        );

        let h = ChannelImpulseResponse::new(vec![1.0, 0.5, 0.25]).unwrap();
        let m = QctModem::new(cfg(512, 4)).unwrap();
        let w = m.modulate(&b).unwrap();
        let rx: Vec<_> = w
            .optical_sum()
            .iter()
            .map(|f| transmit(f, &h, 4).unwrap())
            .collect();
        assert_eq!(m.demodulate(&rx, &h).unwrap(), b);
    }

    #[test]
    fn zero_eigenvalue_is_singular() {
        let h = ChannelImpulseResponse::new(vec![1.0, 1.0]).unwrap();
        let m = QctModem::new(cfg(16, 2)).unwrap();
        assert_eq!(
            m.equalizer(&h).unwrap_err(),
            Error::SingularChannel { bin: 8 }
        );
    }

    #[test]
    fn clipping_monotone_in_bias() {
        let b = bits(64 * 2 * 50, 8);
        let mut last = usize::MAX;
        for db in [0.0, 3.0, 6.0, 9.0, 13.0] {
            let m = QctModem::new(QctConfig {
                bias_db: db,
                ..cfg(64, 0)
            })
            .unwrap();
            let c = m.modulate(&b).unwrap().clipped_samples();
            assert!(c <= last);
            last = c;
        }
    }
}
