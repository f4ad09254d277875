use num_complex::Complex64;

use super::dft::FftKernel;
use crate::error::{invalid, Result};

/// Finite channel impulse response `h = [h_0, …, h_{ϑ-1}]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelImpulseResponse {
    taps: Vec<f64>,
}

impl ChannelImpulseResponse {
    pub fn new(taps: Vec<f64>) -> Result<Self> {
        if taps.is_empty() {
            return invalid("channel needs at least one tap");
        }
        if taps.iter().any(|t| !t.is_finite()) {
            return invalid("channel taps must be finite");
        }
        if taps.iter().all(|&t| t == 0.0) {
            return invalid("channel needs at least one nonzero tap");
        }
        Ok(Self { taps })
    }

    /// The ideal single-tap channel `h = [1]`.
    pub fn identity() -> Self {
        Self { taps: vec![1.0] }
    }

    pub fn taps(&self) -> &[f64] {
        &self.taps
    }

    pub fn len(&self) -> usize {
        self.taps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taps.is_empty()
    }

    /// Same shape scaled to unit energy `Σ h² = 1`.
    pub fn normalized(&self) -> Self {
        let e = self.taps.iter().map(|t| t * t).sum::<f64>().sqrt();
        Self {
            taps: self.taps.iter().map(|t| t / e).collect(),
        }
    }

    /// DC gain `Σ h_t`.
    pub fn dc_gain(&self) -> f64 {
        self.taps.iter().sum()
    }

    fn check_len(&self, n: usize) -> Result<()> {
        if self.taps.len() > n {
            return invalid(format!(
                "{}-tap channel does not fit a frame of {n}",
                self.taps.len()
            ));
        }
        Ok(())
    }

    /// `H(k)`, the N-point DFT of the zero-padded taps.
    pub fn frequency_response(&self, n: usize) -> Result<Vec<Complex64>> {
        self.check_len(n)?;
        let kernel = FftKernel::new(n)?;
        let mut padded = vec![Complex64::new(0.0, 0.0); n];
        for (p, &t) in padded.iter_mut().zip(&self.taps) {
            p.re = t;
        }
        kernel.forward(&mut padded);
        Ok(padded)
    }

    /// Eigenvalues `|H(k)|²` of `CᵀC`.
    pub fn power_response(&self, n: usize) -> Result<Vec<f64>> {
        Ok(self
            .frequency_response(n)?
            .iter()
            .map(|v| v.norm_sqr())
            .collect())
    }
}

/// `C·x`: cyclic convolution of `x` with the zero-padded channel.
pub fn circulant_apply(h: &ChannelImpulseResponse, x: &[f64]) -> Result<Vec<f64>> {
    let n = x.len();
    h.check_len(n)?;
    let mut y = vec![0.0; n];
    for (t, &g) in h.taps().iter().enumerate() {
        if g == 0.0 {
            continue;
        }
        for (i, out) in y.iter_mut().enumerate() {
            *out += g * x[(i + n - t) % n];
        }
    }
    Ok(y)
}

/// `Cᵀ·y`: correlation with the channel, i.e. circulant with time-reversed taps.
pub fn circulant_matched_apply(h: &ChannelImpulseResponse, y: &[f64]) -> Result<Vec<f64>> {
    let n = y.len();
    h.check_len(n)?;
    let mut out = vec![0.0; n];
    for (t, &g) in h.taps().iter().enumerate() {
        if g == 0.0 {
            continue;
        }
        for (i, o) in out.iter_mut().enumerate() {
            *o += g * y[(i + t) % n];
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{dft, idft};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn h(taps: &[f64]) -> ChannelImpulseResponse {
        ChannelImpulseResponse::new(taps.to_vec()).unwrap()
    }

    fn dense(h: &ChannelImpulseResponse, n: usize) -> Vec<Vec<f64>> {
        let mut c = vec![vec![0.0; n]; n];
        for (i, row) in c.iter_mut().enumerate() {
            for (t, &g) in h.taps().iter().enumerate() {
                row[(i + n - t) % n] += g;
            }
        }
        c
    }

    fn random(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
    }

    #[test]
    fn rejects_bad_taps() {
        assert!(ChannelImpulseResponse::new(vec![]).is_err());
        assert!(ChannelImpulseResponse::new(vec![0.0, 0.0]).is_err());
        assert!(ChannelImpulseResponse::new(vec![f64::NAN]).is_err());
        assert!(circulant_apply(&h(&[1.0, 1.0, 1.0]), &[1.0, 2.0]).is_err());
        assert!(circulant_matched_apply(&h(&[1.0, 1.0, 1.0]), &[1.0, 2.0]).is_err());
    }

    #[test]
    fn shift_examples() {
        let x = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(circulant_apply(&h(&[1.0]), &x).unwrap(), x.to_vec());
        assert_eq!(
            circulant_apply(&h(&[0.0, 1.0]), &x).unwrap(),
            vec![4.0, 1.0, 2.0, 3.0]
        );
        assert_eq!(circulant_matched_apply(&h(&[1.0]), &x).unwrap(), x.to_vec());
        assert_eq!(
            circulant_matched_apply(&h(&[0.0, 1.0]), &x).unwrap(),
            vec![2.0, 3.0, 4.0, 1.0]
        );
    }

    #[test]
    fn matches_dense_matrices() {
        let ch = h(&[1.0, 0.5, 0.25]);
        let x = random(16, 1);
        let c = dense(&ch, 16);
        let fwd = circulant_apply(&ch, &x).unwrap();
        let back = circulant_matched_apply(&ch, &x).unwrap();
        for i in 0..16 {
            let cx: f64 = (0..16).map(|j| c[i][j] * x[j]).sum();
            let ctx: f64 = (0..16).map(|j| c[j][i] * x[j]).sum();
            assert!((fwd[i] - cx).abs() < 1e-10);
            assert!((back[i] - ctx).abs() < 1e-10);
        }
    }

    #[test]
    fn matches_spectral_product() {
        let ch = h(&[0.3, -0.7, 0.2, 0.1]);
        let x = random(32, 2);
        let hk = ch.frequency_response(32).unwrap();
        let xk = dft(&x
            .iter()
            .map(|&v| Complex64::new(v, 0.0))
            .collect::<Vec<_>>())
        .unwrap();
        let prod: Vec<Complex64> = hk.iter().zip(&xk).map(|(a, b)| a * b).collect();
        let y = idft(&prod).unwrap();
        for (a, b) in circulant_apply(&ch, &x).unwrap().iter().zip(&y) {
            assert!((a - b.re).abs() < 1e-10);
        }
    }
}
