//! Discrete frequency-selective channel, AWGN and Lambertian room geometry.

mod geometry;

pub use geometry::{
    default_room, lambertian_order, los_gain, LedLuminaire, ReceiverSpec, RoomGeometry, RoomLayout,
    DEFAULT_SEMI_ANGLE_DEG,
};

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{invalid, Error, Result};
use crate::spectral::ChannelImpulseResponse;

/// Prepends the last `cp_len` samples of `x`.
pub fn add_cp(x: &[f64], cp_len: usize) -> Result<Vec<f64>> {
    if cp_len >= x.len() {
        return invalid(format!(
            "cyclic prefix {cp_len} must be shorter than the frame ({})",
            x.len()
        ));
    }
    let mut out = Vec::with_capacity(x.len() + cp_len);
    out.extend_from_slice(&x[x.len() - cp_len..]);
    out.extend_from_slice(x);
    Ok(out)
}

/// Drops the first `cp_len` samples.
pub fn remove_cp(y: &[f64], cp_len: usize) -> Result<Vec<f64>> {
    if cp_len >= y.len() {
        return invalid(format!(
            "cyclic prefix {cp_len} must be shorter than the frame ({})",
            y.len()
        ));
    }
    Ok(y[cp_len..].to_vec())
}

/// Linear convolution of a CP-extended frame with `h`, truncated to the input
/// length. After [`remove_cp`] this equals the cyclic convolution of the frame.
pub fn transmit(x: &[f64], h: &ChannelImpulseResponse, cp_len: usize) -> Result<Vec<f64>> {
    if cp_len + 1 < h.len() {
        return Err(Error::IsiRisk {
            cp_len,
            taps: h.len(),
        });
    }
    if cp_len >= x.len() {
        return invalid(format!(
            "cyclic prefix {cp_len} must be shorter than the frame ({})",
            x.len()
        ));
    }
    let mut y = vec![0.0; x.len()];
    for (t, &g) in h.taps().iter().enumerate() {
        if g == 0.0 {
            continue;
        }
        for (i, out) in y.iter_mut().enumerate().skip(t) {
            *out += g * x[i - t];
        }
    }
    Ok(y)
}

/// White Gaussian noise with per-sample variance `n0 · bandwidth`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AwgnSpec {
    /// One-sided noise power spectral density, A²/Hz.
    pub n0: f64,
    /// Hz.
    pub bandwidth: f64,
}

impl AwgnSpec {
    pub fn new(n0: f64, bandwidth: f64) -> Result<Self> {
        if !(n0 > 0.0 && n0.is_finite()) || !(bandwidth > 0.0 && bandwidth.is_finite()) {
            return invalid("noise PSD and bandwidth must be positive");
        }
        Ok(Self { n0, bandwidth })
    }

    /// Spec with the given per-sample variance and unit bandwidth.
    pub fn from_variance(variance: f64) -> Result<Self> {
        Self::new(variance, 1.0)
    }

    pub fn variance(&self) -> f64 {
        self.n0 * self.bandwidth
    }
}

/// Adds i.i.d. zero-mean Gaussian noise of the spec's variance to `x`.
pub fn awgn<R: Rng + ?Sized>(x: &[f64], spec: &AwgnSpec, rng: &mut R) -> Vec<f64> {
    let mut out = x.to_vec();
    add_noise(&mut out, spec.variance().sqrt(), rng);
    out
}

/// In-place variant of [`awgn`] taking the standard deviation directly.
pub fn add_noise<R: Rng + ?Sized>(x: &mut [f64], sigma: f64, rng: &mut R) {
    if sigma == 0.0 {
        return;
    }
    let normal = Normal::new(0.0, sigma).expect("finite sigma");
    for v in x.iter_mut() {
        *v += normal.sample(rng);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::substream;
    use crate::spectral::circulant_apply;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_frame(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
    }

    #[test]
    fn cp_examples() {
        assert_eq!(
            add_cp(&[1.0, 2.0, 3.0, 4.0], 2).unwrap(),
            vec![3.0, 4.0, 1.0, 2.0, 3.0, 4.0]
        );
        assert_eq!(add_cp(&[1.0, 2.0], 0).unwrap(), vec![1.0, 2.0]);
        assert!(add_cp(&[1.0, 2.0], 2).is_err());
        let x = random_frame(32, 3);
        for cp in 0..32 {
            assert_eq!(remove_cp(&add_cp(&x, cp).unwrap(), cp).unwrap(), x);
        }
    }

    #[test]
    fn cp_turns_linear_into_cyclic_convolution() {
        let x = random_frame(16, 9);
        let h = ChannelImpulseResponse::new(vec![1.0, 0.5]).unwrap();
        let rx = remove_cp(&transmit(&add_cp(&x, 1).unwrap(), &h, 1).unwrap(), 1).unwrap();
        let oracle = circulant_apply(&h, &x).unwrap();
        for (a, b) in rx.iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-12);
        }
        let id = transmit(&x, &ChannelImpulseResponse::identity(), 0).unwrap();
        assert_eq!(id, x);
    }

    #[test]
    fn short_cp_is_rejected() {
        let h = ChannelImpulseResponse::new(vec![1.0, 0.5, 0.25]).unwrap();
        let x = add_cp(&random_frame(8, 1), 1).unwrap();
        assert_eq!(
            transmit(&x, &h, 1),
            Err(Error::IsiRisk { cp_len: 1, taps: 3 })
        );
    }

    #[test]
    fn noise_statistics() {
        let spec = AwgnSpec::new(1e-22, 2e7).unwrap();
        let n = 1_000_000;
        let noise = awgn(&vec![0.0; n], &spec, &mut substream(5, 0, 0));
        let mean = noise.iter().sum::<f64>() / n as f64;
        let var = noise.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
        let sigma2 = spec.variance();
        assert!((var / sigma2 - 1.0).abs() < 0.01);
        assert!(mean.abs() < 4.0 * sigma2.sqrt() / (n as f64).sqrt());
        assert_eq!(noise, awgn(&vec![0.0; n], &spec, &mut substream(5, 0, 0)));
        assert!(AwgnSpec::new(0.0, 1.0).is_err());
    }
}
