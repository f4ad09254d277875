use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{invalid, Result};

/// Cached forward/inverse FFT plans for one transform length.
#[derive(Clone)]
pub struct FftKernel {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for FftKernel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FftKernel").field("n", &self.n).finish()
    }
}

impl FftKernel {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return invalid("transform length must be at least 1");
        }
        let mut planner = FftPlanner::new();
        Ok(Self {
            n,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Unnormalized forward transform in place.
    pub fn forward(&self, buf: &mut [Complex64]) {
        debug_assert_eq!(buf.len(), self.n);
        self.forward.process(buf);
    }

    /// Inverse transform in place, including the `1/N` scale.
    pub fn inverse(&self, buf: &mut [Complex64]) {
        debug_assert_eq!(buf.len(), self.n);
        self.inverse.process(buf);
        let scale = 1.0 / self.n as f64;
        buf.iter_mut().for_each(|v| *v *= scale);
    }

    /// Forward transform of a real frame.
    pub fn forward_real(&self, x: &[f64]) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.forward(&mut buf);
        buf
    }
}

/// N-point DFT, `X[k] = Σ x[n]·exp(-j2πkn/N)`.
pub fn dft(x: &[Complex64]) -> Result<Vec<Complex64>> {
    let kernel = FftKernel::new(x.len())?;
    let mut buf = x.to_vec();
    kernel.forward(&mut buf);
    Ok(buf)
}

/// Inverse DFT with `1/N` normalization; `idft(dft(x)) == x`.
pub fn idft(x: &[Complex64]) -> Result<Vec<Complex64>> {
    let kernel = FftKernel::new(x.len())?;
    let mut buf = x.to_vec();
    kernel.inverse(&mut buf);
    Ok(buf)
}

/// Places `N/2 - 1` data symbols on bins `1..N/2` and mirrors their
/// conjugates onto the upper half so the inverse transform is real. DC and
/// Nyquist bins are left empty.
pub fn hermitian_extend(symbols: &[Complex64], n: usize) -> Result<Vec<Complex64>> {
    if n < 4 || !n.is_multiple_of(2) {
        return invalid(format!(
            "hermitian frame size must be even and >= 4, got {n}"
        ));
    }
    if symbols.len() != n / 2 - 1 {
        return invalid(format!(
            "expected {} symbols for N = {n}, got {}",
            n / 2 - 1,
            symbols.len()
        ));
    }
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    for (k, &s) in symbols.iter().enumerate().map(|(i, s)| (i + 1, s)) {
        x[k] = s;
        x[n - k] = s.conj();
    }
    Ok(x)
}
