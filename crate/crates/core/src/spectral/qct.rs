//! Quartered composite transform family.
//!
//! Every circulant `C` is diagonalized by the Fourier basis, so `CᵀC` is a
//! symmetric circulant whose eigenvalue at frequency `k` is `|H(k)|²`, shared
//! by the real cosine and sine vectors at that frequency. The real
//! trigonometric basis is therefore an orthonormal eigenbasis of `CᵀC` for
//! every channel at once. Splitting its `N` columns into four groups of `N/4`
//! yields four `N × N/4` matrices `H_ν` with orthonormal columns, diagonal
//! `Λ_ν = H_νᵀ CᵀC H_ν` and vanishing cross blocks `H_νᵀ CᵀC H_μ`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use ndarray::{s, Array2};
use num_complex::Complex64;

use super::circulant::{circulant_apply, ChannelImpulseResponse};
use super::dft::FftKernel;
use crate::error::{invalid, Error, Result};

/// Number of parallel streams (and LED channels).
pub const STREAMS: usize = 4;

/// One column of the real trigonometric eigenbasis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BasisColumn {
    /// `√(1/N)` constant.
    Dc,
    /// `√(2/N)·cos(2πkn/N)`, `1 ≤ k < N/2`.
    Cos(usize),
    /// `√(2/N)·sin(2πkn/N)`, `1 ≤ k < N/2`.
    Sin(usize),
    /// `√(1/N)·(-1)^n`.
    Nyquist,
}

impl BasisColumn {
    pub fn frequency(&self, n: usize) -> usize {
        match *self {
            BasisColumn::Dc => 0,
            BasisColumn::Cos(k) | BasisColumn::Sin(k) => k,
            BasisColumn::Nyquist => n / 2,
        }
    }

    pub fn sample(&self, n: usize, t: usize) -> f64 {
        let nf = n as f64;
        match *self {
            BasisColumn::Dc => (1.0 / nf).sqrt(),
            BasisColumn::Cos(k) => (2.0 / nf).sqrt() * (2.0 * PI * ((k * t) % n) as f64 / nf).cos(),
            BasisColumn::Sin(k) => (2.0 / nf).sqrt() * (2.0 * PI * ((k * t) % n) as f64 / nf).sin(),
            BasisColumn::Nyquist => {
                let sign = if t.is_multiple_of(2) { 1.0 } else { -1.0 };
                sign * (1.0 / nf).sqrt()
            }
        }
    }
}

/// Real orthonormal eigenbasis of every `CᵀC`, columns sorted by frequency
/// (cosine before sine at equal `k`).
#[derive(Debug, Clone)]
pub struct EigenBasis {
    pub matrix: Array2<f64>,
    pub columns: Vec<BasisColumn>,
}

fn check_frame_size(n: usize) -> Result<()> {
    if n < 4 || !n.is_multiple_of(4) {
        return invalid(format!(
            "frame size must be a positive multiple of 4, got {n}"
        ));
    }
    Ok(())
}

fn basis_columns(n: usize) -> Vec<BasisColumn> {
    let mut cols = Vec::with_capacity(n);
    cols.push(BasisColumn::Dc);
    for k in 1..n / 2 {
        cols.push(BasisColumn::Cos(k));
        cols.push(BasisColumn::Sin(k));
    }
    cols.push(BasisColumn::Nyquist);
    cols
}

fn dense_columns(n: usize, cols: &[BasisColumn]) -> Array2<f64> {
    Array2::from_shape_fn((n, cols.len()), |(t, j)| cols[j].sample(n, t))
}

pub fn trig_eigenbasis(n: usize) -> Result<EigenBasis> {
    check_frame_size(n)?;
    let columns = basis_columns(n);
    Ok(EigenBasis {
        matrix: dense_columns(n, &columns),
        columns,
    })
}

/// How basis columns are dealt to the four streams.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AssignmentPolicy {
    /// Column `j` of the frequency-sorted basis goes to stream `j mod 4`.
    #[default]
    RoundRobin,
    /// Stream `ν` takes the `ν`-th quarter of the frequency-sorted basis.
    Contiguous,
}

impl AssignmentPolicy {
    pub fn name(&self) -> &'static str {
        match self {
            AssignmentPolicy::RoundRobin => "round-robin",
            AssignmentPolicy::Contiguous => "contiguous",
        }
    }
}

impl fmt::Display for AssignmentPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AssignmentPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "round-robin" => Ok(AssignmentPolicy::RoundRobin),
            "contiguous" => Ok(AssignmentPolicy::Contiguous),
            other => invalid(format!("unknown assignment policy '{other}'")),
        }
    }
}

/// Worst-case deviations of a family from its algebraic contract under one channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FamilyResidual {
    /// max |[H_1 … H_4]ᵀ[H_1 … H_4] − I|
    pub orthonormality: f64,
    /// max off-diagonal entry of any `Λ_ν`
    pub off_diagonal: f64,
    /// max entry of any cross block `H_νᵀ CᵀC H_μ`, `ν ≠ μ`
    pub cross: f64,
    /// max |diag(Λ_ν) − |H(k)|²| over all assigned columns
    pub eigenvalue: f64,
}

impl FamilyResidual {
    pub fn worst(&self) -> f64 {
        self.orthonormality
            .max(self.off_diagonal)
            .max(self.cross)
            .max(self.eigenvalue)
    }
}

/// The four `N × N/4` transform matrices and their frequency assignment.
#[derive(Debug, Clone)]
pub struct TransformFamily {
    n: usize,
    groups: [Vec<BasisColumn>; STREAMS],
    blocks: [Array2<f64>; STREAMS],
}

/// Builds the family from the trigonometric eigenbasis under `policy`.
pub fn build_qct_family(n: usize, policy: AssignmentPolicy) -> Result<TransformFamily> {
    check_frame_size(n)?;
    let cols = basis_columns(n);
    let quarter = n / 4;
    let mut groups: [Vec<BasisColumn>; STREAMS] = Default::default();
    for (j, col) in cols.into_iter().enumerate() {
        let stream = match policy {
            AssignmentPolicy::RoundRobin => j % STREAMS,
            AssignmentPolicy::Contiguous => j / quarter,
        };
        groups[stream].push(col);
    }
    TransformFamily::from_groups(n, groups)
}

impl TransformFamily {
    /// Family from an explicit partition of the basis. Each group must hold
    /// `N/4` distinct columns and together they must cover the basis.
    pub fn from_groups(n: usize, groups: [Vec<BasisColumn>; STREAMS]) -> Result<Self> {
        check_frame_size(n)?;
        let mut seen = std::collections::HashSet::new();
        for g in &groups {
            if g.len() != n / 4 {
                return invalid(format!(
                    "each stream needs {} columns, got {}",
                    n / 4,
                    g.len()
                ));
            }
            for col in g {
                let valid = match *col {
                    BasisColumn::Cos(k) | BasisColumn::Sin(k) => k >= 1 && k < n / 2,
                    _ => true,
                };
                if !valid || !seen.insert(*col) {
                    return invalid(format!("column {col:?} is invalid or repeated"));
                }
            }
        }
        let blocks = [0, 1, 2, 3].map(|v| dense_columns(n, &groups[v]));
        Ok(Self { n, groups, blocks })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Dense `H_ν` (`N × N/4`), `ν ∈ 0..4`.
    pub fn block(&self, stream: usize) -> &Array2<f64> {
        &self.blocks[stream]
    }

    pub fn columns(&self, stream: usize) -> &[BasisColumn] {
        &self.groups[stream]
    }

    /// Frequency index `k` carried by each column of `H_ν`.
    pub fn frequencies(&self, stream: usize) -> Vec<usize> {
        self.groups[stream]
            .iter()
            .map(|c| c.frequency(self.n))
            .collect()
    }

    /// Diagonal of `Λ_ν` given the channel power response `|H(k)|²`.
    pub fn eigenvalues(&self, stream: usize, power_response: &[f64]) -> Vec<f64> {
        self.groups[stream]
            .iter()
            .map(|c| power_response[c.frequency(self.n)])
            .collect()
    }

    /// `H_ν·x` through one inverse FFT.
    pub fn synthesize(
        &self,
        stream: usize,
        symbols: &[f64],
        kernel: &FftKernel,
    ) -> Result<Vec<f64>> {
        let n = self.n;
        if symbols.len() != n / 4 || kernel.len() != n {
            return invalid(format!(
                "stream needs {} symbols on an {n}-point kernel",
                n / 4
            ));
        }
        let half = (n as f64 / 2.0).sqrt();
        let full = (n as f64).sqrt();
        let mut spec = vec![Complex64::new(0.0, 0.0); n];
        for (col, &a) in self.groups[stream].iter().zip(symbols) {
            match *col {
                BasisColumn::Dc => spec[0].re += full * a,
                BasisColumn::Nyquist => spec[n / 2].re += full * a,
                BasisColumn::Cos(k) => {
                    spec[k].re += half * a;
                    spec[n - k].re += half * a;
                }
                BasisColumn::Sin(k) => {
                    spec[k].im -= half * a;
                    spec[n - k].im += half * a;
                }
            }
        }
        kernel.inverse(&mut spec);
        Ok(spec.into_iter().map(|v| v.re).collect())
    }

    /// `H_νᵀ·y` given `Y = dft(y)`.
    pub fn analyze(&self, stream: usize, spectrum: &[Complex64]) -> Vec<f64> {
        let n = self.n;
        let half = (2.0 / n as f64).sqrt();
        let full = (1.0 / n as f64).sqrt();
        self.groups[stream]
            .iter()
            .map(|col| match *col {
                BasisColumn::Dc => full * spectrum[0].re,
                BasisColumn::Nyquist => full * spectrum[n / 2].re,
                BasisColumn::Cos(k) => half * spectrum[k].re,
                BasisColumn::Sin(k) => -half * spectrum[k].im,
            })
            .collect()
    }

    /// `H_ν·x` by dense matrix product.
    pub fn synthesize_dense(&self, stream: usize, symbols: &[f64]) -> Vec<f64> {
        let x = ndarray::ArrayView1::from(symbols);
        self.blocks[stream].dot(&x).to_vec()
    }

    /// `H_νᵀ·y` by dense matrix product.
    pub fn analyze_dense(&self, stream: usize, y: &[f64]) -> Vec<f64> {
        let y = ndarray::ArrayView1::from(y);
        self.blocks[stream].t().dot(&y).to_vec()
    }

    /// Concatenation `[H_1 H_2 H_3 H_4]`.
    pub fn stacked(&self) -> Array2<f64> {
        let q = self.n / 4;
        let mut out = Array2::zeros((self.n, self.n));
        for (v, b) in self.blocks.iter().enumerate() {
            out.slice_mut(s![.., v * q..(v + 1) * q]).assign(b);
        }
        out
    }

    /// Checks orthonormality, diagonal `Λ_ν`, zero cross blocks and the
    /// eigenvalue labels against dense products for channel `h`.
    pub fn residual(&self, h: &ChannelImpulseResponse) -> Result<FamilyResidual> {
        let n = self.n;
        let q = n / 4;
        let b = self.stacked();

        let gram = b.t().dot(&b);
        let mut orthonormality = 0.0f64;
        for ((i, j), &v) in gram.indexed_iter() {
            let target = if i == j { 1.0 } else { 0.0 };
            orthonormality = orthonormality.max((v - target).abs());
        }

        let mut cb = Array2::zeros((n, n));
        for j in 0..n {
            let col = b.column(j).to_vec();
            let out = circulant_apply(h, &col)?;
            cb.column_mut(j).assign(&ndarray::ArrayView1::from(&out));
        }
        let m = cb.t().dot(&cb);
        let power = h.power_response(n)?;

        let (mut off_diagonal, mut cross, mut eigenvalue) = (0.0f64, 0.0f64, 0.0f64);
        for ((i, j), &v) in m.indexed_iter() {
            let (si, sj) = (i / q, j / q);
            if si != sj {
                cross = cross.max(v.abs());
            } else if i != j {
                off_diagonal = off_diagonal.max(v.abs());
            } else {
                let k = self.groups[si][i % q].frequency(n);
                eigenvalue = eigenvalue.max((v - power[k]).abs());
            }
        }
        Ok(FamilyResidual {
            orthonormality,
            off_diagonal,
            cross,
            eigenvalue,
        })
    }

    /// Copy with one dense entry of `H_ν` offset by `delta`. The FFT fast path
    /// is unaffected; only the dense checks see the fault. Used to exercise
    /// the validation suite.
    pub fn with_fault(&self, stream: usize, row: usize, col: usize, delta: f64) -> Self {
        let mut out = self.clone();
        out.blocks[stream][[row, col]] += delta;
        out
    }
}
