use num_complex::Complex64;

use crate::error::{invalid, Result};

/// Something a maximum-likelihood detector can measure distances to.
pub trait SignalPoint: Copy {
    fn distance_sqr(&self, other: &Self) -> f64;
}

impl SignalPoint for f64 {
    fn distance_sqr(&self, other: &Self) -> f64 {
        (self - other) * (self - other)
    }
}

impl SignalPoint for Complex64 {
    fn distance_sqr(&self, other: &Self) -> f64 {
        (self - other).norm_sqr()
    }
}

impl<const D: usize> SignalPoint for [f64; D] {
    fn distance_sqr(&self, other: &Self) -> f64 {
        self.iter().zip(other).map(|(a, b)| (a - b) * (a - b)).sum()
    }
}

/// Index of the point nearest to `estimate`; ties go to the lower index.
pub fn mld_detect<P: SignalPoint>(estimate: &P, points: &[P]) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (i, p) in points.iter().enumerate() {
        let d = estimate.distance_sqr(p);
        if d < best_d {
            best = i;
            best_d = d;
        }
    }
    best
}

/// Packs `bits` (MSB first) into an integer.
pub fn bits_to_index(bits: &[bool]) -> usize {
    bits.iter().fold(0, |acc, &b| (acc << 1) | b as usize)
}

/// Writes the `width` low bits of `value`, MSB first.
pub fn index_to_bits(value: usize, width: usize, out: &mut Vec<bool>) {
    for i in (0..width).rev() {
        out.push((value >> i) & 1 == 1);
    }
}

fn gray(i: usize) -> usize {
    i ^ (i >> 1)
}

fn log2_order(order: usize, what: &str) -> Result<usize> {
    if order < 2 || !order.is_power_of_two() {
        return invalid(format!(
            "{what} order must be a power of two >= 2, got {order}"
        ));
    }
    Ok(order.trailing_zeros() as usize)
}

/// Gray-coded `M`-PAM with unit average symbol energy.
#[derive(Debug, Clone, PartialEq)]
pub struct PamConstellation {
    order: usize,
    bits: usize,
    /// Levels in ascending order.
    levels: Vec<f64>,
    /// `label_to_level[g]` is the level index carrying Gray label `g`.
    label_to_level: Vec<usize>,
}

impl PamConstellation {
    pub fn new(order: usize) -> Result<Self> {
        Self::with_energy(order, 1.0)
    }

    fn with_energy(order: usize, energy: f64) -> Result<Self> {
        let bits = log2_order(order, "PAM")?;
        let m = order as f64;
        let scale = (3.0 * energy / (m * m - 1.0)).sqrt();
        let levels = (0..order)
            .map(|i| (2.0 * i as f64 - (m - 1.0)) * scale)
            .collect();
        let mut label_to_level = vec![0; order];
        for i in 0..order {
            label_to_level[gray(i)] = i;
        }
        Ok(Self {
            order,
            bits,
            levels,
            label_to_level,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.bits
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    /// Gray label of level `i`.
    pub fn label(&self, i: usize) -> usize {
        gray(i)
    }

    pub fn average_energy(&self) -> f64 {
        self.levels.iter().map(|l| l * l).sum::<f64>() / self.order as f64
    }

    pub fn map(&self, bits: &[bool]) -> Result<Vec<f64>> {
        if !bits.len().is_multiple_of(self.bits) {
            return invalid(format!(
                "{} bits do not fill {}-bit PAM symbols",
                bits.len(),
                self.bits
            ));
        }
        Ok(bits
            .chunks_exact(self.bits)
            .map(|c| self.levels[self.label_to_level[bits_to_index(c)]])
            .collect())
    }

    /// Nearest level index.
    pub fn detect(&self, estimate: f64) -> usize {
        mld_detect(&estimate, &self.levels)
    }

    pub fn demap_into(&self, symbols: &[f64], out: &mut Vec<bool>) {
        for &s in symbols {
            index_to_bits(gray(self.detect(s)), self.bits, out);
        }
    }

    pub fn demap(&self, symbols: &[f64]) -> Vec<bool> {
        let mut out = Vec::with_capacity(symbols.len() * self.bits);
        self.demap_into(symbols, &mut out);
        out
    }
}

/// Square Gray-coded `M`-QAM with unit average energy: one `√M`-PAM per rail.
#[derive(Debug, Clone, PartialEq)]
pub struct QamConstellation {
    order: usize,
    rail: PamConstellation,
}

impl QamConstellation {
    pub fn new(order: usize) -> Result<Self> {
        let bits = log2_order(order, "QAM")?;
        if bits % 2 != 0 {
            return invalid(format!(
                "QAM order must be a square (4, 16, 64, ...), got {order}"
            ));
        }
        Ok(Self {
            order,
            rail: PamConstellation::with_energy(1 << (bits / 2), 0.5)?,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn bits_per_symbol(&self) -> usize {
        2 * self.rail.bits
    }

    pub fn rail(&self) -> &PamConstellation {
        &self.rail
    }

    /// All points, indexed by `(I label << rail bits) | Q label`.
    pub fn points(&self) -> Vec<Complex64> {
        let m = self.rail.order;
        (0..self.order)
            .map(|label| {
                let i = self.rail.levels[self.rail.label_to_level[label / m]];
                let q = self.rail.levels[self.rail.label_to_level[label % m]];
                Complex64::new(i, q)
            })
            .collect()
    }

    /// First half of each symbol's bits drives the in-phase rail.
    pub fn map(&self, bits: &[bool]) -> Result<Vec<Complex64>> {
        let k = self.bits_per_symbol();
        if !bits.len().is_multiple_of(k) {
            return invalid(format!(
                "{} bits do not fill {k}-bit QAM symbols",
                bits.len()
            ));
        }
        let h = self.rail.bits;
        Ok(bits
            .chunks_exact(k)
            .map(|c| {
                let i = self.rail.levels[self.rail.label_to_level[bits_to_index(&c[..h])]];
                let q = self.rail.levels[self.rail.label_to_level[bits_to_index(&c[h..])]];
                Complex64::new(i, q)
            })
            .collect())
    }

    pub fn demap_into(&self, symbols: &[Complex64], out: &mut Vec<bool>) {
        let h = self.rail.bits;
        for s in symbols {
            index_to_bits(gray(self.rail.detect(s.re)), h, out);
            index_to_bits(gray(self.rail.detect(s.im)), h, out);
        }
    }

    pub fn demap(&self, symbols: &[Complex64]) -> Vec<bool> {
        let mut out = Vec::with_capacity(symbols.len() * self.bits_per_symbol());
        self.demap_into(symbols, &mut out);
        out
    }
}
