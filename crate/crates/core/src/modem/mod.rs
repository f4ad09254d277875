//! Bit-to-waveform and waveform-to-bit chains.
//!
//! Three intensity-modulation schemes share the same conventions: perfect
//! channel knowledge at the receiver, bias added after the cyclic prefix and
//! negative samples clipped to zero.

mod bias;
mod constellation;
mod csk;
mod ofdm;
mod qct;

pub use bias::{bias_and_clip, dc_bias_factor, dc_level};
pub use constellation::{
    bits_to_index, index_to_bits, mld_detect, PamConstellation, QamConstellation, SignalPoint,
};
pub use csk::{apply_crosstalk, crosstalk_matrix, CrosstalkMatrix, Csk, CskConfig, BANDS};
pub use ofdm::{DcoOfdm, OfdmConfig};
pub use qct::{QctConfig, QctEqualizer, QctModem, QctWaveform};

/// A biased, clipped frame sequence ready for an LED driver.
#[derive(Debug, Clone, PartialEq)]
pub struct Waveform {
    /// One entry per frame, cyclic prefix included.
    pub frames: Vec<Vec<f64>>,
    pub clipped_samples: usize,
}

impl Waveform {
    pub fn total_samples(&self) -> usize {
        self.frames.iter().map(Vec::len).sum()
    }

    pub fn clipped_fraction(&self) -> f64 {
        let total = self.total_samples();
        if total == 0 {
            0.0
        } else {
            self.clipped_samples as f64 / total as f64
        }
    }
}
