//! LED spectra and CIE photometry/colorimetry.
//!
//! All spectra share one wavelength grid, 380–780 nm at 1 nm. Colour
//! matching functions are the CIE 1931 2° observer and `V(λ) = ȳ(λ)`.

mod colorimetry;
mod cri;
mod spd;
mod tables;

pub use colorimetry::{chromaticity, illuminance, uv_1960, Cct, TristimulusXYZ, LUMINOUS_EFFICACY};
pub use cri::CriReport;
pub use spd::{
    h_model_spd, planckian_spd, scale_to_power, wavelengths, HModelParams, LedChannel,
    SpectralDistribution, GRID_END_NM, GRID_LEN, GRID_START_NM,
};
pub use tables::{CieTables, DATA_DIR_ENV, TCS_COUNT};
