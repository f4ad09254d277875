//! Link-level simulation of filterless multi-color LED visible light
//! communication.
//!
//! The crate couples three intensity-modulation modems (a DC-biased
//! quartered composite transform modem, DCO-OFDM and a 4-band color shift
//! keying baseline) with a CIE photometry engine and a Lambertian room model,
//! so that BER, PAPR and SNR maps are produced alongside illuminance, CCT and
//! CRI from one scenario.
//!
//! Module map:
//!
//! * [`spectral`]: DFT kernels, circulant channel algebra and the quartered
//!   transform family.
//! * [`modem`]: constellations and the three transmit/receive chains.
//! * [`channel`]: cyclic-prefix framing, AWGN and line-of-sight geometry.
//! * [`photometry`]: LED spectra, luminous flux, chromaticity, CCT and CRI.
//! * [`experiments`]: BER sweeps, PAPR CCDFs, room maps and the
//!   illumination report.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod error;
pub mod experiments;
pub mod modem;
pub mod photometry;
pub mod rng;
pub mod spectral;

pub use error::{Error, Result};
pub use num_complex::Complex64;
