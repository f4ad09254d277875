//! Transform kernels, circulant channel algebra and the quartered
//! orthogonal transform family.
//!
//! DFT convention: unnormalized forward transform
//! `X[k] = Σ x[n]·exp(-j2πkn/N)`, inverse scaled by `1/N`. Channel
//! eigenvalues (`H(k)`, `|H(k)|²`) are quoted under this convention.

mod circulant;
mod dft;
mod papr;
mod qct;

pub use circulant::{circulant_apply, circulant_matched_apply, ChannelImpulseResponse};
pub use dft::{dft, hermitian_extend, idft, FftKernel};
pub use papr::papr_db;
pub use qct::{
    build_qct_family, trig_eigenbasis, AssignmentPolicy, BasisColumn, EigenBasis, FamilyResidual,
    TransformFamily, STREAMS,
};
