//! Matrix-valued phase-space symbols and their Moyal calculus.

mod json;
mod matrix;
mod normal_form;
mod scalar;

pub use matrix::{det, eig2_hermitian, CMat, PhaseSpaceSymbol};
pub use normal_form::{check_parity, rescale_to_well, t0_symbol, NormalForm, WellCandidate};
pub use scalar::*;
