pub mod bohr_sommerfeld;
pub mod cli;
pub mod error;
pub mod hermite;
pub mod models;
pub mod spectra;
pub mod symbol;
pub mod verify;
pub mod wkb;

pub use error::{Error, Result};
