pub mod adiabatic;
pub mod classify;
pub mod cli;
pub mod clock;
pub mod error;
pub mod io;
pub mod matrix;
pub mod pauli;
pub mod protocols;
pub mod sign_elim;
pub mod spectral;

pub use error::{Error, Result};
