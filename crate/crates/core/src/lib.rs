pub mod config;
pub mod error;
pub mod grid;
pub mod impulsive;
pub mod io;
pub mod observables;
pub mod pipeline;
pub mod potentials;
pub mod propagator;
pub mod spectrum;
pub mod units;

pub use error::{Error, Result};
