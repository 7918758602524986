pub mod airy;
pub mod constants;
pub mod design;
pub mod error;
pub mod numerics;
pub mod particle;
pub mod pipeline;
pub mod propagation;
pub mod qr;
pub mod scenario;
pub mod scales;
pub mod sensitivity;
pub mod solver;
pub mod units;

pub use error::{Error, Result};
