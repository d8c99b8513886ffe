pub mod error;
pub mod fock;
pub mod optimize;
pub mod states;
pub mod detection;
pub mod teleport;
pub mod hadamard;
pub mod sweep;
pub mod verify;
mod linear;

pub use error::{Error, Result};
