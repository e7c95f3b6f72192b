//! The value network: a small convolutional net mapping board planes to one
//! scalar, trained by Adam on squared error with L2 regularization.
//!
//! The math lives in [`Net`], generic over the float type: engines run the
//! f32 instantiation (and checkpoints store exact f32 bits), while the
//! gradient check runs the identical code at f64, where finite differences
//! are meaningful. [`Network`] is the engine-facing f32 bundle of net, Adam
//! state, and step counter.

mod adam;
mod arch;
mod checkpoint;
mod gradcheck;
mod net;
mod network;

pub use adam::Adam;
pub use arch::{Architecture, LayerSpec};
pub use checkpoint::{read_network, write_network};
pub use gradcheck::{grad_check, GradCheckReport};
pub use net::Net;
pub use network::{Network, TrainConfig};

use std::fmt;

/// Float type the net math is generic over.
pub trait Scalar:
    num_traits::Float + num_traits::NumAssign + fmt::Debug + Send + Sync + 'static
{
    /// Lossy conversion from f64, for constants and seeding.
    fn from_f64(x: f64) -> Self;
    fn to_f64(self) -> f64;
}

impl Scalar for f32 {
    fn from_f64(x: f64) -> f32 {
        x as f32
    }
    fn to_f64(self) -> f64 {
        self as f64
    }
}

impl Scalar for f64 {
    fn from_f64(x: f64) -> f64 {
        x
    }
    fn to_f64(self) -> f64 {
        self
    }
}

/// Error from architecture parsing, shape validation, or checkpoint io.
#[derive(Debug, PartialEq)]
pub struct NetError(pub String);

impl fmt::Display for NetError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for NetError {}
