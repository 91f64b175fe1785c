//! Measurement frames, dual frames and the variance of classical-shadow
//! estimators for finite-dimensional quantum systems.
//!
//! Everything is generic over a [`Real`] scalar; the `*64` and `*32` aliases
//! below fix it to `f64` or `f32`.

pub mod error;
pub mod frame;
pub mod operator_space;
pub mod povm;
pub mod scalar;
pub mod simulate;
pub mod variance;

pub use error::{Error, Result};
pub use scalar::{Complex, Real};

pub type Herm64 = operator_space::HermOperator<f64>;
pub type SuperOperator64 = operator_space::SuperOperator<f64>;
pub type Povm64 = povm::Povm<f64>;
pub type FrameOperator64 = frame::FrameOperator<f64>;
pub type DualFrame64 = frame::DualFrame<f64>;
pub type MseMatrix64 = variance::MseMatrix<f64>;

pub type Herm32 = operator_space::HermOperator<f32>;
pub type SuperOperator32 = operator_space::SuperOperator<f32>;
pub type Povm32 = povm::Povm<f32>;
pub type FrameOperator32 = frame::FrameOperator<f32>;
pub type DualFrame32 = frame::DualFrame<f32>;
pub type MseMatrix32 = variance::MseMatrix<f32>;
