//! Simulation and closed-form analysis of squeezing-based field sensing on
//! structured qubit architectures: joint reservoirs, perceptrons and layered
//! networks whose blocks steer one another's one-axis twisting.
//!
//! The numerics are generic over [`Real`] (`f32`, `f64`). The aliases below
//! fix the common double-precision instantiations.

pub mod analytic;
pub mod collective;
pub mod error;
pub mod fullspace;
pub mod optimize;
pub mod protocols;
pub mod scalar;

pub use analytic::{ArchKind, ArchitectureParams, Convention, LayerModel};
pub use collective::Axis;
pub use error::{Error, Result};
pub use protocols::Mode;
pub use scalar::Real;

pub type BlockState = collective::BlockState<f64>;
pub type MultiBlockState = collective::MultiBlockState<f64>;
pub type CollectiveOperator = collective::CollectiveOperator<f64>;
pub type FullState = fullspace::FullState<f64>;
pub type SparseHamiltonian = fullspace::SparseHamiltonian<f64>;
pub type PropagatorConfig = fullspace::PropagatorConfig<f64>;
pub type ProtocolSpec = protocols::ProtocolSpec<f64>;
pub type SensitivityReport = protocols::SensitivityReport<f64>;

pub type BlockState32 = collective::BlockState<f32>;
pub type ProtocolSpec32 = protocols::ProtocolSpec<f32>;
