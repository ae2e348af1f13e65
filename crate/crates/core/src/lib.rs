//! Wideband analog beamforming with a rotatable uniform linear array.
//!
//! Beam squint makes a phase-shifter beam drift with frequency, except along
//! the array boresight. Rotating the array changes how much of the target
//! angular sector sits near boresight. This crate jointly picks the phase
//! shifts and the rotation to maximize the worst-case gain over a band and an
//! angle range, by alternating between an SDP-based beamformer update and a
//! scalar rotation update, each run as successive convex approximation.
//!
//! All numerics are generic over [`Real`] (`f32` or `f64`); the aliases at
//! the crate root fix the scalar to `f64`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod beam;
pub mod beamforming;
pub mod composite;
pub mod conic;
pub mod error;
pub mod geometry;
pub mod linalg;
pub mod num;
pub mod orchestrator;
pub mod rotation;

pub use error::{Error, Result};
pub use num::Real;

pub type ArrayConfig = geometry::ArrayConfig<f64>;
pub type RotationAngles = geometry::RotationAngles<f64>;
pub type SteeringVector = geometry::SteeringVector<f64>;
pub type AngularRange = composite::AngularRange<f64>;
pub type CompositeBounds = composite::CompositeBounds<f64>;
pub type CompositeGrid = composite::CompositeGrid<f64>;
pub type BeamformerWeights = beam::BeamformerWeights<f64>;
pub type GainMap = beam::GainMap<f64>;
pub type HermitianMatrix = linalg::HermitianMatrix<f64>;
pub type ScaTrace = beamforming::ScaTrace<f64>;
pub type SurrogateCoeffs = rotation::SurrogateCoeffs<f64>;
pub type SolveParams = orchestrator::SolveParams<f64>;
pub type SolveReport = orchestrator::SolveReport<f64>;
pub type BenchmarkResult = orchestrator::BenchmarkResult<f64>;
pub use orchestrator::Scheme;
