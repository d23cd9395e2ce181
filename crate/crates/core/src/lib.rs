//! Key-distillation mathematics for tomographic qunit key distribution.
//!
//! Alice and Bob share noisy `n`-level correlations; Eve's best incoherent
//! attack leaves her with a channel tied to Bob's by a square-root
//! measurement. This crate computes
//!
//! * Eve's channel from Bob's, in closed form and from the measurement
//!   itself ([`model`]),
//! * the one-way key yield and the three thresholds that coincide on the
//!   attack curve ([`infotheory`]),
//! * exact post-distillation error rates for block advantage distillation,
//!   their generating function and their geometric decay ([`distill`]),
//! * a seeded, thread-count-independent simulation of the protocol
//!   ([`simulator`]).
//!
//! The analytic layers are generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below fix the scalar to `f64`, which is what the tolerances in
//! the tests assume.

pub mod distill;
pub mod error;
pub mod infotheory;
pub mod model;
pub mod scalar;
pub mod simulator;

pub use error::{Error, Result};
pub use model::Dimension;
pub use scalar::Scalar;

pub type BobChannelF64 = model::BobChannel<f64>;
pub type EveChannelF64 = model::EveChannel<f64>;
pub type GramMatrixF64 = model::GramMatrix<f64>;
pub type CkYieldF64 = infotheory::CkYield<f64>;
pub type ThresholdReportF64 = infotheory::ThresholdReport<f64>;
pub type CurvePointF64 = infotheory::CurvePoint<f64>;
pub type AdExactF64 = distill::AdExact<f64>;
pub type RatioLimitsF64 = distill::RatioLimits<f64>;

pub type BobChannelF32 = model::BobChannel<f32>;
pub type EveChannelF32 = model::EveChannel<f32>;
