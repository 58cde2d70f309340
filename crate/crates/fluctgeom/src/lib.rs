//! Numerical toolkit for geometric fluctuation frameworks on phase space.
//!
//! Three classical average functionals — Riemannian (Gaussian thermodynamic
//! fluctuations), symplectic (Liouville weight) and Hermitian (coherent-state
//! weight) — together with the finite-dimensional linear algebra of
//! generalized complex structures that interpolates between the symplectic
//! and complex pictures, coherent-state oscillator moments, and the
//! accelerated-frame phase chain that recasts the Unruh phase as a B-field
//! line integral on phase space.
//!
//! Everything is generic over the working scalar via [`scalar::Scalar`]
//! (`f32` or `f64`); concrete `f64`/`f32` aliases for the main types live at
//! the crate root. Quoted tolerances are stated for `f64`.

pub mod coherent;
pub mod config;
pub mod fluct;
pub mod gcs;
pub mod matdoc;
pub mod quad;
pub mod report;
pub mod scalar;
pub mod suite;
pub mod unruh;

pub use nalgebra;
pub use num_complex;

pub use report::{CheckResult, Report};
pub use scalar::Scalar;

/// `f64` aliases (the default working precision).
pub type GeneralizedVector64 = gcs::GeneralizedVector<f64>;
pub type TwoForm64 = gcs::TwoForm<f64>;
pub type SymplecticForm64 = gcs::SymplecticForm<f64>;
pub type ComplexStructure64 = gcs::ComplexStructure<f64>;
pub type Gcs64 = gcs::Gcs<f64>;
pub type ThermoState64 = fluct::ThermoState<f64>;
pub type IdealGasRefs64 = fluct::IdealGasRefs<f64>;
pub type FluctuationMetric64 = fluct::FluctuationMetric<f64>;
pub type DarbouxPoint64 = fluct::DarbouxPoint<f64>;
pub type CoherentAmplitude64 = coherent::CoherentAmplitude<f64>;
pub type FockVector64 = coherent::FockVector<f64>;
pub type PhysicalConstants64 = unruh::PhysicalConstants<f64>;
pub type FrameSpec64 = unruh::FrameSpec<f64>;
pub type TrajectorySpec64 = unruh::TrajectorySpec<f64>;
pub type BFieldSpec64 = unruh::BFieldSpec<f64>;

/// `f32` aliases.
pub type GeneralizedVector32 = gcs::GeneralizedVector<f32>;
pub type TwoForm32 = gcs::TwoForm<f32>;
pub type SymplecticForm32 = gcs::SymplecticForm<f32>;
pub type ComplexStructure32 = gcs::ComplexStructure<f32>;
pub type Gcs32 = gcs::Gcs<f32>;
pub type ThermoState32 = fluct::ThermoState<f32>;
pub type FluctuationMetric32 = fluct::FluctuationMetric<f32>;
pub type CoherentAmplitude32 = coherent::CoherentAmplitude<f32>;
pub type PhysicalConstants32 = unruh::PhysicalConstants<f32>;
pub type FrameSpec32 = unruh::FrameSpec<f32>;
