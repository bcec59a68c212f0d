//! Surface geometry in the first Heisenberg group H¹ under the Riemannian
//! approximation `g_L`, and its sub-Riemannian limit `L → ∞`.
//!
//! The numerical core is generic over the scalar type ([`Real`], i.e. `f32`
//! or `f64`); the group law also runs over exact rationals. Concrete aliases
//! for the common instantiations live at the crate root.

pub mod curvature;
pub mod error;
pub mod expr;
pub mod gaussbonnet;
pub mod hgroup;
pub mod quadrature;
pub mod rotsurf;
pub mod scalar;
pub mod surface;

pub use error::{GeomError, Result};
pub use scalar::Real;

/// Rational point, for exact group arithmetic.
pub type PointQ = hgroup::Point<num_rational::Rational64>;
pub type Point64 = hgroup::Point<f64>;
pub type Point32 = hgroup::Point<f32>;
pub type FrameVec64 = hgroup::FrameVec<f64>;
pub type MetricParam64 = hgroup::MetricParam<f64>;
pub type Dual64 = expr::Dual2<f64>;
pub type AdaptedFrame64 = surface::AdaptedFrameSample<f64>;
pub type FrameDerivatives64 = surface::FrameDerivatives<f64>;
pub type CurvatureSample64 = curvature::CurvatureSample<f64>;
pub type TransverseCurve64 = curvature::TransverseCurveSample<f64>;
pub type Family64 = rotsurf::Family<f64>;
pub type FamilyProfile64 = rotsurf::FamilyProfile<f64>;
pub type RotationSpec64 = rotsurf::RotationSurfaceSpec<f64>;
pub type Mesh64 = rotsurf::Mesh<f64>;
pub type ParamRegion64 = gaussbonnet::ParamRegion<f64>;
pub type GbReport64 = gaussbonnet::GbReport<f64>;
pub type ConvergenceTable64 = gaussbonnet::ConvergenceTable<f64>;
