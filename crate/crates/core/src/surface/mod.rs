//! Parametric surface patches in H¹ and their adapted frames.
//!
//! At a non-characteristic point the horizontal plane meets the tangent
//! plane in a line. The adapted frame consists of
//!
//! * `f2`, the unit horizontal vector spanning that line,
//! * `f1`, the horizontal normal obtained by rotating `f2` clockwise,
//!   `f1 = cos α e1 + sin α e2`,
//! * `f3 = e3 + A f1`, the unique tangent vector with `e3`-component one and
//!   no `f2`-component.
//!
//! The sign of `f2` is chosen so that `(f2, f3)` is positively oriented with
//! respect to `(f_u, f_v)`; wrapping a patch in [`Reoriented`] flips it.

mod catalog;
mod frame;

pub use catalog::{Cylinder, ExprPatch, Paraboloid, Plane};
pub use frame::{
    adapted_frame, adapted_frame_with, beta, characteristic_test, frame_derivatives, frame_derivatives_fd, pushforward_frame, xl_basis,
    AdaptedFrameSample, FrameDerivatives, FrameOptions,
};

use crate::error::Result;
use crate::hgroup::Point;
use crate::scalar::Real;

/// Parameter rectangle `[u0, u1] × [v0, v1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamRect<T> {
    pub u: (T, T),
    pub v: (T, T),
    /// The patch is `2π`-periodic in `u`, so finite-difference stencils may
    /// leave `[u0, u1]`.
    pub periodic_u: bool,
}

impl<T: Real> ParamRect<T> {
    pub fn new(u: (T, T), v: (T, T)) -> Self {
        Self { u, v, periodic_u: false }
    }

    pub fn periodic(v: (T, T)) -> Self {
        Self { u: (T::zero(), T::lit(2.0 * std::f64::consts::PI)), v, periodic_u: true }
    }

    pub fn contains(&self, u: T, v: T) -> bool {
        (self.periodic_u || (u >= self.u.0 && u <= self.u.1)) && v >= self.v.0 && v <= self.v.1
    }

    pub fn extent(&self) -> (T, T) {
        (self.u.1 - self.u.0, self.v.1 - self.v.0)
    }
}

/// Position and coordinate partials of a patch at one parameter value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PatchJet<T> {
    pub point: Point<T>,
    pub du: [T; 3],
    pub dv: [T; 3],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Orientation {
    #[default]
    Positive,
    Negative,
}

/// A map `(u, v) ↦ (x, y, z)` with first partials.
pub trait SurfacePatch<T: Real>: Send + Sync {
    /// Rectangle on which the map may be evaluated.
    fn domain(&self) -> ParamRect<T>;

    fn jet(&self, u: T, v: T) -> Result<PatchJet<T>>;

    fn orientation(&self) -> Orientation {
        Orientation::Positive
    }

    /// Exact frame derivatives, for patches that know them.
    fn closed_form_derivatives(&self, _u: T, _v: T) -> Option<Result<FrameDerivatives<T>>> {
        None
    }
}

impl<T: Real, S: SurfacePatch<T> + ?Sized> SurfacePatch<T> for &S {
    fn domain(&self) -> ParamRect<T> {
        (**self).domain()
    }
    fn jet(&self, u: T, v: T) -> Result<PatchJet<T>> {
        (**self).jet(u, v)
    }
    fn orientation(&self) -> Orientation {
        (**self).orientation()
    }
    fn closed_form_derivatives(&self, u: T, v: T) -> Option<Result<FrameDerivatives<T>>> {
        (**self).closed_form_derivatives(u, v)
    }
}

impl<T: Real, S: SurfacePatch<T> + ?Sized> SurfacePatch<T> for Box<S> {
    fn domain(&self) -> ParamRect<T> {
        (**self).domain()
    }
    fn jet(&self, u: T, v: T) -> Result<PatchJet<T>> {
        (**self).jet(u, v)
    }
    fn orientation(&self) -> Orientation {
        (**self).orientation()
    }
    fn closed_form_derivatives(&self, u: T, v: T) -> Option<Result<FrameDerivatives<T>>> {
        (**self).closed_form_derivatives(u, v)
    }
}

/// The same patch with the opposite choice of `f2`.
///
/// Flipping `f2` flips `f1`, `A`, `dα(f2)` and `dA(f3)`; `f3`, `dA(f2)` and
/// `dα(f3)` are unchanged.
#[derive(Debug, Clone)]
pub struct Reoriented<S>(pub S);

impl<T: Real, S: SurfacePatch<T>> SurfacePatch<T> for Reoriented<S> {
    fn domain(&self) -> ParamRect<T> {
        self.0.domain()
    }

    fn jet(&self, u: T, v: T) -> Result<PatchJet<T>> {
        self.0.jet(u, v)
    }

    fn orientation(&self) -> Orientation {
        match self.0.orientation() {
            Orientation::Positive => Orientation::Negative,
            Orientation::Negative => Orientation::Positive,
        }
    }

    fn closed_form_derivatives(&self, u: T, v: T) -> Option<Result<FrameDerivatives<T>>> {
        self.0
            .closed_form_derivatives(u, v)
            .map(|r| r.map(|d| FrameDerivatives { da_f2: d.da_f2, da_f3: -d.da_f3, dalpha_f2: -d.dalpha_f2, dalpha_f3: d.dalpha_f3 }))
    }
}
