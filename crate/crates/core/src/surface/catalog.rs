use super::{ParamRect, PatchJet, SurfacePatch};
use crate::error::{GeomError, Result};
use crate::expr::{eval_dual, Expr};
use crate::hgroup::Point;
use crate::scalar::Real;

/// The plane `z = 0`, parametrized by `(u, v) ↦ (u, v, 0)`.
#[derive(Debug, Clone, Copy)]
pub struct Plane<T> {
    rect: ParamRect<T>,
}

impl<T: Real> Plane<T> {
    pub fn new(u: (T, T), v: (T, T)) -> Self {
        Self { rect: ParamRect::new(u, v) }
    }
}

impl<T: Real> SurfacePatch<T> for Plane<T> {
    fn domain(&self) -> ParamRect<T> {
        self.rect
    }

    fn jet(&self, u: T, v: T) -> Result<PatchJet<T>> {
        let (o, z) = (T::one(), T::zero());
        Ok(PatchJet { point: Point::new(u, v, z), du: [o, z, z], dv: [z, o, z] })
    }
}

/// Vertical cylinder `(R cos u, R sin u, v)`.
#[derive(Debug, Clone, Copy)]
pub struct Cylinder<T> {
    radius: T,
    rect: ParamRect<T>,
}

impl<T: Real> Cylinder<T> {
    pub fn new(radius: T, v: (T, T)) -> Self {
        Self { radius, rect: ParamRect::periodic(v) }
    }
}

impl<T: Real> SurfacePatch<T> for Cylinder<T> {
    fn domain(&self) -> ParamRect<T> {
        self.rect
    }

    fn jet(&self, u: T, v: T) -> Result<PatchJet<T>> {
        let (s, c) = u.sin_cos();
        let r = self.radius;
        let z = T::zero();
        Ok(PatchJet { point: Point::new(r * c, r * s, v), du: [-r * s, r * c, z], dv: [z, z, T::one()] })
    }
}

/// Graph of `z = k (u² + v²)`.
#[derive(Debug, Clone, Copy)]
pub struct Paraboloid<T> {
    k: T,
    rect: ParamRect<T>,
}

impl<T: Real> Paraboloid<T> {
    pub fn new(k: T, u: (T, T), v: (T, T)) -> Self {
        Self { k, rect: ParamRect::new(u, v) }
    }
}

impl<T: Real> SurfacePatch<T> for Paraboloid<T> {
    fn domain(&self) -> ParamRect<T> {
        self.rect
    }

    fn jet(&self, u: T, v: T) -> Result<PatchJet<T>> {
        let (o, z, two) = (T::one(), T::zero(), T::two());
        Ok(PatchJet { point: Point::new(u, v, self.k * (u * u + v * v)), du: [o, z, two * self.k * u], dv: [z, o, two * self.k * v] })
    }
}

/// A patch given by coordinate expressions in `u` and `v`; partials come
/// from dual-number evaluation.
#[derive(Debug, Clone)]
pub struct ExprPatch<T> {
    coords: [Expr; 3],
    rect: ParamRect<T>,
}

impl<T: Real> ExprPatch<T> {
    pub fn parametric(x: Expr, y: Expr, z: Expr, rect: ParamRect<T>) -> Self {
        Self { coords: [x, y, z], rect }
    }

    /// The graph `(u, v, h(u, v))`.
    pub fn graph(h: Expr, rect: ParamRect<T>) -> Self {
        use crate::expr::Var;
        Self { coords: [Expr::Var(Var::U), Expr::Var(Var::V), h], rect }
    }
}

impl<T: Real> SurfacePatch<T> for ExprPatch<T> {
    fn domain(&self) -> ParamRect<T> {
        self.rect
    }

    fn jet(&self, u: T, v: T) -> Result<PatchJet<T>> {
        let mut vals = [crate::expr::Dual2::default(); 3];
        for (slot, e) in vals.iter_mut().zip(&self.coords) {
            *slot = eval_dual(e, u, v)?;
        }
        if vals.iter().any(|d| !(d.value.is_finite() && d.d_u.is_finite() && d.d_v.is_finite())) {
            return Err(GeomError::InvalidParameter(format!("surface expression not finite at (u, v) = ({u}, {v})")));
        }
        Ok(PatchJet { point: Point::new(vals[0].value, vals[1].value, vals[2].value), du: vals.map(|d| d.d_u), dv: vals.map(|d| d.d_v) })
    }
}
