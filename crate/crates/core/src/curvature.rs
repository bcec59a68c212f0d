//! Curvatures and measures of a surface under `g_L` and in the limit.
//!
//! Everything here is a pointwise formula in `A`, the frame derivatives
//! `dA(f2), dA(f3), dα(f2), dα(f3)` and, for curves, the tangent components
//! `γ' = a f2 + b f3`:
//!
//! * `K^L = L/(L+A²)² W − L²/(L+A²)² dA(f2) − L A²/(L+A²)` with
//!   `W = dα(f3) dA(f2) − dα(f2) dA(f3)`,
//! * `K^∞ = −dA(f2) − A²`,
//! * the Diniz–Veloso curvature `K = W`,
//! * `k_n = A sign(b)` and its finite-`L` counterpart [`k_n_l`].
//!
//! Limits that do not exist (`K^L dσ_L`, `ds_L`) are reported through
//! [`DivergenceReport`] rather than as numbers.

use crate::error::{GeomError, Result};
use crate::hgroup::MetricParam;
use crate::scalar::{sign, Real};
use crate::surface::{adapted_frame, frame_derivatives, AdaptedFrameSample, FrameDerivatives, SurfacePatch};

/// `(dα ∧ dA)(f3, f2)`.
fn wedge<T: Real>(fd: &FrameDerivatives<T>) -> T {
    fd.dalpha_f3 * fd.da_f2 - fd.dalpha_f2 * fd.da_f3
}

/// Gaussian curvature of the surface in `(R³, g_L)`.
pub fn k_l<T: Real>(fd: &FrameDerivatives<T>, a: T, l: MetricParam<T>) -> T {
    let l = l.value();
    let q = l + a * a;
    let q2 = q * q;
    l / q2 * wedge(fd) - l * l / q2 * fd.da_f2 - l * a * a / q
}

/// `K^∞ = −dA(f2) − A²`.
pub fn k_inf<T: Real>(fd: &FrameDerivatives<T>, a: T) -> T {
    -fd.da_f2 - a * a
}

/// The Gauss-map curvature `dα(f3) dA(f2) − dα(f2) dA(f3)`.
pub fn k_diniz_veloso<T: Real>(fd: &FrameDerivatives<T>) -> T {
    wedge(fd)
}

/// A curve `t ↦ γ(t)` on a surface, sampled at one parameter value.
///
/// `γ'(t) = a f2 + b f3`; the derivative fields are with respect to `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransverseCurveSample<T> {
    pub t: T,
    pub a: T,
    pub b: T,
    pub da_dt: T,
    pub db_dt: T,
    /// Derivative of the surface function `A` along the curve.
    pub d_big_a_dt: T,
    /// `A` at `γ(t)`.
    pub big_a: T,
    pub dalpha_f2: T,
    pub dalpha_f3: T,
}

impl<T: Real> TransverseCurveSample<T> {
    pub fn new(t: T, (a, b): (T, T), (da_dt, db_dt, d_big_a_dt): (T, T, T), big_a: T, fd: &FrameDerivatives<T>) -> Result<Self> {
        if b == T::zero() || !b.is_finite() {
            return Err(GeomError::NonTransverse { b: b.as_f64() });
        }
        Ok(Self { t, a, b, da_dt, db_dt, d_big_a_dt, big_a, dalpha_f2: fd.dalpha_f2, dalpha_f3: fd.dalpha_f3 })
    }

    /// Samples the curve `t ↦ (u(t), v(t))` drawn on a patch, using a
    /// fourth-order central difference of step `h` for every `t`-derivative.
    pub fn from_patch_curve<S, C>(s: &S, curve: C, t: T, h: T) -> Result<Self>
    where
        S: SurfacePatch<T> + ?Sized,
        C: Fn(T) -> (T, T),
    {
        let lit = T::lit;
        let d4 = |f: &dyn Fn(T) -> Result<T>| -> Result<T> {
            Ok((-f(t + h + h)? + lit(8.0) * f(t + h)? - lit(8.0) * f(t - h)? + f(t - h - h)?) / (lit(12.0) * h))
        };
        let uv_dot = |tt: T| -> (T, T) {
            let fu = |x: T| curve(x).0;
            let fv = |x: T| curve(x).1;
            let g = |f: &dyn Fn(T) -> T| (-f(tt + h + h) + lit(8.0) * f(tt + h) - lit(8.0) * f(tt - h) + f(tt - h - h)) / (lit(12.0) * h);
            (g(&fu), g(&fv))
        };
        let ab_at = |tt: T| -> Result<(T, T, T)> {
            let (u, v) = curve(tt);
            let (du, dv) = uv_dot(tt);
            let f = adapted_frame(s, u, v)?;
            let w = f.fu.scale(du).add(&f.fv.scale(dv));
            let (a, b) = f.tangent_components(&w);
            Ok((a, b, f.a))
        };
        let (a, b, big_a) = ab_at(t)?;
        let da_dt = d4(&|x| Ok(ab_at(x)?.0))?;
        let db_dt = d4(&|x| Ok(ab_at(x)?.1))?;
        let d_big_a_dt = d4(&|x| Ok(ab_at(x)?.2))?;
        let (u, v) = curve(t);
        let fd = frame_derivatives(s, u, v)?;
        Self::new(t, (a, b), (da_dt, db_dt, d_big_a_dt), big_a, &fd)
    }

    /// `a² + b²(L+A²)`, the squared `g_L` speed.
    pub fn speed_sq(&self, l: MetricParam<T>) -> T {
        self.a * self.a + self.b * self.b * (l.value() + self.big_a * self.big_a)
    }

    /// The same curve reparametrized by `g_L` arc length at this point.
    pub fn unit_speed(&self, l: MetricParam<T>) -> Self {
        let q = l.value() + self.big_a * self.big_a;
        let d = self.speed_sq(l);
        let dd = T::two() * (self.a * self.da_dt + self.b * self.db_dt * q + self.b * self.b * self.big_a * self.d_big_a_dt);
        let lam = d.sqrt().recip();
        let lam_t = -T::half() * dd * lam * lam * lam;
        Self {
            a: lam * self.a,
            b: lam * self.b,
            da_dt: lam * (lam * self.da_dt + lam_t * self.a),
            db_dt: lam * (lam * self.db_dt + lam_t * self.b),
            d_big_a_dt: lam * self.d_big_a_dt,
            ..*self
        }
    }
}

/// Normal curvature of the curve inside the surface, in `g_L`, as the
/// four-term display
///
/// ```text
/// (abA A' + (ab' − ba')(L+A²)) / (√(L+A²)(a²+b²(L+A²)))
///   − (A/√(L+A²)) (a/√D) dα(f2)
///   − (A/√(L+A²)) (b/√D) dα(f3)
///   + L A b / (√(L+A²) √D),          D = a² + b²(L+A²).
/// ```
///
/// The first term is homogeneous of degree one in the parametrization
/// speed, so the result is the geometric curvature only for a `g_L` unit
/// speed sample (see [`TransverseCurveSample::unit_speed`]); the limit
/// `A sign(b)` holds for any speed.
pub fn k_n_l<T: Real>(c: &TransverseCurveSample<T>, l: MetricParam<T>) -> Result<T> {
    if c.b == T::zero() {
        return Err(GeomError::NonTransverse { b: 0.0 });
    }
    let (a, b, big_a) = (c.a, c.b, c.big_a);
    let q = l.value() + big_a * big_a;
    let s = q.sqrt();
    let d = a * a + b * b * q;
    let rd = d.sqrt();
    let t1 = (a * b * big_a * c.d_big_a_dt + (a * c.db_dt - b * c.da_dt) * q) / (s * d);
    let t2 = -(big_a / s) * (a / rd) * c.dalpha_f2;
    let t3 = -(big_a / s) * (b / rd) * c.dalpha_f3;
    let t4 = l.value() * big_a * b / (s * rd);
    Ok(t1 + t2 + t3 + t4)
}

/// `k_n = A sign(b)`.
pub fn k_n<T: Real>(a: T, b: T) -> Result<T> {
    if b == T::zero() {
        return Err(GeomError::NonTransverse { b: 0.0 });
    }
    Ok(a * sign(b))
}

/// Coefficients of `f² ∧ f³` in `dσ_L` and in the Hausdorff limit `dσ`.
pub fn area_form_coeffs<T: Real>(a: T, l: MetricParam<T>) -> (T, T) {
    ((l.value() + a * a).sqrt(), T::one())
}

/// Coefficient of `f³` in the limit length form `ds = sign(b) f³`.
pub fn length_form_limit<T: Real>(b: T) -> Result<T> {
    if b == T::zero() {
        return Err(GeomError::NonTransverse { b: 0.0 });
    }
    Ok(sign(b))
}

/// Coefficient of `f³` in `k_n ds`, which is `A` whatever the sign of `b`.
pub fn kn_ds_coeff<T: Real>(a: T) -> T {
    a
}

/// `(a^L, b^L √(L+A²))`, the coefficients of `f²` and `f³` in `ds_L`.
/// Evaluated on `γ'` they give the `g_L` speed `√D`.
pub fn length_form_l<T: Real>(c: &TransverseCurveSample<T>, l: MetricParam<T>) -> (T, T) {
    let q = l.value() + c.big_a * c.big_a;
    let rd = c.speed_sq(l).sqrt();
    (c.a / rd, c.b * q / rd)
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope<T: Real>(xs: &[T], ys: &[T]) -> T {
    let n = T::from_usize(xs.len().min(ys.len())).unwrap_or_else(T::zero);
    let lx: Vec<T> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<T> = ys.iter().map(|y| y.abs().ln()).collect();
    let mx = lx.iter().copied().sum::<T>() / n;
    let my = ly.iter().copied().sum::<T>() / n;
    let (mut sxy, mut sxx) = (T::zero(), T::zero());
    for (x, y) in lx.iter().zip(&ly) {
        sxy += (*x - mx) * (*y - my);
        sxx += (*x - mx) * (*x - mx);
    }
    sxy / sxx
}

/// A quantity sampled along an `L` sweep together with its fitted growth
/// exponent; used in place of a limit that does not exist.
#[derive(Debug, Clone, PartialEq)]
pub struct DivergenceReport<T> {
    pub what: &'static str,
    pub ls: Vec<T>,
    pub values: Vec<T>,
    pub exponent: T,
}

impl<T: Real> DivergenceReport<T> {
    pub fn new(what: &'static str, ls: &[MetricParam<T>], f: impl Fn(MetricParam<T>) -> T) -> Self {
        let xs: Vec<T> = ls.iter().map(|l| l.value()).collect();
        let values: Vec<T> = ls.iter().map(|&l| f(l)).collect();
        let exponent = loglog_slope(&xs, &values);
        Self { what, ls: xs, values, exponent }
    }
}

/// `K^L dσ_L` per unit `f² ∧ f³`, which grows like `√L`.
pub fn area_curvature_divergence<T: Real>(fd: &FrameDerivatives<T>, a: T, ls: &[MetricParam<T>]) -> DivergenceReport<T> {
    DivergenceReport::new("K_L * sigma_L", ls, |l| k_l(fd, a, l) * area_form_coeffs(a, l).0)
}

/// `ds_L(γ') / |b|`, which grows like `√L`.
pub fn length_divergence<T: Real>(c: &TransverseCurveSample<T>, ls: &[MetricParam<T>]) -> DivergenceReport<T> {
    DivergenceReport::new("ds_L / ds", ls, |l| c.speed_sq(l).sqrt() / c.b.abs())
}

/// All curvature quantities at one surface point.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureSample<T> {
    pub k_inf: T,
    pub k_dv: T,
    pub k_l: Vec<(T, T)>,
    pub area_coeff_l: Vec<(T, T)>,
    pub area_coeff_hausdorff: T,
    pub frame: AdaptedFrameSample<T>,
    pub derivatives: FrameDerivatives<T>,
}

pub fn curvature_sample<T: Real, S: SurfacePatch<T> + ?Sized>(s: &S, u: T, v: T, ls: &[MetricParam<T>]) -> Result<CurvatureSample<T>> {
    let frame = adapted_frame(s, u, v)?;
    let fd = frame_derivatives(s, u, v)?;
    let a = frame.a;
    Ok(CurvatureSample {
        k_inf: k_inf(&fd, a),
        k_dv: k_diniz_veloso(&fd),
        k_l: ls.iter().map(|&l| (l.value(), k_l(&fd, a, l))).collect(),
        area_coeff_l: ls.iter().map(|&l| (l.value(), area_form_coeffs(a, l).0)).collect(),
        area_coeff_hausdorff: T::one(),
        frame,
        derivatives: fd,
    })
}
