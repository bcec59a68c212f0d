use super::{Orientation, SurfacePatch};
use crate::error::{GeomError, Result};
use crate::hgroup::{FrameVec, MetricParam, Point};
use crate::scalar::Real;

/// Knobs of the frame computation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameOptions<T> {
    /// Relative tolerance of [`characteristic_test`].
    pub char_tol: T,
    /// Finite-difference step as a fraction of the parameter-rectangle extent.
    pub fd_step_rel: T,
}

impl<T: Real> Default for FrameOptions<T> {
    fn default() -> Self {
        Self { char_tol: T::lit(1e-10), fd_step_rel: T::lit(1e-3) }
    }
}

/// The adapted frame at one surface point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptedFrameSample<T> {
    pub point: Point<T>,
    /// Angle from `e1` to `f1`, in `(-π, π]`.
    pub alpha: T,
    /// `A = -f¹(e3)`.
    pub a: T,
    pub f1: FrameVec<T>,
    pub f2: FrameVec<T>,
    pub f3: FrameVec<T>,
    /// Coefficients `(p_u, p_v)` with `f2 = p_u f_u + p_v f_v`.
    pub f2_param: [T; 2],
    /// Coefficients with `f3 = s_u f_u + s_v f_v`.
    pub f3_param: [T; 2],
    /// `(f² ∧ f³)(f_u, f_v)`, the pullback density of the limit area form.
    pub density: T,
    pub fu: FrameVec<T>,
    pub fv: FrameVec<T>,
}

impl<T: Real> AdaptedFrameSample<T> {
    /// Coforms `f¹, f², f³` applied to a tangent vector.
    pub fn coframe(&self, w: &FrameVec<T>) -> [T; 3] {
        let (s, c) = self.alpha.sin_cos();
        [c * w.c[0] + s * w.c[1] - self.a * w.c[2], -s * w.c[0] + c * w.c[1], w.c[2]]
    }

    /// Decomposes a tangent vector `w = a f2 + b f3` (any `f1` component is ignored).
    pub fn tangent_components(&self, w: &FrameVec<T>) -> (T, T) {
        let f = self.coframe(w);
        (f[1], f[2])
    }
}

/// Directional derivatives of `A` and `α` along `f2` and `f3`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FrameDerivatives<T> {
    pub da_f2: T,
    pub da_f3: T,
    pub dalpha_f2: T,
    pub dalpha_f3: T,
}

impl<T: Real> FrameDerivatives<T> {
    /// `dα(f3) + dA(f2) + A²`, which vanishes identically on any surface.
    pub fn structure_defect(&self, a: T) -> T {
        self.dalpha_f3 + self.da_f2 + a * a
    }
}

/// Frame coefficients of `f_u` and `f_v`: `c1 = x_u`, `c2 = y_u`,
/// `c3 = z_u + (y x_u - x y_u)/2`.
pub fn pushforward_frame<T: Real, S: SurfacePatch<T> + ?Sized>(s: &S, u: T, v: T) -> Result<(FrameVec<T>, FrameVec<T>)> {
    let jet = s.jet(u, v)?;
    let fu = FrameVec::from_coords(jet.point, jet.du);
    let fv = FrameVec::from_coords(jet.point, jet.dv);
    if !fu.is_finite() || !fv.is_finite() {
        return Err(GeomError::InvalidParameter(format!("non-finite tangent at (u, v) = ({u}, {v})")));
    }
    Ok((fu, fv))
}

/// True when the tangent plane is horizontal: both `e3`-components vanish
/// relative to the largest frame coefficient.
pub fn characteristic_test<T: Real>(fu: &FrameVec<T>, fv: &FrameVec<T>, tol: T) -> bool {
    let scale = fu.max_abs().max(fv.max_abs());
    fu.c[2].abs() <= tol * scale && fv.c[2].abs() <= tol * scale
}

fn cross<T: Real>(a: &[T; 3], b: &[T; 3]) -> [T; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn norm<T: Real>(a: &[T; 3]) -> T {
    (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt()
}

pub fn adapted_frame<T: Real, S: SurfacePatch<T> + ?Sized>(s: &S, u: T, v: T) -> Result<AdaptedFrameSample<T>> {
    adapted_frame_with(s, u, v, &FrameOptions::default())
}

pub fn adapted_frame_with<T: Real, S: SurfacePatch<T> + ?Sized>(s: &S, u: T, v: T, opts: &FrameOptions<T>) -> Result<AdaptedFrameSample<T>> {
    let (fu, fv) = pushforward_frame(s, u, v)?;
    let (uf, vf) = (u.as_f64(), v.as_f64());
    if norm(&cross(&fu.c, &fv.c)) <= opts.char_tol * norm(&fu.c) * norm(&fv.c) {
        return Err(GeomError::DegenerateParametrization { u: uf, v: vf });
    }
    if characteristic_test(&fu, &fv, opts.char_tol) {
        return Err(GeomError::CharacteristicPoint { u: uf, v: vf });
    }

    // c3(fv)·fu − c3(fu)·fv has no e3 component: it spans D ∩ TS
    let (mut pu, mut pv) = (fv.c[2], -fu.c[2]);
    let hx = pu * fu.c[0] + pv * fv.c[0];
    let hy = pu * fu.c[1] + pv * fv.c[1];
    let len = (hx * hx + hy * hy).sqrt();
    if len == T::zero() {
        return Err(GeomError::CharacteristicPoint { u: uf, v: vf });
    }
    let (mut x, mut y) = (hx / len, hy / len);
    pu /= len;
    pv /= len;

    // f3 = σ fu + τ fv with e³(f3) = 1 and ⟨f3, f2⟩ = 0
    let gu = fu.c[0] * x + fu.c[1] * y;
    let gv = fv.c[0] * x + fv.c[1] * y;
    let det = fu.c[2] * gv - fv.c[2] * gu;
    if det == T::zero() {
        return Err(GeomError::CharacteristicPoint { u: uf, v: vf });
    }
    let (sigma, tau) = (gv / det, -gu / det);
    let tx = sigma * fu.c[0] + tau * fv.c[0];
    let ty = sigma * fu.c[1] + tau * fv.c[1];

    let orient = pu * tau - pv * sigma;
    let want_positive = s.orientation() == Orientation::Positive;
    if (orient > T::zero()) != want_positive {
        x = -x;
        y = -y;
        pu = -pu;
        pv = -pv;
    }
    let orient = pu * tau - pv * sigma;
    // f1 = y e1 − x e2
    let (c1, s1) = (y, -x);
    let a = tx * c1 + ty * s1;
    let p = fu.base;
    Ok(AdaptedFrameSample {
        point: p,
        alpha: s1.atan2(c1),
        a,
        f1: FrameVec::new(p, c1, s1, T::zero()),
        f2: FrameVec::new(p, x, y, T::zero()),
        f3: FrameVec::new(p, a * c1, a * s1, T::one()),
        f2_param: [pu, pv],
        f3_param: [sigma, tau],
        density: orient.recip(),
        fu,
        fv,
    })
}

#[derive(Clone, Copy)]
enum Stencil<T> {
    Central(T),
    Forward(T),
    Backward(T),
}

fn stencil<T: Real>(x: T, lo: T, hi: T, h: T, periodic: bool) -> Stencil<T> {
    if periodic {
        return Stencil::Central(h);
    }
    let room = (x - lo).min(hi - x);
    let two = T::two();
    if room >= two * h {
        Stencil::Central(h)
    } else if room >= two * h * T::lit(0.05) {
        Stencil::Central(room / two)
    } else if x - lo < hi - x {
        Stencil::Forward(((hi - x) / T::lit(4.0)).min(h))
    } else {
        Stencil::Backward(((x - lo) / T::lit(4.0)).min(h))
    }
}

/// Derivatives of `(A, α)` along one parameter direction.
fn partials<T: Real, F>(mut g: F, center: (T, T), st: Stencil<T>) -> Result<(T, T)>
where
    F: FnMut(T) -> Result<(T, T)>,
{
    let two_pi = T::lit(2.0 * std::f64::consts::PI);
    let unwrap = |alpha: T| alpha - two_pi * ((alpha - center.1) / two_pi).round();
    let mut sample = |k: T, h: T| -> Result<(T, T)> {
        let (a, al) = g(k * h)?;
        Ok((a, unwrap(al)))
    };
    let lit = T::lit;
    match st {
        Stencil::Central(h) => {
            let (p1, p2) = (sample(T::one(), h)?, sample(T::two(), h)?);
            let (m1, m2) = (sample(-T::one(), h)?, sample(-T::two(), h)?);
            let d = |f2: T, f1: T, b1: T, b2: T| (-f2 + lit(8.0) * f1 - lit(8.0) * b1 + b2) / (lit(12.0) * h);
            Ok((d(p2.0, p1.0, m1.0, m2.0), d(p2.1, p1.1, m1.1, m2.1)))
        }
        Stencil::Forward(h) | Stencil::Backward(h) => {
            let dir = if matches!(st, Stencil::Forward(_)) { T::one() } else { -T::one() };
            let pts = [center, sample(dir, h)?, sample(dir * lit(2.0), h)?, sample(dir * lit(3.0), h)?, sample(dir * lit(4.0), h)?];
            let w = [lit(-25.0), lit(48.0), lit(-36.0), lit(16.0), lit(-3.0)];
            let (mut da, mut dal) = (T::zero(), T::zero());
            for (p, wk) in pts.iter().zip(w) {
                da += wk * p.0;
                dal += wk * p.1;
            }
            let scale = dir / (lit(12.0) * h);
            Ok((da * scale, dal * scale))
        }
    }
}

/// Frame derivatives, preferring the patch's closed form when it has one.
pub fn frame_derivatives<T: Real, S: SurfacePatch<T> + ?Sized>(s: &S, u: T, v: T) -> Result<FrameDerivatives<T>> {
    match s.closed_form_derivatives(u, v) {
        Some(r) => r,
        None => frame_derivatives_fd(s, u, v, &FrameOptions::default()),
    }
}

/// Frame derivatives by fourth-order finite differences of `A(u, v)` and the
/// locally unwrapped `α(u, v)`, contracted with the parameter coefficients of
/// `f2` and `f3`. Stencils shrink, then turn one-sided, near the rectangle edge.
pub fn frame_derivatives_fd<T: Real, S: SurfacePatch<T> + ?Sized>(s: &S, u: T, v: T, opts: &FrameOptions<T>) -> Result<FrameDerivatives<T>> {
    let here = adapted_frame_with(s, u, v, opts)?;
    let rect = s.domain();
    let (eu, ev) = rect.extent();
    let (hu, hv) = (opts.fd_step_rel * eu.abs(), opts.fd_step_rel * ev.abs());
    let center = (here.a, here.alpha);
    let at = |uu: T, vv: T| -> Result<(T, T)> {
        let f = adapted_frame_with(s, uu, vv, opts)?;
        Ok((f.a, f.alpha))
    };
    let (a_u, al_u) = partials(|d| at(u + d, v), center, stencil(u, rect.u.0, rect.u.1, hu, rect.periodic_u))?;
    let (a_v, al_v) = partials(|d| at(u, v + d), center, stencil(v, rect.v.0, rect.v.1, hv, false))?;
    let [pu, pv] = here.f2_param;
    let [su, sv] = here.f3_param;
    Ok(FrameDerivatives {
        da_f2: pu * a_u + pv * a_v,
        da_f3: su * a_u + sv * a_v,
        dalpha_f2: pu * al_u + pv * al_v,
        dalpha_f3: su * al_u + sv * al_v,
    })
}

/// The angle `β` with `cos β = √L/√(L+A²)` and `sin β = A/√(L+A²)`.
pub fn beta<T: Real>(l: MetricParam<T>, a: T) -> T {
    a.atan2(l.sqrt())
}

/// The `g_L`-orthonormal frame `(X1, X2, X3)` along the surface: `X1` normal,
/// `X2 = f2`, `X3 = f3/√(L+A²)`.
pub fn xl_basis<T: Real>(sample: &AdaptedFrameSample<T>, l: MetricParam<T>) -> [FrameVec<T>; 3] {
    let root = (l.value() + sample.a * sample.a).sqrt();
    let sl = l.sqrt();
    // −(A/√(L+A²)) e3^L = −(A/(√(L+A²)√L)) e3
    let e3 = FrameVec::new(sample.point, T::zero(), T::zero(), T::one());
    let x1 = sample.f1.scale(sl / root).add(&e3.scale(-sample.a / (root * sl)));
    [x1, sample.f2, sample.f3.scale(root.recip())]
}

#[cfg(test)]
mod tests {
    use super::super::{Cylinder, Plane, Reoriented};
    use super::*;
    use crate::hgroup::{coframe_eval, gl_dot, Coform};

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn plane_pushforward() {
        let plane = Plane::<f64>::new((-3.0, 3.0), (-3.0, 3.0));
        let (fu, fv) = pushforward_frame(&plane, 1.0, 0.0).unwrap();
        assert_eq!(fu.c, [1.0, 0.0, 0.0]);
        assert_eq!(fv.c, [0.0, 1.0, -0.5]);
        assert_eq!(fv.to_coords(), [0.0, 1.0, 0.0]);
    }

    #[test]
    fn characteristic_examples() {
        let plane = Plane::<f64>::new((-3.0, 3.0), (-3.0, 3.0));
        let (fu, fv) = pushforward_frame(&plane, 0.0, 0.0).unwrap();
        assert!(characteristic_test(&fu, &fv, 1e-10));
        let (fu, fv) = pushforward_frame(&plane, 1.0, 0.0).unwrap();
        assert!(!characteristic_test(&fu, &fv, 1e-10));
        let cyl = Cylinder::<f64>::new(1.0, (-2.0, 2.0));
        for &(u, v) in &[(0.0, 0.0), (1.0, 0.5), (4.0, -1.5)] {
            let (fu, fv) = pushforward_frame(&cyl, u, v).unwrap();
            assert!(!characteristic_test(&fu, &fv, 1e-10));
        }
        assert!(matches!(adapted_frame(&plane, 0.0, 0.0), Err(GeomError::CharacteristicPoint { .. })));
    }

    #[test]
    fn cartesian_plane_frame() {
        // positive orientation of (u, v) = (x, y) gives f2 = -e1 at (1, 0)
        let plane = Plane::<f64>::new((-3.0, 3.0), (-3.0, 3.0));
        let f = adapted_frame(&plane, 1.0, 0.0).unwrap();
        assert!(close(f.a, -2.0, 1e-14));
        assert!(close(f.alpha, std::f64::consts::FRAC_PI_2, 1e-14));
        assert!(f.density > 0.0);
        let g = adapted_frame(&Reoriented(plane), 1.0, 0.0).unwrap();
        assert!(close(g.a, 2.0, 1e-14));
        assert!(close(g.alpha, -std::f64::consts::FRAC_PI_2, 1e-14));
        assert!(g.density < 0.0);
    }

    #[test]
    fn frame_invariants() {
        let plane = Plane::<f64>::new((-3.0, 3.0), (-3.0, 3.0));
        for &(u, v) in &[(1.0, 0.3), (-0.4, 2.0), (2.5, -1.5)] {
            let f = adapted_frame(&plane, u, v).unwrap();
            assert!(f.f1.c[2].abs() <= 1e-12 && f.f2.c[2].abs() <= 1e-12);
            let h = |a: &FrameVec<f64>, b: &FrameVec<f64>| a.c[0] * b.c[0] + a.c[1] * b.c[1];
            assert!(close(h(&f.f1, &f.f1), 1.0, 1e-12));
            assert!(close(h(&f.f2, &f.f2), 1.0, 1e-12));
            assert!(h(&f.f1, &f.f2).abs() <= 1e-12);
            let (s, c) = f.alpha.sin_cos();
            assert!(close(f.f1.c[0], c, 1e-12) && close(f.f1.c[1], s, 1e-12));
            assert!(close(f.f2.c[0], -s, 1e-12) && close(f.f2.c[1], c, 1e-12));
            // f3 rebuilt from its parameter coefficients equals e3 + A f1
            let rebuilt = f.fu.scale(f.f3_param[0]).add(&f.fv.scale(f.f3_param[1]));
            for k in 0..3 {
                assert!(close(rebuilt.c[k], f.f3.c[k], 1e-12));
            }
            // f¹ annihilates the tangent plane
            assert!(f.coframe(&f.fu)[0].abs() <= 1e-10 && f.coframe(&f.fv)[0].abs() <= 1e-10);
        }
    }

    #[test]
    fn inverse_coframe_relations() {
        let plane = Plane::<f64>::new((-3.0, 3.0), (-3.0, 3.0));
        let f = adapted_frame(&plane, 0.7, -1.1).unwrap();
        let (s, c) = f.alpha.sin_cos();
        let w = FrameVec::new(f.point, 0.3, -1.7, 2.2);
        let [g1, g2, g3] = f.coframe(&w);
        let coords = w.to_coords();
        let e1 = coframe_eval(Coform::E1, &f.point, coords);
        let e2 = coframe_eval(Coform::E2, &f.point, coords);
        let e3 = coframe_eval(Coform::E3, &f.point, coords);
        assert!(close(e3, g3, 1e-12));
        assert!(close(e1, c * g1 - s * g2 + f.a * c * g3, 1e-12));
        assert!(close(e2, s * g1 + c * g2 + f.a * s * g3, 1e-12));
    }

    #[test]
    fn cylinder_has_zero_a() {
        let cyl = Cylinder::<f64>::new(1.0, (-2.0, 2.0));
        let f = adapted_frame(&cyl, 0.4, 0.2).unwrap();
        assert!(f.a.abs() < 1e-14);
        let d = frame_derivatives(&cyl, 0.4, 0.2).unwrap();
        assert!(d.da_f2.abs() < 1e-9 && d.da_f3.abs() < 1e-9);
    }

    #[test]
    fn cartesian_plane_derivatives() {
        // A = -2/r, f2 = -radial: dA(f2) = -2/r², dα(f3) = -dA(f2) - A² = -2/r²
        let plane = Plane::<f64>::new((-3.0, 3.0), (-3.0, 3.0));
        let d = frame_derivatives_fd(&plane, 1.0, 0.0, &FrameOptions::default()).unwrap();
        assert!(close(d.da_f2, -2.0, 1e-7), "{d:?}");
        assert!(close(d.dalpha_f3, -2.0, 1e-7), "{d:?}");
        assert!(d.dalpha_f2.abs() < 1e-7 && d.da_f3.abs() < 1e-7);
        // near an edge the stencil goes one-sided
        let d = frame_derivatives_fd(&plane, 2.9999, 1.0, &FrameOptions::default()).unwrap();
        let a = adapted_frame(&plane, 2.9999, 1.0).unwrap().a;
        assert!(d.structure_defect(a).abs() < 1e-6);
    }

    #[test]
    fn beta_examples() {
        let l = MetricParam::new(4.0).unwrap();
        assert_eq!(beta(l, 0.0), 0.0);
        assert!(close(beta(l, 2.0), std::f64::consts::FRAC_PI_4, 1e-15));
        // dβ/dA = √L/(L+A²)
        let h = 1e-6;
        let fd = (beta(l, 1.0 + h) - beta(l, 1.0 - h)) / (2.0 * h);
        assert!(close(fd, 2.0 / 5.0, 1e-9));
    }

    #[test]
    fn xl_basis_is_orthonormal() {
        let plane = Plane::<f64>::new((-3.0, 3.0), (-3.0, 3.0));
        let f = adapted_frame(&Reoriented(plane), 1.0, 0.0).unwrap();
        let l = MetricParam::new(1.0).unwrap();
        let xs = xl_basis(&f, l);
        for i in 0..3 {
            for j in 0..3 {
                let g = gl_dot(&xs[i].c, &xs[j].c, 1.0);
                assert!(close(g, if i == j { 1.0 } else { 0.0 }, 1e-12));
            }
        }
        // A = 2: X1 = f1/√5 − (2/√5) e3^L
        let r5 = 5f64.sqrt();
        assert!(close(xs[0].c[0], f.f1.c[0] / r5, 1e-15));
        assert!(close(xs[0].c[1], f.f1.c[1] / r5, 1e-15));
        assert!(close(xs[0].c[2], -2.0 / r5, 1e-15));
        // A = 0 collapses to (f1, f2, e3^L)
        let cyl = Cylinder::<f64>::new(1.0, (-1.0, 1.0));
        let f = adapted_frame(&cyl, 0.3, 0.0).unwrap();
        let l = MetricParam::new(9.0).unwrap();
        let xs = xl_basis(&f, l);
        assert!(close(xs[2].c[2], 1.0 / 3.0, 1e-15));
        assert!(close(xs[0].c[0], f.f1.c[0], 1e-15));
    }
}
