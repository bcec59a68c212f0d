//! Gauss–Bonnet in the sub-Riemannian limit, checked numerically.
//!
//! On a region `R` free of characteristic points with transverse boundary,
//! `d(A f³) = (dA(f2) + A²) f² ∧ f³ = −K^∞ dσ`, so Stokes gives
//!
//! ```text
//! ∫_R K^∞ dσ + ∮_∂R A f³ = 0,
//! ```
//!
//! and `A f³ = k_n ds`. Regions are parameter rectangles, optionally closed
//! in `u`; the boundary runs counterclockwise in the `(u, v)` plane, which is
//! the Stokes orientation because the adapted frame makes `f² ∧ f³` positive
//! on `(∂u, ∂v)`.

use rayon::prelude::*;

use crate::curvature::{k_inf, k_l, k_n, k_n_l, loglog_slope, TransverseCurveSample};
use crate::error::{GeomError, Result};
use crate::hgroup::MetricParam;
use crate::quadrature::{gauss_legendre, integrate, integrate_2d, QuadOptions, QuadResult};
use crate::scalar::Real;
use crate::surface::{adapted_frame, frame_derivatives, SurfacePatch};

/// A parameter rectangle on a patch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamRegion<T> {
    pub u: (T, T),
    pub v: (T, T),
    /// `u0 ≡ u1`: the `u = const` edges are glued and carry no boundary.
    pub closed_in_u: bool,
    /// Reverses the orientation, negating both integrals.
    pub flip: bool,
}

impl<T: Real> ParamRegion<T> {
    pub fn rect(u: (T, T), v: (T, T)) -> Self {
        Self { u, v, closed_in_u: false, flip: false }
    }

    /// `[0, 2π] × [v0, v1]` with the seam glued.
    pub fn band(v: (T, T)) -> Self {
        Self { u: (T::zero(), T::lit(2.0 * std::f64::consts::PI)), v, closed_in_u: true, flip: false }
    }

    pub fn flipped(self) -> Self {
        Self { flip: !self.flip, ..self }
    }

    fn sign(&self) -> T {
        if self.flip {
            -T::one()
        } else {
            T::one()
        }
    }
}

/// Tolerances of the Gauss–Bonnet integrals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GbOptions<T> {
    pub area_tol: T,
    pub boundary_tol: T,
    /// Minimum `|f³(γ')| / |γ'|` on the boundary.
    pub transverse_tol: T,
    /// Side of the grid scanned for characteristic points before integrating.
    pub scan: usize,
}

impl<T: Real> Default for GbOptions<T> {
    fn default() -> Self {
        Self { area_tol: T::lit(1e-9), boundary_tol: T::lit(1e-10), transverse_tol: T::lit(1e-10), scan: 16 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GbReport<T> {
    pub area_integral: T,
    pub boundary_integral: T,
    pub residual: T,
    pub area_error: T,
    pub boundary_error: T,
}

/// Fails with the first characteristic (or degenerate) point of a
/// `scan × scan` grid covering the region.
pub fn prescan<T: Real, S: SurfacePatch<T> + ?Sized>(s: &S, r: &ParamRegion<T>, scan: usize) -> Result<()> {
    let n = scan.max(2);
    let step = |range: (T, T), i: usize| range.0 + (range.1 - range.0) * T::from_usize(i).unwrap() / T::from_usize(n - 1).unwrap();
    for j in 0..n {
        for i in 0..n {
            adapted_frame(s, step(r.u, i), step(r.v, j))?;
        }
    }
    Ok(())
}

/// `∫∫ K^∞ ρ du dv` with `ρ = (f² ∧ f³)(f_u, f_v)`.
pub fn area_integral<T: Real, S: SurfacePatch<T> + ?Sized>(s: &S, r: &ParamRegion<T>, opts: &GbOptions<T>) -> Result<QuadResult<T>> {
    prescan(s, r, opts.scan)?;
    let q = integrate_2d(
        |u, v| {
            let f = adapted_frame(s, u, v)?;
            let fd = frame_derivatives(s, u, v)?;
            Ok(k_inf(&fd, f.a) * f.density)
        },
        r.u,
        r.v,
        opts.area_tol,
    )?;
    Ok(QuadResult { value: r.sign() * q.value, ..q })
}

#[derive(Clone, Copy)]
enum Edge<T> {
    /// `v` fixed, `u` running from `.1` to `.2`.
    AlongU(T, T, T),
    /// `u` fixed, `v` running from `.1` to `.2`.
    AlongV(T, T, T),
}

fn edges<T: Real>(r: &ParamRegion<T>) -> Vec<Edge<T>> {
    let (u0, u1) = r.u;
    let (v0, v1) = r.v;
    let mut out = vec![Edge::AlongU(v0, u0, u1)];
    if !r.closed_in_u {
        out.push(Edge::AlongV(u1, v0, v1));
    }
    out.push(Edge::AlongU(v1, u1, u0));
    if !r.closed_in_u {
        out.push(Edge::AlongV(u0, v1, v0));
    }
    out
}

/// `A f³(γ')` at one boundary point; `γ'` is `f_u` or `f_v`.
fn edge_integrand<T: Real, S: SurfacePatch<T> + ?Sized>(s: &S, along_u: bool, u: T, v: T, tol: T) -> Result<T> {
    let f = adapted_frame(s, u, v)?;
    let w = if along_u { f.fu } else { f.fv };
    let b = w.c[2];
    let len = (w.c[0] * w.c[0] + w.c[1] * w.c[1] + w.c[2] * w.c[2]).sqrt();
    if b.abs() < tol * len {
        return Err(GeomError::NonTransverse { b: b.as_f64() });
    }
    Ok(f.a * b)
}

/// `∮ A f³` over the counterclockwise boundary.
pub fn boundary_integral<T: Real, S: SurfacePatch<T> + ?Sized>(s: &S, r: &ParamRegion<T>, opts: &GbOptions<T>) -> Result<QuadResult<T>> {
    let es = edges(r);
    let tol = opts.boundary_tol / T::from_usize(es.len()).unwrap();
    let parts: Vec<QuadResult<T>> = es
        .par_iter()
        .map(|e| match *e {
            Edge::AlongU(v, a, b) => integrate(|u| edge_integrand(s, true, u, v, opts.transverse_tol), a, b, QuadOptions::absolute(tol)),
            Edge::AlongV(u, a, b) => integrate(|v| edge_integrand(s, false, u, v, opts.transverse_tol), a, b, QuadOptions::absolute(tol)),
        })
        .collect::<Result<_>>()?;
    let mut out = QuadResult { value: T::zero(), error: T::zero(), evaluations: 0 };
    for p in parts {
        out.value += p.value;
        out.error += p.error;
        out.evaluations += p.evaluations;
    }
    out.value *= r.sign();
    Ok(out)
}

pub fn gb_residual<T: Real, S: SurfacePatch<T> + ?Sized>(s: &S, r: &ParamRegion<T>, opts: &GbOptions<T>) -> Result<GbReport<T>> {
    let area = area_integral(s, r, opts)?;
    let boundary = boundary_integral(s, r, opts)?;
    Ok(GbReport {
        area_integral: area.value,
        boundary_integral: boundary.value,
        residual: area.value + boundary.value,
        area_error: area.error,
        boundary_error: boundary.error,
    })
}

/// Both sides of `∮ A f³ = ∫∫ (dA(f2) + A²) ρ` on `[u, u+h] × [v, v+h]`,
/// each by the midpoint rule; they agree to `O(h⁴)`.
pub fn stokes_density_check<T: Real, S: SurfacePatch<T> + ?Sized>(s: &S, u: T, v: T, h: T) -> Result<(T, T)> {
    let half = T::half() * h;
    let g = |uu: T, vv: T, along_u: bool| -> Result<T> {
        let f = adapted_frame(s, uu, vv)?;
        let w = if along_u { f.fu } else { f.fv };
        Ok(f.a * w.c[2])
    };
    let lhs = h * (g(u + half, v, true)? + g(u + h, v + half, false)? - g(u + half, v + h, true)? - g(u, v + half, false)?);
    let (um, vm) = (u + half, v + half);
    let f = adapted_frame(s, um, vm)?;
    let fd = frame_derivatives(s, um, vm)?;
    let rhs = h * h * (fd.da_f2 + f.a * f.a) * f.density;
    Ok((lhs, rhs))
}

/// One `L` of a convergence study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow<T> {
    pub l: T,
    pub k_l: T,
    pub k_l_gap: T,
    /// `√(L+A²)`, the `dσ_L` density on `f² ∧ f³`.
    pub sigma_l: T,
    /// `K^L √(L+A²)`, whose limit does not exist.
    pub unrescaled: T,
    /// `(1/√L) K^L √(L+A²)`.
    pub rescaled: T,
    pub rescaled_gap: T,
    /// Normal curvature of the probe curve, at `g_L` unit speed.
    pub k_n_l: T,
    pub k_n_gap: T,
    /// `∫(1/√L)K^L dσ_L + ∮(1/√L)k_n^L ds_L` on the study region, if any.
    pub finite_l_sum: Option<T>,
}

/// Columns below this are treated as identically zero.
const NOISE_FLOOR: f64 = 1e-8;

/// Fitted log-log slopes; `None` when a column vanishes identically.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ConvergenceSlopes<T> {
    pub k_l_gap: Option<T>,
    pub rescaled_gap: Option<T>,
    pub k_n_gap: Option<T>,
    pub sigma_l: Option<T>,
    pub unrescaled: Option<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTable<T> {
    pub point: (T, T),
    pub big_a: T,
    pub k_inf: T,
    pub k_n: T,
    pub rows: Vec<ConvergenceRow<T>>,
    pub slopes: ConvergenceSlopes<T>,
}

fn slope_of<T: Real>(ls: &[T], ys: &[T]) -> Option<T> {
    if ys.iter().all(|y| y.abs() <= T::lit(NOISE_FLOOR)) {
        return None;
    }
    Some(loglog_slope(ls, ys))
}

/// Probe curve through `(u, v)` with parameter direction `dir`.
fn probe<T: Real, S: SurfacePatch<T> + ?Sized>(s: &S, (u, v): (T, T), dir: (T, T)) -> Result<TransverseCurveSample<T>> {
    let (eu, ev) = s.domain().extent();
    let h = T::lit(1e-3) * eu.abs().max(ev.abs()) / (dir.0.abs() + dir.1.abs());
    TransverseCurveSample::from_patch_curve(s, move |t| (u + t * dir.0, v + t * dir.1), T::zero(), h)
}

/// Finite-`L` analogue of the Gauss–Bonnet sum with the rescaled forms.
pub fn finite_l_sum<T: Real, S: SurfacePatch<T> + ?Sized>(s: &S, r: &ParamRegion<T>, l: MetricParam<T>, tol: T) -> Result<T> {
    let rl = l.sqrt();
    let area = integrate_2d(
        |u, v| {
            let f = adapted_frame(s, u, v)?;
            let fd = frame_derivatives(s, u, v)?;
            Ok(k_l(&fd, f.a, l) * (l.value() + f.a * f.a).sqrt() / rl * f.density)
        },
        r.u,
        r.v,
        tol,
    )?
    .value;
    let mut boundary = T::zero();
    for e in edges(r) {
        let (along_u, fixed, a, b) = match e {
            Edge::AlongU(v, a, b) => (true, v, a, b),
            Edge::AlongV(u, a, b) => (false, u, a, b),
        };
        let dir = if b > a { T::one() } else { -T::one() };
        let q = integrate(
            |t| {
                let at = if along_u { (t, fixed) } else { (fixed, t) };
                let d = if along_u { (dir, T::zero()) } else { (T::zero(), dir) };
                let c = probe(s, at, d)?;
                let speed = c.speed_sq(l).sqrt();
                Ok(k_n_l(&c.unit_speed(l), l)? * speed / rl)
            },
            a.min(b),
            a.max(b),
            QuadOptions::absolute(tol),
        )?;
        boundary += q.value;
    }
    Ok(r.sign() * (area + boundary))
}

/// Sweeps `L` at one point, with a probe curve in parameter direction `dir`
/// for the normal curvature and, optionally, a region for the finite-`L` sum.
pub fn convergence_study<T: Real, S: SurfacePatch<T> + ?Sized>(
    s: &S,
    point: (T, T),
    dir: (T, T),
    ls: &[MetricParam<T>],
    region: Option<&ParamRegion<T>>,
) -> Result<ConvergenceTable<T>> {
    if ls.windows(2).any(|w| w[1].value() <= w[0].value()) {
        return Err(GeomError::InvalidParameter("L list must be strictly ascending".into()));
    }
    let f = adapted_frame(s, point.0, point.1)?;
    let fd = frame_derivatives(s, point.0, point.1)?;
    let a = f.a;
    let kinf = k_inf(&fd, a);
    let c = probe(s, point, dir)?;
    let kn = k_n(c.big_a, c.b)?;
    let rows: Vec<ConvergenceRow<T>> = ls
        .par_iter()
        .map(|&l| -> Result<ConvergenceRow<T>> {
            let kl = k_l(&fd, a, l);
            let sigma = (l.value() + a * a).sqrt();
            let rescaled = kl * sigma / l.sqrt();
            let knl = k_n_l(&c.unit_speed(l), l)?;
            let finite_l_sum = match region {
                Some(r) => Some(finite_l_sum(s, r, l, T::lit(1e-9))?),
                None => None,
            };
            Ok(ConvergenceRow {
                l: l.value(),
                k_l: kl,
                k_l_gap: (kl - kinf).abs(),
                sigma_l: sigma,
                unrescaled: kl * sigma,
                rescaled,
                rescaled_gap: (rescaled - kinf).abs(),
                k_n_l: knl,
                k_n_gap: (knl - kn).abs(),
                finite_l_sum,
            })
        })
        .collect::<Result<_>>()?;
    let lv: Vec<T> = rows.iter().map(|r| r.l).collect();
    let col = |g: fn(&ConvergenceRow<T>) -> T| rows.iter().map(g).collect::<Vec<T>>();
    let slopes = ConvergenceSlopes {
        k_l_gap: slope_of(&lv, &col(|r| r.k_l_gap)),
        rescaled_gap: slope_of(&lv, &col(|r| r.rescaled_gap)),
        k_n_gap: slope_of(&lv, &col(|r| r.k_n_gap)),
        sigma_l: slope_of(&lv, &col(|r| r.sigma_l)),
        unrescaled: slope_of(&lv, &col(|r| r.unrescaled)),
    };
    Ok(ConvergenceTable { point, big_a: a, k_inf: kinf, k_n: kn, rows, slopes })
}

/// `∫_a^b g` by the `n`-point Gauss rule on `m` equal pieces.
pub fn composite_gauss<T: Real, F>(mut g: F, a: T, b: T, m: usize, n: usize) -> Result<T>
where
    F: FnMut(T) -> Result<T>,
{
    let w = (b - a) / T::from_usize(m).unwrap();
    let mut sum = T::zero();
    for k in 0..m {
        let x0 = a + w * T::from_usize(k).unwrap();
        sum += gauss_legendre(&mut g, x0, x0 + w, n)?;
    }
    Ok(sum)
}
