//! Rotation-invariant surfaces and the constant `K^∞` families.
//!
//! A horizontal curve `(a(v), b(v), c(v))` with `c' = (ab' − ba')/2`, rotated
//! about the `z` axis, sweeps the surface
//!
//! ```text
//! f(u, v) = (a cos u − b sin u, b cos u + a sin u, c).
//! ```
//!
//! In polar form `a = r cos θ`, `b = r sin θ` with unit speed one has
//! `θ' = √(1 − r'²)/r`, `c' = r √(1 − r'²)/2` and `A = (ln r²)'`. Requiring
//! `K^∞ = −A' − A²` constant leaves three families (integration constant
//! `c₁ = 0`):
//!
//! ```text
//! K > 0:  r = r0 √cos(√K v),     A = −√K tan(√K v)
//! K = 0:  r = r0 √v,             A = 1/v
//! K < 0:  r = r0 √cosh(√−K v),   A = √−K tanh(√−K v)
//! ```
//!
//! each defined only where `r'² ≤ 1`.

use rayon::prelude::*;

use crate::error::{GeomError, Result};
use crate::expr::{eval_dual_seeded, Bindings, Expr, Var};
use crate::hgroup::{coframe_eval, Coform, Point};
use crate::quadrature::{integrate, QuadOptions};
use crate::scalar::Real;
use crate::surface::{FrameDerivatives, ParamRect, PatchJet, SurfacePatch};

/// Distance from a bound below which quadrature switches to `t = B ± w²`.
const NEAR_BOUND: f64 = 1e-4;
/// Overshoot of `1 − r'²` below zero that is still treated as zero.
const CLAMP: f64 = 1e-12;
/// Tolerance of the anchor-to-point quadrature.
pub const QUAD_TOL: f64 = 1e-10;

/// Open interval; either end may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval<T> {
    pub lo: T,
    pub hi: T,
}

impl<T: Real> Interval<T> {
    pub fn contains(&self, v: T) -> bool {
        v > self.lo && v < self.hi
    }

    /// Closed-interval membership.
    pub fn contains_closed(&self, v: T) -> bool {
        v >= self.lo && v <= self.hi
    }
}

fn domain_err<T: Real>(what: &'static str, v: T, d: Interval<T>) -> GeomError {
    GeomError::DomainViolation { what, value: v.as_f64(), lo: d.lo.as_f64(), hi: d.hi.as_f64() }
}

/// Existence interval of the family `(K, r0)`, where `r'² ≤ 1`.
pub fn domain_bound<T: Real>(k: T, r0: T) -> Result<Interval<T>> {
    if !(r0 > T::zero() && r0.is_finite() && k.is_finite()) {
        return Err(GeomError::InvalidParameter(format!("need r0 > 0 and finite K, got K = {k}, r0 = {r0}")));
    }
    let (two, four) = (T::two(), T::lit(4.0));
    let r0sq = r0 * r0;
    if k == T::zero() {
        return Ok(Interval { lo: r0sq / four, hi: T::infinity() });
    }
    let p = two / (r0sq * k.abs());
    let q = (p * p + T::one()).sqrt();
    let vmax = if k > T::zero() { (q - p).acos() / k.sqrt() } else { (p + q).acosh() / (-k).sqrt() };
    Ok(Interval { lo: -vmax, hi: vmax })
}

/// `r(v)` of the family.
pub fn r_family<T: Real>(k: T, r0: T, v: T) -> Result<T> {
    let d = domain_bound(k, r0)?;
    if !d.contains_closed(v) {
        return Err(domain_err("v", v, d));
    }
    Ok(r_unchecked(k, r0, v))
}

fn r_unchecked<T: Real>(k: T, r0: T, v: T) -> T {
    if k > T::zero() {
        r0 * (k.sqrt() * v).cos().sqrt()
    } else if k < T::zero() {
        r0 * ((-k).sqrt() * v).cosh().sqrt()
    } else {
        r0 * v.sqrt()
    }
}

/// `A(v) = (ln r²)'` of the family; fails only at the intrinsic poles.
pub fn a_family<T: Real>(k: T, v: T) -> Result<T> {
    let a = a_unchecked(k, v);
    let pole = k > T::zero() && (k.sqrt() * v).abs() >= T::FRAC_PI_2();
    if a.is_finite() && !pole && !(k == T::zero() && v <= T::zero()) {
        Ok(a)
    } else {
        let half_pi = T::FRAC_PI_2();
        let d =
            if k > T::zero() { Interval { lo: -half_pi / k.sqrt(), hi: half_pi / k.sqrt() } } else { Interval { lo: T::zero(), hi: T::infinity() } };
        Err(domain_err("v", v, d))
    }
}

fn a_unchecked<T: Real>(k: T, v: T) -> T {
    if k > T::zero() {
        -k.sqrt() * (k.sqrt() * v).tan()
    } else if k < T::zero() {
        (-k).sqrt() * ((-k).sqrt() * v).tanh()
    } else {
        v.recip()
    }
}

/// One constant-`K^∞` family, optionally translated in `v`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Family<T> {
    pub k_inf: T,
    pub r0: T,
    /// The profile is `r(v + shift)`.
    pub shift: T,
}

/// Radial data of a family at one `v`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialJet<T> {
    pub r: T,
    pub dr: T,
    pub d2r: T,
    pub big_a: T,
    /// `√(1 − r'²)`, after clamping.
    pub root: T,
}

impl<T: Real> Family<T> {
    pub fn new(k_inf: T, r0: T) -> Result<Self> {
        domain_bound(k_inf, r0)?;
        Ok(Self { k_inf, r0, shift: T::zero() })
    }

    pub fn with_shift(self, shift: T) -> Self {
        Self { shift, ..self }
    }

    pub fn domain(&self) -> Interval<T> {
        let d = domain_bound(self.k_inf, self.r0).expect("validated in new");
        Interval { lo: d.lo - self.shift, hi: d.hi - self.shift }
    }

    /// Starting point of the `θ` and `c` integrals.
    pub fn anchor(&self) -> T {
        if self.k_inf == T::zero() {
            self.r0 * self.r0 / T::lit(4.0) * (T::one() + T::lit(1e-9)) - self.shift
        } else {
            -self.shift
        }
    }

    pub fn radial(&self, v: T) -> Result<RadialJet<T>> {
        let d = self.domain();
        if !d.contains_closed(v) {
            return Err(domain_err("v", v, d));
        }
        let w = v + self.shift;
        let r = r_unchecked(self.k_inf, self.r0, w);
        let big_a = a_unchecked(self.k_inf, w);
        let dr = T::half() * r * big_a;
        let da = -self.k_inf - big_a * big_a;
        let d2r = T::half() * (dr * big_a + r * da);
        let mut one_minus = T::one() - dr * dr;
        if one_minus < T::zero() {
            if one_minus >= -T::lit(CLAMP) {
                one_minus = T::zero();
            } else {
                return Err(domain_err("v", v, d));
            }
        }
        Ok(RadialJet { r, dr, d2r, big_a, root: one_minus.sqrt() })
    }

    /// `(θ', c')` at `v`.
    pub fn integrands(&self, v: T) -> Result<(T, T)> {
        let j = self.radial(v)?;
        Ok((j.root / j.r, T::half() * j.r * j.root))
    }

    /// `(∫θ', ∫c')` from `from` to `to`, with a square-root substitution when
    /// the path comes near a finite end of the domain.
    pub fn integrate_path(&self, from: T, to: T, tol: T) -> Result<(T, T)> {
        let d = self.domain();
        for x in [from, to] {
            if !d.contains_closed(x) {
                return Err(domain_err("v", x, d));
            }
        }
        let near = T::lit(NEAR_BOUND);
        let (lo, hi) = (from.min(to), from.max(to));
        let near_hi = d.hi.is_finite() && d.hi - hi < near;
        let near_lo = d.lo.is_finite() && lo - d.lo < near;
        if near_hi && near_lo {
            let mid = T::half() * (d.lo + d.hi);
            let (a1, b1) = self.integrate_path(from, mid, T::half() * tol)?;
            let (a2, b2) = self.integrate_path(mid, to, T::half() * tol)?;
            return Ok((a1 + a2, b1 + b2));
        }
        let opts = QuadOptions::absolute(T::half() * tol);
        let run = |pick: usize| -> Result<T> {
            let value = if near_hi {
                // t = hi − w², dt = −2w dw
                let (w0, w1) = ((d.hi - from).max(T::zero()).sqrt(), (d.hi - to).max(T::zero()).sqrt());
                integrate(|w| Ok(-T::two() * w * pick_of(self.integrands(d.hi - w * w)?, pick)), w0, w1, opts)?
            } else if near_lo {
                let (w0, w1) = ((from - d.lo).max(T::zero()).sqrt(), (to - d.lo).max(T::zero()).sqrt());
                integrate(|w| Ok(T::two() * w * pick_of(self.integrands(d.lo + w * w)?, pick)), w0, w1, opts)?
            } else {
                integrate(|t| Ok(pick_of(self.integrands(t)?, pick)), from, to, opts)?
            };
            Ok(value.value)
        };
        Ok((run(0)?, run(1)?))
    }

    /// `(θ(v), c(v))` measured from the anchor.
    pub fn theta_c(&self, v: T) -> Result<(T, T)> {
        self.integrate_path(self.anchor(), v, T::lit(QUAD_TOL))
    }
}

fn pick_of<T>(p: (T, T), i: usize) -> T {
    if i == 0 {
        p.0
    } else {
        p.1
    }
}

/// `θ(v)` and `c(v)` of the family `(K, r0)` by adaptive quadrature from the anchor.
pub fn theta_c_quadrature<T: Real>(k: T, r0: T, v: T) -> Result<(T, T)> {
    Family::new(k, r0)?.theta_c(v)
}

/// Height `c(t) = ½∫₀ᵗ (a b' − b a') ds` of the horizontal lift of the plane
/// curve `(a(s), b(s))`.
pub fn horizontal_lift<T: Real>(a: &Expr, b: &Expr, t: T) -> Result<T> {
    let integrand = |s: T| -> Result<T> {
        let bind = Bindings::t(s);
        let da = eval_dual_seeded(a, &bind, Var::T, None)?;
        let db = eval_dual_seeded(b, &bind, Var::T, None)?;
        Ok(T::half() * (da.value * db.d_u - db.value * da.d_u))
    };
    Ok(integrate(integrand, T::zero(), t, QuadOptions::absolute(T::lit(QUAD_TOL)))?.value)
}

/// A horizontal plane curve with its height, up to second derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ProfileJet<T> {
    pub a: T,
    pub b: T,
    pub c: T,
    pub da: T,
    pub db: T,
    pub dc: T,
    pub d2a: T,
    pub d2b: T,
}

/// Generating curve of a rotation surface.
pub trait Profile<T: Real>: Send + Sync {
    fn v_range(&self) -> (T, T);
    fn eval(&self, v: T) -> Result<ProfileJet<T>>;
}

/// The ray `(v, 0, 0)`; it sweeps the plane `z = 0` in polar coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarPlane<T> {
    pub radii: (T, T),
}

impl<T: Real> Profile<T> for PolarPlane<T> {
    fn v_range(&self) -> (T, T) {
        self.radii
    }

    fn eval(&self, v: T) -> Result<ProfileJet<T>> {
        Ok(ProfileJet { a: v, da: T::one(), ..Default::default() })
    }
}

/// A constant-`K^∞` generating curve with `θ`, `c` tabulated on knots and
/// filled in between by short quadratures.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilyProfile<T> {
    pub family: Family<T>,
    v_range: (T, T),
    /// `(v, θ, c)`, ascending in `v`.
    knots: Vec<(T, T, T)>,
}

impl<T: Real> FamilyProfile<T> {
    /// Tabulates `θ`, `c` at `n_knots ≥ 2` equally spaced points of `v_range`.
    pub fn new(family: Family<T>, v_range: (T, T), n_knots: usize) -> Result<Self> {
        let d = family.domain();
        if v_range.0.partial_cmp(&v_range.1) != Some(std::cmp::Ordering::Less) || !d.contains_closed(v_range.0) || !d.contains_closed(v_range.1) {
            return Err(domain_err("v_range", if d.contains_closed(v_range.0) { v_range.1 } else { v_range.0 }, d));
        }
        let n = n_knots.max(2);
        let vs: Vec<T> = (0..n).map(|j| lerp(v_range, j, n)).collect();
        let (th0, c0) = family.theta_c(vs[0])?;
        let seg_tol = T::lit(1e-13);
        let segs: Vec<(T, T)> = vs.par_windows(2).map(|w| family.integrate_path(w[0], w[1], seg_tol)).collect::<Result<_>>()?;
        let mut knots = Vec::with_capacity(n);
        let (mut th, mut c) = (th0, c0);
        knots.push((vs[0], th, c));
        for (v, (dth, dc)) in vs[1..].iter().zip(segs) {
            th += dth;
            c += dc;
            knots.push((*v, th, c));
        }
        Ok(Self { family, v_range, knots })
    }

    pub fn knots(&self) -> &[(T, T, T)] {
        &self.knots
    }

    /// `(θ(v), c(v))`.
    pub fn theta_c(&self, v: T) -> Result<(T, T)> {
        let idx = self.knots.partition_point(|k| k.0 < v);
        let nearest = match idx {
            0 => 0,
            i if i >= self.knots.len() => self.knots.len() - 1,
            i => {
                if (self.knots[i].0 - v).abs() < (v - self.knots[i - 1].0).abs() {
                    i
                } else {
                    i - 1
                }
            }
        };
        let (kv, th, c) = self.knots[nearest];
        if kv == v {
            return Ok((th, c));
        }
        let (dth, dc) = self.family.integrate_path(kv, v, T::lit(1e-13))?;
        Ok((th + dth, c + dc))
    }

    pub fn sample(&self, v: T) -> Result<GeneratingCurveSample<T>> {
        let j = self.family.radial(v)?;
        let (theta, c) = self.theta_c(v)?;
        Ok(GeneratingCurveSample { t: v, r: j.r, dr_dt: j.dr, theta, c, big_a: j.big_a })
    }
}

impl<T: Real> Profile<T> for FamilyProfile<T> {
    fn v_range(&self) -> (T, T) {
        self.v_range
    }

    fn eval(&self, v: T) -> Result<ProfileJet<T>> {
        let j = self.family.radial(v)?;
        let (theta, c) = self.theta_c(v)?;
        let (s, co) = theta.sin_cos();
        let dth = j.root / j.r;
        // θ'' = (√(1−r'²))'/r − √(1−r'²) r'/r², (√(1−r'²))' = −r'r''/√(1−r'²)
        let d_root = if j.root > T::zero() { -j.dr * j.d2r / j.root } else { T::nan() };
        let d2th = d_root / j.r - j.root * j.dr / (j.r * j.r);
        let two = T::two();
        Ok(ProfileJet {
            a: j.r * co,
            b: j.r * s,
            c,
            da: j.dr * co - j.r * dth * s,
            db: j.dr * s + j.r * dth * co,
            dc: T::half() * j.r * j.root,
            d2a: j.d2r * co - two * j.dr * dth * s - j.r * d2th * s - j.r * dth * dth * co,
            d2b: j.d2r * s + two * j.dr * dth * co + j.r * d2th * co - j.r * dth * dth * s,
        })
    }
}

fn lerp<T: Real>(range: (T, T), j: usize, n: usize) -> T {
    if j + 1 == n {
        return range.1;
    }
    let f = T::from_usize(j).unwrap() / T::from_usize(n - 1).unwrap();
    range.0 + (range.1 - range.0) * f
}

/// Rotation by `u` about the `z` axis, an isometry of H¹.
pub fn rotate<T: Real>(p: [T; 3], u: T) -> [T; 3] {
    let (s, c) = u.sin_cos();
    [p[0] * c - p[1] * s, p[1] * c + p[0] * s, p[2]]
}

/// The surface swept by a profile; `u ∈ [0, 2π]` is the rotation angle.
#[derive(Debug, Clone)]
pub struct RotationSurface<P> {
    pub profile: P,
}

impl<P> RotationSurface<P> {
    pub fn new(profile: P) -> Self {
        Self { profile }
    }
}

impl<T: Real, P: Profile<T>> SurfacePatch<T> for RotationSurface<P> {
    fn domain(&self) -> ParamRect<T> {
        ParamRect::periodic(self.profile.v_range())
    }

    fn jet(&self, u: T, v: T) -> Result<PatchJet<T>> {
        let p = self.profile.eval(v)?;
        let (s, c) = u.sin_cos();
        let q = rotate([p.a, p.b, p.c], u);
        Ok(PatchJet {
            point: Point::new(q[0], q[1], q[2]),
            du: [-p.a * s - p.b * c, -p.b * s + p.a * c, T::zero()],
            dv: [p.da * c - p.db * s, p.db * c + p.da * s, p.dc],
        })
    }

    /// With `w = ab' − ba'`, `s = |(a', b')|`, `f2 = f_v/s` and
    /// `f3 = (2/r²)((w/s²) f_v − f_u)`; `A` depends on `v` only and
    /// `dα = du + ((a'b'' − b'a'')/s²) dv`.
    fn closed_form_derivatives(&self, _u: T, v: T) -> Option<Result<FrameDerivatives<T>>> {
        Some(self.profile.eval(v).map(|p| rotation_derivatives(&p)))
    }
}

/// `A` of a rotation surface from its profile.
pub fn rotation_a<T: Real>(p: &ProfileJet<T>) -> T {
    let r2 = p.a * p.a + p.b * p.b;
    let sp = (p.da * p.da + p.db * p.db).sqrt();
    T::two() * (p.a * p.da + p.b * p.db) / (sp * r2)
}

fn rotation_derivatives<T: Real>(p: &ProfileJet<T>) -> FrameDerivatives<T> {
    let two = T::two();
    let r2 = p.a * p.a + p.b * p.b;
    let sp2 = p.da * p.da + p.db * p.db;
    let sp = sp2.sqrt();
    let w = p.a * p.db - p.b * p.da;
    let n = p.a * p.da + p.b * p.db;
    let dn = sp2 + p.a * p.d2a + p.b * p.d2b;
    let dsp = (p.da * p.d2a + p.db * p.d2b) / sp;
    // A = 2n/(s r²), (r²)' = 2n
    let da = two * (dn / (sp * r2) - n * dsp / (sp2 * r2) - two * n * n / (sp * r2 * r2));
    let phi = (p.da * p.d2b - p.db * p.d2a) / sp2;
    let (su, sv) = (-two / r2, two / r2 * w / sp2);
    FrameDerivatives { da_f2: da / sp, da_f3: sv * da, dalpha_f2: phi / sp, dalpha_f3: su + sv * phi }
}

/// One point of a unit-speed generating curve in polar form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratingCurveSample<T> {
    pub t: T,
    pub r: T,
    pub dr_dt: T,
    pub theta: T,
    pub c: T,
    pub big_a: T,
}

/// Parameters of a constant-`K^∞` rotation surface and its mesh.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationSurfaceSpec<T> {
    pub k_inf: T,
    pub r0: T,
    pub c1_shift: T,
    pub v_range: (T, T),
    pub samples_u: usize,
    pub samples_v: usize,
    /// Number of rotated copies of the generating curve, the curve itself included.
    pub n_curves: usize,
}

impl<T: Real> RotationSurfaceSpec<T> {
    /// `(K, r0)` with a `v` range covering 99% of the existence domain
    /// (for `K = 0`, from just above the bound to `16 r0²/4`).
    pub fn new(k_inf: T, r0: T) -> Result<Self> {
        let d = domain_bound(k_inf, r0)?;
        let v_range =
            if k_inf == T::zero() { (d.lo * (T::one() + T::lit(1e-6)), d.lo * T::lit(16.0)) } else { (d.lo * T::lit(0.99), d.hi * T::lit(0.99)) };
        Ok(Self { k_inf, r0, c1_shift: T::zero(), v_range, samples_u: 128, samples_v: 128, n_curves: 8 })
    }

    /// The surfaces drawn in the three figures: `(K, r0) = (1, 1), (0, 1), (−1, 1)`.
    pub fn figure(n: u8) -> Result<Self> {
        match n {
            1 => Self::new(T::one(), T::one()),
            2 => Self::new(T::zero(), T::one()),
            3 => Self::new(-T::one(), T::one()),
            _ => Err(GeomError::InvalidParameter(format!("figure must be 1, 2 or 3, got {n}"))),
        }
    }

    pub fn family(&self) -> Result<Family<T>> {
        Ok(Family::new(self.k_inf, self.r0)?.with_shift(self.c1_shift))
    }

    pub fn validate(&self) -> Result<()> {
        let fam = self.family()?;
        let d = fam.domain();
        let (v0, v1) = self.v_range;
        if v0.partial_cmp(&v1) != Some(std::cmp::Ordering::Less) {
            return Err(GeomError::InvalidParameter(format!("empty v range ({v0}, {v1})")));
        }
        for v in [v0, v1] {
            if !d.contains(v) {
                return Err(domain_err("v", v, d));
            }
        }
        if self.k_inf == T::zero() && v0 < fam.anchor() {
            return Err(domain_err("v", v0, Interval { lo: fam.anchor(), hi: d.hi }));
        }
        if self.samples_u < 3 || self.samples_v < 2 {
            return Err(GeomError::InvalidParameter("mesh needs samples_u ≥ 3 and samples_v ≥ 2".into()));
        }
        Ok(())
    }

    pub fn profile(&self) -> Result<FamilyProfile<T>> {
        self.validate()?;
        FamilyProfile::new(self.family()?, self.v_range, self.samples_v)
    }
}

/// A rotated copy of the generating curve.
#[derive(Debug, Clone, PartialEq)]
pub struct Polyline<T> {
    pub angle: T,
    pub v: Vec<T>,
    pub points: Vec<[T; 3]>,
}

/// Vertex grid of a rotation surface, row-major in `v` (`vertices[j·nu + i]`
/// sits at `(u_i, v_j)`), closed in `u`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh<T> {
    pub nu: usize,
    pub nv: usize,
    pub params: Vec<(T, T)>,
    pub vertices: Vec<[T; 3]>,
    pub triangles: Vec<[usize; 3]>,
    pub polylines: Vec<Polyline<T>>,
    pub profile: Vec<GeneratingCurveSample<T>>,
}

impl<T: Real> Mesh<T> {
    /// Largest deviation of a vertex from the rotation of its `u = 0` column.
    pub fn rotation_defect(&self) -> T {
        let mut worst = T::zero();
        for j in 0..self.nv {
            let base = self.vertices[j * self.nu];
            for i in 0..self.nu {
                let (u, _) = self.params[j * self.nu + i];
                let want = rotate(base, u);
                let got = self.vertices[j * self.nu + i];
                for k in 0..3 {
                    worst = worst.max((want[k] - got[k]).abs());
                }
            }
        }
        worst
    }
}

type MeshRowEntry<T> = ((T, T), [T; 3]);

pub fn build_mesh<T: Real>(spec: &RotationSurfaceSpec<T>) -> Result<Mesh<T>> {
    let profile = spec.profile()?;
    let (nu, nv) = (spec.samples_u, spec.samples_v);
    let two_pi = T::lit(2.0 * std::f64::consts::PI);
    let us: Vec<T> = (0..nu).map(|i| two_pi * T::from_usize(i).unwrap() / T::from_usize(nu).unwrap()).collect();
    let samples: Vec<GeneratingCurveSample<T>> = profile
        .knots()
        .iter()
        .map(|&(v, theta, c)| -> Result<_> {
            let j = profile.family.radial(v)?;
            Ok(GeneratingCurveSample { t: v, r: j.r, dr_dt: j.dr, theta, c, big_a: j.big_a })
        })
        .collect::<Result<_>>()?;
    let curve = |s: &GeneratingCurveSample<T>| {
        let (sn, cs) = s.theta.sin_cos();
        [s.r * cs, s.r * sn, s.c]
    };
    let rows: Vec<Vec<MeshRowEntry<T>>> = samples
        .par_iter()
        .map(|s| {
            let g = curve(s);
            us.iter().map(|&u| ((u, s.t), rotate(g, u))).collect()
        })
        .collect();
    let (params, vertices): (Vec<_>, Vec<_>) = rows.into_iter().flatten().unzip();
    let mut triangles = Vec::with_capacity(2 * nu * (nv - 1));
    for j in 0..nv - 1 {
        for i in 0..nu {
            let (a, b) = (j * nu + i, j * nu + (i + 1) % nu);
            let (c, d) = (a + nu, b + nu);
            triangles.push([a, b, d]);
            triangles.push([a, d, c]);
        }
    }
    let polylines = (0..spec.n_curves)
        .map(|k| {
            let angle = two_pi * T::from_usize(k).unwrap() / T::from_usize(spec.n_curves).unwrap();
            Polyline { angle, v: samples.iter().map(|s| s.t).collect(), points: samples.iter().map(|s| rotate(curve(s), angle)).collect() }
        })
        .collect();
    Ok(Mesh { nu, nv, params, vertices, triangles, polylines, profile: samples })
}

/// Largest `|e³(γ')| / |γ'|` over the segment midpoints of a polyline, with
/// `γ'` the central difference (step `h`) of the rotated profile.
pub fn horizontality_defect<T: Real, P: Profile<T>>(profile: &P, poly: &Polyline<T>, h: T) -> Result<T> {
    let point = |v: T| -> Result<[T; 3]> {
        let p = profile.eval(v)?;
        Ok(rotate([p.a, p.b, p.c], poly.angle))
    };
    let mut worst = T::zero();
    for w in poly.v.windows(2) {
        let m = T::half() * (w[0] + w[1]);
        let (p1, p0, pm) = (point(m + h)?, point(m - h)?, point(m)?);
        let tangent = [0, 1, 2].map(|k| (p1[k] - p0[k]) / (T::two() * h));
        let e3 = coframe_eval(Coform::E3, &Point::new(pm[0], pm[1], pm[2]), tangent);
        let len = (tangent[0] * tangent[0] + tangent[1] * tangent[1] + tangent[2] * tangent[2]).sqrt();
        worst = worst.max(e3.abs() / len);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvature::k_inf;
    use crate::expr::parse;
    use crate::surface::{adapted_frame, frame_derivatives_fd, FrameOptions};

    fn fams() -> [Family<f64>; 3] {
        [Family::new(1.0, 1.0).unwrap(), Family::new(0.0, 1.0).unwrap(), Family::new(-1.0, 1.0).unwrap()]
    }

    #[test]
    fn family_values() {
        assert_eq!(r_family(1.0, 1.0, 0.0).unwrap(), 1.0);
        assert_eq!(r_family(0.0, 1.0, 4.0).unwrap(), 2.0);
        assert_eq!(r_family(-1.0, 1.0, 0.0).unwrap(), 1.0);
        assert_eq!(a_family(1.0, 0.0).unwrap(), 0.0);
        assert!(matches!(r_family(1.0, 1.0, 1.4), Err(GeomError::DomainViolation { .. })));
        assert!(matches!(r_family(0.0, 1.0, 0.2), Err(GeomError::DomainViolation { .. })));
        assert!(a_family(0.0, 0.0).is_err());
        assert!(a_family(1.0, std::f64::consts::FRAC_PI_2).is_err());
    }

    /// Largest `v` with `r'(v)² ≤ 1`, by bisection on the closed-form `r`.
    fn bisect_bound(k: f64, r0: f64, lo: f64, hi: f64) -> f64 {
        let h = 1e-6;
        let excess = |v: f64| {
            let d = (r_unchecked(k, r0, v + h) - r_unchecked(k, r0, v - h)) / (2.0 * h);
            d * d - 1.0
        };
        let (mut a, mut b) = (lo, hi);
        let inside = excess(a) < 0.0;
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if (excess(m) < 0.0) == inside {
                a = m;
            } else {
                b = m;
            }
        }
        0.5 * (a + b)
    }

    #[test]
    fn domain_bounds_match_bisection() {
        let d = domain_bound(1.0, 1.0).unwrap();
        assert!((d.hi - (5f64.sqrt() - 2.0).acos()).abs() < 1e-15);
        assert!((d.hi - 1.3324789).abs() < 1e-6);
        assert!((d.hi - bisect_bound(1.0, 1.0, 0.1, 1.5)).abs() < 1e-9);
        let d = domain_bound(-1.0, 1.0).unwrap();
        assert!((d.hi - (2.0 + 5f64.sqrt()).acosh()).abs() < 1e-15);
        assert!((d.hi - 2.12255).abs() < 1e-5);
        assert!((d.hi - bisect_bound(-1.0, 1.0, 0.1, 3.0)).abs() < 1e-9);
        assert_eq!(domain_bound(0.0, 1.0).unwrap().lo, 0.25);
        assert!((0.25 - bisect_bound(0.0, 1.0, 0.3, 0.1)).abs() < 1e-9);
        for (k, r0) in [(2.0, 0.7), (-0.3, 1.8)] {
            let d = domain_bound(k, r0).unwrap();
            assert!((d.hi - bisect_bound(k, r0, 1e-3, d.hi * 1.5)).abs() < 1e-9);
            // r'² → 1 at the bound
            let j = Family::new(k, r0).unwrap().radial(d.hi - 1e-8).unwrap();
            assert!((j.dr * j.dr - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn a_is_log_derivative_and_curvature_is_constant() {
        let h = 1e-4;
        for f in fams() {
            let d = f.domain();
            let (lo, hi) = if d.hi.is_finite() { (0.9 * d.lo, 0.9 * d.hi) } else { (d.lo * 1.1, 5.0) };
            for i in 0..9 {
                let v = lo + (hi - lo) * i as f64 / 8.0;
                let ln_r2 = |x: f64| 2.0 * r_unchecked(f.k_inf, f.r0, x).ln();
                let d4 = |f: &dyn Fn(f64) -> f64| (-f(v + 2.0 * h) + 8.0 * f(v + h) - 8.0 * f(v - h) + f(v - 2.0 * h)) / (12.0 * h);
                let dlog = d4(&ln_r2);
                let a = a_family(f.k_inf, v).unwrap();
                assert!((a - dlog).abs() < 1e-8);
                let da = d4(&|x| a_unchecked(f.k_inf, x));
                assert!((-da - a * a - f.k_inf).abs() < 1e-8);
                // the consistent form of the profile ODE
                let d2 = (ln_r2(v + h) - 2.0 * ln_r2(v) + ln_r2(v - h)) / (h * h);
                assert!((f.k_inf + d2 + dlog * dlog).abs() < 1e-5);
                let j = f.radial(v).unwrap();
                let d2_exact = 2.0 * (j.d2r / j.r - j.dr * j.dr / (j.r * j.r));
                assert!((f.k_inf + d2_exact + j.big_a * j.big_a).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn flat_family_quadrature_oracle() {
        for v in [0.5, 1.25, 2.0] {
            let (th, c) = theta_c_quadrature(0.0, 1.0, v).unwrap();
            let s = (v - 0.25f64).sqrt();
            assert!((c - (v - 0.25f64).powf(1.5) / 3.0).abs() < 1e-9, "c({v})");
            assert!((th - (2.0 * s - (2.0 * s).atan())).abs() < 1e-9, "θ({v})");
        }
        let (th, c) = theta_c_quadrature(0.0f64, 1.0, 1.25).unwrap();
        assert!((c - 1.0 / 3.0).abs() < 1e-9 && (th - (2.0 - 2f64.atan())).abs() < 1e-9);
        let f = Family::<f64>::new(1.0, 1.0).unwrap();
        assert_eq!(f.theta_c(f.anchor()).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn near_bound_quadrature() {
        let f = Family::<f64>::new(1.0, 1.0).unwrap();
        let hi = f.domain().hi;
        let (th_a, c_a) = f.theta_c(hi - 1e-5).unwrap();
        let (th_b, c_b) = f.theta_c(hi).unwrap();
        // the integrands vanish like √(hi − v), so the tail is O(1e-5^{3/2})
        assert!((th_b - th_a).abs() < 1e-6 && (c_b - c_a).abs() < 1e-6);
        let (th_c, _) = f.theta_c(hi - 2e-4).unwrap();
        assert!(th_c < th_a && th_a < th_b);
    }

    #[test]
    fn unit_speed_profiles() {
        for f in fams() {
            let d = f.domain();
            let range = if d.hi.is_finite() { (0.95 * d.lo, 0.95 * d.hi) } else { (0.3, 3.0) };
            let p = FamilyProfile::new(f, range, 33).unwrap();
            for i in 0..40 {
                let v = range.0 + (range.1 - range.0) * (i as f64 + 0.3) / 40.0;
                let j = p.eval(v).unwrap();
                assert!((j.da * j.da + j.db * j.db - 1.0).abs() < 1e-10);
                assert!((j.dc - 0.5 * (j.a * j.db - j.b * j.da)).abs() < 1e-12);
                let s = p.sample(v).unwrap();
                assert!((j.a * j.a + j.b * j.b - s.r * s.r).abs() < 1e-12);
                assert!((j.a * j.da + j.b * j.db - s.r * s.dr_dt).abs() < 1e-12);
                // θ and c are consistent with the knots up to quadrature error
                let h = 1e-4;
                let (t1, c1) = p.theta_c(v + h).unwrap();
                let (t0, c0) = p.theta_c(v - h).unwrap();
                let (dth, dc) = f.integrands(v).unwrap();
                assert!(((t1 - t0) / (2.0 * h) - dth).abs() < 1e-6);
                assert!(((c1 - c0) / (2.0 * h) - dc).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn lift_examples() {
        let (cos, sin) = (parse("cos(t)").unwrap(), parse("sin(t)").unwrap());
        for t in [0.5f64, 2.0, 7.0] {
            assert!((horizontal_lift(&cos, &sin, t).unwrap() - t / 2.0).abs() < 1e-10);
        }
        let (a, b) = (parse("t").unwrap(), parse("0").unwrap());
        assert_eq!(horizontal_lift(&a, &b, 3.0).unwrap(), 0.0);
        let (a, b) = (parse("t^2+1").unwrap(), parse("sin(3*t)").unwrap());
        let h = 1e-5;
        let t = 0.8;
        let c = |x: f64| horizontal_lift(&a, &b, x).unwrap();
        let dc = (c(t + h) - c(t - h)) / (2.0 * h);
        let (av, bv) = (t * t + 1.0, (3.0 * t).sin());
        let (da, db) = (2.0 * t, 3.0 * (3.0 * t).cos());
        assert!((dc + 0.5 * (bv * da - av * db)).abs() < 1e-9);
    }

    #[test]
    fn polar_plane_frame() {
        let s = RotationSurface::new(PolarPlane::<f64> { radii: (0.5, 3.0) });
        let f = adapted_frame(&s, 0.0, 1.0).unwrap();
        assert!((f.a - 2.0).abs() < 1e-14);
        assert!((f.alpha + std::f64::consts::FRAC_PI_2).abs() < 1e-14);
        assert!((f.density - 0.5).abs() < 1e-14);
        let closed = s.closed_form_derivatives(0.0, 1.0).unwrap().unwrap();
        assert_eq!(closed, FrameDerivatives { da_f2: -2.0, da_f3: 0.0, dalpha_f2: 0.0, dalpha_f3: -2.0 });
        // f_u = −(r²/2) f3: the unit circle is traversed with b < 0
        let (a, b) = f.tangent_components(&f.fu);
        assert!(a.abs() < 1e-14 && (b + 0.5).abs() < 1e-14);
    }

    #[test]
    fn closed_form_matches_finite_differences() {
        let opts = FrameOptions::default();
        for fam in fams() {
            let spec = RotationSurfaceSpec::new(fam.k_inf, fam.r0).unwrap();
            let s = RotationSurface::new(spec.profile().unwrap());
            let (v0, v1) = spec.v_range;
            for i in 1..6 {
                let v = v0 + (v1 - v0) * i as f64 / 6.0;
                let u = 0.37 * i as f64;
                let f = adapted_frame(&s, u, v).unwrap();
                let j = s.profile.eval(v).unwrap();
                assert!((f.a - rotation_a(&j)).abs() < 1e-10);
                let r2 = j.a * j.a + j.b * j.b;
                assert!((f.density - 0.5 * r2).abs() < 1e-10);
                let (a, b) = f.tangent_components(&f.fu);
                let theta_dot = fam.integrands(v).unwrap().0;
                assert!((a - r2 * theta_dot).abs() < 1e-8 && (b + 0.5 * r2).abs() < 1e-8);
                let cf = s.closed_form_derivatives(u, v).unwrap().unwrap();
                let fd = frame_derivatives_fd(&s, u, v, &opts).unwrap();
                for (x, y) in [(cf.da_f2, fd.da_f2), (cf.da_f3, fd.da_f3), (cf.dalpha_f2, fd.dalpha_f2), (cf.dalpha_f3, fd.dalpha_f3)] {
                    assert!((x - y).abs() < 1e-6 * (1.0 + x.abs()), "K={} v={v}: {cf:?} vs {fd:?}", fam.k_inf);
                }
                assert!((k_inf(&fd, f.a) - fam.k_inf).abs() < 1e-6);
                assert!((k_inf(&cf, f.a) - fam.k_inf).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn dalpha_along_v_is_planar_curvature() {
        // α = u + angle(a', b') − π/2, so ∂α/∂v = (a'b'' − b'a'')/s²
        let spec = RotationSurfaceSpec::<f64>::figure(1).unwrap();
        let s = RotationSurface::new(spec.profile().unwrap());
        let (u, v, h) = (0.4, 0.9, 1e-5);
        let al = |vv: f64| adapted_frame(&s, u, vv).unwrap().alpha;
        let numeric = (al(v + h) - al(v - h)) / (2.0 * h);
        let j = s.profile.eval(v).unwrap();
        let ours = (j.da * j.d2b - j.db * j.d2a) / (j.da * j.da + j.db * j.db);
        assert!(ours.abs() > 0.1);
        assert!((numeric - ours).abs() < 1e-6, "{numeric} vs {ours}");
        let al_u = (adapted_frame(&s, u + h, v).unwrap().alpha - adapted_frame(&s, u - h, v).unwrap().alpha) / (2.0 * h);
        assert!((al_u - 1.0).abs() < 1e-8);
    }

    #[test]
    fn mesh_presets() {
        for n in 1..=3 {
            let mut spec = RotationSurfaceSpec::<f64>::figure(n).unwrap();
            spec.samples_u = 32;
            spec.samples_v = 24;
            let mesh = build_mesh(&spec).unwrap();
            assert_eq!(mesh.vertices.len(), 32 * 24);
            assert_eq!(mesh.triangles.len(), 2 * 32 * 23);
            assert_eq!(mesh.polylines.len(), 8);
            assert!(mesh.rotation_defect() <= 1e-12);
            let fam = spec.family().unwrap();
            for ((_, v), p) in mesh.params.iter().zip(&mesh.vertices) {
                let r = fam.radial(*v).unwrap().r;
                assert!((p[0] * p[0] + p[1] * p[1] - r * r).abs() < 1e-10);
            }
            let profile = spec.profile().unwrap();
            for poly in &mesh.polylines {
                assert!(horizontality_defect(&profile, poly, 1e-5).unwrap() <= 1e-8);
            }
        }
    }

    #[test]
    fn chord_tangents_are_not_horizontal_at_coarse_sampling() {
        // the discrete check must use the curve's tangent, not its chords
        let mut spec = RotationSurfaceSpec::<f64>::figure(1).unwrap();
        spec.samples_v = 16;
        let mesh = build_mesh(&spec).unwrap();
        let p = &mesh.polylines[0].points;
        let chord = |q0: [f64; 3], q1: [f64; 3]| {
            let m = Point::new(0.5 * (q0[0] + q1[0]), 0.5 * (q0[1] + q1[1]), 0.5 * (q0[2] + q1[2]));
            coframe_eval(Coform::E3, &m, [q1[0] - q0[0], q1[1] - q0[1], q1[2] - q0[2]])
        };
        assert!(p.windows(2).map(|w| chord(w[0], w[1]).abs()).fold(0.0, f64::max) > 1e-8);
    }

    #[test]
    fn spec_validation() {
        let mut spec = RotationSurfaceSpec::<f64>::new(1.0, 1.0).unwrap();
        spec.v_range = (0.0, 1.4);
        let err = spec.validate().unwrap_err();
        assert!(matches!(err, GeomError::DomainViolation { hi, .. } if (hi - 1.3324789).abs() < 1e-6));
        assert!(RotationSurfaceSpec::<f64>::figure(4).is_err());
        let spec = RotationSurfaceSpec::<f64>::figure(2).unwrap();
        assert!(spec.v_range.0 > 0.25);
    }
}
