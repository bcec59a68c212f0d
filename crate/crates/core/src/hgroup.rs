//! The first Heisenberg group in exponential coordinates.
//!
//! Points are triples `(x, y, z)` with the twisted product
//! `(x1, y1, z1)(x2, y2, z2) = (x1 + x2, y1 + y2, z1 + z2 + (x1 y2 - x2 y1) / 2)`.
//! The left-invariant frame is
//!
//! ```text
//! e1 = ∂x - (y/2) ∂z,   e2 = ∂y + (x/2) ∂z,   e3 = ∂z,
//! ```
//!
//! with `[e1, e2] = e3` and dual coframe `e¹ = dx`, `e² = dy`,
//! `e³ = dz + (y dx - x dy)/2`.
//!
//! The group law and the frame/coframe conversions only need ring operations
//! plus division by two, so they are generic over [`num_traits::Num`] and work
//! with exact rationals as well as floats. Everything that involves `√L`
//! (the `g_L` metric, its connection and curvature) requires [`Real`].

use num_traits::Num;

use crate::error::{GeomError, Result};
use crate::scalar::Real;

#[inline]
fn half<T: Num + Copy>() -> T {
    T::one() / (T::one() + T::one())
}

/// A point of H¹ in exponential coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point<T> {
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Num + Copy> Point<T> {
    pub fn new(x: T, y: T, z: T) -> Self {
        Self { x, y, z }
    }

    pub fn identity() -> Self {
        Self::new(T::zero(), T::zero(), T::zero())
    }

    /// Group product `self · q`.
    pub fn mul(&self, q: &Self) -> Self {
        group_mul(self, q)
    }

    /// Group inverse, `(-x, -y, -z)`.
    pub fn inverse(&self) -> Self {
        let zero = T::zero();
        Self::new(zero - self.x, zero - self.y, zero - self.z)
    }

    pub fn to_array(&self) -> [T; 3] {
        [self.x, self.y, self.z]
    }
}

impl<T: Real> Point<T> {
    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

/// `(x1 + x2, y1 + y2, z1 + z2 + (x1 y2 - x2 y1)/2)`.
pub fn group_mul<T: Num + Copy>(p: &Point<T>, q: &Point<T>) -> Point<T> {
    Point { x: p.x + q.x, y: p.y + q.y, z: p.z + q.z + half::<T>() * (p.x * q.y - q.x * p.y) }
}

/// Coordinate components of `e1`, `e2`, `e3` at `p`.
pub fn frame_at<T: Num + Copy>(p: &Point<T>) -> [[T; 3]; 3] {
    let (zero, one) = (T::zero(), T::one());
    let h = half::<T>();
    [[one, zero, zero - h * p.y], [zero, one, h * p.x], [zero, zero, one]]
}

/// One of the left-invariant coforms `e¹`, `e²`, `e³`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coform {
    E1,
    E2,
    E3,
}

/// Evaluates a left-invariant coform on a coordinate vector `v` at `p`.
pub fn coframe_eval<T: Num + Copy>(form: Coform, p: &Point<T>, v: [T; 3]) -> T {
    match form {
        Coform::E1 => v[0],
        Coform::E2 => v[1],
        Coform::E3 => v[2] + half::<T>() * (p.y * v[0] - p.x * v[1]),
    }
}

/// Determinant of a 3×3 matrix given by rows.
pub(crate) fn det3<T: Num + Copy>(m: [[T; 3]; 3]) -> T {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// `(e¹ ∧ e² ∧ e³)(v1, v2, v3)` for coordinate vectors at `p`.
pub fn volume_form<T: Num + Copy>(p: &Point<T>, vs: [[T; 3]; 3]) -> T {
    let rows = [Coform::E1, Coform::E2, Coform::E3].map(|f| [coframe_eval(f, p, vs[0]), coframe_eval(f, p, vs[1]), coframe_eval(f, p, vs[2])]);
    det3(rows)
}

/// A tangent vector at `base`, by coefficients in the frame `e1, e2, e3`.
///
/// The third coefficient refers to the raw `e3 = ∂z`, not to the
/// `g_L`-normalized `e3^L`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FrameVec<T> {
    pub base: Point<T>,
    pub c: [T; 3],
}

impl<T: Num + Copy> FrameVec<T> {
    pub fn new(base: Point<T>, c1: T, c2: T, c3: T) -> Self {
        Self { base, c: [c1, c2, c3] }
    }

    /// Frame coefficients of the coordinate vector `v` at `base`.
    pub fn from_coords(base: Point<T>, v: [T; 3]) -> Self {
        Self { base, c: [coframe_eval(Coform::E1, &base, v), coframe_eval(Coform::E2, &base, v), coframe_eval(Coform::E3, &base, v)] }
    }

    /// Coordinate components `(dx, dy, dz)`.
    pub fn to_coords(&self) -> [T; 3] {
        let f = frame_at(&self.base);
        let mut out = [T::zero(); 3];
        for (k, o) in out.iter_mut().enumerate() {
            *o = self.c[0] * f[0][k] + self.c[1] * f[1][k] + self.c[2] * f[2][k];
        }
        out
    }

    pub fn scale(&self, s: T) -> Self {
        Self { base: self.base, c: self.c.map(|x| x * s) }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self { base: self.base, c: [self.c[0] + other.c[0], self.c[1] + other.c[1], self.c[2] + other.c[2]] }
    }

    /// Horizontal projection (drops the `e3` component).
    pub fn horizontal(&self) -> Self {
        Self { base: self.base, c: [self.c[0], self.c[1], T::zero()] }
    }
}

impl<T: Real> FrameVec<T> {
    pub fn is_finite(&self) -> bool {
        self.base.is_finite() && self.c.iter().all(|x| x.is_finite())
    }

    /// Largest coefficient magnitude.
    pub fn max_abs(&self) -> T {
        self.c.iter().fold(T::zero(), |m, x| m.max(x.abs()))
    }
}

/// The parameter `L > 0` of the metric `g_L` in which `e1, e2, e3/√L` is orthonormal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricParam<T>(T);

impl<T: Real> MetricParam<T> {
    pub fn new(l: T) -> Result<Self> {
        if l > T::zero() && l.is_finite() {
            Ok(Self(l))
        } else {
            Err(GeomError::InvalidParameter(format!("metric parameter L must be positive and finite, got {l}")))
        }
    }

    pub fn value(&self) -> T {
        self.0
    }

    pub fn sqrt(&self) -> T {
        self.0.sqrt()
    }
}

/// `⟨u, v⟩_L = u1 v1 + u2 v2 + L u3 v3` for frame coefficients.
pub fn gl_inner<T: Real>(u: &FrameVec<T>, v: &FrameVec<T>, l: MetricParam<T>) -> Result<T> {
    if u.base != v.base {
        return Err(GeomError::MismatchedBase);
    }
    Ok(gl_dot(&u.c, &v.c, l.value()))
}

#[inline]
pub(crate) fn gl_dot<T: Real>(u: &[T; 3], v: &[T; 3], l: T) -> T {
    u[0] * v[0] + u[1] * v[1] + l * u[2] * v[2]
}

/// Coefficients with respect to the `g_L`-orthonormal frame `(e1, e2, e3^L)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct OrthoCoeffs<T>(pub [T; 3]);

impl<T: Real> OrthoCoeffs<T> {
    /// Re-expresses in the raw frame: the `e3^L` coefficient becomes `c/√L` on `e3`.
    pub fn to_frame_vec(&self, base: Point<T>, l: MetricParam<T>) -> FrameVec<T> {
        FrameVec { base, c: [self.0[0], self.0[1], self.0[2] / l.sqrt()] }
    }

    pub fn from_frame_vec(v: &FrameVec<T>, l: MetricParam<T>) -> Self {
        Self([v.c[0], v.c[1], v.c[2] * l.sqrt()])
    }

    pub fn dot(&self, other: &Self) -> T {
        self.0[0] * other.0[0] + self.0[1] * other.0[1] + self.0[2] * other.0[2]
    }
}

fn check_index(i: usize) -> Result<usize> {
    if (1..=3).contains(&i) {
        Ok(i - 1)
    } else {
        Err(GeomError::IndexOutOfRange(i))
    }
}

/// Levi-Civita connection of `g_L` on the orthonormal frame: `∇_{e_i} e_j`.
///
/// Index 3 always means `e3^L = e3/√L`. The non-zero entries are
///
/// ```text
/// ∇_{e1} e2   =  (√L/2) e3^L     ∇_{e2} e1   = -(√L/2) e3^L
/// ∇_{e1} e3^L = -(√L/2) e2       ∇_{e3^L} e1 = -(√L/2) e2
/// ∇_{e2} e3^L =  (√L/2) e1       ∇_{e3^L} e2 =  (√L/2) e1
/// ```
pub fn connection_coeff<T: Real>(l: MetricParam<T>, i: usize, j: usize) -> Result<OrthoCoeffs<T>> {
    let (i, j) = (check_index(i)?, check_index(j)?);
    Ok(OrthoCoeffs(connection_table(l.value())[i][j]))
}

fn connection_table<T: Real>(l: T) -> [[[T; 3]; 3]; 3] {
    let h = l.sqrt() * T::half();
    let z = T::zero();
    [[[z, z, z], [z, z, h], [z, -h, z]], [[z, z, -h], [z, z, z], [h, z, z]], [[z, -h, z], [h, z, z], [z, z, z]]]
}

/// `[e_i, e_j]` in the orthonormal frame; only `[e1, e2] = √L e3^L` survives.
pub fn bracket_coeff<T: Real>(l: MetricParam<T>, i: usize, j: usize) -> Result<OrthoCoeffs<T>> {
    let (i, j) = (check_index(i)?, check_index(j)?);
    Ok(OrthoCoeffs(bracket_table(l.value())[i][j]))
}

fn bracket_table<T: Real>(l: T) -> [[[T; 3]; 3]; 3] {
    let s = l.sqrt();
    let z = T::zero();
    let zero = [z, z, z];
    [[zero, [z, z, s], zero], [[z, z, -s], zero, zero], [zero, zero, zero]]
}

/// `∇_X Y` for constant-coefficient fields `X`, `Y` in the orthonormal frame.
fn covariant<T: Real>(table: &[[[T; 3]; 3]; 3], x: &[T; 3], y: &[T; 3]) -> [T; 3] {
    let mut out = [T::zero(); 3];
    for i in 0..3 {
        for j in 0..3 {
            let w = x[i] * y[j];
            if w != T::zero() {
                for k in 0..3 {
                    out[k] += w * table[i][j][k];
                }
            }
        }
    }
    out
}

/// Curvature tensor component `R_{ijkl} = g_L(R(e_i, e_j) e_k, e_l)` with
/// `R(X, Y) = ∇_X ∇_Y - ∇_Y ∇_X - ∇_{[X,Y]}`, index 3 meaning `e3^L`.
///
/// With this slot order `R_{1212} = 3L/4` and `R_{1313} = R_{2323} = -L/4`,
/// so the sectional curvature of the plane spanned by `e_i, e_j` is `-R_{ijij}`.
/// Components are evaluated from the connection and bracket tables, not
/// looked up.
pub fn riemann_component<T: Real>(l: MetricParam<T>, i: usize, j: usize, k: usize, m: usize) -> Result<T> {
    let (i, j, k, m) = (check_index(i)?, check_index(j)?, check_index(k)?, check_index(m)?);
    let conn = connection_table(l.value());
    let br = bracket_table(l.value());
    let basis = |n: usize| {
        let mut e = [T::zero(); 3];
        e[n] = T::one();
        e
    };
    let (ei, ej, ek) = (basis(i), basis(j), basis(k));
    let a = covariant(&conn, &ei, &covariant(&conn, &ej, &ek));
    let b = covariant(&conn, &ej, &covariant(&conn, &ei, &ek));
    let c = covariant(&conn, &br[i][j], &ek);
    Ok(a[m] - b[m] - c[m])
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Rational64;
    use proptest::prelude::*;

    fn ml(l: f64) -> MetricParam<f64> {
        MetricParam::new(l).unwrap()
    }

    #[test]
    fn product_examples() {
        let p = Point::new(1.5, -2.0, 0.25);
        assert_eq!(group_mul(&p, &Point::identity()), p);
        assert_eq!(group_mul(&Point::new(1.0, 0.0, 0.0), &Point::new(0.0, 1.0, 0.0)), Point::new(1.0, 1.0, 0.5));
        assert_eq!(group_mul(&Point::new(1.0, 0.0, 0.0), &Point::new(-1.0, 0.0, 0.0)), Point::identity());
        assert_eq!(group_mul(&p, &p.inverse()), Point::identity());
    }

    #[test]
    fn associativity_is_exact_over_rationals() {
        let q = |a: i64, b: i64| Rational64::new(a, b);
        let p1 = Point::new(q(1, 3), q(-2, 7), q(5, 2));
        let p2 = Point::new(q(4, 5), q(3, 11), q(-1, 9));
        let p3 = Point::new(q(-7, 2), q(1, 13), q(2, 3));
        assert_eq!(p1.mul(&p2).mul(&p3), p1.mul(&p2.mul(&p3)));
    }

    #[test]
    fn frame_examples() {
        assert_eq!(frame_at(&Point::new(0.0, 0.0, 0.0))[0], [1.0, 0.0, 0.0]);
        assert_eq!(frame_at(&Point::new(0.0, 2.0, 0.0))[0], [1.0, 0.0, -1.0]);
        assert_eq!(frame_at(&Point::new(3.0, -4.0, 9.0))[2], [0.0, 0.0, 1.0]);
    }

    #[test]
    fn coframe_examples_and_duality() {
        let p = Point::new(0.7f64, -1.3, 2.0);
        let frame = frame_at(&p);
        let forms = [Coform::E1, Coform::E2, Coform::E3];
        for (i, f) in forms.iter().enumerate() {
            for (j, e) in frame.iter().enumerate() {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((coframe_eval(*f, &p, *e) - expect).abs() < 1e-15);
            }
        }
        assert_eq!(coframe_eval(Coform::E3, &Point::new(2.0, 0.0, 0.0), [0.0, 1.0, 0.0]), -1.0);
        let id = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        assert_eq!(volume_form(&p, id), 1.0);
    }

    #[test]
    fn inner_product_examples() {
        let p = Point::new(0.1, 0.2, 0.3);
        let e1 = FrameVec::new(p, 1.0, 0.0, 0.0);
        let e3 = FrameVec::new(p, 0.0, 0.0, 1.0);
        assert_eq!(gl_inner(&e1, &e1, ml(7.0)).unwrap(), 1.0);
        assert_eq!(gl_inner(&e3, &e3, ml(4.0)).unwrap(), 4.0);
        assert_eq!(gl_inner(&e1, &e3, ml(4.0)).unwrap(), 0.0);
        let elsewhere = FrameVec::new(Point::new(1.0, 0.0, 0.0), 1.0, 0.0, 0.0);
        assert_eq!(gl_inner(&e1, &elsewhere, ml(1.0)), Err(GeomError::MismatchedBase));
        assert!(MetricParam::new(0.0).is_err());
        assert!(MetricParam::new(f64::INFINITY).is_err());
    }

    #[test]
    fn connection_table_entries() {
        let l = ml(9.0);
        assert_eq!(connection_coeff(l, 1, 1).unwrap().0, [0.0; 3]);
        assert_eq!(connection_coeff(l, 1, 2).unwrap().0, [0.0, 0.0, 1.5]);
        assert_eq!(connection_coeff(l, 3, 2).unwrap().0, [1.5, 0.0, 0.0]);
        assert_eq!(connection_coeff(l, 3, 1).unwrap().0, [0.0, -1.5, 0.0]);
        // (√L/2) e3^L is e3/2 in the raw frame
        let p = Point::new(1.0, 2.0, 3.0);
        let raw = connection_coeff(l, 1, 2).unwrap().to_frame_vec(p, l);
        assert!((raw.c[2] - 0.5).abs() < 1e-15);
        assert_eq!(connection_coeff(l, 0, 1), Err(GeomError::IndexOutOfRange(0)));
        assert_eq!(connection_coeff(l, 1, 4), Err(GeomError::IndexOutOfRange(4)));
    }

    #[test]
    fn connection_is_torsion_free_and_metric() {
        for &lv in &[0.5, 1.0, 10.0, 100.0] {
            let l = ml(lv);
            for i in 1..=3 {
                for j in 1..=3 {
                    let a = connection_coeff(l, i, j).unwrap().0;
                    let b = connection_coeff(l, j, i).unwrap().0;
                    let br = bracket_coeff(l, i, j).unwrap().0;
                    for k in 0..3 {
                        assert!((a[k] - b[k] - br[k]).abs() < 1e-12);
                    }
                    // constant coefficients: e_k⟨e_i, e_j⟩ = 0 must equal ⟨∇e_i, e_j⟩ + ⟨e_i, ∇e_j⟩
                    for k in 1..=3 {
                        let di = connection_coeff(l, k, i).unwrap().0;
                        let dj = connection_coeff(l, k, j).unwrap().0;
                        assert!((di[j - 1] + dj[i - 1]).abs() < 1e-12);
                    }
                }
            }
        }
    }

    /// Lie bracket of coordinate vector fields by central differences; exact
    /// for the affine fields of the frame.
    fn coord_bracket(p: [f64; 3], x: fn(&Point<f64>) -> [f64; 3], y: fn(&Point<f64>) -> [f64; 3]) -> [f64; 3] {
        let h = 1e-3;
        let jac = |f: fn(&Point<f64>) -> [f64; 3], dir: [f64; 3]| {
            let plus = f(&Point::new(p[0] + h * dir[0], p[1] + h * dir[1], p[2] + h * dir[2]));
            let minus = f(&Point::new(p[0] - h * dir[0], p[1] - h * dir[1], p[2] - h * dir[2]));
            [0, 1, 2].map(|k| (plus[k] - minus[k]) / (2.0 * h))
        };
        let pp = Point::new(p[0], p[1], p[2]);
        let (xv, yv) = (x(&pp), y(&pp));
        let a = jac(y, xv);
        let b = jac(x, yv);
        [0, 1, 2].map(|k| a[k] - b[k])
    }

    #[test]
    fn frame_brackets_from_coordinates() {
        let e1 = |p: &Point<f64>| frame_at(p)[0];
        let e2 = |p: &Point<f64>| frame_at(p)[1];
        let e3 = |p: &Point<f64>| frame_at(p)[2];
        let p = [0.3, -1.2, 4.0];
        let b12 = coord_bracket(p, e1, e2);
        let b31 = coord_bracket(p, e3, e1);
        let b32 = coord_bracket(p, e3, e2);
        for k in 0..3 {
            let e3k = if k == 2 { 1.0 } else { 0.0 };
            assert!((b12[k] - e3k).abs() < 1e-12);
            assert!(b31[k].abs() < 1e-12 && b32[k].abs() < 1e-12);
        }
    }

    #[test]
    fn curvature_table() {
        for &lv in &[1.0, 10.0, 100.0] {
            let l = ml(lv);
            let r = |i, j, k, m| riemann_component(l, i, j, k, m).unwrap();
            let tol = 1e-12 * lv;
            assert!((r(1, 2, 1, 2) - 0.75 * lv).abs() < tol);
            assert!((r(2, 1, 2, 1) - 0.75 * lv).abs() < tol);
            assert!((r(1, 2, 2, 1) + 0.75 * lv).abs() < tol);
            assert!((r(1, 3, 1, 3) + 0.25 * lv).abs() < tol);
            assert!((r(2, 3, 2, 3) + 0.25 * lv).abs() < tol);
            assert!((r(3, 2, 2, 3) - 0.25 * lv).abs() < tol);
            assert!(r(1, 2, 1, 3).abs() < 1e-12);
        }
        assert!((riemann_component(ml(1.0), 1, 2, 1, 2).unwrap() - 0.75).abs() < 1e-15);
        assert!((riemann_component(ml(4.0), 2, 3, 2, 3).unwrap() + 1.0).abs() < 1e-15);
    }

    #[test]
    fn curvature_symmetries() {
        let l = ml(3.0);
        for i in 1..=3 {
            for j in 1..=3 {
                for k in 1..=3 {
                    for m in 1..=3 {
                        let r = riemann_component(l, i, j, k, m).unwrap();
                        assert!((r + riemann_component(l, j, i, k, m).unwrap()).abs() < 1e-12);
                        assert!((r + riemann_component(l, i, j, m, k).unwrap()).abs() < 1e-12);
                        assert!((r - riemann_component(l, k, m, i, j).unwrap()).abs() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn f32_instantiation() {
        let l = MetricParam::new(4.0f32).unwrap();
        assert!((riemann_component(l, 1, 2, 1, 2).unwrap() - 3.0).abs() < 1e-6);
    }

    proptest! {
        #[test]
        fn associativity_in_floating_point(
            a in prop::array::uniform3(-10.0f64..10.0),
            b in prop::array::uniform3(-10.0f64..10.0),
            c in prop::array::uniform3(-10.0f64..10.0),
        ) {
            let (p, q, r) = (Point::new(a[0], a[1], a[2]), Point::new(b[0], b[1], b[2]), Point::new(c[0], c[1], c[2]));
            let lhs = p.mul(&q).mul(&r);
            let rhs = p.mul(&q.mul(&r));
            prop_assert!((lhs.x - rhs.x).abs() <= 1e-12);
            prop_assert!((lhs.y - rhs.y).abs() <= 1e-12);
            prop_assert!((lhs.z - rhs.z).abs() <= 1e-12);
        }

        #[test]
        fn frame_coordinate_round_trip(
            p in prop::array::uniform3(-10.0f64..10.0),
            v in prop::array::uniform3(-10.0f64..10.0),
        ) {
            let base = Point::new(p[0], p[1], p[2]);
            let back = FrameVec::from_coords(base, v).to_coords();
            for k in 0..3 {
                prop_assert!((back[k] - v[k]).abs() <= 1e-14 * (1.0 + v[k].abs() + p[0].abs() * v[1].abs() + p[1].abs() * v[0].abs()));
            }
        }
    }
}
