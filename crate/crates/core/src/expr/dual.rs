use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::scalar::Real;

/// A value with its first partials along two seeded directions.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Dual2<T> {
    pub value: T,
    pub d_u: T,
    pub d_v: T,
}

impl<T: Real> Dual2<T> {
    pub fn new(value: T, d_u: T, d_v: T) -> Self {
        Self { value, d_u, d_v }
    }

    pub fn constant(value: T) -> Self {
        Self::new(value, T::zero(), T::zero())
    }

    /// Applies a scalar function with derivative `slope` at `self.value`.
    #[inline]
    pub fn chain(self, value: T, slope: T) -> Self {
        Self::new(value, slope * self.d_u, slope * self.d_v)
    }

    pub fn is_constant(&self) -> bool {
        self.d_u == T::zero() && self.d_v == T::zero()
    }

    pub fn sin(self) -> Self {
        self.chain(self.value.sin(), self.value.cos())
    }

    pub fn cos(self) -> Self {
        self.chain(self.value.cos(), -self.value.sin())
    }

    pub fn tan(self) -> Self {
        let t = self.value.tan();
        self.chain(t, T::one() + t * t)
    }

    pub fn sinh(self) -> Self {
        self.chain(self.value.sinh(), self.value.cosh())
    }

    pub fn cosh(self) -> Self {
        self.chain(self.value.cosh(), self.value.sinh())
    }

    pub fn tanh(self) -> Self {
        let t = self.value.tanh();
        self.chain(t, T::one() - t * t)
    }

    pub fn sqrt(self) -> Self {
        let s = self.value.sqrt();
        self.chain(s, T::half() / s)
    }

    pub fn exp(self) -> Self {
        let e = self.value.exp();
        self.chain(e, e)
    }

    pub fn ln(self) -> Self {
        self.chain(self.value.ln(), self.value.recip())
    }

    pub fn abs(self) -> Self {
        self.chain(self.value.abs(), self.value.signum())
    }

    pub fn atan(self) -> Self {
        self.chain(self.value.atan(), (T::one() + self.value * self.value).recip())
    }

    /// `self^p` for a constant exponent.
    pub fn powf(self, p: T) -> Self {
        let slope = if p == T::zero() { T::zero() } else { p * self.value.powf(p - T::one()) };
        self.chain(self.value.powf(p), slope)
    }

    /// `self^other` with both sides varying; needs `self.value > 0`.
    pub fn pow(self, other: Self) -> Self {
        if other.is_constant() {
            return self.powf(other.value);
        }
        (other * self.ln()).exp()
    }
}

impl<T: Real> Add for Dual2<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.value + o.value, self.d_u + o.d_u, self.d_v + o.d_v)
    }
}

impl<T: Real> Sub for Dual2<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.value - o.value, self.d_u - o.d_u, self.d_v - o.d_v)
    }
}

impl<T: Real> Mul for Dual2<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self::new(self.value * o.value, self.d_u * o.value + self.value * o.d_u, self.d_v * o.value + self.value * o.d_v)
    }
}

impl<T: Real> Div for Dual2<T> {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        let inv = o.value.recip();
        let q = self.value * inv;
        Self::new(q, (self.d_u - q * o.d_u) * inv, (self.d_v - q * o.d_v) * inv)
    }
}

impl<T: Real> Neg for Dual2<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.value, -self.d_u, -self.d_v)
    }
}
