use std::ops::{Add, Div, Mul, Neg, Sub};

use super::ast::{BinOp, Constant, Expr, Func, Var};
use super::dual::Dual2;
use super::ExprError;
use crate::scalar::Real;

/// Arguments of `sqrt` in `[-SQRT_CLAMP, 0]` are treated as zero.
const SQRT_CLAMP: f64 = 1e-12;

/// Values bound to the free variables of an expression.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Bindings<T> {
    pub u: Option<T>,
    pub v: Option<T>,
    pub t: Option<T>,
}

impl<T: Copy> Bindings<T> {
    pub fn uv(u: T, v: T) -> Self {
        Self { u: Some(u), v: Some(v), t: None }
    }

    pub fn t(t: T) -> Self {
        Self { u: None, v: None, t: Some(t) }
    }

    pub fn get(&self, var: Var) -> Option<T> {
        match var {
            Var::U => self.u,
            Var::V => self.v,
            Var::T => self.t,
        }
    }
}

trait Value<T: Real>: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Div<Output = Self> + Neg<Output = Self> {
    fn constant(x: T) -> Self;
    fn value(&self) -> T;
    fn apply(self, f: Func) -> Self;
    fn pow(self, exponent: Self) -> Self;
    fn exponent_is_constant(&self) -> bool;
}

impl<T: Real> Value<T> for T {
    fn constant(x: T) -> Self {
        x
    }

    fn value(&self) -> T {
        *self
    }

    fn apply(self, f: Func) -> Self {
        match f {
            Func::Sin => self.sin(),
            Func::Cos => self.cos(),
            Func::Tan => self.tan(),
            Func::Sinh => self.sinh(),
            Func::Cosh => self.cosh(),
            Func::Tanh => self.tanh(),
            Func::Sqrt => self.sqrt(),
            Func::Exp => self.exp(),
            Func::Ln => self.ln(),
            Func::Abs => self.abs(),
            Func::Atan => self.atan(),
        }
    }

    fn pow(self, exponent: Self) -> Self {
        self.powf(exponent)
    }

    fn exponent_is_constant(&self) -> bool {
        true
    }
}

impl<T: Real> Value<T> for Dual2<T> {
    fn constant(x: T) -> Self {
        Dual2::constant(x)
    }

    fn value(&self) -> T {
        self.value
    }

    fn apply(self, f: Func) -> Self {
        match f {
            Func::Sin => self.sin(),
            Func::Cos => self.cos(),
            Func::Tan => self.tan(),
            Func::Sinh => self.sinh(),
            Func::Cosh => self.cosh(),
            Func::Tanh => self.tanh(),
            Func::Sqrt => self.sqrt(),
            Func::Exp => self.exp(),
            Func::Ln => self.ln(),
            Func::Abs => self.abs(),
            Func::Atan => self.atan(),
        }
    }

    fn pow(self, exponent: Self) -> Self {
        Dual2::pow(self, exponent)
    }

    fn exponent_is_constant(&self) -> bool {
        self.is_constant()
    }
}

fn domain_error(func: &'static str, arg: f64, node: &Expr) -> ExprError {
    ExprError::Domain { func, arg, subexpr: node.to_string() }
}

fn walk<T: Real, V: Value<T>>(e: &Expr, var: &impl Fn(Var) -> Result<V, ExprError>) -> Result<V, ExprError> {
    Ok(match e {
        Expr::Num(x) => V::constant(T::lit(*x)),
        Expr::Const(Constant::Pi) => V::constant(T::PI()),
        Expr::Const(Constant::E) => V::constant(T::E()),
        Expr::Var(v) => var(*v)?,
        Expr::Neg(inner) => -walk::<T, V>(inner, var)?,
        Expr::Binary(op, a, b) => {
            let (x, y) = (walk::<T, V>(a, var)?, walk::<T, V>(b, var)?);
            match op {
                BinOp::Add => x + y,
                BinOp::Sub => x - y,
                BinOp::Mul => x * y,
                BinOp::Div => x / y,
                BinOp::Pow => {
                    let base = x.value();
                    let const_exp = y.exponent_is_constant();
                    let integral = y.value().fract() == T::zero();
                    if base < T::zero() && !(const_exp && integral) {
                        return Err(domain_error("^", base.as_f64(), e));
                    }
                    if base == T::zero() && !const_exp {
                        return Err(domain_error("^", base.as_f64(), e));
                    }
                    x.pow(y)
                }
            }
        }
        Expr::Call(func, arg) => {
            let mut x = walk::<T, V>(arg, var)?;
            let val = x.value();
            match func {
                Func::Sqrt => {
                    let clamp = T::lit(SQRT_CLAMP);
                    if val < -clamp {
                        return Err(domain_error("sqrt", val.as_f64(), e));
                    }
                    if val < T::zero() {
                        x = V::constant(T::zero()) + (x - V::constant(val));
                    }
                }
                Func::Ln if val <= T::zero() => return Err(domain_error("ln", val.as_f64(), e)),
                _ => {}
            }
            x.apply(*func)
        }
    })
}

/// Evaluates `e` with the given variable bindings.
pub fn eval<T: Real>(e: &Expr, bindings: &Bindings<T>) -> Result<T, ExprError> {
    walk::<T, T>(e, &|v| bindings.get(v).ok_or(ExprError::UnboundVariable(v)))
}

/// Value and partials with respect to `u` and `v`.
pub fn eval_dual<T: Real>(e: &Expr, u: T, v: T) -> Result<Dual2<T>, ExprError> {
    eval_dual_seeded(e, &Bindings::uv(u, v), Var::U, Some(Var::V))
}

/// Dual evaluation with `first` seeded into `d_u` and `second` into `d_v`;
/// any other bound variable is held constant.
pub fn eval_dual_seeded<T: Real>(e: &Expr, bindings: &Bindings<T>, first: Var, second: Option<Var>) -> Result<Dual2<T>, ExprError> {
    walk::<T, Dual2<T>>(e, &|v| {
        let x = bindings.get(v).ok_or(ExprError::UnboundVariable(v))?;
        Ok(if v == first {
            Dual2::new(x, T::one(), T::zero())
        } else if Some(v) == second {
            Dual2::new(x, T::zero(), T::one())
        } else {
            Dual2::constant(x)
        })
    })
}
