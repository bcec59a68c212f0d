//! Arithmetic expressions over the parameters `u`, `v`, `t`.
//!
//! Used to describe surfaces, graphs and planar curves in configuration
//! files. Evaluation is available on plain scalars and on [`Dual2`] numbers,
//! which carry exact first partials with respect to two seeded variables.

mod ast;
mod dual;
mod eval;
mod parser;

use thiserror::Error;

pub use ast::{BinOp, Constant, Expr, Func, Var};
pub use dual::Dual2;
pub use eval::{eval, eval_dual, eval_dual_seeded, Bindings};
pub use parser::parse;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("syntax error at offset {offset}: expected {expected}, found {found}")]
    Syntax { offset: usize, expected: String, found: String },
    #[error("unknown identifier `{name}` at offset {offset}")]
    UnknownIdentifier { offset: usize, name: String },
    #[error("variable `{0}` is not bound")]
    UnboundVariable(Var),
    #[error("domain error in `{subexpr}`: {func} undefined at {arg}")]
    Domain { func: &'static str, arg: f64, subexpr: String },
}
