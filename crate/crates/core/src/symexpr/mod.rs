//! Symbolic scalar expressions over chart coordinates.
//!
//! Expressions are normalized on construction: sums and products are
//! flattened, rational constants folded, like terms collected and powers of
//! equal bases merged. `exp`, `sin`, `cos`, `sinh`, `cosh` and `abs` are
//! opaque atoms with known derivatives.

mod diff;
mod display;
mod eval;
mod expr;
mod parse;
mod zero;

pub use diff::differentiate;
pub use eval::{evaluate, evaluate_with_scale, Constants, EvalError};
pub use expr::{rat, rational_from_f64, rational_to_f64, Expr, Func, Node, Rational};
pub use parse::{parse, parse_with_params, ParseError};
pub use zero::{is_zero, ZeroTest, DEFAULT_TRIALS, ZERO_TOL};

#[allow(unused_imports)]
pub(crate) use eval::{apply_f64, real_pow};
