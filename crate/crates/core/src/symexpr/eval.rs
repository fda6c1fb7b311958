use std::collections::BTreeMap;

use thiserror::Error;

use super::expr::{rational_to_f64, Expr, Func, Node, Rational};

/// Bindings for named constants.
pub type Constants = BTreeMap<String, f64>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("unbound symbol `{0}`")]
    Unbound(String),
    #[error("domain error in `{expr}`: {reason}")]
    Domain { expr: String, reason: String },
}

impl EvalError {
    pub(crate) fn domain(e: &Expr, reason: &str) -> EvalError {
        EvalError::Domain {
            expr: e.to_string(),
            reason: reason.to_string(),
        }
    }
}

/// Evaluates `e` at coordinate values `point`.
pub fn evaluate(e: &Expr, point: &[f64], constants: &Constants) -> Result<f64, EvalError> {
    let mut scale = 0.0;
    eval_inner(e, point, constants, &mut scale)
}

/// Like [`evaluate`] but also returns the largest absolute value of any subterm.
pub fn evaluate_with_scale(e: &Expr, point: &[f64], constants: &Constants) -> Result<(f64, f64), EvalError> {
    let mut scale = 0.0;
    let v = eval_inner(e, point, constants, &mut scale)?;
    Ok((v, scale))
}

pub(crate) fn real_pow(base: f64, q: &Rational, e: &Expr) -> Result<f64, EvalError> {
    if q.is_integer() {
        let n = *q.numer();
        if base == 0.0 && n < 0 {
            return Err(EvalError::domain(e, "division by zero"));
        }
        return Ok(base.powi(n as i32));
    }
    if base < 0.0 {
        return Err(EvalError::domain(e, "fractional power of a negative number"));
    }
    if base == 0.0 && *q.numer() < 0 {
        return Err(EvalError::domain(e, "division by zero"));
    }
    Ok(base.powf(rational_to_f64(q)))
}

pub(crate) fn apply_f64(f: Func, x: f64, e: &Expr) -> Result<f64, EvalError> {
    Ok(match f {
        Func::Exp => x.exp(),
        Func::Sin => x.sin(),
        Func::Cos => x.cos(),
        Func::Sinh => x.sinh(),
        Func::Cosh => x.cosh(),
        Func::Sqrt => {
            if x < 0.0 {
                return Err(EvalError::domain(e, "square root of a negative number"));
            }
            x.sqrt()
        }
        Func::Abs => x.abs(),
    })
}

fn eval_inner(e: &Expr, point: &[f64], constants: &Constants, scale: &mut f64) -> Result<f64, EvalError> {
    let v = match e.node() {
        Node::Const(c) => rational_to_f64(c),
        Node::Coord(i, name) => *point
            .get(*i as usize)
            .ok_or_else(|| EvalError::Unbound(name.to_string()))?,
        Node::Param(name) => *constants
            .get(&**name)
            .ok_or_else(|| EvalError::Unbound(name.to_string()))?,
        Node::Sum(ts) => {
            let mut acc = 0.0;
            for t in ts {
                acc += eval_inner(t, point, constants, scale)?;
            }
            acc
        }
        Node::Product(fs) => {
            let mut acc = 1.0;
            for f in fs {
                acc *= eval_inner(f, point, constants, scale)?;
            }
            acc
        }
        Node::Pow(b, q) => {
            let base = eval_inner(b, point, constants, scale)?;
            real_pow(base, q, e)?
        }
        Node::Quotient(a, b) => {
            let num = eval_inner(a, point, constants, scale)?;
            let den = eval_inner(b, point, constants, scale)?;
            if den == 0.0 {
                return Err(EvalError::domain(e, "division by zero"));
            }
            num / den
        }
        Node::Neg(a) => -eval_inner(a, point, constants, scale)?,
        Node::Apply(f, a) => {
            let x = eval_inner(a, point, constants, scale)?;
            apply_f64(*f, x, e)?
        }
    };
    if !v.is_finite() {
        return Err(EvalError::domain(e, "non-finite value"));
    }
    if v.abs() > *scale {
        *scale = v.abs();
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symexpr::parse::parse;

    const COORDS: [&str; 5] = ["t", "x0", "x1", "x2", "x3"];

    fn at(t: f64, x2: f64, x3: f64) -> [f64; 5] {
        [t, 0.0, 0.0, x2, x3]
    }

    #[test]
    fn exponential_at_origin() {
        let e = parse("exp(2*t)", &COORDS).unwrap();
        assert_eq!(evaluate(&e, &at(0.0, 0.0, 0.0), &Constants::new()).unwrap(), 1.0);
    }

    #[test]
    fn sine_factor_at_quarter_turn() {
        let e = parse("exp(x2)*sin(x3)", &COORDS).unwrap();
        let v = evaluate(&e, &at(0.0, 0.0, std::f64::consts::FRAC_PI_2), &Constants::new()).unwrap();
        assert!((v - 1.0).abs() < 1e-15);
    }

    #[test]
    fn metric_coefficient_matches_direct_formula() {
        let e = parse("exp(2*t)*exp(x2)*sin(x3)", &COORDS).unwrap();
        let v = evaluate(&e, &at(0.1, 0.2, 0.3), &Constants::new()).unwrap();
        let direct = (2.0f64 * 0.1).exp() * 0.2f64.exp() * 0.3f64.sin();
        assert!((v - direct).abs() <= 1e-12 * direct.abs());
    }

    #[test]
    fn domain_errors_name_the_subexpression() {
        let e = parse("sqrt(x0 - 1)", &COORDS).unwrap();
        match evaluate(&e, &at(0.0, 0.0, 0.0), &Constants::new()) {
            Err(EvalError::Domain { expr, .. }) => assert!(expr.contains("x0")),
            other => panic!("unexpected {other:?}"),
        }
        let e = parse("1/x0", &COORDS).unwrap();
        assert!(matches!(
            evaluate(&e, &at(0.0, 0.0, 0.0), &Constants::new()),
            Err(EvalError::Domain { .. })
        ));
    }

    #[test]
    fn unbound_constant() {
        let e = crate::symexpr::parse::parse_with_params("C*t", &COORDS, &["C"]).unwrap();
        assert_eq!(
            evaluate(&e, &at(1.0, 0.0, 0.0), &Constants::new()),
            Err(EvalError::Unbound("C".into()))
        );
        let mut c = Constants::new();
        c.insert("C".into(), 3.0);
        assert_eq!(evaluate(&e, &at(1.0, 0.0, 0.0), &c).unwrap(), 3.0);
    }
}
