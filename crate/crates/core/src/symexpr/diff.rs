use num::One;

use super::expr::{Expr, Func, Node, Rational};

impl Expr {
    /// Exact partial derivative with respect to the coordinate at `index`.
    pub fn diff(&self, index: usize) -> Expr {
        if !self.depends_on(index) {
            return Expr::zero();
        }
        match self.node() {
            Node::Const(_) | Node::Param(_) => Expr::zero(),
            Node::Coord(i, _) => {
                if *i as usize == index {
                    Expr::one()
                } else {
                    Expr::zero()
                }
            }
            Node::Sum(ts) => Expr::sum(ts.iter().map(|t| t.diff(index))),
            Node::Product(fs) => {
                let mut terms = Vec::new();
                for (i, f) in fs.iter().enumerate() {
                    let df = f.diff(index);
                    if df.is_zero() {
                        continue;
                    }
                    let others = fs.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, g)| g.clone());
                    terms.push(Expr::product(others.chain(std::iter::once(df))));
                }
                Expr::sum(terms)
            }
            Node::Pow(b, q) => {
                let db = b.diff(index);
                Expr::product([Expr::constant(*q), b.pow_rat(*q - Rational::one()), db])
            }
            Node::Quotient(a, b) => a.div(b).diff(index),
            Node::Neg(a) => a.diff(index).neg(),
            Node::Apply(f, a) => {
                let da = a.diff(index);
                let outer = match f {
                    Func::Exp => self.clone(),
                    Func::Sin => a.cos(),
                    Func::Cos => a.sin().neg(),
                    Func::Sinh => Expr::apply(Func::Cosh, a.clone()),
                    Func::Cosh => Expr::apply(Func::Sinh, a.clone()),
                    Func::Sqrt => a.pow_rat(Rational::new(-1, 2)).scale(Rational::new(1, 2)),
                    Func::Abs => a.div(self),
                };
                outer.mul(&da)
            }
        }
    }
}

/// Differentiates `e` with respect to the coordinate named `name`.
pub fn differentiate(e: &Expr, coordinates: &[&str], name: &str) -> Result<Expr, String> {
    match coordinates.iter().position(|c| *c == name) {
        Some(i) => Ok(e.diff(i)),
        None => Err(format!("unknown coordinate `{name}`; chart has {coordinates:?}")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symexpr::eval::{evaluate, Constants};
    use crate::symexpr::parse::{parse, parse_with_params};

    const COORDS: [&str; 5] = ["t", "x0", "x1", "x2", "x3"];

    #[test]
    fn chain_rule_on_exponential() {
        let e = parse("exp(2*t)", &COORDS).unwrap();
        assert_eq!(e.diff(0), parse("2*exp(2*t)", &COORDS).unwrap());
    }

    #[test]
    fn sine_factor_only() {
        let e = parse("exp(x2)*sin(x3)", &COORDS).unwrap();
        assert_eq!(e.diff(4), parse("exp(x2)*cos(x3)", &COORDS).unwrap());
        assert!(e.diff(1).is_zero());
    }

    #[test]
    fn matches_central_difference_with_symbolic_constant() {
        let e = parse_with_params("r^2*c", &["r"], &["c"]).unwrap();
        let mut k = Constants::new();
        k.insert("c".into(), 0.7);
        let d = evaluate(&e.diff(0), &[1.3], &k).unwrap();
        let h = 1e-5;
        let fd = (evaluate(&e, &[1.3 + h], &k).unwrap() - evaluate(&e, &[1.3 - h], &k).unwrap()) / (2.0 * h);
        assert!((d - fd).abs() <= 1e-7 * d.abs());
    }

    #[test]
    fn unknown_coordinate_is_an_error() {
        let e = parse("x", &["x"]).unwrap();
        assert!(differentiate(&e, &["x"], "y").is_err());
        assert_eq!(differentiate(&e, &["x"], "x").unwrap(), Expr::one());
    }
}
