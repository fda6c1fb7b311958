use std::fmt;

use num::{One, Signed};

use super::expr::{Expr, Node, Rational};

// Binding strength of the printed form.
const SUM: u8 = 0;
const PRODUCT: u8 = 1;
const POWER: u8 = 2;
const ATOM: u8 = 3;

fn precedence(e: &Expr) -> u8 {
    match e.node() {
        Node::Sum(_) => SUM,
        Node::Product(_) | Node::Quotient(..) | Node::Neg(_) => PRODUCT,
        Node::Pow(..) => POWER,
        Node::Const(c) => {
            if c.is_negative() {
                PRODUCT
            } else if c.is_integer() {
                ATOM
            } else {
                PRODUCT
            }
        }
        _ => ATOM,
    }
}

fn write_rational(f: &mut fmt::Formatter<'_>, c: &Rational) -> fmt::Result {
    if c.is_integer() {
        write!(f, "{}", c.numer())
    } else {
        write!(f, "{}/{}", c.numer(), c.denom())
    }
}

fn write_at(f: &mut fmt::Formatter<'_>, e: &Expr, min: u8) -> fmt::Result {
    if precedence(e) < min {
        write!(f, "(")?;
        write_expr(f, e)?;
        write!(f, ")")
    } else {
        write_expr(f, e)
    }
}

fn write_expr(f: &mut fmt::Formatter<'_>, e: &Expr) -> fmt::Result {
    match e.node() {
        Node::Const(c) => write_rational(f, c),
        Node::Coord(_, name) | Node::Param(name) => write!(f, "{name}"),
        Node::Sum(terms) => {
            for (i, t) in terms.iter().enumerate() {
                let (coef, mono) = t.split_coefficient();
                if i == 0 {
                    write_at(f, t, SUM)?;
                } else if coef.is_negative() {
                    write!(f, " - ")?;
                    let positive = Expr::product([Expr::constant(-coef), mono]);
                    write_at(f, &positive, PRODUCT)?;
                } else {
                    write!(f, " + ")?;
                    write_at(f, t, PRODUCT)?;
                }
            }
            Ok(())
        }
        Node::Product(fs) => {
            let mut rest: &[Expr] = fs;
            if let Node::Const(c) = fs[0].node() {
                rest = &fs[1..];
                if *c == -Rational::one() {
                    write!(f, "-")?;
                } else if c.is_integer() && !c.is_negative() {
                    write_rational(f, c)?;
                    write!(f, "*")?;
                } else {
                    write!(f, "(")?;
                    write_rational(f, c)?;
                    write!(f, ")*")?;
                }
            }
            for (i, x) in rest.iter().enumerate() {
                if i > 0 {
                    write!(f, "*")?;
                }
                write_at(f, x, POWER)?;
            }
            Ok(())
        }
        Node::Pow(b, q) => {
            write_at(f, b, ATOM)?;
            if q.is_integer() && q.is_positive() {
                write!(f, "^{}", q.numer())
            } else {
                write!(f, "^(")?;
                write_rational(f, q)?;
                write!(f, ")")
            }
        }
        Node::Quotient(a, b) => {
            write_at(f, a, PRODUCT)?;
            write!(f, "/")?;
            write_at(f, b, POWER)
        }
        Node::Neg(a) => {
            write!(f, "-")?;
            write_at(f, a, POWER)
        }
        Node::Apply(func, a) => {
            write!(f, "{}(", func.name())?;
            write_expr(f, a)?;
            write!(f, ")")
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(f, self)
    }
}
