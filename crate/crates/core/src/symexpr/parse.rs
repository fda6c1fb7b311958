//! Recursive-descent parser for the expression grammar.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := atom ('^' unary)?
//! atom    := number | ident | ident '(' expr ')' | '(' expr ')'
//! ```
//!
//! `^` binds tighter than unary minus, so `-x^2` is `-(x^2)`. Exponents must
//! reduce to rational constants.

use thiserror::Error;

use super::expr::{rational_from_f64, Expr, Func, Node, Rational};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier `{name}` at byte {offset}; admissible names: {admissible:?}")]
    UnknownIdentifier {
        name: String,
        offset: usize,
        admissible: Vec<String>,
    },
}

/// Parses `text` over the given coordinates; no named constants are allowed.
pub fn parse(text: &str, coordinates: &[&str]) -> Result<Expr, ParseError> {
    parse_with_params(text, coordinates, &[])
}

/// Parses `text` with coordinates and named constants in scope.
pub fn parse_with_params(text: &str, coordinates: &[&str], params: &[&str]) -> Result<Expr, ParseError> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        coordinates,
        params,
    };
    let raw = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(raw.normalize())
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    coordinates: &'a [&'a str],
    params: &'a [&'a str],
}

impl Parser<'_> {
    fn error(&self, message: &str) -> ParseError {
        ParseError::Syntax {
            offset: self.pos,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut terms = vec![self.term()?];
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    terms.push(self.term()?);
                }
                Some(b'-') => {
                    self.pos += 1;
                    let t = self.term()?;
                    terms.push(Expr::from_node(Node::Neg(t)));
                }
                _ => break,
            }
        }
        Ok(if terms.len() == 1 {
            terms.pop().unwrap()
        } else {
            Expr::from_node(Node::Sum(terms))
        })
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    let rhs = self.unary()?;
                    acc = Expr::from_node(Node::Product(vec![acc, rhs]));
                }
                Some(b'/') => {
                    self.pos += 1;
                    let rhs = self.unary()?;
                    acc = Expr::from_node(Node::Quotient(acc, rhs));
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            let inner = self.unary()?;
            return Ok(Expr::from_node(Node::Neg(inner)));
        }
        if self.peek() == Some(b'+') {
            self.pos += 1;
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let at = self.pos;
            let exponent = self.unary()?.normalize();
            let q: Rational = match exponent.as_const() {
                Some(q) => *q,
                None => {
                    return Err(ParseError::Syntax {
                        offset: at,
                        message: "exponent must be a rational constant".into(),
                    })
                }
            };
            return Ok(Expr::from_node(Node::Pow(base, q)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.error("expected `)`"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => self.identifier(),
            Some(_) => Err(self.error("unexpected character")),
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn number(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        while self.pos < self.src.len() && (self.src[self.pos].is_ascii_digit() || self.src[self.pos] == b'.') {
            self.pos += 1;
        }
        if self.pos < self.src.len() && (self.src[self.pos] == b'e' || self.src[self.pos] == b'E') {
            let save = self.pos;
            self.pos += 1;
            if self.pos < self.src.len() && (self.src[self.pos] == b'-' || self.src[self.pos] == b'+') {
                self.pos += 1;
            }
            let digits = self.pos;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if digits == self.pos {
                // `2e` is not an exponent; leave `e` for the identifier rule.
                self.pos = save;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        let value = exact_decimal(text).ok_or(ParseError::Syntax {
            offset: start,
            message: format!("malformed number `{text}`"),
        })?;
        Ok(Expr::constant(value))
    }

    fn identifier(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        while self.pos < self.src.len() && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_') {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        if let Some(i) = self.coordinates.iter().position(|c| *c == name) {
            return Ok(Expr::coord(i, name));
        }
        if self.params.contains(&name) {
            return Ok(Expr::param(name));
        }
        if let Some(func) = Func::from_name(name) {
            if self.peek() != Some(b'(') {
                return Err(self.error(&format!("expected `(` after `{name}`")));
            }
            self.pos += 1;
            let arg = self.expr()?;
            if self.peek() != Some(b')') {
                return Err(self.error("expected `)`"));
            }
            self.pos += 1;
            return Ok(Expr::from_node(Node::Apply(func, arg)));
        }
        let mut admissible: Vec<String> = self.coordinates.iter().map(|s| s.to_string()).collect();
        admissible.extend(self.params.iter().map(|s| s.to_string()));
        admissible.extend(Func::ALL.iter().map(|f| f.name().to_string()));
        Err(ParseError::UnknownIdentifier {
            name: name.to_string(),
            offset: start,
            admissible,
        })
    }
}

/// Exact rational value of a decimal literal such as `12.5e-3`.
fn exact_decimal(text: &str) -> Option<Rational> {
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(i) => (&text[..i], text[i + 1..].parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (int_part, frac_part) = match mantissa.find('.') {
        Some(i) => (&mantissa[..i], &mantissa[i + 1..]),
        None => (mantissa, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if frac_part.contains('.') {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let numer: i128 = digits.parse().ok()?;
    let scale = exponent - frac_part.len() as i32;
    if scale.abs() > 30 {
        return rational_from_f64(text.parse::<f64>().ok()?);
    }
    let ten = Rational::from_integer(10);
    let mut value = Rational::from_integer(numer);
    for _ in 0..scale.abs() {
        value = if scale > 0 { value * ten } else { value / ten };
    }
    Some(value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symexpr::expr::rat;

    const COORDS: [&str; 5] = ["t", "x0", "x1", "x2", "x3"];

    #[test]
    fn exponential_times_sine() {
        let e = parse("exp(2*t)*sin(x3)", &COORDS).unwrap();
        let t = Expr::coord(0, "t");
        let x3 = Expr::coord(4, "x3");
        let expect = t.scale(rat(2, 1)).exp().mul(&x3.sin());
        assert_eq!(e, expect);
        assert!(matches!(e.node(), Node::Product(fs) if fs.len() == 2));
    }

    #[test]
    fn zero_literal() {
        assert!(parse("0", &COORDS).unwrap().is_zero());
        assert!(parse("0", &[]).unwrap().is_zero());
    }

    #[test]
    fn double_negation_folds() {
        let e = parse("r^2*(1 - -1)", &["r"]).unwrap();
        let r = Expr::coord(0, "r");
        assert_eq!(e, r.powi(2).scale(rat(2, 1)));
    }

    #[test]
    fn power_binds_tighter_than_unary_minus() {
        let e = parse("-x^2", &["x"]).unwrap();
        let x = Expr::coord(0, "x");
        assert_eq!(e, x.powi(2).neg());
    }

    #[test]
    fn division_is_left_associative() {
        let e = parse("8/2/2", &[]).unwrap();
        assert_eq!(e, Expr::int(2));
        let e = parse("2*x/4", &["x"]).unwrap();
        assert_eq!(e, Expr::coord(0, "x").scale(rat(1, 2)));
    }

    #[test]
    fn decimal_literals_are_exact() {
        assert_eq!(parse("0.25", &[]).unwrap(), Expr::constant(rat(1, 4)));
        assert_eq!(parse("1.5e-1", &[]).unwrap(), Expr::constant(rat(3, 20)));
    }

    #[test]
    fn syntax_errors_carry_offsets() {
        match parse("x + * y", &["x", "y"]) {
            Err(ParseError::Syntax { offset, .. }) => assert_eq!(offset, 4),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse("(x", &["x"]), Err(ParseError::Syntax { .. })));
        assert!(matches!(
            parse("x^y", &["x", "y"]),
            Err(ParseError::Syntax { offset: 2, .. })
        ));
    }

    #[test]
    fn unknown_identifier_lists_names() {
        match parse("z + 1", &["x", "y"]) {
            Err(ParseError::UnknownIdentifier {
                name,
                offset,
                admissible,
            }) => {
                assert_eq!(name, "z");
                assert_eq!(offset, 0);
                assert!(admissible.contains(&"x".to_string()));
                assert!(admissible.contains(&"exp".to_string()));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn named_constants() {
        let e = parse_with_params("C*x^2/2", &["x"], &["C"]).unwrap();
        let mut ps = vec![];
        e.params(&mut ps);
        assert_eq!(ps, vec!["C".to_string()]);
    }
}
