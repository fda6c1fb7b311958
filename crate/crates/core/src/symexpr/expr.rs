use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num::rational::Ratio;
use num::{CheckedMul, One, Signed, ToPrimitive, Zero};

/// Exact rational used for constants and exponents.
pub type Rational = Ratio<i128>;

/// Cap on the number of terms produced when a product of sums is expanded.
const EXPAND_LIMIT: usize = 512;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Func {
    Exp,
    Sin,
    Cos,
    Sinh,
    Cosh,
    Sqrt,
    Abs,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "exp" => Func::Exp,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "sinh" => Func::Sinh,
            "cosh" => Func::Cosh,
            "sqrt" => Func::Sqrt,
            "abs" => Func::Abs,
            _ => return None,
        })
    }

    pub const ALL: [Func; 7] = [
        Func::Exp,
        Func::Sin,
        Func::Cos,
        Func::Sinh,
        Func::Cosh,
        Func::Sqrt,
        Func::Abs,
    ];
}

/// Node kinds. `Quotient` and `Neg` only occur in raw (unnormalized) trees;
/// normalized trees express them through products and rational powers.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Node {
    Const(Rational),
    /// Chart coordinate: position in the chart's coordinate list plus its name.
    Coord(u32, Arc<str>),
    /// Named constant, bound only at evaluation time.
    Param(Arc<str>),
    Sum(Vec<Expr>),
    Product(Vec<Expr>),
    Pow(Expr, Rational),
    Quotient(Expr, Expr),
    Neg(Expr),
    Apply(Func, Expr),
}

/// Immutable, cheaply clonable scalar expression.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Expr(Arc<Node>);

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Expr({self})")
    }
}

pub fn rat(n: i128, d: i128) -> Rational {
    Rational::new(n, d)
}

pub fn rational_from_f64(x: f64) -> Option<Rational> {
    if !x.is_finite() {
        return None;
    }
    if x == x.trunc() && x.abs() < 1e30 {
        return Some(Rational::from_integer(x as i128));
    }
    // Prefer short decimal representations (0.1 -> 1/10) over exact binary ones.
    for digits in 1..=12u32 {
        let scale = 10i128.pow(digits);
        let scaled = x * scale as f64;
        let rounded = scaled.round();
        if (scaled - rounded).abs() <= 1e-9 * scaled.abs().max(1.0) && rounded.abs() < 1e30 {
            return Some(Rational::new(rounded as i128, scale));
        }
    }
    Ratio::<i128>::approximate_float(x)
}

impl Expr {
    pub fn node(&self) -> &Node {
        &self.0
    }

    /// Address of the shared node; stable while the expression is alive.
    pub(crate) fn id(&self) -> usize {
        Arc::as_ptr(&self.0) as usize
    }

    pub(crate) fn from_node(node: Node) -> Expr {
        Expr(Arc::new(node))
    }

    pub fn constant(c: Rational) -> Expr {
        Expr::from_node(Node::Const(c))
    }

    pub fn int(n: i64) -> Expr {
        Expr::constant(Rational::from_integer(n as i128))
    }

    pub fn zero() -> Expr {
        Expr::int(0)
    }

    pub fn one() -> Expr {
        Expr::int(1)
    }

    /// Closest short rational to `x`; exact for decimal literals.
    pub fn real(x: f64) -> Expr {
        Expr::constant(rational_from_f64(x).expect("finite constant"))
    }

    pub fn coord(index: usize, name: &str) -> Expr {
        Expr::from_node(Node::Coord(index as u32, Arc::from(name)))
    }

    pub fn param(name: &str) -> Expr {
        Expr::from_node(Node::Param(Arc::from(name)))
    }

    pub fn as_const(&self) -> Option<&Rational> {
        match self.node() {
            Node::Const(c) => Some(c),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.node(), Node::Const(c) if c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        matches!(self.node(), Node::Const(c) if c.is_one())
    }

    /// Total node count of the tree (shared subtrees counted each time).
    pub fn node_count(&self) -> usize {
        1 + match self.node() {
            Node::Const(_) | Node::Coord(..) | Node::Param(_) => 0,
            Node::Sum(v) | Node::Product(v) => v.iter().map(Expr::node_count).sum(),
            Node::Pow(b, _) | Node::Neg(b) | Node::Apply(_, b) => b.node_count(),
            Node::Quotient(a, b) => a.node_count() + b.node_count(),
        }
    }

    /// Largest coordinate index referenced, if any.
    pub fn max_coord(&self) -> Option<usize> {
        match self.node() {
            Node::Coord(i, _) => Some(*i as usize),
            Node::Const(_) | Node::Param(_) => None,
            Node::Sum(v) | Node::Product(v) => v.iter().filter_map(Expr::max_coord).max(),
            Node::Pow(b, _) | Node::Neg(b) | Node::Apply(_, b) => b.max_coord(),
            Node::Quotient(a, b) => a.max_coord().max(b.max_coord()),
        }
    }

    pub fn depends_on(&self, index: usize) -> bool {
        match self.node() {
            Node::Coord(i, _) => *i as usize == index,
            Node::Const(_) | Node::Param(_) => false,
            Node::Sum(v) | Node::Product(v) => v.iter().any(|e| e.depends_on(index)),
            Node::Pow(b, _) | Node::Neg(b) | Node::Apply(_, b) => b.depends_on(index),
            Node::Quotient(a, b) => a.depends_on(index) || b.depends_on(index),
        }
    }

    pub fn params(&self, out: &mut Vec<String>) {
        match self.node() {
            Node::Param(p) => {
                if !out.iter().any(|q| q == &**p) {
                    out.push(p.to_string());
                }
            }
            Node::Const(_) | Node::Coord(..) => {}
            Node::Sum(v) | Node::Product(v) => v.iter().for_each(|e| e.params(out)),
            Node::Pow(b, _) | Node::Neg(b) | Node::Apply(_, b) => b.params(out),
            Node::Quotient(a, b) => {
                a.params(out);
                b.params(out);
            }
        }
    }

    /// Rebuilds the tree with smart constructors; idempotent on normalized trees.
    pub fn normalize(&self) -> Expr {
        match self.node() {
            Node::Const(_) | Node::Coord(..) | Node::Param(_) => self.clone(),
            Node::Sum(v) => Expr::sum(v.iter().map(Expr::normalize)),
            Node::Product(v) => Expr::product(v.iter().map(Expr::normalize)),
            Node::Pow(b, q) => b.normalize().pow_rat(*q),
            Node::Quotient(a, b) => a.normalize().div(&b.normalize()),
            Node::Neg(a) => a.normalize().neg(),
            Node::Apply(f, a) => Expr::apply(*f, a.normalize()),
        }
    }

    /// Maps every coordinate through `f` (used when charts are combined).
    pub fn map_coords(&self, f: &dyn Fn(usize, &str) -> Expr) -> Expr {
        match self.node() {
            Node::Coord(i, name) => f(*i as usize, name),
            Node::Const(_) | Node::Param(_) => self.clone(),
            Node::Sum(v) => Expr::sum(v.iter().map(|e| e.map_coords(f))),
            Node::Product(v) => Expr::product(v.iter().map(|e| e.map_coords(f))),
            Node::Pow(b, q) => b.map_coords(f).pow_rat(*q),
            Node::Quotient(a, b) => a.map_coords(f).div(&b.map_coords(f)),
            Node::Neg(a) => a.map_coords(f).neg(),
            Node::Apply(func, a) => Expr::apply(*func, a.map_coords(f)),
        }
    }

    /// Substitutes named constants.
    pub fn substitute_param(&self, name: &str, value: &Expr) -> Expr {
        match self.node() {
            Node::Param(p) if &**p == name => value.clone(),
            Node::Const(_) | Node::Coord(..) | Node::Param(_) => self.clone(),
            Node::Sum(v) => Expr::sum(v.iter().map(|e| e.substitute_param(name, value))),
            Node::Product(v) => Expr::product(v.iter().map(|e| e.substitute_param(name, value))),
            Node::Pow(b, q) => b.substitute_param(name, value).pow_rat(*q),
            Node::Quotient(a, b) => a.substitute_param(name, value).div(&b.substitute_param(name, value)),
            Node::Neg(a) => a.substitute_param(name, value).neg(),
            Node::Apply(f, a) => Expr::apply(*f, a.substitute_param(name, value)),
        }
    }

    // ---- smart constructors -------------------------------------------------

    pub fn add(&self, other: &Expr) -> Expr {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        Expr::sum([self.clone(), other.clone()])
    }

    pub fn sub(&self, other: &Expr) -> Expr {
        if other.is_zero() {
            return self.clone();
        }
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Expr) -> Expr {
        if self.is_zero() || other.is_zero() {
            return Expr::zero();
        }
        if self.is_one() {
            return other.clone();
        }
        if other.is_one() {
            return self.clone();
        }
        Expr::product([self.clone(), other.clone()])
    }

    pub fn div(&self, other: &Expr) -> Expr {
        if other.is_one() {
            return self.clone();
        }
        self.mul(&other.pow_rat(-Rational::one()))
    }

    pub fn neg(&self) -> Expr {
        self.scale(-Rational::one())
    }

    pub fn scale(&self, c: Rational) -> Expr {
        if c.is_zero() || self.is_zero() {
            return Expr::zero();
        }
        if c.is_one() {
            return self.clone();
        }
        Expr::product([Expr::constant(c), self.clone()])
    }

    pub fn powi(&self, n: i64) -> Expr {
        self.pow_rat(Rational::from_integer(n as i128))
    }

    pub fn sqrt(&self) -> Expr {
        Expr::apply(Func::Sqrt, self.clone())
    }

    pub fn exp(&self) -> Expr {
        Expr::apply(Func::Exp, self.clone())
    }

    pub fn sin(&self) -> Expr {
        Expr::apply(Func::Sin, self.clone())
    }

    pub fn cos(&self) -> Expr {
        Expr::apply(Func::Cos, self.clone())
    }

    /// Normalized sum: flattens, merges like monomials, folds constants.
    pub fn sum<I: IntoIterator<Item = Expr>>(terms: I) -> Expr {
        let mut collected: BTreeMap<Expr, Rational> = BTreeMap::new();
        let mut constant = Rational::zero();
        fn push(e: Expr, k: Rational, acc: &mut BTreeMap<Expr, Rational>, c: &mut Rational) {
            match e.node() {
                Node::Const(v) => *c += *v * k,
                Node::Sum(ts) => {
                    for t in ts {
                        push(t.clone(), k, acc, c);
                    }
                }
                _ => {
                    let (coef, mono) = e.split_coefficient();
                    *acc.entry(mono).or_insert_with(Rational::zero) += coef * k;
                }
            }
        }
        for t in terms {
            push(t, Rational::one(), &mut collected, &mut constant);
        }
        let mut out: Vec<Expr> = Vec::with_capacity(collected.len() + 1);
        if !constant.is_zero() {
            out.push(Expr::constant(constant));
        }
        for (mono, c) in collected {
            if c.is_zero() {
                continue;
            }
            out.push(Expr::with_coefficient(c, mono));
        }
        match out.len() {
            0 => Expr::zero(),
            1 => out.pop().unwrap(),
            _ => {
                out.sort();
                Expr::from_node(Node::Sum(out))
            }
        }
    }

    /// Splits `c * m` into its rational coefficient and monomial.
    pub(crate) fn split_coefficient(&self) -> (Rational, Expr) {
        match self.node() {
            Node::Const(c) => (*c, Expr::one()),
            Node::Product(fs) => match fs[0].node() {
                Node::Const(c) => {
                    let rest: Vec<Expr> = fs[1..].to_vec();
                    let mono = if rest.len() == 1 {
                        rest.into_iter().next().unwrap()
                    } else {
                        Expr::from_node(Node::Product(rest))
                    };
                    (*c, mono)
                }
                _ => (Rational::one(), self.clone()),
            },
            _ => (Rational::one(), self.clone()),
        }
    }

    fn with_coefficient(c: Rational, mono: Expr) -> Expr {
        if mono.is_one() {
            return Expr::constant(c);
        }
        if c.is_one() {
            return mono;
        }
        let mut fs = vec![Expr::constant(c)];
        match mono.node() {
            Node::Product(inner) => fs.extend(inner.iter().cloned()),
            _ => fs.push(mono),
        }
        Expr::from_node(Node::Product(fs))
    }

    /// Normalized product: flattens, merges powers of equal bases and
    /// exponentials, folds the rational coefficient and expands sums when small.
    pub fn product<I: IntoIterator<Item = Expr>>(factors: I) -> Expr {
        let mut coef = Rational::one();
        let mut powers: BTreeMap<Expr, Rational> = BTreeMap::new();
        let mut exp_args: Vec<Expr> = Vec::new();
        fn push(e: Expr, coef: &mut Rational, powers: &mut BTreeMap<Expr, Rational>, exp_args: &mut Vec<Expr>) {
            match e.node() {
                Node::Const(c) => *coef *= *c,
                Node::Product(fs) => {
                    for f in fs {
                        push(f.clone(), coef, powers, exp_args);
                    }
                }
                Node::Apply(Func::Exp, a) => exp_args.push(a.clone()),
                Node::Pow(b, q) => {
                    *powers.entry(b.clone()).or_insert_with(Rational::zero) += *q;
                }
                _ => {
                    *powers.entry(e.clone()).or_insert_with(Rational::zero) += Rational::one();
                }
            }
        }
        for f in factors {
            push(f, &mut coef, &mut powers, &mut exp_args);
        }
        if coef.is_zero() {
            return Expr::zero();
        }
        let mut out: Vec<Expr> = Vec::new();
        let mut sums: Vec<Expr> = Vec::new();
        for (base, q) in powers {
            if q.is_zero() {
                continue;
            }
            if let Node::Const(c) = base.node() {
                // Only non-foldable constant powers reach here.
                match fold_const_pow(*c, q) {
                    Some(v) => coef *= v,
                    None => out.push(Expr::from_node(Node::Pow(base.clone(), q))),
                }
                continue;
            }
            if q.is_one() {
                if matches!(base.node(), Node::Sum(_)) {
                    sums.push(base);
                } else {
                    out.push(base);
                }
            } else {
                out.push(Expr::from_node(Node::Pow(base, q)));
            }
        }
        if !exp_args.is_empty() {
            let arg = Expr::sum(exp_args);
            if !arg.is_zero() {
                out.push(Expr::from_node(Node::Apply(Func::Exp, arg)));
            }
        }
        if coef.is_zero() {
            return Expr::zero();
        }
        if !sums.is_empty() {
            let total: usize = sums
                .iter()
                .map(|s| match s.node() {
                    Node::Sum(ts) => ts.len(),
                    _ => 1,
                })
                .try_fold(1usize, |acc, n| acc.checked_mul(n))
                .unwrap_or(usize::MAX);
            if total <= EXPAND_LIMIT {
                // Distribute: (rest) * prod(sums).
                let mut partial: Vec<Expr> = vec![Expr::with_coefficient(coef, make_product(out))];
                for s in sums {
                    let Node::Sum(ts) = s.node() else { unreachable!() };
                    let mut next = Vec::with_capacity(partial.len() * ts.len());
                    for p in &partial {
                        for t in ts {
                            next.push(Expr::product([p.clone(), t.clone()]));
                        }
                    }
                    partial = next;
                }
                return Expr::sum(partial);
            }
            out.extend(sums);
        }
        Expr::with_coefficient(coef, make_product(out))
    }

    pub fn pow_rat(&self, q: Rational) -> Expr {
        if q.is_zero() {
            return Expr::one();
        }
        if q.is_one() {
            return self.clone();
        }
        match self.node() {
            Node::Const(c) => match fold_const_pow(*c, q) {
                Some(v) => Expr::constant(v),
                None => Expr::from_node(Node::Pow(self.clone(), q)),
            },
            Node::Product(fs) if q.is_integer() => Expr::product(fs.iter().map(|f| f.pow_rat(q))),
            Node::Product(fs) => {
                // A positive rational coefficient can be pulled out.
                if let Node::Const(c) = fs[0].node() {
                    if c.is_positive() {
                        let rest = make_product(fs[1..].to_vec());
                        return Expr::product([Expr::constant(*c).pow_rat(q), rest.pow_rat(q)]);
                    }
                }
                Expr::from_node(Node::Pow(self.clone(), q))
            }
            Node::Pow(b, a) if q.is_integer() => b.pow_rat(*a * q),
            Node::Apply(Func::Exp, a) => Expr::apply(Func::Exp, a.scale(q)),
            Node::Sum(ts) if q.is_integer() && q.is_positive() => {
                let k = q.to_integer() as usize;
                if k <= 4 && ts.len().pow(k as u32) <= EXPAND_LIMIT {
                    Expr::product(std::iter::repeat_n(self.clone(), k))
                } else {
                    Expr::from_node(Node::Pow(self.clone(), q))
                }
            }
            _ => Expr::from_node(Node::Pow(self.clone(), q)),
        }
    }

    pub fn apply(f: Func, arg: Expr) -> Expr {
        if f == Func::Sqrt {
            return arg.pow_rat(rat(1, 2));
        }
        if let Some(c) = arg.as_const() {
            if c.is_zero() {
                return match f {
                    Func::Exp | Func::Cos | Func::Cosh => Expr::one(),
                    _ => Expr::zero(),
                };
            }
            if f == Func::Abs {
                return Expr::constant(c.abs());
            }
        }
        if f == Func::Abs {
            if let Node::Apply(Func::Abs | Func::Exp | Func::Cosh, _) = arg.node() {
                return arg;
            }
        }
        Expr::from_node(Node::Apply(f, arg))
    }

    /// Rational exponent of a factor, treating non-powers as exponent one.
    pub fn as_pow(&self) -> (&Expr, Rational) {
        match self.node() {
            Node::Pow(b, q) => (b, *q),
            _ => (self, Rational::one()),
        }
    }
}

fn make_product(mut fs: Vec<Expr>) -> Expr {
    match fs.len() {
        0 => Expr::one(),
        1 => fs.pop().unwrap(),
        _ => {
            fs.sort();
            Expr::from_node(Node::Product(fs))
        }
    }
}

/// Exact value of c^q when it is rational.
fn fold_const_pow(c: Rational, q: Rational) -> Option<Rational> {
    if c.is_one() {
        return Some(Rational::one());
    }
    if q.is_integer() {
        let n = q.to_integer();
        if c.is_zero() {
            return if n > 0 { Some(Rational::zero()) } else { None };
        }
        if n.abs() > 64 {
            return None;
        }
        let base = if n < 0 { c.recip() } else { c };
        let mut acc = Rational::one();
        for _ in 0..n.abs() {
            acc = acc.checked_mul(&base)?;
        }
        return Some(acc);
    }
    if c.is_negative() || c.is_zero() {
        return None;
    }
    // Exact roots of perfect powers, e.g. 4^(1/2) = 2.
    let root = *q.denom();
    let num_root = int_root(*c.numer(), root)?;
    let den_root = int_root(*c.denom(), root)?;
    fold_const_pow(Rational::new(num_root, den_root), Rational::from_integer(*q.numer()))
}

fn int_root(x: i128, k: i128) -> Option<i128> {
    if k <= 0 || x < 0 {
        return None;
    }
    let guess = (x as f64).powf(1.0 / k as f64).round() as i128;
    for cand in [guess - 1, guess, guess + 1] {
        if cand >= 0 {
            let mut p: i128 = 1;
            let mut ok = true;
            for _ in 0..k {
                match p.checked_mul(cand) {
                    Some(v) => p = v,
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok && p == x {
                return Some(cand);
            }
        }
    }
    None
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN)
}

impl std::ops::Add for &Expr {
    type Output = Expr;
    fn add(self, rhs: &Expr) -> Expr {
        Expr::add(self, rhs)
    }
}

impl std::ops::Sub for &Expr {
    type Output = Expr;
    fn sub(self, rhs: &Expr) -> Expr {
        Expr::sub(self, rhs)
    }
}

impl std::ops::Mul for &Expr {
    type Output = Expr;
    fn mul(self, rhs: &Expr) -> Expr {
        Expr::mul(self, rhs)
    }
}

impl std::ops::Div for &Expr {
    type Output = Expr;
    fn div(self, rhs: &Expr) -> Expr {
        Expr::div(self, rhs)
    }
}

impl std::ops::Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::neg(self)
    }
}

impl std::ops::Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        Expr::add(&self, &rhs)
    }
}

impl std::ops::Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        Expr::sub(&self, &rhs)
    }
}

impl std::ops::Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        Expr::mul(&self, &rhs)
    }
}

impl std::ops::Div for Expr {
    type Output = Expr;
    fn div(self, rhs: Expr) -> Expr {
        Expr::div(&self, &rhs)
    }
}

impl std::ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::neg(&self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Expr {
        Expr::coord(0, "x")
    }

    fn y() -> Expr {
        Expr::coord(1, "y")
    }

    #[test]
    fn like_terms_cancel() {
        assert!((&x() - &x()).is_zero());
        let e = Expr::sum([x(), y(), x().neg(), y().scale(rat(-1, 1))]);
        assert!(e.is_zero());
    }

    #[test]
    fn exponentials_merge() {
        let t = Expr::coord(0, "t");
        let e = t.scale(rat(2, 1)).exp().mul(&t.scale(rat(-2, 1)).exp());
        assert!(e.is_one());
    }

    #[test]
    fn powers_merge_and_fold() {
        let e = x().powi(2).mul(&x().powi(-2));
        assert!(e.is_one());
        assert_eq!(Expr::int(4).sqrt(), Expr::int(2));
        assert_eq!(Expr::constant(rat(9, 4)).pow_rat(rat(-1, 2)), Expr::constant(rat(2, 3)));
    }

    #[test]
    fn small_products_of_sums_expand() {
        let e = (&x() + &y()).mul(&(&x() - &y()));
        let expect = &x().powi(2) - &y().powi(2);
        assert_eq!(e, expect);
    }

    #[test]
    fn decimal_constants_are_exact() {
        assert_eq!(rational_from_f64(0.1), Some(rat(1, 10)));
        assert_eq!(rational_from_f64(-2.5), Some(rat(-5, 2)));
    }
}
