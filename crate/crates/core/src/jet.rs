//! Truncated multivariate Taylor series ("jets") about a point.
//!
//! A [`Jet`] in `n` variables of order `o` stores the Taylor coefficients of a
//! function up to total degree `o`. Arithmetic and composition with the
//! elementary functions are exact up to that degree, and partial derivatives
//! drop the order by one. Every numeric curvature, residual and mobility check
//! runs on jets, so derivatives are never approximated by differences.

use std::collections::HashMap;
use std::sync::Arc;

use crate::symexpr::{rational_to_f64, Constants, EvalError, Expr, Func, Node, Rational};

/// Monomial tables for jets in `nvars` variables up to `degree`.
pub struct JetSpace {
    nvars: usize,
    degree: usize,
    exponents: Vec<Vec<u8>>,
    /// `counts[o]` is the number of monomials of total degree at most `o`.
    counts: Vec<usize>,
    /// (a, b, c) with x^a * x^b = x^c, sorted by the degree of c.
    pairs: Vec<(u32, u32, u32)>,
    pair_counts: Vec<usize>,
    /// `derivs[i][m]` = (index of m + e_i, exponent of x_i in m + e_i).
    derivs: Vec<Vec<(u32, f64)>>,
}

impl JetSpace {
    pub fn new(nvars: usize, degree: usize) -> Arc<JetSpace> {
        let mut exponents: Vec<Vec<u8>> = vec![vec![0; nvars]];
        let mut counts = vec![1];
        let mut layer: Vec<Vec<u8>> = vec![vec![0; nvars]];
        for _ in 1..=degree {
            // Extend each monomial by one variable at or after its last used one.
            let mut next = Vec::new();
            for m in &layer {
                let last = m.iter().rposition(|&e| e > 0).unwrap_or(0);
                for i in last..nvars {
                    let mut m2 = m.clone();
                    m2[i] += 1;
                    next.push(m2);
                }
            }
            exponents.extend(next.iter().cloned());
            counts.push(exponents.len());
            layer = next;
        }
        let index: HashMap<Vec<u8>, u32> = exponents
            .iter()
            .enumerate()
            .map(|(k, m)| (m.clone(), k as u32))
            .collect();
        let deg = |m: &[u8]| m.iter().map(|&e| e as usize).sum::<usize>();

        let mut pairs = Vec::new();
        let mut sum = vec![0u8; nvars];
        for (a, ma) in exponents.iter().enumerate() {
            let da = deg(ma);
            for (b, mb) in exponents[..counts[degree - da]].iter().enumerate() {
                for k in 0..nvars {
                    sum[k] = ma[k] + mb[k];
                }
                pairs.push((a as u32, b as u32, index[&sum]));
            }
        }
        pairs.sort_by_key(|&(_, _, c)| c);
        let mut pair_counts = vec![0; degree + 1];
        for o in 0..=degree {
            pair_counts[o] = pairs.partition_point(|&(_, _, c)| (c as usize) < counts[o]);
        }

        let mut derivs = vec![Vec::new(); nvars];
        let lower = if degree == 0 { 0 } else { counts[degree - 1] };
        for (i, d) in derivs.iter_mut().enumerate() {
            for m in &exponents[..lower] {
                let mut up = m.clone();
                up[i] += 1;
                d.push((index[&up], up[i] as f64));
            }
        }
        Arc::new(JetSpace {
            nvars,
            degree,
            exponents,
            counts,
            pairs,
            pair_counts,
            derivs,
        })
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Number of coefficients of a jet of order `o`.
    pub fn len(&self, order: usize) -> usize {
        self.counts[order]
    }

    pub fn exponents(&self, k: usize) -> &[u8] {
        &self.exponents[k]
    }
}

#[derive(Clone)]
pub struct Jet {
    space: Arc<JetSpace>,
    order: usize,
    c: Vec<f64>,
}

impl std::fmt::Debug for Jet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Jet(order {}, {:?})", self.order, self.c)
    }
}

impl Jet {
    pub fn constant(space: &Arc<JetSpace>, value: f64, order: usize) -> Jet {
        let mut c = vec![0.0; space.len(order)];
        c[0] = value;
        Jet {
            space: space.clone(),
            order,
            c,
        }
    }

    /// The coordinate function `x_i` expanded about `x_i = at`.
    pub fn variable(space: &Arc<JetSpace>, i: usize, at: f64, order: usize) -> Jet {
        let mut j = Jet::constant(space, at, order);
        if order >= 1 {
            j.c[1 + i] = 1.0;
        }
        j
    }

    pub fn space(&self) -> &Arc<JetSpace> {
        &self.space
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.c
    }

    /// First partial derivative at the expansion point.
    pub fn gradient(&self, i: usize) -> f64 {
        if self.order == 0 {
            return f64::NAN;
        }
        self.c[1 + i]
    }

    /// Truncates to a lower order.
    pub fn truncate(&self, order: usize) -> Jet {
        if order >= self.order {
            return self.clone();
        }
        Jet {
            space: self.space.clone(),
            order,
            c: self.c[..self.space.len(order)].to_vec(),
        }
    }

    fn is_constant(&self) -> bool {
        self.c[1..].iter().all(|&x| x == 0.0)
    }

    pub fn is_exact_zero(&self) -> bool {
        self.c.iter().all(|&x| x == 0.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.c.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn add(&self, o: &Jet) -> Jet {
        let order = self.order.min(o.order);
        let n = self.space.len(order);
        let c = self.c[..n].iter().zip(&o.c[..n]).map(|(a, b)| a + b).collect();
        Jet {
            space: self.space.clone(),
            order,
            c,
        }
    }

    pub fn sub(&self, o: &Jet) -> Jet {
        let order = self.order.min(o.order);
        let n = self.space.len(order);
        let c = self.c[..n].iter().zip(&o.c[..n]).map(|(a, b)| a - b).collect();
        Jet {
            space: self.space.clone(),
            order,
            c,
        }
    }

    /// `self += k * o`, truncating to the smaller order.
    pub fn axpy(&mut self, k: f64, o: &Jet) {
        if o.order < self.order {
            self.order = o.order;
            self.c.truncate(self.space.len(o.order));
        }
        for (a, b) in self.c.iter_mut().zip(&o.c) {
            *a += k * b;
        }
    }

    pub fn scale(&self, k: f64) -> Jet {
        Jet {
            space: self.space.clone(),
            order: self.order,
            c: self.c.iter().map(|x| k * x).collect(),
        }
    }

    pub fn neg(&self) -> Jet {
        self.scale(-1.0)
    }

    pub fn mul(&self, o: &Jet) -> Jet {
        let order = self.order.min(o.order);
        if o.is_constant() {
            return self.truncate(order).scale(o.c[0]);
        }
        if self.is_constant() {
            return o.truncate(order).scale(self.c[0]);
        }
        let mut c = vec![0.0; self.space.len(order)];
        let (x, y) = (&self.c, &o.c);
        for &(a, b, r) in &self.space.pairs[..self.space.pair_counts[order]] {
            c[r as usize] += x[a as usize] * y[b as usize];
        }
        Jet {
            space: self.space.clone(),
            order,
            c,
        }
    }

    /// `self += a * b`.
    pub fn add_product(&mut self, a: &Jet, b: &Jet) {
        let order = self.order.min(a.order).min(b.order);
        if order < self.order {
            self.order = order;
            self.c.truncate(self.space.len(order));
        }
        if b.is_constant() {
            let k = b.c[0];
            for (t, s) in self.c.iter_mut().zip(&a.c) {
                *t += k * s;
            }
            return;
        }
        if a.is_constant() {
            let k = a.c[0];
            for (t, s) in self.c.iter_mut().zip(&b.c) {
                *t += k * s;
            }
            return;
        }
        for &(i, j, r) in &self.space.pairs[..self.space.pair_counts[order]] {
            self.c[r as usize] += a.c[i as usize] * b.c[j as usize];
        }
    }

    /// Partial derivative in variable `i`; the order drops by one.
    pub fn partial(&self, i: usize) -> Jet {
        assert!(self.order >= 1, "cannot differentiate an order-0 jet");
        let order = self.order - 1;
        let n = self.space.len(order);
        let table = &self.space.derivs[i];
        let c = (0..n)
            .map(|m| {
                let (src, k) = table[m];
                k * self.c[src as usize]
            })
            .collect();
        Jet {
            space: self.space.clone(),
            order,
            c,
        }
    }

    /// Composes with a univariate function given its Taylor coefficients
    /// `f^(k)(a0)/k!` at the constant term `a0`.
    fn compose(&self, taylor: &[f64]) -> Jet {
        let mut h = self.clone();
        h.c[0] = 0.0;
        let mut out = Jet::constant(&self.space, taylor[self.order], self.order);
        for k in (0..self.order).rev() {
            out = out.mul(&h);
            out.c[0] += taylor[k];
        }
        out
    }

    pub fn exp(&self) -> Jet {
        let e = self.c[0].exp();
        let mut t = vec![e; self.order + 1];
        for k in 1..=self.order {
            t[k] = t[k - 1] / k as f64;
        }
        self.compose(&t)
    }

    fn trig(&self, phase: f64, hyperbolic: bool) -> Jet {
        let a = self.c[0];
        let mut fact = 1.0;
        let t: Vec<f64> = (0..=self.order)
            .map(|k| {
                if k > 0 {
                    fact *= k as f64;
                }
                let v = if hyperbolic {
                    // phase 0 -> sinh, 1 -> cosh; derivatives alternate.
                    if (k + phase as usize).is_multiple_of(2) {
                        a.sinh()
                    } else {
                        a.cosh()
                    }
                } else {
                    (a + phase + k as f64 * std::f64::consts::FRAC_PI_2).sin()
                };
                v / fact
            })
            .collect();
        self.compose(&t)
    }

    pub fn sin(&self) -> Jet {
        self.trig(0.0, false)
    }

    pub fn cos(&self) -> Jet {
        self.trig(std::f64::consts::FRAC_PI_2, false)
    }

    pub fn sinh(&self) -> Jet {
        self.trig(0.0, true)
    }

    pub fn cosh(&self) -> Jet {
        self.trig(1.0, true)
    }

    /// Real power; `None` outside the real domain.
    pub fn powf(&self, q: f64) -> Option<Jet> {
        let a = self.c[0];
        let integer = q == q.trunc();
        if integer && (0.0..=8.0).contains(&q) {
            let mut out = Jet::constant(&self.space, 1.0, self.order);
            for _ in 0..q as usize {
                out = out.mul(self);
            }
            return Some(out);
        }
        if a == 0.0 || (a < 0.0 && !integer) {
            return None;
        }
        let mut t = vec![0.0; self.order + 1];
        let mut binom = 1.0;
        for (k, tk) in t.iter_mut().enumerate() {
            *tk = binom * a.powf(q - k as f64);
            binom *= (q - k as f64) / (k as f64 + 1.0);
        }
        Some(self.compose(&t))
    }

    pub fn recip(&self) -> Option<Jet> {
        self.powf(-1.0)
    }

    pub fn abs(&self) -> Option<Jet> {
        let a = self.c[0];
        if a == 0.0 && !self.is_constant() {
            return None;
        }
        Some(if a < 0.0 { self.neg() } else { self.clone() })
    }
}

/// Coordinate jets `x_i = point_i + e_i` of the given order.
pub fn coordinate_jets(space: &Arc<JetSpace>, point: &[f64], order: usize) -> Vec<Jet> {
    point
        .iter()
        .enumerate()
        .map(|(i, &x)| Jet::variable(space, i, x, order))
        .collect()
}

/// Expands an expression as a jet, given jets for the chart coordinates.
pub struct JetEvaluator<'a> {
    coords: &'a [Jet],
    constants: &'a Constants,
    cache: HashMap<usize, Jet>,
}

impl<'a> JetEvaluator<'a> {
    pub fn new(coords: &'a [Jet], constants: &'a Constants) -> Self {
        JetEvaluator {
            coords,
            constants,
            cache: HashMap::new(),
        }
    }

    pub fn eval(&mut self, e: &Expr) -> Result<Jet, EvalError> {
        let key = e.id();
        if let Some(j) = self.cache.get(&key) {
            return Ok(j.clone());
        }
        let proto = &self.coords[0];
        let space = proto.space().clone();
        let order = self.coords.iter().map(Jet::order).min().unwrap_or(0);
        let out = match e.node() {
            Node::Const(c) => Jet::constant(&space, rational_to_f64(c), order),
            Node::Coord(i, name) => self
                .coords
                .get(*i as usize)
                .cloned()
                .ok_or_else(|| EvalError::Unbound(name.to_string()))?,
            Node::Param(name) => {
                let v = *self
                    .constants
                    .get(&**name)
                    .ok_or_else(|| EvalError::Unbound(name.to_string()))?;
                Jet::constant(&space, v, order)
            }
            Node::Sum(ts) => {
                let mut acc = Jet::constant(&space, 0.0, order);
                for t in ts {
                    let j = self.eval(t)?;
                    acc.axpy(1.0, &j);
                }
                acc
            }
            Node::Product(fs) => {
                let mut acc = self.eval(&fs[0])?;
                for f in &fs[1..] {
                    acc = acc.mul(&self.eval(f)?);
                }
                acc
            }
            Node::Pow(b, q) => {
                let base = self.eval(b)?;
                pow_rational(&base, q).ok_or_else(|| domain(e, base.value(), q))?
            }
            Node::Quotient(a, b) => {
                let num = self.eval(a)?;
                let den = self.eval(b)?;
                let inv = den.recip().ok_or_else(|| EvalError::Domain {
                    expr: e.to_string(),
                    reason: "division by zero".into(),
                })?;
                num.mul(&inv)
            }
            Node::Neg(a) => self.eval(a)?.neg(),
            Node::Apply(f, a) => {
                let x = self.eval(a)?;
                match f {
                    Func::Exp => x.exp(),
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Sinh => x.sinh(),
                    Func::Cosh => x.cosh(),
                    Func::Sqrt => x.powf(0.5).ok_or_else(|| EvalError::Domain {
                        expr: e.to_string(),
                        reason: "square root at or below zero".into(),
                    })?,
                    Func::Abs => x.abs().ok_or_else(|| EvalError::Domain {
                        expr: e.to_string(),
                        reason: "abs is not differentiable at zero".into(),
                    })?,
                }
            }
        };
        if !out.value().is_finite() {
            return Err(EvalError::Domain {
                expr: e.to_string(),
                reason: "non-finite value".into(),
            });
        }
        self.cache.insert(key, out.clone());
        Ok(out)
    }
}

fn pow_rational(base: &Jet, q: &Rational) -> Option<Jet> {
    if q.is_integer() && *q.numer() < 0 {
        let inv = base.recip()?;
        return inv.powf(-rational_to_f64(q));
    }
    base.powf(rational_to_f64(q))
}

fn domain(e: &Expr, base: f64, q: &Rational) -> EvalError {
    EvalError::Domain {
        expr: e.to_string(),
        reason: format!("power {q} of {base}"),
    }
}

/// Convenience: the jet of `e` about `point` with the given order.
pub fn expr_jet(
    e: &Expr,
    space: &Arc<JetSpace>,
    point: &[f64],
    order: usize,
    constants: &Constants,
) -> Result<Jet, EvalError> {
    let coords = coordinate_jets(space, point, order);
    JetEvaluator::new(&coords, constants).eval(e)
}
