use std::sync::Arc;

use nalgebra::{DMatrix, SymmetricEigen};

use super::chart::{Chart, Point};
use super::scalar::{christoffel, inverse_and_det, Mat};
use super::GeometryError;
use crate::jet::{coordinate_jets, Jet, JetEvaluator, JetSpace};
use crate::symexpr::{evaluate, is_zero, Expr, DEFAULT_TRIALS};

/// Node budget for the symbolic inverse; above it only numeric paths are used.
pub const SYMBOLIC_NODE_BUDGET: usize = 1_000_000;

/// A pseudo-Riemannian metric on a chart.
#[derive(Debug, Clone)]
pub struct MetricField {
    chart: Arc<Chart>,
    g: Mat<Expr>,
    inverse: Option<Mat<Expr>>,
    det: Option<Expr>,
}

/// Taylor data of a metric at one point.
pub struct LocalJets {
    pub space: Arc<JetSpace>,
    pub point: Vec<f64>,
    pub coords: Vec<Jet>,
    pub g: Mat<Jet>,
    pub ginv: Mat<Jet>,
    /// Γ^k_ij as `[k][i][j]`, one order lower than `g`.
    pub gamma: Vec<Mat<Jet>>,
}

impl MetricField {
    /// Builds a metric from its full symmetric component matrix.
    pub fn new(chart: Arc<Chart>, g: Mat<Expr>) -> Result<MetricField, GeometryError> {
        let n = chart.dim();
        if g.len() != n || g.iter().any(|row| row.len() != n) {
            return Err(GeometryError::Shape(format!(
                "metric must be {n}x{n} on chart `{}`",
                chart.name()
            )));
        }
        for i in 0..n {
            for j in 0..i {
                if g[i][j] != g[j][i] {
                    return Err(GeometryError::Shape(format!("g[{i}][{j}] and g[{j}][{i}] differ")));
                }
            }
        }
        let mut metric = MetricField {
            chart,
            g,
            inverse: None,
            det: None,
        };
        for p in metric.chart.sample_points(8, 1) {
            let m = metric.values_at(p.coords())?;
            let scale = m.amax().max(1e-300);
            let eig = SymmetricEigen::new(m.clone());
            let smallest = eig.eigenvalues.iter().fold(f64::INFINITY, |a, v| a.min(v.abs()));
            if smallest < 1e-10 * scale {
                return Err(GeometryError::Degenerate {
                    point: p.coords().to_vec(),
                    detail: format!("eigenvalue {smallest:e} against norm {scale:e}"),
                });
            }
        }
        metric.symbolic_inverse();
        Ok(metric)
    }

    /// Builds a metric from row-wise lower-triangle expression strings.
    pub fn from_lower_triangle(chart: Arc<Chart>, rows: &[Vec<&str>]) -> Result<MetricField, GeometryError> {
        let n = chart.dim();
        if rows.len() != n || rows.iter().enumerate().any(|(i, r)| r.len() != i + 1) {
            return Err(GeometryError::Shape(
                "lower triangle must have rows of length 1, 2, ..., n".into(),
            ));
        }
        let mut g = vec![vec![Expr::zero(); n]; n];
        for (i, row) in rows.iter().enumerate() {
            for (j, text) in row.iter().enumerate() {
                let e = chart.parse(text)?;
                g[i][j] = e.clone();
                g[j][i] = e;
            }
        }
        MetricField::new(chart, g)
    }

    pub fn diagonal(chart: Arc<Chart>, diag: Vec<Expr>) -> Result<MetricField, GeometryError> {
        let n = diag.len();
        let mut g = vec![vec![Expr::zero(); n]; n];
        for (i, d) in diag.into_iter().enumerate() {
            g[i][i] = d;
        }
        MetricField::new(chart, g)
    }

    fn symbolic_inverse(&mut self) {
        let center = self.chart.center();
        let constants = self.chart.constants().clone();
        let weight = |e: &Expr| -> Option<f64> {
            let v = evaluate(e, center.coords(), &constants).ok()?;
            if v.abs() < 1e-12 {
                None
            } else {
                Some(-(e.node_count() as f64))
            }
        };
        let Some((inv, det)) = inverse_and_det(&self.g, &weight) else {
            return;
        };
        let nodes: usize = inv.iter().flatten().map(Expr::node_count).sum();
        if nodes > SYMBOLIC_NODE_BUDGET {
            return;
        }
        // Accept the symbolic inverse only if g * ginv = I checks out numerically.
        let n = self.dim();
        for i in 0..n {
            for j in 0..n {
                let mut terms: Vec<Expr> = (0..n).map(|k| self.g[i][k].mul(&inv[k][j])).collect();
                if i == j {
                    terms.push(Expr::int(-1));
                }
                let e = Expr::sum(terms);
                match is_zero(&e, self.chart.sample_box(), &constants, 4, 11) {
                    Ok(z) if z.is_zero() => {}
                    _ => return,
                }
            }
        }
        self.inverse = Some(inv);
        self.det = Some(det);
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn components(&self) -> &Mat<Expr> {
        &self.g
    }

    pub fn component(&self, i: usize, j: usize) -> &Expr {
        &self.g[i][j]
    }

    /// Symbolic inverse g^{ij}, if it stayed within the node budget.
    pub fn inverse(&self) -> Option<&Mat<Expr>> {
        self.inverse.as_ref()
    }

    pub fn determinant(&self) -> Option<&Expr> {
        self.det.as_ref()
    }

    pub fn values_at(&self, p: &[f64]) -> Result<DMatrix<f64>, GeometryError> {
        let n = self.dim();
        let k = self.chart.constants();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = evaluate(&self.g[i][j], p, k)?;
            }
        }
        Ok(m)
    }

    /// Jets of g, g^{-1} and Γ at `p`; `degree` is the order of the g jets.
    pub fn jets(&self, p: &[f64], degree: usize) -> Result<LocalJets, GeometryError> {
        assert!(degree >= 1, "Christoffel symbols need first derivatives");
        let n = self.dim();
        let space = JetSpace::new(n, degree);
        let coords = coordinate_jets(&space, p, degree);
        let g = self.component_jets(&coords)?;
        let (ginv, _) = inverse_and_det(&g, &|j: &Jet| {
            let v = j.value().abs();
            (v > 1e-300).then_some(v)
        })
        .ok_or_else(|| GeometryError::Degenerate {
            point: p.to_vec(),
            detail: "metric matrix is singular".into(),
        })?;
        let gamma = christoffel(&g, &ginv);
        Ok(LocalJets {
            space,
            point: p.to_vec(),
            coords,
            g,
            ginv,
            gamma,
        })
    }

    /// Metric components as jets over the given coordinate jets.
    pub fn component_jets(&self, coords: &[Jet]) -> Result<Mat<Jet>, GeometryError> {
        let n = self.dim();
        let mut ev = JetEvaluator::new(coords, self.chart.constants());
        let mut g: Mat<Jet> = Vec::with_capacity(n);
        for i in 0..n {
            let mut row = Vec::with_capacity(n);
            for j in 0..n {
                row.push(ev.eval(&self.g[i][j])?);
            }
            g.push(row);
        }
        Ok(g)
    }

    /// Multiplies the metric by a rational constant.
    pub fn scaled(&self, c: f64) -> Result<MetricField, GeometryError> {
        let g = self
            .g
            .iter()
            .map(|row| row.iter().map(|e| super::scalar::Scalar::scale(e, c)).collect())
            .collect();
        MetricField::new(self.chart.clone(), g)
    }
}

/// Numbers of positive and negative eigenvalues of g(p).
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct Signature {
    pub plus: usize,
    pub minus: usize,
}

impl Signature {
    /// The counts as an unordered pair, smaller first.
    pub fn unordered(&self) -> (usize, usize) {
        (self.plus.min(self.minus), self.plus.max(self.minus))
    }
}

pub fn signature(g: &MetricField, p: &Point) -> Result<Signature, GeometryError> {
    signature_at(g, p.coords())
}

pub fn signature_at(g: &MetricField, p: &[f64]) -> Result<Signature, GeometryError> {
    let m = g.values_at(p)?;
    let norm = m.norm();
    let eig = SymmetricEigen::new(m);
    let mut s = Signature { plus: 0, minus: 0 };
    for &v in eig.eigenvalues.iter() {
        if v.abs() < 1e-10 * norm {
            return Err(GeometryError::Degenerate {
                point: p.to_vec(),
                detail: format!("eigenvalue {v:e} is numerically zero"),
            });
        }
        if v > 0.0 {
            s.plus += 1;
        } else {
            s.minus += 1;
        }
    }
    Ok(s)
}

/// Signature at the default trial points; errors if it varies.
pub fn signature_over_box(g: &MetricField) -> Result<Signature, GeometryError> {
    let pts = g.chart().sample_points(DEFAULT_TRIALS, 3);
    let first = signature(g, &pts[0])?;
    for p in &pts[1..] {
        let s = signature(g, p)?;
        if s != first {
            return Err(GeometryError::Chart(format!(
                "signature varies over the sample box: {first:?} vs {s:?} at {:?}",
                p.coords()
            )));
        }
    }
    Ok(first)
}
