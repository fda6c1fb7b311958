use std::collections::BTreeMap;
use std::sync::Arc;

use nalgebra::DMatrix;
use serde::Serialize;

use super::MobilityError;
use crate::geometry::scalar::{Mat, Scalar};
use crate::geometry::{is_einstein, Chart, Einstein, MetricField, TensorField};
use crate::jet::{coordinate_jets, Jet, JetEvaluator, JetSpace};
use crate::projective::SolutionTriple;
use crate::symexpr::Expr;

/// Row-sparse matrix: `rows[r]` lists `(column, entry)` with distinct columns.
pub type SparseMat<S> = Vec<Vec<(usize, S)>>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FiberKind {
    /// S²T* ⊕ T* ⊕ ℝ carrying (L, Λ, μ).
    Prolongation,
    SymmetricTwo,
    OneForm,
    Vector,
    /// User-supplied connection matrices.
    Explicit,
}

/// A vector bundle over a chart with connection matrices A_i; a section σ is
/// parallel iff ∂_i σ + A_i σ = 0.
#[derive(Debug, Clone)]
pub struct LinearConnectionBundle {
    chart: Arc<Chart>,
    kind: FiberKind,
    fiber_dim: usize,
    metric: Option<MetricField>,
    b: f64,
    explicit: Option<Vec<Mat<Expr>>>,
}

/// Index pairs (a, b) with a ≤ b, in the order used for S²T* fibers.
pub fn sym_pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|a| (a..n).map(move |b| (a, b))).collect()
}

pub fn sym_index(n: usize, a: usize, b: usize) -> usize {
    let (a, b) = if a <= b { (a, b) } else { (b, a) };
    a * n - a * (a + 1) / 2 + b
}

pub fn build_prolongation(g: &MetricField, b: f64) -> Result<LinearConnectionBundle, MobilityError> {
    match is_einstein(g)? {
        Einstein::Yes { b: computed, .. } => {
            if (computed - b).abs() > 1e-8 * (1.0 + b.abs()) {
                return Err(MobilityError::BMismatch { given: b, computed });
            }
        }
        Einstein::No { witness, .. } => return Err(MobilityError::NotEinstein { witness }),
    }
    Ok(LinearConnectionBundle::metric_bundle(g, FiberKind::Prolongation, b))
}

pub fn symmetric_two_bundle(g: &MetricField) -> LinearConnectionBundle {
    LinearConnectionBundle::metric_bundle(g, FiberKind::SymmetricTwo, 0.0)
}

pub fn one_form_bundle(g: &MetricField) -> LinearConnectionBundle {
    LinearConnectionBundle::metric_bundle(g, FiberKind::OneForm, 0.0)
}

pub fn vector_bundle(g: &MetricField) -> LinearConnectionBundle {
    LinearConnectionBundle::metric_bundle(g, FiberKind::Vector, 0.0)
}

/// A bundle given directly by its connection matrices (one N×N per coordinate).
pub fn explicit_bundle(chart: Arc<Chart>, a: Vec<Mat<Expr>>) -> Result<LinearConnectionBundle, MobilityError> {
    let n = chart.dim();
    let big_n = a.first().map_or(0, Vec::len);
    if a.len() != n || big_n == 0 || a.iter().any(|m| m.len() != big_n || m.iter().any(|r| r.len() != big_n)) {
        return Err(MobilityError::Invalid(format!(
            "need {n} square matrices of equal size"
        )));
    }
    Ok(LinearConnectionBundle {
        chart,
        kind: FiberKind::Explicit,
        fiber_dim: big_n,
        metric: None,
        b: 0.0,
        explicit: Some(a),
    })
}

impl LinearConnectionBundle {
    fn metric_bundle(g: &MetricField, kind: FiberKind, b: f64) -> Self {
        let n = g.dim();
        let fiber_dim = match kind {
            FiberKind::Prolongation => n * (n + 1) / 2 + n + 1,
            FiberKind::SymmetricTwo => n * (n + 1) / 2,
            FiberKind::OneForm | FiberKind::Vector => n,
            FiberKind::Explicit => unreachable!(),
        };
        LinearConnectionBundle {
            chart: g.chart().clone(),
            kind,
            fiber_dim,
            metric: Some(g.clone()),
            b,
            explicit: None,
        }
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn kind(&self) -> FiberKind {
        self.kind
    }

    pub fn fiber_dim(&self) -> usize {
        self.fiber_dim
    }

    pub fn metric(&self) -> Option<&MetricField> {
        self.metric.as_ref()
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// A_i as sparse jets of the given order at `p`.
    pub fn connection_jets(&self, p: &[f64], order: usize) -> Result<Vec<SparseMat<Jet>>, MobilityError> {
        if let Some(mats) = &self.explicit {
            let space = JetSpace::new(self.chart.dim(), order);
            let coords = coordinate_jets(&space, p, order);
            let mut ev = JetEvaluator::new(&coords, self.chart.constants());
            let mut out = Vec::with_capacity(mats.len());
            for m in mats {
                let mut rows = Vec::with_capacity(m.len());
                for row in m {
                    let mut r = Vec::new();
                    for (c, e) in row.iter().enumerate() {
                        if !e.is_zero() {
                            let j = ev.eval(e)?;
                            if !j.is_exact_zero() {
                                r.push((c, j));
                            }
                        }
                    }
                    rows.push(r);
                }
                out.push(rows);
            }
            return Ok(out);
        }
        let g = self.metric.as_ref().expect("metric bundle");
        let local = g.jets(p, order + 1)?;
        Ok(assemble(self.kind, g.dim(), &local.g, &local.gamma, self.b))
    }

    /// Numeric A_i(p).
    pub fn connection_values(&self, p: &[f64]) -> Result<Vec<DMatrix<f64>>, MobilityError> {
        let jets = self.connection_jets(p, 0)?;
        Ok(jets
            .iter()
            .map(|m| {
                let mut d = DMatrix::zeros(self.fiber_dim, self.fiber_dim);
                for (r, row) in m.iter().enumerate() {
                    for (c, j) in row {
                        d[(r, *c)] = j.value();
                    }
                }
                d
            })
            .collect())
    }

    /// Symbolic A_i.
    pub fn connection_matrices(&self) -> Result<Vec<Mat<Expr>>, MobilityError> {
        if let Some(m) = &self.explicit {
            return Ok(m.clone());
        }
        let g = self.metric.as_ref().expect("metric bundle");
        let gamma = crate::geometry::christoffels(g)?;
        let sparse = assemble(self.kind, g.dim(), g.components(), &gamma, self.b);
        Ok(sparse
            .into_iter()
            .map(|m| {
                m.into_iter()
                    .map(|row| {
                        let mut dense = vec![Expr::zero(); self.fiber_dim];
                        for (c, e) in row {
                            dense[c] = e;
                        }
                        dense
                    })
                    .collect()
            })
            .collect())
    }

    /// Largest |∂_i σ + A_i σ| over seeded sample points.
    pub fn section_residual(&self, section: &[Expr], points: usize, seed: u64) -> Result<f64, MobilityError> {
        if section.len() != self.fiber_dim {
            return Err(MobilityError::Invalid(format!(
                "section has {} components, fiber dimension is {}",
                section.len(),
                self.fiber_dim
            )));
        }
        let n = self.chart.dim();
        let mut worst: f64 = 0.0;
        for p in self.chart.sample_points(points, seed) {
            let a = self.connection_jets(p.coords(), 0)?;
            let space = JetSpace::new(n, 1);
            let coords = coordinate_jets(&space, p.coords(), 1);
            let mut ev = JetEvaluator::new(&coords, self.chart.constants());
            let s: Vec<Jet> = section.iter().map(|e| ev.eval(e)).collect::<Result<_, _>>()?;
            for (i, ai) in a.iter().enumerate() {
                for (r, row) in ai.iter().enumerate() {
                    let mut v = s[r].gradient(i);
                    for (c, j) in row {
                        v += j.value() * s[*c].value();
                    }
                    worst = worst.max(v.abs());
                }
            }
        }
        Ok(worst)
    }
}

fn put<S: Scalar>(row: &mut BTreeMap<usize, S>, c: usize, v: S) {
    if v.is_zero() {
        return;
    }
    match row.get_mut(&c) {
        Some(x) => *x = x.add(&v),
        None => {
            row.insert(c, v);
        }
    }
}

/// The connection matrices of the metric bundles from g and Γ.
pub(crate) fn assemble<S: Scalar>(
    kind: FiberKind,
    n: usize,
    g: &Mat<S>,
    gamma: &[Mat<S>],
    b: f64,
) -> Vec<SparseMat<S>> {
    let s = n * (n + 1) / 2;
    let big_n = match kind {
        FiberKind::Prolongation => s + n + 1,
        FiberKind::SymmetricTwo => s,
        _ => n,
    };
    let proto = &g[0][0];
    (0..n)
        .map(|i| {
            let mut rows: Vec<BTreeMap<usize, S>> = vec![BTreeMap::new(); big_n];
            match kind {
                FiberKind::Prolongation | FiberKind::SymmetricTwo => {
                    for (r, &(a, bb)) in sym_pairs(n).iter().enumerate() {
                        for m in 0..n {
                            put(&mut rows[r], sym_index(n, m, bb), gamma[m][i][a].neg());
                            put(&mut rows[r], sym_index(n, a, m), gamma[m][i][bb].neg());
                        }
                        if kind == FiberKind::Prolongation {
                            put(&mut rows[r], s + bb, g[i][a].neg());
                            put(&mut rows[r], s + a, g[i][bb].neg());
                        }
                    }
                    if kind == FiberKind::Prolongation {
                        for a in 0..n {
                            let r = s + a;
                            for m in 0..n {
                                put(&mut rows[r], s + m, gamma[m][i][a].neg());
                            }
                            put(&mut rows[r], s + n, g[i][a].neg());
                            put(&mut rows[r], sym_index(n, i, a), proto.constant_like(-b));
                        }
                        put(&mut rows[s + n], s + i, proto.constant_like(-2.0 * b));
                    }
                }
                FiberKind::OneForm => {
                    for a in 0..n {
                        for m in 0..n {
                            put(&mut rows[a], m, gamma[m][i][a].neg());
                        }
                    }
                }
                FiberKind::Vector => {
                    for a in 0..n {
                        for m in 0..n {
                            put(&mut rows[a], m, gamma[a][i][m].clone());
                        }
                    }
                }
                FiberKind::Explicit => unreachable!(),
            }
            rows.into_iter().map(|r| r.into_iter().collect()).collect()
        })
        .collect()
}

/// Fiber components (L_ab for a ≤ b, Λ_a, μ) of a triple.
pub fn section_of_triple(t: &SolutionTriple) -> Vec<Expr> {
    let mut v = section_of_symmetric(&t.l);
    v.extend(t.lambda_form.components().iter().cloned());
    v.push(t.mu.clone());
    v
}

/// Fiber components L_ab, a ≤ b, of a (0,2) tensor.
pub fn section_of_symmetric(l: &TensorField) -> Vec<Expr> {
    let n = l.dim();
    sym_pairs(n)
        .into_iter()
        .map(|(a, b)| l.component(&[a, b]).clone())
        .collect()
}
