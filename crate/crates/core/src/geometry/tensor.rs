use std::sync::Arc;

use super::chart::Chart;
use super::metric::MetricField;
use super::scalar::{self, flat_index, multi_index, Mat};
use super::GeometryError;
use crate::jet::{coordinate_jets, Jet, JetEvaluator, JetSpace};
use crate::symexpr::{evaluate, Expr};

/// A tensor field of valence (contra, co); components are stored with the
/// upper indices first, row-major.
#[derive(Debug, Clone)]
pub struct TensorField {
    chart: Arc<Chart>,
    contra: usize,
    co: usize,
    comps: Vec<Expr>,
    symmetric: bool,
}

impl TensorField {
    pub fn new(chart: Arc<Chart>, contra: usize, co: usize, comps: Vec<Expr>) -> Result<TensorField, GeometryError> {
        let n = chart.dim();
        let want = n.pow((contra + co) as u32);
        if comps.len() != want {
            return Err(GeometryError::Shape(format!(
                "valence ({contra},{co}) on dimension {n} needs {want} components, got {}",
                comps.len()
            )));
        }
        Ok(TensorField {
            chart,
            contra,
            co,
            comps,
            symmetric: false,
        })
    }

    pub fn vector(chart: Arc<Chart>, comps: Vec<Expr>) -> Result<TensorField, GeometryError> {
        TensorField::new(chart, 1, 0, comps)
    }

    pub fn one_form(chart: Arc<Chart>, comps: Vec<Expr>) -> Result<TensorField, GeometryError> {
        TensorField::new(chart, 0, 1, comps)
    }

    /// A symmetric (0,2) tensor; the matrix must be structurally symmetric.
    pub fn symmetric(chart: Arc<Chart>, m: Mat<Expr>) -> Result<TensorField, GeometryError> {
        let n = chart.dim();
        if m.len() != n || m.iter().any(|r| r.len() != n) {
            return Err(GeometryError::Shape(format!("expected a {n}x{n} matrix")));
        }
        for i in 0..n {
            for j in 0..i {
                if m[i][j] != m[j][i] {
                    return Err(GeometryError::Shape(format!("entries ({i},{j}) and ({j},{i}) differ")));
                }
            }
        }
        let mut t = TensorField::new(chart, 0, 2, m.into_iter().flatten().collect())?;
        t.symmetric = true;
        Ok(t)
    }

    /// Symmetrizes an arbitrary (0,2) matrix: ½(m + mᵀ).
    pub fn symmetrized(chart: Arc<Chart>, m: &Mat<Expr>) -> Result<TensorField, GeometryError> {
        let n = m.len();
        let s = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if i == j {
                            m[i][i].clone()
                        } else {
                            m[i][j].add(&m[j][i]).scale(crate::symexpr::rat(1, 2))
                        }
                    })
                    .collect()
            })
            .collect();
        TensorField::symmetric(chart, s)
    }

    pub fn metric(g: &MetricField) -> TensorField {
        TensorField::symmetric(g.chart().clone(), g.components().clone()).expect("metric components are symmetric")
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn valence(&self) -> (usize, usize) {
        (self.contra, self.co)
    }

    pub fn rank(&self) -> usize {
        self.contra + self.co
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn components(&self) -> &[Expr] {
        &self.comps
    }

    pub fn component(&self, idx: &[usize]) -> &Expr {
        assert_eq!(idx.len(), self.rank());
        &self.comps[flat_index(self.dim(), idx)]
    }

    /// Components of a rank-two tensor as a matrix.
    pub fn matrix(&self) -> Mat<Expr> {
        assert_eq!(self.rank(), 2, "matrix() needs a rank-two tensor");
        let n = self.dim();
        self.comps.chunks(n).map(|r| r.to_vec()).collect()
    }

    pub fn scale(&self, c: &Expr) -> TensorField {
        TensorField {
            comps: self.comps.iter().map(|e| e.mul(c)).collect(),
            ..self.clone()
        }
    }

    /// Linear combination `Σ c_k T_k` of tensors of equal valence.
    pub fn combination(terms: &[(Expr, &TensorField)]) -> Result<TensorField, GeometryError> {
        let (_, first) = terms
            .first()
            .ok_or_else(|| GeometryError::Shape("empty combination".into()))?;
        for (_, t) in terms {
            check_same_chart(&first.chart, &t.chart)?;
            if t.valence() != first.valence() {
                return Err(GeometryError::Shape("valences differ".into()));
            }
        }
        let comps = (0..first.comps.len())
            .map(|k| Expr::sum(terms.iter().map(|(c, t)| c.mul(&t.comps[k]))))
            .collect();
        Ok(TensorField {
            chart: first.chart.clone(),
            contra: first.contra,
            co: first.co,
            comps,
            symmetric: terms.iter().all(|(_, t)| t.symmetric),
        })
    }

    pub fn values_at(&self, p: &[f64]) -> Result<Vec<f64>, GeometryError> {
        let k = self.chart.constants();
        self.comps.iter().map(|e| Ok(evaluate(e, p, k)?)).collect()
    }

    pub fn jets(&self, coords: &[Jet]) -> Result<Vec<Jet>, GeometryError> {
        let mut ev = JetEvaluator::new(coords, self.chart.constants());
        self.comps.iter().map(|e| Ok(ev.eval(e)?)).collect()
    }
}

pub fn check_same_chart(a: &Arc<Chart>, b: &Arc<Chart>) -> Result<(), GeometryError> {
    if Arc::ptr_eq(a, b) || (a.name() == b.name() && a.coordinates() == b.coordinates()) {
        Ok(())
    } else {
        Err(GeometryError::ChartMismatch(a.name().into(), b.name().into()))
    }
}

/// Symbolic ∇T with the new covariant slot appended last.
pub fn covariant_derivative(t: &TensorField, g: &MetricField) -> Result<TensorField, GeometryError> {
    check_same_chart(&t.chart, g.chart())?;
    let gamma = super::curvature::christoffels(g)?;
    let comps = scalar::covariant_derivative(&t.comps, t.dim(), t.contra, t.co, &gamma);
    TensorField::new(t.chart.clone(), t.contra, t.co + 1, comps)
}

/// Values of ∇T at `p`, computed from first-order jets.
pub fn covariant_derivative_at(t: &TensorField, g: &MetricField, p: &[f64]) -> Result<Vec<f64>, GeometryError> {
    check_same_chart(&t.chart, g.chart())?;
    let local = g.jets(p, 1)?;
    let comps = t.jets(&local.coords)?;
    let d = scalar::covariant_derivative(&comps, t.dim(), t.contra, t.co, &local.gamma);
    Ok(d.iter().map(Jet::value).collect())
}

pub fn lie_derivative_metric(v: &TensorField, g: &MetricField) -> Result<TensorField, GeometryError> {
    check_same_chart(&v.chart, g.chart())?;
    require_vector(v)?;
    let m = scalar::lie_derivative_metric(&v.comps, g.components());
    TensorField::symmetric(v.chart.clone(), m)
}

pub fn lie_derivative_metric_at(v: &TensorField, g: &MetricField, p: &[f64]) -> Result<Mat<f64>, GeometryError> {
    check_same_chart(&v.chart, g.chart())?;
    require_vector(v)?;
    let space = JetSpace::new(g.dim(), 1);
    let coords = coordinate_jets(&space, p, 1);
    let gj = g.component_jets(&coords)?;
    let vj = v.jets(&coords)?;
    let m = scalar::lie_derivative_metric(&vj, &gj);
    Ok(m.iter().map(|r| r.iter().map(Jet::value).collect()).collect())
}

fn require_vector(v: &TensorField) -> Result<(), GeometryError> {
    if v.valence() != (1, 0) {
        return Err(GeometryError::Shape(format!(
            "expected a vector field, got valence {:?}",
            v.valence()
        )));
    }
    Ok(())
}

/// Lowers (slot < contra) or raises (slot ≥ contra) one index.
///
/// A lowered index becomes the first covariant slot; a raised index becomes
/// the last contravariant slot. For vectors and one-forms this is the usual
/// ♭/♯ pair.
pub fn musical(g: &MetricField, t: &TensorField, slot: usize) -> Result<TensorField, GeometryError> {
    check_same_chart(&t.chart, g.chart())?;
    let rank = t.rank();
    if slot >= rank {
        return Err(GeometryError::SlotOutOfRange { slot, rank });
    }
    let n = t.dim();
    let lowering = slot < t.contra;
    let m: &Mat<Expr> = if lowering {
        g.components()
    } else {
        g.inverse().ok_or(GeometryError::SymbolicBudget)?
    };
    let (contra, co) = if lowering {
        (t.contra - 1, t.co + 1)
    } else {
        (t.contra + 1, t.co - 1)
    };
    let new_slot = if lowering { t.contra - 1 } else { t.contra };
    let mut comps = Vec::with_capacity(t.comps.len());
    for flat in 0..t.comps.len() {
        let idx = multi_index(n, rank, flat);
        // Move the new index from `new_slot` back to `slot` in the source.
        let free = idx[new_slot];
        let mut src: Vec<usize> = idx.clone();
        src.remove(new_slot);
        let terms = (0..n).map(|k| {
            let mut s = src.clone();
            s.insert(slot, k);
            m[free][k].mul(&t.comps[flat_index(n, &s)])
        });
        comps.push(Expr::sum(terms));
    }
    let mut out = TensorField::new(t.chart.clone(), contra, co, comps)?;
    out.symmetric = t.symmetric && slot == new_slot;
    Ok(out)
}

/// Largest absolute value of `f` over `count` seeded sample points.
pub fn max_abs_over_samples<F>(chart: &Chart, count: usize, seed: u64, f: F) -> Result<f64, GeometryError>
where
    F: Fn(&[f64]) -> Result<Vec<f64>, GeometryError>,
{
    let mut worst: f64 = 0.0;
    for p in chart.sample_points(count, seed) {
        for v in f(p.coords())? {
            worst = worst.max(v.abs());
        }
    }
    Ok(worst)
}
