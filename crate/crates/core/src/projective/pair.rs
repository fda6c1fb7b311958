use nalgebra::DMatrix;

use super::ProjectiveError;
use crate::geometry::scalar::{inverse_and_det, Mat};
use crate::geometry::{GeometryError, MetricField, TensorField};
use crate::symexpr::{evaluate, rat, Expr, Func, DEFAULT_TRIALS};

fn symbolic_inverse(m: &Mat<Expr>, g: &MetricField) -> Option<(Mat<Expr>, Expr)> {
    let center = g.chart().center();
    let k = g.chart().constants();
    let weight = |e: &Expr| -> Option<f64> {
        let v = evaluate(e, center.coords(), k).ok()?;
        (v.abs() > 1e-12).then(|| -(e.node_count() as f64))
    };
    inverse_and_det(m, &weight)
}

fn sandwich(a: &Mat<Expr>, m: &Mat<Expr>, factor: &Expr) -> Mat<Expr> {
    let n = a.len();
    let mut out = vec![vec![Expr::zero(); n]; n];
    for i in 0..n {
        for j in i..n {
            let terms = (0..n)
                .flat_map(|k| (0..n).map(move |l| (k, l)))
                .map(|(k, l)| Expr::product([a[i][k].clone(), m[k][l].clone(), a[l][j].clone()]));
            let e = factor.mul(&Expr::sum(terms));
            out[i][j] = e.clone();
            out[j][i] = e;
        }
    }
    out
}

/// L(g, ḡ) = |det ḡ / det g|^{1/(n+1)} g ḡ^{-1} g.
pub fn l_of_pair(g: &MetricField, gbar: &MetricField) -> Result<TensorField, ProjectiveError> {
    crate::geometry::check_same_chart(g.chart(), gbar.chart())?;
    let n = g.dim() as i128;
    let inv = gbar.inverse().ok_or(GeometryError::SymbolicBudget)?;
    let (dg, dgb) = match (g.determinant(), gbar.determinant()) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(GeometryError::SymbolicBudget.into()),
    };
    let factor = Expr::apply(Func::Abs, dgb.div(dg)).pow_rat(rat(1, n + 1));
    let m = sandwich(g.components(), inv, &factor);
    Ok(TensorField::symmetric(g.chart().clone(), m)?)
}

/// Numeric L(g, ḡ) at a point.
pub fn l_of_pair_at(g: &MetricField, gbar: &MetricField, p: &[f64]) -> Result<DMatrix<f64>, ProjectiveError> {
    let a = g.values_at(p)?;
    let b = gbar.values_at(p)?;
    let n = a.nrows() as f64;
    let binv = b.clone().try_inverse().ok_or_else(|| GeometryError::Degenerate {
        point: p.to_vec(),
        detail: "ḡ is singular".into(),
    })?;
    let factor = (b.determinant() / a.determinant()).abs().powf(1.0 / (n + 1.0));
    Ok(&a * binv * &a * factor)
}

/// ḡ = (det L♯)^{-1} g((L♯)^{-1}·,·), i.e. (det g / det L) g L^{-1} g.
pub fn reconstruct_metric(g: &MetricField, l: &TensorField) -> Result<MetricField, ProjectiveError> {
    crate::geometry::check_same_chart(g.chart(), l.chart())?;
    if l.valence() != (0, 2) {
        return Err(ProjectiveError::Invalid("L must be a (0,2) tensor".into()));
    }
    let scale_ok = |p: &[f64]| -> Result<bool, ProjectiveError> {
        let lv = DMatrix::from_row_slice(g.dim(), g.dim(), &l.values_at(p)?);
        let d = lv.determinant().abs();
        Ok(d > 1e-10 * lv.norm().powi(g.dim() as i32).max(1e-300))
    };
    for p in g.chart().sample_points(DEFAULT_TRIALS, 5) {
        if !scale_ok(p.coords())? {
            return Err(ProjectiveError::DegenerateL {
                point: p.coords().to_vec(),
                suggested_shift: admissible_shift(g, l)?,
            });
        }
    }
    let lm = l.matrix();
    let (linv, det_l) = symbolic_inverse(&lm, g).ok_or_else(|| ProjectiveError::DegenerateL {
        point: g.chart().center().coords().to_vec(),
        suggested_shift: None,
    })?;
    let det_g = g.determinant().ok_or(GeometryError::SymbolicBudget)?;
    let factor = det_g.div(&det_l);
    let m = sandwich(g.components(), &linv, &factor);
    Ok(MetricField::new(g.chart().clone(), m)?)
}

/// A shift t for which L + t g is nondegenerate at every trial point,
/// found by scanning det(L♯ + t Id) over a grid.
pub fn admissible_shift(g: &MetricField, l: &TensorField) -> Result<Option<f64>, ProjectiveError> {
    let n = g.dim();
    let pts = g.chart().sample_points(DEFAULT_TRIALS, 6);
    let mut data = Vec::with_capacity(pts.len());
    for p in &pts {
        let gv = g.values_at(p.coords())?;
        let lv = DMatrix::from_row_slice(n, n, &l.values_at(p.coords())?);
        let sharp = gv
            .clone()
            .try_inverse()
            .map(|gi| gi * lv)
            .ok_or_else(|| GeometryError::Degenerate {
                point: p.coords().to_vec(),
                detail: "g is singular".into(),
            })?;
        data.push(sharp);
    }
    let grid = (1..=40).flat_map(|k| {
        let t = k as f64 * 0.25;
        [t, -t]
    });
    let id = DMatrix::<f64>::identity(n, n);
    for t in grid {
        let mut sign = 0.0;
        let ok = data.iter().all(|m| {
            let d = (m + &id * t).determinant();
            let good = d.abs() > 1e-8 && (sign == 0.0 || d.signum() == sign);
            sign = d.signum();
            good
        });
        if ok {
            return Ok(Some(t));
        }
    }
    Ok(None)
}
