use serde::Serialize;

use super::solution::{verify_main, MainReport, Residual, RESIDUAL_TOL};
use super::ProjectiveError;
use crate::geometry::{lie_derivative_metric, GeometryError, MetricField, TensorField};
use crate::symexpr::{rat, Expr, DEFAULT_TRIALS};

/// φ(v) together with its classification.
#[derive(Debug, Clone)]
pub struct Deformation {
    pub phi: TensorField,
    /// verify_main on φ(v): passes iff v is projective.
    pub main: MainReport,
    /// Present iff φ(v) is a constant multiple of g (v is a homothety).
    pub homothety: Option<MetricMultiple>,
}

/// φ(v) = L_v g − (1/(n+1)) trace((L_v g)♯) g.
pub fn projective_deformation(v: &TensorField, g: &MetricField) -> Result<Deformation, ProjectiveError> {
    let lv = lie_derivative_metric(v, g)?;
    let n = g.dim();
    let ginv = g.inverse().ok_or(GeometryError::SymbolicBudget)?;
    let m = lv.matrix();
    let tr = Expr::sum(
        (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| ginv[i][j].mul(&m[i][j])),
    );
    let coef = tr.scale(rat(-1, n as i128 + 1));
    let gt = TensorField::metric(g);
    let phi = TensorField::combination(&[(Expr::one(), &lv), (coef, &gt)])?;
    let main = verify_main(g, &phi)?;
    let fit = fit_metric_multiple(&phi, g)?;
    Ok(Deformation {
        phi,
        main,
        homothety: fit.holds().then_some(fit),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct MetricMultiple {
    pub c: f64,
    pub residual: Residual,
}

impl MetricMultiple {
    pub fn holds(&self) -> bool {
        self.residual.passes(RESIDUAL_TOL)
    }
}

/// Fits T ≈ c g: c from the g-trace at the chart center, then the residual
/// T − c g over the trial points.
pub fn fit_metric_multiple(t: &TensorField, g: &MetricField) -> Result<MetricMultiple, ProjectiveError> {
    let n = g.dim();
    let center = g.chart().center();
    let gc = g.values_at(center.coords())?;
    let ginv = gc.clone().try_inverse().ok_or_else(|| GeometryError::Degenerate {
        point: center.coords().to_vec(),
        detail: "g is singular".into(),
    })?;
    let tc = t.values_at(center.coords())?;
    let mut tr = 0.0;
    for i in 0..n {
        for j in 0..n {
            tr += ginv[(i, j)] * tc[i * n + j];
        }
    }
    let c = tr / n as f64;
    let mut residual = Residual::default();
    for p in g.chart().sample_points(DEFAULT_TRIALS, 9) {
        let gv = g.values_at(p.coords())?;
        let tv = t.values_at(p.coords())?;
        let scale = tv.iter().fold(gv.amax() * c.abs(), |a, v| a.max(v.abs()));
        for i in 0..n {
            for j in 0..n {
                residual.record(tv[i * n + j] - c * gv[(i, j)], scale, p.coords());
            }
        }
    }
    Ok(MetricMultiple { c, residual })
}
