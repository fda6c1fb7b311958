use nalgebra::DVector;
use serde::Serialize;

use super::{parallel_residual, shift, ConstructionError, CLAIM_TOL};
use crate::geometry::{covariant_derivative_at, curvature_at, Chart, GeometryError, MetricField, TensorField};
use crate::symexpr::{evaluate, rational_from_f64, Expr};

/// The cone dr² + r²(−dt² + e^{2t} h) with its parallel null field v and the
/// second parallel field V built from F.
#[derive(Debug, Clone)]
pub struct NullConeFamily {
    pub metric: MetricField,
    /// v = e^t(∂_r − (1/r)∂_t).
    pub v: TensorField,
    /// V = (Fe^t − (C/2)e^{−t})∂_r + (1/r)(−(Fe^t + (C/2)e^{−t})∂_t + e^{−t} grad_h F).
    pub big_v: TensorField,
    pub checks: NullConeChecks,
}

#[derive(Debug, Clone, Serialize)]
pub struct NullConeChecks {
    pub c: f64,
    /// max |∇∇F − C h| on N.
    pub hessian_residual: f64,
    pub v_residual: f64,
    pub big_v_residual: f64,
    /// max |ĝ(v,V) + C|.
    pub inner_residual: f64,
    /// max |ĝ(V,V) + 2CF − h(grad F, grad F)|.
    pub norm_residual: f64,
    /// ĝ(v,V) and ĝ(V,V) vanish at every sample point.
    pub null_and_orthogonal: bool,
    /// grad_h F is parallel and null on N.
    pub grad_parallel_null: bool,
    /// max |Ric| of the cone and of h.
    pub cone_max_ricci: f64,
    pub base_max_ricci: f64,
}

impl NullConeChecks {
    pub fn passes(&self, tol: f64) -> bool {
        self.v_residual < tol
            && self.big_v_residual < tol
            && self.inner_residual < tol
            && self.norm_residual < tol
            && self.null_and_orthogonal == self.grad_parallel_null
    }
}

/// Builds the family for a metric h and a function F with ∇∇F = C h.
pub fn null_cone_family(h: &MetricField, f: &Expr, c: f64) -> Result<NullConeFamily, ConstructionError> {
    let hc = h.chart();
    let k = h.dim();
    let df = TensorField::one_form(hc.clone(), (0..k).map(|i| f.diff(i)).collect())?;
    let mut hess: f64 = 0.0;
    for p in hc.sample_points(10, 13) {
        let d = covariant_derivative_at(&df, h, p.coords())?;
        let g = h.values_at(p.coords())?;
        for i in 0..k {
            for j in 0..k {
                hess = hess.max((d[i * k + j] - c * g[(i, j)]).abs());
            }
        }
    }
    if hess > CLAIM_TOL {
        return Err(ConstructionError::Precondition(format!(
            "∇∇F = C h fails (residual {hess:e})"
        )));
    }
    for name in ["r", "t"] {
        if hc.coordinates().contains(&name) {
            return Err(ConstructionError::NameClash(name.into()));
        }
    }
    if hc.constants().contains_key("C") {
        return Err(ConstructionError::NameClash("C".into()));
    }
    let mut coords = vec!["r", "t"];
    coords.extend(hc.coordinates());
    let mut sample_box = vec![(0.5, 2.0), (-0.5, 0.5)];
    sample_box.extend_from_slice(hc.sample_box());
    let r = Expr::coord(0, "r");
    let t = Expr::coord(1, "t");
    let mut excluded = vec![r.clone()];
    excluded.extend(hc.excluded().iter().map(|e| shift(e, 2)));
    let mut constants = hc.constants().clone();
    constants.insert("C".into(), c);
    let chart = Chart::with_details(
        &format!("nullcone({})", hc.name()),
        &coords,
        &sample_box,
        excluded,
        constants,
    )?;

    let n = k + 2;
    let r2 = r.powi(2);
    let e2t = t.scale(crate::symexpr::rat(2, 1)).exp();
    let mut m = vec![vec![Expr::zero(); n]; n];
    m[0][0] = Expr::one();
    m[1][1] = r2.neg();
    for i in 0..k {
        for j in 0..k {
            m[i + 2][j + 2] = r2.mul(&e2t).mul(&shift(h.component(i, j), 2));
        }
    }
    let metric = MetricField::new(chart.clone(), m)?;

    let et = t.exp();
    let emt = t.neg().exp();
    let mut v = vec![Expr::zero(); n];
    v[0] = et.clone();
    v[1] = et.div(&r).neg();
    let v = TensorField::vector(chart.clone(), v)?;

    let hinv = h.inverse().ok_or(GeometryError::SymbolicBudget)?;
    let f_full = shift(f, 2);
    let half_c = Expr::param("C").scale(crate::symexpr::rat(1, 2));
    let mut bv = vec![Expr::zero(); n];
    bv[0] = f_full.mul(&et).sub(&half_c.mul(&emt));
    bv[1] = f_full.mul(&et).add(&half_c.mul(&emt)).div(&r).neg();
    for a in 0..k {
        let grad_a = Expr::sum((0..k).map(|b| shift(&hinv[a][b], 2).mul(&shift(&f.diff(b), 2))));
        bv[a + 2] = emt.mul(&grad_a).div(&r);
    }
    let big_v = TensorField::vector(chart.clone(), bv)?;

    let v_residual = parallel_residual(&v, &metric, 10, 14)?;
    let big_v_residual = parallel_residual(&big_v, &metric, 10, 15)?;
    let (mut inner_residual, mut norm_residual): (f64, f64) = (0.0, 0.0);
    let mut null_and_orthogonal = true;
    let mut cone_max_ricci: f64 = 0.0;
    for p in chart.sample_points(10, 16) {
        let g = metric.values_at(p.coords())?;
        let a = DVector::from_vec(v.values_at(p.coords())?);
        let b = DVector::from_vec(big_v.values_at(p.coords())?);
        let vb = (&g * &a).dot(&b);
        let bb = (&g * &b).dot(&b);
        let hp = &p.coords()[2..];
        let fv = evaluate(f, hp, hc.constants())?;
        let dfv = DVector::from_vec(df.values_at(hp)?);
        let hinv_v = h.values_at(hp)?.try_inverse().ok_or(GeometryError::Degenerate {
            point: hp.to_vec(),
            detail: "h is singular".into(),
        })?;
        let grad2 = (&hinv_v * &dfv).dot(&dfv);
        inner_residual = inner_residual.max((vb + c).abs());
        norm_residual = norm_residual.max((bb + 2.0 * c * fv - grad2).abs());
        null_and_orthogonal &= vb.abs() < CLAIM_TOL && bb.abs() < CLAIM_TOL;
        cone_max_ricci = cone_max_ricci.max(curvature_at(&metric, p.coords())?.max_ricci());
    }

    let grad_h = TensorField::vector(
        hc.clone(),
        (0..k)
            .map(|a| Expr::sum((0..k).map(|b| hinv[a][b].mul(&f.diff(b)))))
            .collect(),
    )?;
    let grad_par = parallel_residual(&grad_h, h, 8, 18)?;
    let mut grad_null = true;
    let mut base_max_ricci: f64 = 0.0;
    for p in hc.sample_points(8, 19) {
        let x = DVector::from_vec(grad_h.values_at(p.coords())?);
        grad_null &= (h.values_at(p.coords())? * &x).dot(&x).abs() < CLAIM_TOL;
        base_max_ricci = base_max_ricci.max(curvature_at(h, p.coords())?.max_ricci());
    }

    Ok(NullConeFamily {
        metric,
        v,
        big_v,
        checks: NullConeChecks {
            c,
            hessian_residual: hess,
            v_residual,
            big_v_residual,
            inner_residual,
            norm_residual,
            null_and_orthogonal,
            grad_parallel_null: grad_par < CLAIM_TOL && grad_null,
            cone_max_ricci,
            base_max_ricci,
        },
    })
}

/// F = (C/2)|x|² on a flat chart, as an expression.
pub(crate) fn quadratic_potential(h: &MetricField, c: f64) -> Expr {
    let names = h.chart().coordinates();
    let half = rational_from_f64(c / 2.0)
        .map(Expr::constant)
        .unwrap_or_else(|| Expr::real(c / 2.0));
    half.mul(&Expr::sum((0..h.dim()).map(|i| Expr::coord(i, names[i]).powi(2))))
}
