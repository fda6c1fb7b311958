use std::sync::Arc;

use serde::Serialize;

use super::{embed_vector, parallel_residual, product_chart, shift, ConstructionError, CLAIM_TOL};
use crate::geometry::{
    covariant_derivative_at, curvature_at, is_constant_curvature, is_einstein, Chart, ConstantCurvature, Einstein,
    GeometryError, MetricField, TensorField,
};
use crate::projective::SolutionTriple;
use crate::symexpr::{rational_to_f64, Constants, Expr, Rational};

/// ξ = r∂_r (or a sum of such) together with the measured max |∇ξ − Id|.
#[derive(Debug, Clone)]
pub struct ConeField {
    pub xi: TensorField,
    pub residual: f64,
}

/// A constructed metric, carrying its cone field when it has one.
#[derive(Debug, Clone)]
pub struct Constructed {
    pub metric: MetricField,
    pub cone_field: Option<ConeField>,
    /// The base metric when this is a cone.
    pub base: Option<MetricField>,
}

impl From<MetricField> for Constructed {
    fn from(metric: MetricField) -> Self {
        Constructed {
            metric,
            cone_field: None,
            base: None,
        }
    }
}

/// Max |∇_k ξ^a − δ^a_k| over sample points.
pub fn identity_residual(xi: &TensorField, g: &MetricField) -> Result<f64, GeometryError> {
    let n = g.dim();
    let mut worst: f64 = 0.0;
    for p in g.chart().sample_points(10, 17) {
        let d = covariant_derivative_at(xi, g, p.coords())?;
        for a in 0..n {
            for k in 0..n {
                let id = if a == k { 1.0 } else { 0.0 };
                worst = worst.max((d[a * n + k] - id).abs());
            }
        }
    }
    Ok(worst)
}

fn verified_field(xi: TensorField, g: &MetricField, what: &str) -> Result<ConeField, ConstructionError> {
    let residual = identity_residual(&xi, g)?;
    if residual > CLAIM_TOL {
        return Err(ConstructionError::Verification {
            entry: g.chart().name().to_string(),
            claim: format!("{what}: ∇ξ = Id"),
            residual,
        });
    }
    Ok(ConeField { xi, residual })
}

/// sign·dr² + r²g with radial coordinate `r` on [0.5, 2].
pub fn cone(g: &MetricField, sign: f64) -> Result<Constructed, ConstructionError> {
    cone_with(g, sign, "r")
}

pub fn cone_with(g: &MetricField, sign: f64, rname: &str) -> Result<Constructed, ConstructionError> {
    if sign != 1.0 && sign != -1.0 {
        return Err(ConstructionError::Precondition(format!(
            "cone sign must be ±1, got {sign}"
        )));
    }
    let base = g.chart();
    if base.coordinates().contains(&rname) {
        return Err(ConstructionError::NameClash(rname.to_string()));
    }
    let r = Expr::coord(0, rname);
    let mut coords = vec![rname];
    coords.extend(base.coordinates());
    let mut sample_box = vec![(0.5, 2.0)];
    sample_box.extend_from_slice(base.sample_box());
    let mut excluded = vec![r.clone()];
    excluded.extend(base.excluded().iter().map(|e| shift(e, 1)));
    let chart = Chart::with_details(
        &format!("cone({})", base.name()),
        &coords,
        &sample_box,
        excluded,
        base.constants().clone(),
    )?;
    let n = g.dim() + 1;
    let r2 = r.powi(2);
    let mut m = vec![vec![Expr::zero(); n]; n];
    m[0][0] = Expr::int(sign as i64);
    for a in 0..g.dim() {
        for b in 0..g.dim() {
            m[a + 1][b + 1] = r2.mul(&shift(g.component(a, b), 1));
        }
    }
    let metric = MetricField::new(chart.clone(), m)?;
    let mut xi = vec![Expr::zero(); n];
    xi[0] = r;
    let xi = TensorField::vector(chart, xi)?;
    let field = verified_field(xi, &metric, "cone")?;
    Ok(Constructed {
        metric,
        cone_field: Some(field),
        base: Some(g.clone()),
    })
}

/// −g; the Levi-Civita connection and any cone field are unchanged.
pub fn negated(c: &Constructed) -> Result<Constructed, ConstructionError> {
    Ok(Constructed {
        metric: c.metric.scaled(-1.0)?,
        cone_field: c.cone_field.clone(),
        base: None,
    })
}

/// Block-diagonal product; ξ = ξ₁ + ξ₂ when both factors are cones.
pub fn product(a: &Constructed, b: &Constructed) -> Result<Constructed, ConstructionError> {
    let (ga, gb) = (&a.metric, &b.metric);
    let name = format!("{}x{}", ga.chart().name(), gb.chart().name());
    let chart = product_chart(&name, ga.chart(), gb.chart())?;
    let (na, nb) = (ga.dim(), gb.dim());
    let n = na + nb;
    let mut m = vec![vec![Expr::zero(); n]; n];
    for i in 0..na {
        for j in 0..na {
            m[i][j] = ga.component(i, j).clone();
        }
    }
    for i in 0..nb {
        for j in 0..nb {
            m[na + i][na + j] = shift(gb.component(i, j), na);
        }
    }
    let metric = MetricField::new(chart.clone(), m)?;
    let cone_field = match (&a.cone_field, &b.cone_field) {
        (Some(x), Some(y)) => {
            let x = embed_vector(&x.xi, &chart, 0)?;
            let y = embed_vector(&y.xi, &chart, na)?;
            let comps = x
                .components()
                .iter()
                .zip(y.components())
                .map(|(p, q)| p.add(q))
                .collect();
            let xi = TensorField::vector(chart.clone(), comps)?;
            Some(verified_field(xi, &metric, "product")?)
        }
        _ => None,
    };
    Ok(Constructed {
        metric,
        cone_field,
        base: None,
    })
}

/// Round S^dim of squared radius `radius_sq` in nested angular coordinates
/// `{prefix}0, {prefix}1, …`, each sampled on [0.7, 2.3].
pub fn round_sphere(dim: usize, radius_sq: Rational, prefix: &str) -> Result<MetricField, ConstructionError> {
    if dim < 1 {
        return Err(ConstructionError::Precondition(
            "sphere dimension must be positive".into(),
        ));
    }
    let names: Vec<String> = (0..dim).map(|i| format!("{prefix}{i}")).collect();
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let excluded = (0..dim - 1).map(|i| Expr::coord(i, &names[i]).sin()).collect();
    let chart = Chart::with_details(
        &format!("S{dim}({})", rational_to_f64(&radius_sq).sqrt()),
        &refs,
        &vec![(0.7, 2.3); dim],
        excluded,
        Constants::new(),
    )?;
    let mut factor = Expr::constant(radius_sq);
    let mut diag = Vec::with_capacity(dim);
    for i in 0..dim {
        diag.push(factor.clone());
        factor = factor.mul(&Expr::coord(i, &names[i]).sin().powi(2));
    }
    Ok(MetricField::diagonal(chart, diag)?)
}

/// Product of round spheres, each given as (dimension, squared radius, prefix).
pub fn sphere_product(factors: &[(usize, Rational, &str)]) -> Result<MetricField, ConstructionError> {
    let mut acc: Option<Constructed> = None;
    for &(dim, rsq, prefix) in factors {
        let s: Constructed = round_sphere(dim, rsq, prefix)?.into();
        acc = Some(match acc {
            None => s,
            Some(a) => product(&a, &s)?,
        });
    }
    acc.map(|c| c.metric)
        .ok_or_else(|| ConstructionError::Precondition("empty sphere product".into()))
}

/// Curvature facts of a cone dr² + r²g next to those of its base.
#[derive(Debug, Clone, Serialize)]
pub struct ConeFacts {
    pub cone_max_riemann: f64,
    pub cone_max_ricci: f64,
    pub cone_flat: bool,
    pub cone_ricci_flat: bool,
    /// Base has constant curvature 1.
    pub base_unit_curvature: bool,
    /// Base is Einstein with Scal = n(n−1).
    pub base_einstein_nn1: bool,
}

impl ConeFacts {
    /// Flat iff the base has curvature 1; Ricci-flat iff Scal = n(n−1).
    pub fn consistent(&self) -> bool {
        self.cone_flat == self.base_unit_curvature && self.cone_ricci_flat == self.base_einstein_nn1
    }
}

pub fn cone_facts(c: &Constructed) -> Result<ConeFacts, ConstructionError> {
    let base = c
        .base
        .as_ref()
        .ok_or_else(|| ConstructionError::Precondition("not a cone".into()))?;
    let g = &c.metric;
    let (mut riem, mut ric): (f64, f64) = (0.0, 0.0);
    for p in g.chart().sample_points(6, 23) {
        let cv = curvature_at(g, p.coords())?;
        riem = riem.max(cv.max_riemann());
        ric = ric.max(cv.max_ricci());
    }
    let n = base.dim() as f64;
    let base_unit_curvature = match is_constant_curvature(base)? {
        ConstantCurvature::Yes { c, .. } => (c - 1.0).abs() < CLAIM_TOL,
        ConstantCurvature::No { .. } => false,
    };
    let base_einstein_nn1 = match is_einstein(base)? {
        Einstein::Yes { scal, .. } => (scal - n * (n - 1.0)).abs() < CLAIM_TOL,
        Einstein::No { .. } => false,
    };
    Ok(ConeFacts {
        cone_max_riemann: riem,
        cone_max_ricci: ric,
        cone_flat: riem < CLAIM_TOL,
        cone_ricci_flat: ric < CLAIM_TOL,
        base_unit_curvature,
        base_einstein_nn1,
    })
}

/// Sign of the mixed term in the lift that makes it parallel.
pub const LIFT_SIGN: f64 = -1.0;

/// Â = r²L ± r dr⊙Λ + μ dr² on the cone dr² + r²g, the sign of the mixed
/// term taken from `sign`.
///
/// With `sign` = [`LIFT_SIGN`] this is parallel whenever the triple solves
/// the extended system with B = −1.
pub fn lift_triple(cone: &Constructed, t: &SolutionTriple, sign: f64) -> Result<TensorField, ConstructionError> {
    let chart: &Arc<Chart> = cone.metric.chart();
    let n = cone.metric.dim();
    let r = Expr::coord(0, chart.coordinates()[0]);
    let l = t.l.matrix();
    let lam = t.lambda_form.components();
    let mut m = vec![vec![Expr::zero(); n]; n];
    m[0][0] = shift(&t.mu, 1);
    for a in 1..n {
        let mut mixed = r.mul(&shift(&lam[a - 1], 1));
        if sign < 0.0 {
            mixed = mixed.neg();
        }
        m[0][a] = mixed.clone();
        m[a][0] = mixed;
        for b in 1..n {
            m[a][b] = r.powi(2).mul(&shift(&l[a - 1][b - 1], 1));
        }
    }
    Ok(TensorField::symmetric(chart.clone(), m)?)
}

/// Max |∇̂Â| over sample points.
pub fn lift_residual(cone: &Constructed, a: &TensorField) -> Result<f64, ConstructionError> {
    Ok(parallel_residual(a, &cone.metric, 10, 29)?)
}
