use serde::Serialize;

use super::{fitted_constant, ProjectiveError};
use crate::geometry::scalar::{covariant_derivative, Mat};
use crate::geometry::{is_einstein, Einstein, MetricField, TensorField};
use crate::jet::Jet;
use crate::symexpr::{Expr, DEFAULT_TRIALS};

/// Relative tolerance: a residual r passes when |r| < tol (1 + scale).
pub const RESIDUAL_TOL: f64 = 1e-9;

/// Worst residual over the trial points.
#[derive(Debug, Clone, Default, Serialize)]
pub struct Residual {
    pub max_abs: f64,
    /// max |r| / (1 + scale)
    pub max_ratio: f64,
    pub witness: Option<Vec<f64>>,
}

impl Residual {
    pub(crate) fn record(&mut self, r: f64, scale: f64, p: &[f64]) {
        let ratio = r.abs() / (1.0 + scale);
        if ratio > self.max_ratio {
            self.max_ratio = ratio;
            self.witness = Some(p.to_vec());
        }
        self.max_abs = self.max_abs.max(r.abs());
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.max_ratio < tol
    }
}

/// A candidate (L, Λ, λ, μ, B) for the extended system.
#[derive(Debug, Clone)]
pub struct SolutionTriple {
    pub l: TensorField,
    /// Λ as a one-form.
    pub lambda_form: TensorField,
    pub lambda: Expr,
    pub mu: Expr,
    pub b: f64,
}

/// λ = ½ trace(L♯), symbolically.
pub fn lambda_of(g: &MetricField, l: &TensorField) -> Result<Expr, ProjectiveError> {
    let ginv = g.inverse().ok_or(crate::geometry::GeometryError::SymbolicBudget)?;
    let lm = l.matrix();
    let n = g.dim();
    let terms = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| ginv[i][j].mul(&lm[i][j]));
    Ok(Expr::sum(terms).scale(crate::symexpr::rat(1, 2)))
}

impl SolutionTriple {
    /// Completes a solution L of the main equation: λ = ½ trace L♯, Λ = dλ,
    /// and μ = 2Bλ + c with c read off ∇Λ = μg + BL at the chart center.
    pub fn from_solution(g: &MetricField, l: TensorField, b: f64) -> Result<SolutionTriple, ProjectiveError> {
        let chart = g.chart().clone();
        let lambda = lambda_of(g, &l)?;
        let n = g.dim();
        let lambda_form = TensorField::one_form(chart.clone(), (0..n).map(|i| lambda.diff(i)).collect())?;
        let center = chart.center();
        let p = center.coords();
        let local = g.jets(p, 1)?;
        let lf = lambda_form.jets(&local.coords)?;
        let lj = l.jets(&local.coords)?;
        let dl = covariant_derivative(&lf, n, 0, 1, &local.gamma);
        // trace over g of ∇Λ − BL, divided by n
        let mut tr = 0.0;
        for i in 0..n {
            for j in 0..n {
                let ginv = local.ginv[i][j].value();
                tr += ginv * (dl[i * n + j].value() - b * lj[i * n + j].value());
            }
        }
        let mu_p = tr / n as f64;
        let lam_p = crate::symexpr::evaluate(&lambda, p, chart.constants())?;
        let c = mu_p - 2.0 * b * lam_p;
        let mu = lambda.mul(&fitted_constant(2.0 * b)).add(&fitted_constant(c));
        Ok(SolutionTriple {
            l,
            lambda_form,
            lambda,
            mu,
            b,
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MainReport {
    pub pass: bool,
    pub residual: Residual,
    /// Λ vanishes at every trial point (L is parallel).
    pub affine: bool,
    pub max_lambda_form: f64,
    pub trials: usize,
}

pub fn verify_main(g: &MetricField, l: &TensorField) -> Result<MainReport, ProjectiveError> {
    verify_main_with(g, l, DEFAULT_TRIALS, 0, RESIDUAL_TOL)
}

/// Residual ∇_k L_ij − g_ki Λ_j − g_kj Λ_i with Λ = d(½ trace L♯), from jets.
pub fn verify_main_with(
    g: &MetricField,
    l: &TensorField,
    trials: usize,
    seed: u64,
    tol: f64,
) -> Result<MainReport, ProjectiveError> {
    check_symmetric_02(l)?;
    let n = g.dim();
    let mut res = Residual::default();
    let mut affine = true;
    let mut max_lambda: f64 = 0.0;
    for p in g.chart().sample_points(trials, seed) {
        let p = p.coords();
        let local = g.jets(p, 1)?;
        let lj = l.jets(&local.coords)?;
        let mut lambda = Jet::constant(&local.space, 0.0, 1);
        for i in 0..n {
            for j in 0..n {
                lambda.add_product(&local.ginv[i][j], &lj[i * n + j]);
            }
        }
        let lam: Vec<f64> = (0..n).map(|i| 0.5 * lambda.gradient(i)).collect();
        let nabla = covariant_derivative(&lj, n, 0, 2, &local.gamma);
        let gv = values(&local.g);
        let scale = lj.iter().fold(0.0f64, |a, j| a.max(j.max_abs()));
        let lam_max = lam.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        max_lambda = max_lambda.max(lam_max);
        if lam_max >= tol * (1.0 + scale) {
            affine = false;
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let r = nabla[(i * n + j) * n + k].value() - gv[k][i] * lam[j] - gv[k][j] * lam[i];
                    res.record(r, scale, p);
                }
            }
        }
    }
    Ok(MainReport {
        pass: res.passes(tol),
        residual: res,
        affine,
        max_lambda_form: max_lambda,
        trials,
    })
}

fn check_symmetric_02(l: &TensorField) -> Result<(), ProjectiveError> {
    if l.valence() != (0, 2) {
        return Err(ProjectiveError::Invalid(format!(
            "expected a (0,2) tensor, got {:?}",
            l.valence()
        )));
    }
    Ok(())
}

fn values(m: &Mat<Jet>) -> Mat<f64> {
    m.iter().map(|r| r.iter().map(Jet::value).collect()).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct ExtsysReport {
    pub pass: bool,
    /// ∇L − (X♭⊙Λ)
    pub first: Residual,
    /// ∇Λ − μg − BL
    pub second: Residual,
    /// ∇μ − 2BΛ
    pub third: Residual,
    /// λ − ½ trace L♯ and Λ − dλ
    pub consistency: Residual,
    pub b: f64,
}

pub fn verify_extsys(g: &MetricField, s: &SolutionTriple) -> Result<ExtsysReport, ProjectiveError> {
    verify_extsys_with(g, s, DEFAULT_TRIALS, 0, RESIDUAL_TOL)
}

pub fn verify_extsys_with(
    g: &MetricField,
    s: &SolutionTriple,
    trials: usize,
    seed: u64,
    tol: f64,
) -> Result<ExtsysReport, ProjectiveError> {
    check_symmetric_02(&s.l)?;
    match is_einstein(g)? {
        Einstein::Yes { b, .. } => {
            if (b - s.b).abs() > 1e-8 * (1.0 + b.abs()) {
                return Err(ProjectiveError::BMismatch {
                    given: s.b,
                    computed: b,
                });
            }
        }
        Einstein::No { witness, .. } => return Err(ProjectiveError::NotEinstein { witness }),
    }
    let n = g.dim();
    let b = s.b;
    let (mut r1, mut r2, mut r3, mut rc) = (
        Residual::default(),
        Residual::default(),
        Residual::default(),
        Residual::default(),
    );
    for p in g.chart().sample_points(trials, seed) {
        let p = p.coords();
        let local = g.jets(p, 1)?;
        let mut ev = crate::jet::JetEvaluator::new(&local.coords, g.chart().constants());
        let lj = s.l.jets(&local.coords)?;
        let laj = s.lambda_form.jets(&local.coords)?;
        let lam = ev.eval(&s.lambda)?;
        let mu = ev.eval(&s.mu)?;
        let gv = values(&local.g);
        let lv: Vec<f64> = lj.iter().map(Jet::value).collect();
        let la: Vec<f64> = laj.iter().map(Jet::value).collect();
        let scale = lj
            .iter()
            .chain(&laj)
            .chain([&lam, &mu])
            .fold(0.0f64, |a, j| a.max(j.max_abs()));

        let nl = covariant_derivative(&lj, n, 0, 2, &local.gamma);
        let nla = covariant_derivative(&laj, n, 0, 1, &local.gamma);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let r = nl[(i * n + j) * n + k].value() - gv[k][i] * la[j] - gv[k][j] * la[i];
                    r1.record(r, scale, p);
                }
                let r = nla[i * n + j].value() - mu.value() * gv[i][j] - b * lv[i * n + j];
                r2.record(r, scale, p);
            }
            r3.record(mu.gradient(i) - 2.0 * b * la[i], scale, p);
            rc.record(la[i] - lam.gradient(i), scale, p);
        }
        let mut half_trace = 0.0;
        for i in 0..n {
            for j in 0..n {
                half_trace += 0.5 * local.ginv[i][j].value() * lv[i * n + j];
            }
        }
        rc.record(lam.value() - half_trace, scale, p);
    }
    Ok(ExtsysReport {
        pass: [&r1, &r2, &r3, &rc].iter().all(|r| r.passes(tol)),
        first: r1,
        second: r2,
        third: r3,
        consistency: rc,
        b,
    })
}

/// Dimension of the linear span of tensor fields of equal valence, from the
/// Gram matrix of their values at seeded sample points.
pub fn span_dimension(fields: &[&TensorField], points: usize, seed: u64) -> Result<usize, ProjectiveError> {
    let Some(first) = fields.first() else {
        return Ok(0);
    };
    let pts = first.chart().sample_points(points, seed);
    let mut rows = Vec::with_capacity(fields.len());
    for f in fields {
        let mut v = Vec::new();
        for p in &pts {
            v.extend(f.values_at(p.coords())?);
        }
        rows.push(v);
    }
    let k = rows.len();
    let gram = nalgebra::DMatrix::from_fn(k, k, |i, j| {
        rows[i].iter().zip(&rows[j]).map(|(a, b)| a * b).sum::<f64>()
    });
    let eig = nalgebra::SymmetricEigen::new(gram);
    let top = eig.eigenvalues.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    Ok(eig.eigenvalues.iter().filter(|v| v.abs() > 1e-10 * top).count())
}
