use serde::Serialize;

use super::metric::MetricField;
use super::scalar::{christoffel, ricci, riemann, trace, Mat};
use super::GeometryError;
use crate::symexpr::{Expr, DEFAULT_TRIALS};

/// Relative tolerance for curvature identities.
pub const CURVATURE_TOL: f64 = 1e-9;

/// Symbolic curvature data of a metric.
#[derive(Debug, Clone)]
pub struct CurvatureSet {
    /// Γ^k_ij as `[k][i][j]`.
    pub gamma: Vec<Mat<Expr>>,
    /// R^l_ijk as `[l][i][j][k]`.
    pub riemann: Vec<Vec<Mat<Expr>>>,
    pub ricci: Mat<Expr>,
    pub scal: Expr,
}

fn require_inverse(g: &MetricField) -> Result<&Mat<Expr>, GeometryError> {
    g.inverse().ok_or(GeometryError::SymbolicBudget)
}

/// Symbolic Christoffel symbols `[k][i][j]`.
pub fn christoffels(g: &MetricField) -> Result<Vec<Mat<Expr>>, GeometryError> {
    Ok(christoffel(g.components(), require_inverse(g)?))
}

/// Symbolic Riemann, Ricci and scalar curvature.
pub fn curvature(g: &MetricField) -> Result<CurvatureSet, GeometryError> {
    let ginv = require_inverse(g)?;
    let gamma = christoffel(g.components(), ginv);
    let riem = riemann(&gamma);
    let ric = ricci(&riem);
    let scal = trace(ginv, &ric);
    Ok(CurvatureSet {
        gamma,
        riemann: riem,
        ricci: ric,
        scal,
    })
}

/// Curvature evaluated at one point from exact Taylor data.
#[derive(Debug, Clone)]
pub struct PointCurvature {
    pub point: Vec<f64>,
    pub g: Mat<f64>,
    pub ginv: Mat<f64>,
    pub gamma: Vec<Mat<f64>>,
    pub riemann: Vec<Vec<Mat<f64>>>,
    pub ricci: Mat<f64>,
    pub scal: f64,
}

impl PointCurvature {
    /// R_lijk = g_lm R^m_ijk.
    pub fn lowered(&self, l: usize, i: usize, j: usize, k: usize) -> f64 {
        (0..self.g.len()).map(|m| self.g[l][m] * self.riemann[m][i][j][k]).sum()
    }

    pub fn max_riemann(&self) -> f64 {
        self.riemann
            .iter()
            .flatten()
            .flatten()
            .flatten()
            .fold(0.0, |a, v| a.max(v.abs()))
    }

    pub fn max_ricci(&self) -> f64 {
        self.ricci.iter().flatten().fold(0.0, |a, v| a.max(v.abs()))
    }
}

pub fn curvature_at(g: &MetricField, p: &[f64]) -> Result<PointCurvature, GeometryError> {
    let local = g.jets(p, 2)?;
    let riem = riemann(&local.gamma);
    let ric = ricci(&riem);
    let vals =
        |m: &Mat<crate::jet::Jet>| -> Mat<f64> { m.iter().map(|r| r.iter().map(|j| j.value()).collect()).collect() };
    let ginv = vals(&local.ginv);
    let ricci_v = vals(&ric);
    let n = g.dim();
    let scal = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| ginv[i][j] * ricci_v[i][j])
        .sum();
    Ok(PointCurvature {
        point: p.to_vec(),
        g: vals(&local.g),
        ginv,
        gamma: local.gamma.iter().map(vals).collect(),
        riemann: riem.iter().map(|a| a.iter().map(vals).collect()).collect(),
        ricci: ricci_v,
        scal,
    })
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "einstein", rename_all = "snake_case")]
pub enum Einstein {
    Yes {
        /// B = −Scal/(n(n−1)).
        b: f64,
        scal: f64,
        max_residual: f64,
    },
    No {
        witness: Vec<f64>,
        component: (usize, usize),
        residual: f64,
    },
}

impl Einstein {
    pub fn is_einstein(&self) -> bool {
        matches!(self, Einstein::Yes { .. })
    }
}

/// Ric − (Scal/n) g vanishes and Scal is constant over the trial points.
pub fn is_einstein(g: &MetricField) -> Result<Einstein, GeometryError> {
    is_einstein_with(g, DEFAULT_TRIALS, 0)
}

pub fn is_einstein_with(g: &MetricField, trials: usize, seed: u64) -> Result<Einstein, GeometryError> {
    is_einstein_tol(g, trials, seed, CURVATURE_TOL)
}

/// As [`is_einstein_with`] with an explicit relative tolerance.
pub fn is_einstein_tol(g: &MetricField, trials: usize, seed: u64, tol: f64) -> Result<Einstein, GeometryError> {
    let n = g.dim();
    let mut scal0: Option<f64> = None;
    let mut worst: f64 = 0.0;
    for p in g.chart().sample_points(trials, seed) {
        let c = curvature_at(g, p.coords())?;
        let scale = 1.0 + c.max_ricci() + c.scal.abs();
        for i in 0..n {
            for j in 0..n {
                let r = c.ricci[i][j] - c.scal / n as f64 * c.g[i][j];
                if r.abs() > tol * scale {
                    return Ok(Einstein::No {
                        witness: p.coords().to_vec(),
                        component: (i, j),
                        residual: r,
                    });
                }
                worst = worst.max(r.abs());
            }
        }
        match scal0 {
            None => scal0 = Some(c.scal),
            Some(s) => {
                let d = (c.scal - s).abs();
                if d > tol * scale {
                    return Ok(Einstein::No {
                        witness: p.coords().to_vec(),
                        component: (0, 0),
                        residual: d,
                    });
                }
                worst = worst.max(d);
            }
        }
    }
    let scal = scal0.unwrap_or(0.0);
    let b = if n > 1 { -scal / (n * (n - 1)) as f64 } else { 0.0 };
    Ok(Einstein::Yes {
        b,
        scal,
        max_residual: worst,
    })
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "constant_curvature", rename_all = "snake_case")]
pub enum ConstantCurvature {
    Yes { c: f64, max_residual: f64 },
    No { witness: Vec<f64>, residual: f64 },
}

impl ConstantCurvature {
    pub fn holds(&self) -> bool {
        matches!(self, ConstantCurvature::Yes { .. })
    }
}

/// R_lijk = c (g_li g_jk − g_lj g_ik) with c = Scal/(n(n−1)).
pub fn is_constant_curvature(g: &MetricField) -> Result<ConstantCurvature, GeometryError> {
    is_constant_curvature_with(g, DEFAULT_TRIALS, 2, CURVATURE_TOL)
}

pub fn is_constant_curvature_with(
    g: &MetricField,
    trials: usize,
    seed: u64,
    tol: f64,
) -> Result<ConstantCurvature, GeometryError> {
    let n = g.dim();
    let mut worst: f64 = 0.0;
    let mut c_first = None;
    for p in g.chart().sample_points(trials, seed) {
        let cv = curvature_at(g, p.coords())?;
        let c = cv.scal / (n * (n - 1)) as f64;
        c_first.get_or_insert(c);
        let scale = 1.0 + cv.max_riemann();
        for l in 0..n {
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        let model = c * (cv.g[l][i] * cv.g[j][k] - cv.g[l][j] * cv.g[i][k]);
                        let r = cv.lowered(l, i, j, k) - model;
                        if r.abs() > tol * scale {
                            return Ok(ConstantCurvature::No {
                                witness: p.coords().to_vec(),
                                residual: r,
                            });
                        }
                        worst = worst.max(r.abs());
                    }
                }
            }
        }
    }
    Ok(ConstantCurvature::Yes {
        c: c_first.unwrap_or(0.0),
        max_residual: worst,
    })
}

/// Largest first-Bianchi violation R^l_ijk + R^l_jki + R^l_kij at `p`.
pub fn bianchi_residual(c: &PointCurvature) -> f64 {
    let n = c.g.len();
    let r = &c.riemann;
    let mut worst: f64 = 0.0;
    for l in 0..n {
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    worst = worst.max((r[l][i][j][k] + r[l][j][k][i] + r[l][k][i][j]).abs());
                }
            }
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{signature_at, Chart};
    use crate::symexpr::evaluate;

    fn example14(sign: f64) -> MetricField {
        let chart = Chart::new(
            "ex14",
            &["t", "x0", "x1", "x2", "x3"],
            &[(-0.5, 0.5), (-1.0, 1.0), (-1.0, 1.0), (-0.5, 0.5), (1.0, 2.1)],
        )
        .unwrap();
        let (a, b) = if sign > 0.0 { ("1", "1") } else { ("-1", "-1") };
        MetricField::from_lower_triangle(
            chart,
            &[
                vec![a],
                vec!["0", "0"],
                vec!["0", "exp(2*t)", "exp(2*t)*exp(x2)*sin(x3)"],
                vec!["0", "0", "0", &format!("{b}*exp(2*t)")],
                vec!["0", "0", "0", "0", &format!("{b}*exp(2*t)")],
            ],
        )
        .unwrap()
    }

    #[test]
    fn sphere_has_scalar_curvature_two() {
        let chart = Chart::new("s2", &["th", "ph"], &[(0.5, 2.5), (-1.0, 1.0)]).unwrap();
        let g = MetricField::diagonal(chart.clone(), vec![Expr::int(1), chart.parse("sin(th)^2").unwrap()]).unwrap();
        let c = curvature_at(&g, &[1.1, 0.3]).unwrap();
        assert!((c.scal - 2.0).abs() < 1e-12);
        assert!(is_constant_curvature(&g).unwrap().holds());
        let sym = curvature(&g).unwrap();
        let v = evaluate(&sym.scal, &[0.7, 0.0], chart.constants()).unwrap();
        assert!((v - 2.0).abs() < 1e-12);
    }

    #[test]
    fn example14_is_einstein_in_both_sign_conventions() {
        let g = example14(-1.0);
        match is_einstein(&g).unwrap() {
            Einstein::Yes { b, scal, .. } => {
                assert!((scal - 20.0).abs() < 1e-9, "{scal}");
                assert!((b + 1.0).abs() < 1e-9);
            }
            other => panic!("{other:?}"),
        }
        let s = signature_at(&g, &[0.0, 0.0, 0.0, 0.0, std::f64::consts::FRAC_PI_2]).unwrap();
        assert_eq!((s.plus, s.minus), (1, 4));
        assert!(!is_constant_curvature(&g).unwrap().holds());

        let shown = example14(1.0);
        match is_einstein(&shown).unwrap() {
            Einstein::Yes { scal, .. } => assert!((scal + 20.0).abs() < 1e-9, "{scal}"),
            other => panic!("{other:?}"),
        }
        let s = signature_at(&shown, &[0.0, 0.0, 0.0, 0.0, 1.5]).unwrap();
        assert_eq!((s.plus, s.minus), (4, 1));
    }

    #[test]
    fn example14_christoffel_sign() {
        for sign in [1.0, -1.0] {
            let g = example14(sign);
            let gamma = christoffels(&g).unwrap();
            let p = [0.3, 0.1, 0.2, -0.1, 1.4];
            let v = evaluate(&gamma[0][3][3], &p, g.chart().constants()).unwrap();
            assert!((v + (0.6f64).exp()).abs() < 1e-12, "sign {sign}: {v}");
        }
    }

    #[test]
    fn bianchi_and_ricci_symmetry() {
        let g = example14(-1.0);
        let c = curvature_at(&g, &[0.1, 0.2, 0.3, 0.1, 1.3]).unwrap();
        assert!(bianchi_residual(&c) < 1e-12);
        for i in 0..5 {
            for j in 0..5 {
                assert!((c.ricci[i][j] - c.ricci[j][i]).abs() < 1e-12);
            }
        }
    }
}
