//! Projective equivalence: the tensor L(g, ḡ), solutions of the main
//! equation and of the extended system, metric reconstruction, projective
//! deformations of vector fields and a geodesic cross-check.

mod deformation;
mod geodesic;
mod pair;
mod solution;

use thiserror::Error;

use crate::geometry::GeometryError;

pub use deformation::{fit_metric_multiple, projective_deformation, Deformation, MetricMultiple};
pub use geodesic::{geodesic_projective_test, random_seeds, GeodesicReport, GeodesicSeed, SeedOutcome};
pub use pair::{admissible_shift, l_of_pair, l_of_pair_at, reconstruct_metric};
pub use solution::{
    lambda_of, span_dimension, verify_extsys, verify_extsys_with, verify_main, verify_main_with, ExtsysReport,
    MainReport, Residual, SolutionTriple, RESIDUAL_TOL,
};

#[derive(Debug, Error)]
pub enum ProjectiveError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("B = {given} does not match -Scal/(n(n-1)) = {computed}")]
    BMismatch { given: f64, computed: f64 },
    #[error("metric is not Einstein (witness {witness:?})")]
    NotEinstein { witness: Vec<f64> },
    #[error("L is degenerate at {point:?}; try L + t g with t = {suggested_shift:?}")]
    DegenerateL {
        point: Vec<f64>,
        suggested_shift: Option<f64>,
    },
    #[error("{0}")]
    Invalid(String),
}

impl From<crate::symexpr::EvalError> for ProjectiveError {
    fn from(e: crate::symexpr::EvalError) -> Self {
        ProjectiveError::Geometry(e.into())
    }
}

/// Exact rational for a fitted real constant.
pub(crate) fn fitted_constant(x: f64) -> crate::symexpr::Expr {
    use crate::symexpr::{Expr, Rational};
    if x.abs() < 1e-13 {
        return Expr::zero();
    }
    match Rational::approximate_float(x) {
        Some(r) => Expr::constant(r),
        None => Expr::real(x),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::TensorField;
    use crate::symexpr::Expr;
    use crate::testutil::{example14, example14_solutions, flat};

    #[test]
    fn example14_solutions_pass_both_systems() {
        let g = example14();
        let ls = example14_solutions(&g);
        for l in &ls {
            let r = verify_main(&g, l).unwrap();
            assert!(r.pass && !r.affine, "{r:?}");
            let t = SolutionTriple::from_solution(&g, l.clone(), -1.0).unwrap();
            let e = verify_extsys(&g, &t).unwrap();
            assert!(e.pass, "{e:?}");
        }
        let gt = TensorField::metric(&g);
        let r = verify_main(&g, &gt).unwrap();
        assert!(r.pass && r.affine);
        let mut all: Vec<&TensorField> = ls.iter().collect();
        all.push(&gt);
        assert_eq!(span_dimension(&all, 6, 1).unwrap(), 4);
    }

    #[test]
    fn perturbation_fails() {
        let g = example14();
        let l1 = &example14_solutions(&g)[0];
        let bump = crate::testutil::sym(g.chart(), &[vec!["0"], vec!["0", "x2^2"]]);
        let l = TensorField::combination(&[(Expr::one(), l1), (Expr::real(0.1), &bump)]).unwrap();
        assert!(!verify_main(&g, &l).unwrap().pass);
    }

    #[test]
    fn reconstruction_round_trip() {
        let g = example14();
        let l1 = &example14_solutions(&g)[0];
        let gt = TensorField::metric(&g);
        let l = TensorField::combination(&[(Expr::one(), &gt), (Expr::real(0.1), l1)]).unwrap();
        let gbar = reconstruct_metric(&g, &l).unwrap();
        let p = [0.1, 0.2, -0.3, 0.1, 1.5];
        let back = l_of_pair_at(&g, &gbar, &p).unwrap();
        let lv = l.values_at(&p).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                assert!((back[(i, j)] - lv[i * 5 + j]).abs() < 1e-10);
            }
        }
        let seeds = random_seeds(g.chart(), 6, 0);
        assert!(geodesic_projective_test(&g, &gbar, &seeds, 100, 0.005).unwrap().pass);
        let bad = crate::geometry::MetricField::new(g.chart().clone(), {
            let mut m = g.components().clone();
            m[3][3] = m[3][3].add(&g.chart().parse("0.1*x1^2").unwrap());
            m
        })
        .unwrap();
        assert!(!geodesic_projective_test(&g, &bad, &seeds, 100, 0.005).unwrap().pass);
    }

    #[test]
    fn flat_homothety_and_killing() {
        let g = flat(2);
        let c = g.chart();
        let v = TensorField::vector(c.clone(), vec![c.parse("y0").unwrap(), c.parse("y1").unwrap()]).unwrap();
        let d = projective_deformation(&v, &g).unwrap();
        assert!(d.main.pass);
        assert!((d.homothety.unwrap().c - 2.0 / 3.0).abs() < 1e-12);
        let k = TensorField::vector(c.clone(), vec![Expr::one(), Expr::zero()]).unwrap();
        let d = projective_deformation(&k, &g).unwrap();
        assert!(d.phi.components().iter().all(Expr::is_zero));
    }
}
