use nalgebra::{DMatrix, DVector};
use projmob::constructions::{catalog_entry, round_sphere};
use projmob::geometry::{
    christoffels, curvature_at, is_constant_curvature, is_einstein, lie_derivative_metric, musical, signature_at,
    signature_over_box, Chart, ConstantCurvature, Einstein, GeometryError, MetricField, TensorField,
};
use projmob::projective::SolutionTriple;
use projmob::symexpr::{evaluate, rat, Expr};
use proptest::prelude::*;

fn euclidean(n: usize) -> MetricField {
    let names: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let chart = Chart::new("E", &refs, &vec![(-1.0, 1.0); n]).unwrap();
    MetricField::diagonal(chart, vec![Expr::one(); n]).unwrap()
}

/// Γ^k_ij from central differences of the numeric metric.
fn fd_christoffels(g: &MetricField, p: &[f64]) -> Vec<DMatrix<f64>> {
    let n = g.dim();
    let h = 1e-5;
    let dg: Vec<DMatrix<f64>> = (0..n)
        .map(|a| {
            let mut hi = p.to_vec();
            let mut lo = p.to_vec();
            hi[a] += h;
            lo[a] -= h;
            (g.values_at(&hi).unwrap() - g.values_at(&lo).unwrap()) / (2.0 * h)
        })
        .collect();
    let ginv = g.values_at(p).unwrap().try_inverse().unwrap();
    (0..n)
        .map(|k| {
            DMatrix::from_fn(n, n, |i, j| {
                0.5 * (0..n)
                    .map(|l| ginv[(k, l)] * (dg[i][(l, j)] + dg[j][(l, i)] - dg[l][(i, j)]))
                    .sum::<f64>()
            })
        })
        .collect()
}

#[test]
fn flat_space_has_no_christoffels_or_curvature() {
    let g = euclidean(3);
    for row in christoffels(&g).unwrap() {
        assert!(row.iter().flatten().all(Expr::is_zero));
    }
    let c = curvature_at(&g, &[0.1, 0.2, 0.3]).unwrap();
    assert_eq!(c.max_riemann(), 0.0);
    assert_eq!(c.scal, 0.0);
}

#[test]
fn sphere_christoffels_match_finite_differences_and_scal_is_two() {
    let g = round_sphere(2, rat(1, 1), "a").unwrap();
    let gamma = christoffels(&g).unwrap();
    for p in g.chart().sample_points(5, 3) {
        let fd = fd_christoffels(&g, p.coords());
        for k in 0..2 {
            for i in 0..2 {
                for j in 0..2 {
                    let v = evaluate(&gamma[k][i][j], p.coords(), g.chart().constants()).unwrap();
                    assert!((v - fd[k][(i, j)]).abs() < 1e-7, "Γ^{k}_{i}{j}");
                }
            }
        }
        assert!((curvature_at(&g, p.coords()).unwrap().scal - 2.0).abs() < 1e-10);
    }
}

#[test]
fn einstein_metric_has_scal_twenty_everywhere() {
    let e = catalog_entry("example14").unwrap();
    for p in e.metric.chart().sample_points(12, 9) {
        let c = curvature_at(&e.metric, p.coords()).unwrap();
        assert!((c.scal - 20.0).abs() < 1e-8);
    }
    match is_einstein(&e.metric).unwrap() {
        Einstein::Yes { b, scal, .. } => {
            assert!((b + 1.0).abs() < 1e-10);
            assert!((scal - 20.0).abs() < 1e-8);
        }
        other => panic!("{other:?}"),
    }
    assert!(!is_constant_curvature(&e.metric).unwrap().holds());
}

#[test]
fn signatures() {
    let g = euclidean(4);
    let s = signature_over_box(&g).unwrap();
    assert_eq!((s.plus, s.minus), (4, 0));
    let e = catalog_entry("example14").unwrap();
    let p = [0.0, 0.0, 0.0, 0.0, std::f64::consts::FRAC_PI_2];
    assert_eq!(signature_at(&e.metric, &p).unwrap().unordered(), (1, 4));
    let c = catalog_entry("example36").unwrap();
    let p = [1.0, 0.0, 0.0, 0.0, 0.0, std::f64::consts::FRAC_PI_2];
    assert_eq!(signature_at(&c.metric, &p).unwrap().unordered(), (2, 4));
}

#[test]
fn degenerate_metric_is_rejected() {
    let chart = Chart::new("deg", &["x", "y"], &[(0.0, 1.0), (0.0, 1.0)]).unwrap();
    let err = MetricField::from_lower_triangle(chart, &[vec!["1"], vec!["1", "1"]]).unwrap_err();
    assert!(matches!(err, GeometryError::Degenerate { .. }));
}

#[test]
fn perturbed_flat_metric_is_not_einstein() {
    let chart = Chart::new("pert", &["x1", "x2", "x3"], &[(-1.0, 1.0); 3]).unwrap();
    let g =
        MetricField::from_lower_triangle(chart, &[vec!["1 + x2^2/10"], vec!["0", "1"], vec!["0", "0", "1"]]).unwrap();
    match is_einstein(&g).unwrap() {
        Einstein::No { witness, residual, .. } => {
            assert_eq!(witness.len(), 3);
            assert!(residual.abs() > 1e-6);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn constant_curvature_detection() {
    let s3 = round_sphere(3, rat(1, 1), "a").unwrap();
    match is_constant_curvature(&s3).unwrap() {
        ConstantCurvature::Yes { c, .. } => assert!((c - 1.0).abs() < 1e-10),
        other => panic!("{other:?}"),
    }
    match is_constant_curvature(&euclidean(3)).unwrap() {
        ConstantCurvature::Yes { c, .. } => assert_eq!(c, 0.0),
        other => panic!("{other:?}"),
    }
    match is_einstein(&euclidean(3)).unwrap() {
        Einstein::Yes { b, .. } => assert_eq!(b, 0.0),
        other => panic!("{other:?}"),
    }
}

#[test]
fn lie_derivatives_of_translation_and_dilation() {
    let g = euclidean(2);
    let c = g.chart().clone();
    let dx = TensorField::vector(c.clone(), vec![Expr::one(), Expr::zero()]).unwrap();
    assert!(lie_derivative_metric(&dx, &g)
        .unwrap()
        .components()
        .iter()
        .all(Expr::is_zero));
    let pos = TensorField::vector(c.clone(), vec![c.parse("x0").unwrap(), c.parse("x1").unwrap()]).unwrap();
    let l = lie_derivative_metric(&pos, &g).unwrap();
    let want = [2.0, 0.0, 0.0, 2.0];
    assert_eq!(l.values_at(&[0.3, -0.4]).unwrap(), want);
}

#[test]
fn raising_a_differential() {
    let g = euclidean(2);
    let dx = TensorField::one_form(g.chart().clone(), vec![Expr::one(), Expr::zero()]).unwrap();
    let v = musical(&g, &dx, 0).unwrap();
    assert_eq!(v.valence(), (1, 0));
    assert_eq!(v.values_at(&[0.1, 0.2]).unwrap(), vec![1.0, 0.0]);
}

#[test]
fn norm_of_lambda_computed_two_ways() {
    let e = catalog_entry("example14").unwrap();
    let g = &e.metric;
    let t = SolutionTriple::from_solution(g, e.solutions[0].tensor.clone(), -1.0).unwrap();
    let sharp = musical(g, &t.lambda_form, 0).unwrap();
    for p in g.chart().sample_points(6, 4) {
        let lam = DVector::from_vec(t.lambda_form.values_at(p.coords()).unwrap());
        let v = DVector::from_vec(sharp.values_at(p.coords()).unwrap());
        let gm = g.values_at(p.coords()).unwrap();
        let via_form = lam.dot(&(gm.clone().try_inverse().unwrap() * &lam));
        let via_vector = v.dot(&(gm * &v));
        assert!((via_form - via_vector).abs() < 1e-10 * (1.0 + via_form.abs()));
    }
}

fn poly_field(chart: &std::sync::Arc<Chart>, coeffs: &[i32]) -> TensorField {
    let names = chart.coordinates();
    let n = names.len();
    let comps = (0..n)
        .map(|a| {
            let text = format!("{} + {}*{}", coeffs[2 * a], coeffs[2 * a + 1], names[(a + 1) % n]);
            chart.parse(&text).unwrap()
        })
        .collect();
    TensorField::vector(chart.clone(), comps).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn lowering_then_raising_is_identity(coeffs in prop::collection::vec(-3i32..=3, 10)) {
        let e = catalog_entry("example14").unwrap();
        let g = &e.metric;
        let v = poly_field(g.chart(), &coeffs);
        let back = musical(g, &musical(g, &v, 0).unwrap(), 0).unwrap();
        for p in g.chart().sample_points(3, 1) {
            let a = v.values_at(p.coords()).unwrap();
            let b = back.values_at(p.coords()).unwrap();
            for (x, y) in a.iter().zip(&b) {
                prop_assert!((x - y).abs() < 1e-12 * (1.0 + x.abs()));
            }
        }
    }

    #[test]
    fn scaling_a_metric_scales_scal_inversely(k in 1i64..6) {
        let g = round_sphere(2, rat(k as i128, 1), "a").unwrap();
        let p = g.chart().center();
        let s = curvature_at(&g, p.coords()).unwrap().scal;
        prop_assert!((s - 2.0 / k as f64).abs() < 1e-10);
    }
}
