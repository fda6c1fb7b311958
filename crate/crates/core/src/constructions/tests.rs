use super::*;
use crate::geometry::{is_constant_curvature, signature_over_box, ConstantCurvature};
use crate::projective::{verify_extsys, SolutionTriple};
use crate::symexpr::{evaluate, rat};

#[test]
fn cone_over_unit_sphere_is_flat() {
    let s3 = round_sphere(3, rat(1, 1), "a").unwrap();
    let c = cone(&s3, 1.0).unwrap();
    match is_constant_curvature(&c.metric).unwrap() {
        ConstantCurvature::Yes { c, .. } => assert!(c.abs() < 1e-10),
        other => panic!("{other:?}"),
    }
    let facts = cone_facts(&c).unwrap();
    assert!(facts.cone_flat && facts.base_unit_curvature && facts.consistent());
}

#[test]
fn cone_over_example14_is_ricci_flat_not_flat() {
    let e = catalog_entry("example36").unwrap();
    let c = Constructed {
        metric: e.metric.clone(),
        cone_field: e.cone_field.clone(),
        base: e.cone_base.clone(),
    };
    let f = cone_facts(&c).unwrap();
    assert!(f.cone_ricci_flat && !f.cone_flat && f.consistent(), "{f:?}");
    assert!(f.cone_max_riemann > 1e-3);
    assert_eq!(signature_over_box(&e.metric).unwrap().unordered(), (2, 4));
}

#[test]
fn negative_cone_keeps_the_cone_field() {
    let s2 = round_sphere(2, rat(1, 1), "a").unwrap();
    let c = cone(&s2, -1.0).unwrap();
    assert!(c.cone_field.unwrap().residual < 1e-10);
    let n = negated(&cone(&s2, 1.0).unwrap()).unwrap();
    let xi = &n.cone_field.as_ref().unwrap().xi;
    assert!(identity_residual(xi, &n.metric).unwrap() < 1e-10);
}

#[test]
fn product_sums_cone_fields_and_rejects_clashes() {
    let s2 = round_sphere(2, rat(1, 1), "a").unwrap();
    let a = cone_with(&s2, 1.0, "r1").unwrap();
    let b = cone_with(&round_sphere(2, rat(1, 1), "b").unwrap(), 1.0, "r2").unwrap();
    let p = product(&a, &b).unwrap();
    assert!(p.cone_field.unwrap().residual < 1e-10);
    assert!(matches!(product(&a, &a), Err(ConstructionError::NameClash(_))));
}

#[test]
fn lift_of_sphere_triples_is_parallel_with_minus_sign() {
    let e = catalog_entry("sphere3").unwrap();
    let c = cone(&e.metric, 1.0).unwrap();
    assert!(!e.triples.is_empty());
    for (name, t) in &e.triples {
        let a = lift_triple(&c, t, LIFT_SIGN).unwrap();
        let r = lift_residual(&c, &a).unwrap();
        assert!(r < 1e-8, "{name}: {r}");
        let plus = lift_triple(&c, t, 1.0).unwrap();
        assert!(lift_residual(&c, &plus).unwrap() > 1e-3, "{name}");
    }
    // L = g lifts to the cone metric itself.
    let g = crate::geometry::TensorField::metric(&e.metric);
    let t = SolutionTriple::from_solution(&e.metric, g, -1.0).unwrap();
    assert!(verify_extsys(&e.metric, &t).unwrap().pass);
    let a = lift_triple(&c, &t, LIFT_SIGN).unwrap();
    assert!(lift_residual(&c, &a).unwrap() < 1e-8);
}

fn family() -> WarpedFamily {
    *catalog_entry("warped").unwrap().warped.unwrap()
}

#[test]
fn lemma49_field_matches_closed_form() {
    let fam = family();
    let u = fam.spec.blocks[1].chart().coord("w1").unwrap();
    let w = lemma49_parallel_field(&fam, 2, &u).unwrap();
    assert!(w.residual < 1e-8, "{}", w.residual);
    assert!(w.directional.max() < 1e-8, "{:?}", w.directional);
    assert!(w.directional.along_tilde.is_some());
    // W = (1/f_2) ∂_{w1} + w1 ∂_y with f_2 = x − 2 (C = 0).
    let p = [3.1, 0.2, 0.3, -0.4, 0.5, 0.6];
    let vals = w.w.values_at(&p).unwrap();
    let f2 = 3.1 - 2.0;
    let want = [0.0, 0.5, 0.0, 0.0, 1.0 / f2, 0.0];
    for (a, b) in vals.iter().zip(want) {
        assert!((a - b).abs() < 1e-12, "{vals:?}");
    }
    let (fields, rank) = lemma49_fields(&fam, 2).unwrap();
    assert_eq!(fields.len(), 2);
    assert_eq!(rank, 3);
}

#[test]
fn lemma49_preconditions() {
    let fam = family();
    assert!(matches!(
        lemma49_parallel_field(&fam, 2, &crate::symexpr::Expr::zero()),
        Err(ConstructionError::Precondition(_))
    ));
    let curved = *catalog_entry("warped_s2").unwrap().warped.unwrap();
    let u = curved.spec.blocks[1].chart().coord("w0").unwrap();
    assert!(matches!(
        lemma49_parallel_field(&curved, 2, &u),
        Err(ConstructionError::Precondition(_))
    ));
}

#[test]
fn warped_rejects_vanishing_factor() {
    let mut spec = warped_spec(false).unwrap();
    spec.c = -2.0;
    match warped(spec) {
        Err(ConstructionError::Precondition(m)) => assert!(m.contains("warping factor"), "{m}"),
        other => panic!("{:?}", other.map(|_| ())),
    }
}

#[test]
fn warped_triple_trace_function() {
    let fam = family();
    let v = evaluate(
        &fam.triple.lambda,
        &[3.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        fam.metric.chart().constants(),
    )
    .unwrap();
    // ½ trace L♯ = λ + C + ½ Σ ρ_i dim N_i
    assert!((v - 6.0).abs() < 1e-12, "{v}");
    assert!(fam.report.extsys.as_ref().unwrap().pass);
}

#[test]
fn null_cone_with_linear_potential() {
    let h = catalog_entry("flat3").unwrap().metric;
    let f = h.chart().parse("x1 + 2*x2").unwrap();
    let fam = null_cone_family(&h, &f, 0.0).unwrap();
    let c = &fam.checks;
    assert!(c.passes(1e-8), "{c:?}");
    assert!(!c.null_and_orthogonal && !c.grad_parallel_null);
    // Hessian condition violated
    let bad = h.chart().parse("x1^3").unwrap();
    assert!(null_cone_family(&h, &bad, 0.0).is_err());
}

#[test]
fn catalog_builds() {
    let all = catalog().unwrap();
    assert_eq!(all.len(), catalog_names().len());
    assert!(matches!(catalog_entry("nope"), Err(ConstructionError::Unknown(_))));
}
