use projmob::constructions::{catalog_entry, CatalogEntry};
use projmob::geometry::TensorField;
use projmob::mobility::{
    build_prolongation, kernel_dimension, loop_transport_dimension, mobility_of_metric, parallel_counts,
    section_of_triple, symmetric_two_bundle, LoopSpec,
};
use projmob::projective::SolutionTriple;
use projmob::symexpr::Expr;
use proptest::prelude::*;

fn triples(e: &CatalogEntry, b: f64) -> Vec<SolutionTriple> {
    let g = &e.metric;
    let mut out = vec![SolutionTriple::from_solution(g, TensorField::metric(g), b).unwrap()];
    out.extend(
        e.solutions
            .iter()
            .map(|s| SolutionTriple::from_solution(g, s.tensor.clone(), b).unwrap()),
    );
    out
}

#[test]
fn flat_prolongation_is_flat_with_full_kernel() {
    for n in [2, 3] {
        let e = catalog_entry(&format!("flat{n}")).unwrap();
        let bundle = build_prolongation(&e.metric, 0.0).unwrap();
        let r = kernel_dimension(&bundle, 3, 2).unwrap();
        let max = (n + 1) * (n + 2) / 2;
        assert_eq!(r.dimension, max);
        assert!(r.rank_sequence.iter().all(|&k| k == 0));
        let h = loop_transport_dimension(&bundle, &LoopSpec::default(), 0.01).unwrap();
        assert_eq!(h.dimension, max);
    }
}

#[test]
fn spheres_have_maximal_mobility() {
    for (name, d) in [("sphere3", 10), ("sphere4", 15)] {
        let e = catalog_entry(name).unwrap();
        let r = mobility_of_metric(&e.metric, &triples(&e, -1.0)).unwrap();
        assert_eq!(r.dimension, d, "{name}");
        assert!(r.exact, "{name}: the catalog solutions span the kernel");
    }
}

#[test]
fn known_solutions_lie_in_the_kernel() {
    let e = catalog_entry("example14").unwrap();
    let r = mobility_of_metric(&e.metric, &triples(&e, -1.0)).unwrap();
    assert_eq!(r.dimension, 4);
    assert_eq!(r.known_span, Some(4));
    for m in &r.known {
        assert!(m.parallel_residual < 1e-10, "{m:?}");
        assert!(m.kernel_residual < 1e-8, "{m:?}");
    }
    assert_eq!(r.admissible, Some(true));
}

#[test]
fn a_non_solution_section_is_not_parallel() {
    let e = catalog_entry("example14").unwrap();
    let g = &e.metric;
    let bundle = build_prolongation(g, -1.0).unwrap();
    let mut t = SolutionTriple::from_solution(g, e.solutions[0].tensor.clone(), -1.0).unwrap();
    t.mu = t.mu.add(&Expr::one());
    let r = bundle.section_residual(&section_of_triple(&t), 4, 0).unwrap();
    assert!(r > 1e-3);
}

#[test]
fn einstein_product_of_spheres_has_mobility_one() {
    let e = catalog_entry("s2xs3").unwrap();
    let r = mobility_of_metric(&e.metric, &triples(&e, -1.0)).unwrap();
    assert_eq!(r.dimension, 1);
    assert!(r.exact);
}

#[test]
fn sphere_tensor_bundle_oracles_agree() {
    let e = catalog_entry("sphere2").unwrap();
    let bundle = symmetric_two_bundle(&e.metric);
    let k = kernel_dimension(&bundle, 3, 3).unwrap();
    let h = loop_transport_dimension(&bundle, &LoopSpec::default(), 0.005).unwrap();
    assert_eq!(k.dimension, h.dimension);
    assert_eq!(k.dimension, 1);
}

#[test]
fn parallel_counts_of_flat_space_and_the_null_cone() {
    let e = catalog_entry("flat4").unwrap();
    let r = parallel_counts(&e.metric).unwrap();
    assert_eq!((r.dimension, r.k, r.l), (10, Some(4), Some(0)));
    let e = catalog_entry("example36").unwrap();
    let r = parallel_counts(&e.metric).unwrap();
    assert_eq!((r.dimension, r.k, r.l), (4, Some(2), Some(1)));
}

#[test]
fn non_einstein_metric_is_rejected() {
    let e = catalog_entry("warped_s2").unwrap();
    assert!(mobility_of_metric(&e.metric, &[]).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn kernel_dimension_does_not_depend_on_the_seed(seed in 0u64..1000) {
        let e = catalog_entry("example14").unwrap();
        let bundle = build_prolongation(&e.metric, -1.0).unwrap();
        let r = projmob::mobility::kernel_dimension_with(
            &bundle,
            &projmob::mobility::KernelOptions { seed, ..Default::default() },
        )
        .unwrap();
        prop_assert_eq!(r.dimension, 4);
    }
}
