// Cones over Einstein bases: the cone vector field, the flatness and
// Ricci-flatness criteria, lifting solutions to parallel tensors, products.

use projmob::constructions::{
    catalog_entry, cone, cone_facts, lift_residual, lift_triple, product, round_sphere, LIFT_SIGN,
};
use projmob::geometry::TensorField;
use projmob::mobility::{mobility_of_metric, parallel_tensor_dimension};
use projmob::projective::SolutionTriple;
use projmob::symexpr::rat;

fn main() {
    let s3 = round_sphere(3, rat(1, 1), "a").unwrap();
    let c = cone(&s3, 1.0).unwrap();
    let xi = c.cone_field.as_ref().unwrap();
    println!("cone over S^3: |∇ξ - Id| = {:.1e}", xi.residual);
    let f = cone_facts(&c).unwrap();
    println!(
        "flat {} (base curvature 1: {}), Ricci-flat {} (base Scal = n(n-1): {})",
        f.cone_flat, f.base_unit_curvature, f.cone_ricci_flat, f.base_einstein_nn1
    );
    assert!(f.consistent() && f.cone_flat);

    // Every solution on the base lifts to a parallel symmetric tensor.
    let entry = catalog_entry("sphere3").unwrap();
    let base = &entry.metric;
    let cone3 = cone(base, 1.0).unwrap();
    for s in entry.solutions.iter().take(3) {
        let t = SolutionTriple::from_solution(base, s.tensor.clone(), -1.0).unwrap();
        let a = lift_triple(&cone3, &t, LIFT_SIGN).unwrap();
        println!("lift of {}: |∇Â| = {:.1e}", s.name, lift_residual(&cone3, &a).unwrap());
    }
    let g = TensorField::metric(base);
    let d = mobility_of_metric(base, &[SolutionTriple::from_solution(base, g, -1.0).unwrap()]).unwrap();
    let par = parallel_tensor_dimension(&cone3.metric).unwrap();
    println!("D(S^3) = {}, dim Par(cone) = {}", d.dimension, par.dimension);
    assert_eq!(d.dimension, par.dimension);

    // ξ1 + ξ2 on a product of cones.
    let a = cone(&round_sphere(1, rat(1, 1), "u").unwrap(), 1.0).unwrap();
    let b = projmob::constructions::cone_with(&round_sphere(2, rat(1, 1), "v").unwrap(), 1.0, "s").unwrap();
    let p = product(&a, &b).unwrap();
    println!("product: |∇(ξ1+ξ2) - Id| = {:.1e}", p.cone_field.unwrap().residual);
}
