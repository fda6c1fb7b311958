// Degree of mobility from two independent estimators: the curvature kernel
// of the prolongation connection and holonomy along closed loops.

use projmob::constructions::catalog_entry;
use projmob::enumerate::{mobility_values, SignatureClass};
use projmob::geometry::TensorField;
use projmob::mobility::{build_prolongation, loop_transport_dimension, mobility_of_metric, LoopSpec};
use projmob::projective::SolutionTriple;

fn main() {
    let e = catalog_entry("example14").unwrap();
    let g = &e.metric;
    let mut known = vec![SolutionTriple::from_solution(g, TensorField::metric(g), -1.0).unwrap()];
    for s in &e.solutions {
        known.push(SolutionTriple::from_solution(g, s.tensor.clone(), -1.0).unwrap());
    }
    let r = mobility_of_metric(g, &known).unwrap();
    println!(
        "kernel: D = {} ({}), ranks {:?}, spectral gap {:.1e}",
        r.dimension,
        if r.exact { "exact" } else { "upper bound" },
        r.rank_sequence,
        r.spectral_gap.unwrap_or(f64::INFINITY)
    );

    let bundle = build_prolongation(g, -1.0).unwrap();
    let h = loop_transport_dimension(&bundle, &LoopSpec::default(), 0.002).unwrap();
    println!("loop transport: D = {}", h.dimension);
    assert_eq!(r.dimension, 4);
    assert_eq!(h.dimension, 4);

    let lor = mobility_values(5, SignatureClass::Lorentzian).unwrap();
    let rie = mobility_values(5, SignatureClass::Riemannian).unwrap();
    println!("n = 5: Lorentzian {:?}, Riemannian {:?}", lor.numbers(), rie.numbers());
    assert!(lor.contains(4) && !rie.contains(4));

    let flat = catalog_entry("flat3").unwrap();
    let known: Vec<SolutionTriple> = flat
        .solutions
        .iter()
        .map(|s| SolutionTriple::from_solution(&flat.metric, s.tensor.clone(), 0.0).unwrap())
        .collect();
    let r = mobility_of_metric(&flat.metric, &known).unwrap();
    println!("flat R^3: D = {} (exact: {})", r.dimension, r.exact);
    assert_eq!(r.dimension, 10);
}
