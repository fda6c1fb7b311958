// Build a second metric with the same unparametrized geodesics from a
// solution L, recover L from the pair, and cross-check with geodesics.

use projmob::constructions::catalog_entry;
use projmob::geometry::TensorField;
use projmob::projective::{geodesic_projective_test, l_of_pair_at, random_seeds, reconstruct_metric};
use projmob::symexpr::{rat, Expr};

fn main() {
    let e = catalog_entry("example14").unwrap();
    let g = &e.metric;
    let l1 = &e.solutions[0].tensor;
    let gt = TensorField::metric(g);
    let l = TensorField::combination(&[(Expr::one(), &gt), (Expr::constant(rat(1, 10)), l1)]).unwrap();
    let gbar = reconstruct_metric(g, &l).unwrap();

    let p = g.chart().center();
    let back = l_of_pair_at(g, &gbar, p.coords()).unwrap();
    let want = nalgebra::DMatrix::from_row_slice(5, 5, &l.values_at(p.coords()).unwrap());
    println!(
        "|L(g, gbar) - (g + L1/10)| at the center = {:.1e}",
        (back - want).amax()
    );

    let seeds = random_seeds(g.chart(), 20, 0);
    let ok = geodesic_projective_test(g, &gbar, &seeds, 100, 0.005).unwrap();
    println!("geodesics agree: {} over {} seeds", ok.pass, ok.seeds.len());
    assert!(ok.pass);

    // A perturbation that is not a solution breaks projective equivalence.
    let bad = TensorField::combination(&[
        (Expr::one(), &gt),
        (
            Expr::constant(rat(1, 10)),
            &TensorField::symmetric(g.chart().clone(), {
                let mut m = vec![vec![Expr::zero(); 5]; 5];
                m[1][1] = g.chart().parse("1 + x1^2").unwrap();
                m
            })
            .unwrap(),
        ),
    ])
    .unwrap();
    let gbad = reconstruct_metric(g, &bad).unwrap();
    let ko = geodesic_projective_test(g, &gbad, &seeds, 100, 0.005).unwrap();
    println!("non-solution perturbation passes: {}", ko.pass);
    assert!(!ko.pass);
}
