// Projective vector fields from solutions: φ(Λ♯) differs from 2B L by a
// constant multiple of g, and on a B = 0 metric λΛ♯ is projective.

use projmob::constructions::{catalog_entry, warped, warped_spec};
use projmob::geometry::{musical, TensorField};
use projmob::projective::{fit_metric_multiple, projective_deformation, SolutionTriple};
use projmob::symexpr::Expr;

fn main() {
    let e = catalog_entry("example14").unwrap();
    let g = &e.metric;
    let t = SolutionTriple::from_solution(g, e.solutions[0].tensor.clone(), -1.0).unwrap();
    let sharp = musical(g, &t.lambda_form, 0).unwrap();
    let d = projective_deformation(&sharp, g).unwrap();
    println!("φ(Λ♯) solves the main equation: {}", d.main.pass);
    let rest = TensorField::combination(&[(Expr::one(), &d.phi), (Expr::real(-2.0 * t.b), &t.l)]).unwrap();
    let fit = fit_metric_multiple(&rest, g).unwrap();
    println!(
        "φ(Λ♯) - 2B L1 = {:.6} g, residual {:.1e}",
        fit.c, fit.residual.max_ratio
    );
    assert!(fit.holds());

    let fam = warped(warped_spec(false).unwrap()).unwrap();
    let v = fam.lambda_sharp.scale(&fam.triple.lambda);
    let d = projective_deformation(&v, &fam.metric).unwrap();
    println!(
        "warped metric: φ(λΛ♯) residual {:.1e}, homothety: {}",
        d.main.residual.max_ratio,
        d.homothety.is_some()
    );
    assert!(d.main.pass);
}
