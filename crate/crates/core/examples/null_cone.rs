// The cone dr² + r²(−dt² + e^{2t}h) with two parallel fields v and V built
// from a function F with ∇∇F = C h.

use projmob::constructions::{catalog_entry, null_cone_family};
use projmob::symexpr::parse;

fn main() {
    let flat = catalog_entry("flat3").unwrap();
    let h = &flat.metric;
    let f = parse("(x1^2 + x2^2 + x3^2)/2", &["x1", "x2", "x3"]).unwrap();
    let fam = null_cone_family(h, &f, 1.0).unwrap();
    let c = &fam.checks;
    println!("|∇∇F - C h| = {:.1e}", c.hessian_residual);
    println!("|∇v| = {:.1e}, |∇V| = {:.1e}", c.v_residual, c.big_v_residual);
    println!("|g(v,V) + C| = {:.1e}", c.inner_residual);
    println!(
        "Ricci of cone {:.1e}, of base {:.1e}",
        c.cone_max_ricci, c.base_max_ricci
    );
    assert!(c.passes(1e-8));

    let lin = parse("x1 + 2*x2", &["x1", "x2", "x3"]).unwrap();
    let fam = null_cone_family(h, &lin, 0.0).unwrap();
    println!(
        "linear F, C = 0: V null and orthogonal to v: {}, grad F null: {}",
        fam.checks.null_and_orthogonal, fam.checks.grad_parallel_null
    );
}
