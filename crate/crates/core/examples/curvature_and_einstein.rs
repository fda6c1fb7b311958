// Curvature of the five-dimensional Einstein metric of the catalog: Einstein
// test, scalar curvature, signature, and the constant-curvature test.

use projmob::constructions::catalog_entry;
use projmob::geometry::{curvature_at, is_constant_curvature, is_einstein, signature_over_box, Einstein};

fn main() {
    let e = catalog_entry("example14").unwrap();
    let g = &e.metric;
    println!("{}: {}", e.name, e.description);

    let sig = signature_over_box(g).unwrap();
    println!("signature: {} plus, {} minus", sig.plus, sig.minus);

    let p = g.chart().center();
    let c = curvature_at(g, p.coords()).unwrap();
    println!("Scal at {:?} = {:.12}", p.coords(), c.scal);
    println!(
        "max |Riem| = {:.6}, first Bianchi defect = {:.2e}",
        c.max_riemann(),
        projmob::geometry::bianchi_residual(&c)
    );

    match is_einstein(g).unwrap() {
        Einstein::Yes { b, scal, max_residual } => {
            println!("Einstein: Scal = {scal:.12}, B = {b}, residual {max_residual:.1e}");
            assert!((scal - 20.0).abs() < 1e-6);
        }
        Einstein::No { witness, .. } => panic!("not Einstein at {witness:?}"),
    }
    let cc = is_constant_curvature(g).unwrap();
    println!("constant curvature: {}", cc.holds());
    assert!(!cc.holds());

    let s3 = catalog_entry("sphere3").unwrap();
    assert!(is_constant_curvature(&s3.metric).unwrap().holds());
    println!("unit S^3 has constant curvature");
}
