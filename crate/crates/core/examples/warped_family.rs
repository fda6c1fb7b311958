// A solution with B = 0 and μ = 0 on a metric warped over a two-dimensional
// Lorentzian base, with the block identities and extra parallel fields.

use projmob::constructions::{lemma49_fields, warped, warped_spec};

fn main() {
    let fam = warped(warped_spec(false).unwrap()).unwrap();
    let r = &fam.report;
    println!("metric dimension {}", fam.metric.dim());
    println!("main equation residual {:.1e}", r.main.residual.max_ratio);
    if let Some(x) = &r.extsys {
        println!("extended system with B = {}: {}", x.b, x.pass);
    }
    println!(
        "connection {:.1e}, block curvature {:.1e}, cross curvature {:.1e}, Ricci {:.1e}",
        r.connection, r.block_curvature, r.cross_curvature, r.ricci
    );
    assert!(r.identities_hold(1e-8));

    let (fields, rank) = lemma49_fields(&fam, 1).unwrap();
    for (i, f) in fields.iter().enumerate() {
        let w: Vec<String> = f.w.components().iter().map(|c| c.to_string()).collect();
        println!("W{} = ({}): |∇W| = {:.1e}", i + 1, w.join(", "), f.residual);
    }
    println!("pointwise rank of {{W_i, Λ♯}} = {rank}");
    assert_eq!(rank, fields.len() + 1);
}
