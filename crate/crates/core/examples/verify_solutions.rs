// Check the known solutions of the main equation on the Einstein metric,
// extend them to the extended system, and measure their span with g.

use projmob::constructions::catalog_entry;
use projmob::geometry::{is_einstein, Einstein, TensorField};
use projmob::projective::{span_dimension, verify_extsys, verify_main, SolutionTriple};

fn main() {
    let e = catalog_entry("example14").unwrap();
    let g = &e.metric;
    let Einstein::Yes { b, .. } = is_einstein(g).unwrap() else {
        panic!("not Einstein")
    };
    for s in &e.solutions {
        let main = verify_main(g, &s.tensor).unwrap();
        let t = SolutionTriple::from_solution(g, s.tensor.clone(), b).unwrap();
        let ext = verify_extsys(g, &t).unwrap();
        println!(
            "{}: main residual {:.1e}, affine {}, extended system {}, mu = {}",
            s.name, main.residual.max_ratio, main.affine, ext.pass, t.mu
        );
        assert!(main.pass && ext.pass);
    }
    let gt = TensorField::metric(g);
    let mut all = vec![&gt];
    all.extend(e.solutions.iter().map(|s| &s.tensor));
    let d = span_dimension(&all, 6, 0).unwrap();
    println!("dim span{{g, L1, L2, L3}} = {d}");
    assert_eq!(d, 4);
}
