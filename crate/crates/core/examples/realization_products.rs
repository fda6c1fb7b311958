// Metrics realizing prescribed counts of parallel symmetric tensors: products
// of a flat factor with Ricci-flat cones, and the cone with two null fields.

use projmob::constructions::catalog_entry;
use projmob::enumerate::{mobility_values, SignatureClass};
use projmob::mobility::{parallel_counts, signature_class};

fn main() {
    for name in ["case1_5_1_1", "case2_5", "example36"] {
        let e = catalog_entry(name).unwrap();
        let r = parallel_counts(&e.metric).unwrap();
        let n = e.metric.dim();
        let class = signature_class(&e.metric)
            .unwrap()
            .unwrap_or(SignatureClass::Lorentzian);
        let admissible = mobility_values(n, class).unwrap().contains(r.dimension);
        println!(
            "{name}: n = {n}, dim Par = {}, k = {}, l = {}, admissible = {admissible}",
            r.dimension,
            r.k.unwrap(),
            r.l.unwrap()
        );
        assert_eq!(Some(r.dimension), e.expected.par02);
    }
}
