// Admissible degrees of mobility, dimensions of essential projective vector
// fields, the affine-only lists, and the plot data for both signatures.

use projmob::enumerate::{
    affine_only_values, figure1_table, figure1_tsv, mobility_values, projective_dim_values, AffineRegime,
    SignatureClass,
};

fn main() {
    for n in [3, 4, 5, 6] {
        let r = mobility_values(n, SignatureClass::Riemannian).unwrap();
        let l = mobility_values(n, SignatureClass::Lorentzian).unwrap();
        let p = projective_dim_values(n, SignatureClass::Lorentzian).unwrap();
        println!(
            "n = {n}: Riemannian {:?}, Lorentzian {:?}, projective {:?}",
            r.numbers(),
            l.numbers(),
            p.numbers()
        );
    }
    println!(
        "n = 4 affine only: nonzero Scal {:?}, Ricci-flat {:?}",
        affine_only_values(4, AffineRegime::NonzeroScal).unwrap().numbers(),
        affine_only_values(4, AffineRegime::RicciFlat).unwrap().numbers()
    );
    let rows = figure1_table(3, 10).unwrap();
    print!("{}", figure1_tsv(&rows));
}
