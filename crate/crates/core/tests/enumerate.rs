use std::collections::BTreeSet;

use projmob::enumerate::{
    affine_only_values, figure1_table, figure1_tsv, mobility_values, projective_dim_values, AffineRegime,
    EnumerateError, SignatureClass, Tag,
};
use proptest::prelude::*;

/// Scans every (k, l) in a square grid and keeps those meeting the stated conditions.
fn oracle(n: usize, lorentzian: bool) -> Vec<usize> {
    let n = n as i64;
    let mut out = BTreeSet::new();
    for k in 0..=n + 2 {
        for l in 0..=n + 2 {
            let d = k * (k + 1) / 2 + l;
            let first = n >= 5 && k <= n - 4 && l >= 1 && l <= (n + 1 - k).div_euclid(5);
            let second = lorentzian
                && n >= 5
                && (k - (n - 3)).rem_euclid(5) == 0
                && (2..=n - 3).contains(&k)
                && l == (n + 2 - k).div_euclid(5);
            if (first || second) && d >= 2 {
                out.insert(d as usize);
            }
        }
    }
    out.insert(((n + 1) * (n + 2) / 2) as usize);
    out.into_iter().collect()
}

fn affine_oracle(n: usize, div: usize, kmax: i64) -> Vec<usize> {
    let mut out = BTreeSet::new();
    for k in 0..=kmax {
        let k = k as usize;
        for l in 1..=n {
            if l <= (n - k) / div {
                out.insert(k * (k + 1) / 2 + l);
            }
        }
    }
    out.insert(n * (n + 1) / 2);
    out.into_iter().collect()
}

#[test]
fn mobility_values_match_the_grid_scan() {
    for n in 3..=64 {
        for (class, lor) in [(SignatureClass::Riemannian, false), (SignatureClass::Lorentzian, true)] {
            assert_eq!(
                mobility_values(n, class).unwrap().numbers(),
                oracle(n, lor),
                "n = {n}, {class:?}"
            );
        }
    }
}

#[test]
fn low_dimensions_have_only_the_maximal_value() {
    // In dimensions 3 and 4 such metrics have constant curvature.
    for class in [SignatureClass::Riemannian, SignatureClass::Lorentzian] {
        assert_eq!(mobility_values(3, class).unwrap().numbers(), vec![10]);
        assert_eq!(mobility_values(4, class).unwrap().numbers(), vec![15]);
    }
}

#[test]
fn dimension_five_and_six() {
    use SignatureClass::*;
    assert_eq!(mobility_values(5, Riemannian).unwrap().numbers(), vec![2, 21]);
    assert_eq!(mobility_values(5, Lorentzian).unwrap().numbers(), vec![2, 4, 21]);
    assert_eq!(mobility_values(6, Riemannian).unwrap().numbers(), vec![2, 4, 28]);
    assert_eq!(mobility_values(6, Lorentzian).unwrap().numbers(), vec![2, 4, 7, 28]);
    let v = mobility_values(5, Lorentzian).unwrap();
    assert_eq!(v.values[1].tags, vec![Tag::LorentzExtra]);
    assert_eq!(v.values[2].tags, vec![Tag::Maximal]);
}

#[test]
fn projective_dimensions_are_one_less() {
    for n in 3..=30 {
        for class in [SignatureClass::Riemannian, SignatureClass::Lorentzian] {
            let d: Vec<usize> = mobility_values(n, class)
                .unwrap()
                .numbers()
                .iter()
                .map(|v| v - 1)
                .collect();
            assert_eq!(projective_dim_values(n, class).unwrap().numbers(), d);
        }
    }
}

#[test]
fn affine_only_lists() {
    for n in 3..=40 {
        let nz = affine_only_values(n, AffineRegime::NonzeroScal).unwrap().numbers();
        assert_eq!(nz, affine_oracle(n, 2, n as i64 - 2), "n = {n}");
        let rf = affine_only_values(n, AffineRegime::RicciFlat).unwrap().numbers();
        assert_eq!(rf, affine_oracle(n, 4, n as i64 - 4), "n = {n}");
    }
}

#[test]
fn figure_rows_flag_exactly_the_lorentzian_extras() {
    let rows = figure1_table(3, 15).unwrap();
    assert_eq!(rows.len(), 13);
    for r in &rows {
        let riem = oracle(r.n, false);
        let lor = oracle(r.n, true);
        let extra: Vec<usize> = lor.iter().copied().filter(|v| !riem.contains(v)).collect();
        assert_eq!(r.shared, riem);
        assert_eq!(r.lorentz_extra, extra);
    }
    let tsv = figure1_tsv(&rows);
    let lines: Vec<&str> = tsv.lines().collect();
    assert_eq!(lines[0], "n\tvalue\tlorentz_extra");
    let body = rows
        .iter()
        .map(|r| r.shared.len() + r.lorentz_extra.len())
        .sum::<usize>();
    assert_eq!(lines.len(), body + 1);
    assert!(lines.contains(&"5\t4\t1"));
}

#[test]
fn out_of_range_arguments() {
    assert_eq!(
        mobility_values(2, SignatureClass::Riemannian).unwrap_err(),
        EnumerateError::DimensionTooSmall(2)
    );
    assert!(figure1_table(2, 10).is_err());
    assert!(figure1_table(3, 65).is_err());
    assert!(figure1_table(9, 8).is_err());
    assert!("hyperbolic".parse::<SignatureClass>().is_err());
}

proptest! {
    #[test]
    fn riemannian_values_are_lorentzian_values(n in 3usize..=64) {
        let r = mobility_values(n, SignatureClass::Riemannian).unwrap().numbers();
        let l = mobility_values(n, SignatureClass::Lorentzian).unwrap().numbers();
        prop_assert!(r.iter().all(|v| l.contains(v)));
        prop_assert_eq!(*l.last().unwrap(), (n + 1) * (n + 2) / 2);
        prop_assert!(l.iter().all(|&v| v >= 2));
        prop_assert!(l.windows(2).all(|w| w[0] < w[1]));
    }
}
