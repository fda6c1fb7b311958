//! Small metrics shared by unit tests.

use std::sync::Arc;

use crate::geometry::{Chart, MetricField, TensorField};

pub(crate) fn example14() -> MetricField {
    let chart = Chart::new(
        "ex14",
        &["t", "x0", "x1", "x2", "x3"],
        &[(-0.5, 0.5), (-1.0, 1.0), (-1.0, 1.0), (-0.5, 0.5), (1.0, 2.1)],
    )
    .unwrap();
    MetricField::from_lower_triangle(
        chart,
        &[
            vec!["-1"],
            vec!["0", "0"],
            vec!["0", "exp(2*t)", "exp(2*t)*exp(x2)*sin(x3)"],
            vec!["0", "0", "0", "-exp(2*t)"],
            vec!["0", "0", "0", "0", "-exp(2*t)"],
        ],
    )
    .unwrap()
}

pub(crate) fn sym(chart: &Arc<Chart>, rows: &[Vec<&str>]) -> TensorField {
    let n = chart.dim();
    let mut m = vec![vec![crate::symexpr::Expr::zero(); n]; n];
    for (i, r) in rows.iter().enumerate() {
        for (j, t) in r.iter().enumerate() {
            let e = chart.parse(t).unwrap();
            m[i][j] = e.clone();
            m[j][i] = e;
        }
    }
    TensorField::symmetric(chart.clone(), m).unwrap()
}

/// The solutions L1, L2, L3 of `example14`.
pub(crate) fn example14_solutions(g: &MetricField) -> Vec<TensorField> {
    let c = g.chart();
    vec![
        sym(c, &[vec!["exp(2*t)"]]),
        sym(
            c,
            &[
                vec!["exp(2*t)*x1^2"],
                vec!["0", "0"],
                vec!["exp(2*t)*x1", "0", "exp(2*t)"],
            ],
        ),
        sym(c, &[vec!["2*exp(2*t)*x1"], vec!["0", "0"], vec!["exp(2*t)", "0", "0"]]),
    ]
}

pub(crate) fn flat(n: usize) -> MetricField {
    let names: Vec<String> = (0..n).map(|i| format!("y{i}")).collect();
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let chart = Chart::new("flat", &refs, &vec![(-1.0, 1.0); n]).unwrap();
    MetricField::diagonal(chart, vec![crate::symexpr::Expr::one(); n]).unwrap()
}

/// Unit S^n in nested spherical coordinates.
pub(crate) fn sphere(n: usize) -> MetricField {
    let names: Vec<String> = (0..n).map(|i| format!("a{i}")).collect();
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let chart = Chart::new("sphere", &refs, &vec![(0.7, 2.3); n]).unwrap();
    let mut diag = Vec::new();
    let mut factor = String::from("1");
    for i in 0..n {
        diag.push(chart.parse(&factor).unwrap());
        factor = format!("{factor}*sin(a{i})^2");
    }
    MetricField::diagonal(chart, diag).unwrap()
}
