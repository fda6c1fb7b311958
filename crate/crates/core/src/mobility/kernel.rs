use std::collections::BTreeMap;

use nalgebra::DMatrix;
use rayon::prelude::*;

use super::bundle::{LinearConnectionBundle, SparseMat};
use super::{Method, MobilityError, MobilityReport};
use crate::jet::Jet;

/// Relative singular-value threshold for rank decisions.
pub const RANK_TOL: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct KernelOptions {
    pub max_order: usize,
    pub samples: usize,
    pub seed: u64,
    pub rank_tol: f64,
}

impl Default for KernelOptions {
    fn default() -> Self {
        KernelOptions {
            max_order: 3,
            samples: 3,
            seed: 0,
            rank_tol: RANK_TOL,
        }
    }
}

type Row = Vec<(usize, Jet)>;

struct PointOutcome {
    point: Vec<f64>,
    ranks: Vec<usize>,
    stabilized_at: Option<usize>,
    gap: Option<f64>,
    threshold: f64,
    null_basis: Vec<Vec<f64>>,
}

/// Upper bound for the dimension of parallel sections from the curvature of
/// the connection and its covariant derivatives.
pub fn kernel_dimension(
    bundle: &LinearConnectionBundle,
    max_order: usize,
    samples: usize,
) -> Result<MobilityReport, MobilityError> {
    kernel_dimension_with(
        bundle,
        &KernelOptions {
            max_order,
            samples,
            ..KernelOptions::default()
        },
    )
}

pub fn kernel_dimension_with(
    bundle: &LinearConnectionBundle,
    opts: &KernelOptions,
) -> Result<MobilityReport, MobilityError> {
    if opts.max_order < 1 || opts.samples < 1 {
        return Err(MobilityError::Invalid(
            "max-order and sample count must be at least 1".into(),
        ));
    }
    let pts = bundle.chart().sample_points(opts.samples, opts.seed);
    let outcomes: Vec<PointOutcome> = pts
        .par_iter()
        .map(|p| point_kernel(bundle, p.coords(), opts))
        .collect::<Result<_, _>>()?;
    let big_n = bundle.fiber_dim();
    let best = outcomes
        .iter()
        .max_by_key(|o| o.ranks.last().copied().unwrap_or(0))
        .expect("at least one sample point");
    let rank = best.ranks.last().copied().unwrap_or(0);
    Ok(MobilityReport {
        method: Method::CurvatureKernel,
        fiber: bundle.kind(),
        fiber_dim: big_n,
        dimension: big_n - rank,
        exact: false,
        stabilized: best.stabilized_at.is_some(),
        stabilization_order: best.stabilized_at,
        rank_sequence: best.ranks.clone(),
        sample_points: outcomes.len(),
        spectral_gap: best.gap,
        threshold: best.threshold,
        reference_point: best.point.clone(),
        null_basis: best.null_basis.clone(),
        ..MobilityReport::empty()
    })
}

fn sparse_partial(m: &SparseMat<Jet>, i: usize) -> Vec<BTreeMap<usize, Jet>> {
    m.iter()
        .map(|row| {
            row.iter()
                .map(|(c, j)| (*c, j.partial(i)))
                .filter(|(_, j)| !j.is_exact_zero())
                .collect()
        })
        .collect()
}

fn acc(row: &mut BTreeMap<usize, Jet>, c: usize, k: f64, v: &Jet) {
    match row.get_mut(&c) {
        Some(x) => x.axpy(k, v),
        None => {
            row.insert(c, v.scale(k));
        }
    }
}

/// rows of `a b`, accumulated into `out` with factor `k`.
fn add_product(out: &mut [BTreeMap<usize, Jet>], k: f64, a: &SparseMat<Jet>, b: &SparseMat<Jet>) {
    for (r, row) in a.iter().enumerate() {
        for (m, x) in row {
            for (c, y) in &b[*m] {
                acc(&mut out[r], *c, k, &x.mul(y));
            }
        }
    }
}

/// D_k r = ∂_k r − r A_k.
fn derive_row(r: &Row, k: usize, a: &SparseMat<Jet>) -> Row {
    let mut out: BTreeMap<usize, Jet> = BTreeMap::new();
    for (c, j) in r {
        if j.order() > 0 {
            acc(&mut out, *c, 1.0, &j.partial(k));
        }
        for (c2, y) in &a[*c] {
            acc(&mut out, *c2, -1.0, &j.mul(y));
        }
    }
    out.into_iter().filter(|(_, j)| !j.is_exact_zero()).collect()
}

fn row_values(r: &Row, big_n: usize) -> Vec<f64> {
    let mut v = vec![0.0; big_n];
    for (c, j) in r {
        v[*c] = j.value();
    }
    v
}

/// SVD of the stacked rows padded to at least `big_n` rows.
fn svd_rows(rows: &[Vec<f64>], big_n: usize) -> (DMatrix<f64>, Vec<f64>, DMatrix<f64>) {
    let m = rows.len().max(big_n);
    let mat = DMatrix::from_fn(m, big_n, |r, c| rows.get(r).map_or(0.0, |row| row[c]));
    let svd = mat.svd(true, true);
    let u = svd.u.expect("u requested");
    let vt = svd.v_t.expect("v_t requested");
    let mut idx: Vec<usize> = (0..svd.singular_values.len()).collect();
    idx.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let sigma: Vec<f64> = idx.iter().map(|&i| svd.singular_values[i]).collect();
    let u_sorted = DMatrix::from_fn(u.nrows(), idx.len(), |r, c| u[(r, idx[c])]);
    let vt_sorted = DMatrix::from_fn(idx.len(), big_n, |r, c| vt[(idx[r], c)]);
    (u_sorted, sigma, vt_sorted)
}

fn point_kernel(
    bundle: &LinearConnectionBundle,
    p: &[f64],
    opts: &KernelOptions,
) -> Result<PointOutcome, MobilityError> {
    let n = bundle.chart().dim();
    let big_n = bundle.fiber_dim();
    let a = bundle.connection_jets(p, opts.max_order + 1)?;
    let a_norm_sq: f64 = a
        .iter()
        .map(|m| m.iter().flatten().map(|(_, j)| j.value().powi(2)).sum::<f64>())
        .fold(0.0, f64::max);
    let floor = 1.0 + a_norm_sq;

    let mut candidates: Vec<Row> = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let mut k = sparse_partial(&a[j], i);
            for (r, row) in sparse_partial(&a[i], j).into_iter().enumerate() {
                for (c, v) in row {
                    acc(&mut k[r], c, -1.0, &v);
                }
            }
            add_product(&mut k, 1.0, &a[i], &a[j]);
            add_product(&mut k, -1.0, &a[j], &a[i]);
            for row in k {
                let row: Row = row.into_iter().filter(|(_, j)| !j.is_exact_zero()).collect();
                if !row.is_empty() {
                    candidates.push(row);
                }
            }
        }
    }

    let mut frame: Vec<Row> = Vec::new();
    let mut ranks: Vec<usize> = Vec::new();
    let mut stabilized_at = None;
    let mut gap = None;
    let mut threshold = opts.rank_tol * floor;
    let mut null_basis = Vec::new();
    for order in 0..=opts.max_order {
        let all: Vec<Row> = frame.drain(..).chain(candidates.drain(..)).collect();
        let values: Vec<Vec<f64>> = all.iter().map(|r| row_values(r, big_n)).collect();
        let (u, sigma, vt) = svd_rows(&values, big_n);
        threshold = opts.rank_tol * sigma.first().copied().unwrap_or(0.0).max(floor);
        let rank = sigma.iter().filter(|&&s| s > threshold).count();
        gap = match (rank, sigma.get(rank)) {
            (0, _) => None,
            (r, Some(&dropped)) => Some(sigma[r - 1] / dropped.max(f64::MIN_POSITIVE)),
            (_, None) => None,
        };
        null_basis = (rank..big_n).map(|r| vt.row(r).iter().copied().collect()).collect();
        ranks.push(rank);
        if order > 0 && ranks[order - 1] == rank || rank == big_n {
            stabilized_at = Some(order);
            break;
        }
        if order == opts.max_order {
            break;
        }
        // Constant combinations of the rows whose values are orthonormal at p.
        for k in 0..rank {
            let mut combo: BTreeMap<usize, Jet> = BTreeMap::new();
            for (j, row) in all.iter().enumerate() {
                let w = u[(j, k)] / sigma[k];
                if w == 0.0 {
                    continue;
                }
                for (c, v) in row {
                    acc(&mut combo, *c, w, v);
                }
            }
            frame.push(combo.into_iter().collect());
        }
        for f in &frame {
            for (k, ak) in a.iter().enumerate() {
                let d = derive_row(f, k, ak);
                if !d.is_empty() {
                    candidates.push(d);
                }
            }
        }
    }
    Ok(PointOutcome {
        point: p.to_vec(),
        ranks,
        stabilized_at,
        gap,
        threshold,
        null_basis,
    })
}
