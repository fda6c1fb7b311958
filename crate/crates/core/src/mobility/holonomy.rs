use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::bundle::LinearConnectionBundle;
use super::{Method, MobilityError, MobilityReport};

/// Loops used by the transport oracle: a coordinate rectangle with a corner
/// at the base point in every coordinate plane, plus lassos that run out to a
/// nearby point, around a rectangle there, and back.
#[derive(Debug, Clone, Serialize)]
pub struct LoopSpec {
    pub size: f64,
    pub lassos: usize,
    /// Defaults to the chart center.
    pub base: Option<Vec<f64>>,
    pub seed: u64,
}

impl Default for LoopSpec {
    fn default() -> Self {
        LoopSpec {
            size: 0.2,
            lassos: 6,
            base: None,
            seed: 0,
        }
    }
}

/// Base point and closed paths through it, each a list of points.
type Loops = (Vec<f64>, Vec<Vec<Vec<f64>>>);

fn loops(bundle: &LinearConnectionBundle, spec: &LoopSpec) -> Result<Loops, MobilityError> {
    let chart = bundle.chart();
    let n = chart.dim();
    let base = spec.base.clone().unwrap_or_else(|| chart.center().coords().to_vec());
    let bx = chart.sample_box();
    // Step along +s when that stays inside the box, else along −s.
    let dir = |x: &[f64], a: usize| -> f64 {
        if x[a] + spec.size <= bx[a].1 {
            spec.size
        } else {
            -spec.size
        }
    };
    let rect = |q: &[f64], a: usize, b: usize| -> Vec<Vec<f64>> {
        let (sa, sb) = (dir(q, a), dir(q, b));
        let mut v1 = q.to_vec();
        v1[a] += sa;
        let mut v2 = v1.clone();
        v2[b] += sb;
        let mut v3 = q.to_vec();
        v3[b] += sb;
        vec![q.to_vec(), v1, v2, v3, q.to_vec()]
    };
    let mut out = Vec::new();
    for a in 0..n {
        for b in (a + 1)..n {
            out.push(rect(&base, a, b));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    for _ in 0..spec.lassos {
        let q: Vec<f64> = (0..n)
            .map(|i| {
                let (lo, hi) = bx[i];
                let inner = (lo + 0.1 * (hi - lo), hi - 0.1 * (hi - lo));
                (base[i] + rng.gen_range(-spec.size..=spec.size)).clamp(inner.0, inner.1)
            })
            .collect();
        let a = rng.gen_range(0..n);
        let mut b = rng.gen_range(0..n - 1);
        if b >= a {
            b += 1;
        }
        let mut path = vec![base.clone()];
        path.extend(rect(&q, a, b));
        path.push(base.clone());
        out.push(path);
    }
    for path in &out {
        for v in path {
            if !chart.contains(v) {
                return Err(MobilityError::LeftChart { point: v.clone() });
            }
        }
    }
    Ok((base, out))
}

/// ∑_i A_i(x) ẋ^i.
fn generator(bundle: &LinearConnectionBundle, x: &[f64], xdot: &[f64]) -> Result<DMatrix<f64>, MobilityError> {
    let a = bundle.connection_values(x)?;
    let mut m = DMatrix::zeros(bundle.fiber_dim(), bundle.fiber_dim());
    for (ai, v) in a.iter().zip(xdot) {
        if *v != 0.0 {
            m += ai * *v;
        }
    }
    Ok(m)
}

/// Transport matrix Φ with Φ' = −A(γ)γ̇ Φ along a polygonal path (RK4).
pub fn transport(bundle: &LinearConnectionBundle, path: &[Vec<f64>], step: f64) -> Result<DMatrix<f64>, MobilityError> {
    if !(step.is_finite() && step > 1e-9) {
        return Err(MobilityError::Invalid(format!("step size {step} underflows")));
    }
    let big_n = bundle.fiber_dim();
    let mut phi = DMatrix::<f64>::identity(big_n, big_n);
    for w in path.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        let d: Vec<f64> = b.iter().zip(a).map(|(x, y)| x - y).collect();
        let len = d.iter().map(|x| x * x).sum::<f64>().sqrt();
        if len == 0.0 {
            continue;
        }
        let steps = (len / step).ceil() as usize;
        let dt = 1.0 / steps as f64;
        let at = |t: f64| -> Vec<f64> { a.iter().zip(&d).map(|(x, y)| x + t * y).collect() };
        let mut m0 = generator(bundle, &at(0.0), &d)?;
        for s in 0..steps {
            let t = s as f64 * dt;
            let mh = generator(bundle, &at(t + 0.5 * dt), &d)?;
            let m1 = generator(bundle, &at(t + dt), &d)?;
            let k1 = -(&m0 * &phi);
            let k2 = -(&mh * (&phi + &k1 * (0.5 * dt)));
            let k3 = -(&mh * (&phi + &k2 * (0.5 * dt)));
            let k4 = -(&m1 * (&phi + &k3 * dt));
            phi += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);
            m0 = m1;
        }
    }
    Ok(phi)
}

/// dim ∩ ker(H_α − Id) over the holonomy matrices of the loops.
pub fn loop_transport_dimension(
    bundle: &LinearConnectionBundle,
    spec: &LoopSpec,
    step: f64,
) -> Result<MobilityReport, MobilityError> {
    let (base, paths) = loops(bundle, spec)?;
    let big_n = bundle.fiber_dim();
    let hol: Vec<DMatrix<f64>> = paths
        .par_iter()
        .map(|p| transport(bundle, p, step))
        .collect::<Result<_, _>>()?;
    let mut stacked = DMatrix::zeros(hol.len() * big_n, big_n);
    for (k, h) in hol.iter().enumerate() {
        let d = h - DMatrix::<f64>::identity(big_n, big_n);
        stacked.view_mut((k * big_n, 0), (big_n, big_n)).copy_from(&d);
    }
    let svd = stacked.svd(false, true);
    let mut sigma: Vec<f64> = svd.singular_values.iter().copied().collect();
    sigma.sort_by(|a, b| b.total_cmp(a));
    let threshold = super::kernel::RANK_TOL * sigma.first().copied().unwrap_or(0.0).max(1.0);
    let rank = sigma.iter().filter(|&&s| s > threshold).count();
    let gap = if rank > 0 && rank < sigma.len() {
        Some(sigma[rank - 1] / sigma[rank].max(f64::MIN_POSITIVE))
    } else {
        None
    };
    Ok(MobilityReport {
        method: Method::LoopTransport,
        fiber: bundle.kind(),
        fiber_dim: big_n,
        dimension: big_n - rank,
        stabilized: true,
        rank_sequence: vec![rank],
        sample_points: hol.len(),
        spectral_gap: gap,
        threshold,
        reference_point: base,
        ..MobilityReport::empty()
    })
}
