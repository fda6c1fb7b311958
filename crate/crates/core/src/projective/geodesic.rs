use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::ProjectiveError;
use crate::geometry::{check_same_chart, Chart, MetricField};

/// Collinearity tolerance for the 2×2 minors, relative to the local scale.
pub const MINOR_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Serialize)]
pub struct GeodesicSeed {
    pub point: Vec<f64>,
    pub direction: Vec<f64>,
}

/// Seeds in the middle half of the sample box with unit Euclidean directions.
pub fn random_seeds(chart: &Chart, count: usize, seed: u64) -> Vec<GeodesicSeed> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let point = chart
                .sample_box()
                .iter()
                .map(|&(lo, hi)| {
                    let (a, b) = (lo + 0.25 * (hi - lo), hi - 0.25 * (hi - lo));
                    if b > a {
                        rng.gen_range(a..b)
                    } else {
                        lo
                    }
                })
                .collect();
            let mut dir: Vec<f64> = (0..chart.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let norm = dir.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-12);
            dir.iter_mut().for_each(|x| *x /= norm);
            GeodesicSeed { point, direction: dir }
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct SeedOutcome {
    pub pass: bool,
    pub steps_taken: usize,
    pub left_chart: bool,
    /// Largest |minor| / scale along the trajectory.
    pub max_minor_ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct GeodesicReport {
    pub pass: bool,
    pub tolerance: f64,
    pub seeds: Vec<SeedOutcome>,
}

/// Γ(v, v)^k at x.
fn spray(g: &MetricField, x: &[f64], v: &[f64]) -> Result<Vec<f64>, ProjectiveError> {
    let local = g.jets(x, 1)?;
    let n = v.len();
    Ok((0..n)
        .map(|k| {
            let mut s = 0.0;
            for i in 0..n {
                for j in 0..n {
                    s += local.gamma[k][i][j].value() * v[i] * v[j];
                }
            }
            s
        })
        .collect())
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Integrates g-geodesics with RK4 and checks at every step that the
/// ḡ-acceleration defect Γ̄(γ̇,γ̇) − Γ(γ̇,γ̇) is parallel to γ̇.
pub fn geodesic_projective_test(
    g: &MetricField,
    gbar: &MetricField,
    seeds: &[GeodesicSeed],
    steps: usize,
    h: f64,
) -> Result<GeodesicReport, ProjectiveError> {
    check_same_chart(g.chart(), gbar.chart())?;
    if !(h.is_finite() && h > 1e-12) {
        return Err(ProjectiveError::Invalid(format!("step size {h} underflows")));
    }
    let outcomes: Result<Vec<SeedOutcome>, ProjectiveError> =
        seeds.par_iter().map(|s| run_seed(g, gbar, s, steps, h)).collect();
    let outcomes = outcomes?;
    Ok(GeodesicReport {
        pass: outcomes.iter().all(|o| o.pass),
        tolerance: MINOR_TOL,
        seeds: outcomes,
    })
}

fn run_seed(
    g: &MetricField,
    gbar: &MetricField,
    seed: &GeodesicSeed,
    steps: usize,
    h: f64,
) -> Result<SeedOutcome, ProjectiveError> {
    let n = g.dim();
    let chart = g.chart();
    let mut x = seed.point.clone();
    let mut u = seed.direction.clone();
    let mut worst: f64 = 0.0;
    let mut taken = 0;
    let mut left = false;
    let rhs = |x: &[f64], u: &[f64]| -> Result<(Vec<f64>, Vec<f64>), ProjectiveError> {
        let a = spray(g, x, u)?;
        Ok((u.to_vec(), a.iter().map(|v| -v).collect()))
    };
    let shift = |x: &[f64], d: &[f64], c: f64| -> Vec<f64> { x.iter().zip(d).map(|(a, b)| a + c * b).collect() };
    loop {
        let a = spray(g, &x, &u)?;
        let abar = spray(gbar, &x, &u)?;
        let d: Vec<f64> = abar.iter().zip(&a).map(|(p, q)| p - q).collect();
        let un = norm(&u);
        let scale = (un * un).max(un * norm(&a).max(norm(&abar))).max(1e-300);
        for i in 0..n {
            for j in 0..i {
                let m = d[i] * u[j] - d[j] * u[i];
                worst = worst.max(m.abs() / scale);
            }
        }
        if taken == steps {
            break;
        }
        let (k1x, k1u) = rhs(&x, &u)?;
        let x2 = shift(&x, &k1x, h / 2.0);
        let u2 = shift(&u, &k1u, h / 2.0);
        if !chart.contains(&x2) {
            left = true;
            break;
        }
        let (k2x, k2u) = rhs(&x2, &u2)?;
        let x3 = shift(&x, &k2x, h / 2.0);
        let u3 = shift(&u, &k2u, h / 2.0);
        if !chart.contains(&x3) {
            left = true;
            break;
        }
        let (k3x, k3u) = rhs(&x3, &u3)?;
        let x4 = shift(&x, &k3x, h);
        let u4 = shift(&u, &k3u, h);
        if !chart.contains(&x4) {
            left = true;
            break;
        }
        let (k4x, k4u) = rhs(&x4, &u4)?;
        let nx: Vec<f64> = (0..n)
            .map(|i| x[i] + h / 6.0 * (k1x[i] + 2.0 * k2x[i] + 2.0 * k3x[i] + k4x[i]))
            .collect();
        let nu: Vec<f64> = (0..n)
            .map(|i| u[i] + h / 6.0 * (k1u[i] + 2.0 * k2u[i] + 2.0 * k3u[i] + k4u[i]))
            .collect();
        if !chart.contains(&nx) {
            left = true;
            break;
        }
        x = nx;
        u = nu;
        taken += 1;
    }
    Ok(SeedOutcome {
        pass: worst < MINOR_TOL,
        steps_taken: taken,
        left_chart: left,
        max_minor_ratio: worst,
    })
}
