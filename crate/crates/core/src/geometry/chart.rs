use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::GeometryError;
use crate::symexpr::{evaluate, parse_with_params, Constants, Expr, ParseError};

/// A coordinate chart with a sample box used for numeric trials.
#[derive(Debug, Clone)]
pub struct Chart {
    name: String,
    coords: Vec<String>,
    sample_box: Vec<(f64, f64)>,
    excluded: Vec<Expr>,
    constants: Constants,
}

impl Chart {
    pub fn new(name: &str, coords: &[&str], sample_box: &[(f64, f64)]) -> Result<Arc<Chart>, GeometryError> {
        Chart::with_details(name, coords, sample_box, Vec::new(), Constants::new())
    }

    /// Full constructor; checks that the box avoids the excluded locus by
    /// requiring every excluded expression to keep a strict sign on samples.
    pub fn with_details(
        name: &str,
        coords: &[&str],
        sample_box: &[(f64, f64)],
        excluded: Vec<Expr>,
        constants: Constants,
    ) -> Result<Arc<Chart>, GeometryError> {
        let n = coords.len();
        if n < 1 {
            return Err(GeometryError::Chart("a chart needs at least one coordinate".into()));
        }
        for (i, c) in coords.iter().enumerate() {
            if coords[..i].contains(c) {
                return Err(GeometryError::Chart(format!("duplicate coordinate `{c}`")));
            }
        }
        if sample_box.len() != n {
            return Err(GeometryError::Chart(format!(
                "sample box has {} intervals for {n} coordinates",
                sample_box.len()
            )));
        }
        for &(lo, hi) in sample_box {
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(GeometryError::Chart(format!("bad interval [{lo}, {hi}]")));
            }
        }
        let chart = Chart {
            name: name.to_string(),
            coords: coords.iter().map(|s| s.to_string()).collect(),
            sample_box: sample_box.to_vec(),
            excluded,
            constants,
        };
        if !chart.excluded.is_empty() {
            let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
            for e in &chart.excluded {
                let mut sign = 0.0;
                for trial in 0..64 {
                    let p = chart.corner_or_random(trial, &mut rng);
                    let v = evaluate(e, &p, &chart.constants)
                        .map_err(|err| GeometryError::Chart(format!("excluded locus `{e}`: {err}")))?;
                    if v == 0.0 || (sign != 0.0 && v.signum() != sign) {
                        return Err(GeometryError::Chart(format!(
                            "sample box meets the excluded locus `{e}` = 0 near {p:?}"
                        )));
                    }
                    sign = v.signum();
                }
            }
        }
        Ok(Arc::new(chart))
    }

    fn corner_or_random(&self, trial: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let n = self.dim();
        if trial < (1usize << n.min(5)) {
            // Visit corners first (as many as fit).
            (0..n)
                .map(|i| {
                    let (lo, hi) = self.sample_box[i];
                    if i < 5 && trial >> i & 1 == 1 {
                        hi
                    } else {
                        lo
                    }
                })
                .collect()
        } else {
            self.random_point(rng)
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coordinates(&self) -> Vec<&str> {
        self.coords.iter().map(String::as_str).collect()
    }

    pub fn sample_box(&self) -> &[(f64, f64)] {
        &self.sample_box
    }

    pub fn excluded(&self) -> &[Expr] {
        &self.excluded
    }

    pub fn constants(&self) -> &Constants {
        &self.constants
    }

    pub fn constant_names(&self) -> Vec<&str> {
        self.constants.keys().map(String::as_str).collect()
    }

    /// Parses an expression over this chart's coordinates and constants.
    pub fn parse(&self, text: &str) -> Result<Expr, ParseError> {
        parse_with_params(text, &self.coordinates(), &self.constant_names())
    }

    pub fn coord(&self, name: &str) -> Option<Expr> {
        self.coords.iter().position(|c| c == name).map(|i| Expr::coord(i, name))
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter()
                .zip(&self.sample_box)
                .all(|(v, (lo, hi))| *v >= *lo && *v <= *hi)
    }

    fn random_point(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        self.sample_box
            .iter()
            .map(|&(lo, hi)| if hi > lo { rng.gen_range(lo..=hi) } else { lo })
            .collect()
    }

    /// Deterministic interior sample points; the outer 5% of each interval is avoided.
    pub fn sample_points(&self, count: usize, seed: u64) -> Vec<Point> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count)
            .map(|_| {
                let coords = self
                    .sample_box
                    .iter()
                    .map(|&(lo, hi)| {
                        let pad = 0.05 * (hi - lo);
                        if hi - lo > 0.0 {
                            rng.gen_range(lo + pad..=hi - pad)
                        } else {
                            lo
                        }
                    })
                    .collect();
                Point {
                    chart: Arc::from(self.name.as_str()),
                    coords,
                }
            })
            .collect()
    }

    pub fn center(&self) -> Point {
        Point {
            chart: Arc::from(self.name.as_str()),
            coords: self.sample_box.iter().map(|(lo, hi)| 0.5 * (lo + hi)).collect(),
        }
    }

    pub fn point(&self, coords: &[f64]) -> Result<Point, GeometryError> {
        if coords.len() != self.dim() {
            return Err(GeometryError::Chart(format!(
                "point has {} coordinates, chart `{}` has {}",
                coords.len(),
                self.name,
                self.dim()
            )));
        }
        if coords.iter().any(|v| !v.is_finite()) {
            return Err(GeometryError::Chart("non-finite coordinate".into()));
        }
        if !self.contains(coords) {
            return Err(GeometryError::Chart(format!(
                "point {coords:?} lies outside the sample box of `{}`",
                self.name
            )));
        }
        Ok(Point {
            chart: Arc::from(self.name.as_str()),
            coords: coords.to_vec(),
        })
    }
}

/// A point of a chart, inside its sample box.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    chart: Arc<str>,
    coords: Vec<f64>,
}

impl Point {
    pub fn chart_name(&self) -> &str {
        &self.chart
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_duplicate_names_and_bad_boxes() {
        assert!(Chart::new("c", &["x", "x"], &[(0.0, 1.0), (0.0, 1.0)]).is_err());
        assert!(Chart::new("c", &["x"], &[(1.0, 0.0)]).is_err());
    }

    #[test]
    fn excluded_locus_must_be_avoided() {
        let r = Expr::coord(0, "r");
        let ok = Chart::with_details("c", &["r"], &[(0.5, 2.0)], vec![r.clone()], Constants::new());
        assert!(ok.is_ok());
        let bad = Chart::with_details("c", &["r"], &[(-1.0, 2.0)], vec![r], Constants::new());
        assert!(bad.is_err());
    }

    #[test]
    fn samples_are_inside_and_deterministic() {
        let c = Chart::new("c", &["x", "y"], &[(0.0, 1.0), (-2.0, -1.0)]).unwrap();
        let a = c.sample_points(10, 7);
        let b = c.sample_points(10, 7);
        assert_eq!(a, b);
        assert!(a.iter().all(|p| c.contains(p.coords())));
        assert!(c.point(&[2.0, -1.5]).is_err());
    }
}
