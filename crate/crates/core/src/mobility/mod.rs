//! Dimension of spaces of parallel sections: the prolongation connection
//! whose parallel sections are the solutions (L, Λ, μ) of the extended
//! system, the induced connections on S²T*, T* and T, and two independent
//! estimators (curvature kernel and loop holonomy).

mod bundle;
mod holonomy;
mod kernel;

use serde::Serialize;
use thiserror::Error;

use crate::enumerate::{mobility_values, SignatureClass};
use crate::geometry::{is_einstein, signature_over_box, Einstein, GeometryError, MetricField};
use crate::projective::{ProjectiveError, SolutionTriple};
use crate::symexpr::evaluate;

pub use bundle::{
    build_prolongation, explicit_bundle, one_form_bundle, section_of_symmetric, section_of_triple, sym_index,
    sym_pairs, symmetric_two_bundle, vector_bundle, FiberKind, LinearConnectionBundle, SparseMat,
};
pub use holonomy::{loop_transport_dimension, transport, LoopSpec};
pub use kernel::{kernel_dimension, kernel_dimension_with, KernelOptions, RANK_TOL};

#[derive(Debug, Error)]
pub enum MobilityError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Projective(#[from] ProjectiveError),
    #[error("B = {given} does not match -Scal/(n(n-1)) = {computed}")]
    BMismatch { given: f64, computed: f64 },
    #[error("metric is not Einstein (witness {witness:?})")]
    NotEinstein { witness: Vec<f64> },
    #[error("loop leaves the sample box at {point:?}")]
    LeftChart { point: Vec<f64> },
    #[error("{0}")]
    Invalid(String),
}

impl From<crate::symexpr::EvalError> for MobilityError {
    fn from(e: crate::symexpr::EvalError) -> Self {
        MobilityError::Geometry(e.into())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    CurvatureKernel,
    LoopTransport,
}

/// How a known parallel section sits in the computed kernel.
#[derive(Debug, Clone, Serialize)]
pub struct KnownMatch {
    pub name: String,
    /// max |∂σ + Aσ| over sample points.
    pub parallel_residual: f64,
    /// Distance of σ(p) from the kernel at the reference point, relative to |σ(p)|.
    pub kernel_residual: f64,
    /// Coordinates of σ(p) in the kernel basis.
    pub coefficients: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct MobilityReport {
    pub method: Method,
    pub fiber: FiberKind,
    pub fiber_dim: usize,
    /// Dimension of parallel sections (an upper bound unless `exact`).
    pub dimension: usize,
    /// The dimension equals the span of independently verified sections.
    pub exact: bool,
    pub stabilized: bool,
    pub stabilization_order: Option<usize>,
    pub rank_sequence: Vec<usize>,
    pub sample_points: usize,
    /// Ratio of the smallest retained to the largest discarded singular value.
    pub spectral_gap: Option<f64>,
    pub threshold: f64,
    pub reference_point: Vec<f64>,
    #[serde(skip)]
    pub null_basis: Vec<Vec<f64>>,
    pub known: Vec<KnownMatch>,
    pub known_span: Option<usize>,
    /// Number of parallel one-forms.
    pub k: Option<usize>,
    /// dim Par^{0,2} − k(k+1)/2.
    pub l: Option<i64>,
    /// Membership in the admissible list for (n, signature class).
    pub admissible: Option<bool>,
}

impl MobilityReport {
    pub(crate) fn empty() -> Self {
        MobilityReport {
            method: Method::CurvatureKernel,
            fiber: FiberKind::Explicit,
            fiber_dim: 0,
            dimension: 0,
            exact: false,
            stabilized: false,
            stabilization_order: None,
            rank_sequence: Vec::new(),
            sample_points: 0,
            spectral_gap: None,
            threshold: 0.0,
            reference_point: Vec::new(),
            null_basis: Vec::new(),
            known: Vec::new(),
            known_span: None,
            k: None,
            l: None,
            admissible: None,
        }
    }

    /// Matches named sections against the kernel and marks the report exact
    /// when their span equals the computed dimension.
    pub fn attach_known(
        &mut self,
        bundle: &LinearConnectionBundle,
        sections: &[(String, Vec<crate::symexpr::Expr>)],
    ) -> Result<(), MobilityError> {
        let chart = bundle.chart();
        let p = &self.reference_point;
        let mut matches = Vec::new();
        for (name, s) in sections {
            let parallel_residual = bundle.section_residual(s, 6, 17)?;
            let v: Vec<f64> = s
                .iter()
                .map(|e| evaluate(e, p, chart.constants()))
                .collect::<Result<_, _>>()?;
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            let (coefficients, kernel_residual) = if self.null_basis.is_empty() {
                (Vec::new(), if norm > 0.0 { 1.0 } else { 0.0 })
            } else {
                let c: Vec<f64> = self
                    .null_basis
                    .iter()
                    .map(|b| b.iter().zip(&v).map(|(x, y)| x * y).sum())
                    .collect();
                let mut rest = v.clone();
                for (ci, b) in c.iter().zip(&self.null_basis) {
                    rest.iter_mut().zip(b).for_each(|(r, x)| *r -= ci * x);
                }
                let rest = rest.iter().map(|x| x * x).sum::<f64>().sqrt();
                (c, if norm > 0.0 { rest / norm } else { 0.0 })
            };
            matches.push(KnownMatch {
                name: name.clone(),
                parallel_residual,
                kernel_residual,
                coefficients,
            });
        }
        let span = section_span(bundle, sections)?;
        self.known = matches;
        self.known_span = Some(span);
        self.exact = span == self.dimension && self.known.iter().all(|m| m.parallel_residual < 1e-8);
        Ok(())
    }
}

/// Rank of the section values stacked over several sample points.
fn section_span(
    bundle: &LinearConnectionBundle,
    sections: &[(String, Vec<crate::symexpr::Expr>)],
) -> Result<usize, MobilityError> {
    if sections.is_empty() {
        return Ok(0);
    }
    let chart = bundle.chart();
    let pts = chart.sample_points(5, 23);
    let cols = pts.len() * bundle.fiber_dim();
    let mut m = nalgebra::DMatrix::zeros(sections.len(), cols);
    for (r, (_, s)) in sections.iter().enumerate() {
        for (k, p) in pts.iter().enumerate() {
            for (c, e) in s.iter().enumerate() {
                m[(r, k * bundle.fiber_dim() + c)] = evaluate(e, p.coords(), chart.constants())?;
            }
        }
    }
    let sv = m.singular_values();
    let top = sv.iter().fold(0.0f64, |a, v| a.max(*v));
    Ok(sv.iter().filter(|v| **v > 1e-9 * top.max(1.0)).count())
}

/// Riemannian or Lorentzian class of a metric, if it is one of the two.
pub fn signature_class(g: &MetricField) -> Result<Option<SignatureClass>, MobilityError> {
    let s = signature_over_box(g)?;
    Ok(match s.unordered() {
        (0, _) => Some(SignatureClass::Riemannian),
        (1, _) => Some(SignatureClass::Lorentzian),
        _ => None,
    })
}

/// Degree of mobility via the prolongation connection.
pub fn mobility_of_metric(g: &MetricField, known: &[SolutionTriple]) -> Result<MobilityReport, MobilityError> {
    mobility_of_metric_with(g, known, &KernelOptions::default())
}

pub fn mobility_of_metric_with(
    g: &MetricField,
    known: &[SolutionTriple],
    opts: &KernelOptions,
) -> Result<MobilityReport, MobilityError> {
    let b = match is_einstein(g)? {
        Einstein::Yes { b, .. } => b,
        Einstein::No { witness, .. } => return Err(MobilityError::NotEinstein { witness }),
    };
    // Snap B to the nearest simple rational so the bundle is built exactly.
    let b = crate::symexpr::rational_to_f64(&crate::symexpr::rational_from_f64(b).unwrap_or_default());
    let bundle = build_prolongation(g, b)?;
    let mut report = kernel_dimension_with(&bundle, opts)?;
    let sections: Vec<(String, Vec<crate::symexpr::Expr>)> = known
        .iter()
        .enumerate()
        .map(|(i, t)| (format!("known[{i}]"), section_of_triple(t)))
        .collect();
    report.attach_known(&bundle, &sections)?;
    if let Some(class) = signature_class(g)? {
        if let Ok(list) = mobility_values(g.dim(), class) {
            report.admissible = Some(list.contains(report.dimension));
        }
    }
    Ok(report)
}

/// dim Par^{0,2}(g) from the induced connection on symmetric two-tensors.
pub fn parallel_tensor_dimension(g: &MetricField) -> Result<MobilityReport, MobilityError> {
    kernel_dimension_with(&symmetric_two_bundle(g), &KernelOptions::default())
}

pub fn parallel_oneform_dimension(g: &MetricField) -> Result<MobilityReport, MobilityError> {
    kernel_dimension_with(&one_form_bundle(g), &KernelOptions::default())
}

pub fn parallel_vector_dimension(g: &MetricField) -> Result<MobilityReport, MobilityError> {
    kernel_dimension_with(&vector_bundle(g), &KernelOptions::default())
}

/// dim Par^{0,2} with k (parallel one-forms) and l = dim Par^{0,2} − k(k+1)/2.
pub fn parallel_counts(g: &MetricField) -> Result<MobilityReport, MobilityError> {
    let mut r = parallel_tensor_dimension(g)?;
    let k = parallel_oneform_dimension(g)?.dimension;
    r.k = Some(k);
    r.l = Some(r.dimension as i64 - (k * (k + 1) / 2) as i64);
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{example14, example14_solutions, flat, sphere};
    use std::time::Instant;

    #[test]
    fn constant_curvature_maxima() {
        let t = Instant::now();
        let r = mobility_of_metric(&flat(3), &[]).unwrap();
        assert_eq!(r.dimension, 10, "{r:?}");
        let r = mobility_of_metric(&sphere(3), &[]).unwrap();
        assert_eq!(r.dimension, 10, "{r:?}");
        eprintln!("elapsed {:?}", t.elapsed());
    }

    #[test]
    fn example14_has_mobility_four() {
        let g = example14();
        let mut known =
            vec![SolutionTriple::from_solution(&g, crate::geometry::TensorField::metric(&g), -1.0).unwrap()];
        for l in example14_solutions(&g) {
            known.push(SolutionTriple::from_solution(&g, l, -1.0).unwrap());
        }
        let t = Instant::now();
        let r = mobility_of_metric(&g, &known).unwrap();
        eprintln!("kernel {:?} {:?}", t.elapsed(), r);
        assert_eq!(r.dimension, 4);
        assert!(r.exact);
        assert_eq!(r.admissible, Some(true));
        let t = Instant::now();
        let bundle = build_prolongation(&g, -1.0).unwrap();
        let h = loop_transport_dimension(&bundle, &LoopSpec::default(), 0.002).unwrap();
        eprintln!("loops {:?} {:?}", t.elapsed(), h);
        assert_eq!(h.dimension, 4);
    }
}
