//! Metric factories: cones, sign flips, products, the doubly-warped family,
//! the null-cone family with two parallel fields, lifting of solutions to
//! cones, and the built-in catalog.

mod catalog;
mod cone;
mod nullcone;
mod warped;

use std::sync::Arc;

use thiserror::Error;

use crate::geometry::{covariant_derivative_at, max_abs_over_samples, Chart, GeometryError, MetricField, TensorField};
use crate::projective::ProjectiveError;
use crate::symexpr::{Constants, Expr};

pub use catalog::{
    catalog, catalog_entry, catalog_names, isotropy_residual, warped_spec, CatalogEntry, Expected, NamedTensor,
};
pub use cone::{
    cone, cone_facts, cone_with, identity_residual, lift_residual, lift_triple, negated, product, round_sphere,
    sphere_product, ConeFacts, ConeField, Constructed, LIFT_SIGN,
};
pub use nullcone::{null_cone_family, NullConeChecks, NullConeFamily};
pub use warped::{
    lemma49_fields, lemma49_parallel_field, warped, DirectionalReport, Lemma49Field, WarpedFamily, WarpedReport,
    WarpedSpec,
};

/// Residual threshold for claims checked at construction time.
pub const CLAIM_TOL: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum ConstructionError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Projective(#[from] ProjectiveError),
    #[error("coordinate `{0}` appears in both factors")]
    NameClash(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("{entry}: `{claim}` failed with residual {residual:e}")]
    Verification {
        entry: String,
        claim: String,
        residual: f64,
    },
    #[error("unknown catalog entry `{0}`")]
    Unknown(String),
}

impl From<crate::symexpr::EvalError> for ConstructionError {
    fn from(e: crate::symexpr::EvalError) -> Self {
        ConstructionError::Geometry(e.into())
    }
}

/// Renumbers coordinate indices by `offset`.
pub(crate) fn shift(e: &Expr, offset: usize) -> Expr {
    if offset == 0 {
        return e.clone();
    }
    e.map_coords(&|i, name| Expr::coord(i + offset, name))
}

/// Largest |∇T| over seeded sample points.
pub fn parallel_residual(t: &TensorField, g: &MetricField, count: usize, seed: u64) -> Result<f64, GeometryError> {
    max_abs_over_samples(g.chart(), count, seed, |p| covariant_derivative_at(t, g, p))
}

/// Union of constants; equal names must carry equal values.
pub(crate) fn merge_constants(a: &Constants, b: &Constants) -> Result<Constants, ConstructionError> {
    let mut out = a.clone();
    for (k, v) in b {
        match out.get(k) {
            Some(w) if w != v => return Err(ConstructionError::NameClash(k.clone())),
            _ => {
                out.insert(k.clone(), *v);
            }
        }
    }
    Ok(out)
}

/// Chart on the disjoint union of coordinates, boxes and excluded loci.
pub(crate) fn product_chart(name: &str, a: &Chart, b: &Chart) -> Result<Arc<Chart>, ConstructionError> {
    let ca = a.coordinates();
    let cb = b.coordinates();
    if let Some(c) = cb.iter().find(|c| ca.contains(c)) {
        return Err(ConstructionError::NameClash(c.to_string()));
    }
    let coords: Vec<&str> = ca.iter().chain(cb.iter()).copied().collect();
    let sample_box: Vec<(f64, f64)> = a.sample_box().iter().chain(b.sample_box()).copied().collect();
    let mut excluded: Vec<Expr> = a.excluded().to_vec();
    excluded.extend(b.excluded().iter().map(|e| shift(e, a.dim())));
    let constants = merge_constants(a.constants(), b.constants())?;
    Ok(Chart::with_details(name, &coords, &sample_box, excluded, constants)?)
}

/// Moves a tensor to a chart that contains its own as the block at `offset`.
pub(crate) fn embed_vector(v: &TensorField, chart: &Arc<Chart>, offset: usize) -> Result<TensorField, GeometryError> {
    let mut comps = vec![Expr::zero(); chart.dim()];
    for (i, c) in v.components().iter().enumerate() {
        comps[offset + i] = shift(c, offset);
    }
    TensorField::vector(chart.clone(), comps)
}

/// Pointwise rank of a family of vectors over the sample points (minimum).
pub fn pointwise_rank(fields: &[&TensorField], count: usize, seed: u64) -> Result<usize, GeometryError> {
    let Some(first) = fields.first() else {
        return Ok(0);
    };
    let mut worst = usize::MAX;
    for p in first.chart().sample_points(count, seed) {
        let cols: Vec<Vec<f64>> = fields
            .iter()
            .map(|f| f.values_at(p.coords()))
            .collect::<Result<_, _>>()?;
        let m = nalgebra::DMatrix::from_fn(first.dim(), fields.len(), |i, j| cols[j][i]);
        let sv = m.singular_values();
        let top = sv.max();
        let rank = sv.iter().filter(|s| **s > 1e-9 * top.max(1e-300)).count();
        worst = worst.min(rank);
    }
    Ok(worst)
}

impl From<crate::symexpr::ParseError> for ConstructionError {
    fn from(e: crate::symexpr::ParseError) -> Self {
        ConstructionError::Geometry(e.into())
    }
}

#[cfg(test)]
mod tests;
