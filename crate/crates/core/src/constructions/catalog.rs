use std::sync::Arc;

use nalgebra::DVector;
use rayon::prelude::*;
use serde::Serialize;

use super::cone::{cone, cone_with, product, round_sphere, sphere_product, ConeField, Constructed};
use super::nullcone::{null_cone_family, quadratic_potential, NullConeChecks};
use super::warped::{warped, WarpedFamily, WarpedSpec};
use super::{parallel_residual, ConstructionError, CLAIM_TOL};
use crate::geometry::{curvature_at, is_einstein, signature_over_box, Chart, Einstein, MetricField, TensorField};
use crate::projective::{verify_extsys, verify_main, SolutionTriple};
use crate::symexpr::{rat, Expr};

#[derive(Debug, Clone)]
pub struct NamedTensor {
    pub name: String,
    pub tensor: TensorField,
}

/// Values an entry is known to have, each checked or used downstream.
#[derive(Debug, Clone, Default, Serialize)]
pub struct Expected {
    /// Degree of mobility.
    pub d: Option<usize>,
    /// Dimension of parallel symmetric (0,2)-tensors.
    pub par02: Option<usize>,
    /// Parallel vector fields.
    pub k: Option<usize>,
    /// Number of nonflat indecomposable factors.
    pub l: Option<usize>,
    pub scal: Option<f64>,
    /// Signature as an unordered pair.
    pub signature: Option<(usize, usize)>,
    pub ricci_flat: Option<bool>,
}

#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub name: String,
    pub description: String,
    pub metric: MetricField,
    /// Known solutions of the main equation, other than g.
    pub solutions: Vec<NamedTensor>,
    /// Their completions to the extended system (Einstein entries only).
    pub triples: Vec<(String, SolutionTriple)>,
    /// Known parallel vector fields.
    pub vector_fields: Vec<NamedTensor>,
    pub cone_field: Option<ConeField>,
    /// Base metric when the entry is a cone.
    pub cone_base: Option<MetricField>,
    pub warped: Option<Box<WarpedFamily>>,
    pub null_cone: Option<NullConeChecks>,
    pub expected: Expected,
    pub notes: String,
}

const NAMES: &[&str] = &[
    "flat2",
    "flat3",
    "flat4",
    "flat5",
    "flat6",
    "sphere2",
    "sphere3",
    "sphere4",
    "example14",
    "example14_displayed",
    "example36",
    "s2xs3",
    "cone_sphere3",
    "cone_flat2",
    "cone_s2xs2",
    "cone_s2xs3",
    "case1_5_1_1",
    "case1_9_0_2",
    "case2_5",
    "warped",
    "warped_s2",
    "null_cone",
];

pub fn catalog_names() -> &'static [&'static str] {
    NAMES
}

/// Every built-in entry, constructed and verified in parallel.
pub fn catalog() -> Result<Vec<CatalogEntry>, ConstructionError> {
    NAMES.par_iter().map(|n| catalog_entry(n)).collect()
}

/// One verified entry by name.
pub fn catalog_entry(name: &str) -> Result<CatalogEntry, ConstructionError> {
    let mut e = build(name)?;
    verify(&mut e)?;
    Ok(e)
}

fn entry(name: &str, description: &str, metric: MetricField) -> CatalogEntry {
    CatalogEntry {
        name: name.into(),
        description: description.into(),
        metric,
        solutions: Vec::new(),
        triples: Vec::new(),
        vector_fields: Vec::new(),
        cone_field: None,
        cone_base: None,
        warped: None,
        null_cone: None,
        expected: Expected::default(),
        notes: String::new(),
    }
}

fn from_constructed(name: &str, description: &str, c: Constructed) -> CatalogEntry {
    let mut e = entry(name, description, c.metric);
    e.cone_field = c.cone_field;
    e.cone_base = c.base;
    e
}

fn sym(chart: &Arc<Chart>, rows: &[&[&str]]) -> Result<TensorField, ConstructionError> {
    let n = chart.dim();
    let mut m = vec![vec![Expr::zero(); n]; n];
    for (i, r) in rows.iter().enumerate() {
        for (j, t) in r.iter().enumerate() {
            let e = chart.parse(t)?;
            m[i][j] = e.clone();
            m[j][i] = e;
        }
    }
    Ok(TensorField::symmetric(chart.clone(), m)?)
}

fn named(name: &str, tensor: TensorField) -> NamedTensor {
    NamedTensor {
        name: name.into(),
        tensor,
    }
}

fn vector(chart: &Arc<Chart>, comps: &[&str]) -> Result<TensorField, ConstructionError> {
    let c = comps.iter().map(|s| chart.parse(s)).collect::<Result<Vec<_>, _>>()?;
    Ok(TensorField::vector(chart.clone(), c)?)
}

/// Flat ℝⁿ with coordinates `{prefix}1..n` on [−1, 1]; ξ is the position field.
pub(crate) fn flat(n: usize, prefix: &str) -> Result<Constructed, ConstructionError> {
    let names: Vec<String> = (1..=n).map(|i| format!("{prefix}{i}")).collect();
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let chart = Chart::new(&format!("R{n}"), &refs, &vec![(-1.0, 1.0); n])?;
    let metric = MetricField::diagonal(chart.clone(), vec![Expr::one(); n])?;
    let xi = TensorField::vector(chart, (0..n).map(|i| Expr::coord(i, &names[i])).collect())?;
    Ok(Constructed {
        metric,
        cone_field: Some(ConeField { xi, residual: 0.0 }),
        base: None,
    })
}

/// The five-dimensional Lorentzian Einstein metric with the sign pattern that
/// gives Scal = 20, or with the displayed (opposite) pattern.
pub(crate) fn example14(displayed: bool) -> Result<MetricField, ConstructionError> {
    let chart = Chart::with_details(
        if displayed { "ex14_displayed" } else { "ex14" },
        &["t", "x0", "x1", "x2", "x3"],
        &[(-0.5, 0.5), (-1.0, 1.0), (-1.0, 1.0), (-0.5, 0.5), (1.0, 2.1)],
        vec![Expr::coord(4, "x3").sin()],
        Default::default(),
    )?;
    let (a, b) = if displayed {
        ("1", "exp(2*t)")
    } else {
        ("-1", "-exp(2*t)")
    };
    Ok(MetricField::from_lower_triangle(
        chart,
        &[
            vec![a],
            vec!["0", "0"],
            vec!["0", "exp(2*t)", "exp(2*t)*exp(x2)*sin(x3)"],
            vec!["0", "0", "0", b],
            vec!["0", "0", "0", "0", b],
        ],
    )?)
}

fn example14_solutions(g: &MetricField) -> Result<Vec<NamedTensor>, ConstructionError> {
    let c = g.chart();
    Ok(vec![
        named("L1", sym(c, &[&["exp(2*t)"]])?),
        named(
            "L2",
            sym(c, &[&["exp(2*t)*x1^2"], &["0", "0"], &["exp(2*t)*x1", "0", "exp(2*t)"]])?,
        ),
        named(
            "L3",
            sym(c, &[&["2*exp(2*t)*x1"], &["0", "0"], &["exp(2*t)", "0", "0"]])?,
        ),
    ])
}

/// dX^α ⊙ dX^β restricted to the unit sphere, X the standard embedding.
fn sphere_embedding_solutions(g: &MetricField) -> Result<Vec<NamedTensor>, ConstructionError> {
    let chart = g.chart();
    let n = g.dim();
    let names = chart.coordinates();
    // X_0 = cos a0, X_1 = sin a0 cos a1, …, X_n = sin a0 ⋯ sin a_{n−1}.
    let mut x = Vec::with_capacity(n + 1);
    let mut prefix = Expr::one();
    for i in 0..n {
        let a = Expr::coord(i, names[i]);
        x.push(prefix.mul(&a.cos()));
        prefix = prefix.mul(&a.sin());
    }
    x.push(prefix);
    let pair = |alpha: usize, beta: usize| -> Result<TensorField, ConstructionError> {
        let m: Vec<Vec<Expr>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let s = x[alpha].diff(i).mul(&x[beta].diff(j));
                        if alpha == beta {
                            s
                        } else {
                            s.add(&x[beta].diff(i).mul(&x[alpha].diff(j)))
                        }
                    })
                    .collect()
            })
            .collect();
        Ok(TensorField::symmetrized(chart.clone(), &m)?)
    };
    let mut out = Vec::new();
    for alpha in 0..=n {
        for beta in alpha..=n {
            let name = if alpha == beta {
                format!("dX{alpha}^2")
            } else {
                format!("dX{alpha}.dX{beta}")
            };
            out.push(named(&name, pair(alpha, beta)?));
        }
    }
    Ok(out)
}

/// A basis of solutions on flat ℝⁿ: constants E_ab, e_a⊙x♭ and x♭⊙x♭.
fn flat_solutions(g: &MetricField) -> Result<Vec<NamedTensor>, ConstructionError> {
    let chart = g.chart();
    let n = g.dim();
    let names = chart.coordinates();
    let x: Vec<Expr> = (0..n).map(|i| Expr::coord(i, names[i])).collect();
    let mut out = Vec::new();
    for a in 0..n {
        for b in a..n {
            let mut m = vec![vec![Expr::zero(); n]; n];
            m[a][b] = Expr::one();
            m[b][a] = Expr::one();
            out.push(named(
                &format!("E{}{}", a + 1, b + 1),
                TensorField::symmetric(chart.clone(), m)?,
            ));
        }
    }
    for a in 0..n {
        let mut m = vec![vec![Expr::zero(); n]; n];
        for j in 0..n {
            m[a][j] = m[a][j].add(&x[j]);
            m[j][a] = m[j][a].add(&x[j]);
        }
        out.push(named(&format!("P{}", a + 1), TensorField::symmetric(chart.clone(), m)?));
    }
    let q = (0..n).map(|i| (0..n).map(|j| x[i].mul(&x[j])).collect()).collect();
    out.push(named("Q", TensorField::symmetric(chart.clone(), q)?));
    Ok(out)
}

fn build(name: &str) -> Result<CatalogEntry, ConstructionError> {
    let mut e = match name {
        _ if name.starts_with("flat") => {
            let n: usize = name[4..].parse().map_err(|_| ConstructionError::Unknown(name.into()))?;
            if !(2..=6).contains(&n) {
                return Err(ConstructionError::Unknown(name.into()));
            }
            let mut e = from_constructed(name, &format!("flat R^{n}"), flat(n, "x")?);
            e.solutions = flat_solutions(&e.metric)?;
            let max = (n + 1) * (n + 2) / 2;
            e.expected = Expected {
                d: Some(max),
                par02: Some(n * (n + 1) / 2),
                k: Some(n),
                l: Some(0),
                scal: Some(0.0),
                signature: Some((0, n)),
                ricci_flat: Some(true),
            };
            e.notes = "constant curvature: maximal degree of mobility; the solutions form a basis".into();
            e
        }
        "sphere2" | "sphere3" | "sphere4" => {
            let n: usize = name[6..].parse().expect("digit");
            let g = round_sphere(n, rat(1, 1), "a")?;
            let mut e = entry(name, &format!("unit S^{n} in nested angular coordinates"), g);
            e.solutions = sphere_embedding_solutions(&e.metric)?;
            e.expected = Expected {
                d: Some((n + 1) * (n + 2) / 2),
                scal: Some((n * (n - 1)) as f64),
                signature: Some((0, n)),
                ricci_flat: Some(n == 1),
                ..Default::default()
            };
            e.notes = "constant curvature 1; the restrictions of dX^a⊙dX^b form a basis of solutions".into();
            e
        }
        "example14" | "example14_displayed" => {
            let displayed = name == "example14_displayed";
            let mut e = entry(
                name,
                if displayed {
                    "five-dimensional Einstein metric with the displayed sign pattern, Scal -20"
                } else {
                    "five-dimensional Lorentzian Einstein metric, Scal 20, signature (1,4)"
                },
                example14(displayed)?,
            );
            e.solutions = example14_solutions(&e.metric)?;
            e.expected = Expected {
                d: Some(4),
                scal: Some(if displayed { -20.0 } else { 20.0 }),
                signature: Some((1, 4)),
                ricci_flat: Some(false),
                ..Default::default()
            };
            e.notes = if displayed {
                "the printed sign pattern; isometric to the negative of `example14`".into()
            } else {
                "sign pattern whose cone is Ricci-flat; D = 4 from two independent oracles".into()
            };
            e
        }
        "example36" | "case2_5" => {
            let c = cone(&example14(false)?, 1.0)?;
            let case2 = name == "case2_5";
            let mut e = from_constructed(
                name,
                if case2 {
                    "realization with a null parallel plane, n = 5, k = 2, l = 1: the cone over example14 on the sector g(ξ,ξ) > 0"
                } else {
                    "cone over example14: Ricci-flat, nonflat, two parallel null fields"
                },
                c,
            );
            let ch = e.metric.chart().clone();
            e.vector_fields = vec![
                named("v1", vector(&ch, &["exp(t)", "-exp(t)/r", "0", "0", "0", "0"])?),
                named(
                    "v2",
                    vector(&ch, &["x1*exp(t)", "-x1*exp(t)/r", "exp(-t)/r", "0", "0", "0"])?,
                ),
            ];
            e.expected = Expected {
                d: None,
                par02: Some(4),
                k: Some(2),
                l: Some(1),
                scal: Some(0.0),
                signature: Some((2, 4)),
                ricci_flat: Some(true),
            };
            e.notes = "indecomposability is supported numerically by dim Par02 = 4 = 2*3/2 + 1".into();
            e
        }
        "s2xs3" => {
            let g = sphere_product(&[(2, rat(1, 4), "a"), (3, rat(1, 2), "b")])?;
            let mut e = entry(name, "S^2(1/2) x S^3(1/sqrt 2), Einstein with Ric = 4g", g);
            e.expected = Expected {
                d: Some(1),
                scal: Some(20.0),
                signature: Some((0, 5)),
                ricci_flat: Some(false),
                ..Default::default()
            };
            e.notes = "its cone is a generic nonflat Ricci-flat cone; D = 1 is a numerical claim".into();
            e
        }
        "cone_sphere3" => {
            let mut e = from_constructed(
                name,
                "cone over unit S^3: a flat sector of R^4",
                cone(&round_sphere(3, rat(1, 1), "a")?, 1.0)?,
            );
            e.expected = Expected {
                par02: Some(10),
                k: Some(4),
                l: Some(0),
                scal: Some(0.0),
                signature: Some((0, 4)),
                ricci_flat: Some(true),
                ..Default::default()
            };
            e
        }
        "cone_flat2" => {
            let mut e = from_constructed(
                name,
                "cone over flat R^2: not Ricci-flat",
                cone(&flat(2, "x")?.metric, 1.0)?,
            );
            e.expected = Expected {
                signature: Some((0, 3)),
                ricci_flat: Some(false),
                ..Default::default()
            };
            e
        }
        "cone_s2xs2" => {
            let base = sphere_product(&[(2, rat(1, 3), "a"), (2, rat(1, 3), "b")])?;
            let mut e = from_constructed(name, "cone over S^2(1/sqrt 3) x S^2(1/sqrt 3)", cone(&base, 1.0)?);
            e.expected = Expected {
                par02: Some(1),
                k: Some(0),
                l: Some(1),
                scal: Some(0.0),
                signature: Some((0, 5)),
                ricci_flat: Some(true),
                ..Default::default()
            };
            e
        }
        "cone_s2xs3" => {
            let base = sphere_product(&[(2, rat(1, 4), "a"), (3, rat(1, 2), "b")])?;
            let mut e = from_constructed(name, "cone over S^2(1/2) x S^3(1/sqrt 2)", cone(&base, 1.0)?);
            e.expected = Expected {
                par02: Some(1),
                k: Some(0),
                l: Some(1),
                scal: Some(0.0),
                signature: Some((0, 6)),
                ricci_flat: Some(true),
                ..Default::default()
            };
            e
        }
        "case1_5_1_1" => {
            let base = sphere_product(&[(2, rat(1, 3), "a"), (2, rat(1, 3), "b")])?;
            let c = product(&flat(1, "y")?, &cone(&base, 1.0)?)?;
            let mut e = from_constructed(
                name,
                "realization with a nondegenerate flat factor, n = 5, k = 1, l = 1: R x (5-dim cone)",
                c,
            );
            e.expected = Expected {
                par02: Some(2),
                k: Some(1),
                l: Some(1),
                scal: Some(0.0),
                signature: Some((0, 6)),
                ricci_flat: Some(true),
                ..Default::default()
            };
            e
        }
        "case1_9_0_2" => {
            let b1 = sphere_product(&[(2, rat(1, 3), "a"), (2, rat(1, 3), "b")])?;
            let b2 = sphere_product(&[(2, rat(1, 3), "c"), (2, rat(1, 3), "d")])?;
            let c = product(&cone_with(&b1, 1.0, "r1")?, &cone_with(&b2, 1.0, "r2")?)?;
            let mut e = from_constructed(
                name,
                "realization with a nondegenerate flat factor, n = 9, k = 0, l = 2: product of two 5-dim cones",
                c,
            );
            e.expected = Expected {
                par02: Some(2),
                k: Some(0),
                l: Some(2),
                scal: Some(0.0),
                signature: Some((0, 10)),
                ricci_flat: Some(true),
                ..Default::default()
            };
            e
        }
        "warped" | "warped_s2" => {
            let fam = warped(warped_spec(name == "warped_s2")?)?;
            let mut e = entry(
                name,
                if name == "warped" {
                    "doubly warped metric: h0 = dx.dy, lambda = x, flat blocks, rho = (1, 2), C = 0"
                } else {
                    "doubly warped metric with a round S^2 as the second block"
                },
                fam.metric.clone(),
            );
            e.solutions = vec![named("L", fam.triple.l.clone())];
            if fam.report.extsys.is_some() {
                e.triples = vec![("L".into(), fam.triple.clone())];
            }
            e.vector_fields = vec![named("grad_lambda", fam.lambda_sharp.clone())];
            e.expected = Expected {
                signature: Some((1, 5)),
                ricci_flat: Some(name == "warped"),
                ..Default::default()
            };
            if name == "warped" {
                // every block is flat and the cross-block curvature vanishes
                e.expected.d = Some(28);
            }
            e.notes = "B = 0, mu = 0; C is carried as a named constant".into();
            e.warped = Some(Box::new(fam));
            e
        }
        "null_cone" => {
            let h = flat(3, "z")?.metric;
            let f = quadratic_potential(&h, 1.0);
            let fam = null_cone_family(&h, &f, 1.0)?;
            let mut e = entry(
                name,
                "dr^2 + r^2(-dt^2 + e^{2t} h), h flat R^3, F = |z|^2/2, C = 1",
                fam.metric.clone(),
            );
            e.vector_fields = vec![named("v", fam.v.clone()), named("V", fam.big_v.clone())];
            e.expected = Expected {
                k: Some(5),
                scal: Some(0.0),
                signature: Some((1, 4)),
                ricci_flat: Some(true),
                ..Default::default()
            };
            e.notes = "flat because h is flat; g(v,V) = -C".into();
            e.null_cone = Some(fam.checks);
            e
        }
        _ => return Err(ConstructionError::Unknown(name.into())),
    };
    e.name = name.into();
    Ok(e)
}

/// h0 = dx⊙dy, λ = x, C = 0, ρ = (1, 2), flat ℝ² blocks (or S² second).
pub fn warped_spec(sphere_block: bool) -> Result<WarpedSpec, ConstructionError> {
    let base_chart = Chart::new("N0", &["x", "y"], &[(2.5, 3.5), (-1.0, 1.0)])?;
    let base = MetricField::from_lower_triangle(base_chart.clone(), &[vec!["0"], vec!["1", "0"]])?;
    let b1 = MetricField::diagonal(
        Chart::new("N1", &["u1", "u2"], &[(-1.0, 1.0), (-1.0, 1.0)])?,
        vec![Expr::one(), Expr::one()],
    )?;
    let b2 = if sphere_block {
        round_sphere(2, rat(1, 1), "w")?
    } else {
        MetricField::diagonal(
            Chart::new("N2", &["w1", "w2"], &[(-1.0, 1.0), (-1.0, 1.0)])?,
            vec![Expr::one(), Expr::one()],
        )?
    };
    Ok(WarpedSpec {
        lambda: base_chart.coord("x").expect("x"),
        base,
        blocks: vec![b1, b2],
        c: 0.0,
        rho: vec![1.0, 2.0],
        jordan: base_chart.parse("2*y + 3")?,
    })
}

fn fail(e: &CatalogEntry, claim: impl Into<String>, residual: f64) -> ConstructionError {
    ConstructionError::Verification {
        entry: e.name.clone(),
        claim: claim.into(),
        residual,
    }
}

fn verify(e: &mut CatalogEntry) -> Result<(), ConstructionError> {
    let g = &e.metric;
    let sig = signature_over_box(g)?;
    if let Some(want) = e.expected.signature {
        if sig.unordered() != want {
            return Err(fail(
                e,
                format!("signature {:?}, found {:?}", want, sig.unordered()),
                f64::NAN,
            ));
        }
    }
    let center = g.chart().center();
    let cv = curvature_at(g, center.coords())?;
    if let Some(s) = e.expected.scal {
        if (cv.scal - s).abs() > CLAIM_TOL * (1.0 + s.abs()) {
            return Err(fail(e, format!("Scal = {s}"), cv.scal - s));
        }
    }
    if let Some(rf) = e.expected.ricci_flat {
        let mut worst: f64 = 0.0;
        for p in g.chart().sample_points(4, 31) {
            worst = worst.max(curvature_at(g, p.coords())?.max_ricci());
        }
        if (worst < CLAIM_TOL) != rf {
            return Err(fail(e, format!("Ricci-flat = {rf}"), worst));
        }
    }
    let einstein = is_einstein(g)?;
    for s in &e.solutions {
        let rep = verify_main(g, &s.tensor)?;
        if rep.residual.max_ratio > CLAIM_TOL {
            return Err(fail(
                e,
                format!("{} solves the main equation", s.name),
                rep.residual.max_ratio,
            ));
        }
    }
    if let Einstein::Yes { b, .. } = einstein {
        if e.triples.is_empty() {
            for s in &e.solutions {
                let t = SolutionTriple::from_solution(g, s.tensor.clone(), b)?;
                e.triples.push((s.name.clone(), t));
            }
        }
        for (name, t) in &e.triples {
            let rep = verify_extsys(g, t)?;
            if !rep.pass {
                let r = rep.first.max_ratio.max(rep.second.max_ratio).max(rep.third.max_ratio);
                return Err(fail(e, format!("{name} extends to the extended system"), r));
            }
        }
    }
    for v in &e.vector_fields {
        let r = parallel_residual(&v.tensor, g, 8, 37)?;
        if r > CLAIM_TOL {
            return Err(fail(e, format!("{} is parallel", v.name), r));
        }
    }
    if e.name == "example36" || e.name == "case2_5" {
        let r = isotropy_residual(g, &e.vector_fields)?;
        if r > CLAIM_TOL {
            return Err(fail(e, "span{v1, v2} is totally isotropic", r));
        }
    }
    if let Some(c) = &e.cone_field {
        if c.residual > CLAIM_TOL {
            return Err(fail(e, "∇ξ = Id", c.residual));
        }
    }
    if let Some(w) = &e.warped {
        let r = &w.report;
        if !r.main.pass {
            return Err(fail(e, "L solves the main equation", r.main.residual.max_ratio));
        }
        if !r.identities_hold(CLAIM_TOL) {
            let worst = r.connection.max(r.block_curvature).max(r.cross_curvature).max(r.ricci);
            return Err(fail(e, "connection and block-curvature identities", worst));
        }
    }
    if let Some(c) = &e.null_cone {
        if !c.passes(CLAIM_TOL) {
            return Err(fail(
                e,
                "null-cone family identities",
                c.v_residual.max(c.big_v_residual).max(c.inner_residual),
            ));
        }
    }
    Ok(())
}

/// max |g(v_i, v_j)| over sample points and pairs.
pub fn isotropy_residual(g: &MetricField, fields: &[NamedTensor]) -> Result<f64, ConstructionError> {
    let mut worst: f64 = 0.0;
    for p in g.chart().sample_points(8, 43) {
        let m = g.values_at(p.coords())?;
        let vals: Vec<DVector<f64>> = fields
            .iter()
            .map(|f| f.tensor.values_at(p.coords()).map(DVector::from_vec))
            .collect::<Result<_, _>>()?;
        for a in &vals {
            for b in &vals {
                worst = worst.max((&m * a).dot(b).abs());
            }
        }
    }
    Ok(worst)
}
