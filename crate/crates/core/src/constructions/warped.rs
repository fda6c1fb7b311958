use std::ops::Range;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::{merge_constants, parallel_residual, pointwise_rank, shift, ConstructionError, CLAIM_TOL};
use crate::geometry::{
    covariant_derivative_at, curvature_at, is_einstein, signature_over_box, Chart, GeometryError, MetricField,
    PointCurvature, TensorField,
};
use crate::projective::{lambda_of, verify_extsys, verify_main, ExtsysReport, MainReport, SolutionTriple};
use crate::symexpr::{evaluate, rational_from_f64, Expr};

/// Data of a doubly-warped metric h = h₀ + Σ (λ + C − ρ_i)² h_i.
#[derive(Debug, Clone)]
pub struct WarpedSpec {
    /// Two-dimensional Lorentzian block (N₀, h₀).
    pub base: MetricField,
    /// λ on the base chart; grad λ must be parallel and null.
    pub lambda: Expr,
    /// Riemannian blocks (N_i, h_i), at least two.
    pub blocks: Vec<MetricField>,
    /// The constant C, carried symbolically under the name `C`.
    pub c: f64,
    /// Distinct constants ρ_i, one per block.
    pub rho: Vec<f64>,
    /// Coefficient φ of dλ² in L on TN₀, a function on the base. The main
    /// equation requires ∇_k(φ Λ_i Λ_j) = h_ki Λ_j + h_kj Λ_i − Λ_k h_ij there.
    pub jordan: Expr,
}

/// Residuals of the structural identities of the warped metric.
#[derive(Debug, Clone, Serialize)]
pub struct WarpedReport {
    pub main: MainReport,
    /// Present when the metric is Einstein.
    pub extsys: Option<ExtsysReport>,
    /// Connection formulas, relative to 1 + max |Γ|.
    pub connection: f64,
    /// R(X_i, Y_i) = R^i(X_i, Y_i) within each block.
    pub block_curvature: f64,
    /// R(X_j, X_k) = 0 across blocks.
    pub cross_curvature: f64,
    /// Ric(X_i, Y_i) = Ric^i(X_i, Y_i), zero across blocks.
    pub ricci: f64,
}

impl WarpedReport {
    pub fn identities_hold(&self, tol: f64) -> bool {
        self.connection < tol && self.block_curvature < tol && self.cross_curvature < tol && self.ricci < tol
    }
}

#[derive(Debug, Clone)]
pub struct WarpedFamily {
    pub spec: WarpedSpec,
    pub metric: MetricField,
    /// Index ranges of N₀, N₁, …, N_m in the full chart.
    pub ranges: Vec<Range<usize>>,
    /// λ on the full chart.
    pub lambda: Expr,
    /// f_i = λ + C − ρ_i on the full chart, i = 1..m.
    pub factors: Vec<Expr>,
    /// Λ♯ = grad λ.
    pub lambda_sharp: TensorField,
    /// (L, Λ = dλ, μ = 0, B = 0).
    pub triple: SolutionTriple,
    pub report: WarpedReport,
}

fn constant(x: f64) -> Expr {
    match rational_from_f64(x) {
        Some(r) => Expr::constant(r),
        None => Expr::real(x),
    }
}

fn precondition(msg: impl Into<String>) -> ConstructionError {
    ConstructionError::Precondition(msg.into())
}

/// Builds the metric and the solution L with L♯ = ρ_i Id on TN_i and a
/// Jordan block with eigenvalue λ + C on TN₀, then checks the solution and
/// the block identities numerically.
pub fn warped(spec: WarpedSpec) -> Result<WarpedFamily, ConstructionError> {
    let m = spec.blocks.len();
    if m < 2 {
        return Err(precondition("need at least two Riemannian blocks"));
    }
    if spec.rho.len() != m {
        return Err(precondition(format!("{} constants ρ for {m} blocks", spec.rho.len())));
    }
    for i in 0..m {
        if spec.rho[..i].contains(&spec.rho[i]) {
            return Err(precondition(format!(
                "ρ values must be distinct, {} repeats",
                spec.rho[i]
            )));
        }
    }
    if spec.base.dim() != 2 {
        return Err(precondition("the base block must be two-dimensional"));
    }
    let sb = signature_over_box(&spec.base)?;
    if (sb.plus, sb.minus) != (1, 1) {
        return Err(precondition("the base block must be Lorentzian"));
    }
    for (i, h) in spec.blocks.iter().enumerate() {
        if signature_over_box(h)?.minus != 0 {
            return Err(precondition(format!("block {} is not Riemannian", i + 1)));
        }
    }
    check_null_parallel(&spec.base, &spec.lambda)?;

    // Full chart: base coordinates first, then each block in order.
    let mut coords: Vec<String> = spec.base.chart().coordinates().iter().map(|s| s.to_string()).collect();
    let mut sample_box = spec.base.chart().sample_box().to_vec();
    let mut constants = spec.base.chart().constants().clone();
    let mut excluded: Vec<Expr> = spec.base.chart().excluded().to_vec();
    let mut ranges: Vec<Range<usize>> = Vec::with_capacity(spec.blocks.len() + 1);
    ranges.push(0..2);
    for h in &spec.blocks {
        let off = coords.len();
        for c in h.chart().coordinates() {
            if coords.iter().any(|x| x == c) {
                return Err(ConstructionError::NameClash(c.to_string()));
            }
            coords.push(c.to_string());
        }
        sample_box.extend_from_slice(h.chart().sample_box());
        excluded.extend(h.chart().excluded().iter().map(|e| shift(e, off)));
        constants = merge_constants(&constants, h.chart().constants())?;
        ranges.push(off..coords.len());
    }
    if constants.contains_key("C") {
        return Err(ConstructionError::NameClash("C".into()));
    }
    constants.insert("C".into(), spec.c);
    let lambda = spec.lambda.clone();
    let lc = lambda.add(&Expr::param("C"));
    let factors: Vec<Expr> = spec.rho.iter().map(|r| lc.sub(&constant(*r))).collect();
    let mut excl_full = excluded.clone();
    excl_full.extend(factors.iter().cloned());
    let refs: Vec<&str> = coords.iter().map(String::as_str).collect();
    let chart = Chart::with_details("warped", &refs, &sample_box, excl_full, constants).map_err(|e| match e {
        GeometryError::Chart(msg) if msg.contains("excluded locus") => precondition(format!(
            "a warping factor λ + C − ρ_i vanishes in the sample box ({msg})"
        )),
        other => other.into(),
    })?;

    let n = coords.len();
    let mut g = vec![vec![Expr::zero(); n]; n];
    let mut l = vec![vec![Expr::zero(); n]; n];
    let dl: Vec<Expr> = (0..2).map(|i| lambda.diff(i)).collect();
    let jordan = spec.jordan.clone();
    for i in 0..2 {
        for j in 0..2 {
            let h0 = spec.base.component(i, j).clone();
            g[i][j] = h0.clone();
            l[i][j] = lc.mul(&h0).add(&jordan.mul(&dl[i]).mul(&dl[j]));
        }
    }
    for (b, h) in spec.blocks.iter().enumerate() {
        let r = &ranges[b + 1];
        let f2 = factors[b].powi(2);
        let rho = constant(spec.rho[b]);
        for i in 0..h.dim() {
            for j in 0..h.dim() {
                let comp = f2.mul(&shift(h.component(i, j), r.start));
                g[r.start + i][r.start + j] = comp.clone();
                l[r.start + i][r.start + j] = rho.mul(&comp);
            }
        }
    }
    let metric = MetricField::new(chart.clone(), g)?;
    let l = TensorField::symmetric(chart.clone(), l)?;
    let ginv = metric.inverse().ok_or(GeometryError::SymbolicBudget)?;
    let lambda_sharp = TensorField::vector(
        chart.clone(),
        (0..n)
            .map(|a| Expr::sum((0..2).map(|k| ginv[a][k].mul(&dl[k]))))
            .collect(),
    )?;
    let triple = SolutionTriple {
        lambda: lambda_of(&metric, &l)?,
        lambda_form: TensorField::one_form(chart.clone(), (0..n).map(|i| lambda.diff(i)).collect())?,
        l,
        mu: Expr::zero(),
        b: 0.0,
    };
    let main = verify_main(&metric, &triple.l)?;
    let extsys = if is_einstein(&metric)?.is_einstein() {
        Some(verify_extsys(&metric, &triple)?)
    } else {
        None
    };
    let mut family = WarpedFamily {
        spec,
        metric,
        ranges,
        lambda,
        factors,
        lambda_sharp,
        triple,
        report: WarpedReport {
            main,
            extsys,
            connection: 0.0,
            block_curvature: 0.0,
            cross_curvature: 0.0,
            ricci: 0.0,
        },
    };
    family.check_identities()?;
    Ok(family)
}

fn check_null_parallel(base: &MetricField, lambda: &Expr) -> Result<(), ConstructionError> {
    let chart = base.chart();
    let ginv = base.inverse().ok_or(GeometryError::SymbolicBudget)?;
    let grad: Vec<Expr> = (0..2)
        .map(|a| Expr::sum((0..2).map(|k| ginv[a][k].mul(&lambda.diff(k)))))
        .collect();
    let v = TensorField::vector(chart.clone(), grad)?;
    let par = parallel_residual(&v, base, 10, 5)?;
    if par > CLAIM_TOL {
        return Err(precondition(format!(
            "grad λ is not parallel on the base (residual {par:e})"
        )));
    }
    for p in chart.sample_points(10, 6) {
        let x = v.values_at(p.coords())?;
        let g = base.values_at(p.coords())?;
        let norm = (g * DVector::from_vec(x.clone())).dot(&DVector::from_vec(x));
        if norm.abs() > CLAIM_TOL {
            return Err(precondition(format!(
                "grad λ is not null on the base (|Λ|² = {norm:e})"
            )));
        }
    }
    Ok(())
}

impl WarpedFamily {
    fn block_of(&self, i: usize) -> usize {
        self.ranges
            .iter()
            .position(|r| r.contains(&i))
            .expect("index inside the chart")
    }

    fn block_metric(&self, b: usize) -> &MetricField {
        if b == 0 {
            &self.spec.base
        } else {
            &self.spec.blocks[b - 1]
        }
    }

    /// Curvature of every block at the projection of `p`.
    fn block_curvatures(&self, p: &[f64]) -> Result<Vec<PointCurvature>, GeometryError> {
        self.ranges
            .iter()
            .enumerate()
            .map(|(b, r)| curvature_at(self.block_metric(b), &p[r.clone()]))
            .collect()
    }

    fn check_identities(&mut self) -> Result<(), ConstructionError> {
        let n = self.metric.dim();
        let consts = self.metric.chart().constants().clone();
        let (mut conn, mut block, mut cross, mut ric): (f64, f64, f64, f64) = (0.0, 0.0, 0.0, 0.0);
        for pt in self.metric.chart().sample_points(8, 41) {
            let p = pt.coords();
            let full = curvature_at(&self.metric, p)?;
            let parts = self.block_curvatures(p)?;
            let f: Vec<f64> = self
                .factors
                .iter()
                .map(|e| evaluate(e, p, &consts))
                .collect::<Result<_, _>>()?;
            // df_i = dλ on N₀, and grad f_i = h₀^{-1} dλ.
            let dl: Vec<f64> = (0..2)
                .map(|k| evaluate(&self.lambda.diff(k), p, &consts))
                .collect::<Result<_, _>>()?;
            let h0inv = &parts[0].ginv;
            let grad: Vec<f64> = (0..2).map(|a| h0inv[a][0] * dl[0] + h0inv[a][1] * dl[1]).collect();
            let local = |b: usize, i: usize| i - self.ranges[b].start;

            let gmax = full
                .gamma
                .iter()
                .flatten()
                .flatten()
                .fold(0.0f64, |a, v| a.max(v.abs()));
            for k in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        let (bk, bi, bj) = (self.block_of(k), self.block_of(i), self.block_of(j));
                        let want = if bi == bj && bi == 0 {
                            if bk == 0 {
                                parts[0].gamma[k][i][j]
                            } else {
                                0.0
                            }
                        } else if bi == 0 || bj == 0 {
                            // ∇_{X₀} X_b = ∇_{X_b} X₀ = (df_b(X₀)/f_b) X_b
                            let (x0, xb) = if bi == 0 { (i, j) } else { (j, i) };
                            let b = self.block_of(xb);
                            if k == xb {
                                dl[x0] / f[b - 1]
                            } else {
                                0.0
                            }
                        } else if bi == bj {
                            // ∇_{X_b} Y_b = ∇^b − h(X_b, Y_b) grad f_b / f_b
                            let b = bi;
                            if bk == b {
                                parts[b].gamma[local(b, k)][local(b, i)][local(b, j)]
                            } else if bk == 0 {
                                -full.g[i][j] * grad[k] / f[b - 1]
                            } else {
                                0.0
                            }
                        } else {
                            0.0
                        };
                        conn = conn.max((full.gamma[k][i][j] - want).abs() / (1.0 + gmax));
                    }
                }
            }

            let rmax = 1.0 + full.max_riemann();
            for l in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        for k in 0..n {
                            let v = full.riemann[l][i][j][k];
                            let (bi, bj) = (self.block_of(i), self.block_of(j));
                            if bi != bj {
                                cross = cross.max(v.abs() / rmax);
                                continue;
                            }
                            let (bk, bl) = (self.block_of(k), self.block_of(l));
                            let want = if bk == bi && bl == bi {
                                parts[bi].riemann[local(bi, l)][local(bi, i)][local(bi, j)][local(bi, k)]
                            } else {
                                0.0
                            };
                            block = block.max((v - want).abs() / rmax);
                        }
                    }
                }
            }

            let cmax = 1.0 + full.max_ricci();
            for i in 0..n {
                for j in 0..n {
                    let (bi, bj) = (self.block_of(i), self.block_of(j));
                    let want = if bi == bj {
                        parts[bi].ricci[local(bi, i)][local(bi, j)]
                    } else {
                        0.0
                    };
                    ric = ric.max((full.ricci[i][j] - want).abs() / cmax);
                }
            }
        }
        self.report.connection = conn;
        self.report.block_curvature = block;
        self.report.cross_curvature = cross;
        self.report.ricci = ric;
        Ok(())
    }

    /// Λ̃ ∈ TN₀ with (L♯ − (λ + C)) Λ̃ = Λ♯, when it exists.
    fn lambda_tilde(&self, p: &[f64]) -> Result<Option<Vec<f64>>, ConstructionError> {
        let consts = self.metric.chart().constants();
        let h = self.spec.base.values_at(&p[0..2])?;
        let hinv = h.try_inverse().ok_or_else(|| precondition("singular base metric"))?;
        let lm = DMatrix::from_fn(2, 2, |i, j| {
            evaluate(self.triple.l.component(&[i, j]), p, consts).unwrap_or(f64::NAN)
        });
        let ev = evaluate(&self.lambda, p, consts)? + self.spec.c;
        let nil = &hinv * lm - DMatrix::identity(2, 2) * ev;
        let target = DVector::from_vec(self.lambda_sharp.values_at(p)?[0..2].to_vec());
        let svd = nil.clone().svd(true, true);
        let Ok(x) = svd.solve(&target, 1e-12) else {
            return Ok(None);
        };
        if (&nil * &x - &target).amax() > 1e-9 * (1.0 + target.amax()) {
            return Ok(None);
        }
        let mut full = vec![0.0; self.metric.dim()];
        full[0] = x[0];
        full[1] = x[1];
        Ok(Some(full))
    }
}

/// Residuals of the directional derivatives of U = grad u.
#[derive(Debug, Clone, Serialize)]
pub struct DirectionalReport {
    /// ∇_Y U for Y tangent to the other Riemannian blocks.
    pub other_blocks: f64,
    /// ∇_{Λ♯} U.
    pub along_lambda: f64,
    /// ∇_{Λ̃} U + Λ(Λ̃)/f_m U; absent without a Jordan block.
    pub along_tilde: Option<f64>,
    /// ∇_V U + h(V, U)/f_m Λ♯ for V tangent to N_m.
    pub along_block: f64,
}

impl DirectionalReport {
    pub fn max(&self) -> f64 {
        self.other_blocks
            .max(self.along_lambda)
            .max(self.along_tilde.unwrap_or(0.0))
            .max(self.along_block)
    }
}

#[derive(Debug, Clone)]
pub struct Lemma49Field {
    /// W = f_m U + u Λ♯.
    pub w: TensorField,
    /// U = h^{-1} du.
    pub u_field: TensorField,
    /// max |∇W|.
    pub residual: f64,
    pub directional: DirectionalReport,
}

/// The parallel field W = (λ + C − ρ_m) U + u Λ♯ built from a function `u`
/// on the flat block `m` (1-based) with du parallel of unit length.
pub fn lemma49_parallel_field(fam: &WarpedFamily, m: usize, u: &Expr) -> Result<Lemma49Field, ConstructionError> {
    if m == 0 || m > fam.spec.blocks.len() {
        return Err(precondition(format!("block index {m} out of range")));
    }
    let hm = &fam.spec.blocks[m - 1];
    let mut worst: f64 = 0.0;
    for p in hm.chart().sample_points(6, 3) {
        worst = worst.max(curvature_at(hm, p.coords())?.max_riemann());
    }
    if worst > CLAIM_TOL {
        return Err(precondition(format!("block {m} is not flat (curvature {worst:e})")));
    }
    let du = TensorField::one_form(hm.chart().clone(), (0..hm.dim()).map(|i| u.diff(i)).collect())?;
    let hess = parallel_residual(&du, hm, 6, 4)?;
    if hess > CLAIM_TOL {
        return Err(precondition(format!(
            "du is not parallel on block {m} (residual {hess:e})"
        )));
    }
    for p in hm.chart().sample_points(6, 5) {
        let ginv = hm
            .values_at(p.coords())?
            .try_inverse()
            .ok_or_else(|| precondition("singular block metric"))?;
        let d = DVector::from_vec(du.values_at(p.coords())?);
        let norm = (&ginv * &d).dot(&d);
        if (norm - 1.0).abs() > CLAIM_TOL {
            return Err(precondition(format!("|du| must be 1 on block {m}, got |du|² = {norm}")));
        }
    }

    let chart = fam.metric.chart().clone();
    let n = chart.dim();
    let off = fam.ranges[m].start;
    let u_full = shift(u, off);
    let ginv = fam.metric.inverse().ok_or(GeometryError::SymbolicBudget)?;
    let du_full: Vec<Expr> = (0..n).map(|i| u_full.diff(i)).collect();
    let u_vec: Vec<Expr> = (0..n)
        .map(|a| Expr::sum((0..n).map(|k| ginv[a][k].mul(&du_full[k]))))
        .collect();
    let f = &fam.factors[m - 1];
    let lam = fam.lambda_sharp.components();
    let w: Vec<Expr> = (0..n).map(|a| f.mul(&u_vec[a]).add(&u_full.mul(&lam[a]))).collect();
    let u_field = TensorField::vector(chart.clone(), u_vec)?;
    let w = TensorField::vector(chart, w)?;
    let residual = parallel_residual(&w, &fam.metric, 10, 7)?;
    let directional = directional(fam, m, &u_field)?;
    Ok(Lemma49Field {
        w,
        u_field,
        residual,
        directional,
    })
}

fn directional(fam: &WarpedFamily, m: usize, u: &TensorField) -> Result<DirectionalReport, ConstructionError> {
    let n = fam.metric.dim();
    let consts = fam.metric.chart().constants();
    let mut rep = DirectionalReport {
        other_blocks: 0.0,
        along_lambda: 0.0,
        along_tilde: Some(0.0),
        along_block: 0.0,
    };
    let nabla = |d: &[f64], y: &[f64], a: usize| -> f64 { (0..n).map(|k| y[k] * d[a * n + k]).sum() };
    for pt in fam.metric.chart().sample_points(8, 9) {
        let p = pt.coords();
        let d = covariant_derivative_at(u, &fam.metric, p)?;
        let uv = u.values_at(p)?;
        let lv = fam.lambda_sharp.values_at(p)?;
        let fm = evaluate(&fam.factors[m - 1], p, consts)?;
        for (b, r) in fam.ranges.iter().enumerate().skip(1) {
            if b == m {
                continue;
            }
            for k in r.clone() {
                for a in 0..n {
                    rep.other_blocks = rep.other_blocks.max(d[a * n + k].abs());
                }
            }
        }
        for a in 0..n {
            rep.along_lambda = rep.along_lambda.max(nabla(&d, &lv, a).abs());
        }
        match fam.lambda_tilde(p)? {
            Some(t) => {
                let lam_t: f64 = (0..2)
                    .map(|k| evaluate(&fam.lambda.diff(k), p, consts).unwrap_or(f64::NAN) * t[k])
                    .sum();
                for a in 0..n {
                    let r = nabla(&d, &t, a) + lam_t / fm * uv[a];
                    if let Some(x) = rep.along_tilde.as_mut() {
                        *x = x.max(r.abs());
                    }
                }
            }
            None => rep.along_tilde = None,
        }
        let g = fam.metric.values_at(p)?;
        for k in fam.ranges[m].clone() {
            let hvu: f64 = (0..n).map(|b| g[(k, b)] * uv[b]).sum();
            for a in 0..n {
                let r = d[a * n + k] + hvu / fm * lv[a];
                rep.along_block = rep.along_block.max(r.abs());
            }
        }
    }
    Ok(rep)
}

/// One field per coordinate of the flat block `m`, which must be an
/// orthonormal parallel coframe; returns the fields and the pointwise rank of
/// {W_1, …, W_r, Λ♯}.
pub fn lemma49_fields(fam: &WarpedFamily, m: usize) -> Result<(Vec<Lemma49Field>, usize), ConstructionError> {
    if m == 0 || m > fam.spec.blocks.len() {
        return Err(precondition(format!("block index {m} out of range")));
    }
    let hm = &fam.spec.blocks[m - 1];
    let names = hm.chart().coordinates();
    let fields: Vec<Lemma49Field> = (0..hm.dim())
        .map(|i| lemma49_parallel_field(fam, m, &Expr::coord(i, names[i])))
        .collect::<Result<_, _>>()?;
    let mut all: Vec<&TensorField> = fields.iter().map(|f| &f.w).collect();
    all.push(&fam.lambda_sharp);
    let rank = pointwise_rank(&all, 8, 11)?;
    Ok((fields, rank))
}
