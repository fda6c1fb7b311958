// Acceptance run: one PASS/FAIL line per criterion with the measured values,
// the pinned tolerances and the wall time against its budget.
//
// The table goes straight to stdout so it shows up without `--nocapture`.

use std::collections::BTreeSet;
use std::io::Write;
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use projmob::constructions::{
    catalog, catalog_entry, cone_facts, lemma49_fields, lift_residual, lift_triple, parallel_residual, Constructed,
    LIFT_SIGN,
};
use projmob::enumerate::{mobility_values, projective_dim_values, SignatureClass};
use projmob::geometry::{curvature_at, is_einstein, musical, signature_over_box, Einstein, MetricField, TensorField};
use projmob::mobility::{build_prolongation, kernel_dimension, loop_transport_dimension, parallel_counts, LoopSpec};
use projmob::projective::{
    fit_metric_multiple, geodesic_projective_test, projective_deformation, random_seeds, reconstruct_metric,
    verify_extsys, verify_main, SolutionTriple,
};
use projmob::symexpr::{rat, Expr};

/// Criteria whose stated form does not hold; see the notes printed with them.
const KNOWN_FAILURES: &[u32] = &[6];

fn say(line: String) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{line}");
}

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn run(id: u32, title: &str, budget: Duration, f: impl FnOnce() -> Verdict) -> (u32, bool) {
    let start = Instant::now();
    let v = f();
    let took = start.elapsed();
    let pass = v.pass && took <= budget;
    say(format!(
        "{} {:>2} {:<42} {:>8.2} s / {:>5} s  {}",
        if pass { "PASS" } else { "FAIL" },
        id,
        title,
        took.as_secs_f64(),
        budget.as_secs(),
        v.detail
    ));
    (id, pass)
}

fn triple(g: &MetricField, l: &TensorField, b: f64) -> SolutionTriple {
    SolutionTriple::from_solution(g, l.clone(), b).unwrap()
}

fn matrix_at(t: &TensorField, p: &[f64]) -> DMatrix<f64> {
    let n = t.dim();
    DMatrix::from_row_slice(n, n, &t.values_at(p).unwrap())
}

fn numeric_rank(rows: &[Vec<f64>]) -> usize {
    let m = DMatrix::from_fn(rows.len(), rows[0].len(), |i, j| rows[i][j]);
    let sv = m.singular_values();
    let top = sv.max();
    sv.iter().filter(|s| **s > 1e-9 * top).count()
}

fn unordered(g: &MetricField) -> (usize, usize) {
    signature_over_box(g).unwrap().unordered()
}

fn example14_reproduction() -> Verdict {
    let e = catalog_entry("example14").unwrap();
    let g = &e.metric;
    let (b, scal) = match is_einstein(g).unwrap() {
        Einstein::Yes { b, scal, .. } => (b, scal),
        Einstein::No { .. } => return verdict(false, "not Einstein"),
    };
    let points = g.chart().sample_points(12, 41);
    let scal_dev = points
        .iter()
        .map(|p| (curvature_at(g, p.coords()).unwrap().scal - 20.0).abs())
        .fold(0.0, f64::max);
    let main: Vec<f64> = e
        .solutions
        .iter()
        .map(|s| verify_main(g, &s.tensor).unwrap().residual.max_ratio)
        .collect();
    let main_ok = e.solutions.iter().all(|s| verify_main(g, &s.tensor).unwrap().pass);
    let gt = TensorField::metric(g);
    let mut all = vec![&gt];
    all.extend(e.solutions.iter().map(|s| &s.tensor));
    let rows: Vec<Vec<f64>> = all
        .iter()
        .map(|t| {
            points
                .iter()
                .take(6)
                .flat_map(|p| t.values_at(p.coords()).unwrap())
                .collect()
        })
        .collect();
    let rank = numeric_rank(&rows);
    let sig = unordered(g);
    let worst_main = main.iter().copied().fold(0.0, f64::max);
    verdict(
        scal_dev < 1e-6 && sig == (1, 4) && main_ok && worst_main < 1e-8 && rank == 4,
        format!(
            "B {b:.3}, Scal {scal:.6} (max dev {scal_dev:.1e} < 1e-6 over {} pts), signature {sig:?}, \
             main residual {worst_main:.1e} < 1e-8, Gram rank {rank}",
            points.len()
        ),
    )
}

fn example14_mobility() -> Verdict {
    let e = catalog_entry("example14").unwrap();
    let bundle = build_prolongation(&e.metric, -1.0).unwrap();
    let k = kernel_dimension(&bundle, 3, 3).unwrap().dimension;
    let h = loop_transport_dimension(&bundle, &LoopSpec::default(), 0.002)
        .unwrap()
        .dimension;
    let lor = mobility_values(5, SignatureClass::Lorentzian).unwrap().contains(4);
    let rie = mobility_values(5, SignatureClass::Riemannian).unwrap().contains(4);
    verdict(
        k == 4 && h == 4 && lor && !rie,
        format!("kernel {k}, loops {h}, 4 in Lorentzian list {lor}, in Riemannian list {rie}"),
    )
}

fn null_cone_example() -> Verdict {
    let e = catalog_entry("example36").unwrap();
    let g = &e.metric;
    let mut ric: f64 = 0.0;
    let mut riem: f64 = 0.0;
    for p in g.chart().sample_points(8, 17) {
        let c = curvature_at(g, p.coords()).unwrap();
        ric = ric.max(c.max_ricci());
        riem = riem.max(c.max_riemann());
    }
    let sig = unordered(g);
    let v: Vec<&TensorField> = e.vector_fields.iter().map(|f| &f.tensor).collect();
    let par = v
        .iter()
        .map(|x| parallel_residual(x, g, 10, 5).unwrap())
        .fold(0.0, f64::max);
    let mut iso: f64 = 0.0;
    for p in g.chart().sample_points(10, 6) {
        let m = g.values_at(p.coords()).unwrap();
        let vals: Vec<nalgebra::DVector<f64>> = v
            .iter()
            .map(|x| nalgebra::DVector::from_vec(x.values_at(p.coords()).unwrap()))
            .collect();
        for a in &vals {
            for b in &vals {
                iso = iso.max(a.dot(&(&m * b)).abs());
            }
        }
    }
    let d = parallel_counts(g).unwrap().dimension;
    verdict(
        ric < 1e-8 && riem > 1e-3 && sig == (2, 4) && v.len() == 2 && par < 1e-8 && iso < 1e-9 && d == 4,
        format!(
            "|Ric| {ric:.1e} < 1e-8, max |Rm| {riem:.2}, signature {sig:?}, |∇v| {par:.1e} < 1e-8, \
             |ĝ(v,w)| {iso:.1e} < 1e-9, dim Par02 {d}"
        ),
    )
}

fn cone_axioms() -> Verdict {
    let mut worst_xi: f64 = 0.0;
    let mut cones = 0;
    let mut facts_ok = true;
    let mut notes = Vec::new();
    for e in catalog().unwrap() {
        let Some(f) = &e.cone_field else { continue };
        cones += 1;
        worst_xi = worst_xi.max(f.residual);
        if let Some(base) = &e.cone_base {
            let c = Constructed {
                metric: e.metric.clone(),
                cone_field: e.cone_field.clone(),
                base: Some(base.clone()),
            };
            let facts = cone_facts(&c).unwrap();
            if !facts.consistent() {
                facts_ok = false;
                notes.push(e.name.clone());
            }
        }
    }
    verdict(
        worst_xi < 1e-9 && facts_ok,
        format!("{cones} cones, max |∇ξ − Id| {worst_xi:.1e} < 1e-9, flat/Ricci-flat equivalences hold: {facts_ok} {notes:?}"),
    )
}

fn constant_curvature_maxima() -> Verdict {
    let mut got = Vec::new();
    for (name, b, want) in [("flat3", 0.0, 10), ("sphere3", -1.0, 10), ("sphere4", -1.0, 15)] {
        let e = catalog_entry(name).unwrap();
        let d = kernel_dimension(&build_prolongation(&e.metric, b).unwrap(), 3, 2)
            .unwrap()
            .dimension;
        got.push((name, d, want));
    }
    verdict(got.iter().all(|(_, d, w)| d == w), format!("{got:?}"))
}

fn cone_correspondence() -> Verdict {
    let s3 = catalog_entry("sphere3").unwrap();
    let g = &s3.metric;
    let d_base = kernel_dimension(&build_prolongation(g, -1.0).unwrap(), 3, 2)
        .unwrap()
        .dimension;
    let cone = catalog_entry("cone_sphere3").unwrap();
    let c = Constructed {
        metric: cone.metric.clone(),
        cone_field: cone.cone_field.clone(),
        base: cone.cone_base.clone(),
    };
    let d_cone = parallel_counts(&c.metric).unwrap().dimension;
    let mut triples: Vec<SolutionTriple> = vec![triple(g, &TensorField::metric(g), -1.0)];
    triples.extend(s3.triples.iter().map(|(_, t)| t.clone()));
    let verified = triples.iter().filter(|t| verify_extsys(g, t).unwrap().pass).count();
    let lift = |sign: f64| {
        triples
            .iter()
            .map(|t| lift_residual(&c, &lift_triple(&c, t, sign).unwrap()).unwrap())
            .fold(0.0, f64::max)
    };
    let printed = lift(1.0);
    let corrected = lift(LIFT_SIGN);
    verdict(
        d_base == 10 && d_cone == 10 && verified == triples.len() && printed < 1e-8,
        format!(
            "D(base) {d_base}, dim Par02(cone) {d_cone}, {verified} verified triples; \
             r²L + r dr⊙Λ + μ dr²: max |∇Â| {printed:.1e} (need < 1e-8); \
             with − r dr⊙Λ: {corrected:.1e}"
        ),
    )
}

fn realization_counts() -> Verdict {
    let cases = [
        ("case1_9_0_2", 9, SignatureClass::Riemannian, 2),
        ("case1_5_1_1", 5, SignatureClass::Riemannian, 2),
        ("case2_5", 5, SignatureClass::Lorentzian, 4),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, n, class, want) in cases {
        let d = parallel_counts(&catalog_entry(name).unwrap().metric).unwrap().dimension;
        let listed = mobility_values(n, class).unwrap().contains(d);
        ok &= d == want && listed;
        parts.push(format!("{name}: {d} (listed {listed})"));
    }
    verdict(ok, parts.join(", "))
}

fn warped_family() -> Verdict {
    let e = catalog_entry("warped").unwrap();
    let fam = e.warped.as_ref().unwrap();
    let ext = fam.report.extsys.as_ref();
    let ext_pass = ext.is_some_and(|r| r.pass);
    let ext_res = ext.map_or(f64::INFINITY, |r| {
        r.first
            .max_ratio
            .max(r.second.max_ratio)
            .max(r.third.max_ratio)
            .max(r.consistency.max_ratio)
    });
    let b = fam.triple.b;
    let mu_zero = fam.triple.mu.is_zero();
    let ids = fam.report.identities_hold(1e-8);
    let (fields, rank) = lemma49_fields(fam, 1).unwrap();
    let w = fields.iter().map(|f| f.residual).fold(0.0, f64::max);
    verdict(
        ext_pass && ext_res < 1e-8 && b == 0.0 && mu_zero && ids && w < 1e-8 && rank == fields.len() + 1,
        format!(
            "extended system {ext_pass} ({ext_res:.1e} < 1e-8), B {b}, μ = 0 {mu_zero}, \
             block identities {ids}, |∇W| {w:.1e} < 1e-8, rank of W's and Λ♯ {rank}"
        ),
    )
}

/// The value sets written out directly from their defining conditions.
fn oracle(n: i64, lorentzian: bool) -> Vec<usize> {
    let mut out = BTreeSet::new();
    for k in 0..=n {
        for l in 0..=n {
            let d = k * (k + 1) / 2 + l;
            let first = n >= 5 && k <= n - 4 && 1 <= l && l <= (n + 1 - k) / 5;
            let second =
                lorentzian && n >= 5 && (k - n + 3).rem_euclid(5) == 0 && 2 <= k && k <= n - 3 && l == (n + 2 - k) / 5;
            if (first || second) && d >= 2 {
                out.insert(d as usize);
            }
        }
    }
    out.insert(((n + 1) * (n + 2) / 2) as usize);
    out.into_iter().collect()
}

fn enumerator() -> Verdict {
    use SignatureClass::*;
    let mut ok = true;
    let mut first_strict = None;
    for n in 3..=64usize {
        let r = mobility_values(n, Riemannian).unwrap().numbers();
        let l = mobility_values(n, Lorentzian).unwrap().numbers();
        ok &= r == oracle(n as i64, false) && l == oracle(n as i64, true);
        ok &= r.iter().all(|v| l.contains(v));
        if first_strict.is_none() && l.len() > r.len() {
            first_strict = Some(n);
        }
        for class in [Riemannian, Lorentzian] {
            let d: Vec<usize> = mobility_values(n, class)
                .unwrap()
                .numbers()
                .iter()
                .map(|v| v - 1)
                .collect();
            ok &= projective_dim_values(n, class).unwrap().numbers() == d;
        }
    }
    let four = mobility_values(4, Lorentzian).unwrap().numbers() == [15]
        && mobility_values(4, Riemannian).unwrap().numbers() == [15];
    verdict(
        ok && four && first_strict == Some(5),
        format!("oracle agreement 3..=64 {ok}, n = 4 gives {{15}} {four}, first strict inclusion at {first_strict:?}"),
    )
}

fn projective_fields() -> Verdict {
    let e = catalog_entry("example14").unwrap();
    let g = &e.metric;
    let t = triple(g, &e.solutions[0].tensor, -1.0);
    let v = musical(g, &t.lambda_form, 0).unwrap();
    let d = projective_deformation(&v, g).unwrap();
    let rest = TensorField::combination(&[(Expr::one(), &d.phi), (Expr::real(-2.0 * t.b), &t.l)]).unwrap();
    let fit = fit_metric_multiple(&rest, g).unwrap();
    let c = -fit.c;

    let fam = catalog_entry("warped").unwrap().warped.unwrap();
    let w = fam.lambda_sharp.scale(&fam.triple.lambda);
    let dw = projective_deformation(&w, &fam.metric).unwrap();
    verdict(
        fit.residual.max_ratio < 1e-8 && dw.main.pass,
        format!(
            "φ(Λ♯) = 2BL₁ − Cg with C = {:.1e}, residual {:.1e} < 1e-8; warped φ(λΛ♯) solves the equation: {}",
            c + 0.0,
            fit.residual.max_ratio,
            dw.main.pass
        ),
    )
}

fn geodesic_cross_check() -> Verdict {
    let e = catalog_entry("example14").unwrap();
    let g = &e.metric;
    let l1 = &e.solutions[0].tensor;
    let gt = TensorField::metric(g);
    let l = TensorField::combination(&[(Expr::one(), &gt), (Expr::constant(rat(1, 10)), l1)]).unwrap();
    let gbar = reconstruct_metric(g, &l).unwrap();
    let seeds = random_seeds(g.chart(), 20, 0);
    let good = geodesic_projective_test(g, &gbar, &seeds, 100, 0.005).unwrap();
    let worst = good.seeds.iter().map(|s| s.max_minor_ratio).fold(0.0, f64::max);

    let c = g.chart();
    let mut m = vec![vec![Expr::zero(); 5]; 5];
    m[1][2] = c.parse("x0*x3/5").unwrap();
    m[2][1] = m[1][2].clone();
    let bump = TensorField::symmetric(c.clone(), m).unwrap();
    let bad_l = TensorField::combination(&[(Expr::one(), &l), (Expr::one(), &bump)]).unwrap();
    let bad_ok = !verify_main(g, &bad_l).unwrap().pass;
    // The perturbed candidate must still give a nondegenerate metric on the seeds.
    let sane = seeds
        .iter()
        .all(|s| matrix_at(&bad_l, &s.point).determinant().abs() > 1e-6);
    let gbad = reconstruct_metric(g, &bad_l).unwrap();
    let bad = geodesic_projective_test(g, &gbad, &seeds, 100, 0.005).unwrap();
    verdict(
        good.pass && seeds.len() >= 20 && !bad.pass && bad_ok && sane,
        format!(
            "{} seeds, max minor ratio {worst:.1e} < {:.0e}; non-solution perturbation fails: {}",
            seeds.len(),
            good.tolerance,
            !bad.pass
        ),
    )
}

#[test]
fn acceptance() {
    let s = Duration::from_secs;
    say(String::new());
    let results = [
        run(1, "Lorentzian Einstein example", s(30), example14_reproduction),
        run(2, "its degree of mobility", s(300), example14_mobility),
        run(3, "Ricci-flat cone with null fields", s(600), null_cone_example),
        run(4, "cone axioms over the catalog", s(600), cone_axioms),
        run(5, "constant-curvature maxima", s(600), constant_curvature_maxima),
        run(6, "base/cone correspondence and lift", s(600), cone_correspondence),
        run(7, "realization counts", s(1200), realization_counts),
        run(8, "warped family", s(600), warped_family),
        run(9, "enumerator against oracle", s(1), enumerator),
        run(10, "projective vector fields", s(600), projective_fields),
        run(11, "geodesic cross-check", s(600), geodesic_cross_check),
    ];
    say(format!(
        "note: criterion 6 asks for the lift with + r dr⊙Λ; only the − sign is parallel, \
         and the library uses it (LIFT_SIGN = {LIFT_SIGN})"
    ));
    for (id, pass) in results {
        assert_eq!(!pass, KNOWN_FAILURES.contains(&id), "criterion {id} changed status");
    }
}
