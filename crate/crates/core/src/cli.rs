//! Command-line front end: metric files, verification commands, reports and
//! plot data.
//!
//! [`run`] takes the argument list and returns the exit code together with
//! everything that would be written to standard output and standard error,
//! so the binary is a thin wrapper and the commands are testable in-process.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::constructions::{
    catalog_entry, catalog_names, cone_with, identity_residual, lift_triple, product, CatalogEntry, ConeField,
    Constructed, ConstructionError, NamedTensor, LIFT_SIGN,
};
use crate::enumerate::{
    affine_only_values, figure1_table, figure1_tsv, mobility_values, projective_dim_values, AffineRegime,
    EnumerateError, SignatureClass, ValueList,
};
use crate::geometry::{
    curvature_at, is_constant_curvature_with, is_einstein_tol, signature_over_box, Chart, ConstantCurvature, Einstein,
    GeometryError, Mat, MetricField, TensorField,
};
use crate::mobility::{
    build_prolongation, kernel_dimension_with, loop_transport_dimension, one_form_bundle, symmetric_two_bundle,
    KernelOptions, LoopSpec, MobilityError, MobilityReport, RANK_TOL,
};
use crate::projective::{
    geodesic_projective_test, random_seeds, reconstruct_metric, verify_extsys_with, verify_main_with, ProjectiveError,
    SolutionTriple,
};
use crate::symexpr::{parse_with_params, Expr, ParseError, DEFAULT_TRIALS};

/// Version of the JSON layout of reports and metric files.
pub const SCHEMA: u32 = 1;

fn schema_default() -> u32 {
    SCHEMA
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedMatrix {
    pub name: String,
    /// Lower triangle (rows of length 1..n) or the full symmetric matrix.
    pub components: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedVector {
    pub name: String,
    pub components: Vec<String>,
}

/// A metric definition file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricFile {
    #[serde(default = "schema_default")]
    pub schema: u32,
    pub name: String,
    pub coordinates: Vec<String>,
    /// Lower triangle (rows of length 1..n) or the full symmetric matrix.
    pub metric: Vec<Vec<String>>,
    pub sample_box: Vec<[f64; 2]>,
    #[serde(default)]
    pub excluded: Vec<String>,
    #[serde(default)]
    pub constants: BTreeMap<String, f64>,
    #[serde(default)]
    pub solutions: Vec<NamedMatrix>,
    #[serde(default)]
    pub vector_fields: Vec<NamedVector>,
}

/// A metric file turned into geometric objects.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub name: String,
    pub metric: MetricField,
    pub solutions: Vec<NamedTensor>,
    pub vector_fields: Vec<NamedTensor>,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Io(String),
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Format(String),
    #[error("metric is not symmetric: entries ({i},{j}) and ({j},{i}) differ")]
    Asymmetric { i: usize, j: usize },
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Projective(#[from] ProjectiveError),
    #[error(transparent)]
    Mobility(#[from] MobilityError),
    #[error(transparent)]
    Construction(#[from] ConstructionError),
    #[error(transparent)]
    Enumerate(#[from] EnumerateError),
    #[error("{0}")]
    Usage(String),
}

fn is_degenerate(e: &GeometryError) -> bool {
    matches!(e, GeometryError::Degenerate { .. })
}

impl CliError {
    /// 2 for a degenerate metric, 1 for every other failure.
    pub fn exit_code(&self) -> i32 {
        let degenerate = match self {
            CliError::Geometry(g) => is_degenerate(g),
            CliError::Projective(ProjectiveError::Geometry(g)) => is_degenerate(g),
            CliError::Mobility(MobilityError::Geometry(g)) => is_degenerate(g),
            CliError::Construction(ConstructionError::Geometry(g)) => is_degenerate(g),
            _ => false,
        };
        if degenerate {
            2
        } else {
            1
        }
    }
}

impl MetricFile {
    pub fn from_json(text: &str) -> Result<MetricFile, CliError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("metric files serialize") + "\n"
    }

    fn chart(&self) -> Result<Arc<Chart>, CliError> {
        if self.schema != SCHEMA {
            return Err(CliError::Format(format!("unsupported schema {}", self.schema)));
        }
        let coords: Vec<&str> = self.coordinates.iter().map(String::as_str).collect();
        let params: Vec<&str> = self.constants.keys().map(String::as_str).collect();
        if self.sample_box.len() != coords.len() {
            return Err(CliError::Format(format!(
                "sample_box has {} intervals for {} coordinates",
                self.sample_box.len(),
                coords.len()
            )));
        }
        if let Some([lo, hi]) = self
            .sample_box
            .iter()
            .find(|[lo, hi]| lo.partial_cmp(hi) != Some(std::cmp::Ordering::Less))
        {
            return Err(CliError::Format(format!("empty sample interval [{lo}, {hi}]")));
        }
        let excluded = self
            .excluded
            .iter()
            .map(|s| parse_with_params(s, &coords, &params))
            .collect::<Result<Vec<_>, _>>()?;
        let sample_box: Vec<(f64, f64)> = self.sample_box.iter().map(|[lo, hi]| (*lo, *hi)).collect();
        Ok(Chart::with_details(
            &self.name,
            &coords,
            &sample_box,
            excluded,
            self.constants.clone(),
        )?)
    }

    /// The metric components as a full matrix, checking symmetry.
    pub fn metric_components(&self) -> Result<(Arc<Chart>, Mat<Expr>), CliError> {
        let chart = self.chart()?;
        let m = square(&chart, &self.metric, "metric")?;
        Ok((chart, m))
    }

    pub fn load(&self) -> Result<Loaded, CliError> {
        let (chart, m) = self.metric_components()?;
        let metric = MetricField::new(chart.clone(), m)?;
        let solutions = self
            .solutions
            .iter()
            .map(|s| {
                let m = square(&chart, &s.components, &s.name)?;
                Ok(NamedTensor {
                    name: s.name.clone(),
                    tensor: TensorField::symmetric(chart.clone(), m)?,
                })
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        let vector_fields = self
            .vector_fields
            .iter()
            .map(|v| {
                if v.components.len() != chart.dim() {
                    return Err(CliError::Format(format!(
                        "vector field `{}` has {} components for {} coordinates",
                        v.name,
                        v.components.len(),
                        chart.dim()
                    )));
                }
                let comps = v
                    .components
                    .iter()
                    .map(|s| chart.parse(s))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(NamedTensor {
                    name: v.name.clone(),
                    tensor: TensorField::vector(chart.clone(), comps)?,
                })
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        Ok(Loaded {
            name: self.name.clone(),
            metric,
            solutions,
            vector_fields,
        })
    }

    /// Writes a metric with its named tensors in the file layout.
    pub fn from_parts(g: &MetricField, solutions: &[NamedTensor], vector_fields: &[NamedTensor]) -> MetricFile {
        let chart = g.chart();
        let lower = |m: &Mat<Expr>| -> Vec<Vec<String>> {
            (0..m.len())
                .map(|i| (0..=i).map(|j| m[i][j].to_string()).collect())
                .collect()
        };
        MetricFile {
            schema: SCHEMA,
            name: chart.name().to_string(),
            coordinates: chart.coordinates().iter().map(|s| s.to_string()).collect(),
            metric: lower(g.components()),
            sample_box: chart.sample_box().iter().map(|&(lo, hi)| [lo, hi]).collect(),
            excluded: chart.excluded().iter().map(Expr::to_string).collect(),
            constants: chart.constants().clone(),
            solutions: solutions
                .iter()
                .map(|s| NamedMatrix {
                    name: s.name.clone(),
                    components: lower(&s.tensor.matrix()),
                })
                .collect(),
            vector_fields: vector_fields
                .iter()
                .map(|v| NamedVector {
                    name: v.name.clone(),
                    components: v.tensor.components().iter().map(Expr::to_string).collect(),
                })
                .collect(),
        }
    }

    pub fn from_entry(e: &CatalogEntry) -> MetricFile {
        let mut fields = e.vector_fields.clone();
        if let Some(c) = &e.cone_field {
            fields.push(NamedTensor {
                name: "xi".into(),
                tensor: c.xi.clone(),
            });
        }
        MetricFile::from_parts(&e.metric, &e.solutions, &fields)
    }
}

fn square(chart: &Arc<Chart>, rows: &[Vec<String>], what: &str) -> Result<Mat<Expr>, CliError> {
    let n = chart.dim();
    let triangle = rows.len() == n && rows.iter().enumerate().all(|(i, r)| r.len() == i + 1);
    let full = rows.len() == n && rows.iter().all(|r| r.len() == n);
    if !(triangle || full) {
        return Err(CliError::Format(format!(
            "`{what}` must be a lower triangle or a full {n}x{n} matrix"
        )));
    }
    let mut m = vec![vec![Expr::zero(); n]; n];
    for (i, row) in rows.iter().enumerate() {
        for (j, text) in row.iter().enumerate() {
            m[i][j] = chart.parse(text)?;
        }
    }
    if triangle {
        for i in 0..n {
            for j in 0..i {
                m[j][i] = m[i][j].clone();
            }
        }
    } else {
        for i in 0..n {
            for j in 0..i {
                if !m[i][j].sub(&m[j][i]).is_zero() {
                    return Err(CliError::Asymmetric { i, j });
                }
            }
        }
    }
    Ok(m)
}

/// Loads `catalog:NAME` from the built-in catalog or a metric file from disk.
pub fn load_source(source: &str) -> Result<Loaded, CliError> {
    if let Some(name) = source.strip_prefix("catalog:") {
        let e = catalog_entry(name)?;
        let mut vector_fields = e.vector_fields.clone();
        if let Some(c) = &e.cone_field {
            vector_fields.push(NamedTensor {
                name: "xi".into(),
                tensor: c.xi.clone(),
            });
        }
        return Ok(Loaded {
            name: e.name.clone(),
            metric: e.metric,
            solutions: e.solutions,
            vector_fields,
        });
    }
    read_file(source)?.load()
}

fn read_file(path: &str) -> Result<MetricFile, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{path}: {e}")))?;
    MetricFile::from_json(&text)
}

#[derive(Debug, Parser)]
#[command(
    name = "projmob",
    version,
    about = "Projective equivalence, degree of mobility and metric cones"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args)]
struct Global {
    /// Seed for every sampled point and loop.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Relative tolerance for residual checks.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum BundleChoice {
    /// Solutions (L, Λ, μ) of the extended system.
    Prolongation,
    /// Parallel symmetric two-tensors and one-forms.
    Par02,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum RegimeChoice {
    Mobility,
    Projective,
    NonzeroScal,
    RicciFlat,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ClassChoice {
    Riemannian,
    Lorentzian,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Symmetry, nondegeneracy, signature, Scal, Einstein and constant curvature.
    Check { source: String },
    /// Checks named solutions of the main equation (all when none is given).
    Verify {
        source: String,
        #[arg(long = "solution")]
        solutions: Vec<String>,
        /// Checks that the named vector fields are parallel.
        #[arg(long = "vector")]
        vectors: Vec<String>,
    },
    /// Dimension of parallel sections, labelled exact or upper bound.
    Mobility {
        source: String,
        #[arg(long, default_value_t = 3)]
        order: usize,
        #[arg(long, default_value_t = 3)]
        samples: usize,
        /// Number of lassos for the loop-transport estimate (0 skips it).
        #[arg(long, default_value_t = 0)]
        loops: usize,
        #[arg(long, default_value_t = 0.002)]
        step: f64,
        #[arg(long, value_enum, default_value_t = BundleChoice::Prolongation)]
        bundle: BundleChoice,
        #[arg(long, default_value_t = RANK_TOL)]
        rank_tol: f64,
    },
    /// The cone sign·dr² + r²g as a metric file.
    Cone {
        source: String,
        #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
        sign: i32,
        #[arg(long, default_value = "r")]
        radial: String,
    },
    /// The direct product of two metrics as a metric file.
    Product { first: String, second: String },
    /// Admissible values for a dimension, signature class and regime.
    Enumerate {
        #[arg(long)]
        dim: usize,
        #[arg(long, value_enum, default_value_t = ClassChoice::Riemannian)]
        signature: ClassChoice,
        #[arg(long, value_enum, default_value_t = RegimeChoice::Mobility)]
        regime: RegimeChoice,
    },
    /// Plot data comparing the two signature classes, as TSV.
    Figure1 {
        #[arg(long, default_value_t = 3)]
        from: usize,
        #[arg(long, default_value_t = 15)]
        to: usize,
    },
    /// Checks that g-geodesics are reparametrized ḡ-geodesics.
    GeodesicTest {
        first: String,
        /// Second metric; omit it to use ḡ built from g + ε L.
        second: Option<String>,
        #[arg(long, default_value_t = 20)]
        seeds: usize,
        #[arg(long)]
        solution: Option<String>,
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
        #[arg(long, default_value_t = 100)]
        steps: usize,
        #[arg(long, default_value_t = 0.005)]
        h: f64,
    },
    /// Lists the built-in metrics, or emits one as a metric file.
    Catalog {
        #[arg(long)]
        emit: Option<String>,
    },
}

/// Exit code and captured output of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Outcome {
        Outcome {
            code: 0,
            stdout,
            stderr: String::new(),
        }
    }
}

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome {
                    code: 1,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                Outcome::ok(text)
            };
        }
    };
    match dispatch(&cli) {
        Ok(o) => o,
        Err(e) => Outcome {
            code: e.exit_code(),
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}

fn dispatch(cli: &Cli) -> Result<Outcome, CliError> {
    let g = &cli.global;
    match &cli.command {
        Command::Check { source } => cmd_check(g, source),
        Command::Verify {
            source,
            solutions,
            vectors,
        } => cmd_verify(g, source, solutions, vectors),
        Command::Mobility {
            source,
            order,
            samples,
            loops,
            step,
            bundle,
            rank_tol,
        } => cmd_mobility(g, source, *order, *samples, *loops, *step, *bundle, *rank_tol),
        Command::Cone { source, sign, radial } => cmd_cone(source, *sign, radial),
        Command::Product { first, second } => cmd_product(first, second),
        Command::Enumerate { dim, signature, regime } => cmd_enumerate(g, *dim, *signature, *regime),
        Command::Figure1 { from, to } => Ok(Outcome::ok(figure1_tsv(&figure1_table(*from, *to)?))),
        Command::GeodesicTest {
            first,
            second,
            seeds,
            solution,
            epsilon,
            steps,
            h,
        } => cmd_geodesic(
            g,
            first,
            second.as_deref(),
            *seeds,
            solution.as_deref(),
            *epsilon,
            *steps,
            *h,
        ),
        Command::Catalog { emit } => cmd_catalog(emit.as_deref()),
    }
}

fn report(command: &str, g: &Global, body: Value) -> String {
    let mut m = Map::new();
    m.insert("schema".into(), json!(SCHEMA));
    m.insert("command".into(), json!(command));
    m.insert("seed".into(), json!(g.seed));
    m.insert("tol".into(), json!(g.tol));
    if let Value::Object(b) = body {
        m.extend(b);
    }
    serde_json::to_string_pretty(&Value::Object(m)).expect("reports serialize") + "\n"
}

fn finish(command: &str, g: &Global, pass: bool, body: Value) -> Outcome {
    Outcome {
        code: if pass { 0 } else { 1 },
        stdout: report(command, g, body),
        stderr: if pass {
            String::new()
        } else {
            format!("{command}: verification failed\n")
        },
    }
}

fn cmd_check(g: &Global, source: &str) -> Result<Outcome, CliError> {
    let loaded = if source.starts_with("catalog:") {
        load_source(source)
    } else {
        let file = read_file(source)?;
        match file.metric_components() {
            Err(CliError::Asymmetric { i, j }) => {
                let body = json!({"name": file.name, "symmetric": false, "asymmetric_entry": [i, j]});
                return Ok(finish("check", g, false, body));
            }
            Err(e) => return Err(e),
            Ok(_) => file.load(),
        }
    };
    let loaded = match loaded {
        Err(CliError::Geometry(GeometryError::Degenerate { point, detail })) => {
            let body = json!({"symmetric": true, "nondegenerate": false, "witness": point, "detail": detail});
            return Ok(Outcome {
                code: 2,
                stdout: report("check", g, body),
                stderr: "check: metric is degenerate\n".into(),
            });
        }
        other => other?,
    };
    let metric = &loaded.metric;
    let sig = signature_over_box(metric)?;
    let center = metric.chart().center();
    let scal_center = curvature_at(metric, center.coords())?.scal;
    let mut body = json!({
        "name": loaded.name,
        "dimension": metric.dim(),
        "symmetric": true,
        "nondegenerate": true,
        "signature": {"plus": sig.plus, "minus": sig.minus},
        "scal_at_center": scal_center,
    });
    let obj = body.as_object_mut().expect("object");
    match is_einstein_tol(metric, DEFAULT_TRIALS, g.seed, g.tol)? {
        Einstein::Yes { b, scal, max_residual } => {
            obj.insert("einstein".into(), json!(true));
            obj.insert("scal".into(), json!(scal));
            obj.insert("b".into(), json!(b + 0.0));
            obj.insert("einstein_residual".into(), json!(max_residual));
        }
        Einstein::No {
            witness,
            component,
            residual,
        } => {
            obj.insert("einstein".into(), json!(false));
            obj.insert("scal".into(), json!(scal_center));
            obj.insert("einstein_witness".into(), json!(witness));
            obj.insert("einstein_component".into(), json!(component));
            obj.insert("einstein_residual".into(), json!(residual));
        }
    }
    match is_constant_curvature_with(metric, DEFAULT_TRIALS, g.seed, g.tol)? {
        ConstantCurvature::Yes { c, max_residual } => {
            obj.insert("constant_curvature".into(), json!(true));
            obj.insert("sectional_curvature".into(), json!(c));
            obj.insert("constant_curvature_residual".into(), json!(max_residual));
        }
        ConstantCurvature::No { witness, residual } => {
            obj.insert("constant_curvature".into(), json!(false));
            obj.insert("constant_curvature_witness".into(), json!(witness));
            obj.insert("constant_curvature_residual".into(), json!(residual));
        }
    }
    Ok(Outcome::ok(report("check", g, body)))
}

fn pick<'a>(all: &'a [NamedTensor], names: &[String], what: &str) -> Result<Vec<&'a NamedTensor>, CliError> {
    names
        .iter()
        .map(|n| {
            all.iter()
                .find(|s| &s.name == n)
                .ok_or_else(|| CliError::Usage(format!("no {what} named `{n}`")))
        })
        .collect()
}

fn cmd_verify(g: &Global, source: &str, solutions: &[String], vectors: &[String]) -> Result<Outcome, CliError> {
    let loaded = load_source(source)?;
    let metric = &loaded.metric;
    let chosen = if solutions.is_empty() && vectors.is_empty() {
        loaded.solutions.iter().collect()
    } else {
        pick(&loaded.solutions, solutions, "solution")?
    };
    let fields = pick(&loaded.vector_fields, vectors, "vector field")?;
    let einstein = is_einstein_tol(metric, DEFAULT_TRIALS, g.seed, g.tol)?;
    let mut pass = true;
    let mut worst: f64 = 0.0;
    let mut rows = Vec::new();
    for s in chosen {
        let main = verify_main_with(metric, &s.tensor, DEFAULT_TRIALS, g.seed, g.tol)?;
        pass &= main.pass;
        worst = worst.max(main.residual.max_ratio);
        let mut row = json!({"name": s.name, "main": main});
        if let Einstein::Yes { b, .. } = einstein {
            if main.pass {
                let t = SolutionTriple::from_solution(metric, s.tensor.clone(), b)?;
                let ext = verify_extsys_with(metric, &t, DEFAULT_TRIALS, g.seed, g.tol)?;
                pass &= ext.pass;
                for r in [&ext.first, &ext.second, &ext.third, &ext.consistency] {
                    worst = worst.max(r.max_ratio);
                }
                row["extsys"] = json!(ext);
                row["mu"] = json!(t.mu.to_string());
            }
        }
        rows.push(row);
    }
    let mut vrows = Vec::new();
    for v in fields {
        let r = crate::constructions::parallel_residual(&v.tensor, metric, DEFAULT_TRIALS, g.seed)?;
        let ok = r < g.tol;
        pass &= ok;
        worst = worst.max(r);
        vrows.push(json!({"name": v.name, "parallel_residual": r, "pass": ok}));
    }
    let body = json!({
        "name": loaded.name,
        "pass": pass,
        "max_residual": worst,
        "einstein": einstein.is_einstein(),
        "solutions": rows,
        "vector_fields": vrows,
    });
    Ok(finish("verify", g, pass, body))
}

fn label(r: &MobilityReport) -> &'static str {
    if r.exact {
        "exact"
    } else {
        "upper bound"
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_mobility(
    g: &Global,
    source: &str,
    order: usize,
    samples: usize,
    loops: usize,
    step: f64,
    bundle: BundleChoice,
    rank_tol: f64,
) -> Result<Outcome, CliError> {
    let loaded = load_source(source)?;
    let metric = &loaded.metric;
    let opts = KernelOptions {
        max_order: order,
        samples,
        seed: g.seed,
        rank_tol,
    };
    let spec = LoopSpec {
        lassos: loops,
        seed: g.seed,
        ..LoopSpec::default()
    };
    match bundle {
        BundleChoice::Prolongation => {
            let b = match is_einstein_tol(metric, DEFAULT_TRIALS, g.seed, g.tol)? {
                Einstein::Yes { b, .. } => b,
                Einstein::No { witness, .. } => return Err(MobilityError::NotEinstein { witness }.into()),
            };
            let mut known = vec![("g".to_string(), TensorField::metric(metric))];
            known.extend(loaded.solutions.iter().map(|s| (s.name.clone(), s.tensor.clone())));
            let triples = known
                .iter()
                .map(|(_, l)| SolutionTriple::from_solution(metric, l.clone(), b))
                .collect::<Result<Vec<_>, _>>()?;
            let mut r = crate::mobility::mobility_of_metric_with(metric, &triples, &opts)?;
            for (m, (name, _)) in r.known.iter_mut().zip(&known) {
                m.name = name.clone();
            }
            let mut body = json!({
                "name": loaded.name,
                "bundle": "prolongation",
                "dimension": r.dimension,
                "label": label(&r),
                "b": b + 0.0,
                "kernel": r,
            });
            if loops > 0 {
                let snapped =
                    crate::symexpr::rational_to_f64(&crate::symexpr::rational_from_f64(b).unwrap_or_default());
                let bundle = build_prolongation(metric, snapped)?;
                let h = loop_transport_dimension(&bundle, &spec, step)?;
                body["loops"] = json!({"dimension": h.dimension, "agrees": h.dimension == r.dimension, "report": h});
            }
            Ok(Outcome::ok(report("mobility", g, body)))
        }
        BundleChoice::Par02 => {
            let sym = symmetric_two_bundle(metric);
            let mut r = kernel_dimension_with(&sym, &opts)?;
            let k = kernel_dimension_with(&one_form_bundle(metric), &opts)?.dimension;
            r.k = Some(k);
            r.l = Some(r.dimension as i64 - (k * (k + 1) / 2) as i64);
            let mut body = json!({
                "name": loaded.name,
                "bundle": "par02",
                "dimension": r.dimension,
                "label": label(&r),
                "k": k,
                "l": r.l,
                "kernel": r,
            });
            if loops > 0 {
                let h = loop_transport_dimension(&sym, &spec, step)?;
                body["loops"] = json!({"dimension": h.dimension, "agrees": h.dimension == r.dimension, "report": h});
            }
            Ok(Outcome::ok(report("mobility", g, body)))
        }
    }
}

fn cone_field_of(loaded: &Loaded) -> Result<Option<ConeField>, CliError> {
    let Some(v) = loaded.vector_fields.iter().find(|v| v.name == "xi") else {
        return Ok(None);
    };
    let residual = identity_residual(&v.tensor, &loaded.metric)?;
    Ok((residual < 1e-8).then(|| ConeField {
        xi: v.tensor.clone(),
        residual,
    }))
}

fn cmd_cone(source: &str, sign: i32, radial: &str) -> Result<Outcome, CliError> {
    let loaded = load_source(source)?;
    let c = cone_with(&loaded.metric, sign as f64, radial)?;
    let xi = c.cone_field.as_ref().map(|f| f.xi.clone()).expect("cones carry ξ");
    // Lifts of base solutions are parallel when the cone is Ricci-flat over B = −1.
    let mut lifted = Vec::new();
    if sign == 1 {
        if let Einstein::Yes { b, .. } = crate::geometry::is_einstein(&loaded.metric)? {
            if (b + 1.0).abs() < 1e-9 {
                for s in &loaded.solutions {
                    let t = SolutionTriple::from_solution(&loaded.metric, s.tensor.clone(), -1.0)?;
                    lifted.push(NamedTensor {
                        name: format!("lift({})", s.name),
                        tensor: lift_triple(&c, &t, LIFT_SIGN)?,
                    });
                }
            }
        }
    }
    let fields = [NamedTensor {
        name: "xi".into(),
        tensor: xi,
    }];
    Ok(Outcome::ok(
        MetricFile::from_parts(&c.metric, &lifted, &fields).to_json(),
    ))
}

fn cmd_product(first: &str, second: &str) -> Result<Outcome, CliError> {
    let a = load_source(first)?;
    let b = load_source(second)?;
    let ca = Constructed {
        metric: a.metric.clone(),
        cone_field: cone_field_of(&a)?,
        base: None,
    };
    let cb = Constructed {
        metric: b.metric.clone(),
        cone_field: cone_field_of(&b)?,
        base: None,
    };
    let p = product(&ca, &cb)?;
    let fields: Vec<NamedTensor> = p
        .cone_field
        .iter()
        .map(|f| NamedTensor {
            name: "xi".into(),
            tensor: f.xi.clone(),
        })
        .collect();
    Ok(Outcome::ok(MetricFile::from_parts(&p.metric, &[], &fields).to_json()))
}

fn cmd_enumerate(g: &Global, dim: usize, class: ClassChoice, regime: RegimeChoice) -> Result<Outcome, CliError> {
    let class = match class {
        ClassChoice::Riemannian => SignatureClass::Riemannian,
        ClassChoice::Lorentzian => SignatureClass::Lorentzian,
    };
    let list: ValueList = match regime {
        RegimeChoice::Mobility => mobility_values(dim, class)?,
        RegimeChoice::Projective => projective_dim_values(dim, class)?,
        RegimeChoice::NonzeroScal => affine_only_values(dim, AffineRegime::NonzeroScal)?,
        RegimeChoice::RicciFlat => affine_only_values(dim, AffineRegime::RicciFlat)?,
    };
    let body = json!({"values": list.numbers(), "list": list});
    Ok(Outcome::ok(report("enumerate", g, body)))
}

#[allow(clippy::too_many_arguments)]
fn cmd_geodesic(
    g: &Global,
    first: &str,
    second: Option<&str>,
    seeds: usize,
    solution: Option<&str>,
    epsilon: f64,
    steps: usize,
    h: f64,
) -> Result<Outcome, CliError> {
    let a = load_source(first)?;
    let gbar = match (second, solution) {
        (Some(s), None) => load_source(s)?.metric,
        (None, Some(name)) => {
            let l = &pick(&a.solutions, &[name.to_string()], "solution")?[0].tensor;
            let shifted =
                TensorField::combination(&[(Expr::one(), &TensorField::metric(&a.metric)), (Expr::real(epsilon), l)])?;
            reconstruct_metric(&a.metric, &shifted)?
        }
        _ => {
            return Err(CliError::Usage(
                "give exactly one of a second metric or --solution".into(),
            ))
        }
    };
    let seeds = random_seeds(a.metric.chart(), seeds, g.seed);
    let r = geodesic_projective_test(&a.metric, &gbar, &seeds, steps, h)?;
    let body = json!({"name": a.name, "pass": r.pass, "report": r});
    Ok(finish("geodesic-test", g, r.pass, body))
}

fn cmd_catalog(emit: Option<&str>) -> Result<Outcome, CliError> {
    match emit {
        Some(name) => Ok(Outcome::ok(MetricFile::from_entry(&catalog_entry(name)?).to_json())),
        None => Ok(Outcome::ok(catalog_names().join("\n") + "\n")),
    }
}
