//! Command-line front end.
//!
//! `interlaced-dpp <command> <config.json> [--seed N] [--out PATH]` with
//! commands `sample`, `kernel-grid`, `verify`, `heckman` and `em-check`.
//! Exit status: 0 success, 1 a verification did not pass, 2 invalid
//! configuration, 3 I/O failure, 4 numerical failure.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::class::{ClassTag, MatrixClass};
use crate::ensembles::sample_fixed_orbit;
use crate::error::{Error, Result};
use crate::eynard_mehta::{em_check, ChainSpec, EmCheck};
use crate::gc_cones::{level_len, pattern_from_minors, pattern_levels, sample_chain, GibbsConfig};
use crate::heckman::{branching_measure_a, convergence_report, wasserstein1_to_uniform};
use crate::kernels::{
    gaussian_spec, kernel_deterministic, BiorthogonalKernel, CorollaryConvention, CorollaryKernel,
    CorrelationKernel, GenericKernel, KernelSpec,
};
use crate::minors::{minor_sequence_unchecked, to_point_configuration, MinorSequence};
use crate::numerics::quadrature::Integrator;
use crate::rng::{chunks, stream_rng};
use crate::verify::{compare, default_queries, sample_configuration, ComparisonReport, CorrelationQuery};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Sample,
    KernelGrid,
    Verify,
    Heckman,
    EmCheck,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Sample => "sample",
            Command::KernelGrid => "kernel-grid",
            Command::Verify => "verify",
            Command::Heckman => "heckman",
            Command::EmCheck => "em-check",
        }
    }

    fn default_out(self) -> &'static str {
        match self {
            Command::Sample => "sample.csv",
            Command::KernelGrid => "kernel-grid.csv",
            Command::Verify => "verify.json",
            Command::Heckman => "heckman.csv",
            Command::EmCheck => "em-check.json",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KernelMode {
    Generic,
    #[default]
    Biorthogonal,
    Deterministic,
    Corollary,
    EynardMehta,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SampleSource {
    #[default]
    Gaussian,
    Orbit,
    Gibbs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SampleOutput {
    #[default]
    Points,
    Minors,
    Gc,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Tolerances {
    pub rel_tol: f64,
    pub abs_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            abs_tol: 1e-12,
        }
    }
}

/// `min, min + step, ...` up to `max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

impl Axis {
    pub fn points(&self, field: &str) -> Result<Vec<f64>> {
        let valid = self.step > 0.0 && self.step.is_finite() && self.min.is_finite() && self.max.is_finite();
        if !valid {
            return Err(Error::config(field, "need finite min and max and step > 0"));
        }
        if self.max < self.min {
            return Ok(Vec::new());
        }
        let count = ((self.max - self.min) / self.step + 1e-9).floor() as usize + 1;
        Ok((0..count).map(|i| self.min + i as f64 * self.step).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct GridSpec {
    /// Levels for both `r` and `s`; all levels when absent.
    #[serde(default)]
    pub levels: Option<Vec<usize>>,
    pub y: Axis,
    /// Defaults to the `y` axis.
    #[serde(default)]
    pub z: Option<Axis>,
    /// Only `s = r` and `z = y`.
    #[serde(default)]
    pub diagonal: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct HeckmanSpec {
    pub lambdas: Vec<Vec<i64>>,
    pub epsilons: Vec<f64>,
    pub x: Vec<f64>,
}

/// Everything one run needs. Field names are camelCase in JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub command: Option<Command>,
    #[serde(default)]
    pub class: Option<ClassTag>,
    #[serde(default)]
    pub rank: Option<usize>,
    #[serde(default)]
    pub sample_count: Option<usize>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub quadrature: Tolerances,
    #[serde(default)]
    pub kernel_mode: KernelMode,
    #[serde(default)]
    pub corollary_convention: Option<String>,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub grid: Option<GridSpec>,
    #[serde(default)]
    pub queries: Option<Vec<CorrelationQuery>>,
    /// Radial part for `orbit`/`gibbs` sampling and the deterministic kernel.
    #[serde(default)]
    pub lambda: Option<Vec<f64>>,
    #[serde(default)]
    pub source: SampleSource,
    #[serde(default)]
    pub output: SampleOutput,
    #[serde(default)]
    pub heckman: Option<HeckmanSpec>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::config("config", e.to_string()))
    }

    /// `sha256` of the canonical JSON of the effective configuration, output path excluded.
    pub fn digest(&self) -> String {
        let canonical = serde_json::to_vec(&RunConfig { out: None, ..self.clone() }).expect("config serialises");
        hex::encode(Sha256::digest(&canonical))
    }

    fn class(&self) -> Result<MatrixClass> {
        let tag = self.class.ok_or_else(|| Error::config("class", "missing"))?;
        let rank = self.rank.ok_or_else(|| Error::config("rank", "missing"))?;
        MatrixClass::new(tag, rank).map_err(|e| Error::config("rank", e.to_string()))
    }

    fn seed(&self) -> Result<u64> {
        self.seed.ok_or_else(|| Error::config("seed", "missing; pass it in the config or with --seed"))
    }

    fn samples(&self) -> Result<usize> {
        self.sample_count.ok_or_else(|| Error::config("sampleCount", "missing"))
    }

    fn integrator(&self) -> Result<Integrator> {
        let t = self.quadrature;
        if t.rel_tol.is_nan() || t.abs_tol.is_nan() || t.rel_tol <= 0.0 || t.abs_tol <= 0.0 {
            return Err(Error::config("quadrature", "tolerances must be positive"));
        }
        Ok(Integrator::new(t.rel_tol, t.abs_tol))
    }

    fn lambda(&self) -> Result<&[f64]> {
        self.lambda.as_deref().ok_or_else(|| Error::config("lambda", "missing"))
    }
}

#[derive(Parser, Debug)]
#[command(name = "interlaced-dpp", version, about = "Minor processes of classical Hermitian random matrices")]
struct Cli {
    #[command(subcommand)]
    command: CliCommand,
}

#[derive(Subcommand, Debug)]
enum CliCommand {
    /// Sample point configurations, minor sequences or GC patterns.
    Sample(CliArgs),
    /// Tabulate a correlation kernel on a grid.
    KernelGrid(CliArgs),
    /// Compare Monte Carlo correlations with kernel predictions.
    Verify(CliArgs),
    /// Distances between branching measures and the projected orbit law.
    Heckman(CliArgs),
    /// Compare the indicator-chain Eynard–Mehta kernel with the class B kernel.
    EmCheck(CliArgs),
}

#[derive(clap::Args, Debug)]
struct CliArgs {
    /// JSON configuration file.
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Result of a successful run.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub path: PathBuf,
    pub passed: bool,
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config { .. } | Error::Json(_) => 2,
        Error::Io(_) => 3,
        _ => 4,
    }
}

/// Parses `args` (program name first), runs the command and returns the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let (command, a) = match cli.command {
        CliCommand::Sample(a) => (Command::Sample, a),
        CliCommand::KernelGrid(a) => (Command::KernelGrid, a),
        CliCommand::Verify(a) => (Command::Verify, a),
        CliCommand::Heckman(a) => (Command::Heckman, a),
        CliCommand::EmCheck(a) => (Command::EmCheck, a),
    };
    let result = load_config(&a.config).and_then(|mut cfg| {
        if a.seed.is_some() {
            cfg.seed = a.seed;
        }
        if a.out.is_some() {
            cfg.out = a.out;
        }
        execute(command, &cfg)
    });
    match result {
        Ok(o) => {
            eprintln!("wrote {}", o.path.display());
            if o.passed {
                0
            } else {
                eprintln!("{} check did not pass", command.name());
                1
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = fs::read_to_string(path)?;
    RunConfig::from_json(&text)
}

/// Runs `command`; the output file is written only if the whole run succeeds.
pub fn execute(command: Command, cfg: &RunConfig) -> Result<Outcome> {
    if let Some(c) = cfg.command {
        if c != command {
            return Err(Error::config(
                "command",
                format!("config is for `{}` but `{}` was requested", c.name(), command.name()),
            ));
        }
    }
    let path = cfg.out.clone().unwrap_or_else(|| PathBuf::from(command.default_out()));
    let digest = cfg.digest();
    let (content, passed) = match command {
        Command::Sample => (cmd_sample(cfg, &digest)?, true),
        Command::KernelGrid => (cmd_kernel_grid(cfg, &digest)?, true),
        Command::Verify => cmd_verify(cfg, &digest)?,
        Command::Heckman => (cmd_heckman(cfg, &digest)?, true),
        Command::EmCheck => cmd_em_check(cfg, &digest)?,
    };
    write_atomic(&path, &content)?;
    Ok(Outcome { path, passed })
}

fn write_atomic(path: &Path, content: &str) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".partial");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, content)?;
    fs::rename(&tmp, path).inspect_err(|_| {
        let _ = fs::remove_file(&tmp);
    })?;
    Ok(())
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_header(command: Command, digest: &str, notes: &[String]) -> String {
    let mut s = format!("# interlaced-dpp {}\n# config-sha256: {digest}\n", command.name());
    for n in notes {
        let _ = writeln!(s, "# {n}");
    }
    s
}

fn cmd_sample(cfg: &RunConfig, digest: &str) -> Result<String> {
    let class = cfg.class()?;
    let count = cfg.samples()?;
    let seed = cfg.seed()?;
    let gibbs = cfg.source == SampleSource::Gibbs;
    if gibbs && cfg.output != SampleOutput::Gc {
        return Err(Error::config("output", "the gibbs source produces GC patterns only; set output to \"gc\""));
    }
    let lambda = match cfg.source {
        SampleSource::Gaussian => None,
        _ => Some(cfg.lambda()?.to_vec()),
    };
    if let Some(l) = &lambda {
        crate::ensembles::check_chamber(class, l).map_err(|e| Error::config("lambda", e.to_string()))?;
    }

    let (columns, names) = sample_columns(class, cfg.output);
    let rows: Vec<Vec<String>> = chunks(count, 1024)
        .into_par_iter()
        .map(|(i, size)| -> Result<Vec<String>> {
            let mut rng = stream_rng(seed, i);
            if let (true, Some(l)) = (gibbs, &lambda) {
                let pats = sample_chain(class, l, size, GibbsConfig::default(), &mut rng)?;
                return Ok(pats.iter().map(|p| join_row(&p.coordinates())).collect());
            }
            (0..size)
                .map(|_| {
                    let h = match &lambda {
                        Some(l) => sample_fixed_orbit(class, l, &mut rng)?,
                        None => crate::ensembles::sample_gaussian(class, &mut rng),
                    };
                    let seq = minor_sequence_unchecked(&h)?;
                    Ok(join_row(&sample_values(&seq, cfg.output)?))
                })
                .collect()
        })
        .collect::<Result<_>>()?;

    let mut out = csv_header(
        Command::Sample,
        digest,
        &[format!("class {class}, source {:?}, output {:?}, {columns} columns", cfg.source, cfg.output).to_lowercase()],
    );
    out.push_str(&names.join(","));
    out.push('\n');
    for chunk in rows {
        for row in chunk {
            out.push_str(&row);
            out.push('\n');
        }
    }
    Ok(out)
}

fn join_row(values: &[f64]) -> String {
    values.iter().map(|v| num(*v)).collect::<Vec<_>>().join(",")
}

fn sample_values(seq: &MinorSequence, output: SampleOutput) -> Result<Vec<f64>> {
    Ok(match output {
        SampleOutput::Points => to_point_configuration(seq)?.levels.concat(),
        SampleOutput::Minors => seq.parts.iter().flat_map(|(_, p)| p.values.clone()).collect(),
        SampleOutput::Gc => pattern_from_minors(seq)?.coordinates(),
    })
}

fn sample_columns(class: MatrixClass, output: SampleOutput) -> (usize, Vec<String>) {
    let names: Vec<String> = match output {
        SampleOutput::Points => (1..=class.level_count())
            .flat_map(|r| (1..=class.points_at_level(r).unwrap_or(0)).map(move |j| format!("L{r}_{j}")))
            .collect(),
        SampleOutput::Minors => crate::minors::minor_orders(class)
            .into_iter()
            .flat_map(|m| {
                let len = crate::minors::minor_class(class, m).map_or(0, |c| c.rank);
                (1..=len).map(move |j| format!("m{m}_{j}"))
            })
            .collect(),
        SampleOutput::Gc => (1..=pattern_levels(class))
            .flat_map(|k| (1..=level_len(class.tag, k)).map(move |j| format!("x{k}_{j}")))
            .collect(),
    };
    (names.len(), names)
}

enum GridKernel {
    Plain(Box<dyn CorrelationKernel>),
    Deterministic(KernelSpec),
}

fn grid_kernel(cfg: &RunConfig, integrator: Integrator) -> Result<(GridKernel, Option<MatrixClass>, Vec<String>)> {
    let mut notes = Vec::new();
    Ok(match cfg.kernel_mode {
        KernelMode::Corollary => {
            let conv = match cfg.corollary_convention.as_deref().unwrap_or("printed") {
                "printed" => CorollaryConvention::Printed,
                "reconciled" => CorollaryConvention::Reconciled,
                other => {
                    return Err(Error::config(
                        "corollaryConvention",
                        format!("`{other}` is not `printed` or `reconciled`"),
                    ))
                }
            };
            notes.push(format!(
                "corollary mode ({conv:?} convention) ignores the class and rank fields"
            ));
            (GridKernel::Plain(Box::new(CorollaryKernel(conv))), None, notes)
        }
        KernelMode::EynardMehta => {
            let class = cfg.class()?;
            if class.tag != ClassTag::B {
                return Err(Error::config("kernelMode", "eynard-mehta mode needs class B"));
            }
            notes.push("indicator chain, zero anchors, odd Gaussian weights".into());
            (GridKernel::Plain(Box::new(ChainSpec::indicator_gaussian(class.rank)?)), Some(class), notes)
        }
        KernelMode::Deterministic => {
            let class = cfg.class()?;
            let spec = KernelSpec::deterministic(class, cfg.lambda()?)
                .map_err(|e| Error::config("lambda", e.to_string()))?;
            notes.push("deterministic mode: R is the continuous part; the top level is atomic".into());
            (GridKernel::Deterministic(spec), Some(class), notes)
        }
        KernelMode::Generic => {
            let class = cfg.class()?;
            if class.rank > crate::kernels::GENERIC_MAX_RANK {
                return Err(Error::config("kernelMode", "generic mode supports rank <= 3"));
            }
            let spec = gaussian_spec(class)?;
            let spec = KernelSpec::with_integrator(class, spec.psi()?.to_vec(), integrator)?;
            (GridKernel::Plain(Box::new(GenericKernel(spec))), Some(class), notes)
        }
        KernelMode::Biorthogonal => {
            let class = cfg.class()?;
            (GridKernel::Plain(Box::new(BiorthogonalKernel(gaussian_spec(class)?))), Some(class), notes)
        }
    })
}

fn cmd_kernel_grid(cfg: &RunConfig, digest: &str) -> Result<String> {
    let grid = cfg.grid.as_ref().ok_or_else(|| Error::config("grid", "missing"))?;
    let ys = grid.y.points("grid.y")?;
    let zs = match &grid.z {
        Some(z) => z.points("grid.z")?,
        None => ys.clone(),
    };
    let (kernel, class, notes) = grid_kernel(cfg, cfg.integrator()?)?;
    let levels = match (&grid.levels, class) {
        (Some(l), Some(c)) => {
            for &r in l {
                c.check_level(r).map_err(|e| Error::config("grid.levels", e.to_string()))?;
            }
            l.clone()
        }
        (Some(l), None) => l.clone(),
        (None, Some(c)) => (1..=c.level_count()).collect(),
        (None, None) => return Err(Error::config("grid.levels", "corollary mode needs explicit levels")),
    };
    let mut points = Vec::new();
    if grid.diagonal {
        if grid.z.is_some() {
            return Err(Error::config("grid.z", "a diagonal grid uses the y axis only"));
        }
        for &r in &levels {
            for &y in &ys {
                points.push((r, y, r, y));
            }
        }
    }
    for &r in levels.iter().filter(|_| !grid.diagonal) {
        for &y in &ys {
            for &s in &levels {
                for &z in &zs {
                    points.push((r, y, s, z));
                }
            }
        }
    }
    let values: Vec<f64> = points
        .par_iter()
        .map(|&(r, y, s, z)| match &kernel {
            GridKernel::Plain(k) => k.value((r, y), (s, z)),
            GridKernel::Deterministic(spec) => kernel_deterministic(spec, (r, y), (s, z)).map(|v| v.continuous),
        })
        .collect::<Result<_>>()?;
    let mut out = csv_header(Command::KernelGrid, digest, &notes);
    out.push_str("r,y,s,z,R\n");
    for (&(r, y, s, z), v) in points.iter().zip(values) {
        let _ = writeln!(out, "{r},{},{s},{},{}", num(y), num(z), num(v));
    }
    Ok(out)
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct VerifyDocument<'a> {
    schema_version: u32,
    command: &'static str,
    config_digest: &'a str,
    seed: u64,
    sample_count: usize,
    quadrature: Tolerances,
    report: ComparisonReport,
}

fn cmd_verify(cfg: &RunConfig, digest: &str) -> Result<(String, bool)> {
    let class = cfg.class()?;
    let seed = cfg.seed()?;
    let samples = cfg.samples()?;
    let queries = match &cfg.queries {
        Some(q) => {
            for (i, query) in q.iter().enumerate() {
                query
                    .check_for(class)
                    .map_err(|e| Error::config(format!("queries[{i}]"), e.to_string()))?;
            }
            q.clone()
        }
        None => default_queries(class)?,
    };
    let report = compare(class, samples, seed, &queries, &cfg.integrator()?)?;
    let passed = report.passed;
    let doc = VerifyDocument {
        schema_version: SCHEMA_VERSION,
        command: Command::Verify.name(),
        config_digest: digest,
        seed,
        sample_count: samples,
        quadrature: cfg.quadrature,
        report,
    };
    Ok((serde_json::to_string_pretty(&doc)? + "\n", passed))
}

fn cmd_heckman(cfg: &RunConfig, digest: &str) -> Result<String> {
    let spec = cfg.heckman.as_ref().ok_or_else(|| Error::config("heckman", "missing"))?;
    let seed = cfg.seed()?;
    let samples = cfg.samples()?;
    if spec.lambdas.is_empty() {
        return Err(Error::config("heckman.lambdas", "empty schedule"));
    }
    let report = convergence_report(&spec.lambdas, &spec.epsilons, &spec.x, samples, seed)
        .map_err(|e| match e {
            Error::Domain(m) => Error::config("heckman", m),
            other => other,
        })?;
    // for U(2) the limit is Uniform[x_2, x_1]; W1 is computed exactly in rescaled units
    let exact = |lambda: &[i64], eps: f64| -> Result<Option<f64>> {
        if spec.x.len() != 2 || spec.x[0] <= spec.x[1] {
            return Ok(None);
        }
        let (hi, lo) = (spec.x[0], spec.x[1]);
        let mu = branching_measure_a(lambda, eps)?;
        let atoms: Vec<(f64, f64)> = mu.marginal(0).into_iter().map(|(x, w)| ((x - lo) / (hi - lo), w)).collect();
        Ok(Some(wasserstein1_to_uniform(&atoms) * (hi - lo)))
    };
    let mut out = csv_header(
        Command::Heckman,
        digest,
        &[format!("x = {:?}, {} Monte Carlo samples, coordinate-sum W1", spec.x, samples)],
    );
    out.push_str("index,lambda,epsilon,atoms,w1_monte_carlo,stderr,w1_exact\n");
    for (i, row) in report.rows.iter().enumerate() {
        let lam = row.lambda.iter().map(i64::to_string).collect::<Vec<_>>().join(";");
        let ex = exact(&row.lambda, row.epsilon)?.map(num).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{lam},{},{},{},{},{ex}",
            i + 1,
            num(row.epsilon),
            row.atoms,
            num(row.distance),
            num(row.stderr)
        );
    }
    Ok(out)
}

/// Kernel agreement tolerance of `em-check`.
pub const EM_KERNEL_TOL: f64 = 1e-5;
/// Trace tolerance of `em-check`.
pub const EM_TRACE_TOL: f64 = 1e-4;

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct EmDocument<'a> {
    schema_version: u32,
    command: &'static str,
    config_digest: &'a str,
    rank: usize,
    grid: Vec<f64>,
    kernel_tolerance: f64,
    trace_tolerance: f64,
    max_kernel_diff: f64,
    max_trace_diff: f64,
    traces: Vec<(usize, f64, f64)>,
    gram_residual: f64,
    gram_condition: f64,
    min_diagonal: f64,
    passed: bool,
}

fn cmd_em_check(cfg: &RunConfig, digest: &str) -> Result<(String, bool)> {
    let rank = cfg.rank.ok_or_else(|| Error::config("rank", "missing"))?;
    if let Some(tag) = cfg.class {
        if tag != ClassTag::B {
            return Err(Error::config("class", "em-check compares with the class B kernel"));
        }
    }
    let class = MatrixClass::new(ClassTag::B, rank).map_err(|e| Error::config("rank", e.to_string()))?;
    let grid = match &cfg.grid {
        Some(g) => g.y.points("grid.y")?,
        None => vec![0.0, 0.35, 0.9, 1.6],
    };
    if grid.iter().any(|&y| y < 0.0) {
        return Err(Error::config("grid.y", "em-check lives on R_+"));
    }
    let spec = ChainSpec::indicator_gaussian(rank)?;
    let reference = BiorthogonalKernel(gaussian_spec(class)?);
    let c: EmCheck = em_check(&spec, &reference, &grid)?;
    let passed = c.max_kernel_diff <= EM_KERNEL_TOL && c.max_trace_diff <= EM_TRACE_TOL;
    let doc = EmDocument {
        schema_version: SCHEMA_VERSION,
        command: Command::EmCheck.name(),
        config_digest: digest,
        rank,
        grid,
        kernel_tolerance: EM_KERNEL_TOL,
        trace_tolerance: EM_TRACE_TOL,
        max_kernel_diff: c.max_kernel_diff,
        max_trace_diff: c.max_trace_diff,
        traces: c.traces,
        gram_residual: c.gram_residual,
        gram_condition: c.condition,
        min_diagonal: c.min_diagonal,
        passed,
    };
    Ok((serde_json::to_string_pretty(&doc)? + "\n", passed))
}

/// A configuration sample point for one matrix, used by examples and tests.
pub fn sample_point_row(class: MatrixClass, seed: u64) -> Result<Vec<f64>> {
    let mut rng = stream_rng(seed, 0);
    Ok(sample_configuration(class, &mut rng)?.levels.concat())
}
