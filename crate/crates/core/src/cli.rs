//! The `landau` command line: config loading, subcommand dispatch, output.
//!
//! Exit codes: 0 all checks pass, 1 a check failed (including an RDQ
//! violation), 2 usage or configuration error, 3 numerical error.
//! Errors go to stderr as one JSON record.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::character::{AutomorphicData, CharacterSpec};
use crate::config::{parse_character, parse_nu_expr, LatticeChoice, Overrides, RunConfig};
use crate::error::{Error, Result};
use crate::kernels::{KernelEvaluator, KernelKind};
use crate::lattice::ComplexPoint;
use crate::verify::{dimension_by_trace, run_suite, selberg_matrix, verify_spectrum, VerificationReport};

pub const SCHEMA_VERSION: u32 = 1;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "landau",
    version,
    about = "Landau levels on (Γ,χ)-automorphic functions: checks, traces, kernels, spectra"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// JSON run configuration.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Magnetic field: a number or a π multiple such as "pi", "2pi", "pi/2".
    #[arg(long, global = true, value_name = "EXPR", allow_hyphen_values = true)]
    pub nu: Option<String>,
    /// "square", "hexagonal" or a JSON lattice file.
    #[arg(long, global = true, value_name = "PRESET|FILE")]
    pub lattice: Option<String>,
    /// Character kind ("weierstrass", "trivial") or a JSON object.
    #[arg(long, global = true, value_name = "KIND|JSON")]
    pub character: Option<String>,
    /// Truncation tolerance of lattice sums.
    #[arg(long, global = true)]
    pub tolerance: Option<f64>,
    /// Gauss-Legendre nodes per cell axis for traces and kernel integrals.
    #[arg(long, global = true)]
    pub quad_order: Option<usize>,
    /// Gauss-Laguerre order of the Selberg transform.
    #[arg(long, global = true)]
    pub radial_order: Option<usize>,
    /// Finite-difference grid size per axis.
    #[arg(long, global = true)]
    pub grid: Option<usize>,
    /// Number of eigenvalues to compute.
    #[arg(long, global = true)]
    pub num_eigs: Option<usize>,
    /// Accepted and recorded; computations run on one thread.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Write the artifact here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    pub output: Option<PathBuf>,
    /// Keep wall-clock runtimes in JSON output (makes it non-reproducible).
    #[arg(long, global = true)]
    pub timings: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Riemann-Dirac quantization check of the triplet.
    Check,
    /// Kernel traces against the closed dimension formula.
    Dimension {
        /// Levels: "0..4" (inclusive), "0..=4", "3" or "0,2,5".
        #[arg(long = "l", value_name = "RANGE")]
        levels: Option<String>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Samples of z ↦ K(z, w₀) on the fundamental cell (CSV).
    Kernel {
        /// Landau level; the theta kernel when omitted.
        #[arg(long)]
        level: Option<usize>,
        /// Pinned point, "re,im" (first coordinate).
        #[arg(long, default_value = "0.3,0.2", allow_hyphen_values = true)]
        w0: String,
        /// Samples per cell axis.
        #[arg(long, default_value_t = 16)]
        samples: usize,
    },
    /// Selberg transform matrix h_{l,j} (CSV).
    Selberg {
        #[arg(long)]
        l_max: Option<usize>,
    },
    /// Finite-difference spectrum of the Landau operator (JSON).
    Spectrum,
    /// The full verification suite (JSON on stdout, table on stderr).
    Report,
}

/// Parses "a..b" (inclusive), "a..=b", "a" or "a,b,c".
pub fn parse_levels(text: &str) -> Result<Vec<usize>> {
    let bad = || Error::Config {
        field: "levels".into(),
        message: format!("cannot parse `{text}` (use 0..4, 0..=4, 3 or 0,2,5)"),
    };
    let t = text.trim();
    if let Some((a, b)) = t.split_once("..") {
        let a: usize = a.trim().parse().map_err(|_| bad())?;
        let b: usize = b.trim().trim_start_matches('=').trim().parse().map_err(|_| bad())?;
        if b < a {
            return Err(bad());
        }
        return Ok((a..=b).collect());
    }
    t.split(',').map(|s| s.trim().parse().map_err(|_| bad())).collect()
}

fn parse_point(text: &str) -> Result<(f64, f64)> {
    let bad = || Error::Config { field: "w0".into(), message: format!("expected \"re,im\", got `{text}`") };
    let (a, b) = text.split_once(',').ok_or_else(bad)?;
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

fn lattice_flag(text: &str) -> Result<LatticeChoice> {
    if LatticeChoice::PRESETS.contains(&text) {
        return Ok(LatticeChoice::Preset(text.to_string()));
    }
    let body = fs::read_to_string(text).map_err(|e| Error::Config {
        field: "lattice".into(),
        message: format!(
            "`{text}` is neither a preset ({}) nor a readable file: {e}",
            LatticeChoice::PRESETS.join(", ")
        ),
    })?;
    serde_json::from_str(&body).map_err(|e| Error::Config { field: "lattice".into(), message: format!("{text}: {e}") })
}

fn character_flag(text: &str) -> Result<CharacterSpec> {
    let value = if text.trim_start().starts_with('{') {
        serde_json::from_str(text).map_err(|e| Error::Config { field: "character".into(), message: e.to_string() })?
    } else {
        Value::String(text.to_string())
    };
    parse_character(&value)
}

impl GlobalArgs {
    pub fn overrides(&self) -> Result<Overrides> {
        Ok(Overrides {
            nu: self.nu.as_deref().map(parse_nu_expr).transpose()?,
            lattice: self.lattice.as_deref().map(lattice_flag).transpose()?,
            character: self.character.as_deref().map(character_flag).transpose()?,
            tolerance: self.tolerance,
            quad_order: self.quad_order,
            radial_order: self.radial_order,
            grid: self.grid,
            num_eigs: self.num_eigs,
            levels: None,
            l_max: None,
            threads: self.threads,
            output: self.output.clone(),
        })
    }

    pub fn load(&self, extra: Overrides) -> Result<RunConfig> {
        let mut ov = self.overrides()?;
        ov.levels = extra.levels;
        ov.l_max = extra.l_max;
        match &self.config {
            Some(path) => RunConfig::from_path(path, &ov),
            None => RunConfig::from_overrides(&ov),
        }
    }
}

/// Removes every `runtime_seconds` key.
pub fn strip_runtimes(value: &mut Value) {
    match value {
        Value::Object(map) => {
            map.remove("runtime_seconds");
            map.values_mut().for_each(strip_runtimes);
        }
        Value::Array(items) => items.iter_mut().for_each(strip_runtimes),
        _ => {}
    }
}

/// What a subcommand produced.
struct Artifact {
    body: String,
    passed: bool,
}

struct Context<'a> {
    cfg: RunConfig,
    timings: bool,
    err: &'a mut dyn Write,
}

impl Context<'_> {
    fn envelope(&self, command: &str, passed: bool, result: impl Serialize) -> Result<Artifact> {
        let mut value = json!({
            "schema": SCHEMA_VERSION,
            "command": command,
            "config": self.cfg,
            "passed": passed,
            "result": serde_json::to_value(result)?,
        });
        if !self.timings {
            strip_runtimes(&mut value);
        }
        Ok(Artifact { body: serde_json::to_string_pretty(&value)? + "\n", passed })
    }

    fn csv_header(&self) -> Result<String> {
        Ok(format!("# schema: {SCHEMA_VERSION}\n# config: {}\n", serde_json::to_string(&self.cfg)?))
    }

    fn data(&self) -> Result<AutomorphicData> {
        self.cfg.automorphic_data()
    }

    /// The triplet, or an exit-1 record when RDQ fails.
    fn valid_data(&mut self) -> Result<std::result::Result<AutomorphicData, i32>> {
        let data = self.data()?;
        if data.rdq_valid() {
            return Ok(Ok(data));
        }
        let record = json!({
            "schema": SCHEMA_VERSION,
            "error": {
                "kind": "rdq_violation",
                "message": "the triplet violates the quantization condition",
                "violations": data.rdq_report().violations,
            }
        });
        writeln!(self.err, "{}", serde_json::to_string(&record)?)?;
        Ok(Err(EXIT_CHECK_FAILED))
    }
}

fn csv_body(header: String, rows: Vec<Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.write_record(&row)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(header + &String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn fmt(x: f64) -> String {
    format!("{x:e}")
}

#[derive(Serialize)]
struct DimensionRow {
    l: usize,
    trace: f64,
    closed_dimension: f64,
    relative_gap: f64,
    passed: bool,
}

fn cmd_dimension(ctx: &mut Context, format: Format) -> Result<std::result::Result<Artifact, i32>> {
    let data = match ctx.valid_data()? {
        Ok(d) => d,
        Err(code) => return Ok(Err(code)),
    };
    let policy = ctx.cfg.policy();
    let mut rows = Vec::new();
    let mut reports = Vec::new();
    for &l in &ctx.cfg.levels {
        let t = dimension_by_trace(&data, l, ctx.cfg.quad_order, &policy, ctx.cfg.tolerances.dimension)?;
        rows.push(DimensionRow {
            l,
            trace: t.value,
            closed_dimension: t.expected,
            relative_gap: t.relative_gap,
            passed: t.report.passed,
        });
        reports.push(t.report);
    }
    let passed = rows.iter().all(|r| r.passed);
    Ok(Ok(match format {
        Format::Json => ctx.envelope("dimension", passed, json!({ "rows": rows, "reports": reports }))?,
        Format::Csv => {
            let mut table =
                vec![["l", "trace", "closed_dimension", "relative_gap", "passed"].map(String::from).to_vec()];
            table.extend(rows.iter().map(|r| {
                vec![r.l.to_string(), fmt(r.trace), fmt(r.closed_dimension), fmt(r.relative_gap), r.passed.to_string()]
            }));
            Artifact { body: csv_body(ctx.csv_header()?, table)?, passed }
        }
    }))
}

fn cmd_kernel(
    ctx: &mut Context,
    level: Option<usize>,
    w0: &str,
    samples: usize,
) -> Result<std::result::Result<Artifact, i32>> {
    let data = match ctx.valid_data()? {
        Ok(d) => d,
        Err(code) => return Ok(Err(code)),
    };
    if samples == 0 {
        return Err(Error::Config { field: "samples".into(), message: "must be positive".into() });
    }
    let (re, im) = parse_point(w0)?;
    let mut w = ComplexPoint::zero(data.n());
    w.coords[0] = num_complex::Complex64::new(re, im);
    let kind = level.map_or(KernelKind::Theta, KernelKind::Level);
    let lattice = data.lattice();
    let points: Vec<(f64, f64, ComplexPoint)> = (0..samples)
        .flat_map(|k| (0..samples).map(move |j| (j as f64 / samples as f64, k as f64 / samples as f64)))
        .map(|(a, b)| {
            let mut t = vec![0.0; 2 * data.n()];
            t[0] = a;
            t[1] = b;
            (a, b, lattice.point_at(&t))
        })
        .collect();
    let z_max = points.iter().map(|p| p.2.norm()).fold(0.0, f64::max);
    let ev = KernelEvaluator::new(&data, kind.clone(), ctx.cfg.policy(), z_max, w.norm())?;
    let mut table = vec![["t1", "t2", "z_re", "z_im", "k_re", "k_im", "k_abs"].map(String::from).to_vec()];
    for (a, b, z) in &points {
        let v = ev.try_eval(z, &w)?;
        let z1 = z.first();
        table.push(vec![a.to_string(), b.to_string(), fmt(z1.re), fmt(z1.im), fmt(v.re), fmt(v.im), fmt(v.norm())]);
    }
    let header = ctx.csv_header()?
        + &format!("# kernel: {}, w0: {re},{im}, radius: {}, terms: {}\n", kind.label(), ev.radius(), ev.term_count());
    Ok(Ok(Artifact { body: csv_body(header, table)?, passed: true }))
}

fn cmd_selberg(ctx: &mut Context) -> Result<Artifact> {
    let lattice = ctx.cfg.build_lattice()?;
    let l_max = ctx.cfg.l_max;
    let h = selberg_matrix(ctx.cfg.nu_value(), lattice.n(), l_max, ctx.cfg.radial_order)?;
    let defect = (&h - nalgebra::DMatrix::<f64>::identity(l_max + 1, l_max + 1)).amax();
    let passed = defect <= ctx.cfg.tolerances.selberg;
    let mut table =
        vec![std::iter::once("l".to_string()).chain((0..=l_max).map(|j| format!("j{j}"))).collect::<Vec<_>>()];
    for l in 0..=l_max {
        table.push(std::iter::once(l.to_string()).chain((0..=l_max).map(|j| fmt(h[(l, j)]))).collect());
    }
    let header = ctx.csv_header()? + &format!("# max_abs_identity_defect: {defect:e}, passed: {passed}\n");
    Ok(Artifact { body: csv_body(header, table)?, passed })
}

fn cmd_spectrum(ctx: &mut Context) -> Result<std::result::Result<Artifact, i32>> {
    let data = match ctx.valid_data()? {
        Ok(d) => d,
        Err(code) => return Ok(Err(code)),
    };
    let clusters = ctx.cfg.num_eigs.min(3);
    let (report, check) =
        verify_spectrum(&data, ctx.cfg.grid, ctx.cfg.num_eigs, clusters, ctx.cfg.tolerances.spectrum)?;
    let passed = check.passed;
    Ok(Ok(ctx.envelope("spectrum", passed, json!({ "spectrum": report, "check": check }))?))
}

fn summary_table(reports: &[VerificationReport], timings: bool) -> String {
    let width = reports.iter().map(|r| r.name.len()).max().unwrap_or(5).max(5);
    let mut s = format!("{:<width$}  {:<6}  {:>12}", "check", "status", "worst/tol");
    if timings {
        s += &format!("  {:>9}", "seconds");
    }
    s.push('\n');
    for r in reports {
        let status = if r.passed { "pass" } else { "FAIL" };
        s += &format!("{:<width$}  {:<6}  {:>12.3e}", r.name, status, r.worst_ratio());
        if timings {
            s += &format!("  {:>9.3}", r.runtime_seconds);
        }
        s.push('\n');
    }
    let failed = reports.iter().filter(|r| !r.passed).count();
    s += &format!("{} checks, {} failed\n", reports.len(), failed);
    s
}

fn dispatch(cli: &Cli, err: &mut dyn Write) -> Result<std::result::Result<Artifact, i32>> {
    let extra = match &cli.command {
        Command::Dimension { levels: Some(l), .. } => {
            Overrides { levels: Some(parse_levels(l)?), ..Overrides::default() }
        }
        Command::Selberg { l_max } => Overrides { l_max: *l_max, ..Overrides::default() },
        _ => Overrides::default(),
    };
    let cfg = cli.global.load(extra)?;
    let mut ctx = Context { cfg, timings: cli.global.timings, err };
    match &cli.command {
        Command::Check => {
            let start = Instant::now();
            let data = ctx.data()?;
            let report = data.rdq_report().clone();
            let passed = report.valid;
            let mut result = serde_json::to_value(&report)?;
            if ctx.timings {
                result["runtime_seconds"] = json!(start.elapsed().as_secs_f64());
            }
            Ok(Ok(ctx.envelope("check", passed, result)?))
        }
        Command::Dimension { format, .. } => cmd_dimension(&mut ctx, *format),
        Command::Kernel { level, w0, samples } => cmd_kernel(&mut ctx, *level, w0, *samples),
        Command::Selberg { .. } => Ok(Ok(cmd_selberg(&mut ctx)?)),
        Command::Spectrum => cmd_spectrum(&mut ctx),
        Command::Report => {
            let data = ctx.data()?;
            let reports = run_suite(&data, &ctx.cfg.suite_settings())?;
            let table = summary_table(&reports, ctx.timings);
            ctx.err.write_all(table.as_bytes())?;
            let passed = reports.iter().all(|r| r.passed);
            Ok(Ok(ctx.envelope("report", passed, &reports)?))
        }
    }
}

/// Exit code of an error.
pub fn exit_code(error: &Error) -> i32 {
    match error {
        Error::Config { .. } | Error::Json(_) | Error::Io(_) | Error::Csv(_) | Error::InvalidLattice(_) => EXIT_USAGE,
        _ => EXIT_NUMERIC,
    }
}

/// The structured record written to stderr for `error`.
pub fn error_record(error: &Error) -> Value {
    let mut body = json!({ "kind": error.kind(), "message": error.to_string() });
    if let Error::Config { field, .. } = error {
        body["field"] = json!(field);
    }
    json!({ "schema": SCHEMA_VERSION, "error": body })
}

fn write_artifact(body: &str, path: Option<&Path>, out: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => fs::write(p, body)?,
        None => out.write_all(body.as_bytes())?,
    }
    Ok(())
}

/// Runs the CLI on `args` (including the program name) and returns the
/// exit code.
pub fn execute<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    let outcome = dispatch(&cli, err).and_then(|r| match r {
        Ok(artifact) => {
            let path = cli.global.output.clone();
            write_artifact(&artifact.body, path.as_deref(), out)?;
            Ok(if artifact.passed { EXIT_PASS } else { EXIT_CHECK_FAILED })
        }
        Err(code) => Ok(code),
    });
    match outcome {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "{}", error_record(&e));
            exit_code(&e)
        }
    }
}
