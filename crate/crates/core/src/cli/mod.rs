//! Command-line front end: `spectrum`, `eigvecs`, `compare`, `dynamics` and
//! `verify`.
//!
//! CSV output uses `{:.16e}` (17 significant digits), JSON uses the shortest
//! round-trip representation. Validation errors exit with status 2, solver
//! failures and failed checks with status 1; every error is reported as a
//! single `error: ...` line on stderr.

pub mod verify;

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use crate::compare::compare_models;
use crate::dynamics::{boundary_divergence, Partner, DEFAULT_STEPS};
use crate::error::Error;
use crate::model::{ChainModel, Model, PeriodicParameters, RingModel};
use crate::solver::{closed_form, normalized, oracle_eigensystem, EigenSystem, Vectors};

#[derive(Debug, Parser)]
#[command(
    name = "xy-spectral",
    version,
    about = "Exact spectra of periodic XY chains and rings"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Eigenvalues with multiplicity, mode label and origin
    Spectrum(SpectrumArgs),
    /// Eigenvector(s) of one spectral line
    Eigvecs(EigvecsArgs),
    /// Chain/ring comparison report
    Compare(CompareArgs),
    /// Return amplitude on the chain against the ring
    Dynamics(DynamicsArgs),
    /// Randomised property suite
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelKind {
    Chain,
    Ring,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Closed,
    Oracle,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VectorMethod {
    Closed,
    Oracle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    #[arg(long, value_enum)]
    pub model: ModelKind,
    /// Parameter file: {"k": int, "omega": [...], "coupling": [...]}
    #[arg(long)]
    pub params: PathBuf,
    /// Number of sites N
    #[arg(long, conflicts_with = "cells", required_unless_present = "cells")]
    pub sites: Option<usize>,
    /// Number of cells: N = k n - 1 for chains, N = k m for rings
    #[arg(long)]
    pub cells: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, value_enum, default_value = "closed")]
    pub method: MethodArg,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct EigvecsArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// 0-based position of the line in the sorted spectrum
    #[arg(long)]
    pub index: usize,
    /// Emit the vectors exactly as given by the closed forms (default)
    #[arg(long, conflicts_with = "orthonormal")]
    pub canonical: bool,
    /// Emit unit-norm, mutually orthogonal vectors
    #[arg(long)]
    pub orthonormal: bool,
    #[arg(long, value_enum, default_value = "closed")]
    pub method: VectorMethod,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[arg(long)]
    pub params: PathBuf,
    /// Cells n: chain of k n - 1 sites against the ring of 2 k n sites
    #[arg(long)]
    pub n: usize,
    /// Energies at which the determinant identity is evaluated
    #[arg(long, default_value_t = 20)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct DynamicsArgs {
    #[arg(long)]
    pub params: PathBuf,
    /// Cells n: chain of k n - 1 sites against the ring of 2 k n sites
    #[arg(long)]
    pub n: usize,
    /// 1-based observation site; defaults to ceil((k n - 1) / 2)
    #[arg(long)]
    pub site: Option<usize>,
    /// Final time; defaults to (k n - 1) / max|D|
    #[arg(long)]
    pub tmax: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_STEPS)]
    pub steps: usize,
    #[arg(long, default_value_t = 1e-3)]
    pub threshold: f64,
    /// Compare the chain with itself instead of the ring
    #[arg(long)]
    pub control: bool,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
    #[arg(long, default_value_t = 5)]
    pub kmax: usize,
    #[arg(long, hide = true)]
    pub inject_fault: bool,
}

/// Failure of a command, mapped to an exit status.
#[derive(Debug)]
pub enum CliError {
    /// Bad input: exit 2.
    Usage(String),
    /// Numerical failure or failed check: exit 1.
    Failure(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Failure(_) => 1,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Failure(m) => m,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        if e.is_validation() {
            CliError::Usage(e.to_string())
        } else {
            CliError::Failure(e.to_string())
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Failure(format!("write failed: {e}"))
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Parses `std::env::args`, runs the command on stdout and returns the
/// process exit status.
pub fn main_entry() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let rendered = e.to_string();
                let first = rendered
                    .lines()
                    .next()
                    .unwrap_or("error: invalid arguments");
                eprintln!("{first}");
                return ExitCode::from(2);
            }
            // Help and version requests.
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match run(&cli, &mut out) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let _ = out.flush();
            let msg = e.message().replace('\n', " ");
            eprintln!("error: {msg}");
            ExitCode::from(e.exit_code())
        }
    }
}

/// Runs a parsed command, writing its report to `out`.
pub fn run(cli: &Cli, out: &mut dyn Write) -> CliResult<()> {
    match &cli.command {
        Command::Spectrum(a) => cmd_spectrum(a, out),
        Command::Eigvecs(a) => cmd_eigvecs(a, out),
        Command::Compare(a) => cmd_compare(a, out),
        Command::Dynamics(a) => cmd_dynamics(a, out),
        Command::Verify(a) => cmd_verify(a, out),
    }
}

fn read_params(path: &Path) -> CliResult<PeriodicParameters> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    Ok(PeriodicParameters::from_json(&text)?)
}

fn build_model(args: &ModelArgs) -> CliResult<Model> {
    let params = read_params(&args.params)?;
    let k = params.k();
    let model = match (args.model, args.sites, args.cells) {
        (ModelKind::Chain, Some(n), _) => Model::Chain(ChainModel::new(params, n)?),
        (ModelKind::Chain, None, Some(c)) => Model::Chain(ChainModel::with_cells(params, c)?),
        (ModelKind::Ring, Some(n), _) => {
            if n % k != 0 {
                return Err(CliError::Usage(format!(
                    "a ring with period k = {k} needs a multiple of k sites, got N = {n}"
                )));
            }
            Model::Ring(RingModel::new(params, n / k)?)
        }
        (ModelKind::Ring, None, Some(c)) => Model::Ring(RingModel::new(params, c)?),
        (_, None, None) => {
            return Err(CliError::Usage(
                "either --sites or --cells is required".into(),
            ))
        }
    };
    Ok(model)
}

fn solve(model: &Model, method: VectorMethod, vectors: Vectors) -> CliResult<EigenSystem> {
    Ok(match method {
        VectorMethod::Closed => closed_form(model, vectors)?,
        VectorMethod::Oracle => oracle_eigensystem(model)?,
    })
}

/// `{:.16e}` rendering shared by every CSV writer.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Serialize)]
struct LineRecord {
    value: f64,
    multiplicity: usize,
    mode: Option<String>,
    origin: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle_delta: Option<f64>,
}

fn cmd_spectrum(args: &SpectrumArgs, out: &mut dyn Write) -> CliResult<()> {
    let model = build_model(&args.model)?;
    let primary = match args.method {
        MethodArg::Oracle => oracle_eigensystem(&model)?,
        MethodArg::Closed | MethodArg::Both => closed_form(&model, Vectors::Skip)?,
    };
    let deltas = if args.method == MethodArg::Both {
        let reference = oracle_eigensystem(&model)?.values();
        let mut pos = 0;
        let mut deltas = Vec::with_capacity(primary.lines.len());
        for line in &primary.lines {
            let d = reference[pos..pos + line.multiplicity]
                .iter()
                .map(|r| (r - line.value).abs())
                .fold(0.0, f64::max);
            pos += line.multiplicity;
            deltas.push(d);
        }
        Some(deltas)
    } else {
        None
    };
    let records: Vec<LineRecord> = primary
        .lines
        .iter()
        .enumerate()
        .map(|(i, l)| LineRecord {
            value: l.value,
            multiplicity: l.multiplicity,
            mode: l.mode.map(|m| m.to_string()),
            origin: l.origin.map(|o| o.to_string()),
            oracle_delta: deltas.as_ref().map(|d| d[i]),
        })
        .collect();
    let max_delta = deltas
        .as_ref()
        .map(|d| d.iter().copied().fold(0.0, f64::max));
    match args.format {
        Format::Json => {
            let mut doc = json!({
                "model": model.kind(),
                "sites": model.sites(),
                "method": primary.method,
                "lines": records,
            });
            if let Some(m) = max_delta {
                doc["max_delta"] = json!(m);
            }
            writeln!(out, "{}", serde_json::to_string_pretty(&doc).expect("json"))?;
        }
        Format::Csv => {
            let mut text = String::from("value,multiplicity,mode,origin");
            if deltas.is_some() {
                text.push_str(",oracle_delta");
            }
            text.push('\n');
            for r in &records {
                let _ = write!(
                    text,
                    "{},{},{},{}",
                    num(r.value),
                    r.multiplicity,
                    r.mode.as_deref().unwrap_or(""),
                    r.origin.as_deref().unwrap_or("")
                );
                if let Some(d) = r.oracle_delta {
                    let _ = write!(text, ",{}", num(d));
                }
                text.push('\n');
            }
            if let Some(m) = max_delta {
                let _ = writeln!(text, "# max_delta,{}", num(m));
            }
            out.write_all(text.as_bytes())?;
        }
    }
    Ok(())
}

/// Unit-norm vectors of one line, orthogonalised in order.
fn orthonormalize(vectors: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut done: Vec<Vec<f64>> = Vec::with_capacity(vectors.len());
    for v in vectors {
        let mut w = v.clone();
        for prev in &done {
            let c: f64 = prev.iter().zip(&w).map(|(a, b)| a * b).sum();
            w.iter_mut().zip(prev).for_each(|(x, p)| *x -= c * p);
        }
        done.push(normalized(&w));
    }
    done
}

fn cmd_eigvecs(args: &EigvecsArgs, out: &mut dyn Write) -> CliResult<()> {
    let model = build_model(&args.model)?;
    let eig = solve(&model, args.method, Vectors::Canonical)?;
    let line = eig.lines.get(args.index).ok_or_else(|| {
        CliError::Usage(format!(
            "--index {} out of range: the spectrum has {} lines",
            args.index,
            eig.lines.len()
        ))
    })?;
    let vectors = if args.orthonormal {
        orthonormalize(&line.vectors)
    } else {
        line.vectors.clone()
    };
    match args.format {
        Format::Json => {
            let doc = json!({
                "value": line.value,
                "multiplicity": line.multiplicity,
                "mode": line.mode.map(|m| m.to_string()),
                "origin": line.origin.map(|o| o.to_string()),
                "source": line.source,
                "normalization": if args.orthonormal { "orthonormal" } else { "canonical" },
                "vectors": vectors,
            });
            writeln!(out, "{}", serde_json::to_string_pretty(&doc).expect("json"))?;
        }
        Format::Csv => {
            let mut text = String::from("site");
            for i in 0..vectors.len() {
                let _ = write!(text, ",v{i}");
            }
            text.push('\n');
            for s in 0..model.sites() {
                let _ = write!(text, "{}", s + 1);
                for v in &vectors {
                    let _ = write!(text, ",{}", num(v[s]));
                }
                text.push('\n');
            }
            out.write_all(text.as_bytes())?;
        }
    }
    Ok(())
}

fn cmd_compare(args: &CompareArgs, out: &mut dyn Write) -> CliResult<()> {
    let params = read_params(&args.params)?;
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let report = compare_models(&params, args.n, args.samples, &mut rng)?;
    match args.format {
        Format::Json => writeln!(out, "{}", report.to_json())?,
        Format::Csv => {
            let mut text = String::from(
                "class,value,chain_mode,ring_mode,multiplicity,projection_residual,scale\n",
            );
            for c in &report.common {
                let (res, scale) = c.projection.map_or((String::new(), String::new()), |p| {
                    (num(p.residual), num(p.scale))
                });
                let _ = writeln!(
                    text,
                    "common,{},{},{},{},{res},{scale}",
                    num(c.value),
                    c.chain_mode.as_deref().unwrap_or(""),
                    c.ring_mode.as_deref().unwrap_or(""),
                    c.ring_multiplicity
                );
            }
            for l in &report.chain_only {
                let _ = writeln!(
                    text,
                    "chain_only,{},{},,{},,",
                    num(l.value),
                    l.mode.as_deref().unwrap_or(""),
                    l.multiplicity
                );
            }
            for l in &report.ring_only {
                let _ = writeln!(
                    text,
                    "ring_only,{},,{},{},,",
                    num(l.value),
                    l.mode.as_deref().unwrap_or(""),
                    l.multiplicity
                );
            }
            let _ = writeln!(
                text,
                "# identity_max_rel_err,{}",
                num(report.identity_max_rel_err)
            );
            let _ = writeln!(
                text,
                "# projection_max_err,{}",
                num(report.projection_max_err)
            );
            out.write_all(text.as_bytes())?;
        }
    }
    if !report.passes() {
        return Err(CliError::Failure(format!(
            "comparison residuals exceed bounds (identity {:e}, projection {:e})",
            report.identity_max_rel_err, report.projection_max_err
        )));
    }
    Ok(())
}

fn cmd_dynamics(args: &DynamicsArgs, out: &mut dyn Write) -> CliResult<()> {
    let params = read_params(&args.params)?;
    let sites = params.k() * args.n;
    let site = match args.site {
        Some(0) => return Err(CliError::Usage("--site is 1-based".into())),
        Some(s) => Some(s - 1),
        None => None,
    };
    let t_max = args
        .tmax
        .unwrap_or_else(|| sites.saturating_sub(1) as f64 / params.max_abs_coupling());
    let partner = if args.control {
        Partner::Chain
    } else {
        Partner::Ring
    };
    let series = boundary_divergence(
        &params,
        args.n,
        site,
        args.threshold,
        t_max,
        args.steps,
        partner,
    )?;
    let mut text = String::from("t,re_chain,im_chain,re_ring,im_ring,abs_diff\n");
    for ((t, a), b) in series
        .times
        .iter()
        .zip(&series.chain_amp)
        .zip(&series.ring_amp)
    {
        let _ = writeln!(
            text,
            "{},{},{},{},{},{}",
            num(*t),
            num(a.re),
            num(a.im),
            num(b.re),
            num(b.im),
            num((a - b).norm())
        );
    }
    let _ = writeln!(text, "# divergence_time,{}", num(series.divergence_time));
    out.write_all(text.as_bytes())?;
    Ok(())
}

fn cmd_verify(args: &VerifyArgs, out: &mut dyn Write) -> CliResult<()> {
    if args.trials == 0 || args.kmax == 0 {
        return Err(CliError::Usage(
            "--trials and --kmax must be positive".into(),
        ));
    }
    let config = verify::VerifyConfig {
        seed: args.seed,
        trials: args.trials,
        kmax: args.kmax,
        inject_fault: args.inject_fault,
    };
    let outcomes = verify::run_suite(&config);
    let mut text = format!(
        "verify seed={} trials={} kmax={}\n",
        args.seed, args.trials, args.kmax
    );
    for o in &outcomes {
        let _ = writeln!(text, "{o}");
    }
    let failed = outcomes.iter().filter(|o| !o.passed()).count();
    let _ = writeln!(
        text,
        "summary {} families={} failed={failed}",
        if failed == 0 { "PASS" } else { "FAIL" },
        outcomes.len()
    );
    out.write_all(text.as_bytes())?;
    if failed > 0 {
        return Err(CliError::Failure(format!(
            "{failed} property families failed"
        )));
    }
    Ok(())
}
