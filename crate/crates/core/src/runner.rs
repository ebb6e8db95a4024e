//! Batch front end shared by the `xmjacobi` binary and the examples.
//!
//! Configuration precedence is flags, then a TOML file given with
//! `--config`, then built-in defaults. The effective configuration is echoed
//! into every output: as a `# config: {...}` comment line ahead of the CSV
//! header, or as the `config` member of JSON output.
//!
//! Exit codes: 0 success, 1 a verification check failed, 2 invalid input,
//! 3 numerical singularity. Failures print one line to stderr starting with
//! `error[<kind>]:`.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::Error;
use crate::orthopoly::{gram_matrix, norm_h, FamilyParams, QuadratureConfig};
use crate::potential::{bound_energies, EigenfunctionSpec, Prepotential};
use crate::radial::{default_window, shoot_bound_states_with, verify_s_matrix, RadialGrid, ShootingConfig};
use crate::scattering::{k_grid, s_xm, smatrix_table};

/// Environment variable naming the directory for outputs written without
/// `--output`.
pub const OUTPUT_DIR_ENV: &str = "XMJACOBI_OUTPUT_DIR";

/// Wavenumbers checked by `verify` unless a k range is given.
pub const DEFAULT_VERIFY_KS: [f64; 4] = [0.5, 1.0, 2.0, 4.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Spectrum,
    Smatrix,
    Potential,
    Eigenfunction,
    Ortho,
    Verify,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Spectrum => "spectrum",
            Command::Smatrix => "smatrix",
            Command::Potential => "potential",
            Command::Eigenfunction => "eigenfunction",
            Command::Ortho => "ortho",
            Command::Verify => "verify",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum, Default)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "xmjacobi", version, about = "Spectra, S-matrices and verification for X_m Jacobi potentials")]
struct Cli {
    #[command(subcommand)]
    command: CliCommand,
}

#[derive(Debug, Subcommand)]
enum CliCommand {
    /// Bound-state energies in both conventions.
    Spectrum(Flags),
    /// S-matrix table over a k range.
    Smatrix(Flags),
    /// Profile of V^(r) - A^2 in the rescaled coordinate.
    Potential(Flags),
    /// Profile of the normalized bound state `nu`.
    Eigenfunction(Flags),
    /// Gram matrix of the exceptional polynomials against the closed-form norms.
    Ortho(Flags),
    /// Numerov, shooting and quadrature checks; always writes a JSON report.
    Verify(Flags),
}

#[derive(Debug, Clone, Default, clap::Args, Deserialize)]
#[serde(deny_unknown_fields)]
struct Flags {
    #[arg(long, allow_negative_numbers = true)]
    g: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    h: Option<f64>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    k_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    k_max: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    k_step: Option<f64>,
    #[arg(long)]
    nu: Option<usize>,
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
    /// Output file; defaults to stdout, or `$XMJACOBI_OUTPUT_DIR/<command>.<ext>`.
    #[arg(long)]
    output: Option<PathBuf>,
    /// TOML file with any of these options (flags take precedence).
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
    #[arg(long, allow_negative_numbers = true)]
    r_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    r_max: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    step: Option<f64>,
    /// Worker threads for sweeps.
    #[arg(long)]
    jobs: Option<usize>,
    /// Tolerance of the phase-shift check in `verify`, radians.
    #[arg(long, allow_negative_numbers = true)]
    max_phase_diff: Option<f64>,
    /// Spacing of the `potential` and `eigenfunction` profiles.
    #[arg(long, allow_negative_numbers = true)]
    profile_step: Option<f64>,
}

impl Flags {
    fn or(self, other: Flags) -> Flags {
        Flags {
            g: self.g.or(other.g),
            h: self.h.or(other.h),
            m: self.m.or(other.m),
            k_min: self.k_min.or(other.k_min),
            k_max: self.k_max.or(other.k_max),
            k_step: self.k_step.or(other.k_step),
            nu: self.nu.or(other.nu),
            format: self.format.or(other.format),
            output: self.output.or(other.output),
            config: self.config.or(other.config),
            r_min: self.r_min.or(other.r_min),
            r_max: self.r_max.or(other.r_max),
            step: self.step.or(other.step),
            jobs: self.jobs.or(other.jobs),
            max_phase_diff: self.max_phase_diff.or(other.max_phase_diff),
            profile_step: self.profile_step.or(other.profile_step),
        }
    }
}

/// Fully resolved run configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub g: f64,
    pub h: f64,
    pub m: usize,
    pub k_min: f64,
    pub k_max: f64,
    pub k_step: f64,
    /// Whether any k option was given explicitly (`verify` otherwise uses
    /// [`DEFAULT_VERIFY_KS`]).
    #[serde(skip)]
    pub k_explicit: bool,
    pub nu: usize,
    pub format: OutputFormat,
    pub output: Option<PathBuf>,
    pub grid: RadialGrid,
    pub jobs: Option<usize>,
    pub max_phase_diff: f64,
    pub profile_step: f64,
}

impl RunConfig {
    pub fn defaults(command: Command) -> Self {
        Self {
            command,
            g: 1.0,
            h: 10.0,
            m: 1,
            k_min: 0.1,
            k_max: 10.0,
            k_step: 0.1,
            k_explicit: false,
            nu: 0,
            format: OutputFormat::Csv,
            output: None,
            grid: RadialGrid::default(),
            jobs: None,
            max_phase_diff: 1e-3,
            profile_step: 0.01,
        }
    }

    fn from_flags(command: Command, f: Flags) -> Self {
        let d = Self::defaults(command);
        let k_explicit = f.k_min.is_some() || f.k_max.is_some() || f.k_step.is_some();
        Self {
            command,
            g: f.g.unwrap_or(d.g),
            h: f.h.unwrap_or(d.h),
            m: f.m.unwrap_or(d.m),
            k_min: f.k_min.unwrap_or(d.k_min),
            k_max: f.k_max.unwrap_or(d.k_max),
            k_step: f.k_step.unwrap_or(d.k_step),
            k_explicit,
            nu: f.nu.unwrap_or(d.nu),
            format: f.format.unwrap_or(d.format),
            output: f.output,
            grid: RadialGrid {
                r_min: f.r_min.unwrap_or(d.grid.r_min),
                r_max: f.r_max.unwrap_or(d.grid.r_max),
                step: f.step.unwrap_or(d.grid.step),
            },
            jobs: f.jobs,
            max_phase_diff: f.max_phase_diff.unwrap_or(d.max_phase_diff),
            profile_step: f.profile_step.unwrap_or(d.profile_step),
        }
    }

    pub fn params(&self) -> Result<FamilyParams, RunError> {
        Ok(FamilyParams::new(self.g, self.h, self.m)?)
    }

    fn ks(&self) -> Result<Vec<f64>, RunError> {
        let ks = k_grid(self.k_min, self.k_max, self.k_step)?;
        if ks.is_empty() {
            return Err(RunError::invalid("empty k range"));
        }
        Ok(ks)
    }

    fn echo(&self) -> Value {
        serde_json::to_value(self).expect("config serializes")
    }
}

/// Failure of a run with its exit code.
#[derive(Debug, Clone, PartialEq)]
pub enum RunError {
    Invalid(String),
    Numerical(String),
    Io(String),
}

impl RunError {
    fn invalid(msg: impl Into<String>) -> Self {
        RunError::Invalid(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Invalid(_) | RunError::Io(_) => 2,
            RunError::Numerical(_) => 3,
        }
    }

    /// Single line, `error[<kind>]: <message>`.
    pub fn line(&self) -> String {
        let (kind, msg) = match self {
            RunError::Invalid(m) => ("invalid-input", m),
            RunError::Numerical(m) => ("numerical", m),
            RunError::Io(m) => ("io", m),
        };
        format!("error[{kind}]: {}", msg.replace('\n', " "))
    }
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParams(_) | Error::Parameter(_) | Error::InvalidGrid(_) | Error::Domain(_) => {
                RunError::Invalid(e.to_string())
            }
            other => RunError::Numerical(other.to_string()),
        }
    }
}

/// Rendered output of a command and whether its checks passed.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub text: String,
    pub extension: &'static str,
    pub passed: bool,
}

/// Doubles with 17 significant digits.
fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv(config: &RunConfig, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> RunOutput {
    let mut text = String::new();
    let _ = writeln!(text, "# config: {}", config.echo());
    let _ = writeln!(text, "{}", header.join(","));
    for row in rows {
        let _ = writeln!(text, "{}", row.join(","));
    }
    RunOutput {
        text,
        extension: "csv",
        passed: true,
    }
}

fn json_out(schema: &str, config: &RunConfig, body: Value, passed: bool) -> RunOutput {
    let mut obj = json!({ "schema": schema, "config": config.echo() });
    if let (Some(o), Value::Object(b)) = (obj.as_object_mut(), body) {
        o.extend(b);
    }
    RunOutput {
        text: serde_json::to_string_pretty(&obj).expect("json") + "\n",
        extension: "json",
        passed,
    }
}

pub fn run_spectrum(config: &RunConfig) -> Result<RunOutput, RunError> {
    let params = config.params()?;
    let entries = bound_energies(&params);
    Ok(match config.format {
        OutputFormat::Csv => csv(
            config,
            &["nu", "energy_raw", "energy_scattering"],
            entries
                .iter()
                .map(|e| vec![e.nu.to_string(), fmt17(e.energy_raw), fmt17(e.energy_scattering)]),
        ),
        OutputFormat::Json => json_out(
            "spectrum/1",
            config,
            json!({ "a": params.a(), "b": params.b(), "entries": entries }),
            true,
        ),
    })
}

pub fn run_smatrix(config: &RunConfig) -> Result<RunOutput, RunError> {
    let params = config.params()?;
    let ks = config.ks()?;
    let table = smatrix_table(&params, &ks).map_err(|e| {
        let at = ks.iter().find(|&&k| s_xm(&params, k).is_err()).copied();
        match (RunError::from(e), at) {
            (RunError::Numerical(m), Some(k)) => RunError::Numerical(format!("{m} at k = {k}")),
            (other, _) => other,
        }
    })?;
    Ok(match config.format {
        OutputFormat::Csv => csv(
            config,
            &["k", "re_s", "im_s", "abs_s", "delta_unwrapped"],
            table.iter().map(|s| {
                vec![
                    fmt17(s.k),
                    fmt17(s.s_value.re),
                    fmt17(s.s_value.im),
                    fmt17(s.s_value.norm()),
                    fmt17(s.phase_unwrapped),
                ]
            }),
        ),
        OutputFormat::Json => {
            let rows: Vec<Value> = table
                .iter()
                .map(|s| {
                    json!({
                        "k": s.k,
                        "re_s": s.s_value.re,
                        "im_s": s.s_value.im,
                        "abs_s": s.s_value.norm(),
                        "delta_unwrapped": s.phase_unwrapped,
                    })
                })
                .collect();
            json_out("smatrix/1", config, json!({ "rows": rows }), true)
        }
    })
}

fn profile_points(config: &RunConfig) -> Result<Vec<f64>, RunError> {
    let step = config.profile_step;
    if !(step > 0.0) || !(config.grid.r_max > step) {
        return Err(RunError::invalid(format!(
            "profile needs 0 < profile_step < r_max, got {step} and {}",
            config.grid.r_max
        )));
    }
    let n = (config.grid.r_max / step + 1e-9).floor() as usize;
    Ok((1..=n).map(|i| i as f64 * step).collect())
}

fn profile(config: &RunConfig, schema: &str, values: Vec<(f64, f64)>, extra: Value) -> RunOutput {
    match config.format {
        OutputFormat::Csv => csv(config, &["r", "value"], values.iter().map(|(r, v)| vec![fmt17(*r), fmt17(*v)])),
        OutputFormat::Json => {
            let rows: Vec<Value> = values.iter().map(|(r, v)| json!({ "r": r, "value": v })).collect();
            let mut body = json!({ "rows": rows });
            if let (Some(b), Value::Object(e)) = (body.as_object_mut(), extra) {
                b.extend(e);
            }
            json_out(schema, config, body, true)
        }
    }
}

pub fn run_potential(config: &RunConfig) -> Result<RunOutput, RunError> {
    let params = config.params()?;
    let pre = Prepotential::new(&params);
    let values = profile_points(config)?
        .into_par_iter()
        .map(|r| Ok((r, pre.scattering_potential(r)?)))
        .collect::<Result<Vec<_>, Error>>()?;
    Ok(profile(config, "potential/1", values, json!({ "plateau": params.a() * params.a() })))
}

pub fn run_eigenfunction(config: &RunConfig) -> Result<RunOutput, RunError> {
    let params = config.params()?;
    let spec = EigenfunctionSpec::new(config.nu, &params)?;
    let values = profile_points(config)?
        .into_par_iter()
        .map(|r| Ok((r, spec.value(r)?)))
        .collect::<Result<Vec<_>, Error>>()?;
    Ok(profile(
        config,
        "eigenfunction/1",
        values,
        json!({
            "nu": config.nu,
            "energy_scattering": -spec.kappa() * spec.kappa(),
            "normalization": spec.normalization,
        }),
    ))
}

struct OrthoSummary {
    entries: Vec<(usize, usize, f64, Option<f64>)>,
    max_offdiag: f64,
    max_diag_rel: f64,
}

fn ortho_summary(params: &FamilyParams) -> Result<OrthoSummary, RunError> {
    let quad = QuadratureConfig::auto(params)?;
    let gram = gram_matrix(params, &quad)?;
    let mut entries = Vec::new();
    let (mut max_offdiag, mut max_diag_rel) = (0.0f64, 0.0f64);
    for (i, row) in gram.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            if i == j {
                let closed = norm_h(i, params)?;
                max_diag_rel = max_diag_rel.max((v - closed).abs() / closed);
                entries.push((i, j, v, Some(closed)));
            } else {
                let scale = (gram[i][i] * gram[j][j]).sqrt();
                max_offdiag = max_offdiag.max(v.abs() / scale);
                entries.push((i, j, v, None));
            }
        }
    }
    Ok(OrthoSummary {
        entries,
        max_offdiag,
        max_diag_rel,
    })
}

pub fn run_ortho(config: &RunConfig) -> Result<RunOutput, RunError> {
    let params = config.params()?;
    let s = ortho_summary(&params)?;
    Ok(match config.format {
        OutputFormat::Csv => csv(
            config,
            &["nu", "q", "integral", "closed_form"],
            s.entries.iter().map(|(i, j, v, c)| {
                vec![i.to_string(), j.to_string(), fmt17(*v), c.map(fmt17).unwrap_or_default()]
            }),
        ),
        OutputFormat::Json => {
            let rows: Vec<Value> = s
                .entries
                .iter()
                .map(|(i, j, v, c)| json!({ "nu": i, "q": j, "integral": v, "closed_form": c }))
                .collect();
            json_out(
                "ortho/1",
                config,
                json!({
                    "entries": rows,
                    "max_offdiag_relative": s.max_offdiag,
                    "max_diag_relative_error": s.max_diag_rel,
                }),
                true,
            )
        }
    })
}

#[derive(Debug, Clone, Serialize)]
struct Check {
    name: &'static str,
    passed: bool,
    max_deviation: f64,
    tolerance: f64,
}

impl Check {
    fn new(name: &'static str, max_deviation: f64, tolerance: f64) -> Self {
        Check {
            name,
            passed: max_deviation < tolerance,
            max_deviation,
            tolerance,
        }
    }
}

/// Numerov phase shifts against the closed form, shooting against the
/// exact spectrum, unitarity over the k list, and the orthogonality
/// certificate. Exit status 1 when any check misses its tolerance.
pub fn run_verify(config: &RunConfig) -> Result<RunOutput, RunError> {
    let params = config.params()?;
    let ks = if config.k_explicit { config.ks()? } else { DEFAULT_VERIFY_KS.to_vec() };
    config.grid.validate()?;

    let phases = verify_s_matrix(&params, &ks, &config.grid)?;

    let shooting_cfg = ShootingConfig {
        grid: config.grid,
        ..ShootingConfig::default()
    };
    let shot = shoot_bound_states_with(&params, default_window(&params), 1e-9, &shooting_cfg)?;
    let exact: Vec<f64> = bound_energies(&params).iter().map(|e| e.energy_scattering).collect();
    let spectrum_dev = if shot.energies.len() == exact.len() {
        shot.energies
            .iter()
            .zip(&exact)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
    } else {
        f64::INFINITY
    };
    let nodes_ok = shot.node_counts.iter().all(|&(a, b)| b == a + 1);

    let unitarity = ks
        .iter()
        .map(|&k| s_xm(&params, k).map(|s| (s.norm() - 1.0).abs()))
        .collect::<Result<Vec<_>, Error>>()?
        .into_iter()
        .fold(0.0f64, f64::max);

    let ortho = ortho_summary(&params)?;

    let checks = vec![
        Check::new("phase_shift", phases.max_diff, config.max_phase_diff),
        Check::new("spectrum", spectrum_dev, 1e-6),
        Check::new("node_counts", if nodes_ok { 0.0 } else { 1.0 }, 0.5),
        Check::new("unitarity", unitarity, 1e-10),
        Check::new("orthogonality_offdiag", ortho.max_offdiag, 1e-8),
        Check::new("orthogonality_norms", ortho.max_diag_rel, 1e-8),
    ];
    let passed = checks.iter().all(|c| c.passed);
    Ok(json_out(
        "verify/1",
        config,
        json!({
            "passed": passed,
            "checks": checks,
            "phase_shifts": phases.records,
            "energies_found": shot.energies,
            "energies_exact": exact,
            "failed_brackets": shot.failed_brackets,
        }),
        passed,
    ))
}

pub fn run_command(config: &RunConfig) -> Result<RunOutput, RunError> {
    let go = || match config.command {
        Command::Spectrum => run_spectrum(config),
        Command::Smatrix => run_smatrix(config),
        Command::Potential => run_potential(config),
        Command::Eigenfunction => run_eigenfunction(config),
        Command::Ortho => run_ortho(config),
        Command::Verify => run_verify(config),
    };
    match config.jobs {
        Some(0) => Err(RunError::invalid("--jobs must be at least 1")),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| RunError::Io(e.to_string()))?
            .install(go),
        None => go(),
    }
}

fn read_config_file(path: &Path) -> Result<Flags, RunError> {
    let text = std::fs::read_to_string(path).map_err(|e| RunError::invalid(format!("cannot read {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| RunError::invalid(format!("bad config {}: {}", path.display(), e.message())))
}

/// Parses arguments (program name first) into a resolved configuration.
pub fn parse_config<I, S>(args: I) -> Result<RunConfig, RunError>
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| {
        let first = e.to_string().lines().next().unwrap_or("").trim_start_matches("error: ").to_string();
        RunError::Invalid(first)
    })?;
    let (command, flags) = match cli.command {
        CliCommand::Spectrum(f) => (Command::Spectrum, f),
        CliCommand::Smatrix(f) => (Command::Smatrix, f),
        CliCommand::Potential(f) => (Command::Potential, f),
        CliCommand::Eigenfunction(f) => (Command::Eigenfunction, f),
        CliCommand::Ortho(f) => (Command::Ortho, f),
        CliCommand::Verify(f) => (Command::Verify, f),
    };
    let merged = match &flags.config {
        Some(path) => flags.clone().or(read_config_file(path)?),
        None => flags,
    };
    let config = RunConfig::from_flags(command, merged);
    config.params()?;
    Ok(config)
}

fn destination(config: &RunConfig, output_dir: Option<&Path>, ext: &str) -> Option<PathBuf> {
    config
        .output
        .clone()
        .or_else(|| output_dir.map(|d| d.join(format!("{}.{ext}", config.command.name()))))
}

/// Runs the CLI with explicit streams and output directory; returns the
/// exit code.
pub fn run_with_io<I, S>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write, output_dir: Option<&Path>) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let args: Vec<std::ffi::OsString> = args.into_iter().map(Into::into).collect();
    // help and version go to stdout with status 0
    if let Err(e) = Cli::try_parse_from(args.clone()) {
        if matches!(
            e.kind(),
            clap::error::ErrorKind::DisplayHelp
                | clap::error::ErrorKind::DisplayVersion
                | clap::error::ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand
        ) {
            let _ = write!(stdout, "{e}");
            let code = if e.kind() == clap::error::ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand { 2 } else { 0 };
            return code;
        }
    }
    let result = parse_config(args).and_then(|config| {
        let out = run_command(&config)?;
        match destination(&config, output_dir, out.extension) {
            Some(path) => std::fs::write(&path, &out.text)
                .map_err(|e| RunError::Io(format!("cannot write {}: {e}", path.display())))?,
            None => stdout
                .write_all(out.text.as_bytes())
                .map_err(|e| RunError::Io(e.to_string()))?,
        }
        Ok(out.passed)
    });
    match result {
        Ok(true) => 0,
        Ok(false) => {
            let _ = writeln!(stderr, "error[verification]: one or more checks failed; see report");
            1
        }
        Err(e) => {
            let _ = writeln!(stderr, "{}", e.line());
            e.exit_code()
        }
    }
}

/// Entry point of the binary: process arguments, stdio and
/// `$XMJACOBI_OUTPUT_DIR`.
pub fn main_with_env() -> i32 {
    let dir = std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from);
    run_with_io(
        std::env::args_os(),
        &mut std::io::stdout().lock(),
        &mut std::io::stderr().lock(),
        dir.as_deref(),
    )
}
