//! isospec: tabulate classical and deformed special functions, verify the
//! deformation identities, and query admissible-gamma bounds.
//!
//! Exit codes: 0 success (verify: all identities pass), 1 verification
//! failures, 2 argument errors, 3 inadmissible gamma, 4 numerical failure.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use isospec::verify::{SuiteConfig, SuiteResult};
use isospec::{
    default_families, default_grid, run_identity, run_suite, spec_for, DeformationContext,
    Error as LibError, FamilyId, GridSpec, Identity, Spacing,
};

const TOLERANCE_SCALE_ENV: &str = "ISOSPEC_TOLERANCE_SCALE";

#[derive(Parser)]
#[command(
    name = "isospec",
    version,
    about = "One-parameter isospectral deformations of classical special functions",
    after_help = "Family parameters default to: laguerre alpha=0.5, \
                  jacobi-function alpha=2 lambda=1.5, jacobi-polynomial alpha=0.5 beta=-0.25.\n\
                  ISOSPEC_TOLERANCE_SCALE multiplies all default tolerances (diagnostic use)."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate psi_n, psi_{n+1}, b and psi~_{n+1} over a grid
    Tabulate(TabulateArgs),
    /// Run the identity-verification suite
    Verify(VerifyArgs),
    /// Print admissible-gamma bounds with quadrature cross-checks
    Bounds(BoundsArgs),
    /// Run a single identity and report its residuals
    Residual(ResidualArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
}

#[derive(Args)]
struct CommonArgs {
    /// Flat key = value file mirroring the long flags; flags take precedence
    #[arg(long)]
    config: Option<PathBuf>,
    /// csv or json
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
    /// Output path (default: standard output)
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct FamilyArgs {
    /// hermite | laguerre | legendre | chebyshev | jacobi-function |
    /// jacobi-polynomial | bessel
    #[arg(long)]
    family: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<f64>,
}

#[derive(Args)]
struct TabulateArgs {
    #[command(flatten)]
    family: FamilyArgs,
    /// Index n of the classical eigenfunction
    #[arg(long)]
    n: Option<u32>,
    /// Deformation parameter; omit for classical columns only
    #[arg(long, allow_hyphen_values = true)]
    gamma: Option<f64>,
    /// Grid as lo:hi:count
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
    /// Also emit derivative columns
    #[arg(long)]
    derivatives: bool,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct VerifyArgs {
    /// "all", or a comma-separated family list; empty runs nothing
    #[arg(long)]
    families: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<f64>,
    /// Largest index n to sweep
    #[arg(long)]
    n_max: Option<u32>,
    /// Admissible gamma samples per (family, n)
    #[arg(long)]
    gammas: Option<usize>,
    /// Seed for the deterministic sweep
    #[arg(long)]
    seed: Option<u64>,
    /// Grid points per identity cell
    #[arg(long)]
    grid_count: Option<usize>,
    /// Per-identity tolerance override, identity=value (repeatable);
    /// config-file equivalent: tol-<identity> = value
    #[arg(long = "tol", value_name = "IDENTITY=VALUE")]
    tolerances: Vec<String>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct BoundsArgs {
    #[command(flatten)]
    family: FamilyArgs,
    #[arg(long)]
    n_max: Option<u32>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct ResidualArgs {
    /// One of: classical-ode, ladder-raise, ladder-lower, delta-consistency,
    /// riccati-b, factorization-bb, annihilation-ltilde, eigenvalue-bb,
    /// gamma-bound-quadrature, limit-gamma-inf, bessel-closed-form,
    /// bessel-gamma-zero, c-ladder-plus, c-ladder-minus
    #[arg(long)]
    identity: Option<String>,
    #[command(flatten)]
    family: FamilyArgs,
    #[arg(long)]
    n: Option<u32>,
    #[arg(long, allow_hyphen_values = true)]
    gamma: Option<f64>,
    /// Grid as lo:hi:count (default: the family's verification window x 400)
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
    /// Tolerance override (default: the identity's pinned tolerance)
    #[arg(long)]
    tol: Option<f64>,
    #[command(flatten)]
    common: CommonArgs,
}

/// An error carrying its process exit code.
struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn args(message: impl Into<String>) -> Self {
        CliError {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<LibError> for CliError {
    fn from(e: LibError) -> Self {
        let code = match e {
            LibError::InadmissibleGamma { .. } => 3,
            LibError::DenominatorVanishes { .. }
            | LibError::Convergence { .. }
            | LibError::NonFinite { .. } => 4,
            _ => 2,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Tabulate(args) => cmd_tabulate(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Bounds(args) => cmd_bounds(args),
        Command::Residual(args) => cmd_residual(args),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

// ---------------------------------------------------------------------------
// config-file support

struct ConfigFile {
    values: BTreeMap<String, String>,
}

impl ConfigFile {
    fn load(path: Option<&PathBuf>) -> CliResult<Self> {
        let mut values = BTreeMap::new();
        if let Some(path) = path {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::args(format!("cannot read config {path:?}: {e}")))?;
            for (lineno, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let (key, value) = line.split_once('=').ok_or_else(|| {
                    CliError::args(format!("config line {} is not key = value", lineno + 1))
                })?;
                values.insert(key.trim().to_string(), value.trim().to_string());
            }
        }
        Ok(ConfigFile { values })
    }

    fn get<T: FromStr>(&self, key: &str) -> CliResult<Option<T>> {
        match self.values.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse::<T>()
                .map(Some)
                .map_err(|_| CliError::args(format!("config value {key} = {raw} is invalid"))),
        }
    }
}

/// Flag beats config beats default.
fn resolve<T: FromStr>(flag: Option<T>, cfg: &ConfigFile, key: &str) -> CliResult<Option<T>> {
    match flag {
        Some(v) => Ok(Some(v)),
        None => cfg.get(key),
    }
}

fn tolerance_scale() -> CliResult<f64> {
    match std::env::var(TOLERANCE_SCALE_ENV) {
        Err(_) => Ok(1.0),
        Ok(raw) => {
            let v: f64 = raw.parse().map_err(|_| {
                CliError::args(format!("{TOLERANCE_SCALE_ENV} = {raw} is not a number"))
            })?;
            if v > 0.0 && v.is_finite() {
                Ok(v)
            } else {
                Err(CliError::args(format!(
                    "{TOLERANCE_SCALE_ENV} must be a positive finite number"
                )))
            }
        }
    }
}

// ---------------------------------------------------------------------------
// argument assembly

fn parse_family(
    name: &str,
    alpha: Option<f64>,
    beta: Option<f64>,
    lambda: Option<f64>,
) -> CliResult<FamilyId<f64>> {
    let id = match name {
        "hermite" => FamilyId::Hermite,
        "laguerre" => FamilyId::Laguerre {
            alpha: alpha.unwrap_or(0.5),
        },
        "legendre" => FamilyId::Legendre,
        "chebyshev" => FamilyId::Chebyshev,
        "jacobi-function" => FamilyId::JacobiFunction {
            alpha: alpha.unwrap_or(2.0),
            lambda: lambda.unwrap_or(1.5),
        },
        "jacobi-polynomial" => FamilyId::JacobiPolynomial {
            alpha: alpha.unwrap_or(0.5),
            beta: beta.unwrap_or(-0.25),
        },
        "bessel" => FamilyId::Bessel,
        other => {
            return Err(CliError::args(format!(
                "unknown family {other:?} (expected hermite, laguerre, legendre, chebyshev, \
                 jacobi-function, jacobi-polynomial or bessel)"
            )))
        }
    };
    id.validate()?;
    Ok(id)
}

fn family_from(args: &FamilyArgs, cfg: &ConfigFile) -> CliResult<FamilyId<f64>> {
    let name: String = resolve(args.family.clone(), cfg, "family")?
        .ok_or_else(|| CliError::args("--family is required"))?;
    let alpha = resolve(args.alpha, cfg, "alpha")?;
    let beta = resolve(args.beta, cfg, "beta")?;
    let lambda = resolve(args.lambda, cfg, "lambda")?;
    parse_family(&name, alpha, beta, lambda)
}

fn parse_grid(raw: &str) -> CliResult<GridSpec<f64>> {
    let parts: Vec<&str> = raw.split(':').collect();
    if parts.len() != 3 {
        return Err(CliError::args(format!(
            "grid {raw:?} must have the form lo:hi:count"
        )));
    }
    let lo: f64 = parts[0]
        .parse()
        .map_err(|_| CliError::args(format!("grid lo {:?} is not a number", parts[0])))?;
    let hi: f64 = parts[1]
        .parse()
        .map_err(|_| CliError::args(format!("grid hi {:?} is not a number", parts[1])))?;
    let count: usize = parts[2]
        .parse()
        .map_err(|_| CliError::args(format!("grid count {:?} is not an integer", parts[2])))?;
    let grid = GridSpec {
        lo,
        hi,
        count,
        spacing: Spacing::Uniform,
    };
    grid.validate()?;
    Ok(grid)
}

fn grid_from(
    raw: Option<String>,
    cfg: &ConfigFile,
    family: &FamilyId<f64>,
    default_count: usize,
) -> CliResult<GridSpec<f64>> {
    match resolve(raw, cfg, "grid")? {
        Some(s) => parse_grid(&s),
        None => Ok(default_grid(family, default_count)),
    }
}

fn format_from(
    flag: Option<OutputFormat>,
    cfg: &ConfigFile,
    default: OutputFormat,
) -> CliResult<OutputFormat> {
    match resolve(
        flag.map(|f| match f {
            OutputFormat::Csv => "csv".to_string(),
            OutputFormat::Json => "json".to_string(),
        }),
        cfg,
        "format",
    )? {
        None => Ok(default),
        Some(s) => match s.as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(CliError::args(format!("unknown format {other:?}"))),
        },
    }
}

fn write_output(common: &CommonArgs, cfg: &ConfigFile, text: &str) -> CliResult<()> {
    let path = match &common.output {
        Some(p) => Some(p.clone()),
        None => cfg.get::<PathBuf>("output")?,
    };
    match path {
        Some(p) => fs::write(&p, text)
            .map_err(|e| CliError::args(format!("cannot write {p:?}: {e}"))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// 17 significant digits: parses back to the identical f64.
fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn ensure_finite(values: &[f64]) -> CliResult<()> {
    for &v in values {
        if !v.is_finite() {
            return Err(CliError::from(LibError::NonFinite { x: v }));
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// tabulate

#[derive(Serialize)]
struct Row {
    x: f64,
    psi_n: f64,
    psi_np1: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    b: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    psi_tilde: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    psi_n_d1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    psi_n_d2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    psi_tilde_d1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    psi_tilde_d2: Option<f64>,
}

fn cmd_tabulate(args: TabulateArgs) -> CliResult<u8> {
    let cfg = ConfigFile::load(args.common.config.as_ref())?;
    let family = family_from(&args.family, &cfg)?;
    let n = resolve(args.n, &cfg, "n")?.ok_or_else(|| CliError::args("--n is required"))?;
    let gamma = resolve(args.gamma, &cfg, "gamma")?;
    let derivatives = args.derivatives || cfg.get::<bool>("derivatives")?.unwrap_or(false);
    let grid = grid_from(args.grid, &cfg, &family, 101)?;
    let format = format_from(args.common.format, &cfg, OutputFormat::Csv)?;

    let ctx = match gamma {
        Some(g) => Some(DeformationContext::new(family, n, g, &grid)?),
        None => None,
    };

    let mut rows = Vec::with_capacity(grid.count);
    for x in grid.points() {
        let en = isospec::eval_classical(&family, n, x)?;
        let en1 = isospec::eval_classical(&family, n + 1, x)?;
        let mut row = Row {
            x,
            psi_n: en.value,
            psi_np1: en1.value,
            b: None,
            psi_tilde: None,
            psi_n_d1: derivatives.then_some(en.d1),
            psi_n_d2: derivatives.then_some(en.d2),
            psi_tilde_d1: None,
            psi_tilde_d2: None,
        };
        if let Some(ctx) = &ctx {
            let d = ctx.eval_psi_tilde(x)?;
            row.b = Some(d.b);
            row.psi_tilde = Some(d.psi_tilde);
            row.psi_tilde_d1 = derivatives.then_some(d.psi_tilde_d1);
            row.psi_tilde_d2 = derivatives.then_some(d.psi_tilde_d2);
        }
        let mut check = vec![row.x, row.psi_n, row.psi_np1];
        check.extend(row.b.iter().chain(&row.psi_tilde));
        check.extend(row.psi_n_d1.iter().chain(&row.psi_n_d2));
        check.extend(row.psi_tilde_d1.iter().chain(&row.psi_tilde_d2));
        ensure_finite(&check)?;
        rows.push(row);
    }

    let text = match format {
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(&rows)
                .map_err(|e| CliError::args(format!("serialization failed: {e}")))?;
            s.push('\n');
            s
        }
        OutputFormat::Csv => {
            let deformed = ctx.is_some();
            let mut header = vec!["x", "psi_n", "psi_np1"];
            if deformed {
                header.extend(["b", "psi_tilde"]);
            }
            if derivatives {
                header.extend(["psi_n_d1", "psi_n_d2"]);
                if deformed {
                    header.extend(["psi_tilde_d1", "psi_tilde_d2"]);
                }
            }
            let mut s = header.join(",");
            s.push('\n');
            for r in &rows {
                let mut cols = vec![fmt_f64(r.x), fmt_f64(r.psi_n), fmt_f64(r.psi_np1)];
                if deformed {
                    cols.push(fmt_f64(r.b.unwrap()));
                    cols.push(fmt_f64(r.psi_tilde.unwrap()));
                }
                if derivatives {
                    cols.push(fmt_f64(r.psi_n_d1.unwrap()));
                    cols.push(fmt_f64(r.psi_n_d2.unwrap()));
                    if deformed {
                        cols.push(fmt_f64(r.psi_tilde_d1.unwrap()));
                        cols.push(fmt_f64(r.psi_tilde_d2.unwrap()));
                    }
                }
                let _ = writeln!(s, "{}", cols.join(","));
            }
            s
        }
    };
    write_output(&args.common, &cfg, &text)?;
    Ok(0)
}

// ---------------------------------------------------------------------------
// verify

fn families_from_list(args: &VerifyArgs, cfg: &ConfigFile) -> CliResult<Vec<FamilyId<f64>>> {
    let raw: String = resolve(args.families.clone(), cfg, "families")?
        .ok_or_else(|| CliError::args("--families is required (a list, or \"all\")"))?;
    let raw = raw.trim();
    if raw.is_empty() {
        return Ok(Vec::new());
    }
    if raw == "all" {
        return Ok(default_families());
    }
    let alpha = resolve(args.alpha, cfg, "alpha")?;
    let beta = resolve(args.beta, cfg, "beta")?;
    let lambda = resolve(args.lambda, cfg, "lambda")?;
    raw.split(',')
        .map(|name| parse_family(name.trim(), alpha, beta, lambda))
        .collect()
}

fn tolerance_overrides(
    flags: &[String],
    cfg: &ConfigFile,
) -> CliResult<Vec<(Identity, f64)>> {
    let mut out = Vec::new();
    // config file entries: tol-<identity> = value
    for identity in Identity::ALL {
        if let Some(v) = cfg.get::<f64>(&format!("tol-{}", identity.name()))? {
            out.push((identity, v));
        }
    }
    // flags win over config entries
    for raw in flags {
        let (name, value) = raw.split_once('=').ok_or_else(|| {
            CliError::args(format!("--tol {raw:?} must have the form identity=value"))
        })?;
        let identity = Identity::parse(name.trim())
            .ok_or_else(|| CliError::args(format!("unknown identity {name:?} in --tol")))?;
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| CliError::args(format!("--tol value {value:?} is not a number")))?;
        out.retain(|(id, _)| *id != identity);
        out.push((identity, value));
    }
    Ok(out)
}

fn cmd_verify(args: VerifyArgs) -> CliResult<u8> {
    let cfg = ConfigFile::load(args.common.config.as_ref())?;
    let families = families_from_list(&args, &cfg)?;
    let defaults = SuiteConfig::default();
    let suite = SuiteConfig {
        n_max: resolve(args.n_max, &cfg, "n-max")?.unwrap_or(defaults.n_max),
        gammas_per_family: resolve(args.gammas, &cfg, "gammas")?
            .unwrap_or(defaults.gammas_per_family),
        seed: resolve(args.seed, &cfg, "seed")?.unwrap_or(defaults.seed),
        grid_count: resolve(args.grid_count, &cfg, "grid-count")?.unwrap_or(defaults.grid_count),
        tolerance_scale: tolerance_scale()?,
        tolerance_overrides: tolerance_overrides(&args.tolerances, &cfg)?,
        ..defaults
    };
    let format = format_from(args.common.format, &cfg, OutputFormat::Json)?;

    let result: SuiteResult<f64> = run_suite(&families, &suite);
    let passed = result.reports.iter().filter(|r| r.pass).count();
    let failed = result.reports.len() - passed;
    eprintln!(
        "{} reports: {} passed, {} failed, {} cells skipped as not applicable",
        result.reports.len(),
        passed,
        failed,
        result.skipped.len()
    );

    let text = match format {
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(&result.reports)
                .map_err(|e| CliError::args(format!("serialization failed: {e}")))?;
            s.push('\n');
            s
        }
        OutputFormat::Csv => reports_csv(&result.reports),
    };
    write_output(&args.common, &cfg, &text)?;
    Ok(if failed == 0 { 0 } else { 1 })
}

fn family_label(f: &FamilyId<f64>) -> String {
    match f {
        FamilyId::Laguerre { alpha } => format!("laguerre(alpha={alpha})"),
        FamilyId::JacobiFunction { alpha, lambda } => {
            format!("jacobi-function(alpha={alpha},lambda={lambda})")
        }
        FamilyId::JacobiPolynomial { alpha, beta } => {
            format!("jacobi-polynomial(alpha={alpha},beta={beta})")
        }
        other => other.name().to_string(),
    }
}

fn reports_csv(reports: &[isospec::ResidualReport<f64>]) -> String {
    let mut s = String::from(
        "identity,family,n,gamma,max_abs_residual,max_rel_residual,scale,pass,tolerance\n",
    );
    for r in reports {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{}",
            r.identity.name(),
            family_label(&r.family),
            r.n,
            r.gamma.map(fmt_f64).unwrap_or_default(),
            fmt_f64(r.max_abs_residual),
            fmt_f64(r.max_rel_residual),
            fmt_f64(r.scale),
            r.pass,
            fmt_f64(r.tolerance),
        );
    }
    s
}

// ---------------------------------------------------------------------------
// bounds

#[derive(Serialize)]
struct BoundRow {
    n: u32,
    kind: isospec::GammaBoundKind,
    boundary: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    quadrature: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    discrepancy: Option<f64>,
}

fn cmd_bounds(args: BoundsArgs) -> CliResult<u8> {
    let cfg = ConfigFile::load(args.common.config.as_ref())?;
    let family = family_from(&args.family, &cfg)?;
    let n_max = resolve(args.n_max, &cfg, "n-max")?.unwrap_or(4);
    let format = format_from(args.common.format, &cfg, OutputFormat::Csv)?;
    let spec = spec_for(family)?;

    let quad_cfg = isospec::QuadConfig::default();
    let mut rows = Vec::new();
    for n in 0..=n_max {
        spec.deformation_well_posed(n)?;
        let bound = spec.gamma_bound(n);
        let quadrature = spec.boundary_integral(n, &quad_cfg)?;
        rows.push(BoundRow {
            n,
            kind: bound.kind,
            boundary: bound.boundary,
            quadrature,
            discrepancy: quadrature.map(|q| (q - bound.boundary).abs()),
        });
    }

    let text = match format {
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(&rows)
                .map_err(|e| CliError::args(format!("serialization failed: {e}")))?;
            s.push('\n');
            s
        }
        OutputFormat::Csv => {
            let mut s = String::from("n,kind,boundary,quadrature,discrepancy\n");
            for r in &rows {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{}",
                    r.n,
                    serde_json::to_value(r.kind)
                        .ok()
                        .and_then(|v| v.as_str().map(str::to_string))
                        .unwrap_or_default(),
                    fmt_f64(r.boundary),
                    r.quadrature.map(fmt_f64).unwrap_or_default(),
                    r.discrepancy.map(fmt_f64).unwrap_or_default(),
                );
            }
            s
        }
    };
    write_output(&args.common, &cfg, &text)?;
    Ok(0)
}

// ---------------------------------------------------------------------------
// residual

fn cmd_residual(args: ResidualArgs) -> CliResult<u8> {
    let cfg = ConfigFile::load(args.common.config.as_ref())?;
    let name: String = resolve(args.identity.clone(), &cfg, "identity")?
        .ok_or_else(|| CliError::args("--identity is required"))?;
    let identity = Identity::parse(&name)
        .ok_or_else(|| CliError::args(format!("unknown identity {name:?}")))?;
    let family = family_from(&args.family, &cfg)?;
    let n = resolve(args.n, &cfg, "n")?.ok_or_else(|| CliError::args("--n is required"))?;
    let gamma = resolve(args.gamma, &cfg, "gamma")?;
    let grid = grid_from(args.grid, &cfg, &family, 400)?;
    let tol = resolve(args.tol, &cfg, "tol")?
        .unwrap_or_else(|| identity.default_tolerance())
        * tolerance_scale().unwrap_or(1.0);
    let format = format_from(args.common.format, &cfg, OutputFormat::Json)?;

    if identity.requires_gamma() && gamma.is_none() {
        return Err(CliError::args(format!(
            "identity {} requires --gamma",
            identity.name()
        )));
    }

    let report = run_identity(identity, &family, n, gamma, &grid, tol)?;
    let pass = report.pass;
    let text = match format {
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(&report)
                .map_err(|e| CliError::args(format!("serialization failed: {e}")))?;
            s.push('\n');
            s
        }
        OutputFormat::Csv => reports_csv(std::slice::from_ref(&report)),
    };
    write_output(&args.common, &cfg, &text)?;
    Ok(if pass { 0 } else { 1 })
}
