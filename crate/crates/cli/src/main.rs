//! `dcl`: deformed coherent states from the command line.
//!
//! Eight subcommands cover the library surface: `state` and `criteria`
//! evaluate one state, `sweep`/`radius`/`threshold` scan classicality,
//! `wigner` samples phase space, and `weight`/`verify-moments` probe the
//! resolution-of-identity weight function. Figure presets (`--figure N`)
//! reproduce the published parameter sets.
//!
//! Exit codes: 0 success, 1 usage or I/O error, 2 domain error,
//! 3 convergence or quadrature error.
//!
//! Every flag can also come from a flat JSON config file (`--config`);
//! explicit command-line flags win. Outputs are deterministic: data files
//! carry no timestamps, run metadata goes to a `.meta.json` sidecar.

mod figures;
mod render;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dcl_core::identity::{verify_moments, weight_samples};
use dcl_core::moments::criteria_report;
use dcl_core::scan::{radius_of_coherence, sweep, threshold_parameter};
use dcl_core::wigner::{auto_grid, wigner_grid};
use dcl_core::{
    build_state_capped, Family, Nonlinearity, PhaseGrid, VerdictConfig, DEFAULT_MAX_CUTOFF,
};
use num_complex::Complex64;
use render::WignerPanel;
use serde::Serialize;
use serde_json::Value;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

/// Deformed coherent states: construction, non-classicality criteria,
/// classicality scans, and the moment-problem weight function.
#[derive(Parser)]
#[command(name = "dcl", version)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct GlobalArgs {
    /// Output path; '-' (the default) writes to standard output
    #[arg(short, long, global = true)]
    output: Option<String>,
    /// Output format; tabular commands default to csv, radius and
    /// threshold to json
    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,
    /// Flat JSON file supplying a default for any long flag
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Relative tail mass allowed when truncating a state
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Relative tolerance for adaptive quadrature
    #[arg(long, global = true)]
    quad_tol: Option<f64>,
    /// Hard cap on the adaptive Fock cutoff; falls back to the
    /// DCL_MAX_CUTOFF environment variable, then to the library default
    #[arg(long, global = true)]
    max_cutoff: Option<usize>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build one state and emit its coefficients and photon distribution
    State(PointArgs),
    /// Evaluate every non-classicality criterion for one state
    Criteria(PointArgs),
    /// Criteria verdicts over a (parameter, amplitude) grid
    Sweep(SweepArgs),
    /// Wigner function on a phase-space window
    Wigner(WignerArgs),
    /// Radius of coherence of the exponential deformation
    Radius(RadiusArgs),
    /// Smallest classical deformation parameter inside a bracket
    Threshold(ThresholdArgs),
    /// Moment-problem weight function sigma(x; 1, q^-2)
    Weight(WeightArgs),
    /// Compare recovered weight moments against their closed form
    VerifyMoments(VerifyMomentsArgs),
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl FormatArg {
    fn name(self) -> &'static str {
        match self {
            FormatArg::Csv => "csv",
            FormatArg::Json => "json",
        }
    }
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum FamilyArg {
    Identity,
    Beta,
    BetaImaginary,
    Lambda,
    QExp,
    QSinh,
}

impl FamilyArg {
    fn name(self) -> &'static str {
        match self {
            FamilyArg::Identity => "identity",
            FamilyArg::Beta => "beta",
            FamilyArg::BetaImaginary => "beta-imaginary",
            FamilyArg::Lambda => "lambda",
            FamilyArg::QExp => "q-exp",
            FamilyArg::QSinh => "q-sinh",
        }
    }
}

#[derive(Args)]
struct FamilySel {
    /// Nonlinearity family
    #[arg(long, value_enum)]
    family: Option<FamilyArg>,
    /// Deformation parameter for beta and beta-imaginary
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<f64>,
    /// Deformation parameter for lambda
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<f64>,
    /// Deformation parameter for q-exp and q-sinh
    #[arg(long, allow_hyphen_values = true)]
    q: Option<f64>,
}

#[derive(Args)]
struct PointArgs {
    #[command(flatten)]
    sel: FamilySel,
    /// Amplitude, as 're' or 're,im'
    #[arg(long, allow_hyphen_values = true)]
    z: Option<String>,
}

#[derive(Args)]
struct VerdictArgs {
    /// Classicality slack; criteria pass at value >= -eps
    #[arg(long)]
    eps: Option<f64>,
    /// Mean photon number under which a low g2 is excused as vacuum-like
    #[arg(long)]
    g2_vacuum_cut: Option<f64>,
    /// Demand |Q| <= eps (Poissonian) instead of Q >= -eps
    #[arg(long)]
    strict_poissonian: bool,
    /// Add Wigner-function negativity as an eighth criterion
    #[arg(long)]
    include_wigner: bool,
}

#[derive(Args)]
struct SweepArgs {
    /// Family whose parameter is scanned
    #[arg(long, value_enum)]
    family: Option<FamilyArg>,
    /// Figure preset (2 to 8, 10 to 17, or 19) instead of explicit lists
    #[arg(long)]
    figure: Option<u32>,
    /// Deformation parameter values, comma separated
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    params: Option<Vec<f64>>,
    /// Real amplitudes, comma separated
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    z_values: Option<Vec<f64>>,
    #[command(flatten)]
    verdict: VerdictArgs,
}

#[derive(Args)]
struct WignerArgs {
    #[command(flatten)]
    sel: FamilySel,
    /// Amplitude, as 're' or 're,im'
    #[arg(long, allow_hyphen_values = true)]
    z: Option<String>,
    /// Figure preset (9 or 18) instead of an explicit state and window
    #[arg(long)]
    figure: Option<u32>,
    /// Window bound; give all four bounds or none for the auto grid
    #[arg(long, allow_hyphen_values = true)]
    x_min: Option<f64>,
    /// Window bound
    #[arg(long, allow_hyphen_values = true)]
    x_max: Option<f64>,
    /// Window bound
    #[arg(long, allow_hyphen_values = true)]
    p_min: Option<f64>,
    /// Window bound
    #[arg(long, allow_hyphen_values = true)]
    p_max: Option<f64>,
    /// Grid points along x
    #[arg(long)]
    nx: Option<usize>,
    /// Grid points along p (default: same as nx)
    #[arg(long)]
    np: Option<usize>,
}

#[derive(Args)]
struct RadiusArgs {
    /// Exponential deformation strength
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<f64>,
    /// Amplitude probes per candidate radius
    #[arg(long)]
    probes: Option<usize>,
    #[command(flatten)]
    verdict: VerdictArgs,
}

#[derive(Args)]
struct ThresholdArgs {
    /// Family whose parameter is bisected
    #[arg(long, value_enum)]
    family: Option<FamilyArg>,
    /// Amplitude, as 're' or 're,im'
    #[arg(long, allow_hyphen_values = true)]
    z: Option<String>,
    /// Bracket bottom; the verdict must be non-classical here
    #[arg(long, allow_hyphen_values = true)]
    lo: Option<f64>,
    /// Bracket top; the verdict must be classical here
    #[arg(long, allow_hyphen_values = true)]
    hi: Option<f64>,
    #[command(flatten)]
    verdict: VerdictArgs,
}

#[derive(Args)]
struct WeightArgs {
    /// Weight parameters, comma separated (default: the figure's 2,5,10)
    #[arg(long, value_delimiter = ',')]
    q: Option<Vec<f64>>,
    /// Lowest sample point
    #[arg(long)]
    x_min: Option<f64>,
    /// Highest sample point
    #[arg(long)]
    x_max: Option<f64>,
    /// Number of evenly spaced sample points
    #[arg(long)]
    points: Option<usize>,
}

#[derive(Args)]
struct VerifyMomentsArgs {
    /// Weight parameter
    #[arg(long)]
    q: Option<f64>,
    /// Highest moment order checked
    #[arg(long)]
    n_max: Option<usize>,
}

enum CliError {
    Usage(String),
    Io(String),
    Core(dcl_core::Error),
}

impl From<dcl_core::Error> for CliError {
    fn from(e: dcl_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Io(m) => f.write_str(m),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 1,
            CliError::Core(dcl_core::Error::Domain(_) | dcl_core::Error::Bracket(_)) => 2,
            CliError::Core(dcl_core::Error::Convergence(_) | dcl_core::Error::Quadrature(_)) => 3,
        }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn finite(key: &str, x: f64) -> Result<f64, CliError> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(usage(format!("'{key}' must be finite, got {x}")))
    }
}

/// Values from the flat JSON config file, consulted whenever a flag is
/// absent from the command line.
struct Ctx {
    cfg: serde_json::Map<String, Value>,
}

impl Ctx {
    fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Ctx { cfg: serde_json::Map::new() });
        };
        let text = fs::read_to_string(path)
            .map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
        let v: Value = serde_json::from_str(&text)
            .map_err(|e| usage(format!("config {} is not valid JSON: {e}", path.display())))?;
        let Value::Object(cfg) = v else {
            return Err(usage(format!("config {} must be a JSON object", path.display())));
        };
        if let Some((k, _)) = cfg.iter().find(|(_, v)| v.is_object()) {
            return Err(usage(format!("config key '{k}' is nested; the file must be flat key-value")));
        }
        Ok(Ctx { cfg })
    }

    fn f64(&self, key: &str, cli: Option<f64>) -> Result<Option<f64>, CliError> {
        if let Some(x) = cli {
            return finite(key, x).map(Some);
        }
        match self.cfg.get(key) {
            None => Ok(None),
            Some(v) => {
                let x = v
                    .as_f64()
                    .ok_or_else(|| usage(format!("config key '{key}' must be a number")))?;
                finite(key, x).map(Some)
            }
        }
    }

    fn usize_(&self, key: &str, cli: Option<usize>) -> Result<Option<usize>, CliError> {
        if cli.is_some() {
            return Ok(cli);
        }
        match self.cfg.get(key) {
            None => Ok(None),
            Some(v) => v
                .as_u64()
                .and_then(|n| usize::try_from(n).ok())
                .map(Some)
                .ok_or_else(|| usage(format!("config key '{key}' must be a nonnegative integer"))),
        }
    }

    fn u32_(&self, key: &str, cli: Option<u32>) -> Result<Option<u32>, CliError> {
        Ok(self
            .usize_(key, cli.map(|n| n as usize))?
            .map(|n| u32::try_from(n).unwrap_or(u32::MAX)))
    }

    fn string(&self, key: &str, cli: Option<String>) -> Result<Option<String>, CliError> {
        if cli.is_some() {
            return Ok(cli);
        }
        match self.cfg.get(key) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s.clone())),
            Some(_) => Err(usage(format!("config key '{key}' must be a string"))),
        }
    }

    fn flag(&self, key: &str, cli: bool) -> Result<bool, CliError> {
        if cli {
            return Ok(true);
        }
        match self.cfg.get(key) {
            None => Ok(false),
            Some(Value::Bool(b)) => Ok(*b),
            Some(_) => Err(usage(format!("config key '{key}' must be a boolean"))),
        }
    }

    fn f64_list(&self, key: &str, cli: Option<Vec<f64>>) -> Result<Option<Vec<f64>>, CliError> {
        if let Some(v) = cli {
            return v.into_iter().map(|x| finite(key, x)).collect::<Result<Vec<_>, _>>().map(Some);
        }
        match self.cfg.get(key) {
            None => Ok(None),
            Some(Value::Number(_)) => Ok(Some(vec![self.f64(key, None)?.unwrap()])),
            Some(Value::Array(a)) => a
                .iter()
                .map(|v| {
                    v.as_f64()
                        .ok_or_else(|| usage(format!("config key '{key}' must hold numbers")))
                        .and_then(|x| finite(key, x))
                })
                .collect::<Result<Vec<_>, _>>()
                .map(Some),
            Some(_) => Err(usage(format!("config key '{key}' must be a number or number array"))),
        }
    }

    /// An amplitude: 're', 're,im', a bare number, or a two-number array.
    fn complex(&self, key: &str, cli: Option<&str>) -> Result<Option<Complex64>, CliError> {
        if let Some(s) = cli {
            return parse_complex(key, s).map(Some);
        }
        match self.cfg.get(key) {
            None => Ok(None),
            Some(Value::String(s)) => parse_complex(key, s).map(Some),
            Some(Value::Number(_)) => {
                Ok(Some(Complex64::new(self.f64(key, None)?.unwrap(), 0.0)))
            }
            Some(Value::Array(a)) if a.len() == 2 => {
                let mut parts = [0.0; 2];
                for (slot, v) in parts.iter_mut().zip(a) {
                    *slot = v
                        .as_f64()
                        .ok_or_else(|| usage(format!("config key '{key}' must hold numbers")))
                        .and_then(|x| finite(key, x))?;
                }
                Ok(Some(Complex64::new(parts[0], parts[1])))
            }
            Some(_) => Err(usage(format!(
                "config key '{key}' must be a number, 're,im' string, or [re, im] pair"
            ))),
        }
    }
}

fn parse_complex(key: &str, s: &str) -> Result<Complex64, CliError> {
    let bad = |_| usage(format!("'{key}' must be 're' or 're,im', got '{s}'"));
    let (re, im) = match s.split_once(',') {
        Some((a, b)) => (a.trim().parse::<f64>().map_err(bad)?, b.trim().parse::<f64>().map_err(bad)?),
        None => (s.trim().parse::<f64>().map_err(bad)?, 0.0),
    };
    Ok(Complex64::new(finite(key, re)?, finite(key, im)?))
}

/// Global settings after the config merge.
struct Globals {
    output: String,
    format: Option<FormatArg>,
    tol: f64,
    quad_tol: f64,
    cap: usize,
}

fn resolve_globals(g: &GlobalArgs, ctx: &Ctx) -> Result<Globals, CliError> {
    let output = ctx.string("output", g.output.clone())?.unwrap_or_else(|| "-".into());
    let format = match ctx.string("format", g.format.map(|f| f.name().to_string()))? {
        None => None,
        Some(s) => match s.as_str() {
            "csv" => Some(FormatArg::Csv),
            "json" => Some(FormatArg::Json),
            other => return Err(usage(format!("format must be csv or json, got '{other}'"))),
        },
    };
    let tol = ctx.f64("tol", g.tol)?.unwrap_or(1e-12);
    let quad_tol = ctx.f64("quad-tol", g.quad_tol)?.unwrap_or(1e-9);
    let cap = match ctx.usize_("max-cutoff", g.max_cutoff)? {
        Some(c) => c,
        None => match std::env::var("DCL_MAX_CUTOFF") {
            Ok(s) => s
                .trim()
                .parse()
                .map_err(|_| usage(format!("DCL_MAX_CUTOFF must be a nonnegative integer, got '{s}'")))?,
            Err(std::env::VarError::NotPresent) => DEFAULT_MAX_CUTOFF,
            Err(e) => return Err(usage(format!("DCL_MAX_CUTOFF: {e}"))),
        },
    };
    Ok(Globals { output, format, tol, quad_tol, cap })
}

fn resolve_family_arg(cli: Option<FamilyArg>, ctx: &Ctx) -> Result<FamilyArg, CliError> {
    if let Some(f) = cli {
        return Ok(f);
    }
    match ctx.cfg.get("family") {
        Some(Value::String(s)) => {
            <FamilyArg as ValueEnum>::from_str(&s.replace('_', "-"), true)
                .map_err(|_| usage(format!("unknown family '{s}'")))
        }
        Some(_) => Err(usage("config key 'family' must be a string")),
        None => Err(usage("missing --family")),
    }
}

/// The deformation spec for point commands. Parameter flags that do not
/// belong to the selected family are rejected; stray config keys are
/// ignored so one config file can serve several invocations.
fn resolve_spec(sel: &FamilySel, ctx: &Ctx) -> Result<Nonlinearity, CliError> {
    let family = resolve_family_arg(sel.family, ctx)?;
    let misfit = |flag: &str| {
        Err(usage(format!("--{flag} does not apply to family {}", family.name())))
    };
    let need = |key: &str, cli: Option<f64>| {
        ctx.f64(key, cli)?
            .ok_or_else(|| usage(format!("family {} needs --{key}", family.name())))
    };
    match family {
        FamilyArg::Identity => {
            if sel.beta.is_some() {
                return misfit("beta");
            }
            if sel.lambda.is_some() {
                return misfit("lambda");
            }
            if sel.q.is_some() {
                return misfit("q");
            }
            Ok(Nonlinearity::Identity)
        }
        FamilyArg::Beta | FamilyArg::BetaImaginary => {
            if sel.lambda.is_some() {
                return misfit("lambda");
            }
            if sel.q.is_some() {
                return misfit("q");
            }
            let beta = need("beta", sel.beta)?;
            Ok(match family {
                FamilyArg::Beta => Nonlinearity::BetaExp { beta },
                _ => Nonlinearity::BetaImaginary { beta },
            })
        }
        FamilyArg::Lambda => {
            if sel.beta.is_some() {
                return misfit("beta");
            }
            if sel.q.is_some() {
                return misfit("q");
            }
            Ok(Nonlinearity::LambdaExp { lambda: need("lambda", sel.lambda)? })
        }
        FamilyArg::QExp | FamilyArg::QSinh => {
            if sel.beta.is_some() {
                return misfit("beta");
            }
            if sel.lambda.is_some() {
                return misfit("lambda");
            }
            let q = need("q", sel.q)?;
            Ok(match family {
                FamilyArg::QExp => Nonlinearity::QExp { q },
                _ => Nonlinearity::QSinh { q },
            })
        }
    }
}

fn scan_family(f: FamilyArg) -> Result<Family, CliError> {
    match f {
        FamilyArg::Identity => Err(usage("family identity has no deformation parameter to scan")),
        FamilyArg::Beta => Ok(Family::Beta),
        FamilyArg::BetaImaginary => Ok(Family::BetaImaginary),
        FamilyArg::Lambda => Ok(Family::Lambda),
        FamilyArg::QExp => Ok(Family::QExp),
        FamilyArg::QSinh => Ok(Family::QSinh),
    }
}

fn resolve_verdict(v: &VerdictArgs, ctx: &Ctx, g: &Globals) -> Result<VerdictConfig, CliError> {
    let mut cfg = VerdictConfig::default();
    if let Some(eps) = ctx.f64("eps", v.eps)? {
        cfg.eps = eps;
    }
    if let Some(cut) = ctx.f64("g2-vacuum-cut", v.g2_vacuum_cut)? {
        cfg.g2_vacuum_cut = cut;
    }
    cfg.strict_poissonian = ctx.flag("strict-poissonian", v.strict_poissonian)?;
    cfg.include_wigner = ctx.flag("include-wigner", v.include_wigner)?;
    cfg.max_cutoff = Some(g.cap);
    Ok(cfg)
}

#[derive(Serialize)]
struct Sidecar {
    tool: &'static str,
    version: &'static str,
    subcommand: &'static str,
    format: &'static str,
    invocation: Vec<String>,
}

/// Write the rendered body to the output target; file targets also get a
/// `.meta.json` sidecar describing the run (deliberately timestamp-free,
/// so identical invocations stay byte-identical).
fn emit(g: &Globals, subcommand: &'static str, format: FormatArg, body: String) -> Result<(), CliError> {
    if g.output == "-" {
        use std::io::Write;
        return std::io::stdout()
            .write_all(body.as_bytes())
            .map_err(|e| CliError::Io(format!("writing to stdout: {e}")));
    }
    fs::write(&g.output, &body).map_err(|e| CliError::Io(format!("writing {}: {e}", g.output)))?;
    let meta = Sidecar {
        tool: "dcl",
        version: env!("CARGO_PKG_VERSION"),
        subcommand,
        format: format.name(),
        invocation: std::env::args().skip(1).collect(),
    };
    let path = format!("{}.meta.json", g.output);
    fs::write(&path, render::json(&meta)).map_err(|e| CliError::Io(format!("writing {path}: {e}")))
}

fn cmd_state(a: &PointArgs, ctx: &Ctx, g: &Globals) -> Result<(), CliError> {
    let spec = resolve_spec(&a.sel, ctx)?;
    let z = ctx.complex("z", a.z.as_deref())?.ok_or_else(|| usage("missing --z"))?;
    let state = build_state_capped(spec, z, g.tol, g.cap)?;
    let format = g.format.unwrap_or(FormatArg::Csv);
    let body = match format {
        FormatArg::Csv => render::state_csv(&state),
        FormatArg::Json => render::json(&state),
    };
    emit(g, "state", format, body)
}

fn cmd_criteria(a: &PointArgs, ctx: &Ctx, g: &Globals) -> Result<(), CliError> {
    let spec = resolve_spec(&a.sel, ctx)?;
    let z = ctx.complex("z", a.z.as_deref())?.ok_or_else(|| usage("missing --z"))?;
    let state = build_state_capped(spec, z, g.tol, g.cap)?;
    let report = criteria_report(&state);
    let format = g.format.unwrap_or(FormatArg::Csv);
    let body = match format {
        FormatArg::Csv => render::criteria_csv(&report),
        FormatArg::Json => render::json(&report),
    };
    emit(g, "criteria", format, body)
}

fn cmd_sweep(a: &SweepArgs, ctx: &Ctx, g: &Globals) -> Result<(), CliError> {
    let cfg = resolve_verdict(&a.verdict, ctx, g)?;
    let (family, params, zs) = match ctx.u32_("figure", a.figure)? {
        Some(n) => {
            if a.family.is_some() || a.params.is_some() || a.z_values.is_some() {
                return Err(usage("--figure replaces --family, --params and --z-values"));
            }
            let p = figures::sweep_preset(n).ok_or_else(|| {
                usage(format!(
                    "figure {n} is not a sweep figure (sweeps: 2-8, 10-17, 19; \
                     wigner: 9, 18; weight: 1)"
                ))
            })?;
            (p.family, p.params, p.zs)
        }
        None => {
            let family = scan_family(resolve_family_arg(a.family, ctx)?)?;
            let params = ctx
                .f64_list("params", a.params.clone())?
                .ok_or_else(|| usage("missing --params (or use --figure)"))?;
            let zs = ctx
                .f64_list("z-values", a.z_values.clone())?
                .ok_or_else(|| usage("missing --z-values (or use --figure)"))?;
            (family, params, zs)
        }
    };
    if params.is_empty() || zs.is_empty() {
        return Err(usage("the sweep grid is empty"));
    }
    let zs: Vec<Complex64> = zs.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let table = sweep(family, &params, &zs, &cfg);
    let format = g.format.unwrap_or(FormatArg::Csv);
    let body = match format {
        FormatArg::Csv => render::sweep_csv(&table),
        FormatArg::Json => render::json(&table),
    };
    emit(g, "sweep", format, body)
}

fn cmd_wigner(a: &WignerArgs, ctx: &Ctx, g: &Globals) -> Result<(), CliError> {
    let nx = ctx.usize_("nx", a.nx)?.unwrap_or(121);
    let np = ctx.usize_("np", a.np)?.unwrap_or(nx);
    let window = resolve_window(a, ctx)?;
    let format = g.format.unwrap_or(FormatArg::Csv);
    match ctx.u32_("figure", a.figure)? {
        Some(n) => {
            if a.sel.family.is_some() || a.z.is_some() || window.is_some() {
                return Err(usage("--figure replaces the state flags and the window"));
            }
            let preset = figures::wigner_preset(n)
                .ok_or_else(|| usage(format!("figure {n} is not a Wigner figure (9 or 18)")))?;
            let z = Complex64::new(preset.z, 0.0);
            let mut panels = Vec::with_capacity(preset.params.len());
            for &param in &preset.params {
                let state = build_state_capped(preset.family.spec(param), z, g.tol, g.cap)?;
                let grid = match preset.window {
                    Some((x0, x1, p0, p1)) => PhaseGrid::new(x0, x1, p0, p1, nx, np)?,
                    None => auto_grid(&state, nx)?,
                };
                panels.push(WignerPanel { param, grid: wigner_grid(&state, grid)? });
            }
            let body = match format {
                FormatArg::Csv => render::wigner_panels_csv(&panels),
                FormatArg::Json => render::json(&panels),
            };
            emit(g, "wigner", format, body)
        }
        None => {
            let spec = resolve_spec(&a.sel, ctx)?;
            let z = ctx.complex("z", a.z.as_deref())?.ok_or_else(|| usage("missing --z"))?;
            let state = build_state_capped(spec, z, g.tol, g.cap)?;
            let grid = match window {
                Some((x0, x1, p0, p1)) => PhaseGrid::new(x0, x1, p0, p1, nx, np)?,
                None => auto_grid(&state, nx)?,
            };
            let wg = wigner_grid(&state, grid)?;
            let body = match format {
                FormatArg::Csv => render::wigner_grid_csv(&wg),
                FormatArg::Json => render::json(&wg),
            };
            emit(g, "wigner", format, body)
        }
    }
}

fn resolve_window(a: &WignerArgs, ctx: &Ctx) -> Result<Option<(f64, f64, f64, f64)>, CliError> {
    let x0 = ctx.f64("x-min", a.x_min)?;
    let x1 = ctx.f64("x-max", a.x_max)?;
    let p0 = ctx.f64("p-min", a.p_min)?;
    let p1 = ctx.f64("p-max", a.p_max)?;
    match (x0, x1, p0, p1) {
        (None, None, None, None) => Ok(None),
        (Some(x0), Some(x1), Some(p0), Some(p1)) => Ok(Some((x0, x1, p0, p1))),
        _ => Err(usage("give all four of --x-min --x-max --p-min --p-max, or none")),
    }
}

fn cmd_radius(a: &RadiusArgs, ctx: &Ctx, g: &Globals) -> Result<(), CliError> {
    let beta = ctx.f64("beta", a.beta)?.ok_or_else(|| usage("missing --beta"))?;
    let probes = ctx.usize_("probes", a.probes)?.unwrap_or(16);
    let cfg = resolve_verdict(&a.verdict, ctx, g)?;
    let result = radius_of_coherence(beta, &cfg, probes)?;
    let format = g.format.unwrap_or(FormatArg::Json);
    let body = match format {
        FormatArg::Csv => render::radius_csv(&result),
        FormatArg::Json => render::json(&result),
    };
    emit(g, "radius", format, body)
}

fn cmd_threshold(a: &ThresholdArgs, ctx: &Ctx, g: &Globals) -> Result<(), CliError> {
    let family = scan_family(resolve_family_arg(a.family, ctx)?)?;
    let z = ctx.complex("z", a.z.as_deref())?.ok_or_else(|| usage("missing --z"))?;
    let lo = ctx.f64("lo", a.lo)?.ok_or_else(|| usage("missing --lo"))?;
    let hi = ctx.f64("hi", a.hi)?.ok_or_else(|| usage("missing --hi"))?;
    let cfg = resolve_verdict(&a.verdict, ctx, g)?;
    let result = threshold_parameter(family, z, &cfg, (lo, hi))?;
    let format = g.format.unwrap_or(FormatArg::Json);
    let body = match format {
        FormatArg::Csv => render::threshold_csv(&result),
        FormatArg::Json => render::json(&result),
    };
    emit(g, "threshold", format, body)
}

fn cmd_weight(a: &WeightArgs, ctx: &Ctx, g: &Globals) -> Result<(), CliError> {
    let qs = ctx
        .f64_list("q", a.q.clone())?
        .unwrap_or_else(|| figures::WEIGHT_FIGURE_QS.to_vec());
    let x_min = ctx.f64("x-min", a.x_min)?.unwrap_or(0.01);
    let x_max = ctx.f64("x-max", a.x_max)?.unwrap_or(50.0);
    let points = ctx.usize_("points", a.points)?.unwrap_or(400);
    if points == 0 {
        return Err(usage("--points must be at least 1"));
    }
    if x_max < x_min {
        return Err(usage("--x-max must be at least --x-min"));
    }
    let xs: Vec<f64> = if points == 1 {
        vec![x_min]
    } else {
        (0..points)
            .map(|i| x_min + (x_max - x_min) * i as f64 / (points - 1) as f64)
            .collect()
    };
    let samples = qs
        .iter()
        .map(|&q| weight_samples(q, &xs, g.quad_tol))
        .collect::<dcl_core::Result<Vec<_>>>()?;
    let format = g.format.unwrap_or(FormatArg::Csv);
    let body = match format {
        FormatArg::Csv => render::weight_csv(&samples),
        FormatArg::Json => render::json(&samples),
    };
    emit(g, "weight", format, body)
}

fn cmd_verify_moments(a: &VerifyMomentsArgs, ctx: &Ctx, g: &Globals) -> Result<(), CliError> {
    let q = ctx.f64("q", a.q)?.ok_or_else(|| usage("missing --q"))?;
    let n_max = ctx.usize_("n-max", a.n_max)?.unwrap_or(8);
    let report = verify_moments(q, n_max, g.quad_tol)?;
    let format = g.format.unwrap_or(FormatArg::Csv);
    let body = match format {
        FormatArg::Csv => render::moments_csv(&report),
        FormatArg::Json => render::json(&report),
    };
    emit(g, "verify-moments", format, body)
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let ctx = Ctx::load(cli.global.config.as_deref())?;
    let g = resolve_globals(&cli.global, &ctx)?;
    match &cli.cmd {
        Cmd::State(a) => cmd_state(a, &ctx, &g),
        Cmd::Criteria(a) => cmd_criteria(a, &ctx, &g),
        Cmd::Sweep(a) => cmd_sweep(a, &ctx, &g),
        Cmd::Wigner(a) => cmd_wigner(a, &ctx, &g),
        Cmd::Radius(a) => cmd_radius(a, &ctx, &g),
        Cmd::Threshold(a) => cmd_threshold(a, &ctx, &g),
        Cmd::Weight(a) => cmd_weight(a, &ctx, &g),
        Cmd::VerifyMoments(a) => cmd_verify_moments(a, &ctx, &g),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("dcl: {e}");
            ExitCode::from(e.code())
        }
    }
}
