//! Command-line front end: argument parsing, config merging, dispatch.

mod commands;
mod config;
mod output;
mod validate;

use std::f64::consts::PI;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::closed_form::StringParams;
use crate::geometry::{Medium, UnitSystem, WedgeAngle, WedgeGeometry};
use crate::mode_sum::OracleRoute;
use crate::quadrature::{ExtrapolationSpec, QuadratureSpec};

pub use config::{ConfigFile, KNOWN_KEYS};
pub use output::{sig, Cell, Format, Report, SCHEMA_VERSION};
pub use validate::{run_checks, Check};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Numerical(String),
    #[error("output failed: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Numerical(_) | CliError::Io(_) => 2,
        }
    }
}

impl From<crate::Error> for CliError {
    fn from(e: crate::Error) -> Self {
        use crate::Error as E;
        match e {
            E::Geometry(_) | E::OnWall { .. } | E::NeedsRadialSplit { .. } | E::Coincident => {
                CliError::Usage(e.to_string())
            }
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<crate::error::GeometryError> for CliError {
    fn from(e: crate::error::GeometryError) -> Self {
        CliError::Usage(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "casimir-wedge",
    version,
    about = "Casimir stress, wall force and Casimir-Polder potential in a conducting wedge"
)]
pub struct Cli {
    /// Flat key = value file; flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Regularized stress tensor; closed form, optionally checked by the oracle.
    Tensor(TensorArgs),
    /// Normal force per unit area on a wall.
    Force(ForceArgs),
    /// Casimir-Polder potential and force on a polarizable particle.
    Polder(PolderArgs),
    /// Vacuum tensor around a straight cosmic string.
    String(StringArgs),
    /// Run the validation checks and report pass/fail.
    Validate(ValidateArgs),
    /// Grid of tensor, force or Casimir-Polder values.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct MediumArgs {
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub mu: Option<f64>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct NumericArgs {
    #[arg(long)]
    pub rel_tol: Option<f64>,
    #[arg(long)]
    pub abs_tol: Option<f64>,
    #[arg(long)]
    pub max_subdivisions: Option<usize>,
    /// Radial splittings relative to r, comma separated, coarsest first.
    #[arg(long)]
    pub splittings: Option<String>,
    /// Oracle route: images or mode-sum.
    #[arg(long)]
    pub route: Option<OracleRoute>,
}

#[derive(Debug, Clone, Args)]
pub struct TensorArgs {
    #[arg(long)]
    pub p: Option<u32>,
    /// Opening angle, e.g. `0.5`, `pi/3` or `2pi/5`; closed form only.
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<String>,
    /// Radii: a value, a comma list, or `start:stop:n[:log]`.
    #[arg(long)]
    pub r: Option<String>,
    /// Azimuth of the oracle evaluation as a fraction of alpha.
    #[arg(long)]
    pub theta_frac: Option<f64>,
    #[arg(long)]
    pub oracle: bool,
    #[command(flatten)]
    pub medium: MediumArgs,
    #[command(flatten)]
    pub numeric: NumericArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ForceArgs {
    #[arg(long)]
    pub p: Option<u32>,
    #[arg(long)]
    pub alpha: Option<String>,
    /// Distances from the cusp, optionally with a unit suffix (m, cm, mm, um, nm).
    #[arg(long)]
    pub r: Option<String>,
    #[arg(long)]
    pub units: Option<UnitSystem>,
    #[command(flatten)]
    pub medium: MediumArgs,
}

#[derive(Debug, Clone, Args)]
pub struct PolderArgs {
    #[arg(long)]
    pub p: Option<u32>,
    #[arg(long, hide = true)]
    pub alpha: Option<String>,
    #[arg(long)]
    pub r: Option<String>,
    /// Azimuths in radians.
    #[arg(long, conflicts_with = "theta_frac")]
    pub theta: Option<String>,
    /// Azimuths as fractions of alpha.
    #[arg(long)]
    pub theta_frac: Option<String>,
    /// Static polarizability.
    #[arg(long)]
    pub alpha0: Option<f64>,
    #[arg(long)]
    pub oracle: bool,
    #[command(flatten)]
    pub medium: MediumArgs,
    #[command(flatten)]
    pub numeric: NumericArgs,
}

#[derive(Debug, Clone, Args)]
pub struct StringArgs {
    #[arg(long, conflicts_with = "g_mu")]
    pub beta: Option<f64>,
    /// String tension G mu in [0, 1/4).
    #[arg(long)]
    pub g_mu: Option<f64>,
    #[arg(long)]
    pub r: Option<String>,
    /// Medium of the wedge the string is compared with.
    #[command(flatten)]
    pub medium: MediumArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ValidateArgs {
    /// Wedge parameters for the oracle checks, comma separated.
    #[arg(long)]
    pub p_set: Option<String>,
    #[command(flatten)]
    pub numeric: NumericArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Quantity {
    Tensor,
    Force,
    Polder,
}

impl std::str::FromStr for Quantity {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        <Self as clap::ValueEnum>::from_str(s, true)
    }
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub quantity: Option<Quantity>,
    /// Wedge parameters: a value, list or range.
    #[arg(long)]
    pub p: Option<String>,
    /// Opening angles (tensor and force only).
    #[arg(long)]
    pub alpha: Option<String>,
    #[arg(long)]
    pub r: Option<String>,
    #[arg(long)]
    pub theta_frac: Option<String>,
    #[arg(long)]
    pub units: Option<UnitSystem>,
    #[arg(long)]
    pub alpha0: Option<f64>,
    #[arg(long)]
    pub oracle: bool,
    #[command(flatten)]
    pub medium: MediumArgs,
    #[command(flatten)]
    pub numeric: NumericArgs,
}

/// Opening of the wedge as given on the command line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Opening {
    P(u32),
    Alpha(f64),
}

impl Opening {
    pub fn angle(&self) -> Result<WedgeAngle, CliError> {
        Ok(match self {
            Opening::P(p) => WedgeGeometry::new(*p)?.into(),
            Opening::Alpha(a) => WedgeAngle::new(*a)?,
        })
    }

    pub fn geometry(&self) -> Result<WedgeGeometry, CliError> {
        match self {
            Opening::P(p) => Ok(WedgeGeometry::new(*p)?),
            Opening::Alpha(_) => Err(CliError::Usage(
                "--alpha is accepted only by the closed-form tensor and force paths; \
                 oracle and Casimir-Polder paths need an integer --p"
                    .into(),
            )),
        }
    }
}

/// Azimuths, absolute or relative to the opening angle.
#[derive(Debug, Clone, PartialEq)]
pub enum Azimuths {
    Radians(Vec<f64>),
    Fractions(Vec<f64>),
}

/// Everything a command needs, after merging flags, config and defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub format: Format,
    pub openings: Vec<Opening>,
    pub medium: Medium,
    /// In natural units, or in the length unit of `units` for the force.
    pub radii: Vec<f64>,
    pub azimuths: Azimuths,
    pub units: UnitSystem,
    pub oracle: bool,
    pub route: OracleRoute,
    pub quad: QuadratureSpec,
    pub extrap: ExtrapolationSpec,
    pub alpha0: f64,
    pub string: Option<StringParams>,
    pub p_set: Vec<u32>,
    pub quantity: Option<Quantity>,
}

impl RunConfig {
    fn base(format: Format) -> Self {
        Self {
            format,
            openings: Vec::new(),
            medium: Medium::VACUUM,
            radii: vec![1.0],
            azimuths: Azimuths::Fractions(vec![0.5]),
            units: UnitSystem::Natural,
            oracle: false,
            route: OracleRoute::Images,
            quad: QuadratureSpec::default(),
            extrap: ExtrapolationSpec::default(),
            alpha0: 1.0,
            string: None,
            p_set: vec![2, 3, 4, 6],
            quantity: None,
        }
    }
}

/// Parses `pi`, `pi/3`, `2pi/5`, `2*pi/5` or a plain number.
pub fn parse_angle(s: &str) -> Result<f64, CliError> {
    let bad = || CliError::Usage(format!("cannot read angle {s:?}"));
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim().parse::<f64>().map_err(|_| bad())?),
        None => (s, 1.0),
    };
    let value = match num.strip_suffix("pi") {
        Some(c) => {
            let c = c.trim().trim_end_matches('*').trim();
            let coeff = if c.is_empty() { 1.0 } else { c.parse::<f64>().map_err(|_| bad())? };
            coeff * PI
        }
        None => num.parse::<f64>().map_err(|_| bad())?,
    };
    let value = value / den;
    if !value.is_finite() {
        return Err(bad());
    }
    Ok(value)
}

/// A length with an optional unit suffix, returned in the length unit of
/// `units`. Natural units take bare numbers only.
pub fn parse_length(s: &str, units: UnitSystem) -> Result<f64, CliError> {
    let s = s.trim();
    let split = s
        .find(|c: char| c.is_ascii_alphabetic() && c != 'e' && c != 'E')
        .unwrap_or(s.len());
    let (num, suffix) = s.split_at(split);
    let value: f64 = num
        .trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("cannot read length {s:?}")))?;
    if suffix.is_empty() {
        return Ok(value);
    }
    let metres = match suffix {
        "m" => 1.0,
        "cm" => 1e-2,
        "mm" => 1e-3,
        "um" => 1e-6,
        "nm" => 1e-9,
        other => return Err(CliError::Usage(format!("unknown length unit {other:?}"))),
    };
    let per_unit = match units {
        UnitSystem::Si => 1.0,
        UnitSystem::Cgs => 1e-2,
        UnitSystem::Natural => {
            return Err(CliError::Usage(format!(
                "length {s:?} has a unit but --units is natural"
            )))
        }
    };
    Ok(value * metres / per_unit)
}

/// A single value, a comma list, or `start:stop:n` (`:log` for geometric
/// spacing). The result is non-empty and strictly monotone.
pub fn parse_values<F>(s: &str, scalar: F) -> Result<Vec<f64>, CliError>
where
    F: Fn(&str) -> Result<f64, CliError>,
{
    let s = s.trim();
    let values = if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        let log = match parts.len() {
            3 => false,
            4 if parts[3].trim() == "log" => true,
            _ => return Err(CliError::Usage(format!("range {s:?} is not start:stop:n[:log]"))),
        };
        let (a, b) = (scalar(parts[0])?, scalar(parts[1])?);
        let n: usize = parts[2]
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("bad point count in {s:?}")))?;
        if n == 0 {
            return Err(CliError::Usage(format!("range {s:?} is empty")));
        }
        if log && !(a > 0.0 && b > 0.0) {
            return Err(CliError::Usage(format!("log range {s:?} needs positive ends")));
        }
        if n == 1 {
            vec![a]
        } else {
            (0..n)
                .map(|i| {
                    let t = i as f64 / (n - 1) as f64;
                    if log {
                        a * (b / a).powf(t)
                    } else {
                        a + (b - a) * t
                    }
                })
                .collect()
        }
    } else {
        s.split(',').map(|x| scalar(x.trim())).collect::<Result<Vec<_>, _>>()?
    };
    if values.is_empty() {
        return Err(CliError::Usage(format!("empty value list {s:?}")));
    }
    let up = values.windows(2).all(|w| w[1] > w[0]);
    let down = values.windows(2).all(|w| w[1] < w[0]);
    if !(up || down) {
        return Err(CliError::Usage(format!("values {s:?} are not strictly monotone")));
    }
    Ok(values)
}

fn plain(s: &str) -> Result<f64, CliError> {
    s.trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("cannot read number {s:?}")))
}

fn parse_p_list(s: &str) -> Result<Vec<u32>, CliError> {
    parse_values(s, plain)?
        .into_iter()
        .map(|x| {
            if x >= 1.0 && x.fract() == 0.0 && x <= f64::from(u32::MAX) {
                Ok(x as u32)
            } else {
                Err(CliError::Usage(format!("p must be a positive integer, got {x}")))
            }
        })
        .collect()
}

fn medium(args: &MediumArgs, cfg: &ConfigFile) -> Result<Medium, CliError> {
    let eps = cfg.pick_or(args.eps, "eps", 1.0)?;
    let mu = cfg.pick_or(args.mu, "mu", 1.0)?;
    Ok(Medium::new(eps, mu)?)
}

fn numerics(args: &NumericArgs, cfg: &ConfigFile, run: &mut RunConfig) -> Result<(), CliError> {
    if let Some(t) = cfg.pick(args.rel_tol, "rel-tol")? {
        run.quad.rel_tol = t;
    }
    if let Some(t) = cfg.pick(args.abs_tol, "abs-tol")? {
        run.quad.abs_tol = t;
    }
    if let Some(n) = cfg.pick(args.max_subdivisions, "max-subdivisions")? {
        run.quad.max_subdivisions = n;
    }
    if !(run.quad.rel_tol > 0.0 && run.quad.abs_tol > 0.0 && run.quad.max_subdivisions > 0) {
        return Err(CliError::Usage("tolerances and subdivision limit must be positive".into()));
    }
    if let Some(s) = cfg.pick(args.splittings.clone(), "splittings")? {
        let h = parse_values(&s, plain)?;
        if h.iter().any(|&x| !(x > 0.0 && x < 1.0)) {
            return Err(CliError::Usage(format!("splittings {s:?} must lie in (0, 1)")));
        }
        run.extrap.splittings = h;
        run.extrap.reach_fraction = None;
    }
    run.route = cfg.pick_or(args.route, "route", OracleRoute::Images)?;
    Ok(())
}

/// `--p` or `--alpha` (never both); flags replace the file's choice as a
/// whole.
fn opening(
    p: Option<String>,
    alpha: Option<String>,
    cfg: &ConfigFile,
) -> Result<Vec<Opening>, CliError> {
    let (p, alpha) = if p.is_some() || alpha.is_some() {
        (p, alpha)
    } else {
        (cfg.raw("p").map(str::to_string), cfg.raw("alpha").map(str::to_string))
    };
    match (p, alpha) {
        (Some(_), Some(_)) => Err(CliError::Usage("give either --p or --alpha, not both".into())),
        (Some(p), None) => Ok(parse_p_list(&p)?.into_iter().map(Opening::P).collect()),
        (None, Some(a)) => Ok(parse_values(&a, parse_angle)?
            .into_iter()
            .map(Opening::Alpha)
            .collect()),
        (None, None) => Err(CliError::Usage("the wedge needs --p or --alpha".into())),
    }
}

fn single(openings: Vec<Opening>) -> Result<Vec<Opening>, CliError> {
    if openings.len() != 1 {
        return Err(CliError::Usage("give a single wedge; use `sweep` for several".into()));
    }
    Ok(openings)
}

fn radii(
    flag: Option<String>,
    cfg: &ConfigFile,
    units: UnitSystem,
) -> Result<Vec<f64>, CliError> {
    match cfg.pick(flag, "r")? {
        Some(s) => parse_values(&s, |x| parse_length(x, units)),
        None => Ok(vec![1.0]),
    }
}

fn azimuths(
    theta: Option<String>,
    frac: Option<String>,
    cfg: &ConfigFile,
) -> Result<Azimuths, CliError> {
    let (theta, frac) = if theta.is_some() || frac.is_some() {
        (theta, frac)
    } else {
        (cfg.raw("theta").map(str::to_string), cfg.raw("theta-frac").map(str::to_string))
    };
    match (theta, frac) {
        (Some(_), Some(_)) => Err(CliError::Usage("give either --theta or --theta-frac".into())),
        (Some(t), None) => Ok(Azimuths::Radians(parse_values(&t, parse_angle)?)),
        (None, Some(f)) => Ok(Azimuths::Fractions(parse_values(&f, plain)?)),
        (None, None) => Ok(Azimuths::Fractions(vec![0.5])),
    }
}

/// Merge flags, the config file and defaults into a [`RunConfig`].
pub fn resolve(cli: &Cli) -> Result<RunConfig, CliError> {
    let cfg = match &cli.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    let default_format = match cli.command {
        Command::Sweep(_) => Format::Csv,
        _ => Format::Table,
    };
    let mut run = RunConfig::base(cfg.pick_or(cli.format, "format", default_format)?);
    match &cli.command {
        Command::Tensor(a) => {
            run.openings = single(opening(a.p.map(|p| p.to_string()), a.alpha.clone(), &cfg)?)?;
            run.medium = medium(&a.medium, &cfg)?;
            run.radii = radii(a.r.clone(), &cfg, UnitSystem::Natural)?;
            run.oracle = cfg.pick_bool(a.oracle, "oracle")?;
            run.azimuths = azimuths(None, a.theta_frac.map(|f| f.to_string()), &cfg)?;
            numerics(&a.numeric, &cfg, &mut run)?;
            if run.oracle {
                run.openings[0].geometry()?;
            }
        }
        Command::Force(a) => {
            run.openings = single(opening(a.p.map(|p| p.to_string()), a.alpha.clone(), &cfg)?)?;
            run.medium = medium(&a.medium, &cfg)?;
            run.units = cfg.pick_or(a.units, "units", UnitSystem::Natural)?;
            run.radii = radii(a.r.clone(), &cfg, run.units)?;
        }
        Command::Polder(a) => {
            run.openings = single(opening(a.p.map(|p| p.to_string()), a.alpha.clone(), &cfg)?)?;
            run.openings[0].geometry()?;
            run.medium = medium(&a.medium, &cfg)?;
            run.radii = radii(a.r.clone(), &cfg, UnitSystem::Natural)?;
            run.azimuths = azimuths(a.theta.clone(), a.theta_frac.clone(), &cfg)?;
            run.alpha0 = cfg.pick_or(a.alpha0, "alpha0", 1.0)?;
            run.oracle = cfg.pick_bool(a.oracle, "oracle")?;
            numerics(&a.numeric, &cfg, &mut run)?;
        }
        Command::String(a) => {
            let params = match (a.beta, a.g_mu) {
                (Some(b), None) => StringParams::from_beta(b)?,
                (None, Some(g)) => StringParams::from_g_mu(g)?,
                _ => match (cfg.get::<f64>("beta")?, cfg.get::<f64>("g-mu")?) {
                    (Some(b), None) => StringParams::from_beta(b)?,
                    (None, Some(g)) => StringParams::from_g_mu(g)?,
                    _ => return Err(CliError::Usage("give exactly one of --beta or --g-mu".into())),
                },
            };
            run.string = Some(params);
            run.medium = medium(&a.medium, &cfg)?;
            run.radii = radii(a.r.clone(), &cfg, UnitSystem::Natural)?;
        }
        Command::Validate(a) => {
            if let Some(s) = cfg.pick(a.p_set.clone(), "p-set")? {
                run.p_set = parse_p_list(&s)?;
            }
            numerics(&a.numeric, &cfg, &mut run)?;
        }
        Command::Sweep(a) => {
            let quantity = sweep_quantity(a, &cfg)?;
            run.quantity = Some(quantity);
            run.openings = opening(a.p.clone(), a.alpha.clone(), &cfg)?;
            run.medium = medium(&a.medium, &cfg)?;
            run.units = match quantity {
                Quantity::Force => cfg.pick_or(a.units, "units", UnitSystem::Natural)?,
                _ => UnitSystem::Natural,
            };
            run.radii = radii(a.r.clone(), &cfg, run.units)?;
            run.azimuths = azimuths(None, a.theta_frac.clone(), &cfg)?;
            run.alpha0 = cfg.pick_or(a.alpha0, "alpha0", 1.0)?;
            run.oracle = cfg.pick_bool(a.oracle, "oracle")?;
            numerics(&a.numeric, &cfg, &mut run)?;
            if run.oracle || quantity == Quantity::Polder {
                for o in &run.openings {
                    o.geometry()?;
                }
            }
        }
    }
    Ok(run)
}

fn sweep_quantity(a: &SweepArgs, cfg: &ConfigFile) -> Result<Quantity, CliError> {
    cfg.pick(a.quantity, "quantity")?
        .ok_or_else(|| CliError::Usage("sweep needs --quantity tensor|force|polder".into()))
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    let run = resolve(cli)?;
    let report = match &cli.command {
        Command::Tensor(_) => commands::cmd_tensor(&run)?,
        Command::Force(_) => commands::cmd_force(&run)?,
        Command::Polder(_) => commands::cmd_polder(&run)?,
        Command::String(_) => commands::cmd_string(&run)?,
        Command::Validate(_) => {
            let (report, ok) = validate::cmd_validate(&run)?;
            report.render(run.format, out)?;
            return if ok {
                Ok(())
            } else {
                Err(CliError::Numerical("one or more checks failed".into()))
            };
        }
        Command::Sweep(_) => commands::cmd_sweep(&run)?,
    };
    report.render(run.format, out)
}

/// Runs the CLI on `args` (program name first) and returns the exit code:
/// 0 on success, 1 for usage errors, 2 for numerical failures.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    0
                }
                _ => {
                    let _ = write!(err, "{text}");
                    1
                }
            };
        }
    };
    match execute(&cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
