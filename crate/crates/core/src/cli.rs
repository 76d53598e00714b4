//! Experiment runner: configuration, dispatch, and reproducible outputs.
//!
//! A run is described by an [`ExperimentConfig`], assembled from defaults, an
//! optional flat `key=value` config file, and command-line flags (flags win,
//! with a warning on stderr). Unknown keys are rejected. Every run writes a
//! `manifest.json` echoing the resolved configuration and tool version next
//! to its data files, and all randomness is seeded, so identical
//! configurations produce byte-identical CSV output.

use crate::diagnostics::{ck_bound, fit_decay_rate};
use crate::equilibria::{beta_from_mass, EquilibriumParams};
use crate::error::{Error, Result};
use crate::field::{Field2D, Grid2D};
use crate::grid::{ProfileKind, RadialGrid, RadialProfile, TWO_PI};
use crate::radial_solver::{decay_history, solve_radial_exact, RadialInitialCondition};
use clap::Parser;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

pub const VALID_MODES: &[&str] = &[
    "equilibrium",
    "radial-exact",
    "numeric-2d",
    "convergence-study",
    "validate",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Equilibrium,
    RadialExact,
    Numeric2d,
    ConvergenceStudy,
    Validate,
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "equilibrium" => Ok(Mode::Equilibrium),
            "radial-exact" => Ok(Mode::RadialExact),
            "numeric-2d" => Ok(Mode::Numeric2d),
            "convergence-study" => Ok(Mode::ConvergenceStudy),
            "validate" => Ok(Mode::Validate),
            other => Err(Error::Config(format!(
                "unknown mode `{other}`; valid modes: {}",
                VALID_MODES.join(", ")
            ))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Mode::Equilibrium => "equilibrium",
            Mode::RadialExact => "radial-exact",
            Mode::Numeric2d => "numeric-2d",
            Mode::ConvergenceStudy => "convergence-study",
            Mode::Validate => "validate",
        };
        write!(f, "{s}")
    }
}

/// Command-line flags. Values given here override the config file.
#[derive(Parser, Debug, Default)]
#[command(
    name = "befp",
    about = "Exact and finite-volume solvers for the 2D Bose-Einstein Fokker-Planck equation",
    after_help = "Initial conditions (--ic):\n  \
        dirac:mass=M\n  \
        gaussian:center=C,width=W,mass=M        (radial bump)\n  \
        equilibrium:beta=B\n  \
        fundamental:t0=T\n  \
        random:bumps=K,mass=M                   (seeded bump mixture)\n  \
        file:PATH                               (profile CSV)\n  \
        gaussian2d:x=X,y=Y,width=W,mass=M       (numeric-2d; join terms with '+')\n\n\
        Times (--times): comma list `0.5,1,2` or linspace `1..6:11`.\n\
        Exit codes: 0 ok, 1 config error, 2 numerical abort, 3 validation failure."
)]
pub struct CliArgs {
    /// Flat key=value config file; flags override its entries.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// equilibrium | radial-exact | numeric-2d | convergence-study | validate
    #[arg(long)]
    pub mode: Option<String>,
    /// Initial condition descriptor (see --help for forms).
    #[arg(long)]
    pub ic: Option<String>,
    /// Total mass, where the mode needs one (e.g. equilibrium mode).
    #[arg(long)]
    pub mass: Option<f64>,
    /// Equilibrium parameter β > 1.
    #[arg(long)]
    pub beta: Option<f64>,
    /// Cells per side for the 2D solver; a comma list for convergence studies.
    #[arg(long, value_delimiter = ',')]
    pub grid_n: Option<Vec<usize>>,
    /// Half-width L of the square domain [-L, L]².
    #[arg(long)]
    pub grid_l: Option<f64>,
    /// Radial grid intervals.
    #[arg(long)]
    pub radial_n: Option<usize>,
    /// Radial truncation radius.
    #[arg(long)]
    pub radial_rmax: Option<f64>,
    /// Snapshot times: `0.5,1,2` or `a..b:k`.
    #[arg(long)]
    pub times: Option<String>,
    /// Time-step cap for the 2D solver (default: stability-bound driven).
    #[arg(long)]
    pub dt: Option<f64>,
    /// Final time for the 2D solver.
    #[arg(long)]
    pub t_end: Option<f64>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// RNG seed for random initial data.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Tolerance used by the validate mode.
    #[arg(long)]
    pub tol: Option<f64>,
}

/// Fully resolved run configuration.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentConfig {
    pub mode: Mode,
    pub ic: String,
    pub mass: Option<f64>,
    pub beta: Option<f64>,
    pub grid_n: Vec<usize>,
    pub grid_l: f64,
    pub radial_n: usize,
    pub radial_rmax: f64,
    pub times: Vec<f64>,
    pub dt: Option<f64>,
    pub t_end: f64,
    pub out: PathBuf,
    pub seed: u64,
    pub tol: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            mode: Mode::Validate,
            ic: String::new(),
            mass: None,
            beta: None,
            grid_n: vec![64, 128, 256],
            grid_l: 8.0,
            radial_n: crate::DEFAULT_RADIAL_N,
            radial_rmax: crate::DEFAULT_R_MAX,
            times: Vec::new(),
            dt: None,
            t_end: 8.0,
            out: PathBuf::from("out"),
            seed: 0,
            tol: 1e-8,
        }
    }
}

/// `a..b:k` (k points, inclusive) or a comma list.
pub fn parse_times(s: &str) -> Result<Vec<f64>> {
    let bad = |msg: String| Error::Config(format!("bad times `{s}`: {msg}"));
    if let Some((range, count)) = s.split_once(':') {
        if let Some((a, b)) = range.split_once("..") {
            let a: f64 = a.trim().parse().map_err(|e| bad(format!("{e}")))?;
            let b: f64 = b.trim().parse().map_err(|e| bad(format!("{e}")))?;
            let k: usize = count.trim().parse().map_err(|e| bad(format!("{e}")))?;
            if k < 2 || !(b > a) {
                return Err(bad("need a < b and at least 2 points".into()));
            }
            return Ok((0..k)
                .map(|i| a + (b - a) * i as f64 / (k - 1) as f64)
                .collect());
        }
        return Err(bad("expected a..b:k".into()));
    }
    s.split(',')
        .map(|tok| tok.trim().parse::<f64>().map_err(|e| bad(format!("{e}"))))
        .collect()
}

fn parse_file(path: &Path) -> Result<BTreeMap<String, String>> {
    const KEYS: &[&str] = &[
        "mode", "ic", "mass", "beta", "grid-n", "grid-l", "radial-n", "radial-rmax", "times",
        "dt", "t-end", "out", "seed", "tol",
    ];
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
            path: path.display().to_string(),
            message: format!("line {}: expected key=value, got `{line}`", lineno + 1),
        })?;
        let key = key.trim();
        if !KEYS.contains(&key) {
            return Err(Error::Config(format!(
                "unknown config key `{key}` (line {}); known keys: {}",
                lineno + 1,
                KEYS.join(", ")
            )));
        }
        map.insert(key.to_string(), value.trim().to_string());
    }
    Ok(map)
}

fn parse_num<T: FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: fmt::Display,
{
    value
        .parse::<T>()
        .map_err(|e| Error::Config(format!("bad value for `{key}`: {e}")))
}

/// Resolve defaults, config file, and flags into an [`ExperimentConfig`].
/// Flags take precedence over the file; a warning is printed when both set
/// the same key.
pub fn parse_config(args: &CliArgs) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::default();
    let file = match &args.config {
        Some(path) => parse_file(path)?,
        None => BTreeMap::new(),
    };

    if let Some(v) = file.get("mode") {
        cfg.mode = v.parse()?;
    }
    if let Some(v) = file.get("ic") {
        cfg.ic = v.clone();
    }
    if let Some(v) = file.get("mass") {
        cfg.mass = Some(parse_num("mass", v)?);
    }
    if let Some(v) = file.get("beta") {
        cfg.beta = Some(parse_num("beta", v)?);
    }
    if let Some(v) = file.get("grid-n") {
        cfg.grid_n = v
            .split(',')
            .map(|tok| parse_num("grid-n", tok.trim()))
            .collect::<Result<_>>()?;
    }
    if let Some(v) = file.get("grid-l") {
        cfg.grid_l = parse_num("grid-l", v)?;
    }
    if let Some(v) = file.get("radial-n") {
        cfg.radial_n = parse_num("radial-n", v)?;
    }
    if let Some(v) = file.get("radial-rmax") {
        cfg.radial_rmax = parse_num("radial-rmax", v)?;
    }
    if let Some(v) = file.get("times") {
        cfg.times = parse_times(v)?;
    }
    if let Some(v) = file.get("dt") {
        cfg.dt = Some(parse_num("dt", v)?);
    }
    if let Some(v) = file.get("t-end") {
        cfg.t_end = parse_num("t-end", v)?;
    }
    if let Some(v) = file.get("out") {
        cfg.out = PathBuf::from(v);
    }
    if let Some(v) = file.get("seed") {
        cfg.seed = parse_num("seed", v)?;
    }
    if let Some(v) = file.get("tol") {
        cfg.tol = parse_num("tol", v)?;
    }

    let warn_override = |key: &str| {
        if file.contains_key(key) {
            eprintln!("warning: flag --{key} overrides config file value");
        }
    };
    if let Some(v) = &args.mode {
        warn_override("mode");
        cfg.mode = v.parse()?;
    }
    if let Some(v) = &args.ic {
        warn_override("ic");
        cfg.ic = v.clone();
    }
    if let Some(v) = args.mass {
        warn_override("mass");
        cfg.mass = Some(v);
    }
    if let Some(v) = args.beta {
        warn_override("beta");
        cfg.beta = Some(v);
    }
    if let Some(v) = &args.grid_n {
        warn_override("grid-n");
        cfg.grid_n = v.clone();
    }
    if let Some(v) = args.grid_l {
        warn_override("grid-l");
        cfg.grid_l = v;
    }
    if let Some(v) = args.radial_n {
        warn_override("radial-n");
        cfg.radial_n = v;
    }
    if let Some(v) = args.radial_rmax {
        warn_override("radial-rmax");
        cfg.radial_rmax = v;
    }
    if let Some(v) = &args.times {
        warn_override("times");
        cfg.times = parse_times(v)?;
    }
    if let Some(v) = args.dt {
        warn_override("dt");
        cfg.dt = Some(v);
    }
    if let Some(v) = args.t_end {
        warn_override("t-end");
        cfg.t_end = v;
    }
    if let Some(v) = &args.out {
        warn_override("out");
        cfg.out = v.clone();
    }
    if let Some(v) = args.seed {
        warn_override("seed");
        cfg.seed = v;
    }
    if let Some(v) = args.tol {
        warn_override("tol");
        cfg.tol = v;
    }

    if !(cfg.tol > 0.0) {
        return Err(Error::Config(format!("tol must be positive, got {}", cfg.tol)));
    }
    if cfg.grid_n.is_empty() {
        return Err(Error::Config("grid-n list is empty".into()));
    }
    Ok(cfg)
}

/// Parse a radial initial-condition descriptor; `default_mass` fills a
/// missing `mass=` entry, and `rng` drives the `random:` family.
pub fn parse_radial_ic(
    descriptor: &str,
    default_mass: Option<f64>,
    rng: &mut ChaCha8Rng,
    grid: &Arc<RadialGrid>,
) -> Result<RadialInitialCondition> {
    let bad = |msg: String| Error::Config(format!("bad --ic `{descriptor}`: {msg}"));
    let (name, params) = descriptor
        .split_once(':')
        .map(|(n, p)| (n, Some(p)))
        .unwrap_or((descriptor, None));
    let kv = |params: Option<&str>| -> Result<BTreeMap<String, f64>> {
        let mut map = BTreeMap::new();
        if let Some(p) = params {
            for tok in p.split(',') {
                let (k, v) = tok
                    .split_once('=')
                    .ok_or_else(|| bad(format!("expected key=value, got `{tok}`")))?;
                map.insert(
                    k.trim().to_string(),
                    v.trim()
                        .parse::<f64>()
                        .map_err(|e| bad(format!("bad number in `{tok}`: {e}")))?,
                );
            }
        }
        Ok(map)
    };
    match name {
        "dirac" => {
            let p = kv(params)?;
            let mass = p.get("mass").copied().or(default_mass).unwrap_or(1.0);
            Ok(RadialInitialCondition::Dirac { mass })
        }
        "gaussian" => {
            let p = kv(params)?;
            Ok(RadialInitialCondition::GaussianBump {
                center: p.get("center").copied().unwrap_or(1.5),
                width: p.get("width").copied().unwrap_or(0.5),
                mass: p.get("mass").copied().or(default_mass).unwrap_or(1.0),
            })
        }
        "equilibrium" => {
            let p = kv(params)?;
            let beta = match (p.get("beta"), default_mass) {
                (Some(&b), _) => b,
                (None, Some(m)) => beta_from_mass(m)?,
                (None, None) => 2.0,
            };
            Ok(RadialInitialCondition::Equilibrium { beta })
        }
        "fundamental" => {
            let p = kv(params)?;
            Ok(RadialInitialCondition::Fundamental { t0: p.get("t0").copied().unwrap_or(0.5) })
        }
        "random" => {
            let p = kv(params)?;
            let bumps = p.get("bumps").copied().unwrap_or(3.0) as usize;
            let mass = p.get("mass").copied().or(default_mass).unwrap_or(1.0);
            if bumps == 0 {
                return Err(bad("need at least one bump".into()));
            }
            let shapes: Vec<(f64, f64, f64)> = (0..bumps)
                .map(|_| {
                    (
                        0.3 + 0.7 * rng.random::<f64>(),
                        0.5 + 2.5 * rng.random::<f64>(),
                        0.3 + 0.5 * rng.random::<f64>(),
                    )
                })
                .collect();
            let raw = RadialProfile::from_density(grid.clone(), ProfileKind::Befp, |r| {
                shapes
                    .iter()
                    .map(|&(a, c, w)| a * (-(r - c) * (r - c) / (2.0 * w * w)).exp())
                    .sum()
            })?;
            let scale = mass / raw.mass();
            let scaled = RadialProfile::from_density(grid.clone(), ProfileKind::Befp, |r| {
                scale
                    * shapes
                        .iter()
                        .map(|&(a, c, w)| a * (-(r - c) * (r - c) / (2.0 * w * w)).exp())
                        .sum::<f64>()
            })?;
            Ok(RadialInitialCondition::Tabulated(scaled))
        }
        "file" => {
            let path = params.ok_or_else(|| bad("file: needs a path".into()))?;
            Ok(RadialInitialCondition::Tabulated(RadialProfile::read_csv(path)?))
        }
        other => Err(bad(format!(
            "unknown kind `{other}`; known kinds: dirac, gaussian, equilibrium, fundamental, random, file"
        ))),
    }
}

/// Parse a 2D initial condition: `+`-joined `gaussian2d:` terms, or any
/// radial descriptor sampled as a 2D field.
pub fn parse_field_ic(
    descriptor: &str,
    default_mass: Option<f64>,
    rng: &mut ChaCha8Rng,
    grid: &Arc<Grid2D>,
) -> Result<Field2D> {
    if descriptor.contains("gaussian2d") {
        let mut terms: Vec<(f64, f64, f64, f64)> = Vec::new();
        for part in descriptor.split('+') {
            let bad = |msg: String| Error::Config(format!("bad --ic term `{part}`: {msg}"));
            let params = part
                .trim()
                .strip_prefix("gaussian2d:")
                .ok_or_else(|| bad("expected gaussian2d:x=..,y=..,width=..,mass=..".into()))?;
            let mut x = 0.0;
            let mut y = 0.0;
            let mut width = 0.8;
            let mut mass = 1.0;
            for tok in params.split(',') {
                let (k, v) = tok
                    .split_once('=')
                    .ok_or_else(|| bad(format!("expected key=value, got `{tok}`")))?;
                let v: f64 = v
                    .trim()
                    .parse()
                    .map_err(|e| bad(format!("bad number in `{tok}`: {e}")))?;
                match k.trim() {
                    "x" => x = v,
                    "y" => y = v,
                    "width" => width = v,
                    "mass" => mass = v,
                    other => return Err(bad(format!("unknown key `{other}`"))),
                }
            }
            if !(width > 0.0) || !(mass >= 0.0) {
                return Err(bad("need width > 0 and mass >= 0".into()));
            }
            terms.push((x, y, width, mass));
        }
        return Field2D::from_fn(grid.clone(), |px, py| {
            terms
                .iter()
                .map(|&(x, y, w, m)| {
                    let dx = px - x;
                    let dy = py - y;
                    m / (TWO_PI * w * w) * (-(dx * dx + dy * dy) / (2.0 * w * w)).exp()
                })
                .sum()
        });
    }
    // radial descriptor sampled on the square
    let radial_grid = RadialGrid::uniform(
        std::f64::consts::SQRT_2 * grid.half_width() + 1.0,
        4000,
    )?;
    let ic = parse_radial_ic(descriptor, default_mass, rng, &radial_grid)?;
    match ic {
        RadialInitialCondition::Dirac { .. } => Err(Error::Config(
            "a Dirac initial condition is not representable on the 2D cell grid".into(),
        )),
        RadialInitialCondition::Equilibrium { beta } => {
            let eq = EquilibriumParams::from_beta(beta)?;
            Field2D::from_fn(grid.clone(), |x, y| eq.density((x * x + y * y).sqrt()))
        }
        RadialInitialCondition::GaussianBump { center, width, mass } => {
            // normalisation from the radial quadrature, but the bump itself
            // evaluated analytically at cell centres (interpolating it would
            // put an n-independent error floor under convergence studies)
            let raw = RadialProfile::from_density(radial_grid, ProfileKind::Befp, |r| {
                (-(r - center) * (r - center) / (2.0 * width * width)).exp()
            })?;
            let amp = mass / raw.mass();
            Field2D::from_fn(grid.clone(), move |x, y| {
                let r = (x * x + y * y).sqrt();
                amp * (-(r - center) * (r - center) / (2.0 * width * width)).exp()
            })
        }
        RadialInitialCondition::Fundamental { t0 } => Field2D::from_fn(grid.clone(), |x, y| {
            crate::equilibria::befp_fundamental(t0, (x * x + y * y).sqrt()).unwrap_or(0.0)
        }),
        RadialInitialCondition::Tabulated(profile) => sample_radial_profile(&profile, grid),
    }
}

/// Linear interpolation of a radial profile's density onto cell centres.
fn sample_radial_profile(profile: &RadialProfile, grid: &Arc<Grid2D>) -> Result<Field2D> {
    let nodes = profile.grid().nodes();
    let density = profile.density();
    let interp = |r: f64| -> f64 {
        if r >= *nodes.last().unwrap() {
            return 0.0;
        }
        let idx = nodes.partition_point(|&x| x <= r).max(1);
        let (r0, r1) = (nodes[idx - 1], nodes[idx]);
        let w = (r - r0) / (r1 - r0);
        density[idx - 1] * (1.0 - w) + density[idx] * w
    };
    Field2D::from_fn(grid.clone(), |x, y| interp((x * x + y * y).sqrt()))
}

fn write_manifest(cfg: &ExperimentConfig) -> Result<()> {
    #[derive(Serialize)]
    struct Manifest<'a> {
        tool: &'static str,
        version: &'static str,
        config: &'a ExperimentConfig,
    }
    let manifest = Manifest {
        tool: "befp",
        version: env!("CARGO_PKG_VERSION"),
        config: cfg,
    };
    let path = cfg.out.join("manifest.json");
    std::fs::write(&path, serde_json::to_string_pretty(&manifest).expect("serialises"))?;
    Ok(())
}

fn write_summary(cfg: &ExperimentConfig, text: &str) -> Result<()> {
    std::fs::write(cfg.out.join("summary.txt"), text)?;
    print!("{text}");
    Ok(())
}

/// Execute a resolved configuration. Artifacts land in `cfg.out`.
pub fn run(cfg: &ExperimentConfig) -> Result<()> {
    std::fs::create_dir_all(&cfg.out)?;
    write_manifest(cfg)?;
    match cfg.mode {
        Mode::Equilibrium => run_equilibrium(cfg),
        Mode::RadialExact => run_radial_exact(cfg),
        Mode::Numeric2d => run_numeric_2d(cfg),
        Mode::ConvergenceStudy => run_convergence_study(cfg),
        Mode::Validate => run_validate(cfg),
    }
}

fn run_equilibrium(cfg: &ExperimentConfig) -> Result<()> {
    let eq = match (cfg.beta, cfg.mass) {
        (Some(beta), _) => EquilibriumParams::from_beta(beta)?,
        (None, Some(mass)) => EquilibriumParams::from_befp_mass(mass)?,
        (None, None) => EquilibriumParams::from_beta(2.0)?,
    };
    let grid = RadialGrid::uniform(cfg.radial_rmax, cfg.radial_n)?;
    let profile = eq.profile(&grid);
    profile.write_csv(cfg.out.join("equilibrium.csv"))?;
    let report = ck_bound(&profile, eq.beta())?;
    std::fs::write(cfg.out.join("entropy_report.json"), report.to_json())?;
    let summary = format!(
        "equilibrium profile f_inf^beta\n\
         beta            = {:.12}\n\
         mass (BEFP)     = {:.12}\n\
         mass (FP side)  = {:.12}\n\
         quadrature mass = {:.12}\n\
         entropy H       = {:.12}\n\
         files: equilibrium.csv, entropy_report.json\n",
        eq.beta(),
        eq.befp_mass(),
        eq.fp_mass(),
        profile.mass(),
        report.entropy,
    );
    write_summary(cfg, &summary)
}

fn run_radial_exact(cfg: &ExperimentConfig) -> Result<()> {
    let grid = RadialGrid::uniform(cfg.radial_rmax, cfg.radial_n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let descriptor = if cfg.ic.is_empty() { "gaussian:center=1.5,width=0.5,mass=2" } else { &cfg.ic };
    let ic = parse_radial_ic(descriptor, cfg.mass, &mut rng, &grid)?;
    let times = if cfg.times.is_empty() {
        parse_times("0.5..6:12")?
    } else {
        cfg.times.clone()
    };
    let traj = solve_radial_exact(&ic, &grid, &times)?;
    traj.write_csv(cfg.out.join("trajectory.csv"))?;
    traj.write_diagnostics_csv(cfg.out.join("diagnostics.csv"))?;

    let mass = traj.diagnostics()[0].mass;
    let beta = beta_from_mass(mass)?;
    let history = decay_history(&traj, beta)?;
    let fit = fit_decay_rate(&history);
    let mut summary = format!(
        "exact radial run\n\
         ic              = {descriptor}\n\
         snapshot times  = {times:?}\n\
         mass            = {mass:.12}\n\
         beta(mass)      = {beta:.12}\n"
    );
    match &fit {
        Ok(f) => {
            summary += &format!(
                "decay slope     = {:.6} (r² = {:.6}, intercept {:.6})\n",
                f.slope, f.r_squared, f.intercept
            );
        }
        Err(e) => summary += &format!("decay fit failed: {e}\n"),
    }
    summary += "  t        mass             entropy          l1_to_eq         sup\n";
    for (t, d) in traj.times().iter().zip(traj.diagnostics()) {
        summary += &format!(
            "{:7.3}  {:.9e}  {:+.9e}  {:.9e}  {:.9e}\n",
            t, d.mass, d.entropy, d.l1_to_equilibrium, d.sup_norm
        );
    }
    summary += "files: trajectory.csv, diagnostics.csv\n";
    write_summary(cfg, &summary)
}

fn run_numeric_2d(cfg: &ExperimentConfig) -> Result<()> {
    let grid = Grid2D::new(cfg.grid_l, cfg.grid_n[0])?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let descriptor = if cfg.ic.is_empty() {
        "gaussian2d:x=1.5,y=0,width=0.8,mass=1+gaussian2d:x=-1.5,y=0,width=0.8,mass=1"
    } else {
        &cfg.ic
    };
    let f0 = parse_field_ic(descriptor, cfg.mass, &mut rng, &grid)?;
    let times = if cfg.times.is_empty() {
        let k = cfg.t_end.ceil() as usize;
        (0..=k).map(|i| i as f64 * cfg.t_end / k as f64).collect()
    } else {
        cfg.times.clone()
    };
    let traj = crate::numeric2d::solve_numeric(&f0, cfg.t_end, cfg.dt, &times)?;
    traj.write_diagnostics_csv(cfg.out.join("diagnostics.csv"))?;
    for (t, snap) in traj.times().iter().zip(traj.snapshots()) {
        snap.write_csv(cfg.out.join(format!("field_t{t:.3}.csv")))?;
        snap.write_binary(cfg.out.join(format!("field_t{t:.3}.bin")), *t)?;
    }
    let d0 = traj.diagnostics()[0];
    let dl = traj.diagnostics()[traj.diagnostics().len() - 1];
    let mut summary = format!(
        "finite-volume 2D run\n\
         ic              = {descriptor}\n\
         grid            = {}x{} on [-{},{}]²\n\
         t_end           = {}\n\
         steps taken     = {}\n\
         mass drift      = {:.3e} (relative)\n\
         min cell        = {:.3e}\n",
        grid.n(),
        grid.n(),
        cfg.grid_l,
        cfg.grid_l,
        cfg.t_end,
        traj.steps_taken(),
        (dl.mass - d0.mass).abs() / d0.mass.max(1e-300),
        traj.diagnostics().iter().map(|d| d.min_cell).fold(f64::INFINITY, f64::min),
    );
    summary += "  t        mass             entropy          l1_to_eq\n";
    for (t, d) in traj.times().iter().zip(traj.diagnostics()) {
        summary += &format!(
            "{:7.3}  {:.9e}  {:+.9e}  {:.9e}\n",
            t, d.mass, d.entropy, d.l1_to_equilibrium
        );
    }
    summary += "files: diagnostics.csv, field_t*.csv, field_t*.bin\n";
    write_summary(cfg, &summary)
}

fn run_convergence_study(cfg: &ExperimentConfig) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let descriptor = if cfg.ic.is_empty() { "gaussian:center=0,width=1,mass=2" } else { &cfg.ic };
    let t_end = if cfg.t_end == 8.0 { 1.0 } else { cfg.t_end };

    // exact radial reference on a grid covering the square's diagonal
    let ref_grid = RadialGrid::uniform(std::f64::consts::SQRT_2 * cfg.grid_l + 1.0, 12_000)?;
    let ic = parse_radial_ic(descriptor, cfg.mass, &mut rng, &ref_grid)?;
    let reference = solve_radial_exact(&ic, &ref_grid, &[t_end])?;
    let ref_profile = &reference.snapshots()[0];
    let nodes = ref_profile.grid().nodes().to_vec();
    let density = ref_profile.density();
    let exact = move |r: f64| -> f64 {
        if r >= *nodes.last().unwrap() {
            return 0.0;
        }
        let idx = nodes.partition_point(|&x| x <= r).max(1);
        let (r0, r1) = (nodes[idx - 1], nodes[idx]);
        let w = (r - r0) / (r1 - r0);
        density[idx - 1] * (1.0 - w) + density[idx] * w
    };

    // keep dt/h² constant across resolutions so the explicit-Euler error
    // refines at the same second-order rate as the fluxes
    let coarsest = *cfg.grid_n.iter().min().unwrap();
    let dt_ratio = {
        let grid = Grid2D::new(cfg.grid_l, coarsest)?;
        let mut rng0 = ChaCha8Rng::seed_from_u64(cfg.seed);
        let f0 = parse_field_ic(descriptor, cfg.mass, &mut rng0, &grid)?;
        let h = grid.spacing();
        match cfg.dt {
            Some(dt) => dt / (h * h),
            None => crate::numeric2d::default_time_step(&f0) / (h * h),
        }
    };

    let mut rows: Vec<(usize, f64, f64)> = Vec::new();
    for &n in &cfg.grid_n {
        let grid = Grid2D::new(cfg.grid_l, n)?;
        let mut rng_n = ChaCha8Rng::seed_from_u64(cfg.seed);
        let f0 = parse_field_ic(descriptor, cfg.mass, &mut rng_n, &grid)?;
        let h = grid.spacing();
        let traj = crate::numeric2d::solve_numeric(&f0, t_end, Some(dt_ratio * h * h), &[t_end])?;
        let err = traj.snapshots()[0].l1_distance_to_radial(&exact);
        rows.push((n, grid.spacing(), err));
    }

    let mut csv = String::from("n,h,l1_error,observed_order\n");
    let mut summary = format!(
        "convergence study vs exact radial solution at t = {t_end}\n\
         ic = {descriptor}\n\
         n        h          L1 error      order\n"
    );
    let mut orders = Vec::new();
    for i in 0..rows.len() {
        let (n, h, e) = rows[i];
        let order = if i > 0 {
            let (_, _, prev) = rows[i - 1];
            let o = (prev / e).log2();
            orders.push(o);
            format!("{o:.3}")
        } else {
            "-".into()
        };
        csv += &format!("{n},{h:.6e},{e:.6e},{order}\n");
        summary += &format!("{n:<8} {h:<10.4e} {e:<13.6e} {order}\n");
    }
    std::fs::write(cfg.out.join("convergence.csv"), csv)?;
    if let Some(min_order) = orders.iter().copied().reduce(f64::min) {
        summary += &format!("minimum observed order = {min_order:.3}\n");
    }
    summary += "files: convergence.csv\n";
    write_summary(cfg, &summary)
}

struct Check {
    name: &'static str,
    value: f64,
    tol: f64,
}

impl Check {
    fn passed(&self) -> bool {
        self.value.is_finite() && self.value <= self.tol
    }
}

fn run_validate(cfg: &ExperimentConfig) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let grid = RadialGrid::uniform(8.0, 4000)?;
    let mut checks: Vec<Check> = Vec::new();

    // Λ round trips on random profiles
    {
        let mut worst: f64 = 0.0;
        for _ in 0..20 {
            let (a, c, w): (f64, f64, f64) =
                (rng.random(), 4.0 * rng.random::<f64>(), 0.3 + rng.random::<f64>());
            let p = RadialProfile::from_density(grid.clone(), ProfileKind::Fp, |r| {
                a * (-(r - c) * (r - c) / (2.0 * w * w)).exp()
            })?;
            let back = crate::transform::lambda_inverse(&crate::transform::lambda_forward(&p)?)?;
            worst = worst.max(
                p.values()
                    .iter()
                    .zip(back.values())
                    .map(|(x, y)| (x - y).abs())
                    .fold(0.0, f64::max),
            );
        }
        checks.push(Check { name: "lambda round trip (max node error)", value: worst, tol: 1e-10 });
    }

    // Λ(M g_∞) = f_∞^{2π/M+1}
    {
        let fine = RadialGrid::uniform(8.0, 200_000)?;
        let mut worst: f64 = 0.0;
        for &fp_mass in &[1.0, TWO_PI] {
            let p = crate::equilibria::maxwellian_profile(fp_mass, &fine)?;
            let f = crate::transform::lambda_forward(&p)?;
            let eq = EquilibriumParams::from_fp_mass(fp_mass)?.profile(&fine);
            worst = worst.max(
                f.values()
                    .iter()
                    .zip(eq.values())
                    .map(|(x, y)| (x - y).abs())
                    .fold(0.0, f64::max),
            );
        }
        checks.push(Check { name: "maxwellian -> bose-einstein map", value: worst, tol: 1e-9 });
    }

    // mass relation m = 2π log(1 + M/2π) against quadrature
    {
        let p = RadialProfile::from_density(grid.clone(), ProfileKind::Fp, |r| {
            0.4 * (-(r - 1.2) * (r - 1.2) / 0.5).exp()
        })?;
        let f = crate::transform::lambda_forward(&p)?;
        let err = (f.mass() - crate::transform::mass_f_from_fp(p.mass())).abs();
        checks.push(Check { name: "mass relation (quadrature)", value: err, tol: 1e-6 });
    }

    // stationarity identity of f_∞^β
    {
        let eq = EquilibriumParams::from_beta(2.0)?;
        let mut worst: f64 = 0.0;
        for i in 1..500 {
            let r = 8.0 * i as f64 / 500.0;
            let f = eq.density(r);
            worst = worst.max((eq.density_derivative(r) + r * f * (1.0 + f)).abs());
        }
        checks.push(Check { name: "equilibrium stationarity identity", value: worst, tol: 1e-8 });
    }

    // kernel forms agree
    {
        let mut worst: f64 = 0.0;
        for _ in 0..50 {
            let t = 0.05 + 2.0 * rng.random::<f64>();
            let v = (2.0 * rng.random::<f64>() - 1.0, 2.0 * rng.random::<f64>() - 1.0);
            let w = (2.0 * rng.random::<f64>() - 1.0, 2.0 * rng.random::<f64>() - 1.0);
            worst = worst
                .max((crate::fp_exact::fp_kernel(t, v, w)? - crate::fp_exact::fp_kernel_literal(t, v, w)?).abs());
        }
        checks.push(Check { name: "kernel simplified vs literal", value: worst, tol: 1e-12 });
    }

    // radial kernel versus angular average
    {
        let mut worst: f64 = 0.0;
        for &(t, r, s) in &[(0.5, 1.0, 2.0), (1.0, 3.0, 3.0), (0.1, 5.0, 6.0)] {
            let params = crate::fp_exact::FpKernelParams::from_time(t)?;
            let m = 2048;
            let mut acc = 0.0;
            for k in 0..m {
                let a = TWO_PI * k as f64 / m as f64;
                acc += params.kernel_2d((r, 0.0), (s * a.cos(), s * a.sin()));
            }
            worst = worst.max((params.radial_kernel(r, s) - acc * TWO_PI / m as f64).abs());
        }
        checks.push(Check { name: "radial kernel angular reduction", value: worst, tol: 1e-9 });
    }

    // radial kernel normalisation ∫ K r dr = 1
    {
        let params = crate::fp_exact::FpKernelParams::from_time(0.7)?;
        let fine = RadialGrid::uniform(8.0, 65_536)?;
        let integrand: Vec<f64> =
            fine.nodes().iter().map(|&r| r * params.radial_kernel(r, 2.0)).collect();
        let integral = crate::grid::trapezoid(fine.nodes(), &integrand);
        checks.push(Check {
            name: "radial kernel normalisation",
            value: (integral - 1.0).abs(),
            tol: 1e-9,
        });
    }

    // Dirac pipeline reproduces the closed-form fundamental solution
    {
        let fine = RadialGrid::uniform(8.0, 8000)?;
        let traj = solve_radial_exact(
            &RadialInitialCondition::Dirac { mass: crate::equilibria::fundamental_mass() },
            &fine,
            &[1.0],
        )?;
        let exact = crate::equilibria::befp_fundamental_profile(1.0, &fine)?;
        let d = traj.snapshots()[0].l1_distance(&exact)?;
        checks.push(Check { name: "dirac pipeline vs closed form (L1)", value: d, tol: 1e-7 });
    }

    // sandwich bounds along the pipeline
    {
        let f0 = RadialProfile::dirac(grid.clone(), ProfileKind::Befp, 0.9)?;
        let g0 = crate::transform::lambda_inverse(&f0)?;
        let g1 = crate::fp_exact::fp_propagate_radial(&g0, 1.0)?;
        let f1 = crate::transform::lambda_forward(&g1)?;
        let report = crate::radial_solver::sandwich_check(&f1, &g1, g1.mass(), f1.mass())?;
        let worst = report.lower_margin.max(report.middle_margin).max(report.upper_margin);
        checks.push(Check { name: "sandwich bounds (worst margin)", value: worst.max(0.0), tol: 1e-12 });
    }

    // β ↔ m ↔ M triangle
    {
        let mut worst: f64 = 0.0;
        for &beta in &[1.01, 1.1, 2.0, 10.0, 1e3] {
            let eq = EquilibriumParams::from_beta(beta)?;
            worst = worst
                .max((EquilibriumParams::from_befp_mass(eq.befp_mass())?.beta() - beta).abs() / beta);
            worst = worst
                .max((EquilibriumParams::from_fp_mass(eq.fp_mass())?.beta() - beta).abs() / beta);
        }
        checks.push(Check { name: "beta/m/M triangle (relative)", value: worst, tol: 1e-12 });
    }

    // infinite-mass solution kills the operator
    {
        let f = |t: f64, r: f64| crate::equilibria::befp_infinite_mass(t, r, 2.0).unwrap();
        let mut worst: f64 = 0.0;
        for i in 0..10 {
            for j in 0..10 {
                let t = 0.1 + 0.2 * i as f64;
                let r = 1.0 + 0.45 * j as f64;
                worst = worst.max(crate::diagnostics::befp_residual_o4(&f, t, r, 1e-3).abs());
            }
        }
        checks.push(Check { name: "infinite-mass PDE residual", value: worst, tol: 1e-8 });
    }

    // Bernoulli reflection identity used by the flux assembly
    {
        let mut worst: f64 = 0.0;
        for &x in &[0.1, 1.0, 5.0, 40.0] {
            worst = worst.max(
                (crate::numeric2d::bernoulli(-x) - (x + crate::numeric2d::bernoulli(x))).abs(),
            );
        }
        checks.push(Check { name: "bernoulli reflection identity", value: worst, tol: 1e-12 });
    }

    let mut failures = 0;
    let mut summary = String::from("validation suite\n");
    summary += &format!("{:<42} {:>13} {:>10} status\n", "check", "value", "tol");
    for c in &checks {
        let ok = c.passed();
        if !ok {
            failures += 1;
        }
        summary += &format!(
            "{:<42} {:>13.3e} {:>10.1e} {}\n",
            c.name,
            c.value,
            c.tol,
            if ok { "PASS" } else { "FAIL" }
        );
    }
    summary += &format!("{} checks, {} failed\n", checks.len(), failures);
    write_summary(cfg, &summary)?;
    if failures > 0 {
        return Err(Error::ValidationFailed(failures));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mode_parsing() {
        assert_eq!("radial-exact".parse::<Mode>().unwrap(), Mode::RadialExact);
        let err = "radial".parse::<Mode>().unwrap_err().to_string();
        assert!(err.contains("validate") && err.contains("convergence-study"), "{err}");
    }

    #[test]
    fn times_parsing() {
        assert_eq!(parse_times("0.5,1,2").unwrap(), vec![0.5, 1.0, 2.0]);
        let lin = parse_times("1..6:11").unwrap();
        assert_eq!(lin.len(), 11);
        assert!((lin[0] - 1.0).abs() < 1e-15 && (lin[10] - 6.0).abs() < 1e-15);
        assert!((lin[1] - 1.5).abs() < 1e-15);
        assert!(parse_times("1..0:5").is_err());
        assert!(parse_times("a,b").is_err());
    }

    #[test]
    fn empty_file_gives_defaults() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("empty.cfg");
        std::fs::write(&path, "").unwrap();
        let args = CliArgs { config: Some(path), ..Default::default() };
        let cfg = parse_config(&args).unwrap();
        assert_eq!(cfg.mode, Mode::Validate);
        assert_eq!(cfg.radial_n, crate::DEFAULT_RADIAL_N);
        assert_eq!(cfg.grid_l, 8.0);
        assert_eq!(cfg.seed, 0);
    }

    #[test]
    fn unknown_key_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.cfg");
        std::fs::write(&path, "mode=validate\nwibble=3\n").unwrap();
        let args = CliArgs { config: Some(path), ..Default::default() };
        let err = parse_config(&args).unwrap_err().to_string();
        assert!(err.contains("wibble"), "{err}");
    }

    #[test]
    fn flag_overrides_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.cfg");
        std::fs::write(&path, "mode=equilibrium\nbeta=3\nseed=7\n").unwrap();
        let args = CliArgs {
            config: Some(path),
            beta: Some(5.0),
            ..Default::default()
        };
        let cfg = parse_config(&args).unwrap();
        assert_eq!(cfg.mode, Mode::Equilibrium);
        assert_eq!(cfg.beta, Some(5.0));
        assert_eq!(cfg.seed, 7);
    }

    #[test]
    fn ic_parsing() {
        let grid = RadialGrid::uniform(8.0, 100).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(matches!(
            parse_radial_ic("dirac:mass=2", None, &mut rng, &grid).unwrap(),
            RadialInitialCondition::Dirac { mass } if mass == 2.0
        ));
        assert!(matches!(
            parse_radial_ic("gaussian:center=1,width=0.5,mass=2", None, &mut rng, &grid).unwrap(),
            RadialInitialCondition::GaussianBump { .. }
        ));
        assert!(matches!(
            parse_radial_ic("dirac", Some(3.0), &mut rng, &grid).unwrap(),
            RadialInitialCondition::Dirac { mass } if mass == 3.0
        ));
        assert!(parse_radial_ic("blob:mass=1", None, &mut rng, &grid).is_err());
        assert!(parse_radial_ic("gaussian:width", None, &mut rng, &grid).is_err());
    }

    #[test]
    fn random_ic_is_seed_deterministic() {
        let grid = RadialGrid::uniform(8.0, 500).unwrap();
        let p1 = {
            let mut rng = ChaCha8Rng::seed_from_u64(42);
            parse_radial_ic("random:bumps=3,mass=2", None, &mut rng, &grid).unwrap()
        };
        let p2 = {
            let mut rng = ChaCha8Rng::seed_from_u64(42);
            parse_radial_ic("random:bumps=3,mass=2", None, &mut rng, &grid).unwrap()
        };
        match (p1, p2) {
            (RadialInitialCondition::Tabulated(a), RadialInitialCondition::Tabulated(b)) => {
                assert_eq!(a.values(), b.values());
                assert!((a.mass() - 2.0).abs() < 1e-9);
            }
            _ => panic!("expected tabulated profiles"),
        }
    }

    #[test]
    fn two_bump_field_ic() {
        let grid = Grid2D::new(8.0, 64).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let f = parse_field_ic(
            "gaussian2d:x=1.5,y=0,width=0.8,mass=1+gaussian2d:x=-1.5,y=0,width=0.8,mass=1",
            None,
            &mut rng,
            &grid,
        )
        .unwrap();
        assert!((f.mass() - 2.0).abs() < 1e-3, "mass {}", f.mass());
        // symmetric under x -> -x
        let n = grid.n();
        for i in 0..n {
            for j in 0..n {
                let a = f.at(i, j);
                let b = f.at(n - 1 - i, j);
                assert!((a - b).abs() < 1e-12);
            }
        }
    }
}
