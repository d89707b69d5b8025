//! Command-line flags, the key=value config file, and their merge into a
//! validated [`RunConfig`].

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rotwave_core::orbits::integrator::Tolerances;
use rotwave_core::Theta;

use crate::CliError;

#[derive(Parser, Debug)]
#[command(name = "rotwave", version, about = "Traveling waves of the rotation-θ equation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Print the Coriolis constants and the planar-system coefficients.
    Params(Common),
    /// Phase portrait as SVG plus the curve data.
    Portrait(PortraitArgs),
    /// Closed-form or numeric wave profile with its residual report.
    Wave(WaveArgs),
    /// Move the singular line and compare predicted and observed waves.
    Sweep(SweepArgs),
    /// Run the property suite; exits 1 on any failure.
    Verify(Common),
}

#[derive(Args, Debug, Clone, Default)]
pub struct Common {
    /// File of key=value lines; flags override its entries.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Coriolis frequency Ω (physical mode, with --c).
    #[arg(long, allow_hyphen_values = true)]
    pub omega: Option<f64>,
    /// Wave speed c (physical mode).
    #[arg(long, allow_hyphen_values = true)]
    pub c: Option<f64>,
    /// θ as 1/n, e.g. 1/4.
    #[arg(long)]
    pub theta: Option<String>,
    /// Singular-line coefficient C1 (direct mode)
    #[arg(long, allow_hyphen_values = true)]
    pub c1: Option<f64>,
    /// Cubic coefficient C2 of f
    #[arg(long, allow_hyphen_values = true)]
    pub c2: Option<f64>,
    /// Quartic coefficient C3 of f
    #[arg(long, allow_hyphen_values = true)]
    pub c3: Option<f64>,
    /// Linear coefficient K of f.
    #[arg(long, allow_hyphen_values = true)]
    pub k: Option<f64>,
    /// Data format of the primary file
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Output stem; extensions are added per file kind.
    #[arg(long, value_name = "STEM")]
    pub out: Option<PathBuf>,
    /// Seed for randomized suites [default: 7]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Integrator relative tolerance [default: 1e-10]
    #[arg(long)]
    pub rtol: Option<f64>,
    /// Integrator absolute tolerance [default: 1e-12]
    #[arg(long)]
    pub atol: Option<f64>,
}

#[derive(Args, Debug, Clone, Default)]
pub struct PortraitArgs {
    #[command(flatten)]
    pub common: Common,
    /// Draw these level sets instead of the orbit survey.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub h: Vec<f64>,
    /// Left edge of the traced window for --h
    #[arg(long, allow_hyphen_values = true)]
    pub phi_min: Option<f64>,
    /// Right edge of the traced window for --h
    #[arg(long, allow_hyphen_values = true)]
    pub phi_max: Option<f64>,
}

#[derive(Args, Debug, Clone, Default)]
pub struct WaveArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long = "type", value_enum)]
    pub kind: Option<WaveKind>,
    /// Which side of the saddle for sn and solitary waves
    #[arg(long, value_enum)]
    pub branch: Option<BranchArg>,
    /// Level of H; solitary waves default to the saddle level.
    #[arg(long, allow_hyphen_values = true)]
    pub h: Option<f64>,
    /// Profile samples [default: 1001]
    #[arg(long)]
    pub samples: Option<usize>,
    /// Half-width of the ξ window.
    #[arg(long)]
    pub xi_max: Option<f64>,
}

#[derive(Args, Debug, Clone, Default)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: Common,
    /// First C1 of the sweep (the rightmost line position)
    #[arg(long, allow_hyphen_values = true)]
    pub c1_from: Option<f64>,
    /// Last C1 of the sweep
    #[arg(long, allow_hyphen_values = true)]
    pub c1_to: Option<f64>,
    /// Physical mode: speeds instead of C1.
    #[arg(long, allow_hyphen_values = true)]
    pub c_from: Option<f64>,
    /// Last speed of the sweep
    #[arg(long, allow_hyphen_values = true)]
    pub c_to: Option<f64>,
    /// Sweep samples [default: 200]
    #[arg(long)]
    pub samples: Option<usize>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Jsonl,
    Svg,
}

impl FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        <Format as ValueEnum>::from_str(s, true)
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum WaveKind {
    /// sn or cn, whichever the level's roots admit.
    Periodic,
    Cn,
    Sn,
    Solitary,
    /// Integrated orbit through the level's axis crossing.
    Numeric,
}

impl FromStr for WaveKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        <WaveKind as ValueEnum>::from_str(s, true)
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum BranchArg {
    Left,
    Right,
}

impl FromStr for BranchArg {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        <BranchArg as ValueEnum>::from_str(s, true)
    }
}

/// Where the planar-system coefficients come from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ParamSource {
    Physical { omega: f64, c: f64 },
    Direct { c1: f64, c2: f64, c3: f64, k: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub enum CommandConfig {
    Params,
    Portrait { h: Vec<f64>, phi_window: (Option<f64>, Option<f64>) },
    Wave { kind: WaveKind, branch: BranchArg, h: Option<f64>, samples: usize, xi_max: Option<f64> },
    Sweep { range: SweepRange, samples: usize },
    Verify,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SweepRange {
    C1(f64, f64),
    Speed(f64, f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: CommandConfig,
    /// `None` only for `verify`, which uses fixed scenarios.
    pub params: Option<ParamSource>,
    pub theta: Option<Theta>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub tolerances: Tolerances,
    pub seed: u64,
}

pub const DEFAULT_SEED: u64 = 7;

/// Parse `1/4`, `0.25` or `1` into an admissible θ.
pub fn parse_theta(s: &str) -> Result<Theta, CliError> {
    s.parse::<Theta>().map_err(|e| CliError::Usage(e.to_string()))
}

/// key=value lines; `#` starts a comment.
pub fn read_config_file(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    parse_config_text(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>, String> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(format!("line {}: expected key=value", i + 1));
        };
        let key = k.trim().replace('_', "-").to_ascii_lowercase();
        map.insert(key, v.trim().to_string());
    }
    Ok(map)
}

struct Merged {
    file: BTreeMap<String, String>,
}

impl Merged {
    fn get<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, CliError>
    where
        T::Err: fmt::Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.file.get(key) {
            None => Ok(None),
            Some(v) => v.parse::<T>().map(Some).map_err(|e| CliError::Usage(format!("config key {key} = {v:?}: {e}"))),
        }
    }

    fn list(&self, flag: &[f64], key: &str) -> Result<Vec<f64>, CliError> {
        if !flag.is_empty() {
            return Ok(flag.to_vec());
        }
        match self.file.get(key) {
            None => Ok(Vec::new()),
            Some(v) => v
                .split(',')
                .map(|x| x.trim().parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|e| CliError::Usage(format!("config key {key} = {v:?}: {e}"))),
        }
    }
}

const KNOWN_KEYS: &[&str] = &[
    "omega", "c", "theta", "c1", "c2", "c3", "k", "format", "out", "seed", "rtol", "atol", "h", "phi-min", "phi-max",
    "type", "branch", "samples", "xi-max", "c1-from", "c1-to", "c-from", "c-to",
];

fn base(common: &Common, needs_params: bool) -> Result<(Merged, RunConfig), CliError> {
    let file = match &common.config {
        Some(p) => read_config_file(p)?,
        None => BTreeMap::new(),
    };
    if let Some(k) = file.keys().find(|k| !KNOWN_KEYS.contains(&k.as_str())) {
        return Err(CliError::Usage(format!("unknown config key {k:?}")));
    }
    let m = Merged { file };
    let omega = m.get(common.omega, "omega")?;
    let c = m.get(common.c, "c")?;
    let direct = [m.get(common.c1, "c1")?, m.get(common.c2, "c2")?, m.get(common.c3, "c3")?, m.get(common.k, "k")?];
    let physical_given = omega.is_some() || c.is_some();
    let direct_given = direct.iter().any(Option::is_some);
    if physical_given && direct_given {
        return Err(CliError::Usage(
            "physical mode (--omega, --c) and direct mode (--c1, --c2, --c3, --k) are mutually exclusive".into(),
        ));
    }
    let params = if physical_given {
        match (omega, c) {
            (Some(omega), Some(c)) => Some(ParamSource::Physical { omega, c }),
            _ => return Err(CliError::Usage("physical mode needs both --omega and --c".into())),
        }
    } else if direct_given {
        match direct {
            [Some(c1), Some(c2), Some(c3), Some(k)] => Some(ParamSource::Direct { c1, c2, c3, k }),
            _ => return Err(CliError::Usage("direct mode needs all of --c1, --c2, --c3, --k".into())),
        }
    } else {
        None
    };
    if needs_params && params.is_none() {
        return Err(CliError::Usage("give either --omega and --c, or --c1 --c2 --c3 --k".into()));
    }
    let theta = match m.get(common.theta.clone(), "theta")? {
        Some(t) => Some(parse_theta(&t)?),
        None if needs_params => return Err(CliError::Usage("--theta is required".into())),
        None => None,
    };
    let mut tolerances = Tolerances { rtol: 1e-10, atol: 1e-12, max_steps: 200_000, ..Tolerances::default() };
    if let Some(r) = m.get(common.rtol, "rtol")? {
        tolerances.rtol = r;
    }
    if let Some(a) = m.get(common.atol, "atol")? {
        tolerances.atol = a;
    }
    if !(tolerances.rtol > 0.0 && tolerances.atol > 0.0) {
        return Err(CliError::Usage("tolerances must be positive".into()));
    }
    let cfg = RunConfig {
        command: CommandConfig::Params,
        params,
        theta,
        out: m.get(common.out.clone(), "out")?,
        format: m.get(common.format, "format")?,
        tolerances,
        seed: m.get(common.seed, "seed")?.unwrap_or(DEFAULT_SEED),
    };
    Ok((m, cfg))
}

impl RunConfig {
    pub fn resolve(cmd: &Command) -> Result<RunConfig, CliError> {
        match cmd {
            Command::Params(c) => Ok(base(c, true)?.1),
            Command::Verify(c) => {
                let (_, mut cfg) = base(c, false)?;
                cfg.command = CommandConfig::Verify;
                Ok(cfg)
            }
            Command::Portrait(a) => {
                let (m, mut cfg) = base(&a.common, true)?;
                cfg.command = CommandConfig::Portrait {
                    h: m.list(&a.h, "h")?,
                    phi_window: (m.get(a.phi_min, "phi-min")?, m.get(a.phi_max, "phi-max")?),
                };
                Ok(cfg)
            }
            Command::Wave(a) => {
                let (m, mut cfg) = base(&a.common, true)?;
                let kind = m.get(a.kind, "type")?.ok_or_else(|| CliError::Usage("--type is required".into()))?;
                let samples = m.get(a.samples, "samples")?.unwrap_or(1001);
                if samples < 2 {
                    return Err(CliError::Usage("--samples must be at least 2".into()));
                }
                cfg.command = CommandConfig::Wave {
                    kind,
                    branch: m.get(a.branch, "branch")?.unwrap_or(BranchArg::Right),
                    h: m.get(a.h, "h")?,
                    samples,
                    xi_max: m.get(a.xi_max, "xi-max")?,
                };
                Ok(cfg)
            }
            Command::Sweep(a) => {
                let (m, mut cfg) = base(&a.common, true)?;
                let c1 = (m.get(a.c1_from, "c1-from")?, m.get(a.c1_to, "c1-to")?);
                let sp = (m.get(a.c_from, "c-from")?, m.get(a.c_to, "c-to")?);
                let range = match (cfg.params, c1, sp) {
                    (Some(ParamSource::Direct { .. }), (Some(a), Some(b)), (None, None)) => SweepRange::C1(a, b),
                    (Some(ParamSource::Physical { .. }), (None, None), (Some(a), Some(b))) => SweepRange::Speed(a, b),
                    _ => {
                        return Err(CliError::Usage(
                            "sweep needs --c1-from/--c1-to in direct mode or --c-from/--c-to in physical mode".into(),
                        ))
                    }
                };
                let samples = m.get(a.samples, "samples")?.unwrap_or(200);
                cfg.command = CommandConfig::Sweep { range, samples };
                Ok(cfg)
            }
        }
    }
}
