use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Parser, ValueEnum};
use serde::Serialize;

use super::CliError;
use crate::dirac::{Channel, ShellParams};
use crate::oracle::{BumpShape, DEFAULT_SIGMA_LADDER};
use crate::spectrum::SearchConfig;

const UNITS: &str = "Natural units hbar = c = 1 throughout: mass and energies share one unit, \
lengths are measured in inverse mass units, the coupling a is dimensionless.";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    /// Bound-state energies of each channel
    Solve,
    /// Energies along a grid in a or r0
    Scan,
    /// Sampled normalized wavefunction of one state
    Wavefunction,
    /// Analytic energies against the shooting oracle
    Oracle,
    /// Invariant battery
    Verify,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum ScanParam {
    #[value(name = "a")]
    #[serde(rename = "a")]
    Coupling,
    #[value(name = "r0")]
    #[serde(rename = "r0")]
    Radius,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ShapeArg {
    Gaussian,
    #[value(name = "top_hat", alias = "top-hat")]
    TopHat,
}

impl From<ShapeArg> for BumpShape {
    fn from(s: ShapeArg) -> Self {
        match s {
            ShapeArg::Gaussian => BumpShape::Gaussian,
            ShapeArg::TopHat => BumpShape::TopHat,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "delta-shell",
    version,
    about = "Bound states of the 2+1 dimensional Dirac equation with the shell potential V(r) = -a delta(r - r0).",
    after_help = UNITS
)]
struct CliArgs {
    #[arg(value_enum)]
    command: Command,

    /// Particle mass M [energy] (default 1)
    #[arg(long, value_name = "M")]
    mass: Option<f64>,

    /// Shell radius r0 [1/energy] (default 1)
    #[arg(long, value_name = "R0")]
    radius: Option<f64>,

    /// Shell strength a [dimensionless]; a > 0 is attractive
    #[arg(long, value_name = "A", allow_hyphen_values = true)]
    coupling: Option<f64>,

    /// Total angular momentum as a fraction, e.g. 1/2 or -3/2 (repeatable; default 1/2)
    #[arg(long = "j", value_name = "FRAC", allow_hyphen_values = true)]
    j: Vec<String>,

    /// Total angular momentum as the odd integer 2j (repeatable)
    #[arg(long = "two-j", value_name = "INT", allow_hyphen_values = true)]
    two_j: Vec<i32>,

    /// Parameter swept by `scan`
    #[arg(long, value_enum)]
    scan_param: Option<ScanParam>,

    /// Scan grid start:stop:count, in the units of the swept parameter
    #[arg(long, value_name = "START:STOP:COUNT", allow_hyphen_values = true)]
    grid: Option<String>,

    /// Comma-separated decreasing bump widths sigma [1/energy] for `oracle` (default 0.01,0.003,0.001 times r0)
    #[arg(long, value_name = "LIST")]
    sigmas: Option<String>,

    /// Bump profile used by `oracle` (default gaussian)
    #[arg(long, value_enum)]
    shape: Option<ShapeArg>,

    /// Table format (default csv)
    #[arg(long, value_enum)]
    format: Option<Format>,

    /// Output file (default stdout)
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Significant digits of printed floats, 1 to 17 (default 12)
    #[arg(long, value_name = "DIGITS")]
    precision: Option<usize>,

    /// Flat `key = value` file with defaults for any long flag; flags win
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Energy grid size of the root scan (default 512)
    #[arg(long, value_name = "N")]
    scan_points: Option<usize>,

    /// Deterministic sequential merge of parallel work; always on
    #[arg(long)]
    seedless_deterministic: bool,

    /// State index within the channel for `wavefunction`, ascending in energy (default 0)
    #[arg(long, value_name = "INDEX")]
    state: Option<usize>,

    /// Number of radii for `wavefunction` (default 400)
    #[arg(long, value_name = "N")]
    points: Option<usize>,

    /// Smallest sampled radius for `wavefunction` [1/energy] (default 1e-4 r0)
    #[arg(long, value_name = "R")]
    r_min: Option<f64>,

    /// Largest sampled radius for `wavefunction` [1/energy] (default r0 + 30/kappa)
    #[arg(long, value_name = "R")]
    r_max: Option<f64>,
}

const CONFIG_KEYS: [&str; 17] = [
    "mass",
    "radius",
    "coupling",
    "j",
    "two-j",
    "scan-param",
    "grid",
    "sigmas",
    "shape",
    "format",
    "out",
    "precision",
    "scan-points",
    "state",
    "points",
    "r-min",
    "r-max",
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleOptions {
    /// Absolute widths, strictly decreasing.
    pub sigmas: Vec<f64>,
    pub shape: BumpShape,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutputOptions {
    pub format: Format,
    pub path: Option<PathBuf>,
    pub precision: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanSpec {
    pub param: ScanParam,
    pub grid: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WavefunctionSpec {
    pub state: usize,
    pub points: usize,
    pub r_min: Option<f64>,
    pub r_max: Option<f64>,
}

/// Fully resolved and validated run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub params: ShellParams,
    #[serde(serialize_with = "channels_as_fractions")]
    pub channels: Vec<Channel>,
    pub search: SearchConfig,
    pub oracle: OracleOptions,
    pub output: OutputOptions,
    pub scan: Option<ScanSpec>,
    pub wavefunction: WavefunctionSpec,
}

fn channels_as_fractions<S: serde::Serializer>(chs: &[Channel], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(chs.iter().map(|c| c.to_string()))
}

/// `key = value` lines; `#` starts a comment. Repeated keys accumulate.
#[derive(Debug, Default)]
struct ConfigFile(BTreeMap<String, Vec<String>>);

impl ConfigFile {
    fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    fn parse(text: &str) -> Result<Self, CliError> {
        let mut map: BTreeMap<String, Vec<String>> = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("config line {}: expected key = value", lineno + 1)))?;
            let key = k.trim().replace('_', "-");
            if !CONFIG_KEYS.contains(&key.as_str()) {
                return Err(CliError::Usage(format!("config line {}: unknown key '{}'", lineno + 1, k.trim())));
            }
            map.entry(key).or_default().push(v.trim().to_string());
        }
        Ok(ConfigFile(map))
    }

    fn last(&self, key: &str) -> Option<&str> {
        self.0.get(key).and_then(|v| v.last()).map(String::as_str)
    }

    fn all(&self, key: &str) -> Vec<String> {
        self.0
            .get(key)
            .map(|vs| {
                vs.iter()
                    .flat_map(|v| v.split(','))
                    .map(|s| s.trim().to_string())
                    .filter(|s| !s.is_empty())
                    .collect()
            })
            .unwrap_or_default()
    }

    fn parsed<T>(&self, key: &str) -> Result<Option<T>, CliError>
    where
        T: FromStr,
        T::Err: Display,
    {
        self.last(key)
            .map(|s| s.parse::<T>().map_err(|e| CliError::Usage(format!("config key {key}: {e}"))))
            .transpose()
    }

    fn value_enum<T: ValueEnum>(&self, key: &str) -> Result<Option<T>, CliError> {
        self.last(key)
            .map(|s| T::from_str(s, false).map_err(|e| CliError::Usage(format!("config key {key}: {e}"))))
            .transpose()
    }
}

/// Parse `start:stop:count` into evenly spaced values.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>, CliError> {
    let bad = |why: &str| CliError::Usage(format!("invalid grid '{spec}': {why}"));
    let parts: Vec<&str> = spec.split(':').map(str::trim).collect();
    let [start, stop, count] = parts[..] else {
        return Err(bad("expected start:stop:count"));
    };
    let start: f64 = start.parse().map_err(|_| bad("start is not a number"))?;
    let stop: f64 = stop.parse().map_err(|_| bad("stop is not a number"))?;
    let count: usize = count.parse().map_err(|_| bad("count is not a non-negative integer"))?;
    if !(start.is_finite() && stop.is_finite()) {
        return Err(bad("endpoints must be finite"));
    }
    match count {
        0 => Err(bad("grid is empty")),
        1 => Ok(vec![start]),
        _ if start == stop => Err(bad("grid is not monotone")),
        _ => Ok((0..count)
            .map(|k| start + (stop - start) * k as f64 / (count - 1) as f64)
            .collect()),
    }
}

/// Parse a comma-separated, strictly decreasing list of positive widths.
pub fn parse_sigmas(list: &str) -> Result<Vec<f64>, CliError> {
    let sigmas = list
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite() && *v > 0.0)
                .ok_or_else(|| CliError::Usage(format!("invalid width '{s}' in --sigmas")))
        })
        .collect::<Result<Vec<f64>, _>>()?;
    if sigmas.is_empty() {
        return Err(CliError::Usage("--sigmas is empty".into()));
    }
    if sigmas.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(CliError::Usage("--sigmas must be strictly decreasing".into()));
    }
    Ok(sigmas)
}

fn usage(e: crate::Error) -> CliError {
    match e {
        crate::Error::InvalidParameter(m) => CliError::Usage(m),
        other => CliError::Usage(other.to_string()),
    }
}

/// Resolve flags over config-file values over defaults and validate
/// everything before any computation.
pub fn parse_args<I, T>(argv: I) -> Result<RunConfig, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = CliArgs::try_parse_from(argv).map_err(CliError::Clap)?;
    let file = match &cli.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };

    let scan_param = match cli.scan_param {
        Some(p) => Some(p),
        None => file.value_enum::<ScanParam>("scan-param")?,
    };
    let grid = match cli.grid.as_deref().or(file.last("grid")) {
        Some(g) => Some(parse_grid(g)?),
        None => None,
    };
    let scan = match (cli.command, scan_param, grid) {
        (Command::Scan, Some(param), Some(grid)) => Some(ScanSpec { param, grid }),
        (Command::Scan, None, _) => return Err(CliError::Usage("scan requires --scan-param".into())),
        (Command::Scan, _, None) => return Err(CliError::Usage("scan requires --grid".into())),
        _ => None,
    };

    let mass = cli.mass.or(file.parsed("mass")?).unwrap_or(1.0);
    let radius = cli.radius.or(file.parsed("radius")?).unwrap_or(1.0);
    let coupling = cli.coupling.or(file.parsed("coupling")?);
    let swept = |p: ScanParam| scan.as_ref().map(|s| s.param) == Some(p);
    let coupling = match coupling {
        Some(a) => a,
        None if cli.command == Command::Verify => 0.5,
        None if swept(ScanParam::Coupling) => scan.as_ref().map(|s| s.grid[0]).unwrap_or_default(),
        None => return Err(CliError::Usage("missing required --coupling".into())),
    };
    let params = ShellParams::new(mass, radius, coupling).map_err(usage)?;
    if let Some(s) = &scan {
        for &v in &s.grid {
            match s.param {
                ScanParam::Coupling => ShellParams::new(mass, radius, v),
                ScanParam::Radius => ShellParams::new(mass, v, coupling),
            }
            .map_err(usage)?;
        }
    }

    let (js, two_js): (Vec<String>, Vec<String>) = if cli.j.is_empty() && cli.two_j.is_empty() {
        (file.all("j"), file.all("two-j"))
    } else {
        (cli.j.clone(), cli.two_j.iter().map(i32::to_string).collect())
    };
    let mut channels = Vec::new();
    for s in &js {
        channels.push(s.parse::<Channel>().map_err(usage)?);
    }
    for s in &two_js {
        let t: i32 = s.parse().map_err(|_| CliError::Usage(format!("invalid two-j '{s}'")))?;
        channels.push(Channel::new(t).map_err(|_| CliError::Usage("j must be half-odd-integer".into()))?);
    }
    if channels.is_empty() {
        channels.push(Channel::new(1).expect("odd"));
    }
    channels.sort();
    channels.dedup();

    let mut search = SearchConfig::default();
    if let Some(n) = cli.scan_points.or(file.parsed("scan-points")?) {
        search.scan_points = n;
    }
    search.validate().map_err(usage)?;

    let sigmas = match cli.sigmas.as_deref().or(file.last("sigmas")) {
        Some(s) => parse_sigmas(s)?,
        None => DEFAULT_SIGMA_LADDER.iter().map(|s| s * radius).collect(),
    };
    let shape = match cli.shape {
        Some(s) => s,
        None => file.value_enum::<ShapeArg>("shape")?.unwrap_or(ShapeArg::Gaussian),
    }
    .into();
    if cli.command == Command::Oracle {
        let limit = radius / 10.0 * (1.0 + 1e-12);
        if let Some(s) = sigmas.iter().find(|&&s| s > limit) {
            return Err(CliError::Usage(format!("bump width {s} exceeds r0/10")));
        }
    }

    let format = match cli.format {
        Some(f) => f,
        None => file.value_enum::<Format>("format")?.unwrap_or(Format::Csv),
    };
    let path = cli.out.clone().or(file.last("out").map(PathBuf::from));
    let precision = cli.precision.or(file.parsed("precision")?).unwrap_or(12);
    if !(1..=17).contains(&precision) {
        return Err(CliError::Usage(format!("precision must be between 1 and 17, got {precision}")));
    }

    let wavefunction = WavefunctionSpec {
        state: cli.state.or(file.parsed("state")?).unwrap_or(0),
        points: cli.points.or(file.parsed("points")?).unwrap_or(400),
        r_min: cli.r_min.or(file.parsed("r-min")?),
        r_max: cli.r_max.or(file.parsed("r-max")?),
    };
    if cli.command == Command::Wavefunction {
        if channels.len() != 1 {
            return Err(CliError::Usage("wavefunction takes exactly one channel".into()));
        }
        if wavefunction.points < 2 {
            return Err(CliError::Usage("--points must be at least 2".into()));
        }
        let r_min = wavefunction.r_min.unwrap_or(1e-4 * radius);
        if !(r_min > 0.0 && r_min < radius) {
            return Err(CliError::Usage("--r-min must lie in (0, r0)".into()));
        }
        if let Some(r) = wavefunction.r_max {
            if !(r > radius && r.is_finite()) {
                return Err(CliError::Usage("--r-max must exceed r0".into()));
            }
        }
    }

    Ok(RunConfig {
        command: cli.command,
        params,
        channels,
        search,
        oracle: OracleOptions { sigmas, shape },
        output: OutputOptions { format, path, precision },
        scan,
        wavefunction,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn parse(args: &str) -> Result<RunConfig, CliError> {
        parse_args(std::iter::once("delta-shell").chain(args.split_whitespace()))
    }

    #[test]
    fn basic_solve() {
        let cfg = parse("solve --mass 1 --radius 1 --coupling 0.5 --j 1/2").unwrap();
        assert_eq!(cfg.command, Command::Solve);
        assert_eq!(cfg.params, ShellParams::new(1.0, 1.0, 0.5).unwrap());
        assert_eq!(cfg.channels, vec![Channel::new(1).unwrap()]);
        assert_eq!(cfg.output.precision, 12);
        assert_eq!(cfg.output.format, Format::Csv);
    }

    #[test]
    fn integer_j_rejected() {
        let err = parse("solve --coupling 0.5 --j 1").unwrap_err();
        assert_eq!(err.to_string(), "j must be half-odd-integer");
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn coupling_required() {
        assert!(matches!(parse("solve --j 1/2"), Err(CliError::Usage(_))));
        assert!(parse("verify").is_ok());
    }

    #[test]
    fn unknown_flag_rejected() {
        let err = parse("solve --coupling 0.5 --bogus 3").unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn negative_values() {
        let cfg = parse("solve --coupling -0.5 --j -3/2 --two-j -1").unwrap();
        assert_eq!(cfg.params.coupling, -0.5);
        let tj: Vec<i32> = cfg.channels.iter().map(|c| c.two_j()).collect();
        assert_eq!(tj, vec![-3, -1]);
    }

    #[test]
    fn config_file_and_precedence() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "# shell\nmass = 2\ncoupling = 0.7 # strong\nj = 1/2, 3/2\nprecision = 8").unwrap();
        let path = f.path().display().to_string();
        let cfg = parse(&format!("solve --config {path} --coupling 0.3")).unwrap();
        assert_eq!(cfg.params.mass, 2.0);
        assert_eq!(cfg.params.coupling, 0.3);
        assert_eq!(cfg.channels.len(), 2);
        assert_eq!(cfg.output.precision, 8);
    }

    #[test]
    fn config_unknown_key() {
        assert!(ConfigFile::parse("colour = red").is_err());
        assert!(ConfigFile::parse("mass 1").is_err());
        assert!(ConfigFile::parse("scan_points = 64").is_ok());
    }

    #[test]
    fn grids() {
        assert_eq!(parse_grid("0.2:0.6:3").unwrap().len(), 3);
        assert_eq!(parse_grid("1:2:1").unwrap(), vec![1.0]);
        assert!(parse_grid("1:2:0").is_err());
        assert!(parse_grid("1:1:4").is_err());
        assert!(parse_grid("1:2").is_err());
        let down = parse_grid("2:1:3").unwrap();
        assert_eq!(down, vec![2.0, 1.5, 1.0]);
    }

    #[test]
    fn scan_needs_grid() {
        assert!(parse("scan --scan-param a").is_err());
        let cfg = parse("scan --scan-param a --grid 0.2:0.6:3").unwrap();
        assert_eq!(cfg.scan.unwrap().grid.len(), 3);
        assert!(parse("scan --scan-param r0 --coupling 0.5 --grid -1:1:3").is_err());
    }

    #[test]
    fn sigma_validation() {
        assert_eq!(parse_sigmas("0.01, 0.003,0.001").unwrap(), vec![0.01, 0.003, 0.001]);
        assert!(parse_sigmas("0.001,0.01").is_err());
        assert!(parse_sigmas("0.01,-1").is_err());
        assert!(parse("oracle --coupling 0.5 --sigmas 0.2").is_err());
        let cfg = parse("oracle --coupling 0.5 --radius 2").unwrap();
        assert_eq!(cfg.oracle.sigmas, vec![0.02, 0.006, 0.002]);
    }
}
