//! Run configuration: TOML file, command-line overrides and defaults.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use cascade_discord::critical::{DEFAULT_KAPPA_RANGE, DEFAULT_RESOLUTION, DEFAULT_T_RANGE};
use cascade_discord::DotParams;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const THREADS_ENV: &str = "CASCADE_DISCORD_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    State,
    Measures,
    SweepTemperature,
    SweepDelay,
    CriticalVsDelay,
    CriticalVsFss,
    CalibrateKappa,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::State => "state",
            Command::Measures => "measures",
            Command::SweepTemperature => "sweep-temperature",
            Command::SweepDelay => "sweep-delay",
            Command::CriticalVsDelay => "critical-vs-delay",
            Command::CriticalVsFss => "critical-vs-fss",
            Command::CalibrateKappa => "calibrate-kappa",
        }
    }

    /// Default `(lo, hi, n_points)` of the swept axis.
    fn default_axis(self) -> (f64, f64, usize) {
        match self {
            Command::SweepTemperature => (1.0, 80.0, 100),
            Command::SweepDelay => (0.0, 1.5, 31),
            Command::CriticalVsDelay => (0.05, 1.0, 20),
            Command::CriticalVsFss => (1.0, 6.0, 11),
            _ => (0.0, 1.0, 2),
        }
    }

    /// Critical temperatures along delay/splitting axes reach well past the
    /// default temperature window.
    fn default_t_range(self) -> (f64, f64) {
        match self {
            Command::CriticalVsDelay | Command::CriticalVsFss => (0.5, 600.0),
            _ => DEFAULT_T_RANGE,
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    dot: Option<DotSection>,
    gate: Option<GateSection>,
    mixture: Option<MixtureSection>,
    sweep: Option<SweepSection>,
    output: Option<OutputSection>,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(non_snake_case)]
struct DotSection {
    S: Option<f64>,
    T: Option<f64>,
    gammaX_H: Option<f64>,
    gammaX_V: Option<f64>,
    gammaXX_H: Option<f64>,
    gammaXX_V: Option<f64>,
    kappa_ref: Option<f64>,
    S_ref: Option<f64>,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct GateSection {
    tau_g: Option<f64>,
    w_g: Option<f64>,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct MixtureSection {
    eta: Option<f64>,
    g: Option<f64>,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(non_snake_case)]
struct SweepSection {
    lo: Option<f64>,
    hi: Option<f64>,
    n_points: Option<usize>,
    T_lo: Option<f64>,
    T_hi: Option<f64>,
    resolution: Option<f64>,
    target_Tc: Option<f64>,
    kappa_lo: Option<f64>,
    kappa_hi: Option<f64>,
    tolerance: Option<f64>,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct OutputSection {
    dir: Option<PathBuf>,
    threads: Option<usize>,
}

/// Values given on the command line; each replaces the file value.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub splitting: Option<f64>,
    pub temperature: Option<f64>,
    pub kappa_ref: Option<f64>,
    pub eta: Option<f64>,
    pub noise: Option<f64>,
    pub gate_delay: Option<f64>,
    pub gate_width: Option<f64>,
    pub lo: Option<f64>,
    pub hi: Option<f64>,
    pub n_points: Option<usize>,
    pub t_lo: Option<f64>,
    pub t_hi: Option<f64>,
    pub resolution: Option<f64>,
    pub target_tc: Option<f64>,
    pub output_dir: Option<PathBuf>,
    pub threads: Option<usize>,
    pub state_file: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSettings {
    pub lo: f64,
    pub hi: f64,
    pub n_points: usize,
    pub t_range: (f64, f64),
    pub resolution: f64,
    pub target_tc: f64,
    pub kappa_range: (f64, f64),
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub params: DotParams,
    pub sweep: SweepSettings,
    pub output_dir: PathBuf,
    pub threads: usize,
    pub state_file: Option<PathBuf>,
}

fn pick<T: Copy>(flag: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(file).unwrap_or(default)
}

/// Reads `path` (if any), applies `overrides` and validates the result.
pub fn parse_config(command: Command, path: Option<&Path>, overrides: &Overrides) -> Result<RunConfig, CliError> {
    let file = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
            parse_text(&text).map_err(|msg| CliError::Config(format!("{}: {msg}", p.display())))?
        }
        None => FileConfig::default(),
    };
    build(command, file, overrides)
}

/// Parses config text; errors carry the line and column of the offending key.
fn parse_text(text: &str) -> Result<FileConfig, String> {
    toml::from_str(text).map_err(|e| {
        let line = e
            .span()
            .map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1);
        match line {
            Some(l) => format!("line {l}: {}", e.message()),
            None => e.message().to_string(),
        }
    })
}

pub fn parse_config_text(command: Command, text: &str, overrides: &Overrides) -> Result<RunConfig, CliError> {
    build(command, parse_text(text).map_err(CliError::Config)?, overrides)
}

fn build(command: Command, file: FileConfig, o: &Overrides) -> Result<RunConfig, CliError> {
    let d = DotParams::default();
    let dot = file.dot.unwrap_or_default();
    let gate = file.gate.unwrap_or_default();
    let mix = file.mixture.unwrap_or_default();
    let sweep = file.sweep.unwrap_or_default();
    let out = file.output.unwrap_or_default();

    let params = DotParams {
        splitting: pick(o.splitting, dot.S, d.splitting),
        temperature: pick(o.temperature, dot.T, d.temperature),
        gamma_x_h: dot.gammaX_H.unwrap_or(d.gamma_x_h),
        gamma_x_v: dot.gammaX_V.unwrap_or(d.gamma_x_v),
        gamma_xx_h: dot.gammaXX_H.unwrap_or(d.gamma_xx_h),
        gamma_xx_v: dot.gammaXX_V.unwrap_or(d.gamma_xx_v),
        kappa_ref: pick(o.kappa_ref, dot.kappa_ref, d.kappa_ref),
        splitting_ref: dot.S_ref.unwrap_or(d.splitting_ref),
        eta: pick(o.eta, mix.eta, d.eta),
        noise: pick(o.noise, mix.g, d.noise),
        gate_delay: pick(o.gate_delay, gate.tau_g, d.gate_delay),
        gate_width: pick(o.gate_width, gate.w_g, d.gate_width),
    };
    params.validate().map_err(|e| CliError::Config(e.to_string()))?;

    let (lo, hi, n) = command.default_axis();
    let t_range = command.default_t_range();
    let settings = SweepSettings {
        lo: pick(o.lo, sweep.lo, lo),
        hi: pick(o.hi, sweep.hi, hi),
        n_points: pick(o.n_points, sweep.n_points, n),
        t_range: (pick(o.t_lo, sweep.T_lo, t_range.0), pick(o.t_hi, sweep.T_hi, t_range.1)),
        resolution: pick(o.resolution, sweep.resolution, DEFAULT_RESOLUTION),
        target_tc: pick(o.target_tc, sweep.target_Tc, 10.0),
        kappa_range: (
            sweep.kappa_lo.unwrap_or(DEFAULT_KAPPA_RANGE.0),
            sweep.kappa_hi.unwrap_or(DEFAULT_KAPPA_RANGE.1),
        ),
        tolerance: sweep.tolerance.unwrap_or(0.05),
    };
    validate_sweep(&settings)?;

    let threads = o
        .threads
        .or_else(|| std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse().ok()))
        .or(out.threads)
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1));
    if threads == 0 {
        return Err(CliError::Config("invalid threads = 0: need at least one worker".into()));
    }

    Ok(RunConfig {
        command,
        params,
        sweep: settings,
        output_dir: o.output_dir.clone().or(out.dir).unwrap_or_else(|| PathBuf::from("out")),
        threads,
        state_file: o.state_file.clone(),
    })
}

fn validate_sweep(s: &SweepSettings) -> Result<(), CliError> {
    let bad = |key: &str, value: String, why: &str| Err(CliError::Config(format!("invalid {key} = {value}: {why}")));
    if !(s.lo.is_finite() && s.hi.is_finite()) || s.lo >= s.hi {
        return bad("lo", format!("{}", s.lo), "sweep range needs lo < hi");
    }
    if s.n_points < 2 {
        return bad("n_points", s.n_points.to_string(), "need at least 2 points");
    }
    if !(s.t_range.0 >= 0.0 && s.t_range.0 < s.t_range.1) {
        return bad("T_lo", format!("{}", s.t_range.0), "temperature range needs 0 <= T_lo < T_hi");
    }
    if !(s.resolution > 0.0) {
        return bad("resolution", format!("{}", s.resolution), "must be > 0");
    }
    if !(s.tolerance > 0.0) {
        return bad("tolerance", format!("{}", s.tolerance), "must be > 0");
    }
    if !(s.kappa_range.0 > 0.0 && s.kappa_range.0 < s.kappa_range.1) {
        return bad("kappa_lo", format!("{}", s.kappa_range.0), "needs 0 < kappa_lo < kappa_hi");
    }
    Ok(())
}

impl RunConfig {
    /// Effective configuration as config-file text; feeding it back through
    /// [`parse_config_text`] reproduces this run.
    pub fn to_toml(&self) -> String {
        let p = &self.params;
        let s = &self.sweep;
        let mut t = String::new();
        // `{:?}` prints the shortest text that parses back to the same f64
        let _ = writeln!(t, "[dot]");
        for (k, v) in [
            ("S", p.splitting),
            ("T", p.temperature),
            ("gammaX_H", p.gamma_x_h),
            ("gammaX_V", p.gamma_x_v),
            ("gammaXX_H", p.gamma_xx_h),
            ("gammaXX_V", p.gamma_xx_v),
            ("kappa_ref", p.kappa_ref),
            ("S_ref", p.splitting_ref),
        ] {
            let _ = writeln!(t, "{k} = {v:?}");
        }
        let _ = writeln!(t, "\n[gate]\ntau_g = {:?}\nw_g = {:?}", p.gate_delay, p.gate_width);
        let _ = writeln!(t, "\n[mixture]\neta = {:?}\ng = {:?}", p.eta, p.noise);
        let _ = writeln!(t, "\n[sweep]");
        let _ = writeln!(t, "lo = {:?}\nhi = {:?}\nn_points = {}", s.lo, s.hi, s.n_points);
        let _ = writeln!(t, "T_lo = {:?}\nT_hi = {:?}\nresolution = {:?}", s.t_range.0, s.t_range.1, s.resolution);
        let _ = writeln!(t, "target_Tc = {:?}\ntolerance = {:?}", s.target_tc, s.tolerance);
        let _ = writeln!(t, "kappa_lo = {:?}\nkappa_hi = {:?}", s.kappa_range.0, s.kappa_range.1);
        t
    }
}
