//! Command execution, CSV tables and the run manifest.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use cascade_discord::{
    calibrate_kappa, critical_vs, polarization_state, quantum_discord, sweep, Axis, Calibration,
    CorrelationReport, CriticalPoint, DotParams, TwoPhotonState, CONSTANTS,
};
use serde_json::{json, Value};

use crate::config::{Command, RunConfig};
use crate::error::CliError;
use crate::format::g9;

pub const MANIFEST: &str = "manifest.json";

const MEASURE_COLUMNS: [&str; 6] = ["mutual_bits", "classical_bits", "discord_bits", "concurrence", "theta_opt_rad", "error"];
const CRITICAL_COLUMNS: [&str; 7] =
    ["Tc_K", "Td_K", "Tc_bracket_lo", "Tc_bracket_hi", "Td_bracket_lo", "Td_bracket_hi", "error"];

#[derive(Debug, Clone)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub failed_points: usize,
    /// One-line human summary for stdout.
    pub summary: String,
}

struct Produced {
    files: Vec<PathBuf>,
    failed_points: usize,
    summary: String,
    extra: Option<(&'static str, Value)>,
}

/// Runs `config` on a pool of `config.threads` workers and writes its
/// outputs plus `manifest.json` into `config.output_dir`.
pub fn run(config: &RunConfig) -> Result<Outcome, CliError> {
    fs::create_dir_all(&config.output_dir)
        .map_err(|e| CliError::Io(format!("{}: {e}", config.output_dir.display())))?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.threads)
        .build()
        .map_err(|e| CliError::Io(e.to_string()))?;
    let start = Instant::now();
    let produced = pool.install(|| execute(config))?;
    let wall = start.elapsed().as_secs_f64();
    write_manifest(config, &produced, wall)?;

    let mut files = produced.files;
    files.push(config.output_dir.join(MANIFEST));
    Ok(Outcome {
        files,
        failed_points: produced.failed_points,
        summary: produced.summary,
    })
}

fn execute(config: &RunConfig) -> Result<Produced, CliError> {
    let p = &config.params;
    let s = &config.sweep;
    let dir = &config.output_dir;
    match config.command {
        Command::State => {
            let rho = polarization_state(p)?;
            let path = dir.join("state.txt");
            fs::write(&path, rho.to_string())?;
            Ok(Produced {
                summary: format!("wrote {}", path.display()),
                files: vec![path],
                failed_points: 0,
                extra: None,
            })
        }
        Command::Measures => {
            let rho = match &config.state_file {
                Some(f) => read_state(f)?,
                None => polarization_state(p)?,
            };
            let result = quantum_discord(&rho);
            let path = dir.join("measures.csv");
            let mut w = csv::Writer::from_path(&path)?;
            w.write_record(MEASURE_COLUMNS)?;
            w.write_record(measure_fields(&result))?;
            w.flush()?;
            let summary = match &result {
                Ok(r) => format!(
                    "I = {} C = {} Q = {} concurrence = {}",
                    g9(r.mutual_info),
                    g9(r.classical),
                    g9(r.discord),
                    g9(r.concurrence)
                ),
                Err(e) => format!("failed: {e}"),
            };
            Ok(Produced {
                files: vec![path],
                failed_points: usize::from(result.is_err()),
                summary,
                extra: None,
            })
        }
        Command::SweepTemperature | Command::SweepDelay => {
            let (axis, name) = if config.command == Command::SweepTemperature {
                (Axis::Temperature, "sweep_temperature.csv")
            } else {
                (Axis::Delay, "sweep_delay.csv")
            };
            let table = sweep(p, axis, (s.lo, s.hi), s.n_points)?;
            let path = dir.join(name);
            let mut w = csv::Writer::from_path(&path)?;
            let mut header = vec![axis.column()];
            header.extend(MEASURE_COLUMNS);
            w.write_record(&header)?;
            for row in &table.rows {
                let mut rec = vec![g9(row.axis_value)];
                rec.extend(measure_fields(&row.outcome));
                w.write_record(&rec)?;
            }
            w.flush()?;
            let failed = table.failures();
            let intervals = table.discord_above_classical();
            let summary = format!(
                "{} points, {failed} failed; discord above classical on {}",
                table.rows.len(),
                describe_intervals(&intervals)
            );
            let extra = json!(intervals.iter().map(|(a, b)| [*a, *b]).collect::<Vec<_>>());
            Ok(Produced {
                files: vec![path],
                failed_points: failed,
                summary,
                extra: Some(("discord_above_classical", extra)),
            })
        }
        Command::CriticalVsDelay | Command::CriticalVsFss => {
            let (axis, name) = if config.command == Command::CriticalVsDelay {
                (Axis::Delay, "critical_vs_delay.csv")
            } else {
                (Axis::Fss, "critical_vs_fss.csv")
            };
            let rows = critical_vs(p, axis, (s.lo, s.hi), s.n_points, s.t_range, s.resolution)?;
            let path = dir.join(name);
            let mut w = csv::Writer::from_path(&path)?;
            let mut header = vec![axis.column()];
            header.extend(CRITICAL_COLUMNS);
            w.write_record(&header)?;
            let mut failed = 0;
            for row in &rows {
                let value = |r: &cascade_discord::Result<CriticalPoint>| r.as_ref().map(|c| g9(c.value)).unwrap_or_default();
                let lo = |r: &cascade_discord::Result<CriticalPoint>| r.as_ref().map(|c| g9(c.bracket.0)).unwrap_or_default();
                let hi = |r: &cascade_discord::Result<CriticalPoint>| r.as_ref().map(|c| g9(c.bracket.1)).unwrap_or_default();
                let mut errors = Vec::new();
                if let Err(e) = &row.sudden_change {
                    errors.push(format!("Tc: {e}"));
                }
                if let Err(e) = &row.sudden_death {
                    errors.push(format!("Td: {e}"));
                }
                failed += usize::from(!errors.is_empty());
                w.write_record([
                    g9(row.axis_value),
                    value(&row.sudden_change),
                    value(&row.sudden_death),
                    lo(&row.sudden_change),
                    hi(&row.sudden_change),
                    lo(&row.sudden_death),
                    hi(&row.sudden_death),
                    errors.join("; "),
                ])?;
            }
            w.flush()?;
            Ok(Produced {
                files: vec![path],
                failed_points: failed,
                summary: format!("{} points, {failed} failed", rows.len()),
                extra: None,
            })
        }
        Command::CalibrateKappa => {
            let cal = calibrate_kappa(p, s.target_tc, s.kappa_range, s.t_range, s.resolution, s.tolerance)?;
            let doubled = calibrate_kappa(p, 2.0 * s.target_tc, s.kappa_range, s.t_range, s.resolution, s.tolerance);
            let direction = match &doubled {
                Ok(d) if d.kappa_ref < cal.kappa_ref => "decreasing",
                Ok(d) if d.kappa_ref > cal.kappa_ref => "increasing",
                Ok(_) => "flat",
                Err(_) => "unknown",
            };
            let snippet = format!("[dot]\nkappa_ref = {:?}\n", cal.kappa_ref);
            let path = dir.join("calibration.toml");
            fs::write(&path, &snippet)?;
            let extra = json!({
                "target_Tc_K": cal.target_tc,
                "kappa_ref": cal.kappa_ref,
                "achieved_Tc_K": cal.achieved.value,
                "achieved_bracket_K": [cal.achieved.bracket.0, cal.achieved.bracket.1],
                "iterations": cal.iterations,
                "tolerance_K": cal.tolerance,
                "doubled_target_Tc_K": 2.0 * s.target_tc,
                "doubled_target_kappa_ref": doubled.as_ref().ok().map(|d: &Calibration| d.kappa_ref),
                "doubled_target_error": doubled.as_ref().err().map(|e| e.to_string()),
                "kappa_vs_target": direction,
                "config_snippet": snippet,
            });
            Ok(Produced {
                files: vec![path],
                failed_points: 0,
                summary: format!(
                    "kappa_ref = {:?} 1/ns gives T_c = {} K; kappa_ref is {direction} in the target\n{snippet}",
                    cal.kappa_ref,
                    g9(cal.achieved.value)
                ),
                extra: Some(("calibration", extra)),
            })
        }
    }
}

fn read_state(path: &Path) -> Result<TwoPhotonState, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    text.parse::<TwoPhotonState>()
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn measure_fields(r: &cascade_discord::Result<CorrelationReport>) -> Vec<String> {
    match r {
        Ok(r) => vec![
            g9(r.mutual_info),
            g9(r.classical),
            g9(r.discord),
            g9(r.concurrence),
            g9(r.optimal_direction.theta),
            String::new(),
        ],
        Err(e) => {
            let mut v = vec![String::new(); 5];
            v.push(e.to_string());
            v
        }
    }
}

fn describe_intervals(intervals: &[(f64, f64)]) -> String {
    if intervals.is_empty() {
        return "no grid point".into();
    }
    intervals
        .iter()
        .map(|(a, b)| format!("[{}, {}]", g9(*a), g9(*b)))
        .collect::<Vec<_>>()
        .join(", ")
}

fn params_json(p: &DotParams) -> Value {
    json!({
        "S": p.splitting,
        "T": p.temperature,
        "gammaX_H": p.gamma_x_h,
        "gammaX_V": p.gamma_x_v,
        "gammaXX_H": p.gamma_xx_h,
        "gammaXX_V": p.gamma_xx_v,
        "kappa_ref": p.kappa_ref,
        "S_ref": p.splitting_ref,
        "eta": p.eta,
        "g": p.noise,
        "tau_g": p.gate_delay,
        "w_g": p.gate_width,
    })
}

fn write_manifest(config: &RunConfig, produced: &Produced, wall: f64) -> Result<(), CliError> {
    let mut m = json!({
        "command": config.command.name(),
        "version": env!("CARGO_PKG_VERSION"),
        "inputs": {
            "params": params_json(&config.params),
            "sweep": config.sweep,
            "state_file": config.state_file.as_ref().map(|p| p.display().to_string()),
        },
        "constants": { "hbar_ueV_ns": CONSTANTS.hbar, "kB_ueV_per_K": CONSTANTS.k_b, "h_ueV_ns": CONSTANTS.h },
        "threads": config.threads,
        "wall_time_s": wall,
        "outputs": produced.files.iter().filter_map(|f| f.file_name()).map(|f| f.to_string_lossy().into_owned()).collect::<Vec<_>>(),
        "failed_points": produced.failed_points,
        "config": config.to_toml(),
    });
    if let Some((key, value)) = &produced.extra {
        m[*key] = value.clone();
    }
    fs::write(config.output_dir.join(MANIFEST), serde_json::to_string_pretty(&m)? + "\n")?;
    Ok(())
}
