//! Command-line parsing and exit codes.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{parse_config, Command, Overrides};
use crate::run::run;

#[derive(Debug, Parser)]
#[command(name = "cascade-discord", version, about = "Polarization correlations of quantum-dot cascade photon pairs")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Write the two-photon polarization state as a 4x4 matrix file
    State(Common),
    /// Mutual information, classical correlation, discord and concurrence of one state
    Measures {
        #[command(flatten)]
        common: Common,
        /// Evaluate this matrix file instead of the configured dot
        #[arg(long)]
        state_file: Option<PathBuf>,
    },
    /// Correlations as a function of temperature
    SweepTemperature(Common),
    /// Correlations as a function of the gate delay
    SweepDelay(Common),
    /// T_c and T_d as a function of the gate delay
    CriticalVsDelay(Common),
    /// T_c and T_d as a function of the fine structure splitting
    CriticalVsFss(Common),
    /// Find kappa_ref giving a target T_c
    CalibrateKappa(Common),
}

#[derive(Debug, Args)]
struct Common {
    /// TOML config with [dot], [gate], [mixture], [sweep], [output] sections
    #[arg(long, short)]
    config: Option<PathBuf>,
    /// Fine structure splitting S, µeV
    #[arg(long)]
    splitting: Option<f64>,
    /// Temperature T, K
    #[arg(long)]
    temperature: Option<f64>,
    /// Phonon rate kappa_ref at S_ref, 1/ns
    #[arg(long)]
    kappa_ref: Option<f64>,
    /// Indistinguishable fraction eta
    #[arg(long)]
    eta: Option<f64>,
    /// Background noise fraction g
    #[arg(long)]
    noise: Option<f64>,
    /// Gate delay tau_g, ns
    #[arg(long)]
    tau_g: Option<f64>,
    /// Gate width w_g, ns
    #[arg(long)]
    w_g: Option<f64>,
    /// Lower end of the swept axis
    #[arg(long, allow_negative_numbers = true)]
    lo: Option<f64>,
    /// Upper end of the swept axis
    #[arg(long, allow_negative_numbers = true)]
    hi: Option<f64>,
    /// Number of axis points
    #[arg(long)]
    points: Option<usize>,
    /// Lower end of the temperature search window, K
    #[arg(long)]
    t_lo: Option<f64>,
    /// Upper end of the temperature search window, K
    #[arg(long)]
    t_hi: Option<f64>,
    /// Bisection resolution, K
    #[arg(long)]
    resolution: Option<f64>,
    /// Target T_c for calibrate-kappa, K
    #[arg(long)]
    target: Option<f64>,
    /// Output directory
    #[arg(long, short)]
    out: Option<PathBuf>,
    /// Worker threads (default: CASCADE_DISCORD_THREADS, then available cores)
    #[arg(long)]
    threads: Option<usize>,
}

impl Common {
    fn overrides(&self, state_file: Option<PathBuf>) -> Overrides {
        Overrides {
            splitting: self.splitting,
            temperature: self.temperature,
            kappa_ref: self.kappa_ref,
            eta: self.eta,
            noise: self.noise,
            gate_delay: self.tau_g,
            gate_width: self.w_g,
            lo: self.lo,
            hi: self.hi,
            n_points: self.points,
            t_lo: self.t_lo,
            t_hi: self.t_hi,
            resolution: self.resolution,
            target_tc: self.target,
            output_dir: self.out.clone(),
            threads: self.threads,
            state_file,
        }
    }
}

/// Parses `args`, runs the command and returns the process exit code:
/// 0 on success, 1 on usage, config or I/O errors, 2 if any point failed.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let (command, common, state_file) = match cli.command {
        Cmd::State(c) => (Command::State, c, None),
        Cmd::Measures { common, state_file } => (Command::Measures, common, state_file),
        Cmd::SweepTemperature(c) => (Command::SweepTemperature, c, None),
        Cmd::SweepDelay(c) => (Command::SweepDelay, c, None),
        Cmd::CriticalVsDelay(c) => (Command::CriticalVsDelay, c, None),
        Cmd::CriticalVsFss(c) => (Command::CriticalVsFss, c, None),
        Cmd::CalibrateKappa(c) => (Command::CalibrateKappa, c, None),
    };
    let overrides = common.overrides(state_file);
    let config = match parse_config(command, common.config.as_deref(), &overrides) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    match run(&config) {
        Ok(outcome) => {
            println!("{}", outcome.summary);
            if outcome.failed_points > 0 {
                eprintln!("error: {} point(s) failed; see the error column", outcome.failed_points);
                2
            } else {
                0
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
