mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::Value;

#[derive(Parser, Debug)]
#[command(name = "mildns", version, about = "Critical norms, explicit data and mild solutions of 3D Navier-Stokes on a periodic box")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Every norm of a field file
    Norms { field: PathBuf },
    /// Build the large-BMO⁻¹ / small-Besov example and verify it
    GenExample,
    /// Solve from a field file (Picard iteration or ETD marching)
    Solve { field: PathBuf },
    /// Energy ledger of a stored trajectory
    Energy { trajectory: PathBuf },
    /// Measure the bilinear estimates over a corpus of heat-flow trajectories
    Probe,
    /// Decay constant, far-field slope and scaling collapse of the Oseen kernel
    Kernel,
}

#[derive(Args, Debug)]
struct Flags {
    /// JSON object of dotted keys (e.g. {"grid.n": 64}); flags override it
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Points per axis
    #[arg(long, global = true)]
    grid: Option<usize>,
    /// Box length L = 2π·2^k
    #[arg(long = "box-exp", global = true, allow_hyphen_values = true)]
    box_exp: Option<i32>,
    #[arg(long, global = true)]
    eps: Option<f64>,
    #[arg(long = "M", global = true)]
    m: Option<f64>,
    #[arg(long = "E", global = true)]
    energy: Option<f64>,
    #[arg(long, global = true)]
    mu0: Option<f64>,
    #[arg(long = "C0", global = true)]
    c0: Option<f64>,
    /// Time samples per octave
    #[arg(long, global = true)]
    ppo: Option<u32>,
    /// Spatial stride of ball centres
    #[arg(long, global = true)]
    stride: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// picard | etd
    #[arg(long, global = true)]
    mode: Option<String>,
    /// Block spread q₁ − q₀ of the example
    #[arg(long, global = true)]
    spread: Option<u32>,
    /// Comma-separated spreads for the example sweep
    #[arg(long, global = true, value_delimiter = ',')]
    sweep: Option<Vec<u32>>,
    /// Cap the Carleson supremum at t ≤ cap
    #[arg(long = "delta-cap", global = true)]
    delta_cap: Option<f64>,
    /// Comma-separated kernel times
    #[arg(long, global = true, value_delimiter = ',')]
    times: Option<Vec<f64>>,
    /// Any config key: --set key=json
    #[arg(long = "set", global = true)]
    set: Vec<String>,
}

impl Flags {
    fn overrides(&self) -> anyhow::Result<Vec<(String, Value)>> {
        let mut o: Vec<(String, Value)> = Vec::new();
        let mut put = |k: &str, v: Value| o.push((k.to_string(), v));
        if let Some(v) = self.grid {
            put("grid.n", v.into());
        }
        if let Some(v) = self.box_exp {
            put("grid.box_exp", v.into());
        }
        if let Some(v) = self.eps {
            put("example.eps", v.into());
            put("solve.eps", v.into());
        }
        if let Some(v) = self.m {
            put("example.M", v.into());
        }
        if let Some(v) = self.energy {
            put("example.E", v.into());
        }
        if let Some(v) = self.mu0 {
            put("constants.mu0", v.into());
        }
        if let Some(v) = self.c0 {
            put("constants.C0", v.into());
        }
        if let Some(v) = self.ppo {
            put("time.ppo", v.into());
        }
        if let Some(v) = self.stride {
            put("norms.stride", v.into());
        }
        if let Some(v) = self.seed {
            put("seed", v.into());
        }
        if let Some(v) = &self.out {
            put("out", v.to_string_lossy().into_owned().into());
        }
        if let Some(v) = &self.mode {
            put("solve.mode", v.clone().into());
        }
        if let Some(v) = self.spread {
            put("example.spread", v.into());
        }
        if let Some(v) = &self.sweep {
            put("example.sweep", serde_json::to_value(v)?);
        }
        if let Some(v) = self.delta_cap {
            put("norms.delta_cap", v.into());
        }
        if let Some(v) = &self.times {
            put("kernel.times", serde_json::to_value(v)?);
        }
        for s in &self.set {
            let (k, v) = s
                .split_once('=')
                .ok_or_else(|| anyhow::anyhow!("--set expects key=value, got '{s}'"))?;
            let v = serde_json::from_str(v).unwrap_or_else(|_| Value::String(v.to_string()));
            put(k, v);
        }
        Ok(o)
    }
}

/// Exit status of a successful run.
pub enum Outcome {
    Done,
    Diverged,
}

const EXIT_INPUT: u8 = 2;
const EXIT_DIVERGED: u8 = 3;
const EXIT_INTERNAL: u8 = 4;

fn exit_code(e: &anyhow::Error) -> u8 {
    use mildns::Error as E;
    match e.chain().find_map(|c| c.downcast_ref::<mildns::Error>()) {
        Some(E::StepFailure(_) | E::SpectrumOverflow(_) | E::SizeMismatch { .. } | E::GridMismatch) => EXIT_INTERNAL,
        _ => EXIT_INPUT,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let run = || -> anyhow::Result<Outcome> {
        let cfg = config::resolve(cli.flags.config.as_deref(), &cli.flags.overrides()?)?;
        commands::run(&cli.command, &cfg)
    };
    match std::panic::catch_unwind(std::panic::AssertUnwindSafe(run)) {
        Ok(Ok(Outcome::Done)) => ExitCode::SUCCESS,
        Ok(Ok(Outcome::Diverged)) => ExitCode::from(EXIT_DIVERGED),
        Ok(Err(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
        Err(_) => ExitCode::from(EXIT_INTERNAL),
    }
}
