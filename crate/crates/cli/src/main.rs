//! `qslr`: batch front end for quaternion low-rank restoration.
//!
//! Exit codes: 0 success, 1 solver failure, 2 config error, 3 I/O error.

mod config;
mod manifest;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use qslr_core::presets::Task;
use qslr_core::QslrError;

use config::Overrides;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub msg: String,
}

impl Failure {
    pub fn solver(msg: impl Into<String>) -> Self {
        Failure { code: 1, msg: msg.into() }
    }

    pub fn config(msg: impl Into<String>) -> Self {
        Failure { code: 2, msg: msg.into() }
    }

    pub fn io(msg: impl Into<String>) -> Self {
        Failure { code: 3, msg: msg.into() }
    }
}

impl From<QslrError> for Failure {
    fn from(e: QslrError) -> Self {
        let msg = e.to_string();
        match e {
            QslrError::Config(_) | QslrError::Shape(_) => Failure::config(msg),
            QslrError::Io { .. } => Failure::io(msg),
            QslrError::Domain(_) | QslrError::Numerical(_) | QslrError::Divergence { .. } => Failure::solver(msg),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Family {
    A,
    B,
}

#[derive(Parser)]
#[command(name = "qslr", version, about = "Quaternion low-rank color image restoration")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Add noise to an image (or load a noisy one) and restore it
    Denoise(Overrides),
    /// Mask an image (sampled or loaded mask) and fill in the missing pixels
    Inpaint(Overrides),
    /// Evaluate the convergence assumptions for a configuration
    Check {
        #[command(flatten)]
        ov: Overrides,
        /// A for denoising, B for inpainting; defaults to the preset's task
        #[arg(long, value_enum)]
        family: Option<Family>,
        #[arg(long, default_value_t = 0.5)]
        kappa: f64,
        /// merit constant r > 1; defaults to the solver's merit_r
        #[arg(long)]
        r: Option<f64>,
        /// Lipschitz constant of the smoothed penalty gradient (default: estimate)
        #[arg(long)]
        l_f: Option<f64>,
        /// Huber threshold to check at (default: smallest scheduled)
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long)]
        full_observation: bool,
        /// exit 1 when any non-informational inequality fails
        #[arg(long)]
        strict: bool,
    },
    /// Per-iteration `k,increment` rows from a trace CSV
    Plotdata {
        trace: PathBuf,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// List preset names
    Presets,
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    match cli.cmd {
        Command::Denoise(ov) => {
            let (cfg, _) = config::resolve(&ov, Task::Denoise)?;
            run::denoise(&cfg)
        }
        Command::Inpaint(ov) => {
            let (cfg, _) = config::resolve(&ov, Task::Inpaint)?;
            run::inpaint(&cfg)
        }
        Command::Check {
            ov,
            family,
            kappa,
            r,
            l_f,
            delta,
            full_observation,
            strict,
        } => {
            let default_task = match family {
                Some(Family::B) => Task::Inpaint,
                _ => Task::Denoise,
            };
            let (cfg, task) = config::resolve(&ov, default_task)?;
            let task = match family {
                Some(Family::A) => Task::Denoise,
                Some(Family::B) => Task::Inpaint,
                None => task,
            };
            let opts = qslr_core::solvers::CheckOptions {
                kappa,
                r: r.unwrap_or(cfg.solver.merit_r),
                l_f,
                delta,
                full_observation,
            };
            let pass = run::check(&cfg, task, &opts);
            if strict && !pass {
                return Err(Failure::solver("assumption check failed"));
            }
            Ok(())
        }
        Command::Plotdata { trace, output } => run::plotdata(&trace, output.as_deref()),
        Command::Presets => {
            for n in qslr_core::presets::NAMES {
                println!("{n}");
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("qslr: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
