//! Experiment configuration: preset, then JSON file, then command-line flags.

use std::path::{Path, PathBuf};

use clap::Args;
use qslr_core::nss::NssConfig;
use qslr_core::pipeline::{PipelineOptions, Representation};
use qslr_core::presets::{self, Task};
use qslr_core::solvers::SolverConfig;
use qslr_core::surrogates::SurrogateKind;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::Failure;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub preset: Option<String>,
    /// clean image; required for denoise and inpaint
    pub input: Option<PathBuf>,
    /// denoise: use this noisy image instead of synthesizing noise
    pub noisy: Option<PathBuf>,
    /// inpaint: use this mask instead of sampling one
    pub mask: Option<PathBuf>,
    pub out_dir: PathBuf,
    /// restored image path; defaults to `out_dir/restored.png`
    pub output: Option<PathBuf>,
    pub seed: u64,
    /// noise level in 8-bit units; defaults to `solver.tau`
    pub noise_tau: Option<f64>,
    /// fraction of missing pixels for sampled masks
    pub chi: f64,
    pub representation: Representation,
    pub intensity_scale: f64,
    pub solver: SolverConfig,
    pub nss: Option<NssConfig>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let p = PipelineOptions::default();
        ExperimentConfig {
            preset: None,
            input: None,
            noisy: None,
            mask: None,
            out_dir: PathBuf::from("qslr-out"),
            output: None,
            seed: 0,
            noise_tau: None,
            chi: 0.5,
            representation: p.representation,
            intensity_scale: p.intensity_scale,
            solver: SolverConfig::default(),
            nss: None,
        }
    }
}

impl ExperimentConfig {
    pub fn pipeline(&self) -> PipelineOptions {
        PipelineOptions {
            representation: self.representation,
            intensity_scale: self.intensity_scale,
            nss: self.nss.clone(),
        }
    }

    pub fn noise_tau(&self) -> f64 {
        self.noise_tau.unwrap_or(self.solver.tau)
    }

    pub fn output_path(&self) -> PathBuf {
        self.output.clone().unwrap_or_else(|| self.out_dir.join("restored.png"))
    }

    pub fn validate(&self) -> Result<(), Failure> {
        self.solver.validate()?;
        self.pipeline().validate()?;
        if !(0.0..1.0).contains(&self.chi) {
            return Err(Failure::config(format!("chi must lie in [0, 1), got {}", self.chi)));
        }
        if let Some(t) = self.noise_tau {
            if !(t >= 0.0 && t.is_finite()) {
                return Err(Failure::config("noise_tau must be finite and >= 0"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    /// JSON experiment config
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// named parameter set (see `qslr presets`)
    #[arg(long)]
    pub preset: Option<String>,
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub noisy: Option<PathBuf>,
    #[arg(long)]
    pub mask: Option<PathBuf>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long)]
    pub noise_tau: Option<f64>,
    #[arg(long)]
    pub chi: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub beta1: Option<f64>,
    #[arg(long)]
    pub beta2: Option<f64>,
    #[arg(long)]
    pub mu: Option<f64>,
    #[arg(long)]
    pub l1: Option<f64>,
    #[arg(long)]
    pub l2: Option<f64>,
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long)]
    pub max_outer: Option<usize>,
    /// surrogate kind, e.g. nuclear, schatten_gamma, laplace, log_det
    #[arg(long)]
    pub surrogate: Option<String>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// quaternion or rgb
    #[arg(long)]
    pub representation: Option<String>,
    #[arg(long)]
    pub intensity_scale: Option<f64>,
    /// wrap the solver in nonlocal self-similarity grouping
    #[arg(long)]
    pub nss: bool,
    #[arg(long)]
    pub warm_start: bool,
    /// write zero wall times (also `QSLR_DETERMINISTIC=1`)
    #[arg(long)]
    pub no_timing: bool,
}

fn read_text(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::io(format!("{}: {e}", path.display())))
}

/// Parses JSON text, reporting syntax errors with line and column.
pub fn parse_json(text: &str, origin: &str) -> Result<Value, Failure> {
    serde_json::from_str(text).map_err(|e| {
        Failure::config(format!(
            "{origin}:{}:{}: {}",
            e.line(),
            e.column(),
            e
        ))
    })
}

/// Objects merge key by key; anything else replaces.
pub fn merge(base: &mut Value, over: Value) {
    match (base, over) {
        (Value::Object(b), Value::Object(o)) => {
            for (k, v) in o {
                match b.get_mut(&k) {
                    Some(slot) if slot.is_object() && v.is_object() => merge(slot, v),
                    _ => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (b, o) => *b = o,
    }
}

fn preset_base(name: &str) -> Result<(ExperimentConfig, Task), Failure> {
    let p = presets::preset(name).ok_or_else(|| {
        Failure::config(format!("unknown preset {name:?}; known: {}", presets::NAMES.join(", ")))
    })?;
    let cfg = ExperimentConfig {
        preset: Some(name.to_string()),
        solver: p.solver,
        nss: p.nss,
        ..ExperimentConfig::default()
    };
    Ok((cfg, p.task))
}

fn deterministic_env() -> bool {
    matches!(std::env::var("QSLR_DETERMINISTIC").as_deref(), Ok("1") | Ok("true"))
}

/// Resolves the experiment; `default_task` picks the base solver defaults when no preset is named.
pub fn resolve(ov: &Overrides, default_task: Task) -> Result<(ExperimentConfig, Task), Failure> {
    let file = match &ov.config {
        Some(path) => Some(parse_json(&read_text(path)?, &path.display().to_string())?),
        None => None,
    };
    let file_preset = file
        .as_ref()
        .and_then(|v| v.get("preset"))
        .and_then(|v| v.as_str())
        .map(str::to_string);
    let (base, task) = match ov.preset.clone().or(file_preset) {
        Some(name) => preset_base(&name)?,
        None => {
            let solver = match default_task {
                Task::Denoise => SolverConfig::default(),
                Task::Inpaint => SolverConfig::inpaint_default(),
            };
            (
                ExperimentConfig {
                    solver,
                    ..ExperimentConfig::default()
                },
                default_task,
            )
        }
    };
    let mut value = serde_json::to_value(&base).map_err(|e| Failure::config(e.to_string()))?;
    if let Some(f) = file {
        if !f.is_object() {
            return Err(Failure::config("config file must hold a JSON object"));
        }
        merge(&mut value, f);
    }
    if let Some(name) = &ov.preset {
        value["preset"] = Value::String(name.clone());
    }
    let mut cfg: ExperimentConfig =
        serde_json::from_value(value).map_err(|e| Failure::config(format!("invalid config: {e}")))?;
    apply(&mut cfg, ov)?;
    cfg.validate()?;
    Ok((cfg, task))
}

fn parse_kind(s: &str) -> Result<SurrogateKind, Failure> {
    serde_json::from_value(Value::String(s.to_string()))
        .map_err(|_| Failure::config(format!("unknown surrogate kind {s:?}")))
}

fn parse_representation(s: &str) -> Result<Representation, Failure> {
    match s {
        "quaternion" => Ok(Representation::Quaternion),
        "rgb" => Ok(Representation::Rgb),
        _ => Err(Failure::config(format!("representation must be quaternion or rgb, got {s:?}"))),
    }
}

fn apply(cfg: &mut ExperimentConfig, ov: &Overrides) -> Result<(), Failure> {
    macro_rules! set {
        ($src:expr => $dst:expr) => {
            if let Some(v) = $src.clone() {
                $dst = v;
            }
        };
    }
    if ov.input.is_some() {
        cfg.input = ov.input.clone();
    }
    if ov.noisy.is_some() {
        cfg.noisy = ov.noisy.clone();
    }
    if ov.mask.is_some() {
        cfg.mask = ov.mask.clone();
    }
    if ov.output.is_some() {
        cfg.output = ov.output.clone();
    }
    if ov.noise_tau.is_some() {
        cfg.noise_tau = ov.noise_tau;
    }
    set!(ov.out_dir => cfg.out_dir);
    set!(ov.seed => cfg.seed);
    set!(ov.chi => cfg.chi);
    set!(ov.intensity_scale => cfg.intensity_scale);
    let s = &mut cfg.solver;
    set!(ov.tau => s.tau);
    set!(ov.lambda => s.lambda);
    set!(ov.beta => s.beta);
    set!(ov.mu => s.mu);
    set!(ov.l1 => s.l1);
    set!(ov.l2 => s.l2);
    set!(ov.eta => s.eta);
    set!(ov.max_outer => s.max_outer);
    set!(ov.gamma => s.surrogate.gamma);
    set!(ov.epsilon => s.surrogate.epsilon);
    if ov.beta1.is_some() {
        s.beta1 = ov.beta1;
    }
    if ov.beta2.is_some() {
        s.beta2 = ov.beta2;
    }
    if let Some(k) = &ov.surrogate {
        s.surrogate.kind = parse_kind(k)?;
    }
    if ov.warm_start {
        s.warm_start = true;
    }
    if ov.no_timing || deterministic_env() {
        s.record_timing = false;
    }
    if let Some(r) = &ov.representation {
        cfg.representation = parse_representation(r)?;
    }
    if ov.nss && cfg.nss.is_none() {
        cfg.nss = Some(NssConfig::default());
    }
    Ok(())
}
