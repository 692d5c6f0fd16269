use serde::{Deserialize, Serialize};

use crate::error::{QslrError, Result};
use crate::surrogates::{SurrogateKind, SurrogateSpec};
use crate::transforms::TransformKind;

/// Huber threshold rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DeltaSchedule {
    /// `1` while the residual is at least `1e-2`, `1e-2` down to `1e-3`, then `1e-4`.
    Tiered,
    Fixed { delta: f64 },
}

impl DeltaSchedule {
    pub fn initial(&self) -> f64 {
        match *self {
            DeltaSchedule::Tiered => 1.0,
            DeltaSchedule::Fixed { delta } => delta,
        }
    }

    /// Threshold to use after a residual of `eps`.
    pub fn after(&self, eps: f64) -> f64 {
        match *self {
            DeltaSchedule::Tiered => {
                if eps >= 1e-2 {
                    1.0
                } else if eps >= 1e-3 {
                    1e-2
                } else {
                    1e-4
                }
            }
            DeltaSchedule::Fixed { delta } => delta,
        }
    }

    /// Smallest threshold the rule can reach.
    pub fn smallest(&self) -> f64 {
        match *self {
            DeltaSchedule::Tiered => 1e-4,
            DeltaSchedule::Fixed { delta } => delta,
        }
    }
}

/// Per-iteration weights `numerator / (sigma_i + offset)` for the weighted
/// Schatten surrogate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightRule {
    pub numerator: f64,
    #[serde(default = "default_offset")]
    pub offset: f64,
}

fn default_offset() -> f64 {
    1e-4
}

impl WeightRule {
    pub fn weights(&self, sigma: &[f64]) -> Vec<f64> {
        sigma.iter().map(|s| self.numerator / (s + self.offset)).collect()
    }
}

/// How the inpainting W-subproblem is solved.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum WStepMethod {
    /// entrywise division in transform coordinates
    Exact,
    /// fixed number of gradient steps from the previous iterate
    GradientDescent { iters: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    pub beta: f64,
    pub beta1: Option<f64>,
    pub beta2: Option<f64>,
    pub mu: f64,
    pub lambda: f64,
    /// data-term scale, in the units of the data; `0` pins `X = Y`
    pub tau: f64,
    pub l1: f64,
    pub l2: f64,
    pub eta: f64,
    pub eta_ccp: f64,
    pub max_outer: usize,
    pub max_ccp: usize,
    pub delta_schedule: DeltaSchedule,
    pub surrogate: SurrogateSpec,
    pub weight_rule: Option<WeightRule>,
    pub transform: TransformKind,
    pub w_step: WStepMethod,
    /// abort once an iterate norm exceeds this multiple of the data norm
    pub divergence_factor: f64,
    /// constant `r > 1` of the merit functions
    pub merit_r: f64,
    /// write wall-clock times into the trace; off gives byte-stable traces
    pub record_timing: bool,
    /// denoising only: start from `W₀ = 𝒲Y` instead of zero
    pub warm_start: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            beta: 10.0,
            beta1: None,
            beta2: None,
            mu: 1.1,
            lambda: 0.01,
            tau: 30.0,
            l1: 1.0,
            l2: 1.0,
            eta: 1e-4,
            eta_ccp: 1e-10,
            max_outer: 500,
            max_ccp: 500,
            delta_schedule: DeltaSchedule::Tiered,
            surrogate: SurrogateSpec::new(SurrogateKind::SchattenGamma, 0.5, 1e-2),
            weight_rule: None,
            transform: TransformKind::Qdct,
            w_step: WStepMethod::Exact,
            divergence_factor: 1e6,
            merit_r: 1.01,
            record_timing: true,
            warm_start: false,
        }
    }
}

impl SolverConfig {
    /// Defaults for the inpainting solver (longer iteration cap).
    pub fn inpaint_default() -> Self {
        SolverConfig {
            max_outer: 1000,
            ..SolverConfig::default()
        }
    }

    pub fn beta1(&self) -> f64 {
        self.beta1.unwrap_or(self.beta)
    }

    pub fn beta2(&self) -> f64 {
        self.beta2.unwrap_or(self.beta)
    }

    pub fn validate(&self) -> Result<()> {
        let pos = |v: f64, name: &str| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(QslrError::config(format!("{name} must be finite and > 0, got {v}")))
            }
        };
        pos(self.beta, "beta")?;
        pos(self.beta1(), "beta1")?;
        pos(self.beta2(), "beta2")?;
        pos(self.l1, "l1")?;
        pos(self.l2, "l2")?;
        pos(self.eta, "eta")?;
        pos(self.eta_ccp, "eta_ccp")?;
        pos(self.divergence_factor, "divergence_factor")?;
        if !(self.mu > 0.0 && self.mu < 2.0) {
            return Err(QslrError::config(format!("mu must lie in (0, 2), got {}", self.mu)));
        }
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(QslrError::config("lambda must be finite and >= 0"));
        }
        if !(self.tau >= 0.0 && self.tau.is_finite()) {
            return Err(QslrError::config("tau must be finite and >= 0"));
        }
        if self.max_outer == 0 || self.max_ccp == 0 {
            return Err(QslrError::config("iteration caps must be >= 1"));
        }
        if !(self.merit_r > 1.0) {
            return Err(QslrError::config("merit_r must be > 1"));
        }
        if let DeltaSchedule::Fixed { delta } = self.delta_schedule {
            pos(delta, "delta")?;
        }
        if let WStepMethod::GradientDescent { iters } = self.w_step {
            if iters == 0 {
                return Err(QslrError::config("gradient W-step needs iters >= 1"));
            }
        }
        self.surrogate.validate()?;
        if self.surrogate.kind == SurrogateKind::WeightedSchattenGamma
            && self.weight_rule.is_none()
            && self.surrogate.weights.is_none()
        {
            return Err(QslrError::config("weighted Schatten surrogate needs weights or a weight_rule"));
        }
        Ok(())
    }
}
