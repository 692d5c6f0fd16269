//! Rank surrogates, the smoothed spectral penalty and the Huber penalty.

use serde::{Deserialize, Serialize};

use crate::error::{QslrError, Result};
use crate::quat::QMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SurrogateKind {
    /// `x`
    Nuclear,
    /// `log(1 + x^2)`
    LogDet,
    /// `x^gamma`
    SchattenGamma,
    /// `log(gamma + x)`
    Logarithm,
    /// `1 - exp(-x / gamma)`
    Laplace,
    /// `w_i x^gamma`
    WeightedSchattenGamma,
    /// `s (1 - exp(-gamma x)) / (1 - exp(-gamma))`
    Etp,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurrogateSpec {
    pub kind: SurrogateKind,
    #[serde(default = "one")]
    pub gamma: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    #[serde(default)]
    pub epsilon: f64,
    /// local scale of the ETP surrogate
    #[serde(default = "one")]
    pub etp_scale: f64,
}

fn one() -> f64 {
    1.0
}

impl SurrogateSpec {
    pub fn new(kind: SurrogateKind, gamma: f64, epsilon: f64) -> Self {
        SurrogateSpec {
            kind,
            gamma,
            weights: None,
            epsilon,
            etp_scale: 1.0,
        }
    }

    pub fn nuclear(epsilon: f64) -> Self {
        SurrogateSpec::new(SurrogateKind::Nuclear, 1.0, epsilon)
    }

    pub fn with_weights(mut self, w: Vec<f64>) -> Self {
        self.weights = Some(w);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let g = self.gamma;
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return Err(QslrError::config("epsilon must be finite and >= 0"));
        }
        match self.kind {
            SurrogateKind::Nuclear | SurrogateKind::LogDet => {}
            SurrogateKind::SchattenGamma | SurrogateKind::WeightedSchattenGamma => {
                if !(g > 0.0 && g <= 1.0) {
                    return Err(QslrError::config(format!("gamma must lie in (0, 1], got {g}")));
                }
            }
            _ => {
                if !(g > 0.0 && g.is_finite()) {
                    return Err(QslrError::config(format!("gamma must be > 0, got {g}")));
                }
            }
        }
        if let Some(w) = &self.weights {
            if w.iter().any(|&v| !(v >= 0.0)) {
                return Err(QslrError::config("weights must be >= 0"));
            }
        }
        Ok(())
    }

    /// True when the derivative blows up at zero.
    pub fn singular_at_zero(&self) -> bool {
        matches!(self.kind, SurrogateKind::SchattenGamma | SurrogateKind::WeightedSchattenGamma) && self.gamma < 1.0
    }

    fn weight(&self, i: usize) -> Result<f64> {
        match self.kind {
            SurrogateKind::WeightedSchattenGamma => {
                let w = self
                    .weights
                    .as_ref()
                    .ok_or_else(|| QslrError::config("weighted Schatten surrogate needs weights"))?;
                w.get(i)
                    .copied()
                    .ok_or_else(|| QslrError::config(format!("no weight for index {i} (have {})", w.len())))
            }
            _ => Ok(1.0),
        }
    }
}

/// `phi(x)` for unweighted kinds.
pub fn phi(x: f64, spec: &SurrogateSpec) -> Result<f64> {
    phi_at(0, x, spec)
}

/// `phi_i(x)`, the index selecting the weight of the weighted kind.
pub fn phi_at(i: usize, x: f64, spec: &SurrogateSpec) -> Result<f64> {
    let g = spec.gamma;
    Ok(match spec.kind {
        SurrogateKind::Nuclear => x,
        SurrogateKind::LogDet => (x * x).ln_1p(),
        SurrogateKind::SchattenGamma => x.powf(g),
        SurrogateKind::Logarithm => (g + x).ln(),
        SurrogateKind::Laplace => -(-x / g).exp_m1(),
        SurrogateKind::WeightedSchattenGamma => spec.weight(i)? * x.powf(g),
        SurrogateKind::Etp => spec.etp_scale * (-g * x).exp_m1() / (-g).exp_m1(),
    })
}

pub fn dphi(x: f64, spec: &SurrogateSpec) -> Result<f64> {
    dphi_at(0, x, spec)
}

/// Derivative of `phi_i` at `x`.
pub fn dphi_at(i: usize, x: f64, spec: &SurrogateSpec) -> Result<f64> {
    let g = spec.gamma;
    if x == 0.0 && spec.singular_at_zero() {
        return Err(QslrError::Domain(format!(
            "derivative of x^{g} is unbounded at 0; use epsilon > 0"
        )));
    }
    Ok(match spec.kind {
        SurrogateKind::Nuclear => 1.0,
        SurrogateKind::LogDet => 2.0 * x / (1.0 + x * x),
        SurrogateKind::SchattenGamma => g * x.powf(g - 1.0),
        SurrogateKind::Logarithm => 1.0 / (g + x),
        SurrogateKind::Laplace => (-x / g).exp() / g,
        SurrogateKind::WeightedSchattenGamma => spec.weight(i)? * g * x.powf(g - 1.0),
        SurrogateKind::Etp => spec.etp_scale * g * (-g * x).exp() / -(-g).exp_m1(),
    })
}

/// Second derivative of `phi_i`; used to bound the Lipschitz constant of
/// the smoothed penalty gradient.
pub fn d2phi_at(i: usize, x: f64, spec: &SurrogateSpec) -> Result<f64> {
    let g = spec.gamma;
    Ok(match spec.kind {
        SurrogateKind::Nuclear => 0.0,
        SurrogateKind::LogDet => 2.0 * (1.0 - x * x) / (1.0 + x * x).powi(2),
        SurrogateKind::SchattenGamma => g * (g - 1.0) * x.powf(g - 2.0),
        SurrogateKind::Logarithm => -1.0 / (g + x).powi(2),
        SurrogateKind::Laplace => -(-x / g).exp() / (g * g),
        SurrogateKind::WeightedSchattenGamma => spec.weight(i)? * g * (g - 1.0) * x.powf(g - 2.0),
        SurrogateKind::Etp => -spec.etp_scale * g * g * (-g * x).exp() / -(-g).exp_m1(),
    })
}

/// `phi_i(sqrt(s^2 + eps^2))`.
pub fn smoothed_at(i: usize, s: f64, spec: &SurrogateSpec) -> Result<f64> {
    phi_at(i, s.hypot(spec.epsilon), spec)
}

/// `d/ds phi_i(sqrt(s^2 + eps^2)) = phi_i'(t) s / t`.
pub fn smoothed_grad_at(i: usize, s: f64, spec: &SurrogateSpec) -> Result<f64> {
    if spec.epsilon == 0.0 {
        return dphi_at(i, s, spec);
    }
    let t = s.hypot(spec.epsilon);
    Ok(dphi_at(i, t, spec)? * s / t)
}

/// `Σ_i phi_i(sqrt(sigma_i^2 + eps^2))`.
pub fn spectral_penalty(sigma: &[f64], spec: &SurrogateSpec) -> Result<f64> {
    sigma.iter().enumerate().map(|(i, &s)| smoothed_at(i, s, spec)).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HuberSpec {
    pub delta: f64,
    pub lambda: f64,
}

/// `Σ p(|W_ij|)` with `p(t) = t^2/(2 delta)` below `delta`, `t - delta/2` above.
/// The weight `lambda` is not applied.
pub fn huber(w: &QMatrix, spec: &HuberSpec) -> f64 {
    let d = spec.delta;
    w.moduli()
        .into_iter()
        .map(|t| if t < d { t * t / (2.0 * d) } else { t - d / 2.0 })
        .sum()
}

/// Gradient of [`huber`] with respect to the four component planes.
pub fn huber_grad(w: &QMatrix, spec: &HuberSpec) -> QMatrix {
    let d = spec.delta;
    let scale: Vec<f64> = w
        .moduli()
        .into_iter()
        .map(|t| if t < d { 1.0 / d } else { 1.0 / t })
        .collect();
    let mut g = w.clone();
    for p in g.planes_mut() {
        p.iter_mut().zip(&scale).for_each(|(v, s)| *v *= s);
    }
    g
}
