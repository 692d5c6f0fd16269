//! Spectral proximal operator
//!
//! ```text
//! argmin_X  Σ_i φ_i(sqrt(σ_i(X)^2 + ε^2)) + (μ/2)‖X − X̂‖_F^2
//! ```
//!
//! reduces to a separable problem on the singular values of `X̂`, solved by
//! a convex-concave procedure. Each step replaces the concave outer `φ` by
//! its tangent at the current iterate, leaving `w sqrt(s^2 + ε^2) +
//! (μ/2)(s − σ̂)^2`, which is minimized exactly. With `ε = 0` the step is
//! `max(σ̂ − φ'(σ_k)/μ, 0)`. `LogDet` is not concave on `[0, 1]`, so it is
//! linearized in `s^2` instead, where it is.
//!
//! The procedure runs from `σ = 0` and from `σ = σ̂`; the lower objective
//! wins per component.

use crate::error::{QslrError, Result};
use crate::quat::{thin_spectral, QMatrix};
use crate::surrogates::{dphi_at, smoothed_at, SurrogateKind, SurrogateSpec};

#[derive(Debug, Clone)]
pub struct ProxProblem {
    pub anchor: QMatrix,
    pub mu: f64,
    pub spec: SurrogateSpec,
    pub tol: f64,
    pub max_iters: usize,
}

impl ProxProblem {
    pub fn new(anchor: QMatrix, mu: f64, spec: SurrogateSpec) -> Self {
        ProxProblem {
            anchor,
            mu,
            spec,
            tol: 1e-10,
            max_iters: 500,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ProxResult {
    pub matrix: QMatrix,
    pub sigma_in: Vec<f64>,
    pub sigma_out: Vec<f64>,
    pub iterations: usize,
    /// false when the inner loop hit `max_iters`
    pub converged: bool,
    /// the procedure did not improve on the anchor, which was returned as is
    pub anchor_returned: bool,
}

#[derive(Debug, Clone)]
pub struct CcpRun {
    pub sigma: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// objective after each iterate, starting with the initial point
    pub objective: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct CcpOutcome {
    pub sigma: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// `φ_i(sqrt(s^2 + ε^2)) + (μ/2)(s − a)^2`.
pub fn scalar_objective(i: usize, s: f64, a: f64, mu: f64, spec: &SurrogateSpec) -> Result<f64> {
    Ok(smoothed_at(i, s, spec)? + 0.5 * mu * (s - a) * (s - a))
}

pub fn ccp_objective(sigma: &[f64], sigma_hat: &[f64], mu: f64, spec: &SurrogateSpec) -> Result<f64> {
    let mut acc = 0.0;
    for (i, (&s, &a)) in sigma.iter().zip(sigma_hat).enumerate() {
        acc += scalar_objective(i, s, a, mu, spec)?;
    }
    Ok(acc)
}

/// One majorize-minimize step for component `i` from `s`.
pub fn ccp_step(i: usize, s: f64, a: f64, mu: f64, spec: &SurrogateSpec) -> Result<f64> {
    if a <= 0.0 {
        return Ok(0.0);
    }
    let eps = spec.epsilon;
    let t = s.hypot(eps);
    if spec.kind == SurrogateKind::LogDet {
        let c = 1.0 / (1.0 + t * t);
        return Ok(mu * a / (mu + 2.0 * c));
    }
    if t == 0.0 && spec.singular_at_zero() {
        // tangent slope is +inf: zero is absorbing
        return Ok(0.0);
    }
    let w = dphi_at(i, t, spec)?;
    if eps == 0.0 || w == 0.0 {
        return Ok((a - w / mu).max(0.0));
    }
    Ok(weighted_hypot_prox(w, eps, a, mu))
}

/// argmin over `s >= 0` of `w sqrt(s^2 + eps^2) + (mu/2)(s − a)^2`,
/// by safeguarded Newton on the monotone derivative.
fn weighted_hypot_prox(w: f64, eps: f64, a: f64, mu: f64) -> f64 {
    let g = |s: f64| w * s / s.hypot(eps) + mu * (s - a);
    let dg = |s: f64| w * eps * eps / s.hypot(eps).powi(3) + mu;
    let (mut lo, mut hi) = (0.0, a);
    let mut s = (a - w / mu).clamp(0.0, a);
    for _ in 0..200 {
        let gs = g(s);
        if gs == 0.0 {
            return s;
        }
        if gs < 0.0 {
            lo = s;
        } else {
            hi = s;
        }
        let mut next = s - gs / dg(s);
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - s).abs() <= 1e-16 * (a + eps) || hi - lo <= 1e-16 * (a + eps) {
            return next;
        }
        s = next;
    }
    s
}

/// The procedure from a given starting vector.
pub fn ccp_run(
    sigma_hat: &[f64],
    start: &[f64],
    mu: f64,
    spec: &SurrogateSpec,
    tol: f64,
    max_iters: usize,
) -> Result<CcpRun> {
    let mut sigma = start.to_vec();
    let mut objective = vec![ccp_objective(&sigma, sigma_hat, mu, spec)?];
    let mut next = vec![0.0; sigma.len()];
    for k in 1..=max_iters {
        for i in 0..sigma.len() {
            next[i] = ccp_step(i, sigma[i], sigma_hat[i], mu, spec)?;
        }
        let delta = sigma.iter().zip(&next).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        std::mem::swap(&mut sigma, &mut next);
        objective.push(ccp_objective(&sigma, sigma_hat, mu, spec)?);
        if delta < tol {
            return Ok(CcpRun {
                sigma,
                iterations: k,
                converged: true,
                objective,
            });
        }
    }
    Ok(CcpRun {
        sigma,
        iterations: max_iters,
        converged: false,
        objective,
    })
}

/// Singular value update of the spectral prox.
pub fn sigma_ccp(sigma_hat: &[f64], mu: f64, spec: &SurrogateSpec, tol: f64, max_iters: usize) -> Result<CcpOutcome> {
    if !(mu > 0.0) || !(tol > 0.0) {
        return Err(QslrError::config(format!("prox needs mu > 0 and tol > 0, got {mu}, {tol}")));
    }
    if sigma_hat.iter().any(|&s| !(s >= 0.0)) {
        return Err(QslrError::Domain("singular values must be >= 0".into()));
    }
    let zeros = vec![0.0; sigma_hat.len()];
    let from_zero = ccp_run(sigma_hat, &zeros, mu, spec, tol, max_iters)?;
    let from_anchor = ccp_run(sigma_hat, sigma_hat, mu, spec, tol, max_iters)?;
    let mut sigma = from_zero.sigma.clone();
    for (i, s) in sigma.iter_mut().enumerate() {
        let a = sigma_hat[i];
        let alt = from_anchor.sigma[i];
        if scalar_objective(i, alt, a, mu, spec)? < scalar_objective(i, *s, a, mu, spec)? {
            *s = alt;
        }
    }
    Ok(CcpOutcome {
        sigma,
        iterations: from_zero.iterations.max(from_anchor.iterations),
        converged: from_zero.converged && from_anchor.converged,
    })
}

/// Exhaustive grid minimizer of [`scalar_objective`] over `[0, a + 3/μ + 1]`.
pub fn scalar_prox_oracle(a: f64, mu: f64, spec: &SurrogateSpec, grid_step: f64) -> Result<f64> {
    scalar_prox_oracle_at(0, a, mu, spec, grid_step)
}

pub fn scalar_prox_oracle_at(i: usize, a: f64, mu: f64, spec: &SurrogateSpec, grid_step: f64) -> Result<f64> {
    if !(grid_step > 0.0) {
        return Err(QslrError::config("grid_step must be > 0"));
    }
    let hi = a + 3.0 / mu + 1.0;
    let n = (hi / grid_step).ceil() as usize;
    let mut best = (f64::INFINITY, 0.0);
    for k in 0..=n {
        let s = (k as f64 * grid_step).min(hi);
        let v = scalar_objective(i, s, a, mu, spec)?;
        if v < best.0 {
            best = (v, s);
        }
    }
    Ok(best.1)
}

pub fn spectral_prox(p: &ProxProblem) -> Result<ProxResult> {
    if p.anchor.is_empty() {
        return Err(QslrError::shape("prox of an empty matrix"));
    }
    p.spec.validate()?;
    let (sp, sigma_in) = thin_spectral(&p.anchor)?;
    if let Some(w) = &p.spec.weights {
        if p.spec.kind == SurrogateKind::WeightedSchattenGamma && w.len() != sigma_in.len() {
            return Err(QslrError::config(format!(
                "weights have length {}, need {}",
                w.len(),
                sigma_in.len()
            )));
        }
    }
    let out = sigma_ccp(&sigma_in, p.mu, &p.spec, p.tol, p.max_iters)?;
    let at_out = ccp_objective(&out.sigma, &sigma_in, p.mu, &p.spec)?;
    let at_anchor = ccp_objective(&sigma_in, &sigma_in, p.mu, &p.spec)?;
    if !out.converged {
        log::warn!("spectral prox stopped at max_iters = {}", p.max_iters);
    }
    if at_out > at_anchor {
        return Ok(ProxResult {
            matrix: p.anchor.clone(),
            sigma_out: sigma_in.clone(),
            sigma_in,
            iterations: out.iterations,
            converged: out.converged,
            anchor_returned: true,
        });
    }
    Ok(ProxResult {
        matrix: sp.rebuild(&out.sigma),
        sigma_in,
        sigma_out: out.sigma,
        iterations: out.iterations,
        converged: out.converged,
        anchor_returned: false,
    })
}
