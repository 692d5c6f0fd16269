//! PL-ADMM for
//!
//! ```text
//! min_X  f(X) + λ p(W X) + ‖X − Y‖²/(2τ²)
//! ```
//!
//! split as `W = W(X)` with multiplier `Λ`. Starts from `X = Y`, `W = 0`,
//! `Λ = 0`.

use std::time::Instant;

use super::assumptions::denoise_constants;
use super::config::SolverConfig;
use super::merit::{lagrangian_denoise, merit_r, subgradient_denoise};
use super::trace::{IterRecord, IterationTrace};
use super::StoppingRule;
use crate::error::{QslrError, Result};
use crate::prox::{spectral_prox, ProxProblem};
use crate::quat::{singular_values, QMatrix};
use crate::surrogates::{huber, huber_grad, spectral_penalty, HuberSpec, SurrogateKind, SurrogateSpec};
use crate::transforms::OrthoTransform;

#[derive(Debug, Clone)]
pub struct DenoiseState {
    pub k: usize,
    pub x: QMatrix,
    pub w: QMatrix,
    pub lambda: QMatrix,
    pub x_prev: QMatrix,
    pub w_prev: QMatrix,
    pub lambda_prev: QMatrix,
    /// Huber threshold used by the last W-step
    pub delta: f64,
    /// anchor and weight of the last X-step prox
    pub anchor: Option<QMatrix>,
    pub mu_eff: f64,
    /// singular values of `x`
    pub sigma: Vec<f64>,
    /// surrogate used by the last X-step (carries the weights, if any)
    pub spec: SurrogateSpec,
    pub y: QMatrix,
    pub transform: OrthoTransform,
}

impl DenoiseState {
    /// `W(X) − W`.
    pub fn constraint(&self) -> QMatrix {
        let wx = self.transform.forward(&self.x).expect("state shapes agree");
        &wx - &self.w
    }

    pub fn dx(&self) -> f64 {
        (&self.x - &self.x_prev).frobenius_norm()
    }

    pub fn dw(&self) -> f64 {
        (&self.w - &self.w_prev).frobenius_norm()
    }

    pub fn dlambda(&self) -> f64 {
        (&self.lambda - &self.lambda_prev).frobenius_norm()
    }
}

impl StoppingRule for DenoiseState {
    fn residual(&self) -> f64 {
        self.dx() + self.dw() + self.constraint().frobenius_norm()
    }

    fn primal_gaps(&self) -> (f64, f64) {
        (self.constraint().frobenius_norm(), 0.0)
    }
}

/// Iteration-by-iteration driver.
pub struct DenoiseSolver {
    cfg: SolverConfig,
    state: DenoiseState,
    trace: IterationTrace,
    delta_next: f64,
    y_norm: f64,
    started: Instant,
}

fn check_iterate(m: &QMatrix, name: &str, limit: f64) -> std::result::Result<(), String> {
    if !m.is_finite() {
        return Err(format!("non-finite entries in {name}"));
    }
    let n = m.frobenius_norm();
    if n > limit {
        return Err(format!("norm of {name} is {n:.3e}, above {limit:.3e}"));
    }
    Ok(())
}

impl DenoiseSolver {
    pub fn new(y: &QMatrix, cfg: &SolverConfig) -> Result<Self> {
        cfg.validate()?;
        if y.is_empty() {
            return Err(QslrError::shape("empty observation"));
        }
        if !y.is_finite() {
            return Err(QslrError::Domain("observation has non-finite entries".into()));
        }
        let (m, n) = y.dims();
        let transform = OrthoTransform::new(cfg.transform, m, n);
        let sigma = singular_values(y)?;
        let zeros = QMatrix::zeros(m, n);
        let w0 = if cfg.warm_start { transform.forward(y)? } else { zeros.clone() };
        let state = DenoiseState {
            k: 0,
            x: y.clone(),
            w: w0.clone(),
            lambda: zeros.clone(),
            x_prev: y.clone(),
            w_prev: w0,
            lambda_prev: zeros,
            delta: cfg.delta_schedule.initial(),
            anchor: None,
            mu_eff: 0.0,
            sigma,
            spec: cfg.surrogate.clone(),
            y: y.clone(),
            transform,
        };
        Ok(DenoiseSolver {
            delta_next: cfg.delta_schedule.initial(),
            y_norm: y.frobenius_norm().max(f64::MIN_POSITIVE),
            cfg: cfg.clone(),
            state,
            trace: IterationTrace::default(),
            started: Instant::now(),
        })
    }

    pub fn state(&self) -> &DenoiseState {
        &self.state
    }

    pub fn trace(&self) -> &IterationTrace {
        &self.trace
    }

    pub fn config(&self) -> &SolverConfig {
        &self.cfg
    }

    pub fn converged(&self) -> bool {
        self.trace.converged
    }

    fn x_spec(&self) -> SurrogateSpec {
        let base = &self.cfg.surrogate;
        match (&self.cfg.weight_rule, base.kind) {
            (Some(rule), SurrogateKind::WeightedSchattenGamma) => base.clone().with_weights(rule.weights(&self.state.sigma)),
            _ => base.clone(),
        }
    }

    fn diverged(&self, k: usize, reason: String) -> QslrError {
        let mut trace = self.trace.clone();
        trace.converged = false;
        QslrError::Divergence {
            k,
            reason,
            trace: Box::new(trace),
        }
    }

    /// One outer iteration; returns the new trace record.
    pub fn step(&mut self) -> Result<&IterRecord> {
        let cfg = &self.cfg;
        let (beta, mu, lam) = (cfg.beta, cfg.mu, cfg.lambda);
        let k = self.state.k + 1;
        let delta = self.delta_next;
        let spec = self.x_spec();
        let st = &self.state;
        let t = &st.transform;

        let (x_new, sigma_new, anchor, mu_eff) = if cfg.tau == 0.0 {
            (st.y.clone(), singular_values(&st.y)?, None, f64::INFINITY)
        } else {
            let a = 1.0 / (cfg.tau * cfg.tau);
            let denom = a + beta + cfg.l1;
            let v = t.adjoint(&QMatrix::combine(&[(1.0, &st.w), (-1.0 / beta, &st.lambda)]))?;
            let anchor = QMatrix::combine(&[(a / denom, &st.y), (beta / denom, &v), (cfg.l1 / denom, &st.x)]);
            let mut prob = ProxProblem::new(anchor.clone(), denom, spec.clone());
            prob.tol = cfg.eta_ccp;
            prob.max_iters = cfg.max_ccp;
            let pr = spectral_prox(&prob)?;
            (pr.matrix, pr.sigma_out, Some(anchor), denom)
        };

        let hs = HuberSpec { delta, lambda: lam };
        let wx = t.forward(&x_new)?;
        let g_prev = huber_grad(&st.w, &hs);
        let d = beta + cfg.l2;
        let w_new = QMatrix::combine(&[
            (beta / d, &wx),
            (1.0 / d, &st.lambda),
            (cfg.l2 / d, &st.w),
            (-lam / d, &g_prev),
        ]);
        let c = &wx - &w_new;
        let mut lambda_new = st.lambda.clone();
        lambda_new.axpy(mu * beta, &c);

        let limit = cfg.divergence_factor * self.y_norm;
        for (m, name) in [(&x_new, "X"), (&w_new, "W"), (&lambda_new, "Lambda")] {
            if let Err(reason) = check_iterate(m, name, limit) {
                return Err(self.diverged(k, reason));
            }
        }

        let s = &mut self.state;
        s.k = k;
        s.x_prev = std::mem::replace(&mut s.x, x_new);
        s.w_prev = std::mem::replace(&mut s.w, w_new);
        s.lambda_prev = std::mem::replace(&mut s.lambda, lambda_new);
        s.delta = delta;
        s.anchor = anchor;
        s.mu_eff = mu_eff;
        s.sigma = sigma_new;
        s.spec = spec;
        let st = &self.state;
        let cfg = &self.cfg;

        let (dx, dw, dl) = (st.dx(), st.dw(), st.dlambda());
        let gap1 = c.frobenius_norm();
        let eps = dx + dw + gap1;
        let data = if cfg.tau == 0.0 {
            0.0
        } else {
            (&st.x - &st.y).frobenius_norm_sqr() / (2.0 * cfg.tau * cfg.tau)
        };
        let objective = spectral_penalty(&st.sigma, &st.spec)? + lam * huber(&wx, &hs) + data;
        let constants = denoise_constants(cfg, delta, 0.5, cfg.merit_r);
        let merit = merit_r(st, cfg, &constants)?;
        debug_assert!(lagrangian_denoise(st, cfg).is_ok());
        let (subgrad_norm, subgrad_bound) = subgradient_denoise(st, cfg, &hs, &g_prev)?;

        self.delta_next = cfg.delta_schedule.after(eps);
        let wall_ms = if cfg.record_timing {
            self.started.elapsed().as_secs_f64() * 1e3
        } else {
            0.0
        };
        self.trace.records.push(IterRecord {
            k,
            eps_k: eps,
            gap1,
            gap2: 0.0,
            objective,
            merit,
            dx,
            dw,
            dlambda1: dl,
            dlambda2: 0.0,
            wall_ms,
            delta,
            subgrad_norm,
            subgrad_bound,
        });
        if eps < cfg.eta {
            self.trace.converged = true;
        }
        Ok(self.trace.records.last().expect("just pushed"))
    }

    /// Iterate until the stopping rule holds or `max_outer` is reached.
    pub fn run(mut self) -> Result<(QMatrix, IterationTrace)> {
        while !self.trace.converged && self.state.k < self.cfg.max_outer {
            self.step()?;
        }
        if !self.trace.converged {
            log::warn!("denoise stopped at max_outer = {}", self.cfg.max_outer);
        }
        Ok((self.state.x, self.trace))
    }
}

pub fn pl_admm_denoise(y: &QMatrix, cfg: &SolverConfig) -> Result<(QMatrix, IterationTrace)> {
    DenoiseSolver::new(y, cfg)?.run()
}
