//! Augmented Lagrangians, merit functions and the assembled subgradient.

use super::assumptions::AssumptionConstants;
use super::config::SolverConfig;
use super::denoise::DenoiseState;
use super::inpaint::InpaintState;
use crate::error::Result;
use crate::quat::{inner, QMatrix};
use crate::surrogates::{huber, huber_grad, spectral_penalty, HuberSpec};

/// `f(X) + λ p(W) + ‖X − Y‖²/(2τ²) + ⟨Λ, W(X) − W⟩ + (β/2)‖W(X) − W‖²`.
pub fn lagrangian_denoise(st: &DenoiseState, cfg: &SolverConfig) -> Result<f64> {
    let hs = HuberSpec {
        delta: st.delta,
        lambda: cfg.lambda,
    };
    let c = st.constraint();
    let data = if cfg.tau == 0.0 {
        0.0
    } else {
        (&st.x - &st.y).frobenius_norm_sqr() / (2.0 * cfg.tau * cfg.tau)
    };
    Ok(spectral_penalty(&st.sigma, &st.spec)?
        + cfg.lambda * huber(&st.w, &hs)
        + data
        + inner(&st.lambda, &c)?
        + 0.5 * cfg.beta * c.frobenius_norm_sqr())
}

/// `ℒ_β + r ς₀ ‖ΔW‖² + r ς₂ ‖ΔΛ‖²`.
pub fn merit_r(st: &DenoiseState, cfg: &SolverConfig, c: &AssumptionConstants) -> Result<f64> {
    let dw = st.dw();
    let dl = st.dlambda();
    Ok(lagrangian_denoise(st, cfg)? + c.r * c.varsigma[0] * dw * dw + c.r * c.varsigma[2] * dl * dl)
}

/// Norm of the subgradient vector assembled from the last step, and the
/// bound `π (‖ΔX‖ + ‖ΔW‖ + ‖ΔΛ‖)`. `g_prev` is `∇p(W_k)` at the same `δ`.
pub fn subgradient_denoise(st: &DenoiseState, cfg: &SolverConfig, hs: &HuberSpec, g_prev: &QMatrix) -> Result<(f64, f64)> {
    let (beta, mu) = (cfg.beta, cfg.mu);
    let t = &st.transform;
    let d_lambda = &st.lambda - &st.lambda_prev;
    let d_w = &st.w - &st.w_prev;
    let d_x = &st.x - &st.x_prev;
    let dx_part = if cfg.tau == 0.0 {
        0.0
    } else {
        let v = QMatrix::combine(&[(1.0, &t.adjoint(&d_lambda)?), (-beta, &t.adjoint(&d_w)?), (-cfg.l1, &d_x)]);
        v.frobenius_norm_sqr()
    };
    let g_new = huber_grad(&st.w, hs);
    let dw_vec = QMatrix::combine(&[(cfg.lambda, &g_new), (-cfg.lambda, g_prev), (-1.0, &d_lambda), (-cfg.l2, &d_w)]);
    let dl_part = d_lambda.frobenius_norm_sqr() / (beta * mu).powi(2);
    let norm = (dx_part + dw_vec.frobenius_norm_sqr() + dl_part).sqrt();
    let l_g = cfg.lambda / hs.delta;
    let pi = cfg.l1.max(beta + cfg.l2 + l_g).max(2.0 + 1.0 / (beta * mu));
    let bound = pi * (d_x.frobenius_norm() + d_w.frobenius_norm() + d_lambda.frobenius_norm());
    Ok((norm, bound))
}

/// `f(Z) + λ p(W) + ⟨Λ₁, Z − W⟩ + ⟨Λ₂, P(W^#W) − P(Y)⟩ + (β₁/2)‖Z − W‖² + (β₂/2)‖P(W^#W) − P(Y)‖²`.
pub fn lagrangian_nf(st: &InpaintState, cfg: &SolverConfig) -> Result<f64> {
    let hs = HuberSpec {
        delta: st.delta,
        lambda: cfg.lambda,
    };
    let c1 = &st.z - &st.w;
    let c2 = st.data_gap()?;
    Ok(spectral_penalty(&st.sigma, &st.spec)?
        + cfg.lambda * huber(&st.w, &hs)
        + inner(&st.lambda1, &c1)?
        + inner(&st.lambda2, &c2)?
        + 0.5 * cfg.beta1() * c1.frobenius_norm_sqr()
        + 0.5 * cfg.beta2() * c2.frobenius_norm_sqr())
}

/// Lagrangian plus the two-level history terms weighted by the θ family.
pub fn merit_t(st: &InpaintState, cfg: &SolverConfig, c: &AssumptionConstants) -> Result<f64> {
    let th = &c.theta;
    let r = c.r;
    let dz = (&st.z - &st.z_prev).frobenius_norm_sqr();
    let dw = (&st.w - &st.w_prev).frobenius_norm_sqr();
    let dl1 = (&st.lambda1 - &st.lambda1_prev).frobenius_norm_sqr();
    // W P_Ω is an isometry on the (masked) multiplier increments
    let dl2 = (&st.lambda2 - &st.lambda2_prev).frobenius_norm_sqr();
    Ok(lagrangian_nf(st, cfg)?
        + 2.0 * r * th.theta1 * dz
        + r * th.theta1 * st.hist.dz_sq
        + 2.0 * r * th.theta2 * dw
        + r * th.theta2 * st.hist.dw_sq
        + r * th.theta3 * dl1
        + r * th.theta4 * st.hist.dlambda1_sq
        + r * th.theta5 * dl2)
}
