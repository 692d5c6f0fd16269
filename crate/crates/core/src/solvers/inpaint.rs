//! PL-ADMM for the noise-free model
//!
//! ```text
//! min_{Z, W}  f(Z) + λ p(W)   s.t.  Z = W,  P_Ω(W^# W) = P_Ω(Y)
//! ```
//!
//! with multipliers `Λ₁` (transform domain) and `Λ₂` (image domain). The
//! recovered image is `W^#(Z)`. Starts from all zeros.

use std::time::Instant;

use super::assumptions::{estimate_l_f, inpaint_constants, CheckOptions};
use super::config::{SolverConfig, WStepMethod};
use super::merit::merit_t;
use super::trace::{IterRecord, IterationTrace};
use super::StoppingRule;
use crate::error::{QslrError, Result};
use crate::imaging::ObservationMask;
use crate::prox::{spectral_prox, ProxProblem};
use crate::quat::{singular_values, QMatrix};
use crate::surrogates::{huber, huber_grad, spectral_penalty, HuberSpec, SurrogateKind, SurrogateSpec};
use crate::transforms::OrthoTransform;

/// Squared increments of the previous iteration.
#[derive(Debug, Clone, Copy, Default)]
pub struct History {
    pub dz_sq: f64,
    pub dw_sq: f64,
    pub dlambda1_sq: f64,
}

#[derive(Debug, Clone)]
pub struct InpaintState {
    pub k: usize,
    pub z: QMatrix,
    pub w: QMatrix,
    pub lambda1: QMatrix,
    pub lambda2: QMatrix,
    pub z_prev: QMatrix,
    pub w_prev: QMatrix,
    pub lambda1_prev: QMatrix,
    pub lambda2_prev: QMatrix,
    pub hist: History,
    pub delta: f64,
    pub anchor: Option<QMatrix>,
    pub mu_eff: f64,
    /// singular values of `z`
    pub sigma: Vec<f64>,
    pub spec: SurrogateSpec,
    /// `P_Ω(Y)`
    pub y_obs: QMatrix,
    pub mask: ObservationMask,
    pub transform: OrthoTransform,
}

impl InpaintState {
    /// `P_Ω(W^# W) − P_Ω(Y)`.
    pub fn data_gap(&self) -> Result<QMatrix> {
        let img = self.mask.apply(&self.transform.adjoint(&self.w)?)?;
        Ok(&img - &self.y_obs)
    }

    /// `W^#(Z)`.
    pub fn image(&self) -> QMatrix {
        self.transform.adjoint(&self.z).expect("state shapes agree")
    }
}

impl StoppingRule for InpaintState {
    fn residual(&self) -> f64 {
        let (a, b) = self.primal_gaps();
        a + b
    }

    fn primal_gaps(&self) -> (f64, f64) {
        let g1 = (&self.z - &self.w).frobenius_norm();
        let g2 = self.data_gap().expect("state shapes agree").frobenius_norm();
        (g1, g2)
    }
}

/// `a V + b W(P_Ω(W^# V))`.
pub fn g_apply(v: &QMatrix, mask: &ObservationMask, t: &OrthoTransform, a: f64, b: f64) -> Result<QMatrix> {
    let inner = t.forward(&mask.apply(&t.adjoint(v)?)?)?;
    Ok(QMatrix::combine(&[(a, v), (b, &inner)]))
}

/// Inverse of [`g_apply`] by entrywise division in image coordinates.
pub fn g_inverse(v: &QMatrix, mask: &ObservationMask, t: &OrthoTransform, a: f64, b: f64) -> Result<QMatrix> {
    let mut img = t.adjoint(v)?;
    if img.dims() != mask.dims() {
        return Err(QslrError::shape("mask and matrix dimensions differ"));
    }
    let ind = mask.indicator();
    for p in img.planes_mut() {
        p.iter_mut().zip(&ind).for_each(|(x, m)| *x /= a + b * m);
    }
    t.forward(&img)
}

pub struct InpaintSolver {
    cfg: SolverConfig,
    state: InpaintState,
    trace: IterationTrace,
    delta_next: f64,
    y_norm: f64,
    l_f: f64,
    started: Instant,
}

impl InpaintSolver {
    pub fn new(y: &QMatrix, mask: &ObservationMask, cfg: &SolverConfig) -> Result<Self> {
        cfg.validate()?;
        if y.is_empty() {
            return Err(QslrError::shape("empty observation"));
        }
        if mask.dims() != y.dims() {
            return Err(QslrError::shape(format!(
                "mask is {:?}, image is {:?}",
                mask.dims(),
                y.dims()
            )));
        }
        if mask.count() == 0 {
            return Err(QslrError::config("mask observes no pixel"));
        }
        let y_obs = mask.apply(y)?;
        if !y_obs.is_finite() {
            return Err(QslrError::Domain("observation has non-finite entries".into()));
        }
        let (m, n) = y.dims();
        let zeros = QMatrix::zeros(m, n);
        let y_norm = y_obs.frobenius_norm().max(f64::MIN_POSITIVE);
        let state = InpaintState {
            k: 0,
            z: zeros.clone(),
            w: zeros.clone(),
            lambda1: zeros.clone(),
            lambda2: zeros.clone(),
            z_prev: zeros.clone(),
            w_prev: zeros.clone(),
            lambda1_prev: zeros.clone(),
            lambda2_prev: zeros,
            hist: History::default(),
            delta: cfg.delta_schedule.initial(),
            anchor: None,
            mu_eff: 0.0,
            sigma: vec![0.0; m.min(n)],
            spec: cfg.surrogate.clone(),
            y_obs,
            mask: mask.clone(),
            transform: OrthoTransform::new(cfg.transform, m, n),
        };
        Ok(InpaintSolver {
            l_f: estimate_l_f(&cfg.surrogate),
            delta_next: cfg.delta_schedule.initial(),
            y_norm,
            cfg: cfg.clone(),
            state,
            trace: IterationTrace::default(),
            started: Instant::now(),
        })
    }

    pub fn state(&self) -> &InpaintState {
        &self.state
    }

    pub fn trace(&self) -> &IterationTrace {
        &self.trace
    }

    pub fn converged(&self) -> bool {
        self.trace.converged
    }

    /// Weighted surrogates take their weights from the singular values of
    /// the current `Z`, or of the anchor while `Z` is still zero.
    fn z_spec(&self, anchor: &QMatrix) -> Result<SurrogateSpec> {
        let base = &self.cfg.surrogate;
        match (&self.cfg.weight_rule, base.kind) {
            (Some(rule), SurrogateKind::WeightedSchattenGamma) => {
                let sigma = if self.state.sigma.iter().all(|&s| s == 0.0) {
                    singular_values(anchor)?
                } else {
                    self.state.sigma.clone()
                };
                Ok(base.clone().with_weights(rule.weights(&sigma)))
            }
            _ => Ok(base.clone()),
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

    pub fn step(&mut self) -> Result<&IterRecord> {
        let cfg = &self.cfg;
        let (b1, b2, mu, lam) = (cfg.beta1(), cfg.beta2(), cfg.mu, cfg.lambda);
        let k = self.state.k + 1;
        let delta = self.delta_next;
        let st = &self.state;
        let t = &st.transform;

        let denom = b1 + cfg.l1;
        let anchor = QMatrix::combine(&[(b1 / denom, &st.w), (-1.0 / denom, &st.lambda1), (cfg.l1 / denom, &st.z)]);
        let spec = self.z_spec(&anchor)?;
        let mut prob = ProxProblem::new(anchor.clone(), denom, spec.clone());
        prob.tol = cfg.eta_ccp;
        prob.max_iters = cfg.max_ccp;
        let pr = spectral_prox(&prob)?;
        let z_new = pr.matrix;

        let hs = HuberSpec { delta, lambda: lam };
        let g_prev = huber_grad(&st.w, &hs);
        let data_term = t.forward(&st.mask.apply(&QMatrix::combine(&[(b2, &st.y_obs), (-1.0, &st.lambda2)]))?)?;
        let rhs = QMatrix::combine(&[
            (b1, &z_new),
            (1.0, &st.lambda1),
            (1.0, &data_term),
            (cfg.l2, &st.w),
            (-lam, &g_prev),
        ]);
        let a = b1 + cfg.l2;
        let w_new = match cfg.w_step {
            WStepMethod::Exact => g_inverse(&rhs, &st.mask, t, a, b2)?,
            WStepMethod::GradientDescent { iters } => {
                let step = 1.0 / (a + b2);
                let mut w = st.w.clone();
                for _ in 0..iters {
                    let grad = &g_apply(&w, &st.mask, t, a, b2)? - &rhs;
                    w.axpy(-step, &grad);
                }
                w
            }
        };
        let c1 = &z_new - &w_new;
        let c2 = &st.mask.apply(&t.adjoint(&w_new)?)? - &st.y_obs;
        let mut l1_new = st.lambda1.clone();
        l1_new.axpy(mu * b1, &c1);
        let mut l2_new = st.lambda2.clone();
        l2_new.axpy(mu * b2, &c2);

        let limit = cfg.divergence_factor * self.y_norm;
        for (m, name) in [(&z_new, "Z"), (&w_new, "W"), (&l1_new, "Lambda1"), (&l2_new, "Lambda2")] {
            if !m.is_finite() {
                return Err(self.diverged(k, format!("non-finite entries in {name}")));
            }
            let n = m.frobenius_norm();
            if n > limit {
                return Err(self.diverged(k, format!("norm of {name} is {n:.3e}, above {limit:.3e}")));
            }
        }

        let s = &mut self.state;
        s.hist = History {
            dz_sq: (&s.z - &s.z_prev).frobenius_norm_sqr(),
            dw_sq: (&s.w - &s.w_prev).frobenius_norm_sqr(),
            dlambda1_sq: (&s.lambda1 - &s.lambda1_prev).frobenius_norm_sqr(),
        };
        s.k = k;
        s.z_prev = std::mem::replace(&mut s.z, z_new);
        s.w_prev = std::mem::replace(&mut s.w, w_new);
        s.lambda1_prev = std::mem::replace(&mut s.lambda1, l1_new);
        s.lambda2_prev = std::mem::replace(&mut s.lambda2, l2_new);
        s.delta = delta;
        s.anchor = Some(anchor);
        s.mu_eff = denom;
        s.sigma = pr.sigma_out;
        s.spec = spec;
        let st = &self.state;
        let cfg = &self.cfg;

        let gap1 = c1.frobenius_norm();
        let gap2 = c2.frobenius_norm();
        let eps = gap1 + gap2;
        let objective = spectral_penalty(&st.sigma, &st.spec)? + lam * huber(&st.w, &hs);
        let opts = CheckOptions {
            l_f: Some(self.l_f),
            r: cfg.merit_r,
            ..CheckOptions::default()
        };
        let constants = inpaint_constants(cfg, delta, &opts);
        let merit = merit_t(st, cfg, &constants)?;
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
            gap2,
            objective,
            merit,
            dx: (&st.z - &st.z_prev).frobenius_norm(),
            dw: (&st.w - &st.w_prev).frobenius_norm(),
            dlambda1: (&st.lambda1 - &st.lambda1_prev).frobenius_norm(),
            dlambda2: (&st.lambda2 - &st.lambda2_prev).frobenius_norm(),
            wall_ms,
            delta,
            subgrad_norm: 0.0,
            subgrad_bound: 0.0,
        });
        if eps < cfg.eta {
            self.trace.converged = true;
        }
        Ok(self.trace.records.last().expect("just pushed"))
    }

    pub fn run(mut self) -> Result<(QMatrix, IterationTrace)> {
        while !self.trace.converged && self.state.k < self.cfg.max_outer {
            self.step()?;
        }
        if !self.trace.converged {
            log::warn!("inpainting stopped at max_outer = {}", self.cfg.max_outer);
        }
        Ok((self.state.z, self.trace))
    }
}

/// Returns `Z*` and the trace; the image is [`recover_image`] of `Z*`.
pub fn pl_admm_nf_inpaint(y: &QMatrix, mask: &ObservationMask, cfg: &SolverConfig) -> Result<(QMatrix, IterationTrace)> {
    InpaintSolver::new(y, mask, cfg)?.run()
}

/// `W^#(Z)` for the transform selected by `cfg`.
pub fn recover_image(z: &QMatrix, cfg: &SolverConfig) -> Result<QMatrix> {
    OrthoTransform::new(cfg.transform, z.rows(), z.cols()).adjoint(z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imaging::sample_mask;
    use crate::solvers::config::DeltaSchedule;
    use crate::solvers::residual;
    use crate::transforms::TransformKind;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn g_inverse_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for seed in 0..4 {
            let v = QMatrix::random(8, 6, &mut rng);
            let mask = sample_mask((8, 6), 0.5, seed).unwrap();
            let t = OrthoTransform::new(TransformKind::Qdct, 8, 6);
            let gv = g_apply(&v, &mask, &t, 11.0, 7.0).unwrap();
            let back = g_inverse(&gv, &mask, &t, 11.0, 7.0).unwrap();
            assert!((&back - &v).frobenius_norm() <= 1e-10 * v.frobenius_norm());
        }
    }

    #[test]
    fn full_mask_recovers_observation() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let y = QMatrix::random(6, 6, &mut rng);
        let mask = ObservationMask::full(6, 6);
        let cfg = SolverConfig {
            lambda: 0.0,
            surrogate: SurrogateSpec::nuclear(0.0),
            beta: 1e4,
            delta_schedule: DeltaSchedule::Fixed { delta: 1.0 },
            eta: 1e-6,
            record_timing: false,
            ..SolverConfig::inpaint_default()
        };
        let (z, tr) = pl_admm_nf_inpaint(&y, &mask, &cfg).unwrap();
        let x = recover_image(&z, &cfg).unwrap();
        assert!(tr.converged, "{:?}", tr.last());
        assert!((&x - &y).frobenius_norm() < 1e-3 * y.frobenius_norm());
    }

    #[test]
    fn gradient_w_step_agrees_with_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let y = QMatrix::random(6, 5, &mut rng);
        let mask = sample_mask((6, 5), 0.3, 1).unwrap();
        let exact = SolverConfig {
            max_outer: 3,
            record_timing: false,
            ..SolverConfig::inpaint_default()
        };
        let gd = SolverConfig {
            w_step: WStepMethod::GradientDescent { iters: 400 },
            ..exact.clone()
        };
        let (a, _) = pl_admm_nf_inpaint(&y, &mask, &exact).unwrap();
        let (b, _) = pl_admm_nf_inpaint(&y, &mask, &gd).unwrap();
        assert!((&a - &b).frobenius_norm() < 1e-6 * a.frobenius_norm().max(1.0));
    }

    #[test]
    fn trace_matches_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let y = QMatrix::random(5, 5, &mut rng);
        let mask = sample_mask((5, 5), 0.5, 2).unwrap();
        let cfg = SolverConfig {
            record_timing: false,
            ..SolverConfig::inpaint_default()
        };
        let mut s = InpaintSolver::new(&y, &mask, &cfg).unwrap();
        for _ in 0..3 {
            s.step().unwrap();
            let r = s.trace().last().unwrap().clone();
            assert!((residual(s.state()) - r.eps_k).abs() <= 1e-12 * (1.0 + r.eps_k));
        }
    }

    #[test]
    fn rejects_bad_masks() {
        let y = QMatrix::zeros(3, 3);
        let cfg = SolverConfig::inpaint_default();
        assert!(pl_admm_nf_inpaint(&y, &ObservationMask::full(3, 2), &cfg).is_err());
        let none = ObservationMask::new(3, 3, vec![false; 9]).unwrap();
        assert!(pl_admm_nf_inpaint(&y, &none, &cfg).is_err());
    }
}
