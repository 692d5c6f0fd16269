//! Proximal linearized ADMM for denoising and for noise-free inpainting,
//! with merit functions and parameter checks.

pub mod assumptions;
pub mod config;
pub mod denoise;
pub mod inpaint;
pub mod merit;
pub mod trace;

pub use assumptions::{check_assumption_1, check_assumption_2, AssumptionConstants, AssumptionReport, CheckOptions};
pub use config::{DeltaSchedule, SolverConfig, WStepMethod, WeightRule};
pub use denoise::{pl_admm_denoise, DenoiseSolver, DenoiseState};
pub use inpaint::{g_apply, g_inverse, pl_admm_nf_inpaint, InpaintSolver, InpaintState};
pub use merit::{merit_r, merit_t};
pub use trace::{IterRecord, IterationTrace, CSV_HEADER};

/// Stopping-rule quantities of a solver state.
pub trait StoppingRule {
    /// `ε_k` as used by the stopping test
    fn residual(&self) -> f64;
    /// constraint gaps; the second is zero for denoising
    fn primal_gaps(&self) -> (f64, f64);
}

pub fn residual(state: &impl StoppingRule) -> f64 {
    state.residual()
}

pub fn primal_gaps(state: &impl StoppingRule) -> (f64, f64) {
    state.primal_gaps()
}
