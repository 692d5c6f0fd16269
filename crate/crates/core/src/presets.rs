//! Named parameter sets for the experiments.
//!
//! | name | task | surrogate | λ | τ |
//! |---|---|---|---|---|
//! | `denoise-tau{10,30,50}` | denoise | Schatten γ = 0.5 | 0.01 / 0.3 / 0.5 | 10 / 30 / 50 |
//! | `...-s2` | denoise | Laplace γ = 0.5 | same | same |
//! | `...-s3` | denoise | weighted Schatten γ = 0.5, `20/(σ + 1e-4)` | same | same |
//! | `nss-tau{10,30,50}` | denoise with NSS | Schatten γ = 0.3 | 0.001 / 0.01 / 0.01 | 10 / 30 / 50 |
//! | `nss-...-s2` / `-s3` | denoise with NSS | Laplace γ = 0.8 / weighted γ = 0.3 | same | same |
//! | `inpaint-nf1` | inpaint | Schatten γ = 0.7 | 0.01 | |
//! | `inpaint-nf2` | inpaint | Laplace γ = 1 | 0.01 | |
//! | `inpaint-nf3` | inpaint | weighted Schatten γ = 0.7, `10/(σ + 1e-4)` | 0.01 | |
//!
//! NSS presets use patches of 10 / 12 / 14 with 70 / 80 / 90 neighbors.

use serde::Serialize;

use crate::nss::NssConfig;
use crate::solvers::{SolverConfig, WeightRule};
use crate::surrogates::{SurrogateKind, SurrogateSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    Denoise,
    Inpaint,
}

#[derive(Debug, Clone, Serialize)]
pub struct Preset {
    pub name: String,
    pub task: Task,
    pub solver: SolverConfig,
    pub nss: Option<NssConfig>,
}

pub const NAMES: &[&str] = &[
    "denoise-tau10",
    "denoise-tau30",
    "denoise-tau50",
    "denoise-tau10-s2",
    "denoise-tau30-s2",
    "denoise-tau50-s2",
    "denoise-tau10-s3",
    "denoise-tau30-s3",
    "denoise-tau50-s3",
    "nss-tau10",
    "nss-tau30",
    "nss-tau50",
    "nss-tau10-s2",
    "nss-tau30-s2",
    "nss-tau50-s2",
    "nss-tau10-s3",
    "nss-tau30-s3",
    "nss-tau50-s3",
    "inpaint-nf1",
    "inpaint-nf2",
    "inpaint-nf3",
];

fn surrogate(variant: u8, gammas: [f64; 3]) -> (SurrogateSpec, Option<f64>) {
    let eps = 1e-2;
    match variant {
        1 => (SurrogateSpec::new(SurrogateKind::SchattenGamma, gammas[0], eps), None),
        2 => (SurrogateSpec::new(SurrogateKind::Laplace, gammas[1], eps), None),
        _ => (SurrogateSpec::new(SurrogateKind::WeightedSchattenGamma, gammas[2], eps), Some(0.0)),
    }
}

fn noise_level(name: &str) -> Option<(usize, &str)> {
    for (i, t) in ["tau10", "tau30", "tau50"].iter().enumerate() {
        if let Some(rest) = name.strip_prefix(t) {
            return Some((i, rest));
        }
    }
    None
}

fn variant(suffix: &str) -> Option<u8> {
    match suffix {
        "" => Some(1),
        "-s2" => Some(2),
        "-s3" => Some(3),
        _ => None,
    }
}

pub fn preset(name: &str) -> Option<Preset> {
    let taus = [10.0, 30.0, 50.0];
    if let Some(rest) = name.strip_prefix("denoise-") {
        let (i, suffix) = noise_level(rest)?;
        let v = variant(suffix)?;
        let (spec, weighted) = surrogate(v, [0.5, 0.5, 0.5]);
        let solver = SolverConfig {
            lambda: [0.01, 0.3, 0.5][i],
            tau: taus[i],
            surrogate: spec,
            weight_rule: weighted.map(|_| WeightRule {
                numerator: 20.0,
                offset: 1e-4,
            }),
            ..SolverConfig::default()
        };
        return Some(Preset {
            name: name.into(),
            task: Task::Denoise,
            solver,
            nss: None,
        });
    }
    if let Some(rest) = name.strip_prefix("nss-") {
        let (i, suffix) = noise_level(rest)?;
        let v = variant(suffix)?;
        let (spec, weighted) = surrogate(v, [0.3, 0.8, 0.3]);
        let solver = SolverConfig {
            lambda: [0.001, 0.01, 0.01][i],
            tau: taus[i],
            surrogate: spec,
            weight_rule: weighted.map(|_| WeightRule {
                numerator: 10.0,
                offset: 1e-4,
            }),
            ..SolverConfig::default()
        };
        let nss = NssConfig {
            patch_side: [10, 12, 14][i],
            num_neighbors: [70, 80, 90][i],
            search_window: 30,
            ..NssConfig::default()
        };
        return Some(Preset {
            name: name.into(),
            task: Task::Denoise,
            solver,
            nss: Some(nss),
        });
    }
    let v = match name {
        "inpaint-nf1" => 1,
        "inpaint-nf2" => 2,
        "inpaint-nf3" => 3,
        _ => return None,
    };
    let (spec, weighted) = surrogate(v, [0.7, 1.0, 0.7]);
    let solver = SolverConfig {
        lambda: 0.01,
        surrogate: spec,
        weight_rule: weighted.map(|_| WeightRule {
            numerator: 10.0,
            offset: 1e-4,
        }),
        ..SolverConfig::inpaint_default()
    };
    Some(Preset {
        name: name.into(),
        task: Task::Inpaint,
        solver,
        nss: None,
    })
}
