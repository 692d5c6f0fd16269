use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{QslrError, Result};

pub const CSV_HEADER: &str = "k,eps_k,gap1,gap2,objective,merit,dX,dW,dLambda1,dLambda2,wall_ms";

/// One outer iteration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct IterRecord {
    pub k: usize,
    pub eps_k: f64,
    pub gap1: f64,
    pub gap2: f64,
    pub objective: f64,
    pub merit: f64,
    pub dx: f64,
    pub dw: f64,
    pub dlambda1: f64,
    pub dlambda2: f64,
    pub wall_ms: f64,
    /// Huber threshold used in this iteration's W-step
    pub delta: f64,
    /// norm of the assembled subgradient vector (denoising only)
    pub subgrad_norm: f64,
    pub subgrad_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct IterationTrace {
    pub records: Vec<IterRecord>,
    pub converged: bool,
}

impl IterationTrace {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn last(&self) -> Option<&IterRecord> {
        self.records.last()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::with_capacity(64 * (self.records.len() + 1));
        s.push_str(CSV_HEADER);
        s.push('\n');
        for r in &self.records {
            let _ = writeln!(
                s,
                "{},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:.3}",
                r.k, r.eps_k, r.gap1, r.gap2, r.objective, r.merit, r.dx, r.dw, r.dlambda1, r.dlambda2, r.wall_ms
            );
        }
        s
    }

    /// Parse the CSV written by [`IterationTrace::to_csv`]. Only the CSV
    /// columns are restored.
    pub fn from_csv(text: &str) -> Result<IterationTrace> {
        let mut lines = text.lines();
        let header = lines.next().unwrap_or("");
        if header.trim() != CSV_HEADER {
            return Err(QslrError::config(format!("unexpected trace header: {header:?}")));
        }
        let mut records = Vec::new();
        for (n, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 11 {
                return Err(QslrError::config(format!("trace line {}: expected 11 fields", n + 2)));
            }
            let num = |i: usize| -> Result<f64> {
                f[i].trim()
                    .parse::<f64>()
                    .map_err(|e| QslrError::config(format!("trace line {}, field {}: {e}", n + 2, i + 1)))
            };
            let k = f[0]
                .trim()
                .parse::<usize>()
                .map_err(|e| QslrError::config(format!("trace line {}: {e}", n + 2)))?;
            records.push(IterRecord {
                k,
                eps_k: num(1)?,
                gap1: num(2)?,
                gap2: num(3)?,
                objective: num(4)?,
                merit: num(5)?,
                dx: num(6)?,
                dw: num(7)?,
                dlambda1: num(8)?,
                dlambda2: num(9)?,
                wall_ms: num(10)?,
                ..IterRecord::default()
            });
        }
        if records.windows(2).any(|w| w[1].k <= w[0].k) {
            return Err(QslrError::config("trace iteration counter must strictly increase"));
        }
        Ok(IterationTrace { records, converged: false })
    }

    /// `(k, dX + dW + dLambda1 + dLambda2)` rows.
    pub fn plot_rows(&self) -> Vec<(usize, f64)> {
        self.records
            .iter()
            .map(|r| (r.k, r.dx + r.dw + r.dlambda1 + r.dlambda2))
            .collect()
    }
}
