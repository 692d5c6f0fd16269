//! Orthogonal analysis transform and its adjoint.
//!
//! `Qdct` maps `X` to `D_m X D_n^T` with `D_k` the orthonormal DCT-II
//! matrix, the same real transform on each of the four planes.

use std::sync::Arc;

use faer::Mat;
use serde::{Deserialize, Serialize};

use crate::error::{QslrError, Result};
use crate::quat::QMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum TransformKind {
    #[default]
    Qdct,
    Identity,
}

#[derive(Debug, Clone)]
pub struct OrthoTransform {
    kind: TransformKind,
    rows: usize,
    cols: usize,
    d_rows: Option<Arc<Mat<f64>>>,
    d_cols: Option<Arc<Mat<f64>>>,
}

/// Orthonormal DCT-II matrix of size `k`.
pub fn dct_matrix(k: usize) -> Mat<f64> {
    let kf = k as f64;
    Mat::from_fn(k, k, |r, c| {
        let s = if r == 0 { (1.0 / kf).sqrt() } else { (2.0 / kf).sqrt() };
        s * (std::f64::consts::PI * (2 * c + 1) as f64 * r as f64 / (2.0 * kf)).cos()
    })
}

impl OrthoTransform {
    pub fn new(kind: TransformKind, rows: usize, cols: usize) -> Self {
        let (d_rows, d_cols) = match kind {
            TransformKind::Qdct => (Some(Arc::new(dct_matrix(rows))), Some(Arc::new(dct_matrix(cols)))),
            TransformKind::Identity => (None, None),
        };
        OrthoTransform {
            kind,
            rows,
            cols,
            d_rows,
            d_cols,
        }
    }

    pub fn kind(&self) -> TransformKind {
        self.kind
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    fn check(&self, x: &QMatrix) -> Result<()> {
        if x.dims() != (self.rows, self.cols) {
            return Err(QslrError::shape(format!(
                "transform is {}x{}, input is {}x{}",
                self.rows,
                self.cols,
                x.rows(),
                x.cols()
            )));
        }
        Ok(())
    }

    pub fn forward(&self, x: &QMatrix) -> Result<QMatrix> {
        self.check(x)?;
        Ok(match (&self.d_rows, &self.d_cols) {
            (Some(dr), Some(dc)) => apply_planes(x, |p| dr.as_ref() * p * dc.transpose()),
            _ => x.clone(),
        })
    }

    pub fn adjoint(&self, w: &QMatrix) -> Result<QMatrix> {
        self.check(w)?;
        Ok(match (&self.d_rows, &self.d_cols) {
            (Some(dr), Some(dc)) => apply_planes(w, |p| dr.transpose() * p * dc.as_ref()),
            _ => w.clone(),
        })
    }
}

pub fn forward(t: &OrthoTransform, x: &QMatrix) -> Result<QMatrix> {
    t.forward(x)
}

pub fn adjoint(t: &OrthoTransform, w: &QMatrix) -> Result<QMatrix> {
    t.adjoint(w)
}

fn apply_planes(x: &QMatrix, f: impl Fn(&Mat<f64>) -> Mat<f64>) -> QMatrix {
    let (m, n) = x.dims();
    let mut out = QMatrix::zeros(m, n);
    for (dst, src) in out.planes_mut().into_iter().zip(x.planes()) {
        if src.iter().all(|&v| v == 0.0) {
            continue;
        }
        let p = Mat::<f64>::from_fn(m, n, |i, j| src[i * n + j]);
        let r = f(&p);
        for i in 0..m {
            for j in 0..n {
                dst[i * n + j] = r[(i, j)];
            }
        }
    }
    out
}
