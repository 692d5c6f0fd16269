use std::ops::{Add, Sub};

use rand::Rng;
use rand_distr::StandardNormal;

use super::scalar::Quaternion;
use crate::error::{QslrError, Result};

/// Dense quaternion matrix stored as four row-major real planes.
#[derive(Debug, Clone, PartialEq)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    pub w: Vec<f64>,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub z: Vec<f64>,
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let n = rows * cols;
        QMatrix {
            rows,
            cols,
            w: vec![0.0; n],
            x: vec![0.0; n],
            y: vec![0.0; n],
            z: vec![0.0; n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = QMatrix::zeros(n, n);
        for i in 0..n {
            m.w[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_planes(rows: usize, cols: usize, w: Vec<f64>, x: Vec<f64>, y: Vec<f64>, z: Vec<f64>) -> Result<Self> {
        let n = rows * cols;
        if [w.len(), x.len(), y.len(), z.len()].iter().any(|&l| l != n) {
            return Err(QslrError::shape(format!("planes must all hold {rows}x{cols} entries")));
        }
        Ok(QMatrix { rows, cols, w, x, y, z })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Quaternion) -> Self {
        let mut m = QMatrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    /// Real matrix in the w-plane, given row-major.
    pub fn from_real(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        let n = rows * cols;
        QMatrix::from_planes(rows, cols, data, vec![0.0; n], vec![0.0; n], vec![0.0; n])
    }

    /// Entries with i.i.d. standard normal components.
    pub fn random<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Self {
        let mut m = QMatrix::zeros(rows, cols);
        for p in m.planes_mut() {
            for v in p.iter_mut() {
                *v = rng.sample(StandardNormal);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn len(&self) -> usize {
        self.rows * self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, i: usize, j: usize) -> Quaternion {
        let k = i * self.cols + j;
        Quaternion::new(self.w[k], self.x[k], self.y[k], self.z[k])
    }

    pub fn set(&mut self, i: usize, j: usize, q: Quaternion) {
        let k = i * self.cols + j;
        self.w[k] = q.w;
        self.x[k] = q.x;
        self.y[k] = q.y;
        self.z[k] = q.z;
    }

    pub fn planes(&self) -> [&Vec<f64>; 4] {
        [&self.w, &self.x, &self.y, &self.z]
    }

    pub fn planes_mut(&mut self) -> [&mut Vec<f64>; 4] {
        [&mut self.w, &mut self.x, &mut self.y, &mut self.z]
    }

    /// True when the x, y and z planes are exactly zero.
    pub fn is_real(&self) -> bool {
        self.x.iter().chain(&self.y).chain(&self.z).all(|&v| v == 0.0)
    }

    pub fn is_finite(&self) -> bool {
        self.planes().iter().all(|p| p.iter().all(|v| v.is_finite()))
    }

    pub fn check_same_shape(&self, other: &QMatrix, what: &str) -> Result<()> {
        if self.dims() != other.dims() {
            return Err(QslrError::shape(format!(
                "{what}: {}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    pub fn scale(&self, s: f64) -> QMatrix {
        self.map(|v| v * s)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> QMatrix {
        let mut out = self.clone();
        for p in out.planes_mut() {
            p.iter_mut().for_each(|v| *v = f(*v));
        }
        out
    }

    /// `self += a * other`, shapes must agree.
    pub fn axpy(&mut self, a: f64, other: &QMatrix) {
        assert_eq!(self.dims(), other.dims(), "axpy shape mismatch");
        for (d, s) in self.planes_mut().into_iter().zip(other.planes()) {
            d.iter_mut().zip(s.iter()).for_each(|(d, s)| *d += a * s);
        }
    }

    /// Linear combination `Σ c_i M_i` of same-shape matrices.
    pub fn combine(terms: &[(f64, &QMatrix)]) -> QMatrix {
        let (r, c) = terms[0].1.dims();
        let mut out = QMatrix::zeros(r, c);
        for (a, m) in terms {
            out.axpy(*a, m);
        }
        out
    }

    pub fn transpose(&self) -> QMatrix {
        let mut t = QMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn conj_transpose(&self) -> QMatrix {
        let mut t = self.transpose();
        for p in [&mut t.x, &mut t.y, &mut t.z] {
            p.iter_mut().for_each(|v| *v = -*v);
        }
        t
    }

    pub fn frobenius_norm_sqr(&self) -> f64 {
        self.planes().iter().map(|p| p.iter().map(|v| v * v).sum::<f64>()).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.frobenius_norm_sqr().sqrt()
    }

    /// Quaternion modulus of each entry, row-major.
    pub fn moduli(&self) -> Vec<f64> {
        (0..self.len())
            .map(|k| (self.w[k] * self.w[k] + self.x[k] * self.x[k] + self.y[k] * self.y[k] + self.z[k] * self.z[k]).sqrt())
            .collect()
    }

    pub fn column(&self, j: usize) -> QMatrix {
        QMatrix::from_fn(self.rows, 1, |i, _| self.get(i, j))
    }

    pub fn set_column(&mut self, j: usize, col: &QMatrix) {
        for i in 0..self.rows {
            self.set(i, j, col.get(i, 0));
        }
    }

    /// Columns `0..k`.
    pub fn leading_columns(&self, k: usize) -> QMatrix {
        QMatrix::from_fn(self.rows, k, |i, j| self.get(i, j))
    }

    /// Scale column `j` by the real `s[j]`.
    pub fn scale_columns(&self, s: &[f64]) -> QMatrix {
        let mut out = self.clone();
        for i in 0..self.rows {
            for (j, sj) in s.iter().enumerate() {
                let k = i * self.cols + j;
                for p in out.planes_mut() {
                    p[k] *= sj;
                }
            }
        }
        out
    }
}

/// Matrix product `A B`.
pub fn qmatmul(a: &QMatrix, b: &QMatrix) -> Result<QMatrix> {
    if a.cols != b.rows {
        return Err(QslrError::shape(format!(
            "qmatmul: {}x{} times {}x{}",
            a.rows, a.cols, b.rows, b.cols
        )));
    }
    let (m, n, p) = (a.rows, a.cols, b.cols);
    let mut c = QMatrix::zeros(m, p);
    for i in 0..m {
        for k in 0..n {
            let ia = i * n + k;
            let (aw, ax, ay, az) = (a.w[ia], a.x[ia], a.y[ia], a.z[ia]);
            let row = i * p;
            let brow = k * p;
            for j in 0..p {
                let ib = brow + j;
                let (bw, bx, by, bz) = (b.w[ib], b.x[ib], b.y[ib], b.z[ib]);
                let ic = row + j;
                c.w[ic] += aw * bw - ax * bx - ay * by - az * bz;
                c.x[ic] += aw * bx + ax * bw + ay * bz - az * by;
                c.y[ic] += aw * by - ax * bz + ay * bw + az * bx;
                c.z[ic] += aw * bz + ax * by - ay * bx + az * bw;
            }
        }
    }
    Ok(c)
}

pub fn conj_transpose(a: &QMatrix) -> QMatrix {
    a.conj_transpose()
}

pub fn frobenius_norm(a: &QMatrix) -> f64 {
    a.frobenius_norm()
}

/// Real inner product `Re tr(A* B)`.
pub fn inner(a: &QMatrix, b: &QMatrix) -> Result<f64> {
    a.check_same_shape(b, "inner")?;
    Ok(a.planes()
        .iter()
        .zip(b.planes())
        .map(|(p, q)| p.iter().zip(q.iter()).map(|(u, v)| u * v).sum::<f64>())
        .sum())
}

impl Add for &QMatrix {
    type Output = QMatrix;
    fn add(self, rhs: &QMatrix) -> QMatrix {
        let mut out = self.clone();
        out.axpy(1.0, rhs);
        out
    }
}

impl Sub for &QMatrix {
    type Output = QMatrix;
    fn sub(self, rhs: &QMatrix) -> QMatrix {
        let mut out = self.clone();
        out.axpy(-1.0, rhs);
        out
    }
}

/// Frobenius norm of `a - b`.
pub fn dist(a: &QMatrix, b: &QMatrix) -> f64 {
    (a - b).frobenius_norm()
}
