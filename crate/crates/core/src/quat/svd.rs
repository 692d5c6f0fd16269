//! Quaternion SVD through the complex adjoint.
//!
//! The 2m x 2n adjoint has every singular value twice. One representative
//! per pair is kept, and quaternion singular vectors are read back from
//! the complex columns at even positions. Degenerate clusters can mix the
//! pairs, so the factors are re-orthonormalized with quaternion modified
//! Gram-Schmidt when the unitarity check fails.

use faer::{c64, Mat};

use super::adjoint::{project_complex_adjoint, quat_from_complex_column, to_complex_adjoint};
use super::matrix::{qmatmul, QMatrix};
use super::scalar::Quaternion;
use crate::error::{QslrError, Result};

#[derive(Debug, Clone)]
pub struct QsvdResult {
    pub u: QMatrix,
    pub sigma: Vec<f64>,
    pub v: QMatrix,
}

#[derive(Debug, Clone, Copy)]
pub struct QsvdOptions {
    pub tol_unitary: f64,
    pub tol_recon: f64,
    /// relative agreement required inside each singular value pair
    pub pair_tol: f64,
}

impl Default for QsvdOptions {
    fn default() -> Self {
        QsvdOptions {
            tol_unitary: 1e-8,
            tol_recon: 1e-8,
            pair_tol: 1e-8,
        }
    }
}

impl QsvdResult {
    /// `U diag(sigma) V*` using the leading columns.
    pub fn reconstruct(&self) -> QMatrix {
        let r = self.sigma.len();
        let us = self.u.leading_columns(r).scale_columns(&self.sigma);
        qmatmul(&us, &self.v.leading_columns(r).conj_transpose()).expect("factor shapes agree")
    }
}

/// Full QSVD with `tol` used for both the unitarity and reconstruction checks.
pub fn qsvd(a: &QMatrix, tol: f64) -> Result<QsvdResult> {
    qsvd_with(
        a,
        &QsvdOptions {
            tol_unitary: tol,
            tol_recon: tol,
            ..QsvdOptions::default()
        },
    )
}

pub fn qsvd_with(a: &QMatrix, opts: &QsvdOptions) -> Result<QsvdResult> {
    if a.is_empty() {
        return Err(QslrError::shape("qsvd of an empty matrix"));
    }
    let res = if a.is_real() { real_qsvd(a)? } else { complex_qsvd(a, opts)? };
    let scale = a.frobenius_norm();
    let recon = (a - &res.reconstruct()).frobenius_norm();
    if recon > opts.tol_recon * scale.max(f64::MIN_POSITIVE) && recon > 0.0 {
        return Err(QslrError::Numerical(format!(
            "qsvd reconstruction residual {:.3e} exceeds {:.1e} relative ({})",
            recon / scale,
            opts.tol_recon,
            condition_note(&res.sigma)
        )));
    }
    Ok(res)
}

/// Singular values only, nonincreasing.
pub fn singular_values(a: &QMatrix) -> Result<Vec<f64>> {
    if a.is_empty() {
        return Err(QslrError::shape("singular values of an empty matrix"));
    }
    if a.is_real() {
        let m = real_plane(a);
        return m.singular_values().map_err(|e| svd_failure(format!("{e:?}")));
    }
    let s = to_complex_adjoint(a)
        .singular_values()
        .map_err(|e| svd_failure(format!("{e:?}")))?;
    pick_pairs(&s, QsvdOptions::default().pair_tol)
}

/// Number of singular values strictly above `threshold`.
pub fn rank(a: &QMatrix, threshold: f64) -> Result<usize> {
    Ok(singular_values(a)?.iter().filter(|&&s| s > threshold).count())
}

/// `||U U* - I||_F`.
pub fn unitary_defect(u: &QMatrix) -> f64 {
    let g = qmatmul(u, &u.conj_transpose()).expect("square product");
    (&g - &QMatrix::identity(u.rows())).frobenius_norm()
}

fn svd_failure(detail: String) -> QslrError {
    QslrError::Numerical(format!("complex svd failed: {detail}"))
}

fn condition_note(sigma: &[f64]) -> String {
    let smax = sigma.first().copied().unwrap_or(0.0);
    let smin = sigma.last().copied().unwrap_or(0.0);
    format!("sigma_max {smax:.3e}, sigma_min {smin:.3e}, condition {:.3e}", smax / smin)
}

fn pick_pairs(s: &[f64], pair_tol: f64) -> Result<Vec<f64>> {
    let top = s.first().copied().unwrap_or(0.0).max(f64::MIN_POSITIVE);
    let mut out = Vec::with_capacity(s.len() / 2);
    for p in s.chunks(2) {
        let gap = (p[0] - p[p.len() - 1]).abs();
        if gap > pair_tol * top {
            return Err(QslrError::Numerical(format!(
                "adjoint singular values {:.6e} and {:.6e} do not pair (gap {:.3e} relative); {}",
                p[0],
                p[p.len() - 1],
                gap / top,
                condition_note(s)
            )));
        }
        out.push(p[0]);
    }
    Ok(out)
}

fn real_plane(a: &QMatrix) -> Mat<f64> {
    let n = a.cols();
    Mat::<f64>::from_fn(a.rows(), n, |i, j| a.w[i * n + j])
}

fn real_qsvd(a: &QMatrix) -> Result<QsvdResult> {
    let svd = real_plane(a).svd().map_err(|e| svd_failure(format!("{e:?}")))?;
    let sv = svd.S().column_vector();
    let sigma = (0..a.rows().min(a.cols())).map(|i| sv[i]).collect();
    let lift = |m: faer::MatRef<'_, f64>| {
        QMatrix::from_fn(m.nrows(), m.ncols(), |i, j| Quaternion::real(m[(i, j)]))
    };
    Ok(QsvdResult {
        u: lift(svd.U()),
        sigma,
        v: lift(svd.V()),
    })
}

type QVec = Vec<Quaternion>;

fn qdot(u: &[Quaternion], v: &[Quaternion]) -> Quaternion {
    let mut s = Quaternion::ZERO;
    for (a, b) in u.iter().zip(v) {
        s += a.conj() * *b;
    }
    s
}

fn qnorm(v: &[Quaternion]) -> f64 {
    v.iter().map(|q| q.norm_sqr()).sum::<f64>().sqrt()
}

/// Two sweeps of modified Gram-Schmidt of `v` against `basis`; returns the
/// normalized residual when it keeps at least half of the input norm.
fn mgs_residual(basis: &[QVec], mut v: QVec) -> Option<QVec> {
    let n0 = qnorm(&v);
    if n0 == 0.0 {
        return None;
    }
    for _ in 0..2 {
        for b in basis {
            let c = qdot(b, &v);
            for (vi, bi) in v.iter_mut().zip(b) {
                *vi = *vi - *bi * c;
            }
        }
    }
    let n1 = qnorm(&v);
    if n1 < 0.5 * n0 {
        return None;
    }
    Some(v.into_iter().map(|q| q.scale(1.0 / n1)).collect())
}

fn complete_basis(mut basis: Vec<QVec>, dim: usize, candidates: impl Iterator<Item = QVec>) -> Vec<QVec> {
    let units = (0..dim).flat_map(move |k| {
        [Quaternion::ONE, Quaternion::I, Quaternion::J, Quaternion::K].into_iter().map(move |q| {
            let mut e = vec![Quaternion::ZERO; dim];
            e[k] = q;
            e
        })
    });
    for c in candidates.chain(units) {
        if basis.len() >= dim {
            break;
        }
        if let Some(r) = mgs_residual(&basis, c) {
            basis.push(r);
        }
    }
    basis
}

fn columns_to_matrix(cols: &[QVec], rows: usize) -> QMatrix {
    QMatrix::from_fn(rows, cols.len(), |i, j| cols[j][i])
}

fn complex_column(m: faer::MatRef<'_, c64>, j: usize, len: usize) -> QVec {
    quat_from_complex_column(|i| m[(i, j)], len)
}

fn complex_qsvd(a: &QMatrix, opts: &QsvdOptions) -> Result<QsvdResult> {
    let (m, n) = a.dims();
    let r = m.min(n);
    let svd = to_complex_adjoint(a).svd().map_err(|e| svd_failure(format!("{e:?}")))?;
    let sv = svd.S().column_vector();
    let s: Vec<f64> = (0..2 * r).map(|i| sv[i].re).collect();
    let sigma = pick_pairs(&s, opts.pair_tol)?;
    let (uc, vc) = (svd.U(), svd.V());

    let u_lead: Vec<QVec> = (0..r).map(|i| complex_column(uc, 2 * i, m)).collect();
    let v_lead: Vec<QVec> = (0..r).map(|i| complex_column(vc, 2 * i, n)).collect();
    let u_cols = complete_basis(u_lead.clone(), m, (2 * r..2 * m).map(|j| complex_column(uc, j, m)));
    let v_cols = complete_basis(v_lead.clone(), n, (2 * r..2 * n).map(|j| complex_column(vc, j, n)));
    let direct = QsvdResult {
        u: columns_to_matrix(&u_cols, m),
        sigma: sigma.clone(),
        v: columns_to_matrix(&v_cols, n),
    };
    if u_cols.len() == m
        && v_cols.len() == n
        && unitary_defect(&direct.u) <= opts.tol_unitary
        && unitary_defect(&direct.v) <= opts.tol_unitary
    {
        return Ok(direct);
    }

    // Mixed degenerate pairs: orthonormalize V, then map through A.
    let v_cols = complete_basis(Vec::new(), n, (0..2 * n).map(|j| complex_column(vc, j, n)));
    let v = columns_to_matrix(&v_cols, n);
    let av = qmatmul(a, &v)?;
    let top = sigma[0];
    let mut u_basis: Vec<QVec> = Vec::with_capacity(m);
    for (i, &si) in sigma.iter().enumerate() {
        let cand: QVec = if si > 1e-10 * top {
            (0..m).map(|k| av.get(k, i).scale(1.0 / si)).collect()
        } else {
            u_lead[i].clone()
        };
        match mgs_residual(&u_basis, cand) {
            Some(c) => u_basis.push(c),
            None => break,
        }
    }
    if u_basis.len() < r {
        return Err(QslrError::Numerical(format!(
            "could not recover orthonormal left factor ({})",
            condition_note(&sigma)
        )));
    }
    let u_cols = complete_basis(u_basis, m, (0..2 * m).map(|j| complex_column(uc, j, m)));
    let res = QsvdResult {
        u: columns_to_matrix(&u_cols, m),
        sigma,
        v,
    };
    let (du, dv) = (unitary_defect(&res.u), unitary_defect(&res.v));
    if du > opts.tol_unitary || dv > opts.tol_unitary {
        return Err(QslrError::Numerical(format!(
            "unitary factors off by {du:.3e} / {dv:.3e} ({})",
            condition_note(&res.sigma)
        )));
    }
    Ok(res)
}

/// Thin spectral factorization kept in whichever domain produced it, so a
/// new singular value vector can be applied without a second SVD.
pub(crate) enum Spectral {
    Complex { u: Mat<c64>, v: Mat<c64> },
    Real { u: Mat<f64>, v: Mat<f64> },
}

pub(crate) fn thin_spectral(a: &QMatrix) -> Result<(Spectral, Vec<f64>)> {
    if a.is_empty() {
        return Err(QslrError::shape("spectral factorization of an empty matrix"));
    }
    if a.is_real() {
        let svd = real_plane(a).thin_svd().map_err(|e| svd_failure(format!("{e:?}")))?;
        let sv = svd.S().column_vector();
        let sigma = (0..a.rows().min(a.cols())).map(|i| sv[i]).collect();
        return Ok((
            Spectral::Real {
                u: svd.U().to_owned(),
                v: svd.V().to_owned(),
            },
            sigma,
        ));
    }
    let svd = to_complex_adjoint(a)
        .thin_svd()
        .map_err(|e| svd_failure(format!("{e:?}")))?;
    let sv = svd.S().column_vector();
    let s: Vec<f64> = (0..sv.nrows()).map(|i| sv[i].re).collect();
    let sigma = pick_pairs(&s, QsvdOptions::default().pair_tol)?;
    Ok((
        Spectral::Complex {
            u: svd.U().to_owned(),
            v: svd.V().to_owned(),
        },
        sigma,
    ))
}

impl Spectral {
    /// `U diag(sigma) V*` for a replacement `sigma`.
    pub(crate) fn rebuild(&self, sigma: &[f64]) -> QMatrix {
        match self {
            Spectral::Real { u, v } => {
                let us = Mat::<f64>::from_fn(u.nrows(), u.ncols(), |i, j| u[(i, j)] * sigma[j]);
                let p = &us * v.transpose();
                let n = p.ncols();
                let data = (0..p.nrows() * n).map(|k| p[(k / n, k % n)]).collect();
                QMatrix::from_real(p.nrows(), n, data).expect("consistent dims")
            }
            Spectral::Complex { u, v } => {
                let us = Mat::<c64>::from_fn(u.nrows(), u.ncols(), |i, j| u[(i, j)] * sigma[j / 2]);
                project_complex_adjoint(&(&us * v.adjoint()))
            }
        }
    }
}
