//! Complex adjoint embedding.
//!
//! Entry `q = a + b i + c j + d k` becomes the 2x2 complex block
//! `[[a + b i, c + d i], [-c + d i, a - b i]]`. Writing `q = z1 + z2 j`
//! with `z1 = a + b i`, `z2 = c + d i`, the block is `[[z1, z2], [-conj z2,
//! conj z1]]`, so the map is a ring homomorphism and `chi(A*) = chi(A)^H`.

use faer::{c64, Mat};

use super::matrix::QMatrix;
use super::scalar::Quaternion;
use crate::error::{QslrError, Result};

pub type ComplexMatrix = Mat<c64>;

pub fn to_complex_adjoint(a: &QMatrix) -> ComplexMatrix {
    let (m, n) = a.dims();
    let mut c = Mat::<c64>::zeros(2 * m, 2 * n);
    for i in 0..m {
        for j in 0..n {
            let q = a.get(i, j);
            c[(2 * i, 2 * j)] = c64::new(q.w, q.x);
            c[(2 * i, 2 * j + 1)] = c64::new(q.y, q.z);
            c[(2 * i + 1, 2 * j)] = c64::new(-q.y, q.z);
            c[(2 * i + 1, 2 * j + 1)] = c64::new(q.w, -q.x);
        }
    }
    c
}

/// Inverse of [`to_complex_adjoint`]; rejects blocks whose symmetry is off
/// by more than `tol` in absolute value.
pub fn from_complex_adjoint(c: &ComplexMatrix, tol: f64) -> Result<QMatrix> {
    let (m, n) = block_dims(c)?;
    let mut worst = 0.0f64;
    for i in 0..m {
        for j in 0..n {
            let b00 = c[(2 * i, 2 * j)];
            let b01 = c[(2 * i, 2 * j + 1)];
            let b10 = c[(2 * i + 1, 2 * j)];
            let b11 = c[(2 * i + 1, 2 * j + 1)];
            worst = worst.max((b00 - b11.conj()).norm()).max((b01 + b10.conj()).norm());
        }
    }
    if worst > tol {
        return Err(QslrError::Numerical(format!(
            "matrix is not a complex adjoint: block asymmetry {worst:.3e} exceeds {tol:.3e}"
        )));
    }
    Ok(project_complex_adjoint(c))
}

/// Nearest quaternion matrix in the embedding, entrywise average of the two
/// copies each block carries.
pub(crate) fn project_complex_adjoint(c: &ComplexMatrix) -> QMatrix {
    let m = c.nrows() / 2;
    let n = c.ncols() / 2;
    QMatrix::from_fn(m, n, |i, j| {
        let z1 = (c[(2 * i, 2 * j)] + c[(2 * i + 1, 2 * j + 1)].conj()) * 0.5;
        let z2 = (c[(2 * i, 2 * j + 1)] - c[(2 * i + 1, 2 * j)].conj()) * 0.5;
        Quaternion::new(z1.re, z1.im, z2.re, z2.im)
    })
}

fn block_dims(c: &ComplexMatrix) -> Result<(usize, usize)> {
    if c.nrows() % 2 != 0 || c.ncols() % 2 != 0 {
        return Err(QslrError::shape(format!(
            "complex adjoint needs even dimensions, got {}x{}",
            c.nrows(),
            c.ncols()
        )));
    }
    Ok((c.nrows() / 2, c.ncols() / 2))
}

/// Quaternion vector whose adjoint has `u` as its first column.
pub(crate) fn quat_from_complex_column(u: impl Fn(usize) -> c64, len: usize) -> Vec<Quaternion> {
    (0..len)
        .map(|i| {
            let top = u(2 * i);
            let bot = u(2 * i + 1);
            Quaternion::new(top.re, top.im, -bot.re, bot.im)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quat::matrix::{dist, qmatmul};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn scalar_one_is_identity_block() {
        let c = to_complex_adjoint(&QMatrix::identity(1));
        assert_eq!(c[(0, 0)], c64::new(1.0, 0.0));
        assert_eq!(c[(0, 1)], c64::new(0.0, 0.0));
        assert_eq!(c[(1, 0)], c64::new(0.0, 0.0));
        assert_eq!(c[(1, 1)], c64::new(1.0, 0.0));
    }

    #[test]
    fn pure_i_block() {
        let c = to_complex_adjoint(&QMatrix::from_fn(1, 1, |_, _| Quaternion::I));
        assert_eq!(c[(0, 0)], c64::new(0.0, 1.0));
        assert_eq!(c[(0, 1)], c64::new(0.0, 0.0));
        assert_eq!(c[(1, 0)], c64::new(0.0, 0.0));
        assert_eq!(c[(1, 1)], c64::new(0.0, -1.0));
    }

    #[test]
    fn round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a = QMatrix::random(6, 4, &mut rng);
        let back = from_complex_adjoint(&to_complex_adjoint(&a), 1e-12).unwrap();
        let worst = a
            .planes()
            .iter()
            .zip(back.planes())
            .flat_map(|(p, q)| p.iter().zip(q.iter()).map(|(u, v)| (u - v).abs()))
            .fold(0.0, f64::max);
        assert!(worst <= 1e-12);
    }

    #[test]
    fn rejects_broken_symmetry() {
        let mut c = to_complex_adjoint(&QMatrix::identity(2));
        c[(0, 0)] = c64::new(2.0, 0.0);
        assert!(from_complex_adjoint(&c, 1e-8).is_err());
        let odd = Mat::<c64>::zeros(3, 2);
        assert!(matches!(from_complex_adjoint(&odd, 1.0), Err(QslrError::Shape(_))));
    }

    #[test]
    fn embedding_is_multiplicative() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let a = QMatrix::random(3, 4, &mut rng);
        let b = QMatrix::random(4, 2, &mut rng);
        let prod = &to_complex_adjoint(&a) * &to_complex_adjoint(&b);
        let back = from_complex_adjoint(&prod, 1e-12).unwrap();
        assert!(dist(&back, &qmatmul(&a, &b).unwrap()) < 1e-12);
    }

    #[test]
    fn embedding_respects_conj_transpose() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let a = QMatrix::random(3, 5, &mut rng);
        let lhs = to_complex_adjoint(&a.conj_transpose());
        let rhs = to_complex_adjoint(&a).adjoint().to_owned();
        assert!((&lhs - &rhs).norm_l2() < 1e-15);
    }
}
