use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use crate::error::{QslrError, Result};

/// Quaternion `w + x i + y j + z k`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Quaternion {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Quaternion {
    pub const ZERO: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 0.0);
    pub const ONE: Quaternion = Quaternion::new(1.0, 0.0, 0.0, 0.0);
    pub const I: Quaternion = Quaternion::new(0.0, 1.0, 0.0, 0.0);
    pub const J: Quaternion = Quaternion::new(0.0, 0.0, 1.0, 0.0);
    pub const K: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 1.0);

    pub const fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Quaternion { w, x, y, z }
    }

    pub const fn real(w: f64) -> Self {
        Quaternion::new(w, 0.0, 0.0, 0.0)
    }

    pub const fn pure(x: f64, y: f64, z: f64) -> Self {
        Quaternion::new(0.0, x, y, z)
    }

    pub fn is_pure(&self) -> bool {
        self.w == 0.0
    }

    pub fn conj(&self) -> Self {
        Quaternion::new(self.w, -self.x, -self.y, -self.z)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z
    }

    pub fn modulus(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// `conj(q) / |q|^2`; zero has no inverse.
    pub fn inverse(&self) -> Result<Self> {
        let n = self.norm_sqr();
        if n == 0.0 {
            return Err(QslrError::Domain("inverse of the zero quaternion".into()));
        }
        Ok(self.conj().scale(1.0 / n))
    }

    pub fn scale(&self, s: f64) -> Self {
        Quaternion::new(self.w * s, self.x * s, self.y * s, self.z * s)
    }
}

/// Hamilton product.
pub fn qmul(a: Quaternion, b: Quaternion) -> Quaternion {
    Quaternion::new(
        a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
        a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
        a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
        a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w,
    )
}

impl Mul for Quaternion {
    type Output = Quaternion;
    fn mul(self, rhs: Quaternion) -> Quaternion {
        qmul(self, rhs)
    }
}

impl Mul<f64> for Quaternion {
    type Output = Quaternion;
    fn mul(self, rhs: f64) -> Quaternion {
        self.scale(rhs)
    }
}

impl Add for Quaternion {
    type Output = Quaternion;
    fn add(self, r: Quaternion) -> Quaternion {
        Quaternion::new(self.w + r.w, self.x + r.x, self.y + r.y, self.z + r.z)
    }
}

impl AddAssign for Quaternion {
    fn add_assign(&mut self, r: Quaternion) {
        *self = *self + r;
    }
}

impl Sub for Quaternion {
    type Output = Quaternion;
    fn sub(self, r: Quaternion) -> Quaternion {
        Quaternion::new(self.w - r.w, self.x - r.x, self.y - r.y, self.z - r.z)
    }
}

impl Neg for Quaternion {
    type Output = Quaternion;
    fn neg(self) -> Quaternion {
        self.scale(-1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(w: f64, x: f64, y: f64, z: f64) -> Quaternion {
        Quaternion::new(w, x, y, z)
    }

    #[test]
    fn multiplication_table() {
        let (i, j, k, one) = (Quaternion::I, Quaternion::J, Quaternion::K, Quaternion::ONE);
        assert_eq!(i * j, k);
        assert_eq!(j * i, -k);
        assert_eq!(j * k, i);
        assert_eq!(k * j, -i);
        assert_eq!(k * i, j);
        assert_eq!(i * k, -j);
        assert_eq!(i * i, -one);
        assert_eq!(j * j, -one);
        assert_eq!(k * k, -one);
        assert_eq!(i * j * k, -one);
    }

    #[test]
    fn identity_and_distributive_examples() {
        let a = q(2.0, 3.0, -1.0, 1.0);
        assert_eq!(a * Quaternion::ONE, a);
        assert_eq!(Quaternion::ONE * a, a);
        assert_eq!(q(1.0, 1.0, 0.0, 0.0) * q(1.0, 0.0, 1.0, 0.0), q(1.0, 1.0, 1.0, 1.0));
    }

    #[test]
    fn scalar_ops() {
        assert_eq!(q(1.0, 1.0, 1.0, 1.0).conj(), q(1.0, -1.0, -1.0, -1.0));
        assert_eq!(q(1.0, 1.0, 1.0, 1.0).modulus(), 2.0);
        assert_eq!(Quaternion::real(2.0).inverse().unwrap(), Quaternion::real(0.5));
        assert!(matches!(Quaternion::ZERO.inverse(), Err(QslrError::Domain(_))));
        assert!(Quaternion::pure(1.0, 2.0, 3.0).is_pure());
        assert!(!Quaternion::real(1.0).is_pure());
    }

    fn arb_q() -> impl Strategy<Value = Quaternion> {
        (-2.0..2.0f64, -2.0..2.0f64, -2.0..2.0f64, -2.0..2.0f64)
            .prop_map(|(w, x, y, z)| Quaternion::new(w, x, y, z))
    }

    fn close(a: Quaternion, b: Quaternion, tol: f64) -> bool {
        (a - b).modulus() <= tol
    }

    proptest! {
        #[test]
        fn associative(a in arb_q(), b in arb_q(), c in arb_q()) {
            prop_assert!(close((a * b) * c, a * (b * c), 1e-13));
        }

        #[test]
        fn distributive(a in arb_q(), b in arb_q(), c in arb_q()) {
            prop_assert!(close(a * (b + c), a * b + a * c, 1e-13));
            prop_assert!(close((a + b) * c, a * c + b * c, 1e-13));
        }

        #[test]
        fn modulus_multiplicative(a in arb_q(), b in arb_q()) {
            prop_assert!(((a * b).modulus() - a.modulus() * b.modulus()).abs() <= 1e-13);
        }

        #[test]
        fn inverse_is_two_sided(a in arb_q()) {
            prop_assume!(a.modulus() > 1e-3);
            let inv = a.inverse().unwrap();
            prop_assert!(close(a * inv, Quaternion::ONE, 1e-12));
            prop_assert!(close(inv * a, Quaternion::ONE, 1e-12));
        }

        #[test]
        fn conj_reverses_products(a in arb_q(), b in arb_q()) {
            prop_assert!(close((a * b).conj(), b.conj() * a.conj(), 1e-13));
        }
    }
}
