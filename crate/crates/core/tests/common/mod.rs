//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use std::path::PathBuf;

use nalgebra::{Complex, DMatrix};
use qslr_core::imaging::{load_image, ColorImage};
use qslr_core::quat::QMatrix;
use qslr_core::surrogates::{SurrogateKind, SurrogateSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const CROPS: [&str; 3] = ["astronaut", "coffee", "chelsea"];

pub fn crop(name: &str) -> ColorImage {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join(format!("tests/data/{name}64.ppm"));
    load_image(&p).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Singular values of a real matrix, descending.
pub fn real_singular_values(rows: usize, cols: usize, data: &[f64]) -> Vec<f64> {
    let m = DMatrix::from_row_slice(rows, cols, data);
    let mut s: Vec<f64> = m.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap());
    s
}

/// Singular values of `A` from the 2m×2n complex embedding `[[P, R], [-conj(R), conj(P)]]`
/// with `A = P + R j`, `P = w + x i`, `R = y + z i`; pairs are collapsed.
pub fn quaternion_singular_values(a: &QMatrix) -> Vec<f64> {
    let (m, n) = a.dims();
    let mut c = DMatrix::<Complex<f64>>::zeros(2 * m, 2 * n);
    for i in 0..m {
        for j in 0..n {
            let q = a.get(i, j);
            let p = Complex::new(q.w, q.x);
            let r = Complex::new(q.y, q.z);
            c[(i, j)] = p;
            c[(i, j + n)] = r;
            c[(i + m, j)] = -r.conj();
            c[(i + m, j + n)] = p.conj();
        }
    }
    let mut s: Vec<f64> = c.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap());
    s.iter().step_by(2).copied().collect()
}

/// Orthonormal DCT-II matrix as a row-major vector.
pub fn dct(k: usize) -> Vec<f64> {
    let mut d = vec![0.0; k * k];
    for r in 0..k {
        for c in 0..k {
            let scale = if r == 0 { (1.0 / k as f64).sqrt() } else { (2.0 / k as f64).sqrt() };
            d[r * k + c] = scale * ((2 * c + 1) as f64 * r as f64 * std::f64::consts::PI / (2 * k) as f64).cos();
        }
    }
    d
}

/// `L X R^T` applied plane by plane with real row-major `L` (m×m) and `R` (n×n).
pub fn two_sided(l: &[f64], x: &QMatrix, r: &[f64]) -> QMatrix {
    let (m, n) = x.dims();
    let mut out = QMatrix::zeros(m, n);
    let src = x.planes();
    for (p, dst) in out.planes_mut().into_iter().enumerate() {
        let plane = src[p];
        let mut tmp = vec![0.0; m * n];
        for i in 0..m {
            for k in 0..m {
                let lik = l[i * m + k];
                for j in 0..n {
                    tmp[i * n + j] += lik * plane[k * n + j];
                }
            }
        }
        for i in 0..m {
            for j in 0..n {
                dst[i * n + j] = (0..n).map(|k| tmp[i * n + k] * r[j * n + k]).sum();
            }
        }
    }
    out
}

/// Penalty function written out independently of the library.
pub fn phi_ref(kind: SurrogateKind, gamma: f64, etp_scale: f64, x: f64) -> f64 {
    match kind {
        SurrogateKind::Nuclear => x,
        SurrogateKind::SchattenGamma | SurrogateKind::WeightedSchattenGamma => x.powf(gamma),
        SurrogateKind::Laplace => 1.0 - (-x / gamma).exp(),
        SurrogateKind::LogDet => (1.0 + x * x).ln(),
        SurrogateKind::Logarithm => (gamma + x).ln(),
        SurrogateKind::Etp => etp_scale * (1.0 - (-gamma * x).exp()) / (1.0 - (-gamma).exp()),
    }
}

/// `φ(sqrt(s² + ε²)) + (μ/2)(s − a)²`
pub fn scalar_obj_ref(spec: &SurrogateSpec, s: f64, a: f64, mu: f64) -> f64 {
    let smooth = (s * s + spec.epsilon * spec.epsilon).sqrt();
    phi_ref(spec.kind, spec.gamma, spec.etp_scale, smooth) + 0.5 * mu * (s - a) * (s - a)
}

/// Brute-force minimizer over a uniform grid of `[0, a + 3/μ + 1]`; returns `(argmin, min)`.
pub fn grid_argmin(spec: &SurrogateSpec, a: f64, mu: f64, step: f64) -> (f64, f64) {
    let hi = a + 3.0 / mu + 1.0;
    let n = (hi / step).ceil() as usize;
    let mut best = (0.0, f64::INFINITY);
    for k in 0..=n {
        let s = (k as f64 * step).min(hi);
        let v = scalar_obj_ref(spec, s, a, mu);
        if v < best.1 {
            best = (s, v);
        }
    }
    best
}

/// 32×32-style pure quaternion image of rank at most `rank`, entries in `[0, 1]`.
pub fn low_rank_pure(n: usize, rank: usize, seed: u64) -> QMatrix {
    let mut g = rng(seed);
    let u: Vec<Vec<f64>> = (0..rank).map(|_| (0..n).map(|_| g.gen::<f64>()).collect()).collect();
    let v: Vec<Vec<f64>> = (0..rank).map(|_| (0..n).map(|_| g.gen::<f64>()).collect()).collect();
    let c: Vec<[f64; 3]> = (0..rank).map(|_| [g.gen(), g.gen(), g.gen()]).collect();
    let mut q = QMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            for r in 0..rank {
                let s = u[r][i] * v[r][j] / rank as f64;
                q.x[i * n + j] += s * c[r][0];
                q.y[i * n + j] += s * c[r][1];
                q.z[i * n + j] += s * c[r][2];
            }
        }
    }
    q
}

/// PSNR with peak 1 over the three imaginary planes.
pub fn psnr_pure(a: &QMatrix, b: &QMatrix) -> f64 {
    let (m, n) = a.dims();
    let mut s = 0.0;
    for p in 1..4 {
        for (x, y) in a.planes()[p].iter().zip(b.planes()[p]) {
            s += (x - y) * (x - y);
        }
    }
    10.0 * (1.0 / (s / (3 * m * n) as f64)).log10()
}

/// Random unitary quaternion matrix from the left factor of a random QSVD.
pub fn random_unitary(n: usize, g: &mut ChaCha8Rng) -> QMatrix {
    let a = QMatrix::random(n, n, g);
    qslr_core::quat::qsvd(&a, 1e-8).unwrap().u
}
