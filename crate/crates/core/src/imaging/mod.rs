//! Color images, the pure quaternion encoding, degradations, metrics and
//! file formats.
//!
//! Pixel values live in `[0, 1]`. Noise levels are quoted on the 0–255
//! scale, so `tau = 30` adds a standard deviation of `30/255`.

pub mod io;
pub mod metrics;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{QslrError, Result};
use crate::quat::QMatrix;

pub use io::{load_image, load_mask, save_image, save_mask};
pub use metrics::{mse, psnr, psnr_on, ssim, PSNR_CAP};

/// Set of observed pixels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObservationMask {
    rows: usize,
    cols: usize,
    observed: Vec<bool>,
}

impl ObservationMask {
    pub fn new(rows: usize, cols: usize, observed: Vec<bool>) -> Result<Self> {
        if observed.len() != rows * cols {
            return Err(QslrError::shape(format!(
                "mask has {} entries, need {rows}x{cols}",
                observed.len()
            )));
        }
        Ok(ObservationMask { rows, cols, observed })
    }

    pub fn full(rows: usize, cols: usize) -> Self {
        ObservationMask {
            rows,
            cols,
            observed: vec![true; rows * cols],
        }
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn observed(&self) -> &[bool] {
        &self.observed
    }

    pub fn is_observed(&self, i: usize, j: usize) -> bool {
        self.observed[i * self.cols + j]
    }

    pub fn count(&self) -> usize {
        self.observed.iter().filter(|&&b| b).count()
    }

    pub fn observed_fraction(&self) -> f64 {
        if self.observed.is_empty() {
            return 0.0;
        }
        self.count() as f64 / self.observed.len() as f64
    }

    pub fn indicator(&self) -> Vec<f64> {
        self.observed.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect()
    }

    pub fn complement(&self) -> ObservationMask {
        ObservationMask {
            rows: self.rows,
            cols: self.cols,
            observed: self.observed.iter().map(|b| !b).collect(),
        }
    }

    /// `P_Ω`: zero every unobserved entry.
    pub fn apply(&self, a: &QMatrix) -> Result<QMatrix> {
        if a.dims() != self.dims() {
            return Err(QslrError::shape(format!(
                "mask is {:?}, matrix is {:?}",
                self.dims(),
                a.dims()
            )));
        }
        let mut out = a.clone();
        for p in out.planes_mut() {
            p.iter_mut().zip(&self.observed).for_each(|(v, &o)| {
                if !o {
                    *v = 0.0
                }
            });
        }
        Ok(out)
    }
}

/// Three real planes, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ColorImage {
    rows: usize,
    cols: usize,
    pub r: Vec<f64>,
    pub g: Vec<f64>,
    pub b: Vec<f64>,
}

impl ColorImage {
    pub fn new(rows: usize, cols: usize, r: Vec<f64>, g: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        let n = rows * cols;
        if r.len() != n || g.len() != n || b.len() != n {
            return Err(QslrError::shape(format!("channel lengths do not match {rows}x{cols}")));
        }
        Ok(ColorImage { rows, cols, r, g, b })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        let n = rows * cols;
        ColorImage {
            rows,
            cols,
            r: vec![0.0; n],
            g: vec![0.0; n],
            b: vec![0.0; n],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> [f64; 3]) -> Self {
        let mut img = ColorImage::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                let [r, g, b] = f(i, j);
                let k = i * cols + j;
                img.r[k] = r;
                img.g[k] = g;
                img.b[k] = b;
            }
        }
        img
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

    pub fn pixel(&self, i: usize, j: usize) -> [f64; 3] {
        let k = i * self.cols + j;
        [self.r[k], self.g[k], self.b[k]]
    }

    pub fn channels(&self) -> [&Vec<f64>; 3] {
        [&self.r, &self.g, &self.b]
    }

    pub fn channels_mut(&mut self) -> [&mut Vec<f64>; 3] {
        [&mut self.r, &mut self.g, &mut self.b]
    }

    pub fn clamped(&self) -> ColorImage {
        let c = |v: &Vec<f64>| v.iter().map(|x| x.clamp(0.0, 1.0)).collect();
        ColorImage {
            rows: self.rows,
            cols: self.cols,
            r: c(&self.r),
            g: c(&self.g),
            b: c(&self.b),
        }
    }

    /// Rectangular crop starting at `(top, left)`.
    pub fn crop(&self, top: usize, left: usize, rows: usize, cols: usize) -> Result<ColorImage> {
        if top + rows > self.rows || left + cols > self.cols {
            return Err(QslrError::shape("crop outside the image"));
        }
        Ok(ColorImage::from_fn(rows, cols, |i, j| self.pixel(top + i, left + j)))
    }

    /// Same values, with every unobserved pixel set to black.
    pub fn masked(&self, mask: &ObservationMask) -> Result<ColorImage> {
        if mask.dims() != self.dims() {
            return Err(QslrError::shape("mask and image dimensions differ"));
        }
        let mut out = self.clone();
        for ch in out.channels_mut() {
            ch.iter_mut().zip(mask.observed()).for_each(|(v, &o)| {
                if !o {
                    *v = 0.0
                }
            });
        }
        Ok(out)
    }
}

/// (R, G, B) into the (i, j, k) parts; the real part is zero.
pub fn encode(img: &ColorImage) -> QMatrix {
    let n = img.rows * img.cols;
    QMatrix::from_planes(img.rows, img.cols, vec![0.0; n], img.r.clone(), img.g.clone(), img.b.clone())
        .expect("planes sized from the image")
}

/// Inverse of [`encode`]; the real part is dropped and values are clamped.
pub fn decode(q: &QMatrix) -> ColorImage {
    let wn = q.w.iter().map(|v| v * v).sum::<f64>().sqrt();
    let rest = (q.frobenius_norm_sqr() - wn * wn).max(0.0).sqrt();
    if wn > 1e-3 * rest.max(1.0) {
        log::warn!("decode: dropping a real part of norm {wn:.3e} (imaginary norm {rest:.3e})");
    }
    ColorImage {
        rows: q.rows(),
        cols: q.cols(),
        r: q.x.clone(),
        g: q.y.clone(),
        b: q.z.clone(),
    }
    .clamped()
}

/// One channel as a matrix with only the real part populated.
pub fn encode_channel(rows: usize, cols: usize, channel: &[f64]) -> Result<QMatrix> {
    QMatrix::from_real(rows, cols, channel.to_vec())
}

fn noise_planes(n: usize, sd: f64, seed: u64) -> [Vec<f64>; 3] {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let mut draw = || (0..n).map(|_| sd * normal.sample(&mut rng)).collect::<Vec<f64>>();
    let a = draw();
    let b = draw();
    let c = draw();
    [a, b, c]
}

/// Gaussian noise of standard deviation `tau/255` on the three imaginary planes.
pub fn add_gaussian_noise(q: &QMatrix, tau: f64, seed: u64) -> QMatrix {
    add_gaussian_noise_sd(q, tau / 255.0, seed)
}

/// Gaussian noise with standard deviation `sd` in the units of `q`.
pub fn add_gaussian_noise_sd(q: &QMatrix, sd: f64, seed: u64) -> QMatrix {
    let mut out = q.clone();
    if sd == 0.0 {
        return out;
    }
    let planes = noise_planes(q.len(), sd, seed);
    for (dst, src) in [&mut out.x, &mut out.y, &mut out.z].into_iter().zip(planes.iter()) {
        dst.iter_mut().zip(src).for_each(|(d, s)| *d += s);
    }
    out
}

/// The same noise as [`add_gaussian_noise`] applied to RGB channels; no clamping.
pub fn add_channel_noise(img: &ColorImage, tau: f64, seed: u64) -> ColorImage {
    let mut out = img.clone();
    if tau == 0.0 {
        return out;
    }
    let planes = noise_planes(img.rows * img.cols, tau / 255.0, seed);
    for (dst, src) in out.channels_mut().into_iter().zip(planes.iter()) {
        dst.iter_mut().zip(src).for_each(|(d, s)| *d += s);
    }
    out
}

/// Each pixel observed independently with probability `1 − chi`.
pub fn sample_mask(dims: (usize, usize), chi: f64, seed: u64) -> Result<ObservationMask> {
    if !(0.0..=1.0).contains(&chi) {
        return Err(QslrError::config(format!("missing rate must lie in [0, 1], got {chi}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let observed = (0..dims.0 * dims.1)
        .map(|_| rand::Rng::gen::<f64>(&mut rng) >= chi)
        .collect();
    ObservationMask::new(dims.0, dims.1, observed)
}
