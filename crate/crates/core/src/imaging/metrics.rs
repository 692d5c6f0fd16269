use super::{ColorImage, ObservationMask};
use crate::error::{QslrError, Result};

/// Finite stand-in for the PSNR of identical images in text outputs.
pub const PSNR_CAP: f64 = 99.0;

const WIN: usize = 11;
const SIGMA: f64 = 1.5;
const C1: f64 = 1e-4;
const C2: f64 = 9e-4;

fn same_dims(a: &ColorImage, b: &ColorImage) -> Result<()> {
    if a.dims() != b.dims() {
        return Err(QslrError::shape(format!("images are {:?} and {:?}", a.dims(), b.dims())));
    }
    Ok(())
}

/// Mean squared error over all pixels and channels.
pub fn mse(a: &ColorImage, b: &ColorImage) -> Result<f64> {
    same_dims(a, b)?;
    let mut s = 0.0;
    let mut n = 0usize;
    for (ca, cb) in a.channels().into_iter().zip(b.channels()) {
        for (x, y) in ca.iter().zip(cb.iter()) {
            s += (x - y) * (x - y);
            n += 1;
        }
    }
    if n == 0 {
        return Err(QslrError::shape("empty image"));
    }
    Ok(s / n as f64)
}

fn psnr_from_mse(m: f64) -> f64 {
    if m == 0.0 {
        f64::INFINITY
    } else {
        10.0 * (1.0 / m).log10()
    }
}

/// Peak 1.0; identical images give `+inf`.
pub fn psnr(a: &ColorImage, b: &ColorImage) -> Result<f64> {
    Ok(psnr_from_mse(mse(a, b)?))
}

/// PSNR restricted to the pixels selected by `region`.
pub fn psnr_on(a: &ColorImage, b: &ColorImage, region: &ObservationMask) -> Result<f64> {
    same_dims(a, b)?;
    if region.dims() != a.dims() {
        return Err(QslrError::shape("region and image dimensions differ"));
    }
    let mut s = 0.0;
    let mut n = 0usize;
    for (ca, cb) in a.channels().into_iter().zip(b.channels()) {
        for ((x, y), &o) in ca.iter().zip(cb.iter()).zip(region.observed()) {
            if o {
                s += (x - y) * (x - y);
                n += 1;
            }
        }
    }
    if n == 0 {
        return Err(QslrError::shape("empty region"));
    }
    Ok(psnr_from_mse(s / n as f64))
}

fn gaussian_window() -> [f64; WIN] {
    let mut g = [0.0; WIN];
    let c = (WIN / 2) as f64;
    for (i, v) in g.iter_mut().enumerate() {
        let d = i as f64 - c;
        *v = (-d * d / (2.0 * SIGMA * SIGMA)).exp();
    }
    let s: f64 = g.iter().sum();
    g.iter_mut().for_each(|v| *v /= s);
    g
}

/// Separable Gaussian filter keeping only fully supported positions.
fn filter_valid(p: &[f64], rows: usize, cols: usize, g: &[f64; WIN]) -> (Vec<f64>, usize, usize) {
    let oc = cols - WIN + 1;
    let or = rows - WIN + 1;
    let mut h = vec![0.0; rows * oc];
    for i in 0..rows {
        for j in 0..oc {
            let mut s = 0.0;
            for (t, gt) in g.iter().enumerate() {
                s += gt * p[i * cols + j + t];
            }
            h[i * oc + j] = s;
        }
    }
    let mut out = vec![0.0; or * oc];
    for i in 0..or {
        for j in 0..oc {
            let mut s = 0.0;
            for (t, gt) in g.iter().enumerate() {
                s += gt * h[(i + t) * oc + j];
            }
            out[i * oc + j] = s;
        }
    }
    (out, or, oc)
}

fn ssim_channel(a: &[f64], b: &[f64], rows: usize, cols: usize, g: &[f64; WIN]) -> f64 {
    let prod = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(u, v)| u * v).collect::<Vec<f64>>();
    let (ma, _, _) = filter_valid(a, rows, cols, g);
    let (mb, _, _) = filter_valid(b, rows, cols, g);
    let (saa, _, _) = filter_valid(&prod(a, a), rows, cols, g);
    let (sbb, _, _) = filter_valid(&prod(b, b), rows, cols, g);
    let (sab, _, _) = filter_valid(&prod(a, b), rows, cols, g);
    let n = ma.len();
    let mut total = 0.0;
    for k in 0..n {
        let (ua, ub) = (ma[k], mb[k]);
        let va = saa[k] - ua * ua;
        let vb = sbb[k] - ub * ub;
        let cov = sab[k] - ua * ub;
        let num = (2.0 * ua * ub + C1) * (2.0 * cov + C2);
        let den = (ua * ua + ub * ub + C1) * (va + vb + C2);
        total += num / den;
    }
    total / n as f64
}

/// Single-scale SSIM: 11x11 Gaussian window with sigma 1.5, averaged over
/// positions where the window fits and then over channels.
pub fn ssim(a: &ColorImage, b: &ColorImage) -> Result<f64> {
    same_dims(a, b)?;
    let (rows, cols) = a.dims();
    if rows < WIN || cols < WIN {
        return Err(QslrError::shape(format!("SSIM needs at least {WIN}x{WIN} pixels")));
    }
    if a == b {
        return Ok(1.0);
    }
    let g = gaussian_window();
    let s: f64 = a
        .channels()
        .into_iter()
        .zip(b.channels())
        .map(|(ca, cb)| ssim_channel(ca, cb, rows, cols, &g))
        .sum();
    Ok(s / 3.0)
}
