//! Non-local self-similarity: group similar patches into low-rank matrices,
//! restore each group, and average the overlapping patches back.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{QslrError, Result};
use crate::quat::QMatrix;
use crate::solvers::{pl_admm_denoise, SolverConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NssConfig {
    pub patch_side: usize,
    /// anchor spacing; `patch_side / 2` when absent
    pub stride: Option<usize>,
    pub num_neighbors: usize,
    pub search_window: usize,
    pub relaxation: f64,
    pub outer_passes: usize,
    /// match on patches with their mean removed
    pub mean_removal: bool,
}

impl Default for NssConfig {
    fn default() -> Self {
        NssConfig {
            patch_side: 10,
            stride: None,
            num_neighbors: 70,
            search_window: 30,
            relaxation: 0.1,
            outer_passes: 4,
            mean_removal: false,
        }
    }
}

impl NssConfig {
    pub fn stride(&self) -> usize {
        self.stride.unwrap_or((self.patch_side / 2).max(1))
    }

    pub fn validate(&self) -> Result<()> {
        if self.patch_side == 0 || self.num_neighbors == 0 || self.outer_passes == 0 || self.stride() == 0 {
            return Err(QslrError::config("patch_side, stride, num_neighbors and outer_passes must be >= 1"));
        }
        if self.search_window < self.patch_side {
            return Err(QslrError::config(format!(
                "search window {} is smaller than the patch {}",
                self.search_window, self.patch_side
            )));
        }
        if !(0.0..=1.0).contains(&self.relaxation) {
            return Err(QslrError::config("relaxation must lie in [0, 1]"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PatchGroup {
    /// `d x s`, one vectorized patch per column
    pub matrix: QMatrix,
    pub anchor_pos: (usize, usize),
    /// member 0 is the anchor
    pub member_positions: Vec<(usize, usize)>,
}

/// `0, stride, 2 stride, ...` with the last position clamped to `len − patch`.
pub fn anchor_grid(len: usize, patch: usize, stride: usize) -> Vec<usize> {
    if patch > len {
        return Vec::new();
    }
    let last = len - patch;
    let mut v: Vec<usize> = (0..).map(|i| i * stride).take_while(|&p| p < last).collect();
    v.push(last);
    v
}

fn patch_vec(img: &QMatrix, (r, c): (usize, usize), p: usize) -> [Vec<f64>; 4] {
    let n = img.cols();
    let mut out: [Vec<f64>; 4] = Default::default();
    for (dst, src) in out.iter_mut().zip(img.planes()) {
        dst.reserve(p * p);
        for a in 0..p {
            let row = (r + a) * n + c;
            dst.extend_from_slice(&src[row..row + p]);
        }
    }
    out
}

fn demean(mut v: [Vec<f64>; 4]) -> [Vec<f64>; 4] {
    for plane in v.iter_mut() {
        let m = plane.iter().sum::<f64>() / plane.len() as f64;
        plane.iter_mut().for_each(|x| *x -= m);
    }
    v
}

/// Squared quaternion Frobenius distance between two patches.
pub fn patch_distance(a: &[Vec<f64>; 4], b: &[Vec<f64>; 4]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(pa, pb)| pa.iter().zip(pb).map(|(x, y)| (x - y) * (x - y)).sum::<f64>())
        .sum()
}

fn window_start(anchor: usize, patch: usize, window: usize, len: usize) -> usize {
    let centered = (anchor + patch / 2) as isize - (window / 2) as isize;
    centered.clamp(0, (len - window) as isize) as usize
}

/// Groups of `num_neighbors` most similar patches around every anchor, the
/// anchor first; ties fall to raster order.
pub fn extract_and_match(image: &QMatrix, cfg: &NssConfig) -> Result<Vec<PatchGroup>> {
    cfg.validate()?;
    let (h, w) = image.dims();
    let p = cfg.patch_side;
    if p > h || p > w {
        return Err(QslrError::config(format!("patch {p} does not fit a {h}x{w} image")));
    }
    let lr = cfg.search_window.min(h);
    let lc = cfg.search_window.min(w);
    let candidates = (lr - p + 1) * (lc - p + 1);
    if candidates < cfg.num_neighbors {
        return Err(QslrError::config(format!(
            "search window holds {candidates} patches, fewer than {} neighbors",
            cfg.num_neighbors
        )));
    }
    let prep = |v| if cfg.mean_removal { demean(v) } else { v };
    let rows = anchor_grid(h, p, cfg.stride());
    let cols = anchor_grid(w, p, cfg.stride());
    let mut groups = Vec::with_capacity(rows.len() * cols.len());
    for &ar in &rows {
        for &ac in &cols {
            let anchor = prep(patch_vec(image, (ar, ac), p));
            let r0 = window_start(ar, p, lr, h);
            let c0 = window_start(ac, p, lc, w);
            let mut scored: Vec<(f64, (usize, usize))> = Vec::with_capacity(candidates);
            for r in r0..=r0 + lr - p {
                for c in c0..=c0 + lc - p {
                    if (r, c) == (ar, ac) {
                        continue;
                    }
                    let d = patch_distance(&anchor, &prep(patch_vec(image, (r, c), p)));
                    scored.push((d, (r, c)));
                }
            }
            scored.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            let mut members = vec![(ar, ac)];
            members.extend(scored.iter().take(cfg.num_neighbors - 1).map(|s| s.1));
            groups.push(PatchGroup {
                matrix: group_matrix(image, &members, p),
                anchor_pos: (ar, ac),
                member_positions: members,
            });
        }
    }
    Ok(groups)
}

fn group_matrix(image: &QMatrix, members: &[(usize, usize)], p: usize) -> QMatrix {
    let d = p * p;
    let s = members.len();
    let mut m = QMatrix::zeros(d, s);
    for (j, &pos) in members.iter().enumerate() {
        let v = patch_vec(image, pos, p);
        for (dst, src) in m.planes_mut().into_iter().zip(v.iter()) {
            for i in 0..d {
                dst[i * s + j] = src[i];
            }
        }
    }
    m
}

#[derive(Debug, Clone)]
pub struct GroupOutput {
    pub matrices: Vec<QMatrix>,
    /// groups whose solve failed and were passed through unchanged
    pub failures: usize,
}

/// Worker count from `QSLR_THREADS`, defaulting to the available cores.
pub fn thread_count() -> usize {
    std::env::var("QSLR_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// Restore every group independently; output order follows input order.
pub fn denoise_groups(groups: &[PatchGroup], cfg: &SolverConfig, _nss: &NssConfig) -> Result<GroupOutput> {
    if groups.is_empty() {
        return Err(QslrError::config("no patch groups to restore"));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(thread_count())
        .build()
        .map_err(|e| QslrError::Numerical(format!("thread pool: {e}")))?;
    let results: Vec<std::result::Result<QMatrix, QMatrix>> = pool.install(|| {
        groups
            .par_iter()
            .map(|g| match pl_admm_denoise(&g.matrix, cfg) {
                Ok((x, _)) => Ok(x),
                Err(e) => {
                    log::warn!("group at {:?} passed through: {e}", g.anchor_pos);
                    Err(g.matrix.clone())
                }
            })
            .collect()
    });
    let failures = results.iter().filter(|r| r.is_err()).count();
    let matrices = results.into_iter().map(|r| r.unwrap_or_else(|m| m)).collect();
    Ok(GroupOutput { matrices, failures })
}

/// Per-pixel number of covering patches.
pub fn coverage_counts(positions: &[Vec<(usize, usize)>], dims: (usize, usize), patch: usize) -> Vec<u32> {
    let mut counts = vec![0u32; dims.0 * dims.1];
    for group in positions {
        for &(r, c) in group {
            for a in 0..patch {
                for b in 0..patch {
                    counts[(r + a) * dims.1 + c + b] += 1;
                }
            }
        }
    }
    counts
}

/// Uniform average of all patch copies. Contributions are summed in anchor
/// order, so the result does not depend on the order of `groups_out`.
/// Uncovered pixels take the value of `fallback`, or zero.
pub fn aggregate(
    groups_out: &[QMatrix],
    positions: &[Vec<(usize, usize)>],
    dims: (usize, usize),
    fallback: Option<&QMatrix>,
) -> Result<QMatrix> {
    if groups_out.len() != positions.len() {
        return Err(QslrError::shape("one position list per group is required"));
    }
    let (h, w) = dims;
    let mut order: Vec<usize> = (0..groups_out.len()).collect();
    order.sort_by_key(|&i| positions[i].clone());
    let mut sum = QMatrix::zeros(h, w);
    let mut count = vec![0u32; h * w];
    for &g in &order {
        let m = &groups_out[g];
        let pos = &positions[g];
        let d = m.rows();
        let p = (d as f64).sqrt().round() as usize;
        if p * p != d || m.cols() != pos.len() {
            return Err(QslrError::shape("group matrix does not match its positions"));
        }
        let s = m.cols();
        for (j, &(r, c)) in pos.iter().enumerate() {
            if r + p > h || c + p > w {
                return Err(QslrError::shape(format!("patch at ({r}, {c}) leaves the image")));
            }
            for a in 0..p {
                for b in 0..p {
                    let dst = (r + a) * w + c + b;
                    let src = (a * p + b) * s + j;
                    for (ds, ss) in sum.planes_mut().into_iter().zip(m.planes()) {
                        ds[dst] += ss[src];
                    }
                    count[dst] += 1;
                }
            }
        }
    }
    let zero = QMatrix::zeros(h, w);
    let fb = fallback.unwrap_or(&zero);
    if fb.dims() != dims {
        return Err(QslrError::shape("fallback has the wrong dimensions"));
    }
    for (ds, fs) in sum.planes_mut().into_iter().zip(fb.planes()) {
        for (k, v) in ds.iter_mut().enumerate() {
            if count[k] == 0 {
                *v = fs[k];
            } else {
                *v /= count[k] as f64;
            }
        }
    }
    Ok(sum)
}

#[derive(Debug, Clone)]
pub struct NssOutcome {
    pub image: QMatrix,
    pub failures: usize,
    pub groups_per_pass: usize,
}

/// Passes of match, restore and aggregate with back-addition
/// `Y_t = X_{t−1} + relaxation (Y − X_{t−1})`.
pub fn nss_denoise(y: &QMatrix, cfg: &SolverConfig, nss: &NssConfig) -> Result<NssOutcome> {
    nss.validate()?;
    let mut x = y.clone();
    let mut failures = 0;
    let mut groups_per_pass = 0;
    for t in 1..=nss.outer_passes {
        let input = if t == 1 {
            y.clone()
        } else {
            QMatrix::combine(&[(1.0 - nss.relaxation, &x), (nss.relaxation, y)])
        };
        let groups = extract_and_match(&input, nss)?;
        groups_per_pass = groups.len();
        let out = denoise_groups(&groups, cfg, nss)?;
        failures += out.failures;
        let positions: Vec<Vec<(usize, usize)>> = groups.iter().map(|g| g.member_positions.clone()).collect();
        x = aggregate(&out.matrices, &positions, y.dims(), Some(&input))?;
    }
    Ok(NssOutcome {
        image: x,
        failures,
        groups_per_pass,
    })
}
