//! Masked image-consistency metrics. PSNR runs over raw RGB samples; SSIM
//! runs over BT.601 luma with the classic 11x11 sigma=1.5 Gaussian window,
//! restricted to windows inside the mask's bounding box that are at least
//! 95 % mask-covered.

use thiserror::Error;

use super::image::{Image, Mask};

const WINDOW: usize = 11;
const SIGMA: f64 = 1.5;
const K1: f64 = 0.01;
const K2: f64 = 0.03;
const L: f64 = 255.0;
const MIN_COVERAGE: f64 = 0.95;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MetricError {
    #[error("images and mask must share dimensions")]
    DimensionMismatch,
    #[error("mask has no true pixels")]
    EmptyMask,
    #[error("masked region too small for an 11x11 window")]
    RegionTooSmall,
}

fn check_dims(a: &Image, b: &Image, mask: &Mask) -> Result<(), MetricError> {
    if !a.same_dims(b) || a.width != mask.width || a.height != mask.height {
        return Err(MetricError::DimensionMismatch);
    }
    Ok(())
}

/// Peak signal-to-noise ratio in dB over masked RGB samples (alpha
/// excluded). Identical masked regions yield `f64::INFINITY`, which renders
/// as `inf`.
pub fn psnr(a: &Image, b: &Image, mask: &Mask) -> Result<f64, MetricError> {
    check_dims(a, b, mask)?;
    let mut sum_sq: u64 = 0;
    let mut count: u64 = 0;
    for y in 0..a.height {
        for x in 0..a.width {
            if !mask.get(x, y) {
                continue;
            }
            count += 1;
            let pa = a.get(x, y);
            let pb = b.get(x, y);
            for c in 0..3 {
                let d = i64::from(pa[c]) - i64::from(pb[c]);
                sum_sq += (d * d) as u64;
            }
        }
    }
    if count == 0 {
        return Err(MetricError::EmptyMask);
    }
    if sum_sq == 0 {
        return Ok(f64::INFINITY);
    }
    let mse = sum_sq as f64 / (3.0 * count as f64);
    Ok(10.0 * (L * L / mse).log10())
}

fn luma(img: &Image) -> Vec<f64> {
    let mut out = Vec::with_capacity(img.width as usize * img.height as usize);
    for y in 0..img.height {
        for x in 0..img.width {
            let p = img.get(x, y);
            out.push(0.299 * f64::from(p[0]) + 0.587 * f64::from(p[1]) + 0.114 * f64::from(p[2]));
        }
    }
    out
}

fn gaussian_kernel() -> [[f64; WINDOW]; WINDOW] {
    let mut k = [[0.0; WINDOW]; WINDOW];
    let mid = (WINDOW / 2) as f64;
    let mut sum = 0.0;
    for (j, row) in k.iter_mut().enumerate() {
        for (i, cell) in row.iter_mut().enumerate() {
            let dx = i as f64 - mid;
            let dy = j as f64 - mid;
            *cell = (-(dx * dx + dy * dy) / (2.0 * SIGMA * SIGMA)).exp();
            sum += *cell;
        }
    }
    for row in k.iter_mut() {
        for cell in row.iter_mut() {
            *cell /= sum;
        }
    }
    k
}

/// Mean structural similarity over masked luma. Exactly 1.0 when `a == b`.
pub fn ssim(a: &Image, b: &Image, mask: &Mask) -> Result<f64, MetricError> {
    check_dims(a, b, mask)?;
    let (x0, y0, x1, y1) = mask.bounding_box().ok_or(MetricError::EmptyMask)?;
    let (bw, bh) = ((x1 - x0 + 1) as usize, (y1 - y0 + 1) as usize);
    if bw < WINDOW || bh < WINDOW {
        return Err(MetricError::RegionTooSmall);
    }

    let la = luma(a);
    let lb = luma(b);
    let kernel = gaussian_kernel();
    let c1 = (K1 * L) * (K1 * L);
    let c2 = (K2 * L) * (K2 * L);
    let stride = a.width as usize;
    let min_cover = MIN_COVERAGE * (WINDOW * WINDOW) as f64;

    let mut total = 0.0;
    let mut windows = 0u64;
    for wy in y0..=(y1 + 1 - WINDOW as u32) {
        for wx in x0..=(x1 + 1 - WINDOW as u32) {
            let mut covered = 0usize;
            for j in 0..WINDOW as u32 {
                for i in 0..WINDOW as u32 {
                    if mask.get(wx + i, wy + j) {
                        covered += 1;
                    }
                }
            }
            if (covered as f64) < min_cover {
                continue;
            }
            // Statistics run over masked pixels only, with the kernel
            // renormalized to the included weight; out-of-mask pixels must
            // not leak into a masked comparison.
            let mut wsum = 0.0;
            let (mut mx, mut my) = (0.0, 0.0);
            let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
            for (j, row) in kernel.iter().enumerate() {
                let base = (wy as usize + j) * stride + wx as usize;
                for (i, &w) in row.iter().enumerate() {
                    if !mask.get(wx + i as u32, wy + j as u32) {
                        continue;
                    }
                    let va = la[base + i];
                    let vb = lb[base + i];
                    wsum += w;
                    mx += w * va;
                    my += w * vb;
                    // Grouping the sample product first keeps the
                    // accumulation symmetric in (a, b) bit for bit.
                    sxx += w * (va * va);
                    syy += w * (vb * vb);
                    sxy += w * (va * vb);
                }
            }
            mx /= wsum;
            my /= wsum;
            let vx = sxx / wsum - mx * mx;
            let vy = syy / wsum - my * my;
            let cov = sxy / wsum - mx * my;
            total += (2.0 * mx * my + c1) * (2.0 * cov + c2)
                / ((mx * mx + my * my + c1) * (vx + vy + c2));
            windows += 1;
        }
    }
    if windows == 0 {
        return Err(MetricError::RegionTooSmall);
    }
    Ok(total / windows as f64)
}
