use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::raster::Raster;

/// Normalized 1-D Gaussian taps for offsets `-r..=r`, `r = ceil(3 sigma)`.
pub fn gaussian_kernel(sigma: f64) -> Result<Vec<f64>> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::NonPositiveSigma);
    }
    let radius = libm::ceil(3.0 * sigma) as i64;
    let mut taps: Vec<f64> = (-radius..=radius)
        .map(|i| libm::exp(-((i * i) as f64) / (2.0 * sigma * sigma)))
        .collect();
    let sum: f64 = taps.iter().sum();
    for t in &mut taps {
        *t /= sum;
    }
    Ok(taps)
}

#[inline]
fn clamp_index(i: i64, len: usize) -> usize {
    i.clamp(0, len as i64 - 1) as usize
}

/// Separable Gaussian blur with clamp-to-edge borders, rounded back to 8 bits.
pub fn gaussian_blur(gray: &Raster, sigma: f64) -> Result<Raster> {
    gray.require_gray()?;
    let taps = gaussian_kernel(sigma)?;
    let r = (taps.len() / 2) as i64;
    let (w, h) = gray.dims();
    let src = gray.data();

    let mut horiz = vec![0.0f64; w * h];
    for y in 0..h {
        let row = &src[y * w..(y + 1) * w];
        for x in 0..w {
            let mut acc = 0.0;
            for (k, &t) in taps.iter().enumerate() {
                let sx = clamp_index(x as i64 + k as i64 - r, w);
                acc += t * row[sx] as f64;
            }
            horiz[y * w + x] = acc;
        }
    }

    let mut out = Vec::with_capacity(w * h);
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for (k, &t) in taps.iter().enumerate() {
                let sy = clamp_index(y as i64 + k as i64 - r, h);
                acc += t * horiz[sy * w + x];
            }
            out.push(libm::round(acc).clamp(0.0, 255.0) as u8);
        }
    }
    Raster::gray(w, h, out)
}

/// Sobel response of a gray image, kept in floating point.
#[derive(Clone, Debug, PartialEq)]
pub struct Gradients {
    pub width: usize,
    pub height: usize,
    pub magnitude: Vec<f64>,
    /// `atan2(gy, gx)` in radians; y grows downwards.
    pub direction: Vec<f64>,
}

pub fn sobel_gradients(gray: &Raster) -> Result<Gradients> {
    gray.require_gray()?;
    let (w, h) = gray.dims();
    let src = gray.data();
    let px = |x: i64, y: i64| src[clamp_index(y, h) * w + clamp_index(x, w)] as f64;
    let mut magnitude = Vec::with_capacity(w * h);
    let mut direction = Vec::with_capacity(w * h);
    for y in 0..h as i64 {
        for x in 0..w as i64 {
            let gx = (px(x + 1, y - 1) + 2.0 * px(x + 1, y) + px(x + 1, y + 1))
                - (px(x - 1, y - 1) + 2.0 * px(x - 1, y) + px(x - 1, y + 1));
            let gy = (px(x - 1, y + 1) + 2.0 * px(x, y + 1) + px(x + 1, y + 1))
                - (px(x - 1, y - 1) + 2.0 * px(x, y - 1) + px(x + 1, y - 1));
            magnitude.push(libm::sqrt(gx * gx + gy * gy));
            direction.push(libm::atan2(gy, gx));
        }
    }
    Ok(Gradients {
        width: w,
        height: h,
        magnitude,
        direction,
    })
}
