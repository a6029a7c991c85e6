use alloc::collections::VecDeque;

use crate::error::{Error, Result};
use crate::raster::{BinaryMask, LabelRaster, Raster, Seed};

/// Seeded region growing over 4-connectivity.
///
/// The region starts as all foreground seeds; a neighboring pixel joins when
/// its intensity is within `tau` of the region's running mean, which is
/// updated after every accepted pixel. Background seeds never join. Seeds are
/// queued in row-major order and the frontier is FIFO, so the result is fully
/// determined by the inputs.
pub fn region_grow(gray: &Raster, seeds: &LabelRaster, tau: f64) -> Result<BinaryMask> {
    gray.require_gray()?;
    if seeds.dims() != gray.dims() {
        return Err(Error::DimensionMismatch {
            expected: gray.dims(),
            actual: seeds.dims(),
        });
    }
    if !(tau >= 0.0) {
        return Err(Error::InvalidParameter("tau must be >= 0"));
    }
    let (w, h) = gray.dims();
    let px = gray.data();
    let mut region = BinaryMask::new(w, h);
    let mut queue = VecDeque::new();
    let (mut sum, mut n) = (0.0f64, 0usize);
    for (i, &s) in seeds.values().iter().enumerate() {
        if s == Seed::Fg {
            region.labels_mut()[i] = true;
            queue.push_back(i);
            sum += px[i] as f64;
            n += 1;
        }
    }
    if n == 0 {
        return Err(Error::NoSeeds);
    }
    let mut mean = sum / n as f64;

    while let Some(i) = queue.pop_front() {
        let (x, y) = (i % w, i / w);
        let neighbors = [
            (y > 0).then(|| i - w),
            (x > 0).then(|| i - 1),
            (x + 1 < w).then(|| i + 1),
            (y + 1 < h).then(|| i + w),
        ];
        for j in neighbors.into_iter().flatten() {
            if region.labels()[j] || seeds.values()[j] == Seed::Bg {
                continue;
            }
            let v = px[j] as f64;
            if (v - mean).abs() <= tau {
                region.labels_mut()[j] = true;
                n += 1;
                mean += (v - mean) / n as f64;
                queue.push_back(j);
            }
        }
    }
    Ok(region)
}
