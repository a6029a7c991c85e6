use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use super::filter::{gaussian_blur, sobel_gradients, Gradients};
use crate::error::{Error, Result};
use crate::morphology::{close3, exterior_flood8};
use crate::raster::{BinaryMask, Raster};

/// Per-pixel edge flags.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeMap(BinaryMask);

impl EdgeMap {
    pub fn new(edges: BinaryMask) -> Self {
        Self(edges)
    }

    pub fn as_mask(&self) -> &BinaryMask {
        &self.0
    }

    pub fn width(&self) -> usize {
        self.0.width()
    }

    pub fn height(&self) -> usize {
        self.0.height()
    }

    pub fn get(&self, x: usize, y: usize) -> bool {
        self.0.get(x, y)
    }

    pub fn count(&self) -> usize {
        self.0.count()
    }
}

/// Neighbor offsets along the gradient, quantized to 0/45/90/135 degrees.
/// The first offset points towards increasing x or y.
fn quantized_offsets(direction: f64) -> [(i64, i64); 2] {
    let mut deg = direction.to_degrees() % 180.0;
    if deg < 0.0 {
        deg += 180.0;
    }
    if !(22.5..157.5).contains(&deg) {
        [(1, 0), (-1, 0)]
    } else if deg < 67.5 {
        [(1, 1), (-1, -1)]
    } else if deg < 112.5 {
        [(0, 1), (0, -1)]
    } else {
        [(-1, 1), (1, -1)]
    }
}

/// Thins gradient ridges to one pixel. A pixel survives when its magnitude is
/// positive, at least the neighbor ahead along the quantized direction and
/// strictly above the neighbor behind; the strict side breaks plateaus of two
/// equal pixels. Neighbors outside the frame have magnitude 0.
pub fn non_maximum_suppression(g: &Gradients) -> Vec<bool> {
    let (w, h) = (g.width as i64, g.height as i64);
    let mag = |x: i64, y: i64| {
        if x < 0 || y < 0 || x >= w || y >= h {
            0.0
        } else {
            g.magnitude[(y * w + x) as usize]
        }
    };
    let mut keep = vec![false; g.magnitude.len()];
    for y in 0..h {
        for x in 0..w {
            let i = (y * w + x) as usize;
            let m = g.magnitude[i];
            if m <= 0.0 {
                continue;
            }
            let [(ax, ay), (bx, by)] = quantized_offsets(g.direction[i]);
            keep[i] = m >= mag(x + ax, y + ay) && m > mag(x + bx, y + by);
        }
    }
    keep
}

/// Canny edge detector: blur, Sobel, non-maximum suppression and 8-connected
/// hysteresis between `low` and `high` gradient magnitudes.
pub fn canny(gray: &Raster, sigma: f64, low: f64, high: f64) -> Result<EdgeMap> {
    if !(low > 0.0 && low < high) {
        return Err(Error::InvalidThresholds);
    }
    gray.require_gray()?;
    let blurred = gaussian_blur(gray, sigma)?;
    let g = sobel_gradients(&blurred)?;
    let thin = non_maximum_suppression(&g);
    let (w, h) = (g.width, g.height);

    let mut edges = BinaryMask::new(w, h);
    let mut queue = VecDeque::new();
    for i in 0..w * h {
        if thin[i] && g.magnitude[i] >= high {
            edges.labels_mut()[i] = true;
            queue.push_back(i);
        }
    }
    while let Some(i) = queue.pop_front() {
        let (x, y) = (i % w, i / w);
        for ny in y.saturating_sub(1)..=(y + 1).min(h - 1) {
            for nx in x.saturating_sub(1)..=(x + 1).min(w - 1) {
                let j = ny * w + nx;
                if thin[j] && !edges.labels()[j] && g.magnitude[j] >= low {
                    edges.labels_mut()[j] = true;
                    queue.push_back(j);
                }
            }
        }
    }
    Ok(EdgeMap(edges))
}

/// [`edges_to_mask_with`] using two closing iterations.
pub fn edges_to_mask(edges: &EdgeMap) -> BinaryMask {
    edges_to_mask_with(edges, 2)
}

/// Closes the edge map with a 3x3 square (`iterations` times), then marks as
/// foreground everything the frame border cannot reach: enclosed regions and
/// the closed boundary itself.
pub fn edges_to_mask_with(edges: &EdgeMap, iterations: usize) -> BinaryMask {
    let walls = close3(edges.as_mask(), iterations);
    exterior_flood8(&walls).complement()
}
