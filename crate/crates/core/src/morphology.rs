//! Binary morphology, distance transforms and connected components.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use crate::raster::BinaryMask;

/// 3x3 square dilation. Pixels outside the frame count as background.
pub fn dilate3(mask: &BinaryMask) -> BinaryMask {
    let (w, h) = mask.dims();
    BinaryMask::from_fn(w, h, |x, y| {
        for ny in y.saturating_sub(1)..=(y + 1).min(h - 1) {
            for nx in x.saturating_sub(1)..=(x + 1).min(w - 1) {
                if mask.get(nx, ny) {
                    return true;
                }
            }
        }
        false
    })
}

/// 3x3 square erosion. Pixels outside the frame count as foreground, so
/// closing never loses mass at the image border.
pub fn erode3(mask: &BinaryMask) -> BinaryMask {
    let (w, h) = mask.dims();
    BinaryMask::from_fn(w, h, |x, y| {
        for ny in y.saturating_sub(1)..=(y + 1).min(h - 1) {
            for nx in x.saturating_sub(1)..=(x + 1).min(w - 1) {
                if !mask.get(nx, ny) {
                    return false;
                }
            }
        }
        true
    })
}

/// `iterations` dilations followed by as many erosions.
pub fn close3(mask: &BinaryMask, iterations: usize) -> BinaryMask {
    let mut out = mask.clone();
    for _ in 0..iterations {
        out = dilate3(&out);
    }
    for _ in 0..iterations {
        out = erode3(&out);
    }
    out
}

/// Pixels reachable from the frame border through non-`walls` pixels,
/// moving in 8 directions.
pub fn exterior_flood8(walls: &BinaryMask) -> BinaryMask {
    let (w, h) = walls.dims();
    let mut outside = BinaryMask::new(w, h);
    let mut queue = VecDeque::new();
    for y in 0..h {
        for x in 0..w {
            if (x == 0 || y == 0 || x == w - 1 || y == h - 1) && !walls.get(x, y) {
                outside.set(x, y, true);
                queue.push_back((x, y));
            }
        }
    }
    while let Some((x, y)) = queue.pop_front() {
        for ny in y.saturating_sub(1)..=(y + 1).min(h - 1) {
            for nx in x.saturating_sub(1)..=(x + 1).min(w - 1) {
                if !walls.get(nx, ny) && !outside.get(nx, ny) {
                    outside.set(nx, ny, true);
                    queue.push_back((nx, ny));
                }
            }
        }
    }
    outside
}

/// City-block (4-connected) distance from each `inside` pixel to the nearest
/// pixel not inside; 0 for pixels not inside. With `frame_is_outside` the
/// area beyond the image border counts as outside, otherwise it is ignored
/// (a fully inside image then gets `u32::MAX` everywhere).
pub fn distance_l1(width: usize, height: usize, inside: &[bool], frame_is_outside: bool) -> Vec<u32> {
    const INF: u32 = u32::MAX;
    let beyond = if frame_is_outside { 0 } else { INF };
    let mut d: Vec<u32> = inside.iter().map(|&v| if v { INF } else { 0 }).collect();
    let step = |v: u32| v.saturating_add(1);
    for y in 0..height {
        for x in 0..width {
            let i = y * width + x;
            if d[i] == 0 {
                continue;
            }
            let up = if y > 0 { d[i - width] } else { beyond };
            let left = if x > 0 { d[i - 1] } else { beyond };
            d[i] = d[i].min(step(up)).min(step(left));
        }
    }
    for y in (0..height).rev() {
        for x in (0..width).rev() {
            let i = y * width + x;
            if d[i] == 0 {
                continue;
            }
            let down = if y + 1 < height { d[i + width] } else { beyond };
            let right = if x + 1 < width { d[i + 1] } else { beyond };
            d[i] = d[i].min(step(down)).min(step(right));
        }
    }
    d
}

/// Erodes `mask` by `radius` pixels in the city-block metric: a pixel stays
/// only if every pixel within L1 distance `radius` is foreground. The frame
/// border does not erode.
pub fn erode_l1(mask: &BinaryMask, radius: u32) -> BinaryMask {
    let (w, h) = mask.dims();
    let d = distance_l1(w, h, mask.labels(), false);
    let labels = d.iter().map(|&v| v > radius).collect();
    BinaryMask::from_labels(w, h, labels).expect("same size")
}

/// Result of 4-connected component labeling.
#[derive(Clone, Debug)]
pub struct Components {
    /// Component index per pixel, `None` for excluded pixels.
    pub labels: Vec<Option<usize>>,
    /// Pixel indices of each component, in BFS order. Components are numbered
    /// in row-major order of their first pixel.
    pub members: Vec<Vec<usize>>,
}

/// Groups pixels with equal `Some(key)` into 4-connected components.
pub fn components4<K: PartialEq + Copy>(width: usize, height: usize, keys: &[Option<K>]) -> Components {
    let mut labels = vec![None; width * height];
    let mut members = Vec::new();
    let mut queue = VecDeque::new();
    for start in 0..width * height {
        let Some(key) = keys[start] else { continue };
        if labels[start].is_some() {
            continue;
        }
        let id = members.len();
        let mut comp = Vec::new();
        labels[start] = Some(id);
        queue.push_back(start);
        while let Some(i) = queue.pop_front() {
            comp.push(i);
            let (x, y) = (i % width, i / width);
            let mut visit = |j: usize| {
                if labels[j].is_none() && keys[j] == Some(key) {
                    labels[j] = Some(id);
                    queue.push_back(j);
                }
            };
            if y > 0 {
                visit(i - width);
            }
            if x > 0 {
                visit(i - 1);
            }
            if x + 1 < width {
                visit(i + 1);
            }
            if y + 1 < height {
                visit(i + width);
            }
        }
        members.push(comp);
    }
    Components { labels, members }
}
