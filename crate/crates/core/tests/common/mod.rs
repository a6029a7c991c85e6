//! Brute-force reference implementations shared by the integration tests.
#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use segbench_core::flow::FlowNetwork;
use segbench_core::graphcut::Energy;
use segbench_core::{BinaryMask, LabelRaster, Raster, Seed};

/// Smallest `t` maximizing the between-class variance, compared as exact
/// rationals. Classes are `{v <= t}` and `{v > t}`; per-class sums are
/// recomputed from scratch for every `t`. Requires a total below 2^16 pixels.
pub fn otsu_exhaustive(counts: &[u64; 256]) -> u8 {
    let n: u128 = counts.iter().map(|&c| c as u128).sum();
    assert!(n > 0 && n < 1 << 16);
    let s: u128 = counts.iter().enumerate().map(|(v, &c)| v as u128 * c as u128).sum();
    // sigma_b^2 = (S0 N - n0 S)^2 / (n0 n1 N^2); compare num/den exactly
    let mut best: Option<(u8, u128, u128)> = None;
    for t in 0..256 {
        let n0: u128 = counts[..=t].iter().map(|&c| c as u128).sum();
        let s0: u128 = counts[..=t].iter().enumerate().map(|(v, &c)| v as u128 * c as u128).sum();
        let n1 = n - n0;
        let (num, den) = if n0 == 0 || n1 == 0 {
            (0, 1)
        } else {
            let d = (s0 * n).abs_diff(n0 * s);
            (d * d, n0 * n1)
        };
        let better = match best {
            None => true,
            Some((_, bn, bd)) => num * bd > bn * den,
        };
        if better {
            best = Some((t as u8, num, den));
        }
    }
    best.unwrap().0
}

/// A directed arc list over `n` inner nodes plus source `n` and sink `n + 1`.
#[derive(Clone, Debug)]
pub struct ArcList {
    pub n: usize,
    pub arcs: Vec<(usize, usize, f64)>,
}

impl ArcList {
    pub fn cut_value(&self, source_side: &[bool]) -> f64 {
        let side = |v: usize| {
            if v == self.n {
                true
            } else if v == self.n + 1 {
                false
            } else {
                source_side[v]
            }
        };
        self.arcs.iter().filter(|&&(u, v, _)| side(u) && !side(v)).map(|a| a.2).sum()
    }

    /// Minimum s-t cut value over all `2^n` partitions of the inner nodes.
    pub fn min_cut(&self) -> f64 {
        (0u32..1 << self.n)
            .map(|bits| {
                let side: Vec<bool> = (0..self.n).map(|i| bits >> i & 1 == 1).collect();
                self.cut_value(&side)
            })
            .fold(f64::INFINITY, f64::min)
    }
}

/// Minimum of `energy` over every labeling that honors its hard labels.
pub fn exhaustive_min_energy(energy: &Energy) -> f64 {
    let n = energy.width * energy.height;
    assert!(n <= 16);
    (0u32..1 << n)
        .map(|bits| (0..n).map(|i| bits >> i & 1 == 1).collect::<Vec<bool>>())
        .filter(|l| energy.respects_hard(l))
        .map(|l| energy.evaluate(&l))
        .fold(f64::INFINITY, f64::min)
}

/// `|a ∩ b| / |a ∪ b|` by counting pixels through `get`.
pub fn iou_by_counting(a: &BinaryMask, b: &BinaryMask) -> f64 {
    let (mut inter, mut union) = (0u32, 0u32);
    for y in 0..a.height() {
        for x in 0..a.width() {
            inter += (a.get(x, y) && b.get(x, y)) as u32;
            union += (a.get(x, y) || b.get(x, y)) as u32;
        }
    }
    if union == 0 {
        1.0
    } else {
        inter as f64 / union as f64
    }
}

/// Gaussian blur as one dense 2-D convolution with a `(2r+1)^2` kernel,
/// `r = ceil(3 sigma)`, clamp-to-edge borders.
pub fn dense_blur(gray: &Raster, sigma: f64) -> Vec<f64> {
    let r = (3.0 * sigma).ceil() as i64;
    let mut kernel = Vec::new();
    for dy in -r..=r {
        for dx in -r..=r {
            kernel.push((-((dx * dx + dy * dy) as f64) / (2.0 * sigma * sigma)).exp());
        }
    }
    let norm: f64 = kernel.iter().sum();
    let (w, h) = gray.dims();
    let mut out = vec![0.0; w * h];
    for y in 0..h as i64 {
        for x in 0..w as i64 {
            let mut acc = 0.0;
            let mut k = 0;
            for dy in -r..=r {
                for dx in -r..=r {
                    let sx = (x + dx).clamp(0, w as i64 - 1) as usize;
                    let sy = (y + dy).clamp(0, h as i64 - 1) as usize;
                    acc += kernel[k] * gray.at(sx, sy)[0] as f64;
                    k += 1;
                }
            }
            out[y as usize * w + x as usize] = acc / norm;
        }
    }
    out
}

/// Pixels 8-reachable from outside the frame without entering `walls`.
pub fn border_reachable8(walls: &BinaryMask) -> Vec<bool> {
    let (w, h) = walls.dims();
    let mut seen = vec![false; w * h];
    let mut stack: Vec<(usize, usize)> = Vec::new();
    for y in 0..h {
        for x in 0..w {
            if (x == 0 || y == 0 || x + 1 == w || y + 1 == h) && !walls.get(x, y) {
                seen[y * w + x] = true;
                stack.push((x, y));
            }
        }
    }
    while let Some((x, y)) = stack.pop() {
        for ny in y.saturating_sub(1)..=(y + 1).min(h - 1) {
            for nx in x.saturating_sub(1)..=(x + 1).min(w - 1) {
                let j = ny * w + nx;
                if !seen[j] && !walls.get(nx, ny) {
                    seen[j] = true;
                    stack.push((nx, ny));
                }
            }
        }
    }
    seen
}

pub fn random_histogram(rng: &mut ChaCha8Rng) -> [u64; 256] {
    let mut counts = [0u64; 256];
    match rng.random_range(0..4) {
        // dense noise
        0 => counts.iter_mut().for_each(|c| *c = rng.random_range(0..200)),
        // a few spikes
        1 => {
            for _ in 0..rng.random_range(1..6) {
                counts[rng.random_range(0..256)] += rng.random_range(1..200);
            }
        }
        // two bumps
        2 => {
            for _ in 0..2 {
                let center: i64 = rng.random_range(0..256);
                let width: i64 = rng.random_range(2..30);
                for v in (center - width).max(0)..=(center + width).min(255) {
                    counts[v as usize] += rng.random_range(0..100);
                }
            }
        }
        // sparse
        _ => counts.iter_mut().for_each(|c| {
            if rng.random_bool(0.05) {
                *c = rng.random_range(1..50)
            }
        }),
    }
    if counts.iter().all(|&c| c == 0) {
        counts[rng.random_range(0..256)] = 1;
    }
    counts
}

pub fn random_network(rng: &mut ChaCha8Rng) -> (FlowNetwork, ArcList) {
    let n = rng.random_range(1..=8);
    let mut net = FlowNetwork::new(n);
    let mut list = ArcList { n, arcs: Vec::new() };
    let (s, t) = (net.source(), net.sink());
    for u in 0..n + 2 {
        for v in 0..n + 2 {
            if u == v || u == t || v == s || !rng.random_bool(0.45) {
                continue;
            }
            let cap = rng.random_range(1..=20) as f64;
            net.add_edge(u, v, cap, 0.0);
            list.arcs.push((u, v, cap));
        }
    }
    (net, list)
}

pub fn random_seeded_image(rng: &mut ChaCha8Rng, w: usize, h: usize) -> (Raster, LabelRaster) {
    let img = Raster::from_fn_gray(w, h, |_, _| rng.random_range(0..=255));
    loop {
        let values: Vec<Seed> = (0..w * h)
            .map(|_| match rng.random_range(0..6) {
                0 => Seed::Fg,
                1 => Seed::Bg,
                _ => Seed::Unknown,
            })
            .collect();
        let seeds = LabelRaster::from_values(w, h, values).unwrap();
        if seeds.has_fg() && seeds.has_bg() {
            return (img, seeds);
        }
    }
}

pub fn random_pixels(rng: &mut ChaCha8Rng) -> Vec<[f64; 3]> {
    let clusters = rng.random_range(1..5);
    let centers: Vec<[f64; 3]> = (0..clusters).map(|_| [rng.random(), rng.random(), rng.random()]).collect();
    (0..rng.random_range(60..400))
        .map(|i| {
            let c = centers[i % clusters];
            c.map(|v| v + rng.random_range(-0.08..0.08))
        })
        .collect()
}
