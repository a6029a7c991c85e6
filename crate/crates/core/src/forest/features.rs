use alloc::vec;
use alloc::vec::Vec;

use crate::naive::sobel_gradients;
use crate::raster::Raster;

pub const FEATURE_NAMES: [&str; 9] = [
    "gray",
    "r",
    "g",
    "b",
    "gradient_magnitude",
    "local_mean_r3",
    "local_std_r3",
    "x_norm",
    "y_norm",
];

const LOCAL_RADIUS: i64 = 3;

/// Feature planes in [`FEATURE_NAMES`] order, one value per pixel each.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureStack {
    width: usize,
    height: usize,
    planes: Vec<Vec<f64>>,
}

impl FeatureStack {
    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn n_features(&self) -> usize {
        self.planes.len()
    }

    pub fn names(&self) -> &'static [&'static str] {
        &FEATURE_NAMES[..self.planes.len()]
    }

    pub fn plane(&self, f: usize) -> &[f64] {
        &self.planes[f]
    }

    pub fn value(&self, f: usize, idx: usize) -> f64 {
        self.planes[f][idx]
    }
}

/// Colors, Sobel magnitude, 7x7 local mean/std of gray (clamp-to-edge) and
/// normalized coordinates. Intensities stay on the 0..=255 scale.
pub fn extract_features(img: &Raster) -> FeatureStack {
    let (w, h) = img.dims();
    let gray = img.to_gray();
    let g = gray.data();
    let mut planes = vec![Vec::with_capacity(w * h); FEATURE_NAMES.len()];

    let grad = sobel_gradients(&gray).expect("gray input");
    for i in 0..w * h {
        let [r, gg, b] = img.rgb_at(i);
        planes[0].push(g[i] as f64);
        planes[1].push(r as f64);
        planes[2].push(gg as f64);
        planes[3].push(b as f64);
        planes[4].push(grad.magnitude[i]);
    }

    let clamp = |v: i64, len: usize| v.clamp(0, len as i64 - 1) as usize;
    let window = ((2 * LOCAL_RADIUS + 1) * (2 * LOCAL_RADIUS + 1)) as f64;
    for y in 0..h as i64 {
        for x in 0..w as i64 {
            let taps = || {
                (-LOCAL_RADIUS..=LOCAL_RADIUS).flat_map(move |dy| {
                    (-LOCAL_RADIUS..=LOCAL_RADIUS)
                        .map(move |dx| g[clamp(y + dy, h) * w + clamp(x + dx, w)] as f64)
                })
            };
            let mean = taps().sum::<f64>() / window;
            let var = taps().map(|v| (v - mean) * (v - mean)).sum::<f64>() / window;
            planes[5].push(mean);
            planes[6].push(libm::sqrt(var));
        }
    }

    for y in 0..h {
        for x in 0..w {
            planes[7].push(if w > 1 { x as f64 / (w - 1) as f64 } else { 0.0 });
            planes[8].push(if h > 1 { y as f64 / (h - 1) as f64 } else { 0.0 });
        }
    }

    FeatureStack {
        width: w,
        height: h,
        planes,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_image_features() {
        let img = Raster::from_fn_gray(7, 7, |_, _| 100);
        let s = extract_features(&img);
        assert_eq!(s.n_features(), 9);
        assert!(s.plane(4).iter().all(|&v| v == 0.0));
        assert!(s.plane(6).iter().all(|&v| v == 0.0));
        assert!(s.plane(5).iter().all(|&v| v == 100.0));
        assert_eq!(s.value(5, 3 * 7 + 3), 100.0);
        // gray input replicates into the color planes
        assert_eq!(s.plane(1), s.plane(0));
        assert_eq!(s.plane(3), s.plane(0));
    }

    #[test]
    fn coordinates_are_normalized() {
        let img = Raster::from_fn_rgb(5, 3, |x, y| [x as u8, y as u8, 0]);
        let s = extract_features(&img);
        for y in 0..3 {
            assert_eq!(s.value(7, y * 5), 0.0);
            assert_eq!(s.value(7, y * 5 + 4), 1.0);
        }
        assert_eq!(s.value(8, 0), 0.0);
        assert_eq!(s.value(8, 14), 1.0);
        assert!(s.planes.iter().flatten().all(|v| v.is_finite()));
    }

    #[test]
    fn local_std_of_checkerboard() {
        let img = Raster::from_fn_gray(15, 15, |x, y| if (x + y) % 2 == 0 { 0 } else { 200 });
        let s = extract_features(&img);
        let c = 7 * 15 + 7;
        // 25 zeros and 24 twos-hundreds in the 7x7 window around an even pixel
        let mean = 24.0 * 200.0 / 49.0;
        assert!((s.value(5, c) - mean).abs() < 1e-9);
        let var = (25.0 * mean * mean + 24.0 * (200.0 - mean) * (200.0 - mean)) / 49.0;
        assert!((s.value(6, c) - libm::sqrt(var)).abs() < 1e-9);
    }
}
