use crate::error::{Error, Result};
use crate::raster::{BinaryMask, Raster};

/// Intensity counts of a gray image.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Histogram256 {
    pub counts: [u64; 256],
}

impl Histogram256 {
    pub fn from_counts(counts: [u64; 256]) -> Self {
        Self { counts }
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

pub fn histogram(gray: &Raster) -> Result<Histogram256> {
    gray.require_gray()?;
    let mut counts = [0u64; 256];
    for &v in gray.data() {
        counts[v as usize] += 1;
    }
    Ok(Histogram256 { counts })
}

/// Between-class variance `w0 * w1 * (mu0 - mu1)^2` for classes `{v <= t}`
/// and `{v > t}`, given the cumulative count and intensity sum of the lower
/// class. Zero when either class is empty.
pub fn between_class_variance(total: u64, total_sum: u64, count_low: u64, sum_low: u64) -> f64 {
    let count_high = total - count_low;
    if count_low == 0 || count_high == 0 {
        return 0.0;
    }
    let n = total as f64;
    let w0 = count_low as f64 / n;
    let w1 = count_high as f64 / n;
    let mu0 = sum_low as f64 / count_low as f64;
    let mu1 = (total_sum - sum_low) as f64 / count_high as f64;
    let d = mu0 - mu1;
    w0 * w1 * d * d
}

/// Otsu's threshold: the smallest `t` maximizing the between-class variance.
/// A single-mode histogram scores zero everywhere and yields 0.
pub fn otsu_threshold(h: &Histogram256) -> Result<u8> {
    let total = h.total();
    if total == 0 {
        return Err(Error::EmptyHistogram);
    }
    let total_sum: u64 = h
        .counts
        .iter()
        .enumerate()
        .map(|(v, &c)| v as u64 * c)
        .sum();
    let mut best_t = 0u8;
    let mut best = f64::NEG_INFINITY;
    let (mut count_low, mut sum_low) = (0u64, 0u64);
    for t in 0..256usize {
        count_low += h.counts[t];
        sum_low += t as u64 * h.counts[t];
        let score = between_class_variance(total, total_sum, count_low, sum_low);
        if score > best {
            best = score;
            best_t = t as u8;
        }
    }
    Ok(best_t)
}

/// Foreground is every pixel strictly brighter than `t`.
pub fn threshold_segment(gray: &Raster, t: u8) -> Result<BinaryMask> {
    gray.require_gray()?;
    let labels = gray.data().iter().map(|&v| v > t).collect();
    BinaryMask::from_labels(gray.width(), gray.height(), labels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn histogram_counts() {
        let img = Raster::gray(2, 2, vec![0, 0, 0, 0]).unwrap();
        let h = histogram(&img).unwrap();
        assert_eq!(h.counts[0], 4);
        assert_eq!(h.total(), 4);

        let img = Raster::gray(2, 2, vec![0, 0, 1, 255]).unwrap();
        let h = histogram(&img).unwrap();
        assert_eq!((h.counts[0], h.counts[1], h.counts[255]), (2, 1, 1));
        assert_eq!(h.total(), 4);

        let rgb = Raster::rgb(1, 1, vec![1, 2, 3]).unwrap();
        assert_eq!(histogram(&rgb), Err(Error::NotGrayscale));
    }

    #[test]
    fn two_spikes_pick_smallest_maximizer() {
        let mut counts = [0u64; 256];
        counts[10] = 50;
        counts[200] = 50;
        assert_eq!(otsu_threshold(&Histogram256::from_counts(counts)).unwrap(), 10);
    }

    #[test]
    fn single_mode_returns_zero() {
        let mut counts = [0u64; 256];
        counts[7] = 100;
        assert_eq!(otsu_threshold(&Histogram256::from_counts(counts)).unwrap(), 0);
        assert_eq!(
            otsu_threshold(&Histogram256::from_counts([0; 256])),
            Err(Error::EmptyHistogram)
        );
    }

    #[test]
    fn threshold_extremes() {
        let img = Raster::gray(3, 1, vec![0, 1, 255]).unwrap();
        assert_eq!(threshold_segment(&img, 255).unwrap().count(), 0);
        let img = Raster::gray(3, 1, vec![0, 1, 1]).unwrap();
        assert_eq!(threshold_segment(&img, 0).unwrap().labels(), &[false, true, true]);
    }
}
