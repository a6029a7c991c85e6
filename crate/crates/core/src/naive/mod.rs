//! Naive segmenters: global thresholding, edge detection and seeded region growing.

mod canny;
mod filter;
mod region;
mod threshold;

pub use canny::{canny, edges_to_mask, edges_to_mask_with, non_maximum_suppression, EdgeMap};
pub use filter::{gaussian_blur, gaussian_kernel, sobel_gradients, Gradients};
pub use region::region_grow;
pub use threshold::{between_class_variance, histogram, otsu_threshold, threshold_segment, Histogram256};
