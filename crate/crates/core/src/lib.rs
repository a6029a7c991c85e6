//! Interactive image segmentation building blocks.
//!
//! Everything in this crate is a pure function of its inputs and only needs
//! `alloc`: raster types and scribble rasterization, the naive segmenters
//! (Otsu, Canny, region growing), a random-forest pixel classifier, max-flow
//! based graph cut and GrabCut, the simulated user with the three
//! interaction protocols, and the evaluation metrics.
//!
//! File formats, the benchmark harness and the HTTP service live in the
//! `segbench` crate.
#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod error;
pub mod flow;
pub mod forest;
pub mod gmm;
pub mod grabcut;
pub mod graphcut;
pub mod interaction;
pub mod metrics;
pub mod morphology;
pub mod naive;
pub mod raster;

pub use error::{Error, Result};
pub use raster::{Annotation, BinaryMask, LabelRaster, Raster, Seed, Stroke, StrokeLabel};
