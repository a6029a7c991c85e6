//! Algorithms checked against brute-force references on seeded random inputs.

mod common;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use segbench_core::flow::max_flow;
use segbench_core::gmm::fit_gmm;
use segbench_core::graphcut::{build_energy, graph_cut_segment, GraphCutParams};
use segbench_core::naive::{gaussian_blur, otsu_threshold, Histogram256};
use segbench_core::Raster;

use common::{
    dense_blur, exhaustive_min_energy, otsu_exhaustive, random_histogram, random_network, random_pixels,
    random_seeded_image,
};

#[test]
fn otsu_matches_exhaustive_search() {
    for seed in 0..200 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let counts = random_histogram(&mut rng);
        let got = otsu_threshold(&Histogram256::from_counts(counts)).unwrap();
        assert_eq!(got, otsu_exhaustive(&counts), "seed {seed}");
    }
}

#[test]
fn otsu_tie_break_prefers_smallest_threshold() {
    // every t in 10..=199 splits {10} from {200} identically
    let mut counts = [0u64; 256];
    counts[10] = 5;
    counts[200] = 5;
    assert_eq!(otsu_exhaustive(&counts), 10);
    assert_eq!(otsu_threshold(&Histogram256::from_counts(counts)).unwrap(), 10);
}

#[test]
fn max_flow_matches_brute_force_min_cut() {
    for seed in 0..300 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (net, list) = random_network(&mut rng);
        let best = list.min_cut();
        let r = max_flow(net);
        assert_eq!(r.flow, best, "seed {seed}");
        assert_eq!(list.cut_value(&r.source_side), best, "seed {seed}");
    }
}

#[test]
fn graph_cut_is_globally_optimal_on_3x3() {
    for seed in 0..100 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (img, seeds) = random_seeded_image(&mut rng, 3, 3);
        let params = GraphCutParams {
            lambda: rng.random_range(0.5..80.0),
            ..Default::default()
        };
        let energy = build_energy(&img, &seeds, &params).unwrap();
        let mask = graph_cut_segment(&img, &seeds, &params).unwrap();
        assert!(energy.respects_hard(mask.labels()));
        assert_eq!(energy.evaluate(mask.labels()), exhaustive_min_energy(&energy), "seed {seed}");
    }
}

#[test]
fn em_log_likelihood_never_decreases() {
    for seed in 0..30 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pixels = random_pixels(&mut rng);
        let k = rng.random_range(1..=5);
        let fit = fit_gmm(&pixels, k, 100, seed).unwrap();
        assert!(fit.log_likelihood.len() >= 2);
        for w in fit.log_likelihood.windows(2) {
            assert!(w[1] >= w[0] - 1e-9, "seed {seed}: {:?}", fit.log_likelihood);
        }
    }
}

#[test]
fn separable_blur_matches_dense_convolution() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for sigma in [0.6, 1.0, 1.4, 2.5] {
        let img = Raster::from_fn_gray(23, 17, |_, _| rng.random_range(0..=255));
        let fast = gaussian_blur(&img, sigma).unwrap();
        let slow = dense_blur(&img, sigma);
        for (a, b) in fast.data().iter().zip(&slow) {
            assert!((*a as f64 - b).abs() <= 1.0, "sigma {sigma}: {a} vs {b}");
        }
    }
}
