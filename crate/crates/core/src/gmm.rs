//! Diagonal-covariance Gaussian mixtures over RGB in `[0, 1]`, fitted by EM.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Lower bound applied to every per-channel variance.
pub const VARIANCE_FLOOR: f64 = 1e-4;

const KMEANS_ITERS: usize = 10;
const CONVERGENCE_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Component {
    pub weight: f64,
    pub mean: [f64; 3],
    pub variance: [f64; 3],
}

impl Component {
    fn log_density(&self, x: &[f64; 3]) -> f64 {
        let mut acc = -1.5 * libm::log(2.0 * PI);
        for c in 0..3 {
            let d = x[c] - self.mean[c];
            acc -= 0.5 * libm::log(self.variance[c]) + d * d / (2.0 * self.variance[c]);
        }
        acc
    }

    pub fn density(&self, x: &[f64; 3]) -> f64 {
        libm::exp(self.log_density(x))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Gmm {
    pub components: Vec<Component>,
}

/// A fitted mixture with the mean per-sample log-likelihood before the first
/// EM step and after each one.
#[derive(Clone, Debug, PartialEq)]
pub struct GmmFit {
    pub gmm: Gmm,
    pub log_likelihood: Vec<f64>,
}

fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + libm::log(values.iter().map(|v| libm::exp(v - max)).sum::<f64>())
}

impl Gmm {
    pub fn k(&self) -> usize {
        self.components.len()
    }

    /// Mixture density `sum_k pi_k N(x; mu_k, diag(var_k))`.
    pub fn density(&self, x: &[f64; 3]) -> f64 {
        self.components.iter().map(|c| c.weight * c.density(x)).sum()
    }

    pub fn log_density(&self, x: &[f64; 3]) -> f64 {
        let terms: Vec<f64> = self
            .components
            .iter()
            .map(|c| libm::log(c.weight) + c.log_density(x))
            .collect();
        log_sum_exp(&terms)
    }

    fn mean_log_likelihood(&self, pixels: &[[f64; 3]]) -> f64 {
        pixels.iter().map(|x| self.log_density(x)).sum::<f64>() / pixels.len() as f64
    }
}

/// `-ln(max(density, 1e-12))`.
pub fn gmm_neg_loglik(g: &Gmm, pixel: &[f64; 3]) -> f64 {
    -libm::log(g.density(pixel).max(1e-12))
}

fn sq_dist(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    (0..3).map(|c| (a[c] - b[c]) * (a[c] - b[c])).sum()
}

fn nearest(centers: &[[f64; 3]], x: &[f64; 3]) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (k, c) in centers.iter().enumerate() {
        let d = sq_dist(c, x);
        if d < best_d {
            best_d = d;
            best = k;
        }
    }
    best
}

/// k-means++ seeding followed by a fixed number of Lloyd iterations.
fn kmeans(pixels: &[[f64; 3]], k: usize, rng: &mut ChaCha8Rng) -> Vec<[f64; 3]> {
    let n = pixels.len();
    let mut centers = vec![pixels[rng.random_range(0..n)]];
    let mut d2: Vec<f64> = pixels.iter().map(|x| sq_dist(x, &centers[0])).collect();
    while centers.len() < k {
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let mut r = rng.random_range(0.0..total);
            let mut chosen = n - 1;
            for (i, &d) in d2.iter().enumerate() {
                if r < d {
                    chosen = i;
                    break;
                }
                r -= d;
            }
            chosen
        } else {
            rng.random_range(0..n)
        };
        let c = pixels[pick];
        for (i, x) in pixels.iter().enumerate() {
            d2[i] = d2[i].min(sq_dist(x, &c));
        }
        centers.push(c);
    }
    for _ in 0..KMEANS_ITERS {
        let mut sums = vec![[0.0f64; 3]; k];
        let mut counts = vec![0usize; k];
        for x in pixels {
            let j = nearest(&centers, x);
            counts[j] += 1;
            for c in 0..3 {
                sums[j][c] += x[c];
            }
        }
        for j in 0..k {
            if counts[j] > 0 {
                centers[j] = sums[j].map(|s| s / counts[j] as f64);
            }
        }
    }
    centers
}

fn global_variance(pixels: &[[f64; 3]]) -> [f64; 3] {
    let n = pixels.len() as f64;
    let mut mean = [0.0; 3];
    for x in pixels {
        for c in 0..3 {
            mean[c] += x[c] / n;
        }
    }
    let mut var = [0.0; 3];
    for x in pixels {
        for c in 0..3 {
            var[c] += (x[c] - mean[c]) * (x[c] - mean[c]) / n;
        }
    }
    var.map(|v| v.max(VARIANCE_FLOOR))
}

/// Responsibilities and the mean log-likelihood under `g`.
fn expectation(g: &Gmm, pixels: &[[f64; 3]]) -> (Vec<f64>, f64) {
    let k = g.k();
    let mut resp = vec![0.0; pixels.len() * k];
    let mut terms = vec![0.0; k];
    let mut ll = 0.0;
    for (i, x) in pixels.iter().enumerate() {
        for (j, c) in g.components.iter().enumerate() {
            terms[j] = libm::log(c.weight) + c.log_density(x);
        }
        let norm = log_sum_exp(&terms);
        ll += norm;
        for j in 0..k {
            resp[i * k + j] = libm::exp(terms[j] - norm);
        }
    }
    (resp, ll / pixels.len() as f64)
}

fn maximization(g: &mut Gmm, pixels: &[[f64; 3]], resp: &[f64]) {
    let k = g.k();
    let n = pixels.len() as f64;
    for (j, comp) in g.components.iter_mut().enumerate() {
        let nk: f64 = (0..pixels.len()).map(|i| resp[i * k + j]).sum();
        comp.weight = nk / n;
        if nk < 1e-10 {
            // abandoned component: keeps its shape, weight ~0
            continue;
        }
        let mut mean = [0.0; 3];
        for (i, x) in pixels.iter().enumerate() {
            for c in 0..3 {
                mean[c] += resp[i * k + j] * x[c];
            }
        }
        mean = mean.map(|m| m / nk);
        let mut var = [0.0; 3];
        for (i, x) in pixels.iter().enumerate() {
            for c in 0..3 {
                let d = x[c] - mean[c];
                var[c] += resp[i * k + j] * d * d;
            }
        }
        comp.mean = mean;
        comp.variance = var.map(|v| (v / nk).max(VARIANCE_FLOOR));
    }
}

/// Fits a `k`-component mixture: k-means++ initialization (seeded by
/// `rng_seed`), then EM until the mean log-likelihood improves by less than
/// 1e-6 or `max_iters` steps have run.
pub fn fit_gmm(pixels: &[[f64; 3]], k: usize, max_iters: usize, rng_seed: u64) -> Result<GmmFit> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be >= 1"));
    }
    if pixels.len() < k {
        return Err(Error::TooFewSamples {
            needed: k,
            got: pixels.len(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let centers = kmeans(pixels, k, &mut rng);
    let fallback_var = global_variance(pixels);

    let mut members: Vec<Vec<&[f64; 3]>> = vec![Vec::new(); k];
    for x in pixels {
        members[nearest(&centers, x)].push(x);
    }
    let n = pixels.len() as f64;
    let mut components: Vec<Component> = centers
        .iter()
        .zip(&members)
        .map(|(center, m)| {
            if m.is_empty() {
                return Component {
                    weight: 1.0 / n,
                    mean: *center,
                    variance: fallback_var,
                };
            }
            let cnt = m.len() as f64;
            let mut mean = [0.0; 3];
            for x in m {
                for c in 0..3 {
                    mean[c] += x[c] / cnt;
                }
            }
            let mut var = [0.0; 3];
            for x in m {
                for c in 0..3 {
                    var[c] += (x[c] - mean[c]) * (x[c] - mean[c]) / cnt;
                }
            }
            Component {
                weight: cnt / n,
                mean,
                variance: var.map(|v| v.max(VARIANCE_FLOOR)),
            }
        })
        .collect();
    let total: f64 = components.iter().map(|c| c.weight).sum();
    for c in &mut components {
        c.weight /= total;
    }

    let mut gmm = Gmm { components };
    let (mut resp, mut ll) = expectation(&gmm, pixels);
    let mut trace = vec![ll];
    for _ in 0..max_iters {
        maximization(&mut gmm, pixels, &resp);
        let (r, next) = expectation(&gmm, pixels);
        resp = r;
        trace.push(next);
        if next - ll < CONVERGENCE_TOL {
            break;
        }
        ll = next;
    }
    debug_assert!((gmm.mean_log_likelihood(pixels) - trace[trace.len() - 1]).abs() < 1e-9);
    Ok(GmmFit {
        gmm,
        log_likelihood: trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn blobs(seed: u64) -> (Vec<[f64; 3]>, [[f64; 3]; 2]) {
        let means = [[0.2, 0.3, 0.7], [0.8, 0.6, 0.1]];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut px = Vec::new();
        for i in 0..600 {
            let m = means[i % 2];
            px.push(m.map(|v| v + rng.random_range(-0.05..0.05)));
        }
        (px, means)
    }

    #[test]
    fn single_component_is_closed_form() {
        let (px, _) = blobs(1);
        let fit = fit_gmm(&px, 1, 20, 0).unwrap();
        let c = &fit.gmm.components[0];
        let n = px.len() as f64;
        for ch in 0..3 {
            let mean = px.iter().map(|x| x[ch]).sum::<f64>() / n;
            let var = px.iter().map(|x| (x[ch] - mean).powi(2)).sum::<f64>() / n;
            assert!((c.mean[ch] - mean).abs() < 1e-12);
            assert!((c.variance[ch] - var.max(VARIANCE_FLOOR)).abs() < 1e-12);
        }
        assert_eq!(c.weight, 1.0);
    }

    #[test]
    fn recovers_two_blobs() {
        let (px, means) = blobs(2);
        let fit = fit_gmm(&px, 2, 20, 7).unwrap();
        let comps = &fit.gmm.components;
        let direct = sq_dist(&comps[0].mean, &means[0]) + sq_dist(&comps[1].mean, &means[1]);
        let swapped = sq_dist(&comps[0].mean, &means[1]) + sq_dist(&comps[1].mean, &means[0]);
        let order = if direct <= swapped { [0, 1] } else { [1, 0] };
        for (j, &m) in order.iter().enumerate() {
            for c in 0..3 {
                assert!((comps[j].mean[c] - means[m][c]).abs() < 0.02);
            }
        }
    }

    #[test]
    fn log_likelihood_nondecreasing() {
        let (px, _) = blobs(3);
        let fit = fit_gmm(&px, 4, 30, 1).unwrap();
        for w in fit.log_likelihood.windows(2) {
            assert!(w[1] >= w[0] - 1e-9, "{w:?}");
        }
    }

    #[test]
    fn too_few_samples() {
        assert_eq!(
            fit_gmm(&[[0.0; 3]], 2, 10, 0),
            Err(Error::TooFewSamples { needed: 2, got: 1 })
        );
    }

    #[test]
    fn neg_loglik_closed_form_and_ordering() {
        let g = Gmm {
            components: vec![Component {
                weight: 1.0,
                mean: [0.5; 3],
                variance: [1.0; 3],
            }],
        };
        let expected = -libm::log(libm::pow(2.0 * PI, -1.5));
        assert!((gmm_neg_loglik(&g, &[0.5; 3]) - expected).abs() < 1e-12);

        let tight = Gmm {
            components: vec![Component {
                weight: 1.0,
                mean: [0.3; 3],
                variance: [1e-3; 3],
            }],
        };
        assert!(gmm_neg_loglik(&tight, &[0.3; 3]) < gmm_neg_loglik(&tight, &[0.9, 0.1, 0.3]));
        // density floor keeps far-away pixels finite
        assert!(gmm_neg_loglik(&tight, &[1e3; 3]).is_finite());
    }

    #[test]
    fn mixture_density_is_weighted_sum() {
        let (px, _) = blobs(4);
        let g = fit_gmm(&px, 3, 10, 2).unwrap().gmm;
        let x = [0.4, 0.5, 0.6];
        let direct: f64 = g.components.iter().map(|c| c.weight * c.density(&x)).sum();
        assert!((g.density(&x) - direct).abs() <= 1e-12 * direct.max(1.0));
        assert!((libm::exp(g.log_density(&x)) - direct).abs() <= 1e-9 * direct.max(1.0));
    }
}
