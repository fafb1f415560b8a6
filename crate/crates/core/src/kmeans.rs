//! Lloyd's K-means with k-means++ seeding, shared by shapelet
//! initialization and feature clustering.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KMeans {
    pub k: usize,
    pub max_iter: usize,
    /// Stop once the total squared centroid movement falls below this.
    pub tol: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansFit {
    pub centroids: Vec<Vec<f64>>,
    pub assignments: Vec<usize>,
    pub inertia: f64,
    /// Inertia after each assignment step.
    pub inertia_trace: Vec<f64>,
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

impl KMeans {
    pub fn new(k: usize, seed: u64) -> Self {
        Self {
            k,
            max_iter: 300,
            tol: 1e-6,
            seed,
        }
    }

    /// Clusters the rows of a row-major `n × dim` buffer.
    pub fn fit(&self, data: &[f64], dim: usize) -> Result<KMeansFit> {
        if dim == 0 || !data.len().is_multiple_of(dim) {
            return Err(Error::Dimension(format!(
                "{} values do not form rows of {dim}",
                data.len()
            )));
        }
        let n = data.len() / dim;
        if self.k == 0 || self.k > n {
            return Err(Error::InvalidParameter(format!(
                "cannot form {} clusters from {n} points",
                self.k
            )));
        }
        let point = |i: usize| &data[i * dim..(i + 1) * dim];
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut centroids = plus_plus(data, dim, self.k, &mut rng);
        let mut assignments = vec![0usize; n];
        let mut dists = vec![0.0; n];
        let mut trace = Vec::new();

        for _ in 0..self.max_iter.max(1) {
            for i in 0..n {
                let (best, d) = nearest(point(i), &centroids);
                assignments[i] = best;
                dists[i] = d;
            }
            trace.push(dists.iter().sum());

            let mut sums = vec![vec![0.0; dim]; self.k];
            let mut counts = vec![0usize; self.k];
            for (i, &c) in assignments.iter().enumerate() {
                counts[c] += 1;
                for (s, v) in sums[c].iter_mut().zip(point(i)) {
                    *s += v;
                }
            }
            let mut taken = vec![false; n];
            let mut movement = 0.0;
            for c in 0..self.k {
                let next = if counts[c] > 0 {
                    let inv = 1.0 / counts[c] as f64;
                    sums[c].iter().map(|s| s * inv).collect()
                } else {
                    // Empty cluster: move it onto the worst-fit point.
                    let far = (0..n)
                        .filter(|&i| !taken[i])
                        .max_by(|&a, &b| dists[a].total_cmp(&dists[b]).then(b.cmp(&a)))
                        .unwrap_or(0);
                    taken[far] = true;
                    dists[far] = 0.0;
                    point(far).to_vec()
                };
                movement += sq_dist(&centroids[c], &next);
                centroids[c] = next;
            }
            if movement <= self.tol {
                break;
            }
        }

        for i in 0..n {
            let (best, d) = nearest(point(i), &centroids);
            assignments[i] = best;
            dists[i] = d;
        }
        let inertia = dists.iter().sum();
        if trace.last() != Some(&inertia) {
            trace.push(inertia);
        }
        Ok(KMeansFit {
            centroids,
            assignments,
            inertia,
            inertia_trace: trace,
        })
    }

    /// Best-inertia fit over `restarts` runs with sub-seeds drawn from `seed`.
    /// Ties keep the earlier restart.
    pub fn fit_restarts(&self, data: &[f64], dim: usize, restarts: usize) -> Result<KMeansFit> {
        if restarts == 0 {
            return Err(Error::InvalidParameter(
                "restarts must be at least 1".into(),
            ));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let seeds: Vec<u64> = (0..restarts).map(|_| rng.gen()).collect();
        let fits = crate::par::map(&seeds, |&seed| KMeans { seed, ..*self }.fit(data, dim));
        let mut best: Option<KMeansFit> = None;
        for fit in fits {
            let fit = fit?;
            if best.as_ref().is_none_or(|b| fit.inertia < b.inertia) {
                best = Some(fit);
            }
        }
        Ok(best.expect("at least one restart"))
    }
}

fn nearest(p: &[f64], centroids: &[Vec<f64>]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (c, centroid) in centroids.iter().enumerate() {
        let d = sq_dist(p, centroid);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

fn plus_plus(data: &[f64], dim: usize, k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let n = data.len() / dim;
    let point = |i: usize| &data[i * dim..(i + 1) * dim];
    let mut centroids = vec![point(rng.gen_range(0..n)).to_vec()];
    let mut closest: Vec<f64> = (0..n).map(|i| sq_dist(point(i), &centroids[0])).collect();
    while centroids.len() < k {
        let total: f64 = closest.iter().sum();
        let pick = if total > 0.0 {
            let mut target = rng.gen::<f64>() * total;
            let mut pick = n - 1;
            for (i, &d) in closest.iter().enumerate() {
                if target < d {
                    pick = i;
                    break;
                }
                target -= d;
            }
            pick
        } else {
            // All remaining mass is zero: duplicates only.
            rng.gen_range(0..n)
        };
        let c = point(pick).to_vec();
        for (i, d) in closest.iter_mut().enumerate() {
            *d = d.min(sq_dist(point(i), &c));
        }
        centroids.push(c);
    }
    centroids
}
