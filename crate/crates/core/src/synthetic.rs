//! Synthetic benchmark generators.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::dataset::{znormalize, TimeSeriesDataset};

/// Length of a Cylinder-Bell-Funnel series.
pub const CBF_LENGTH: usize = 128;

/// Cylinder-Bell-Funnel series with labels 1 (cylinder), 2 (bell) and
/// 3 (funnel) assigned round-robin. Each series is z-normalized.
///
/// A plateau of height `6 + eta` is placed on `[a, b]` with `a` uniform in
/// `16..=32` and `b - a` uniform in `32..=96`; the bell ramps up across the
/// plateau, the funnel ramps down, and unit Gaussian noise is added
/// everywhere.
pub fn cbf(n: usize, seed: u64) -> TimeSeriesDataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let class = (i % 3) as i64 + 1;
        let a = rng.gen_range(16..=32) as f64;
        let b = a + rng.gen_range(32..=96) as f64;
        let eta: f64 = rng.sample(StandardNormal);
        let series: Vec<f64> = (1..=CBF_LENGTH)
            .map(|t| {
                let t = t as f64;
                let noise: f64 = rng.sample(StandardNormal);
                let inside = if (a..=b).contains(&t) { 1.0 } else { 0.0 };
                let shape = match class {
                    1 => 1.0,
                    2 => (t - a) / (b - a),
                    _ => (b - t) / (b - a),
                };
                (6.0 + eta) * inside * shape + noise
            })
            .collect();
        values.push(znormalize(&series));
        labels.push(class);
    }
    TimeSeriesDataset::new(values, Some(labels)).expect("generated rows are uniform")
}

/// Train and test splits drawn from independent streams.
pub fn cbf_split(
    n_train: usize,
    n_test: usize,
    seed: u64,
) -> (TimeSeriesDataset, TimeSeriesDataset) {
    (
        cbf(n_train, seed),
        cbf(n_test, seed ^ 0x9e37_79b9_7f4a_7c15),
    )
}

/// Two classes of noisy sinusoids of length `q`: one period (label 0) versus
/// three periods (label 1), each with a random phase.
pub fn two_sinusoids(n_per_class: usize, q: usize, seed: u64) -> TimeSeriesDataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values = Vec::new();
    let mut labels = Vec::new();
    for class in 0..2 {
        let periods = if class == 0 { 1.0 } else { 3.0 };
        for _ in 0..n_per_class {
            let phase = rng.gen_range(0.0..2.0 * PI);
            let series = (0..q)
                .map(|t| {
                    let noise: f64 = rng.sample(StandardNormal);
                    (2.0 * PI * periods * t as f64 / q as f64 + phase).sin() + 0.1 * noise
                })
                .collect();
            values.push(series);
            labels.push(class as i64);
        }
    }
    TimeSeriesDataset::new(values, Some(labels)).expect("generated rows are uniform")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cbf_shape_and_determinism() {
        let d = cbf(30, 7);
        assert_eq!(d.n_samples(), 30);
        assert_eq!(d.series_length(), 128);
        assert_eq!(d.n_classes(), Some(3));
        assert_eq!(d, cbf(30, 7));
        assert_ne!(d, cbf(30, 8));
    }

    #[test]
    fn sinusoids() {
        let d = two_sinusoids(3, 32, 1);
        assert_eq!(d.n_samples(), 6);
        assert_eq!(d.labels().unwrap(), &[0, 0, 0, 1, 1, 1]);
    }
}
