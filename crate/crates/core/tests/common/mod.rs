//! Independent oracles shared by the integration tests.

#![allow(dead_code)]

use nnstne::dataset::{slide_windows, TimeSeriesDataset};
use nnstne::objective::{
    gaussian_affinity, median_sigma, AffinityGraph, Objective, ObjectiveParams,
};
use nnstne::similarity::{PreparedWindows, ShapeletBank};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `out[w + M - 1] = sum_m x[m] * y[m - w]`, by direct summation.
pub fn naive_cross_correlation(x: &[f64], y: &[f64]) -> Vec<f64> {
    let m = x.len() as isize;
    (-(m - 1)..m)
        .map(|w| {
            (0..m)
                .filter(|&i| i - w >= 0 && i - w < m)
                .map(|i| x[i as usize] * y[(i - w) as usize])
                .sum()
        })
        .collect()
}

/// Rand Index from the contingency table:
/// agreements = C(N,2) + 2 sum_ij C(n_ij,2) - sum_i C(a_i,2) - sum_j C(b_j,2).
pub fn contingency_rand_index(pred: &[usize], truth: &[usize]) -> f64 {
    let n = pred.len() as u64;
    let p = pred.iter().max().unwrap() + 1;
    let t = truth.iter().max().unwrap() + 1;
    let mut table = vec![vec![0u64; t]; p];
    for (&a, &b) in pred.iter().zip(truth) {
        table[a][b] += 1;
    }
    let c2 = |x: u64| x * x.saturating_sub(1) / 2;
    let cells: u64 = table.iter().flatten().map(|&v| c2(v)).sum();
    let rows: u64 = table.iter().map(|r| c2(r.iter().sum())).sum();
    let cols: u64 = (0..t).map(|j| c2(table.iter().map(|r| r[j]).sum())).sum();
    let pairs = c2(n);
    let agree = pairs + 2 * cells - rows - cols;
    agree as f64 / pairs as f64
}

/// A small random training problem.
pub struct Instance {
    pub dataset: TimeSeriesDataset,
    pub prepared: PreparedWindows,
    pub graph: AffinityGraph,
    pub bank: ShapeletBank,
}

pub fn random_instance(
    seed: u64,
    n: usize,
    q: usize,
    m: usize,
    k: usize,
    identical: bool,
) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base: Vec<f64> = (0..q).map(|_| rng.gen_range(-2.0..2.0)).collect();
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| {
            if identical {
                base.clone()
            } else {
                (0..q).map(|_| rng.gen_range(-2.0..2.0)).collect()
            }
        })
        .collect();
    let dataset = TimeSeriesDataset::new(rows, None).unwrap();
    let windows = slide_windows(&dataset, m).unwrap();
    let graph = gaussian_affinity(&dataset, median_sigma(&dataset)).unwrap();
    let bank = ShapeletBank::new(
        (0..k)
            .map(|_| (0..m).map(|_| rng.gen_range(-1.5..1.5)).collect())
            .collect(),
    )
    .unwrap();
    Instance {
        prepared: PreparedWindows::new(&windows),
        dataset,
        graph,
        bank,
    }
}

pub struct GradientCheck {
    pub checked: usize,
    pub skipped: usize,
    pub max_rel_error: f64,
}

fn perturbed(bank: &ShapeletBank, k: usize, m: usize, delta: f64) -> ShapeletBank {
    let mut rows = bank.shapelets().to_vec();
    rows[k][m] += delta;
    ShapeletBank::new(rows).unwrap()
}

/// Central differences with step `h` against the analytic gradient. Entries
/// whose perturbation changes any pooled window or maximizing shift are
/// skipped, as are L1-kinked entries within `h` of zero.
pub fn check_gradient(inst: &Instance, params: ObjectiveParams, h: f64) -> GradientCheck {
    let obj = Objective::new(&inst.prepared, &inst.graph, params).unwrap();
    let centre = obj.forward(&inst.bank).unwrap();
    let analytic = obj.gradient_at(&inst.bank, &centre);
    let signature = |pass: &nnstne::objective::ForwardPass| {
        let f = &pass.features;
        (0..f.n_samples())
            .flat_map(|i| {
                (0..f.n_features()).map(move |k| (f.argmin_window(i, k), f.best_shift(i, k)))
            })
            .collect::<Vec<_>>()
    };
    let reference = signature(&centre);
    let mut out = GradientCheck {
        checked: 0,
        skipped: 0,
        max_rel_error: 0.0,
    };
    for k in 0..inst.bank.count() {
        for m in 0..inst.bank.nominal_length() {
            if params.beta != 0.0 && inst.bank.shapelet(k)[m].abs() < 2.0 * h {
                out.skipped += 1;
                continue;
            }
            let plus = obj.forward(&perturbed(&inst.bank, k, m, h)).unwrap();
            let minus = obj.forward(&perturbed(&inst.bank, k, m, -h)).unwrap();
            if signature(&plus) != reference || signature(&minus) != reference {
                out.skipped += 1;
                continue;
            }
            let fd = (plus.loss.total - minus.loss.total) / (2.0 * h);
            let a = analytic[k][m];
            let rel = (a - fd).abs() / a.abs().max(fd.abs()).max(1e-6);
            out.max_rel_error = out.max_rel_error.max(rel);
            out.checked += 1;
        }
    }
    out
}
