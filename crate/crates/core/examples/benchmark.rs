//! Runs the clustering protocol on whichever UCR benchmarks are present
//! under `$NNSTNE_UCR_DIR` and prints raw and learned-feature Rand Index.
//!
//! ```text
//! NNSTNE_UCR_DIR=~/UCRArchive_2018 cargo run --release -p nnstne --example benchmark -- [iters] [seeds]
//! ```
//!
//! Without the directory only a synthetic CBF stand-in is run.

use std::path::{Path, PathBuf};
use std::time::Instant;

use nnstne::clustering::{evaluate_pipeline, FeatureKind, DEFAULT_RESTARTS};
use nnstne::dataset::{load_ucr, merge, Delimiter, TimeSeriesDataset};
use nnstne::synthetic::cbf_split;
use nnstne::training::{train_with, TrainConfig};

/// Name, shapelet length.
const BENCHMARKS: [(&str, usize); 4] = [
    ("ECG200", 36),
    ("CBF", 48),
    ("FaceFour", 128),
    ("OSULeaf", 160),
];

fn load_split(root: &Path, name: &str, split: &str) -> Option<TimeSeriesDataset> {
    ["tsv", "txt", "csv"].iter().find_map(|ext| {
        let file = format!("{name}_{split}.{ext}");
        let path = [root.join(name).join(&file), root.join(&file)]
            .into_iter()
            .find(|p| p.is_file())?;
        let text = std::fs::read_to_string(&path).ok()?;
        load_ucr(&path, Delimiter::detect(&text)).ok()
    })
}

fn run(
    name: &str,
    train: &TimeSeriesDataset,
    test: &TimeSeriesDataset,
    length: usize,
    iters: usize,
    seeds: u64,
) {
    let data = merge(train, test).expect("splits share a length");
    let started = Instant::now();
    let (mut raw_best, mut learned_best) = (0.0f64, 0.0f64);
    for seed in 0..seeds {
        let raw = evaluate_pipeline(&data, None, FeatureKind::Raw, seed, DEFAULT_RESTARTS).unwrap();
        let config = TrainConfig {
            shapelet_length: length,
            max_iters: iters,
            seed,
            ..TrainConfig::default()
        };
        let model = train_with(&data, &config, Some(train.n_samples()), None).unwrap();
        let f = evaluate_pipeline(
            &data,
            Some(&model),
            FeatureKind::Distances,
            seed,
            DEFAULT_RESTARTS,
        )
        .unwrap();
        println!(
            "{name:>10} seed {seed}: K={:<3} raw {:.4}  learned {:.4}",
            model.config.shapelet_count, raw.rand_index, f.rand_index
        );
        raw_best = raw_best.max(raw.rand_index);
        learned_best = learned_best.max(f.rand_index);
    }
    println!(
        "{name:>10} best:   raw {raw_best:.4}  learned {learned_best:.4}  ({:.0} s)\n",
        started.elapsed().as_secs_f64()
    );
}

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let iters = args.get(1).map_or(100, |s| s.parse().expect("iterations"));
    let seeds = args.get(2).map_or(5, |s| s.parse().expect("seed count"));
    let root = std::env::var_os("NNSTNE_UCR_DIR").map(PathBuf::from);
    let mut ran = false;
    if let Some(root) = &root {
        for (name, length) in BENCHMARKS {
            if let (Some(train), Some(test)) = (
                load_split(root, name, "TRAIN"),
                load_split(root, name, "TEST"),
            ) {
                run(name, &train, &test, length, iters, seeds);
                ran = true;
            }
        }
    }
    if !ran {
        println!("no UCR files found; running the synthetic CBF stand-in");
        let (train, test) = cbf_split(30, 900, 1);
        run("CBF*", &train, &test, 48, iters, seeds);
    }
}
