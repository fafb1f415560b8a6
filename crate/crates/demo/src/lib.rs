//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Each exported function has a plain Rust counterpart returning
//! `Result<_, String>` so the logic can be tested natively.

use nnstne::clustering::{evaluate_pipeline, FeatureKind};
use nnstne::embedding::membership_row;
use nnstne::similarity::ncc;
use nnstne::synthetic;
use nnstne::training::{train, TrainConfig};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// `1 - NCC` between `shapelet` and every length-M window of `series`.
pub fn distance_profile_impl(series: &[f64], shapelet: &[f64]) -> Result<Vec<f64>, String> {
    let m = shapelet.len();
    if m < 2 || m > series.len() {
        return Err(format!(
            "shapelet length {m} must be between 2 and the series length {}",
            series.len()
        ));
    }
    series
        .windows(m)
        .map(|w| {
            ncc(shapelet, w)
                .map(|r| 1.0 - r.value)
                .map_err(|e| e.to_string())
        })
        .collect()
}

/// Student-t memberships of one series given its distances to each shapelet.
pub fn memberships_impl(distances: &[f64], alpha: f64) -> Result<Vec<f64>, String> {
    if distances.is_empty() {
        return Err("need at least one distance".into());
    }
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(format!("alpha must be positive, got {alpha}"));
    }
    if distances.iter().any(|d| !(d.is_finite() && *d >= 0.0)) {
        return Err("distances must be finite and non-negative".into());
    }
    let mut out = vec![0.0; distances.len()];
    membership_row(distances, alpha, &mut out);
    Ok(out)
}

#[derive(Debug, Serialize)]
pub struct TrainSummary {
    pub series: Vec<Vec<f64>>,
    pub labels: Vec<i64>,
    pub shapelets: Vec<Vec<f64>>,
    pub loss: Vec<f64>,
    pub rand_index_raw: f64,
    pub rand_index_features: f64,
}

/// Trains on a small synthetic set (`"sinusoids"` or `"cbf"`) and scores
/// K-means on raw series against K-means on the learned features.
pub fn train_synthetic_impl(
    dataset: &str,
    seed: u64,
    iterations: usize,
) -> Result<TrainSummary, String> {
    let (data, config) = match dataset {
        "sinusoids" => (
            synthetic::two_sinusoids(10, 64, seed),
            TrainConfig {
                shapelet_length: 16,
                shapelet_count: 3,
                ..TrainConfig::default()
            },
        ),
        "cbf" => (
            synthetic::cbf(45, seed),
            TrainConfig {
                shapelet_length: 32,
                shapelet_count: 6,
                ..TrainConfig::default()
            },
        ),
        other => return Err(format!("unknown dataset {other:?}")),
    };
    let config = TrainConfig {
        max_iters: iterations.max(1),
        seed,
        ..config
    };
    let model = train(&data, &config).map_err(|e| e.to_string())?;
    let raw =
        evaluate_pipeline(&data, None, FeatureKind::Raw, seed, 5).map_err(|e| e.to_string())?;
    let learned = evaluate_pipeline(&data, Some(&model), FeatureKind::Distances, seed, 5)
        .map_err(|e| e.to_string())?;
    Ok(TrainSummary {
        series: data.values().to_vec(),
        labels: data.labels().map(<[i64]>::to_vec).unwrap_or_default(),
        shapelets: model.bank.shapelets().to_vec(),
        loss: model.loss_history.iter().map(|r| r.total).collect(),
        rand_index_raw: raw.rand_index,
        rand_index_features: learned.rand_index,
    })
}

#[wasm_bindgen(js_name = distanceProfile)]
pub fn distance_profile(series: &[f64], shapelet: &[f64]) -> Result<Vec<f64>, JsError> {
    distance_profile_impl(series, shapelet).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn memberships(distances: &[f64], alpha: f64) -> Result<Vec<f64>, JsError> {
    memberships_impl(distances, alpha).map_err(|e| JsError::new(&e))
}

/// Returns the [`TrainSummary`] as a JSON string.
#[wasm_bindgen(js_name = trainSynthetic)]
pub fn train_synthetic(dataset: &str, seed: u32, iterations: u32) -> Result<String, JsError> {
    let summary = train_synthetic_impl(dataset, u64::from(seed), iterations as usize)
        .map_err(|e| JsError::new(&e))?;
    Ok(serde_json::to_string(&summary).expect("summary serializes"))
}
