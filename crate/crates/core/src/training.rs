//! Shapelet initialization, gradient-descent training and length trimming.

use serde::{Deserialize, Serialize};

use crate::dataset::{slide_windows, znormalize, Preprocessing, TimeSeriesDataset, WindowSet};
use crate::error::{Error, Result};
use crate::kmeans::KMeans;
use crate::objective::{
    gaussian_affinity, median_pairwise_sq, LossRecord, Objective, ObjectiveParams, SigmaRule,
};
use crate::similarity::{PreparedWindows, ShapeletBank};

pub const MODEL_VERSION: &str = "nnstne-model-v1";

/// Maximum number of consecutive step halvings before training stops.
pub const MAX_BACKOFFS: usize = 20;

/// Training hyperparameters. Zero in `shapelet_count`, `sigma_sq` or
/// `sigma_shapelet_sq` means "derive from the data" (`sigma_sq` through
/// `sigma_rule`); [`TrainedModel::config`] always holds the resolved values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub shapelet_length: usize,
    pub shapelet_count: usize,
    pub alpha: f64,
    pub lambda: f64,
    pub beta: f64,
    pub sigma_sq: f64,
    pub sigma_rule: SigmaRule,
    pub sigma_shapelet_sq: f64,
    pub learning_rate: f64,
    pub max_iters: usize,
    pub tolerance: f64,
    pub seed: u64,
    pub preprocessing: Preprocessing,
    pub trim_epsilon: f64,
    pub backoff: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            shapelet_length: 16,
            shapelet_count: 0,
            alpha: 1.0,
            lambda: 1.0,
            beta: 0.01,
            sigma_sq: 0.0,
            sigma_rule: SigmaRule::default(),
            sigma_shapelet_sq: 0.0,
            learning_rate: 0.1,
            max_iters: 500,
            tolerance: 1e-6,
            seed: 0,
            preprocessing: Preprocessing::None,
            trim_epsilon: 0.01,
            backoff: true,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if self.shapelet_length < 2 {
            return bad(format!(
                "shapelet length must be at least 2, got {}",
                self.shapelet_length
            ));
        }
        if !(self.learning_rate > 0.0) {
            return bad(format!(
                "learning rate must be positive, got {}",
                self.learning_rate
            ));
        }
        if self.max_iters < 1 {
            return bad("max_iters must be at least 1".into());
        }
        if !(self.trim_epsilon >= 0.0) {
            return bad(format!(
                "trim epsilon must be non-negative, got {}",
                self.trim_epsilon
            ));
        }
        if !(self.alpha > 0.0) {
            return bad(format!("alpha must be positive, got {}", self.alpha));
        }
        if !(self.sigma_sq >= 0.0) || !(self.sigma_shapelet_sq >= 0.0) {
            return bad("kernel variances must be non-negative".into());
        }
        if !(self.tolerance >= 0.0) {
            return bad("tolerance must be non-negative".into());
        }
        Ok(())
    }
}

/// `K = ceil(log2(N (Q - M) C))`, at least 1.
pub fn shapelet_count(n: usize, q: usize, m: usize, c: usize) -> Result<usize> {
    if m >= q {
        return Err(Error::InvalidParameter(format!(
            "shapelet length {m} must be shorter than series length {q}"
        )));
    }
    if n == 0 || c == 0 {
        return Err(Error::InvalidParameter(
            "sample and class counts must be positive".into(),
        ));
    }
    let product = n as u128 * (q - m) as u128 * c as u128;
    let k = product.next_power_of_two().trailing_zeros() as usize;
    Ok(k.max(1))
}

/// K-means centroids of the z-normalized windows.
pub fn init_shapelets_kmeans(windows: &WindowSet, k: usize, seed: u64) -> Result<ShapeletBank> {
    let total = windows.total_windows();
    if k == 0 || k > total {
        return Err(Error::InvalidParameter(format!(
            "cannot initialize {k} shapelets from {total} windows"
        )));
    }
    let m = windows.window_length();
    let data: Vec<f64> = windows.iter().flat_map(znormalize).collect();
    let fit = KMeans::new(k, seed).fit(&data, m)?;
    ShapeletBank::with_nominal_length(fit.centroids, m)
}

/// Strips leading and trailing entries with `|s| < eps * max(1, |s|_inf)`.
/// A shapelet that would drop below two entries keeps its adjacent pair of
/// largest total magnitude.
pub fn trim_shapelets(bank: &ShapeletBank, trim_epsilon: f64) -> ShapeletBank {
    let trimmed = bank
        .shapelets()
        .iter()
        .map(|s| {
            let peak = s.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            let threshold = trim_epsilon * peak.max(1.0);
            let keep = |v: &f64| v.abs() >= threshold;
            let start = s.iter().position(keep);
            let end = s.iter().rposition(keep);
            match (start, end) {
                (Some(a), Some(b)) if b > a => s[a..=b].to_vec(),
                _ => {
                    let best = (0..s.len() - 1)
                        .max_by(|&x, &y| {
                            let mx = s[x].abs() + s[x + 1].abs();
                            let my = s[y].abs() + s[y + 1].abs();
                            mx.total_cmp(&my).then(y.cmp(&x))
                        })
                        .unwrap_or(0);
                    s[best..best + 2].to_vec()
                }
            }
        })
        .collect();
    ShapeletBank::with_nominal_length(trimmed, bank.nominal_length())
        .expect("trimming keeps at least two finite entries per shapelet")
}

/// Learned shapelets together with the resolved configuration and loss trace.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainedModel {
    pub bank: ShapeletBank,
    pub config: TrainConfig,
    pub loss_history: Vec<LossRecord>,
}

#[derive(Serialize, Deserialize)]
struct ShapeletRecord {
    effective_length: usize,
    values: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    version: String,
    config: TrainConfig,
    nominal_length: usize,
    shapelets: Vec<ShapeletRecord>,
    loss_history: Vec<LossRecord>,
}

impl TrainedModel {
    pub fn to_json(&self) -> String {
        let file = ModelFile {
            version: MODEL_VERSION.to_string(),
            config: self.config.clone(),
            nominal_length: self.bank.nominal_length(),
            shapelets: self
                .bank
                .shapelets()
                .iter()
                .map(|s| ShapeletRecord {
                    effective_length: s.len(),
                    values: s.clone(),
                })
                .collect(),
            loss_history: self.loss_history.clone(),
        };
        serde_json::to_string_pretty(&file).expect("model serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ModelFile =
            serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        if file.version != MODEL_VERSION {
            return Err(Error::Format(format!(
                "unsupported model version {:?}, expected {MODEL_VERSION:?}",
                file.version
            )));
        }
        for (k, s) in file.shapelets.iter().enumerate() {
            if s.values.len() != s.effective_length {
                return Err(Error::Format(format!(
                    "shapelet {k} declares length {} but has {} values",
                    s.effective_length,
                    s.values.len()
                )));
            }
        }
        let bank = ShapeletBank::with_nominal_length(
            file.shapelets.into_iter().map(|s| s.values).collect(),
            file.nominal_length,
        )?;
        Ok(Self {
            bank,
            config: file.config,
            loss_history: file.loss_history,
        })
    }
}

/// Callback invoked after every accepted step with the iteration index.
pub type Progress<'a> = &'a mut dyn FnMut(usize, &LossRecord, f64);

/// Trains on `dataset`. `count_samples` is the `N` used when the shapelet
/// count is derived automatically (the training-split size when known).
pub fn train(dataset: &TimeSeriesDataset, config: &TrainConfig) -> Result<TrainedModel> {
    train_with(dataset, config, None, None)
}

pub fn train_with(
    dataset: &TimeSeriesDataset,
    config: &TrainConfig,
    count_samples: Option<usize>,
    mut progress: Option<Progress<'_>>,
) -> Result<TrainedModel> {
    config.validate()?;
    let n = dataset.n_samples();
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "training needs at least 2 series, got {n}"
        )));
    }
    let q = dataset.series_length();
    let m = config.shapelet_length;
    if m > q {
        return Err(Error::InvalidParameter(format!(
            "shapelet length {m} exceeds series length {q}"
        )));
    }
    let mut config = config.clone();
    let data = dataset.preprocessed(config.preprocessing);
    let windows = slide_windows(&data, m)?;

    if config.shapelet_count == 0 {
        let c = dataset.n_classes().unwrap_or(1);
        config.shapelet_count = shapelet_count(count_samples.unwrap_or(n), q, m, c)?;
    }
    let mut bank = init_shapelets_kmeans(&windows, config.shapelet_count, config.seed)?;
    if config.sigma_sq == 0.0 {
        config.sigma_sq = config.sigma_rule.resolve(&data);
    }
    if config.sigma_shapelet_sq == 0.0 {
        config.sigma_shapelet_sq = median_pairwise_sq(bank.shapelets());
    }
    let graph = gaussian_affinity(&data, config.sigma_sq)?;
    let prepared = PreparedWindows::new(&windows);
    let objective = Objective::new(
        &prepared,
        &graph,
        ObjectiveParams {
            alpha: config.alpha,
            lambda: config.lambda,
            beta: config.beta,
            sigma_shapelet_sq: config.sigma_shapelet_sq,
        },
    )?;

    let mut pass = objective.forward(&bank)?;
    if !pass.loss.total.is_finite() {
        return Err(Error::Diverged {
            iteration: 0,
            loss: pass.loss.total,
        });
    }
    let mut step = config.learning_rate;
    let mut history = Vec::new();
    for iteration in 0..config.max_iters {
        let grad = objective.gradient_at(&bank, &pass);
        let mut accepted = None;
        for _ in 0..=MAX_BACKOFFS {
            let mut trial = bank.clone();
            for (s, g) in trial.shapelets_mut().iter_mut().zip(&grad) {
                for (v, d) in s.iter_mut().zip(g) {
                    *v -= step * d;
                }
            }
            let finite = trial.shapelets().iter().flatten().all(|v| v.is_finite());
            let trial_pass = if finite {
                Some(objective.forward(&trial)?)
            } else {
                None
            };
            let total = trial_pass.as_ref().map_or(f64::NAN, |p| p.loss.total);
            if !config.backoff {
                match trial_pass {
                    Some(p) if total.is_finite() => {
                        accepted = Some((trial, p));
                        break;
                    }
                    _ => {
                        return Err(Error::Diverged {
                            iteration,
                            loss: total,
                        })
                    }
                }
            }
            if total.is_finite() && total <= pass.loss.total {
                accepted = trial_pass.map(|p| (trial, p));
                break;
            }
            step *= 0.5;
        }
        let Some((next_bank, next_pass)) = accepted else {
            // No decrease reachable along the gradient.
            break;
        };
        let previous = pass.loss.total;
        bank = next_bank;
        pass = next_pass;
        let record = pass.loss.record();
        history.push(record);
        if let Some(cb) = progress.as_mut() {
            cb(iteration, &record, step);
        }
        let change = (previous - record.total).abs() / previous.abs().max(f64::MIN_POSITIVE);
        if change < config.tolerance {
            break;
        }
    }

    Ok(TrainedModel {
        bank: trim_shapelets(&bank, config.trim_epsilon),
        config,
        loss_history: history,
    })
}
