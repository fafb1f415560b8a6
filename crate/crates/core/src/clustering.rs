//! Feature extraction with a trained model, K-means clustering of the
//! features and Rand Index scoring.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dataset::{Preprocessing, TimeSeriesDataset};
use crate::embedding::t_membership;
use crate::error::{Error, Result};
use crate::kmeans::KMeans;
use crate::similarity::{bank_features, FeatureMatrix};
use crate::training::TrainedModel;

pub const DEFAULT_RESTARTS: usize = 10;

/// Cluster assignment of `N` samples into `n_clusters` groups.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    pub assignments: Vec<usize>,
    pub n_clusters: usize,
}

impl Partition {
    pub fn new(assignments: Vec<usize>) -> Self {
        let n_clusters = assignments.iter().max().map_or(0, |m| m + 1);
        Self {
            assignments,
            n_clusters,
        }
    }

    /// Maps arbitrary integer labels onto `0..C` in ascending label order.
    pub fn from_labels(labels: &[i64]) -> Self {
        let ids: BTreeMap<i64, usize> = labels
            .iter()
            .copied()
            .collect::<std::collections::BTreeSet<_>>()
            .into_iter()
            .enumerate()
            .map(|(i, l)| (l, i))
            .collect();
        Self {
            assignments: labels.iter().map(|l| ids[l]).collect(),
            n_clusters: ids.len(),
        }
    }

    pub fn len(&self) -> usize {
        self.assignments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }
}

/// Which representation of the series is clustered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum FeatureKind {
    #[serde(rename = "raw")]
    Raw,
    #[default]
    #[serde(rename = "distances-F")]
    Distances,
    #[serde(rename = "memberships-q")]
    Memberships,
}

impl FromStr for FeatureKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "raw" => Ok(Self::Raw),
            "F" | "f" | "distances" | "distances-F" => Ok(Self::Distances),
            "q" | "memberships" | "memberships-q" => Ok(Self::Memberships),
            other => Err(Error::InvalidParameter(format!(
                "unknown feature kind {other:?} (expected raw, F or q)"
            ))),
        }
    }
}

impl fmt::Display for FeatureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Raw => "raw",
            Self::Distances => "distances-F",
            Self::Memberships => "memberships-q",
        })
    }
}

/// Outcome of one clustering evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub rand_index: f64,
    pub n_samples: usize,
    pub n_clusters: usize,
    pub feature_kind: FeatureKind,
    pub seed: u64,
    pub restarts: usize,
}

/// Min-pooled distances of every series to every (trimmed) shapelet.
pub fn transform(model: &TrainedModel, dataset: &TimeSeriesDataset) -> Result<FeatureMatrix> {
    let data = dataset.preprocessed(model.config.preprocessing);
    bank_features(&model.bank, data.values())
}

pub fn kmeans_cluster(
    features: &[Vec<f64>],
    n_clusters: usize,
    seed: u64,
    restarts: usize,
) -> Result<Partition> {
    let n = features.len();
    if n_clusters == 0 || n_clusters > n {
        return Err(Error::InvalidParameter(format!(
            "cannot form {n_clusters} clusters from {n} samples"
        )));
    }
    let dim = features[0].len();
    if features.iter().any(|r| r.len() != dim) {
        return Err(Error::Dimension("ragged feature rows".into()));
    }
    let flat = features.concat();
    let fit = KMeans::new(n_clusters, seed).fit_restarts(&flat, dim, restarts)?;
    Ok(Partition {
        assignments: fit.assignments,
        n_clusters,
    })
}

/// Fraction of sample pairs on which the partitions agree, by direct pair
/// enumeration.
pub fn rand_index(pred: &Partition, truth: &Partition) -> Result<f64> {
    let n = pred.len();
    if n != truth.len() {
        return Err(Error::Dimension(format!(
            "partitions of sizes {n} and {}",
            truth.len()
        )));
    }
    if n < 2 {
        return Err(Error::InvalidParameter(
            "Rand Index needs at least 2 samples".into(),
        ));
    }
    let (p, t) = (&pred.assignments, &truth.assignments);
    let mut agree = 0u64;
    for i in 0..n {
        for j in i + 1..n {
            if (p[i] == p[j]) == (t[i] == t[j]) {
                agree += 1;
            }
        }
    }
    let pairs = (n as u64) * (n as u64 - 1) / 2;
    Ok(agree as f64 / pairs as f64)
}

/// Clusters `dataset` into as many groups as it has classes and scores the
/// result against its labels.
pub fn evaluate_pipeline(
    dataset: &TimeSeriesDataset,
    model: Option<&TrainedModel>,
    feature_kind: FeatureKind,
    seed: u64,
    restarts: usize,
) -> Result<EvalReport> {
    let labels = dataset
        .labels()
        .ok_or_else(|| Error::MissingLabels("evaluation needs a labelled dataset".into()))?;
    let truth = Partition::from_labels(labels);
    let features = extract_features(dataset, model, feature_kind)?;
    let pred = kmeans_cluster(&features, truth.n_clusters, seed, restarts)?;
    Ok(EvalReport {
        rand_index: rand_index(&pred, &truth)?,
        n_samples: dataset.n_samples(),
        n_clusters: truth.n_clusters,
        feature_kind,
        seed,
        restarts,
    })
}

/// Feature rows of the requested kind.
pub fn extract_features(
    dataset: &TimeSeriesDataset,
    model: Option<&TrainedModel>,
    feature_kind: FeatureKind,
) -> Result<Vec<Vec<f64>>> {
    let need_model =
        || Error::InvalidParameter(format!("feature kind {feature_kind} needs a trained model"));
    Ok(match feature_kind {
        FeatureKind::Raw => {
            let pre = model.map_or(Preprocessing::None, |m| m.config.preprocessing);
            dataset.preprocessed(pre).values().to_vec()
        }
        FeatureKind::Distances => transform(model.ok_or_else(need_model)?, dataset)?.to_rows(),
        FeatureKind::Memberships => {
            let model = model.ok_or_else(need_model)?;
            t_membership(&transform(model, dataset)?, model.config.alpha)?.to_rows()
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rand_index_examples() {
        let a = Partition::new(vec![0, 0, 1, 1]);
        let b = Partition::new(vec![0, 1, 0, 1]);
        assert_eq!(rand_index(&a, &a).unwrap(), 1.0);
        assert_eq!(rand_index(&a, &b).unwrap(), 1.0 / 3.0);
        assert_eq!(rand_index(&b, &a).unwrap(), rand_index(&a, &b).unwrap());
        assert!(rand_index(&a, &Partition::new(vec![0, 1])).is_err());
        assert!(rand_index(&Partition::new(vec![0]), &Partition::new(vec![0])).is_err());
    }

    #[test]
    fn labels_map_to_dense_ids() {
        let p = Partition::from_labels(&[3, -1, 3, 7]);
        assert_eq!(p.assignments, vec![1, 0, 1, 2]);
        assert_eq!(p.n_clusters, 3);
    }

    #[test]
    fn clustering_clouds() {
        let rows: Vec<Vec<f64>> = (0..20)
            .map(|i| {
                let c = if i < 10 { 0.0 } else { 100.0 };
                vec![c + (i % 3) as f64 * 0.1, c - (i % 4) as f64 * 0.1]
            })
            .collect();
        let p = kmeans_cluster(&rows, 2, 5, 3).unwrap();
        let truth = Partition::new((0..20).map(|i| usize::from(i >= 10)).collect());
        assert_eq!(rand_index(&p, &truth).unwrap(), 1.0);
        assert_eq!(p, kmeans_cluster(&rows, 2, 5, 3).unwrap());
        assert!(kmeans_cluster(&rows, 1, 0, 1)
            .unwrap()
            .assignments
            .iter()
            .all(|&a| a == 0));
        assert!(kmeans_cluster(&rows, 21, 0, 1).is_err());
    }

    #[test]
    fn constant_labels_score_one() {
        let d = TimeSeriesDataset::new(
            vec![vec![0.0, 1.0], vec![2.0, 0.5], vec![1.0, 1.0]],
            Some(vec![4; 3]),
        )
        .unwrap();
        let r = evaluate_pipeline(&d, None, FeatureKind::Raw, 17, 2).unwrap();
        assert_eq!(r.rand_index, 1.0);
        assert_eq!((r.seed, r.feature_kind), (17, FeatureKind::Raw));
        let unlabelled = TimeSeriesDataset::new(vec![vec![0.0, 1.0]; 2], None).unwrap();
        assert!(matches!(
            evaluate_pipeline(&unlabelled, None, FeatureKind::Raw, 0, 1),
            Err(Error::MissingLabels(_))
        ));
        assert!(evaluate_pipeline(&d, None, FeatureKind::Distances, 0, 1).is_err());
    }

    #[test]
    fn feature_kind_names() {
        assert_eq!("F".parse::<FeatureKind>().unwrap(), FeatureKind::Distances);
        assert_eq!(
            "q".parse::<FeatureKind>().unwrap(),
            FeatureKind::Memberships
        );
        assert_eq!(
            serde_json::to_string(&FeatureKind::Distances).unwrap(),
            "\"distances-F\""
        );
    }
}
