//! Unsupervised shapelet learning.
//!
//! Series are cut into sliding windows and compared with a bank of learnable
//! shapelets by shift-maximized normalized cross-correlation. The best-match
//! distance of each series to each shapelet is turned into Student-t
//! membership probabilities, and the shapelets are trained by gradient
//! descent so that series which are close in the input space receive similar
//! memberships, while a diversity penalty keeps shapelets apart and an L1
//! penalty shrinks their inactive edges. The learned distances are the
//! features handed to K-means.
//!
//! ```
//! use nnstne::{synthetic, training::{train, TrainConfig}, clustering::transform};
//!
//! let data = synthetic::two_sinusoids(4, 32, 7);
//! let config = TrainConfig { shapelet_length: 8, shapelet_count: 2, max_iters: 5, ..Default::default() };
//! let model = train(&data, &config).unwrap();
//! let features = transform(&model, &data).unwrap();
//! assert_eq!((features.n_samples(), features.n_features()), (8, 2));
//! ```

// NaN must fail parameter checks, so `!(x > 0.0)` is deliberate.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod clustering;
pub mod dataset;
pub mod embedding;
pub mod error;
pub mod kmeans;
pub mod objective;
mod par;
pub mod similarity;
pub mod synthetic;
pub mod training;

pub use error::{Error, Result};
pub use par::with_threads;
