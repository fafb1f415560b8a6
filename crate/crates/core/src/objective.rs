//! The training objective: a graph-Laplacian smoothness term over Student-t
//! memberships, a Gaussian-kernel diversity penalty between shapelets and an
//! L1 penalty on shapelet entries, together with its analytic gradient.
//!
//! Min-pooling and the max over shifts are differentiated as subgradients:
//! the pooled window and the maximizing shift found in the forward pass are
//! held fixed while differentiating.

use serde::{Deserialize, Serialize};

use crate::dataset::{TimeSeriesDataset, WindowSet};
use crate::embedding::{log_kernel_slope, t_membership, MembershipMatrix};
use crate::error::{Error, Result};
use crate::similarity::{
    pooled_features, unit_znormalize, FeatureMatrix, PreparedWindows, ShapeletBank,
};

/// Gaussian affinities between series and the associated graph Laplacian.
#[derive(Debug, Clone, PartialEq)]
pub struct AffinityGraph {
    n: usize,
    sigma_sq: f64,
    g: Vec<f64>,
    laplacian: Vec<f64>,
}

impl AffinityGraph {
    /// Builds the graph from an explicit symmetric affinity matrix.
    pub fn from_affinities(g: Vec<Vec<f64>>, sigma_sq: f64) -> Result<Self> {
        let n = g.len();
        if g.iter().any(|r| r.len() != n) {
            return Err(Error::Dimension("affinity matrix must be square".into()));
        }
        let g = g.concat();
        let mut laplacian = vec![0.0; n * n];
        for i in 0..n {
            let row = &g[i * n..(i + 1) * n];
            let degree: f64 = row.iter().sum();
            for j in 0..n {
                laplacian[i * n + j] = -row[j];
            }
            laplacian[i * n + i] += degree;
        }
        Ok(Self {
            n,
            sigma_sq,
            g,
            laplacian,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn sigma_sq(&self) -> f64 {
        self.sigma_sq
    }

    pub fn affinity(&self, i: usize, j: usize) -> f64 {
        self.g[i * self.n + j]
    }

    pub fn laplacian(&self, i: usize, j: usize) -> f64 {
        self.laplacian[i * self.n + j]
    }

    fn laplacian_row(&self, i: usize) -> &[f64] {
        &self.laplacian[i * self.n..(i + 1) * self.n]
    }
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().max(b.len());
    (0..n)
        .map(|m| {
            let d = a.get(m).copied().unwrap_or(0.0) - b.get(m).copied().unwrap_or(0.0);
            d * d
        })
        .sum()
}

/// `G(i, j) = exp(-|t_i - t_j|^2 / sigma_sq)`.
pub fn gaussian_affinity(dataset: &TimeSeriesDataset, sigma_sq: f64) -> Result<AffinityGraph> {
    let n = dataset.n_samples();
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "affinity graph needs at least 2 series, got {n}"
        )));
    }
    if !(sigma_sq > 0.0) || !sigma_sq.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "sigma^2 must be positive, got {sigma_sq}"
        )));
    }
    let rows = dataset.values();
    let mut g = vec![vec![1.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let d = squared_distance(&rows[i], &rows[j]);
            if !d.is_finite() {
                return Err(Error::NonFinite { line: i + 1 });
            }
            let v = (-d / sigma_sq).exp();
            g[i][j] = v;
            g[j][i] = v;
        }
    }
    AffinityGraph::from_affinities(g, sigma_sq)
}

/// Median of all pairwise squared distances; `1.0` when that median is zero.
pub fn median_pairwise_sq(rows: &[Vec<f64>]) -> f64 {
    let mut d: Vec<f64> = Vec::with_capacity(rows.len() * rows.len().saturating_sub(1) / 2);
    for i in 0..rows.len() {
        for j in i + 1..rows.len() {
            d.push(squared_distance(&rows[i], &rows[j]));
        }
    }
    if d.is_empty() {
        return 1.0;
    }
    d.sort_by(f64::total_cmp);
    let mid = d.len() / 2;
    let median = if d.len() % 2 == 1 {
        d[mid]
    } else {
        0.5 * (d[mid - 1] + d[mid])
    };
    if median > 0.0 {
        median
    } else {
        1.0
    }
}

/// Default kernel variance for the affinity graph.
pub fn median_sigma(dataset: &TimeSeriesDataset) -> f64 {
    median_pairwise_sq(dataset.values())
}

/// Median over series of the squared distance to the `k`-th nearest other
/// series; `1.0` when that median is zero. Sets the kernel width from local
/// neighbourhoods rather than from the global spread.
pub fn neighbor_sigma(dataset: &TimeSeriesDataset, k: usize) -> f64 {
    let rows = dataset.values();
    let n = rows.len();
    if n < 2 || k == 0 {
        return 1.0;
    }
    let k = k.min(n - 1);
    let mut kth: Vec<f64> = (0..n)
        .map(|i| {
            let mut d: Vec<f64> = (0..n)
                .filter(|&j| j != i)
                .map(|j| squared_distance(&rows[i], &rows[j]))
                .collect();
            d.select_nth_unstable_by(k - 1, f64::total_cmp);
            d[k - 1]
        })
        .collect();
    kth.sort_by(f64::total_cmp);
    let median = if n % 2 == 1 {
        kth[n / 2]
    } else {
        0.5 * (kth[n / 2 - 1] + kth[n / 2])
    };
    if median > 0.0 {
        median
    } else {
        1.0
    }
}

/// How the affinity kernel variance is chosen when not given explicitly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SigmaRule {
    /// [`median_sigma`].
    Median,
    /// [`neighbor_sigma`] with this many neighbours.
    Neighbors(usize),
}

impl Default for SigmaRule {
    fn default() -> Self {
        SigmaRule::Neighbors(DEFAULT_SIGMA_NEIGHBORS)
    }
}

pub const DEFAULT_SIGMA_NEIGHBORS: usize = 7;

impl SigmaRule {
    pub fn resolve(&self, dataset: &TimeSeriesDataset) -> f64 {
        match *self {
            SigmaRule::Median => median_sigma(dataset),
            SigmaRule::Neighbors(k) => neighbor_sigma(dataset, k),
        }
    }
}

fn check_rows(q: &MembershipMatrix, graph: &AffinityGraph) -> Result<()> {
    if q.n_samples() != graph.n() {
        return Err(Error::Dimension(format!(
            "{} membership rows against a graph of {} nodes",
            q.n_samples(),
            graph.n()
        )));
    }
    Ok(())
}

/// `1/2 sum_ij G(i,j) |q_i - q_j|^2`.
pub fn spectral_term(q: &MembershipMatrix, graph: &AffinityGraph) -> Result<f64> {
    check_rows(q, graph)?;
    let n = graph.n();
    let mut total = 0.0;
    for i in 0..n {
        for j in 0..n {
            let d: f64 = q
                .row(i)
                .iter()
                .zip(q.row(j))
                .map(|(a, b)| (a - b).powi(2))
                .sum();
            total += graph.affinity(i, j) * d;
        }
    }
    Ok(0.5 * total)
}

/// `tr(q^T L q)`, algebraically equal to [`spectral_term`].
pub fn spectral_term_trace(q: &MembershipMatrix, graph: &AffinityGraph) -> Result<f64> {
    check_rows(q, graph)?;
    let lq = laplacian_product(q, graph);
    Ok(lq.iter().zip(q.values()).map(|(a, b)| a * b).sum())
}

/// `L q` as a row-major `N × K` buffer.
fn laplacian_product(q: &MembershipMatrix, graph: &AffinityGraph) -> Vec<f64> {
    let (n, k) = (q.n_samples(), q.n_components());
    let rows: Vec<usize> = (0..n).collect();
    crate::par::map(&rows, |&i| {
        let mut out = vec![0.0; k];
        for (j, &l) in graph.laplacian_row(i).iter().enumerate() {
            if l != 0.0 {
                for (o, v) in out.iter_mut().zip(q.row(j)) {
                    *o += l * v;
                }
            }
        }
        out
    })
    .concat()
}

/// Squared Frobenius norm of `H(i,j) = exp(-|s_i - s_j|^2 / sigma_sq)`,
/// diagonal included.
pub fn diversity_term(bank: &ShapeletBank, sigma_shapelet_sq: f64) -> f64 {
    let s = bank.shapelets();
    let mut total = s.len() as f64;
    for i in 0..s.len() {
        for j in i + 1..s.len() {
            let h = (-squared_distance(&s[i], &s[j]) / sigma_shapelet_sq).exp();
            total += 2.0 * h * h;
        }
    }
    total
}

pub fn l1_term(bank: &ShapeletBank) -> f64 {
    bank.shapelets().iter().flatten().map(|v| v.abs()).sum()
}

/// Weights and kernel parameters of the objective.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveParams {
    pub alpha: f64,
    pub lambda: f64,
    pub beta: f64,
    pub sigma_shapelet_sq: f64,
}

impl Default for ObjectiveParams {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            lambda: 1.0,
            beta: 0.01,
            sigma_shapelet_sq: 1.0,
        }
    }
}

/// Loss components of one evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossBreakdown {
    pub spectral: f64,
    pub diversity: f64,
    pub l1: f64,
    pub total: f64,
    pub lambda: f64,
    pub beta: f64,
    pub sigma_shapelet_sq: f64,
}

impl LossBreakdown {
    fn compose(spectral: f64, diversity: f64, l1: f64, params: &ObjectiveParams) -> Self {
        Self {
            spectral,
            diversity,
            l1,
            total: spectral + params.lambda * diversity + params.beta * l1,
            lambda: params.lambda,
            beta: params.beta,
            sigma_shapelet_sq: params.sigma_shapelet_sq,
        }
    }

    pub fn record(&self) -> LossRecord {
        LossRecord {
            spectral: self.spectral,
            diversity: self.diversity,
            l1: self.l1,
            total: self.total,
        }
    }
}

/// Serialized form of a loss evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossRecord {
    pub spectral: f64,
    pub diversity: f64,
    pub l1: f64,
    pub total: f64,
}

/// Everything from one forward pass that the gradient needs.
pub struct ForwardPass {
    pub features: FeatureMatrix,
    pub memberships: MembershipMatrix,
    pub loss: LossBreakdown,
}

/// Objective bound to a fixed window set and affinity graph.
pub struct Objective<'a> {
    windows: &'a PreparedWindows,
    graph: &'a AffinityGraph,
    params: ObjectiveParams,
}

impl<'a> Objective<'a> {
    pub fn new(
        windows: &'a PreparedWindows,
        graph: &'a AffinityGraph,
        params: ObjectiveParams,
    ) -> Result<Self> {
        if windows.n_series() != graph.n() {
            return Err(Error::Dimension(format!(
                "{} series of windows against a graph of {} nodes",
                windows.n_series(),
                graph.n()
            )));
        }
        if !(params.sigma_shapelet_sq > 0.0) {
            return Err(Error::InvalidParameter(
                "shapelet kernel variance must be positive".into(),
            ));
        }
        Ok(Self {
            windows,
            graph,
            params,
        })
    }

    pub fn params(&self) -> &ObjectiveParams {
        &self.params
    }

    pub fn forward(&self, bank: &ShapeletBank) -> Result<ForwardPass> {
        let features = pooled_features(bank, self.windows)?;
        let memberships = t_membership(&features, self.params.alpha)?;
        let spectral = spectral_term_trace(&memberships, self.graph)?;
        let loss = LossBreakdown::compose(
            spectral,
            diversity_term(bank, self.params.sigma_shapelet_sq),
            l1_term(bank),
            &self.params,
        );
        Ok(ForwardPass {
            features,
            memberships,
            loss,
        })
    }

    pub fn loss(&self, bank: &ShapeletBank) -> Result<LossBreakdown> {
        self.forward(bank).map(|f| f.loss)
    }

    /// Gradient with respect to every shapelet entry, using the argmin window
    /// and argmax shift recorded in `pass`.
    pub fn gradient_at(&self, bank: &ShapeletBank, pass: &ForwardPass) -> Vec<Vec<f64>> {
        let q = &pass.memberships;
        let f = &pass.features;
        let (n, k) = (q.n_samples(), q.n_components());
        let m = self.windows.window_length();
        let alpha = self.params.alpha;

        // dS/dq = 2 L q, then through the row normalization and the kernel.
        let lq = laplacian_product(q, self.graph);
        let mut d_f = vec![0.0; n * k];
        for i in 0..n {
            let g: Vec<f64> = lq[i * k..(i + 1) * k].iter().map(|v| 2.0 * v).collect();
            let row = q.row(i);
            let mean_g: f64 = g.iter().zip(row).map(|(a, b)| a * b).sum();
            for l in 0..k {
                d_f[i * k + l] = log_kernel_slope(f.get(i, l), alpha) * row[l] * (g[l] - mean_g);
            }
        }

        let shapelets: Vec<usize> = (0..k).collect();
        let mut grads = crate::par::map(&shapelets, |&l| {
            let s = bank.shapelet(l);
            let Some(u) = unit_znormalize(s) else {
                return vec![0.0; m];
            };
            // Accumulate sum_i dS/dF_il * dNCC_il/du, then project once.
            let mut acc = vec![0.0; m];
            for i in 0..n {
                let w = d_f[i * k + l];
                if w == 0.0 {
                    continue;
                }
                let Some(v) = self.windows.unit(i, f.argmin_window(i, l)) else {
                    continue;
                };
                let shift = f.best_shift(i, l);
                // F = 1 - sum_m u[m] v[m - shift]
                for (mi, a) in acc.iter_mut().enumerate() {
                    let src = mi as isize - shift;
                    if src >= 0 && (src as usize) < m {
                        *a -= w * v[src as usize];
                    }
                }
            }
            unit_znormalize_backward(s, &u, &acc)
        });

        let s = bank.shapelets();
        if self.params.lambda != 0.0 {
            let coef = -8.0 * self.params.lambda / self.params.sigma_shapelet_sq;
            for a in 0..k {
                for b in 0..k {
                    if a == b {
                        continue;
                    }
                    let h = (-squared_distance(&s[a], &s[b]) / self.params.sigma_shapelet_sq).exp();
                    let h2 = h * h;
                    for (gm, (x, y)) in grads[a].iter_mut().zip(s[a].iter().zip(&s[b])) {
                        *gm += coef * h2 * (x - y);
                    }
                }
            }
        }
        if self.params.beta != 0.0 {
            for (g, row) in grads.iter_mut().zip(s) {
                for (gm, &x) in g.iter_mut().zip(row) {
                    *gm += self.params.beta * signum0(x);
                }
            }
        }
        grads
    }

    pub fn gradient(&self, bank: &ShapeletBank) -> Result<Vec<Vec<f64>>> {
        let pass = self.forward(bank)?;
        Ok(self.gradient_at(bank, &pass))
    }
}

fn signum0(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Pulls a gradient with respect to `u = unit_znormalize(s)` back to `s`.
fn unit_znormalize_backward(s: &[f64], u: &[f64], grad_u: &[f64]) -> Vec<f64> {
    let m = s.len() as f64;
    let mean = s.iter().sum::<f64>() / m;
    let norm = s.iter().map(|v| (v - mean).powi(2)).sum::<f64>().sqrt();
    let along: f64 = u.iter().zip(grad_u).map(|(a, b)| a * b).sum();
    let mut g: Vec<f64> = grad_u
        .iter()
        .zip(u)
        .map(|(gu, uu)| (gu - along * uu) / norm)
        .collect();
    let g_mean = g.iter().sum::<f64>() / m;
    g.iter_mut().for_each(|v| *v -= g_mean);
    g
}

fn check_windows(bank: &ShapeletBank, windows: &WindowSet) -> Result<()> {
    if bank.nominal_length() != windows.window_length() || !bank.is_uniform() {
        return Err(Error::Dimension(format!(
            "shapelet length {} against window length {}",
            bank.nominal_length(),
            windows.window_length()
        )));
    }
    Ok(())
}

pub fn total_loss(
    bank: &ShapeletBank,
    windows: &WindowSet,
    graph: &AffinityGraph,
    params: ObjectiveParams,
) -> Result<LossBreakdown> {
    check_windows(bank, windows)?;
    let prepared = PreparedWindows::new(windows);
    Objective::new(&prepared, graph, params)?.loss(bank)
}

pub fn loss_gradient(
    bank: &ShapeletBank,
    windows: &WindowSet,
    graph: &AffinityGraph,
    params: ObjectiveParams,
) -> Result<Vec<Vec<f64>>> {
    check_windows(bank, windows)?;
    let prepared = PreparedWindows::new(windows);
    Objective::new(&prepared, graph, params)?.gradient(bank)
}
