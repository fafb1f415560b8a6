//! Student-t membership of each series to each shapelet.

use crate::error::{Error, Result};
use crate::similarity::FeatureMatrix;

/// Row-stochastic `N × K` matrix of memberships.
#[derive(Debug, Clone, PartialEq)]
pub struct MembershipMatrix {
    n: usize,
    k: usize,
    q: Vec<f64>,
    alpha: f64,
}

impl MembershipMatrix {
    pub fn from_rows(rows: &[Vec<f64>], alpha: f64) -> Result<Self> {
        let k = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != k) {
            return Err(Error::Dimension("ragged membership rows".into()));
        }
        Ok(Self {
            n: rows.len(),
            k,
            q: rows.concat(),
            alpha,
        })
    }

    pub fn n_samples(&self) -> usize {
        self.n
    }

    pub fn n_components(&self) -> usize {
        self.k
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn get(&self, i: usize, k: usize) -> f64 {
        self.q[i * self.k + k]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.q[i * self.k..(i + 1) * self.k]
    }

    pub fn values(&self) -> &[f64] {
        &self.q
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.q.chunks_exact(self.k).map(<[f64]>::to_vec).collect()
    }
}

/// Log of the unnormalized kernel `(1 + f/alpha)^(-(alpha+1)/2)`.
pub fn log_kernel(f: f64, alpha: f64) -> f64 {
    -0.5 * (alpha + 1.0) * (f / alpha).ln_1p()
}

/// Derivative of [`log_kernel`] with respect to `f`.
pub fn log_kernel_slope(f: f64, alpha: f64) -> f64 {
    -0.5 * (alpha + 1.0) / (alpha + f)
}

/// Normalizes the kernel of one row, writing into `out`.
pub fn membership_row(row: &[f64], alpha: f64, out: &mut [f64]) {
    let mut max = f64::NEG_INFINITY;
    for (o, &f) in out.iter_mut().zip(row) {
        *o = log_kernel(f, alpha);
        max = max.max(*o);
    }
    let mut total = 0.0;
    for o in out.iter_mut() {
        *o = (*o - max).exp();
        total += *o;
    }
    out.iter_mut().for_each(|o| *o /= total);
}

pub fn t_membership(f: &FeatureMatrix, alpha: f64) -> Result<MembershipMatrix> {
    if !(alpha > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "alpha must be positive, got {alpha}"
        )));
    }
    let k = f.n_features();
    if k == 0 {
        return Err(Error::InvalidParameter(
            "membership needs at least one shapelet".into(),
        ));
    }
    if f.values().iter().any(|&v| !(v >= 0.0)) {
        return Err(Error::InvalidParameter(
            "distances must be non-negative".into(),
        ));
    }
    let mut q = vec![0.0; f.values().len()];
    for (row, out) in f.rows().zip(q.chunks_exact_mut(k)) {
        membership_row(row, alpha, out);
    }
    Ok(MembershipMatrix {
        n: f.n_samples(),
        k,
        q,
        alpha,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn features(n: usize, k: usize, v: Vec<f64>) -> FeatureMatrix {
        FeatureMatrix::from_values(n, k, v).unwrap()
    }

    #[test]
    fn hand_evaluated_row() {
        let q = t_membership(&features(1, 2, vec![0.0, 1.0]), 1.0).unwrap();
        assert_abs_diff_eq!(q.get(0, 0), 2.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(q.get(0, 1), 1.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn uniform_and_single() {
        let q = t_membership(&features(1, 4, vec![0.7; 4]), 1.0).unwrap();
        assert!(q.row(0).iter().all(|&v| (v - 0.25).abs() < 1e-15));
        let q = t_membership(&features(2, 1, vec![0.1, 1.9]), 3.0).unwrap();
        assert_eq!(q.values(), &[1.0, 1.0]);
    }

    #[test]
    fn large_alpha_tends_to_softmax() {
        let f = [0.0, 0.4, 1.3];
        let q = t_membership(&features(1, 3, f.to_vec()), 1e6).unwrap();
        let e: Vec<f64> = f.iter().map(|v| (-v / 2.0).exp()).collect();
        let total: f64 = e.iter().sum();
        for (a, b) in q.row(0).iter().zip(&e) {
            assert_abs_diff_eq!(*a, b / total, epsilon = 1e-3);
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(t_membership(&features(1, 2, vec![0.0, 1.0]), 0.0).is_err());
        assert!(t_membership(&features(1, 0, vec![]), 1.0).is_err());
        assert!(t_membership(&features(1, 2, vec![-0.1, 1.0]), 1.0).is_err());
    }
}
