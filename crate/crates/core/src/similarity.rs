//! Shift-maximized normalized cross-correlation (NCC) between shapelets and
//! sliding windows, the distance tensor `D = 1 - NCC` and its min-pooling.
//!
//! Both arguments of a correlation are z-normalized and scaled to unit norm,
//! so the correlation at any shift lies in `[-1, 1]`. Linear (zero padded)
//! correlation over the full shift range `[-(M-1), M-1]` is computed with a
//! real FFT of the smallest power-of-two length covering `2M - 1` samples.

use std::sync::Arc;

use realfft::num_complex::Complex;
use realfft::{ComplexToReal, RealFftPlanner, RealToComplex};
use serde::{Deserialize, Serialize};

use crate::dataset::{slide_series, znormalize, WindowSet, DEGENERATE_STD};
use crate::error::{Error, Result};

/// Two correlations closer than this are treated as tied by the shift rule.
const SHIFT_TIE_EPS: f64 = 1e-12;

/// `K` learnable subsequences. Rows normally share the nominal length `M`;
/// after trimming each row carries its own effective length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapeletBank {
    shapelets: Vec<Vec<f64>>,
    nominal_length: usize,
}

impl ShapeletBank {
    pub fn new(shapelets: Vec<Vec<f64>>) -> Result<Self> {
        let nominal_length = shapelets.iter().map(Vec::len).max().unwrap_or(0);
        Self::with_nominal_length(shapelets, nominal_length)
    }

    pub fn with_nominal_length(shapelets: Vec<Vec<f64>>, nominal_length: usize) -> Result<Self> {
        if shapelets.is_empty() {
            return Err(Error::InvalidParameter(
                "shapelet bank must not be empty".into(),
            ));
        }
        for (k, s) in shapelets.iter().enumerate() {
            if s.len() < 2 || s.len() > nominal_length {
                return Err(Error::InvalidParameter(format!(
                    "shapelet {k} has length {}, expected 2..={nominal_length}",
                    s.len()
                )));
            }
            if s.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "shapelet {k} is not finite"
                )));
            }
        }
        Ok(Self {
            shapelets,
            nominal_length,
        })
    }

    pub fn count(&self) -> usize {
        self.shapelets.len()
    }

    pub fn nominal_length(&self) -> usize {
        self.nominal_length
    }

    pub fn shapelet(&self, k: usize) -> &[f64] {
        &self.shapelets[k]
    }

    pub fn shapelets(&self) -> &[Vec<f64>] {
        &self.shapelets
    }

    pub fn effective_lengths(&self) -> Vec<usize> {
        self.shapelets.iter().map(Vec::len).collect()
    }

    /// True when every shapelet has the nominal length.
    pub fn is_uniform(&self) -> bool {
        self.shapelets
            .iter()
            .all(|s| s.len() == self.nominal_length)
    }

    pub(crate) fn shapelets_mut(&mut self) -> &mut [Vec<f64>] {
        &mut self.shapelets
    }
}

/// FFT length used for windows of length `m`.
pub fn fft_len(m: usize) -> usize {
    (2 * m.max(1) - 1).next_power_of_two()
}

/// Z-normalizes and scales to unit Euclidean norm; `None` for constant input.
pub fn unit_znormalize(x: &[f64]) -> Option<Vec<f64>> {
    let mut z = znormalize(x);
    let norm = z.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm < DEGENERATE_STD {
        return None;
    }
    z.iter_mut().for_each(|v| *v /= norm);
    Some(z)
}

/// Reusable FFT plans and buffers for one window length.
#[derive(Clone)]
pub struct Correlator {
    m: usize,
    len: usize,
    forward: Arc<dyn RealToComplex<f64>>,
    inverse: Arc<dyn ComplexToReal<f64>>,
    real_buf: Vec<f64>,
    spec_buf: Vec<Complex<f64>>,
    scratch_fwd: Vec<Complex<f64>>,
    scratch_inv: Vec<Complex<f64>>,
}

impl Correlator {
    pub fn new(m: usize) -> Self {
        let len = fft_len(m);
        let mut planner = RealFftPlanner::<f64>::new();
        let forward = planner.plan_fft_forward(len);
        let inverse = planner.plan_fft_inverse(len);
        Self {
            m,
            len,
            real_buf: forward.make_input_vec(),
            spec_buf: forward.make_output_vec(),
            scratch_fwd: forward.make_scratch_vec(),
            scratch_inv: inverse.make_scratch_vec(),
            forward,
            inverse,
        }
    }

    pub fn window_length(&self) -> usize {
        self.m
    }

    pub fn spectrum_len(&self) -> usize {
        self.len / 2 + 1
    }

    /// Forward transform of `x` zero-padded to the FFT length, appended to `out`.
    pub fn spectrum_into(&mut self, x: &[f64], out: &mut Vec<Complex<f64>>) {
        debug_assert_eq!(x.len(), self.m);
        self.real_buf.fill(0.0);
        self.real_buf[..x.len()].copy_from_slice(x);
        self.forward
            .process_with_scratch(
                &mut self.real_buf,
                &mut self.spec_buf,
                &mut self.scratch_fwd,
            )
            .expect("buffer sizes come from the plan");
        out.extend_from_slice(&self.spec_buf);
    }

    pub fn spectrum(&mut self, x: &[f64]) -> Vec<Complex<f64>> {
        let mut out = Vec::with_capacity(self.spectrum_len());
        self.spectrum_into(x, &mut out);
        out
    }

    /// Circular correlation of the signals behind spectra `a` and `b`, left in
    /// the internal real buffer: entry `w` (mod len) is `sum_n a[n + w] b[n]`.
    fn correlate(&mut self, a: &[Complex<f64>], b: &[Complex<f64>]) -> &[f64] {
        for ((o, x), y) in self.spec_buf.iter_mut().zip(a).zip(b) {
            *o = x * y.conj();
        }
        let last = self.spec_buf.len() - 1;
        self.spec_buf[0].im = 0.0;
        self.spec_buf[last].im = 0.0;
        self.inverse
            .process_with_scratch(
                &mut self.spec_buf,
                &mut self.real_buf,
                &mut self.scratch_inv,
            )
            .expect("buffer sizes come from the plan");
        let scale = 1.0 / self.len as f64;
        self.real_buf.iter_mut().for_each(|v| *v *= scale);
        &self.real_buf
    }

    /// Linear cross-correlation for shifts `-(M-1)..=M-1`, in that order.
    pub fn all_shifts(&mut self, a: &[Complex<f64>], b: &[Complex<f64>]) -> Vec<f64> {
        let m = self.m as isize;
        let len = self.len as isize;
        let circ = self.correlate(a, b);
        (-(m - 1)..m)
            .map(|w| circ[w.rem_euclid(len) as usize])
            .collect()
    }

    /// Maximum correlation and its shift. Near-ties go to the smallest
    /// `|shift|`, negative before positive.
    pub fn best_shift(&mut self, a: &[Complex<f64>], b: &[Complex<f64>]) -> (f64, isize) {
        let m = self.m as isize;
        let len = self.len;
        let circ = self.correlate(a, b);
        let mut best = (circ[0], 0isize);
        for mag in 1..m {
            let neg = circ[len - mag as usize];
            if neg > best.0 + SHIFT_TIE_EPS {
                best = (neg, -mag);
            }
            let pos = circ[mag as usize];
            if pos > best.0 + SHIFT_TIE_EPS {
                best = (pos, mag);
            }
        }
        best
    }
}

/// `out[w + M - 1] = sum_m x[m] * y[m - w]` over the valid overlap, for
/// `w` in `-(M-1)..=M-1`.
pub fn cross_correlation_all_shifts(x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
    if x.len() != y.len() {
        return Err(Error::Dimension(format!(
            "cross-correlation of lengths {} and {}",
            x.len(),
            y.len()
        )));
    }
    if x.is_empty() {
        return Err(Error::InvalidParameter(
            "cross-correlation of empty vectors".into(),
        ));
    }
    let mut c = Correlator::new(x.len());
    let sx = c.spectrum(x);
    let sy = c.spectrum(y);
    Ok(c.all_shifts(&sx, &sy))
}

/// Result of a shift-maximized comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NccMatch {
    pub value: f64,
    pub shift: isize,
}

/// Normalized cross-correlation maximized over shifts. Constant input on
/// either side yields `0` at shift `0`.
pub fn ncc(s: &[f64], w: &[f64]) -> Result<NccMatch> {
    if s.len() != w.len() {
        return Err(Error::Dimension(format!(
            "ncc of lengths {} and {}",
            s.len(),
            w.len()
        )));
    }
    let (Some(us), Some(uw)) = (unit_znormalize(s), unit_znormalize(w)) else {
        return Ok(NccMatch {
            value: 0.0,
            shift: 0,
        });
    };
    let mut c = Correlator::new(s.len());
    let a = c.spectrum(&us);
    let b = c.spectrum(&uw);
    let (value, shift) = c.best_shift(&a, &b);
    Ok(NccMatch {
        value: value.clamp(-1.0, 1.0),
        shift,
    })
}

/// Unit z-normalized windows and their spectra, computed once per window set.
pub struct PreparedWindows {
    m: usize,
    n_series: usize,
    per_series: usize,
    spec_len: usize,
    units: Vec<f64>,
    valid: Vec<bool>,
    spectra: Vec<Complex<f64>>,
}

impl PreparedWindows {
    pub fn new(windows: &WindowSet) -> Self {
        let m = windows.window_length();
        let mut c = Correlator::new(m);
        let total = windows.total_windows();
        let spec_len = c.spectrum_len();
        let mut units = Vec::with_capacity(total * m);
        let mut valid = Vec::with_capacity(total);
        let mut spectra = Vec::with_capacity(total * spec_len);
        for w in windows.iter() {
            match unit_znormalize(w) {
                Some(u) => {
                    c.spectrum_into(&u, &mut spectra);
                    units.extend_from_slice(&u);
                    valid.push(true);
                }
                None => {
                    spectra.extend(std::iter::repeat_n(Complex::default(), spec_len));
                    units.extend(std::iter::repeat_n(0.0, m));
                    valid.push(false);
                }
            }
        }
        Self {
            m,
            n_series: windows.n_series(),
            per_series: windows.windows_per_series(),
            spec_len,
            units,
            valid,
            spectra,
        }
    }

    pub fn window_length(&self) -> usize {
        self.m
    }

    pub fn n_series(&self) -> usize {
        self.n_series
    }

    pub fn windows_per_series(&self) -> usize {
        self.per_series
    }

    fn flat(&self, i: usize, j: usize) -> usize {
        i * self.per_series + j
    }

    /// Unit z-normalized window, or `None` if the window is constant.
    pub fn unit(&self, i: usize, j: usize) -> Option<&[f64]> {
        let idx = self.flat(i, j);
        self.valid[idx].then(|| &self.units[idx * self.m..(idx + 1) * self.m])
    }

    fn spectrum(&self, i: usize, j: usize) -> Option<&[Complex<f64>]> {
        let idx = self.flat(i, j);
        self.valid[idx].then(|| &self.spectra[idx * self.spec_len..(idx + 1) * self.spec_len])
    }
}

/// A shapelet prepared for repeated comparison against windows.
struct PreparedShapelet {
    spectrum: Option<Vec<Complex<f64>>>,
}

impl PreparedShapelet {
    fn new(c: &mut Correlator, s: &[f64]) -> Self {
        Self {
            spectrum: unit_znormalize(s).map(|u| c.spectrum(&u)),
        }
    }

    fn compare(
        &self,
        c: &mut Correlator,
        windows: &PreparedWindows,
        i: usize,
        j: usize,
    ) -> (f64, isize) {
        match (&self.spectrum, windows.spectrum(i, j)) {
            (Some(a), Some(b)) => {
                let (v, w) = c.best_shift(a, b);
                (1.0 - v.clamp(-1.0, 1.0), w)
            }
            _ => (1.0, 0),
        }
    }
}

/// `d[i][j][k] = 1 - NCC(s_k, t_ij)` with the maximizing shift per entry.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceTensor {
    n: usize,
    j: usize,
    k: usize,
    d: Vec<f64>,
    shift: Vec<isize>,
}

impl DistanceTensor {
    pub fn shape(&self) -> (usize, usize, usize) {
        (self.n, self.j, self.k)
    }

    fn idx(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.j + j) * self.k + k
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.d[self.idx(i, j, k)]
    }

    pub fn argmax_shift(&self, i: usize, j: usize, k: usize) -> isize {
        self.shift[self.idx(i, j, k)]
    }

    pub fn values(&self) -> &[f64] {
        &self.d
    }

    /// Builds a tensor from explicit `n × j × k` values; shifts are zero.
    pub fn from_values(n: usize, j: usize, k: usize, d: Vec<f64>) -> Result<Self> {
        if d.len() != n * j * k || n * j * k == 0 {
            return Err(Error::Dimension(format!(
                "{} values for a {n}x{j}x{k} tensor",
                d.len()
            )));
        }
        Ok(Self {
            n,
            j,
            k,
            shift: vec![0; d.len()],
            d,
        })
    }
}

fn check_bank_length(bank: &ShapeletBank, m: usize) -> Result<()> {
    if !bank.is_uniform() || bank.nominal_length() != m {
        return Err(Error::Dimension(format!(
            "shapelets of length {:?} against windows of length {m}",
            bank.effective_lengths()
        )));
    }
    Ok(())
}

pub fn distance_tensor(bank: &ShapeletBank, windows: &WindowSet) -> Result<DistanceTensor> {
    check_bank_length(bank, windows.window_length())?;
    let prepared = PreparedWindows::new(windows);
    let (n, jn, kn) = (
        windows.n_series(),
        windows.windows_per_series(),
        bank.count(),
    );
    let mut c = Correlator::new(windows.window_length());
    let shapelets: Vec<_> = bank
        .shapelets()
        .iter()
        .map(|s| PreparedShapelet::new(&mut c, s))
        .collect();
    let mut d = Vec::with_capacity(n * jn * kn);
    let mut shift = Vec::with_capacity(n * jn * kn);
    for i in 0..n {
        for j in 0..jn {
            for s in &shapelets {
                let (dist, w) = s.compare(&mut c, &prepared, i, j);
                d.push(dist);
                shift.push(w);
            }
        }
    }
    Ok(DistanceTensor {
        n,
        j: jn,
        k: kn,
        d,
        shift,
    })
}

/// Min-pooled distances: `f[i][k] = min_j d[i][j][k]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureMatrix {
    n: usize,
    k: usize,
    f: Vec<f64>,
    argmin_window: Vec<usize>,
    best_shift: Vec<isize>,
}

impl FeatureMatrix {
    /// Wraps explicit values; argmin bookkeeping is zeroed.
    pub fn from_values(n: usize, k: usize, f: Vec<f64>) -> Result<Self> {
        if f.len() != n * k {
            return Err(Error::Dimension(format!(
                "{} values for a {n}x{k} matrix",
                f.len()
            )));
        }
        Ok(Self {
            n,
            k,
            argmin_window: vec![0; f.len()],
            best_shift: vec![0; f.len()],
            f,
        })
    }

    pub fn n_samples(&self) -> usize {
        self.n
    }

    pub fn n_features(&self) -> usize {
        self.k
    }

    pub fn get(&self, i: usize, k: usize) -> f64 {
        self.f[i * self.k + k]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.f[i * self.k..(i + 1) * self.k]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.f.chunks_exact(self.k.max(1))
    }

    pub fn values(&self) -> &[f64] {
        &self.f
    }

    pub fn argmin_window(&self, i: usize, k: usize) -> usize {
        self.argmin_window[i * self.k + k]
    }

    /// Maximizing shift at the pooled window.
    pub fn best_shift(&self, i: usize, k: usize) -> isize {
        self.best_shift[i * self.k + k]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.rows().map(<[f64]>::to_vec).collect()
    }
}

/// Ties keep the smallest window index.
pub fn min_pool(d: &DistanceTensor) -> FeatureMatrix {
    let (n, jn, kn) = d.shape();
    let mut f = vec![f64::INFINITY; n * kn];
    let mut argmin_window = vec![0; n * kn];
    let mut best_shift = vec![0; n * kn];
    for i in 0..n {
        for j in 0..jn {
            for k in 0..kn {
                let v = d.get(i, j, k);
                let o = i * kn + k;
                if v < f[o] {
                    f[o] = v;
                    argmin_window[o] = j;
                    best_shift[o] = d.argmax_shift(i, j, k);
                }
            }
        }
    }
    FeatureMatrix {
        n,
        k: kn,
        f,
        argmin_window,
        best_shift,
    }
}

/// Best-match column for one shapelet: `(distance, window, shift)` per series.
fn pooled_column(s: &[f64], windows: &PreparedWindows) -> Vec<(f64, usize, isize)> {
    let mut c = Correlator::new(windows.window_length());
    let shapelet = PreparedShapelet::new(&mut c, s);
    (0..windows.n_series())
        .map(|i| {
            let mut best = (f64::INFINITY, 0, 0);
            for j in 0..windows.windows_per_series() {
                let (d, w) = shapelet.compare(&mut c, windows, i, j);
                if d < best.0 {
                    best = (d, j, w);
                }
            }
            best
        })
        .collect()
}

fn assemble(columns: Vec<Vec<(f64, usize, isize)>>, n: usize) -> FeatureMatrix {
    let kn = columns.len();
    let mut f = vec![0.0; n * kn];
    let mut argmin_window = vec![0; n * kn];
    let mut best_shift = vec![0; n * kn];
    for (k, col) in columns.into_iter().enumerate() {
        for (i, (d, j, w)) in col.into_iter().enumerate() {
            f[i * kn + k] = d;
            argmin_window[i * kn + k] = j;
            best_shift[i * kn + k] = w;
        }
    }
    FeatureMatrix {
        n,
        k: kn,
        f,
        argmin_window,
        best_shift,
    }
}

/// Equivalent to `min_pool(distance_tensor(..))` without materializing the tensor.
pub fn pooled_features(bank: &ShapeletBank, windows: &PreparedWindows) -> Result<FeatureMatrix> {
    check_bank_length(bank, windows.window_length())?;
    let columns = crate::par::map(bank.shapelets(), |s| pooled_column(s, windows));
    Ok(assemble(columns, windows.n_series()))
}

/// Features for a possibly ragged bank: each shapelet is compared against
/// windows of its own effective length.
pub fn bank_features(bank: &ShapeletBank, rows: &[Vec<f64>]) -> Result<FeatureMatrix> {
    let q = rows.first().map_or(0, Vec::len);
    let longest = bank.effective_lengths().into_iter().max().unwrap_or(0);
    if longest > q {
        return Err(Error::Dimension(format!(
            "series of length {q} shorter than shapelet of length {longest}"
        )));
    }
    let mut lengths = bank.effective_lengths();
    lengths.sort_unstable();
    lengths.dedup();
    let mut columns: Vec<Option<Vec<(f64, usize, isize)>>> = vec![None; bank.count()];
    for m in lengths {
        let prepared = PreparedWindows::new(&slide_series(rows, m)?);
        let members: Vec<usize> = (0..bank.count())
            .filter(|&k| bank.shapelet(k).len() == m)
            .collect();
        let computed = crate::par::map(&members, |&k| pooled_column(bank.shapelet(k), &prepared));
        for (k, col) in members.into_iter().zip(computed) {
            columns[k] = Some(col);
        }
    }
    Ok(assemble(
        columns
            .into_iter()
            .map(|c| c.expect("every length visited"))
            .collect(),
        rows.len(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{slide_windows, TimeSeriesDataset};
    use approx::assert_abs_diff_eq;

    #[test]
    fn correlation_small_cases() {
        let c = cross_correlation_all_shifts(&[1.0, 0.0], &[0.0, 1.0]).unwrap();
        assert_abs_diff_eq!(c[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(c[1], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(c[2], 0.0, epsilon = 1e-12);
        let c = cross_correlation_all_shifts(&[1.0, 1.0], &[1.0, 1.0]).unwrap();
        for (a, b) in c.iter().zip([1.0, 2.0, 1.0]) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-12);
        }
        let c = cross_correlation_all_shifts(&[0.0, 0.0], &[3.0, -2.0]).unwrap();
        assert!(c.iter().all(|v| v.abs() < 1e-15));
        assert!(cross_correlation_all_shifts(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn fft_sizes() {
        assert_eq!(fft_len(2), 4);
        assert_eq!(fft_len(48), 128);
        assert_eq!(fft_len(64), 128);
        assert_eq!(fft_len(65), 256);
    }

    #[test]
    fn ncc_examples() {
        let x = [0.3, -1.0, 2.2, 0.7, 0.1];
        let m = ncc(&x, &x).unwrap();
        assert_abs_diff_eq!(m.value, 1.0, epsilon = 1e-12);
        assert_eq!(m.shift, 0);

        let m = ncc(&[1.0, -1.0], &[-1.0, 1.0]).unwrap();
        assert_abs_diff_eq!(m.value, 0.5, epsilon = 1e-12);
        assert_eq!(m.shift, -1);

        assert_eq!(ncc(&[2.0, 2.0, 2.0], &x[..3]).unwrap().value, 0.0);
        assert!(ncc(&x, &x[..4]).is_err());
    }

    #[test]
    fn tensor_shape_and_exact_match() {
        let rows: Vec<Vec<f64>> = (0..2)
            .map(|i| (0..10).map(|t| ((t * (i + 2)) as f64).sin()).collect())
            .collect();
        let d = TimeSeriesDataset::new(rows.clone(), None).unwrap();
        let w = slide_windows(&d, 4).unwrap();
        let bank = ShapeletBank::new(vec![
            rows[1][3..7].to_vec(),
            vec![0.5, -0.5, 0.1, 0.9],
            vec![1.0; 4],
        ])
        .unwrap();
        let t = distance_tensor(&bank, &w).unwrap();
        assert_eq!(t.shape(), (2, 7, 3));
        assert_abs_diff_eq!(t.get(1, 3, 0), 0.0, epsilon = 1e-12);
        for i in 0..2 {
            for j in 0..7 {
                assert_eq!(t.get(i, j, 2), 1.0);
            }
        }
        assert!(t.values().iter().all(|v| (0.0..=2.0).contains(v)));

        let pooled = min_pool(&t);
        let fast = pooled_features(&bank, &PreparedWindows::new(&w)).unwrap();
        assert_eq!(pooled, fast);
    }

    #[test]
    fn min_pool_rules() {
        let t = DistanceTensor::from_values(1, 3, 1, vec![0.5, 0.2, 0.9]).unwrap();
        let f = min_pool(&t);
        assert_eq!(f.get(0, 0), 0.2);
        assert_eq!(f.argmin_window(0, 0), 1);
        let t = DistanceTensor::from_values(1, 2, 1, vec![0.3, 0.3]).unwrap();
        assert_eq!(min_pool(&t).argmin_window(0, 0), 0);
    }

    #[test]
    fn length_mismatch_rejected() {
        let d = TimeSeriesDataset::new(vec![vec![1.0, 2.0, 0.0, 4.0, 1.0]], None).unwrap();
        let w = slide_windows(&d, 3).unwrap();
        let bank = ShapeletBank::new(vec![vec![1.0, 0.0, 1.0, 2.0]]).unwrap();
        assert!(distance_tensor(&bank, &w).is_err());
    }

    #[test]
    fn ragged_bank_features() {
        let series = vec![vec![0.0, 0.1, 0.2, 5.0, -3.0, 2.0, 0.1, 0.0, 0.2]];
        let bank = ShapeletBank::with_nominal_length(
            vec![vec![5.0, -3.0, 2.0], vec![0.2, 5.0, -3.0, 2.0]],
            4,
        )
        .unwrap();
        let f = bank_features(&bank, &series).unwrap();
        assert_eq!((f.n_samples(), f.n_features()), (1, 2));
        assert_abs_diff_eq!(f.get(0, 0), 0.0, epsilon = 1e-12);
        assert_eq!(f.argmin_window(0, 0), 3);
        assert_abs_diff_eq!(f.get(0, 1), 0.0, epsilon = 1e-12);
        assert!(bank_features(&bank, &[vec![1.0, 2.0, 3.0]]).is_err());
    }
}
