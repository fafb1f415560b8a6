//! UCR-format ingestion, per-series normalization and sliding windows.

use std::collections::BTreeSet;
use std::fmt::{self, Write as _};
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Standard deviations below this are treated as a constant series.
pub const DEGENERATE_STD: f64 = 1e-12;

/// A set of `N` univariate series of common length `Q`, optionally labelled.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeriesDataset {
    values: Vec<Vec<f64>>,
    labels: Option<Vec<i64>>,
}

impl TimeSeriesDataset {
    /// Builds a dataset, checking that rows are equal length (at least 2),
    /// finite, and that labels (if any) match the row count.
    pub fn new(values: Vec<Vec<f64>>, labels: Option<Vec<i64>>) -> Result<Self> {
        if let Some(first) = values.first() {
            let q = first.len();
            if q < 2 {
                return Err(Error::InvalidParameter(format!(
                    "series length must be at least 2, got {q}"
                )));
            }
            for (i, row) in values.iter().enumerate() {
                if row.len() != q {
                    return Err(Error::RaggedRows {
                        line: i + 1,
                        expected: q,
                        found: row.len(),
                    });
                }
                if row.iter().any(|v| !v.is_finite()) {
                    return Err(Error::NonFinite { line: i + 1 });
                }
            }
        }
        if let Some(labels) = &labels {
            if labels.len() != values.len() {
                return Err(Error::Dimension(format!(
                    "{} labels for {} series",
                    labels.len(),
                    values.len()
                )));
            }
        }
        Ok(Self { values, labels })
    }

    pub fn empty() -> Self {
        Self {
            values: Vec::new(),
            labels: None,
        }
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn series(&self, i: usize) -> &[f64] {
        &self.values[i]
    }

    pub fn labels(&self) -> Option<&[i64]> {
        self.labels.as_deref()
    }

    pub fn n_samples(&self) -> usize {
        self.values.len()
    }

    /// Series length `Q`; zero for an empty dataset.
    pub fn series_length(&self) -> usize {
        self.values.first().map_or(0, Vec::len)
    }

    /// Number of distinct labels, or `None` when unlabelled.
    pub fn n_classes(&self) -> Option<usize> {
        self.labels
            .as_ref()
            .map(|l| l.iter().collect::<BTreeSet<_>>().len())
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Applies `preprocessing` to every series independently.
    pub fn preprocessed(&self, preprocessing: Preprocessing) -> Self {
        let values = match preprocessing {
            Preprocessing::None => self.values.clone(),
            Preprocessing::ZScore => self.values.iter().map(|s| znormalize(s)).collect(),
            Preprocessing::MinMax => self.values.iter().map(|s| minmax_normalize(s)).collect(),
        };
        Self {
            values,
            labels: self.labels.clone(),
        }
    }
}

/// Per-series normalization applied before training and evaluation.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preprocessing {
    #[default]
    None,
    ZScore,
    MinMax,
}

impl FromStr for Preprocessing {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "none" => Ok(Self::None),
            "zscore" | "z" => Ok(Self::ZScore),
            "minmax" => Ok(Self::MinMax),
            other => Err(Error::InvalidParameter(format!(
                "unknown preprocessing {other:?} (expected none, zscore or minmax)"
            ))),
        }
    }
}

/// Field separator for UCR text files. `Whitespace` splits on runs of
/// blanks, which is what the older `.txt` archive files use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Delimiter {
    Char(char),
    Whitespace,
}

impl Delimiter {
    pub const COMMA: Delimiter = Delimiter::Char(',');
    pub const TAB: Delimiter = Delimiter::Char('\t');

    /// Guesses the separator from the first non-empty line.
    pub fn detect(text: &str) -> Delimiter {
        let line = text.lines().find(|l| !l.trim().is_empty()).unwrap_or("");
        if line.contains('\t') {
            Delimiter::TAB
        } else if line.contains(',') {
            Delimiter::COMMA
        } else {
            Delimiter::Whitespace
        }
    }

    fn split<'a>(&self, line: &'a str) -> Box<dyn Iterator<Item = &'a str> + 'a> {
        match *self {
            Delimiter::Char(c) => Box::new(line.split(c).map(str::trim)),
            Delimiter::Whitespace => Box::new(line.split_whitespace()),
        }
    }

    fn as_char(&self) -> char {
        match *self {
            Delimiter::Char(c) => c,
            Delimiter::Whitespace => ' ',
        }
    }
}

impl fmt::Display for Delimiter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Delimiter::COMMA => f.write_str("comma"),
            Delimiter::TAB => f.write_str("tab"),
            Delimiter::Whitespace => f.write_str("whitespace"),
            Delimiter::Char(c) => write!(f, "{c}"),
        }
    }
}

impl FromStr for Delimiter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "," | "comma" => Ok(Delimiter::COMMA),
            "\t" | "\\t" | "tab" => Ok(Delimiter::TAB),
            " " | "space" | "whitespace" => Ok(Delimiter::Whitespace),
            other => {
                let mut chars = other.chars();
                match (chars.next(), chars.next()) {
                    (Some(c), None) => Ok(Delimiter::Char(c)),
                    _ => Err(Error::InvalidParameter(format!(
                        "delimiter must be a single character, got {other:?}"
                    ))),
                }
            }
        }
    }
}

/// Reads a UCR file: one series per line, label first.
pub fn load_ucr(path: impl AsRef<Path>, delimiter: Delimiter) -> Result<TimeSeriesDataset> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_ucr(&text, delimiter).map_err(|e| match e {
        Error::Empty(_) => Error::Empty(path.display().to_string()),
        e => e,
    })
}

/// Parses UCR text already held in memory.
pub fn parse_ucr(text: &str, delimiter: Delimiter) -> Result<TimeSeriesDataset> {
    let mut values = Vec::new();
    let mut labels = Vec::new();
    let mut expected = None;
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = delimiter.split(line);
        let label_tok = fields.next().unwrap_or_default();
        let label = parse_label(label_tok).ok_or_else(|| Error::Parse {
            line: line_no,
            token: label_tok.to_string(),
        })?;
        let row = fields
            .map(|tok| {
                let v: f64 = tok.parse().map_err(|_| Error::Parse {
                    line: line_no,
                    token: tok.to_string(),
                })?;
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(Error::NonFinite { line: line_no })
                }
            })
            .collect::<Result<Vec<f64>>>()?;
        match expected {
            None => expected = Some(row.len()),
            Some(q) if q != row.len() => {
                return Err(Error::RaggedRows {
                    line: line_no,
                    expected: q,
                    found: row.len(),
                })
            }
            _ => {}
        }
        values.push(row);
        labels.push(label);
    }
    if values.is_empty() {
        return Err(Error::Empty("no series found".into()));
    }
    TimeSeriesDataset::new(values, Some(labels))
}

// UCR archives store labels as "1", "1.0" or "-1".
fn parse_label(tok: &str) -> Option<i64> {
    if let Ok(v) = tok.parse::<i64>() {
        return Some(v);
    }
    let v: f64 = tok.parse().ok()?;
    (v.is_finite() && v.fract() == 0.0).then_some(v as i64)
}

/// Serializes to UCR text. Unlabelled datasets are written with label 0.
pub fn format_ucr(dataset: &TimeSeriesDataset, delimiter: Delimiter) -> String {
    let sep = delimiter.as_char();
    let mut out = String::new();
    for (i, row) in dataset.values().iter().enumerate() {
        let label = dataset.labels().map_or(0, |l| l[i]);
        write!(out, "{label}").unwrap();
        for v in row {
            write!(out, "{sep}{v:?}").unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn write_ucr(
    dataset: &TimeSeriesDataset,
    path: impl AsRef<Path>,
    delimiter: Delimiter,
) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, format_ucr(dataset, delimiter)).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Row-concatenates `train` and `test`. Either side may be empty.
pub fn merge(train: &TimeSeriesDataset, test: &TimeSeriesDataset) -> Result<TimeSeriesDataset> {
    if test.is_empty() {
        return Ok(train.clone());
    }
    if train.is_empty() {
        return Ok(test.clone());
    }
    if train.series_length() != test.series_length() {
        return Err(Error::Dimension(format!(
            "cannot merge series of length {} with length {}",
            train.series_length(),
            test.series_length()
        )));
    }
    let labels = match (train.labels(), test.labels()) {
        (Some(a), Some(b)) => Some(a.iter().chain(b).copied().collect()),
        (None, None) => None,
        _ => {
            return Err(Error::MissingLabels(
                "one side of the merge is labelled and the other is not".into(),
            ))
        }
    };
    let values = train
        .values()
        .iter()
        .chain(test.values())
        .cloned()
        .collect();
    TimeSeriesDataset::new(values, labels)
}

fn mean_and_std(series: &[f64]) -> (f64, f64) {
    let n = series.len() as f64;
    let mean = series.iter().sum::<f64>() / n;
    let var = series.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Zero mean, unit population standard deviation. Constant input maps to
/// the zero vector.
pub fn znormalize(series: &[f64]) -> Vec<f64> {
    if series.is_empty() {
        return Vec::new();
    }
    let (mean, std) = mean_and_std(series);
    if std < DEGENERATE_STD {
        return vec![0.0; series.len()];
    }
    series.iter().map(|v| (v - mean) / std).collect()
}

/// Affine map onto `[0, 1]`. Constant input maps to the zero vector.
pub fn minmax_normalize(series: &[f64]) -> Vec<f64> {
    let (lo, hi) = series
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    let range = hi - lo;
    if !(range > 0.0) {
        return vec![0.0; series.len()];
    }
    series.iter().map(|v| (v - lo) / range).collect()
}

/// All length-`M` contiguous windows of every series, `J = Q - M + 1` per series.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowSet {
    data: Vec<f64>,
    n_series: usize,
    window_length: usize,
    windows_per_series: usize,
}

impl WindowSet {
    pub fn window_length(&self) -> usize {
        self.window_length
    }

    pub fn windows_per_series(&self) -> usize {
        self.windows_per_series
    }

    pub fn n_series(&self) -> usize {
        self.n_series
    }

    pub fn total_windows(&self) -> usize {
        self.n_series * self.windows_per_series
    }

    pub fn window(&self, series: usize, offset: usize) -> &[f64] {
        let start = (series * self.windows_per_series + offset) * self.window_length;
        &self.data[start..start + self.window_length]
    }

    /// Windows in series-major order.
    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.window_length)
    }
}

pub fn slide_windows(dataset: &TimeSeriesDataset, window_length: usize) -> Result<WindowSet> {
    slide_series(dataset.values(), window_length)
}

/// Slides raw rows; every row must be at least `window_length` long.
pub fn slide_series(rows: &[Vec<f64>], window_length: usize) -> Result<WindowSet> {
    let q = rows.first().map_or(0, Vec::len);
    if window_length < 2 || window_length > q {
        return Err(Error::InvalidParameter(format!(
            "window length {window_length} outside [2, {q}]"
        )));
    }
    let j = q - window_length + 1;
    let mut data = Vec::with_capacity(rows.len() * j * window_length);
    for row in rows {
        if row.len() != q {
            return Err(Error::Dimension("rows of unequal length".into()));
        }
        for w in row.windows(window_length) {
            data.extend_from_slice(w);
        }
    }
    Ok(WindowSet {
        data,
        n_series: rows.len(),
        window_length,
        windows_per_series: j,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn parses_two_line_file() {
        let d = parse_ucr("0,1,2,3\n1,4,5,6\n", Delimiter::COMMA).unwrap();
        assert_eq!(d.n_samples(), 2);
        assert_eq!(d.series_length(), 3);
        assert_eq!(d.n_classes(), Some(2));
        assert_eq!(d.series(1), &[4.0, 5.0, 6.0]);
    }

    #[test]
    fn float_labels_and_tabs() {
        let d = parse_ucr("1.0\t0.5\t0.25\n-1\t1\t2\n", Delimiter::TAB).unwrap();
        assert_eq!(d.labels(), Some(&[1, -1][..]));
    }

    #[test]
    fn whitespace_archive_format() {
        let text = "  1.0000000e+00  -1.2  3.4\n  2.0000000e+00  0.1   0.2\n";
        let d = parse_ucr(text, Delimiter::detect(text)).unwrap();
        assert_eq!(d.labels(), Some(&[1, 2][..]));
        assert_eq!(d.series(0), &[-1.2, 3.4]);
    }

    #[test]
    fn rejects_ragged_rows() {
        let err = parse_ucr("0,1,2,3,4\n1,1,2,3,4,5\n", Delimiter::COMMA).unwrap_err();
        assert!(matches!(
            err,
            Error::RaggedRows {
                line: 2,
                expected: 4,
                found: 5
            }
        ));
    }

    #[test]
    fn rejects_bad_tokens_and_empty() {
        assert!(matches!(
            parse_ucr("0,1,x\n", Delimiter::COMMA),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_ucr("1.5,1,2\n", Delimiter::COMMA),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            parse_ucr("\n\n", Delimiter::COMMA),
            Err(Error::Empty(_))
        ));
        assert!(matches!(
            parse_ucr("0,1,nan\n", Delimiter::COMMA),
            Err(Error::NonFinite { .. })
        ));
    }

    #[test]
    fn missing_file_is_io_error() {
        let err = load_ucr("/definitely/not/here.tsv", Delimiter::TAB).unwrap_err();
        assert!(matches!(err, Error::Io { .. }));
    }

    #[test]
    fn merge_rules() {
        let a = TimeSeriesDataset::new(vec![vec![1.0, 2.0, 3.0]], Some(vec![0])).unwrap();
        let b = TimeSeriesDataset::new(vec![vec![4.0, 5.0, 6.0]; 2], Some(vec![1, 1])).unwrap();
        let m = merge(&a, &b).unwrap();
        assert_eq!(m.n_samples(), 3);
        assert_eq!(m.labels(), Some(&[0, 1, 1][..]));
        assert_eq!(merge(&a, &TimeSeriesDataset::empty()).unwrap(), a);
        let c = TimeSeriesDataset::new(vec![vec![1.0, 2.0]], Some(vec![0])).unwrap();
        assert!(matches!(merge(&a, &c), Err(Error::Dimension(_))));
    }

    #[test]
    fn znormalize_examples() {
        let z = znormalize(&[1.0, 2.0, 3.0]);
        assert_abs_diff_eq!(z[0], -1.224744871391589, epsilon = 1e-12);
        assert_abs_diff_eq!(z[1], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(z[2], 1.224744871391589, epsilon = 1e-12);
        assert_eq!(znormalize(&[5.0, 5.0, 5.0]), vec![0.0; 3]);
        let again = znormalize(&z);
        for (a, b) in z.iter().zip(&again) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn minmax_examples() {
        assert_eq!(minmax_normalize(&[2.0, 4.0, 6.0]), vec![0.0, 0.5, 1.0]);
        assert_eq!(minmax_normalize(&[7.0, 7.0]), vec![0.0, 0.0]);
        let x = minmax_normalize(&[3.0, -1.0, 0.5, 9.0]);
        assert_eq!(minmax_normalize(&x), x);
    }

    #[test]
    fn windows() {
        let d = TimeSeriesDataset::new(vec![vec![1.0, 2.0, 3.0, 4.0]], None).unwrap();
        let w = slide_windows(&d, 2).unwrap();
        assert_eq!(w.windows_per_series(), 3);
        let all: Vec<&[f64]> = w.iter().collect();
        assert_eq!(all, vec![&[1.0, 2.0][..], &[2.0, 3.0], &[3.0, 4.0]]);

        let d5 = TimeSeriesDataset::new(vec![vec![0.0, 1.0, 0.0, 1.0, 0.0]], None).unwrap();
        assert_eq!(slide_windows(&d5, 3).unwrap().windows_per_series(), 3);
        let full = slide_windows(&d5, 5).unwrap();
        assert_eq!(full.windows_per_series(), 1);
        assert_eq!(full.window(0, 0), d5.series(0));
        assert!(slide_windows(&d5, 1).is_err());
        assert!(slide_windows(&d5, 6).is_err());
    }
}
