//! LIBSVM ingestion, min-max normalization, and deterministic splits.
//!
//! Labels are stored as `{0, 1}` with `1` = positive/malicious. Input files
//! may use `{0,1}`, `{-1,+1}`, or any other two-valued convention (such as
//! the `{2,6}` binary-MNIST one); the smaller raw label maps to class 0.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// One observation: a dense feature vector plus a binary label.
#[derive(Clone, Debug, PartialEq)]
pub struct DataPoint<S> {
    pub features: Vec<S>,
    pub label: u8,
}

/// Per-feature min/max fitted on training data, kept for applying the same
/// affine map to held-out data and for inverting it.
#[derive(Clone, Debug, PartialEq)]
pub struct Normalization<S> {
    pub min: Vec<S>,
    pub max: Vec<S>,
}

/// Immutable feature matrix with binary labels.
#[derive(Clone, Debug)]
pub struct Dataset<S> {
    points: Vec<DataPoint<S>>,
    d: usize,
    pub feature_names: Option<Vec<String>>,
    pub normalization: Option<Normalization<S>>,
}

/// Expected dimensionality when loading.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DimSpec {
    Auto,
    Fixed(usize),
}

impl<S: Scalar> Dataset<S> {
    pub fn new(points: Vec<DataPoint<S>>, feature_names: Option<Vec<String>>) -> Result<Self> {
        let d = points.first().map(|p| p.features.len()).unwrap_or(0);
        for (i, p) in points.iter().enumerate() {
            if p.features.len() != d {
                return Err(Error::InvalidArgument(format!(
                    "point {i} has {} features, expected {d}",
                    p.features.len()
                )));
            }
        }
        if let Some(names) = &feature_names {
            if names.len() != d {
                return Err(Error::Dimension {
                    expected: d,
                    actual: names.len(),
                });
            }
        }
        Ok(Dataset {
            points,
            d,
            feature_names,
            normalization: None,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn points(&self) -> &[DataPoint<S>] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &DataPoint<S> {
        &self.points[i]
    }

    pub fn labels(&self) -> impl Iterator<Item = u8> + '_ {
        self.points.iter().map(|p| p.label)
    }

    pub fn has_both_classes(&self) -> bool {
        let mut seen = [false, false];
        for p in &self.points {
            seen[p.label as usize] = true;
        }
        seen[0] && seen[1]
    }

    /// Deterministic sample of `n` point indices without replacement.
    pub fn sample_indices(&self, n: usize, seed: u64) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.len()).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        idx.shuffle(&mut rng);
        idx.truncate(n.min(self.len()));
        idx
    }

    fn with_points(&self, points: Vec<DataPoint<S>>) -> Dataset<S> {
        Dataset {
            points,
            d: self.d,
            feature_names: self.feature_names.clone(),
            normalization: self.normalization.clone(),
        }
    }
}

/// Load a LIBSVM-format text file (`<label> <idx>:<val> ...`, 1-based indices).
///
/// Missing indices fill with zero. With [`DimSpec::Auto`] the dimension is the
/// maximum index seen anywhere in the file.
pub fn load_libsvm<S: Scalar>(path: impl AsRef<Path>, dim: DimSpec) -> Result<Dataset<S>> {
    let text = fs::read_to_string(path.as_ref())?;
    load_libsvm_str(&text, dim)
}

/// Same as [`load_libsvm`] but from an in-memory string.
pub fn load_libsvm_str<S: Scalar>(text: &str, dim: DimSpec) -> Result<Dataset<S>> {
    let mut raw: Vec<(f64, Vec<(usize, f64)>)> = Vec::new();
    let mut max_index = 0usize;
    for (lineno, line) in text.lines().enumerate() {
        let line_number = lineno + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let label_tok = tokens.next().expect("non-empty line has a first token");
        let label: f64 = label_tok.parse().map_err(|_| Error::Parse {
            line: line_number,
            msg: format!("invalid label `{label_tok}`"),
        })?;
        let mut entries = Vec::new();
        for tok in tokens {
            let (idx_s, val_s) = tok.split_once(':').ok_or_else(|| Error::Parse {
                line: line_number,
                msg: format!("expected `index:value`, got `{tok}`"),
            })?;
            let idx: usize = idx_s.parse().map_err(|_| Error::Parse {
                line: line_number,
                msg: format!("invalid feature index `{idx_s}`"),
            })?;
            if idx == 0 {
                return Err(Error::Parse {
                    line: line_number,
                    msg: "feature indices are 1-based".to_string(),
                });
            }
            let val: f64 = val_s.parse().map_err(|_| Error::Parse {
                line: line_number,
                msg: format!("invalid feature value `{val_s}`"),
            })?;
            if let DimSpec::Fixed(d) = dim {
                if idx > d {
                    return Err(Error::Parse {
                        line: line_number,
                        msg: format!("feature index {idx} exceeds declared dimension {d}"),
                    });
                }
            }
            max_index = max_index.max(idx);
            entries.push((idx, val));
        }
        raw.push((label, entries));
    }

    let d = match dim {
        DimSpec::Auto => max_index,
        DimSpec::Fixed(d) => d,
    };

    let positive = positive_label(raw.iter().map(|(l, _)| *l))?;
    let points = raw
        .into_iter()
        .map(|(label, entries)| {
            let mut features = vec![S::zero(); d];
            for (idx, val) in entries {
                features[idx - 1] = S::cast_from(val);
            }
            DataPoint {
                features,
                label: u8::from(label as i64 == positive),
            }
        })
        .collect();
    Dataset::new(points, None)
}

/// Resolve the file's raw label convention: which raw label is class 1.
fn positive_label(labels: impl Iterator<Item = f64>) -> Result<i64> {
    let mut distinct: BTreeSet<i64> = BTreeSet::new();
    for l in labels {
        if l.fract() != 0.0 {
            return Err(Error::LabelSet {
                labels: vec![format!("{l}")],
            });
        }
        distinct.insert(l as i64);
    }
    let distinct: Vec<i64> = distinct.into_iter().collect();
    match distinct.as_slice() {
        [0] | [0, 1] => Ok(1),
        [-1] | [-1, 1] => Ok(1),
        [1] => Ok(1),
        // any other two-valued convention: smaller label is class 0
        [_, hi] => Ok(*hi),
        _ => Err(Error::LabelSet {
            labels: distinct.iter().map(|l| l.to_string()).collect(),
        }),
    }
}

/// Min-max normalize every feature to `[0, 1]`, fitting the parameters on
/// `ds` itself. Constant features map to 0.
pub fn normalize<S: Scalar>(ds: &Dataset<S>) -> Result<(Dataset<S>, Normalization<S>)> {
    if ds.is_empty() {
        return Err(Error::InvalidArgument(
            "cannot normalize an empty dataset".to_string(),
        ));
    }
    let d = ds.d();
    let mut min = vec![S::infinity(); d];
    let mut max = vec![S::neg_infinity(); d];
    for p in ds.points() {
        for j in 0..d {
            let v = p.features[j];
            if v < min[j] {
                min[j] = v;
            }
            if v > max[j] {
                max[j] = v;
            }
        }
    }
    let norm = Normalization { min, max };
    let (mut out, _) = apply_normalization(ds, &norm);
    out.normalization = Some(norm.clone());
    Ok((out, norm))
}

/// Apply previously fitted normalization parameters. Values are not clipped;
/// the second return value counts how many landed outside `[0, 1]`.
pub fn apply_normalization<S: Scalar>(
    ds: &Dataset<S>,
    norm: &Normalization<S>,
) -> (Dataset<S>, usize) {
    let mut out_of_range = 0usize;
    let points = ds
        .points()
        .iter()
        .map(|p| {
            let features = p
                .features
                .iter()
                .enumerate()
                .map(|(j, &v)| {
                    let range = norm.max[j] - norm.min[j];
                    let nv = if range > S::zero() {
                        (v - norm.min[j]) / range
                    } else {
                        S::zero()
                    };
                    if nv < S::zero() || nv > S::one() {
                        out_of_range += 1;
                    }
                    nv
                })
                .collect();
            DataPoint {
                features,
                label: p.label,
            }
        })
        .collect();
    let mut out = ds.with_points(points);
    out.normalization = Some(norm.clone());
    (out, out_of_range)
}

/// Invert [`apply_normalization`]. Constant features come back as their
/// training minimum.
pub fn denormalize<S: Scalar>(ds: &Dataset<S>, norm: &Normalization<S>) -> Dataset<S> {
    let points = ds
        .points()
        .iter()
        .map(|p| {
            let features = p
                .features
                .iter()
                .enumerate()
                .map(|(j, &v)| {
                    let range = norm.max[j] - norm.min[j];
                    if range > S::zero() {
                        v * range + norm.min[j]
                    } else {
                        norm.min[j]
                    }
                })
                .collect();
            DataPoint {
                features,
                label: p.label,
            }
        })
        .collect();
    ds.with_points(points)
}

/// Number of points the first half of a `fraction` split receives.
pub fn split_size(n: usize, fraction: f64) -> usize {
    (n as f64 * fraction).round() as usize
}

/// Deterministic shuffle-and-split into `(round(N*fraction), remainder)`.
pub fn split_train_val<S: Scalar>(
    ds: &Dataset<S>,
    fraction: f64,
    seed: u64,
) -> Result<(Dataset<S>, Dataset<S>)> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "split fraction must be in (0, 1), got {fraction}"
        )));
    }
    let mut idx: Vec<usize> = (0..ds.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    idx.shuffle(&mut rng);
    let cut = split_size(ds.len(), fraction);
    let first = idx[..cut]
        .iter()
        .map(|&i| ds.points[i].clone())
        .collect::<Vec<_>>();
    let second = idx[cut..]
        .iter()
        .map(|&i| ds.points[i].clone())
        .collect::<Vec<_>>();
    Ok((ds.with_points(first), ds.with_points(second)))
}
