//! The threshold-interval space of a tree ensemble.
//!
//! An ensemble's output is piecewise constant: per feature, the thresholds
//! harvested from every internal node cut the real line into intervals, and
//! the model is constant on every product of intervals. All attacks work on
//! this finite space instead of raw feature values.

use crate::ensemble::TreeEnsembleModel;
use crate::scalar::Scalar;

use super::{AttackObjective, ObjectiveKind};

/// Sorted distinct thresholds per feature. Features never tested by any node
/// have no thresholds, hence a single interval.
#[derive(Clone, Debug)]
pub struct ThresholdIntervalSpace<S> {
    thresholds: Vec<Vec<S>>,
}

/// Half-open interval `[lo, hi)`, unbounded ends included.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FeatureInterval<S> {
    pub lo: S,
    pub hi: S,
}

impl<S: Scalar> ThresholdIntervalSpace<S> {
    pub fn feature_count(&self) -> usize {
        self.thresholds.len()
    }

    pub fn thresholds(&self, feature: usize) -> &[S] {
        self.thresholds
            .get(feature)
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    pub fn interval_count(&self, feature: usize) -> usize {
        self.thresholds(feature).len() + 1
    }

    /// The `k`-th interval of `feature`: `(-inf, t_0), [t_0, t_1), ..., [t_m, +inf)`.
    pub fn interval(&self, feature: usize, k: usize) -> FeatureInterval<S> {
        let t = self.thresholds(feature);
        FeatureInterval {
            lo: if k == 0 { S::neg_infinity() } else { t[k - 1] },
            hi: if k == t.len() { S::infinity() } else { t[k] },
        }
    }

    /// Index of the interval containing `x` (thresholds use `x < t`, so
    /// landing exactly on a threshold belongs to the interval above it).
    pub fn interval_index_of(&self, feature: usize, x: S) -> usize {
        self.thresholds(feature).partition_point(|&t| t <= x)
    }
}

/// Harvest the deduplicated per-feature thresholds of `model`.
pub fn build_interval_space<S: Scalar>(model: &TreeEnsembleModel<S>) -> ThresholdIntervalSpace<S> {
    let d = model
        .trees()
        .iter()
        .flat_map(|t| t.internal_nodes().map(|(f, _)| f))
        .max()
        .map_or(0, |f| f + 1);
    let mut thresholds: Vec<Vec<S>> = vec![Vec::new(); d];
    for tree in model.trees() {
        for (feature, threshold) in tree.internal_nodes() {
            thresholds[feature].push(threshold);
        }
    }
    for t in &mut thresholds {
        t.sort_by(|a, b| a.partial_cmp(b).expect("thresholds must not be NaN"));
        t.dedup();
    }
    ThresholdIntervalSpace { thresholds }
}

/// Cheapest representative of `interval` reachable from `x`, and its
/// per-feature cost under `obj`.
///
/// Landing exactly on a threshold counts as the right side (`x < t` fails),
/// so the cheapest upward representative is the interval's lower endpoint
/// itself, while a downward move must stop `delta_eps` short of the upper
/// endpoint. Movement against an infinite weight costs infinity.
pub fn cheapest_point_in_interval<S: Scalar>(
    x: S,
    interval: FeatureInterval<S>,
    feature: usize,
    obj: &AttackObjective<S>,
    delta_eps: S,
) -> (S, S) {
    if x >= interval.lo && x < interval.hi {
        return (x, S::zero());
    }
    let (w_inc, w_dec) = obj.weights(feature);
    if x < interval.lo {
        let value = interval.lo;
        (value, per_feature_cost(obj.kind(), value - x, w_inc))
    } else {
        // move down into [lo, hi): stop delta_eps short of hi, but never
        // past the interval midpoint when the interval is that narrow
        let mut value = interval.hi - delta_eps;
        if interval.lo > S::neg_infinity() {
            let mid = (interval.lo + interval.hi) * S::cast_from(0.5);
            if value < mid {
                value = mid;
            }
        }
        (value, per_feature_cost(obj.kind(), x - value, w_dec))
    }
}

/// Contribution of one feature moving by `magnitude >= 0` at unit cost `w`.
pub fn per_feature_cost<S: Scalar>(kind: ObjectiveKind, magnitude: S, w: S) -> S {
    debug_assert!(magnitude >= S::zero());
    match kind {
        ObjectiveKind::Linf | ObjectiveKind::L1 => magnitude,
        ObjectiveKind::L2 => magnitude * magnitude,
        ObjectiveKind::Weighted => {
            if magnitude == S::zero() {
                S::zero()
            } else {
                w * magnitude
            }
        }
    }
}
