//! Evaluation metrics: accuracy/FPR at a cutoff, ROC and AUC, recall at a
//! fixed FPR, and robustness summaries over attack batches.

use crate::attack::BatchRecord;
use crate::dataset::Dataset;
use crate::ensemble::TreeEnsembleModel;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// ROC curve: `(fpr, tpr)` points from (0,0) to (1,1), score ties grouped,
/// and the trapezoidal AUC.
#[derive(Clone, Debug)]
pub struct RocCurve<S> {
    pub points: Vec<(S, S)>,
    pub auc: S,
}

/// Accuracy-under-attack curve: `accuracy(d)` is the fraction of evaluated
/// points that are correctly classified and have minimal evasion distance
/// strictly greater than `d` (misclassified points count distance 0).
#[derive(Clone, Debug)]
pub struct RobustnessCurve<S> {
    /// `(distance, accuracy)`, sorted by distance, non-increasing accuracy.
    pub points: Vec<(S, S)>,
}

/// Summary of one attack batch.
#[derive(Clone, Debug)]
pub struct RobustnessSummary<S> {
    /// Mean objective over successfully attacked, originally-correct points.
    pub mean_objective: S,
    /// Points contributing to the mean.
    pub attacked_correct: usize,
    /// Points proved unattackable (counted as never evaded in the curve).
    pub infeasible: usize,
    /// Per-point attacks that hit a node/time limit.
    pub limit_exceeded: usize,
    pub evaluated: usize,
    pub curve: RobustnessCurve<S>,
}

/// Percent accuracy at `cutoff` and percent false-positive rate
/// `FP / (FP + TN)`; the FPR is `None` when the data has no negatives.
pub fn accuracy_fpr<S: Scalar>(
    model: &TreeEnsembleModel<S>,
    data: &Dataset<S>,
    cutoff: S,
) -> Result<(S, Option<S>)> {
    if data.is_empty() {
        return Err(Error::InvalidArgument("empty evaluation set".into()));
    }
    let mut correct = 0usize;
    let mut fp = 0usize;
    let mut tn = 0usize;
    for p in data.points() {
        let pred = model.predict_label(&p.features, cutoff)?;
        if pred == p.label {
            correct += 1;
        }
        if p.label == 0 {
            if pred == 1 {
                fp += 1;
            } else {
                tn += 1;
            }
        }
    }
    let hundred = S::cast_from(100.0);
    let acc = hundred * S::cast_from(correct as f64) / S::cast_from(data.len() as f64);
    let fpr = (fp + tn > 0)
        .then(|| hundred * S::cast_from(fp as f64) / S::cast_from((fp + tn) as f64));
    Ok((acc, fpr))
}

/// ROC curve from raw `(score, label)` pairs.
pub fn roc_from_scores<S: Scalar>(scored: &[(S, u8)]) -> Result<RocCurve<S>> {
    let pos = scored.iter().filter(|(_, y)| *y == 1).count();
    let neg = scored.len() - pos;
    if pos == 0 || neg == 0 {
        return Err(Error::InvalidArgument(
            "ROC needs both classes present".into(),
        ));
    }
    let mut sorted = scored.to_vec();
    // descending score: sweep the decision threshold from strict to lax
    sorted.sort_by(|a, b| b.0.partial_cmp(&a.0).expect("scores must not be NaN"));

    let npos = S::cast_from(pos as f64);
    let nneg = S::cast_from(neg as f64);
    let mut points = vec![(S::zero(), S::zero())];
    let mut tp = 0usize;
    let mut fp = 0usize;
    let mut i = 0usize;
    while i < sorted.len() {
        let score = sorted[i].0;
        // ties in score move as one group
        while i < sorted.len() && sorted[i].0 == score {
            if sorted[i].1 == 1 {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        points.push((
            S::cast_from(fp as f64) / nneg,
            S::cast_from(tp as f64) / npos,
        ));
    }
    let mut auc = S::zero();
    let half = S::cast_from(0.5);
    for w in points.windows(2) {
        let (x1, y1) = w[0];
        let (x2, y2) = w[1];
        auc = auc + (x2 - x1) * (y1 + y2) * half;
    }
    Ok(RocCurve { points, auc })
}

/// ROC/AUC of `model` on `data` using predicted probabilities as scores.
pub fn roc_auc<S: Scalar>(model: &TreeEnsembleModel<S>, data: &Dataset<S>) -> Result<RocCurve<S>> {
    let scored = data
        .points()
        .iter()
        .map(|p| Ok((model.predict_proba(&p.features)?, p.label)))
        .collect::<Result<Vec<_>>>()?;
    roc_from_scores(&scored)
}

/// Maximum TPR among curve points with `fpr <= fpr_target` (conservative
/// interpolation).
pub fn recall_at_fpr<S: Scalar>(curve: &RocCurve<S>, fpr_target: S) -> S {
    curve
        .points
        .iter()
        .filter(|(fpr, _)| *fpr <= fpr_target)
        .map(|&(_, tpr)| tpr)
        .fold(S::zero(), S::max)
}

/// Mean minimal evasion distance and the accuracy-under-attack curve.
///
/// Infeasible points are excluded from the mean (their count is reported)
/// and never evade in the curve; limit overruns are treated the same way but
/// tallied separately.
pub fn robustness_summary<S: Scalar>(records: &[BatchRecord<S>]) -> Result<RobustnessSummary<S>> {
    if records.is_empty() {
        return Err(Error::InvalidArgument("empty attack batch".into()));
    }
    let mut sum = S::zero();
    let mut attacked_correct = 0usize;
    let mut infeasible = 0usize;
    let mut limit_exceeded = 0usize;
    // distance of each evaluated point: 0 when misclassified, objective when
    // attacked, infinite when no adversarial example exists
    let mut distances: Vec<(S, bool)> = Vec::with_capacity(records.len());
    for r in records {
        match (&r.result, r.originally_correct) {
            (crate::attack::AttackResult::Adversarial(adv), correct) => {
                if correct {
                    sum = sum + adv.objective;
                    attacked_correct += 1;
                }
                distances.push((if correct { adv.objective } else { S::zero() }, correct));
            }
            (crate::attack::AttackResult::Infeasible, correct) => {
                infeasible += 1;
                distances.push((S::infinity(), correct));
            }
            (crate::attack::AttackResult::LimitExceeded { .. }, correct) => {
                limit_exceeded += 1;
                distances.push((S::infinity(), correct));
            }
        }
    }
    let mean_objective = if attacked_correct > 0 {
        sum / S::cast_from(attacked_correct as f64)
    } else {
        S::zero()
    };

    let n = S::cast_from(records.len() as f64);
    let mut grid: Vec<S> = std::iter::once(S::zero())
        .chain(distances.iter().filter(|(d, _)| d.is_finite()).map(|&(d, _)| d))
        .collect();
    grid.sort_by(|a, b| a.partial_cmp(b).expect("distances are not NaN"));
    grid.dedup();
    let points = grid
        .into_iter()
        .map(|d| {
            let surviving = distances
                .iter()
                .filter(|&&(dist, correct)| correct && dist > d)
                .count();
            (d, S::cast_from(surviving as f64) / n)
        })
        .collect();
    Ok(RobustnessSummary {
        mean_objective,
        attacked_correct,
        infeasible,
        limit_exceeded,
        evaluated: records.len(),
        curve: RobustnessCurve { points },
    })
}

/// `d,accuracy` CSV of a robustness curve.
pub fn robustness_curve_csv<S: Scalar>(curve: &RobustnessCurve<S>) -> String {
    let mut out = String::from("d,accuracy\n");
    for &(d, a) in &curve.points {
        out.push_str(&format!("{d},{a}\n"));
    }
    out
}

/// `fpr,tpr` CSV of a ROC curve.
pub fn roc_curve_csv<S: Scalar>(curve: &RocCurve<S>) -> String {
    let mut out = String::from("fpr,tpr\n");
    for &(fpr, tpr) in &curve.points {
        out.push_str(&format!("{fpr},{tpr}\n"));
    }
    out
}
