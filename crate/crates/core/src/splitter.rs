//! Robust split search: candidate enumeration, uncertain-set maintenance,
//! the greedy inner score-maximization, and a brute-force oracle.
//!
//! The inner problem: at a candidate split, points whose perturbation
//! interval straddles the threshold can be pushed to either child by a
//! bounded attacker. The split is scored against the worst such assignment.
//! The greedy solver walks the uncertain points in ascending feature order
//! and sends each to whichever side currently yields the larger (worse)
//! post-split score; [`brute_force_assign`] maximizes exactly over all
//! `2^|uncertain|` assignments and exists to audit the greedy one.
//!
//! The split search floors the greedy result at the natural (physical-side)
//! assignment: both are feasible for the maximizing adversary, and for
//! gradient-sum scores the greedy pass occasionally scores below natural
//! when opposite-sign gradients cancel. The floor keeps the robust gain of
//! any candidate at or below its regular gain.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::costspec::{partition_for_threshold, CostConstraint, PerturbationInterval};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::scalar::{KahanSum, Scalar};

/// Post-split scoring function. Higher values are worse for the model, so
/// the inner adversary maximizes them.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ScoreFunction<S> {
    /// Weighted Gini child impurity, in `[0, 0.5]`.
    Gini,
    /// Weighted Shannon-entropy child impurity, in `[0, 1]`.
    Entropy,
    /// Negated XGBoost structure score `-1/2 [G_L^2/(H_L+lambda) + G_R^2/(H_R+lambda)]`;
    /// `gain = s(I) - s(I_L, I_R) - gamma` recovers the closed-form split gain.
    XgbLoss { lambda: S, gamma: S },
}

impl<S: Scalar> ScoreFunction<S> {
    /// Contribution subtracted from every gain (the split-acceptance penalty).
    pub fn gain_penalty(&self) -> S {
        match *self {
            ScoreFunction::XgbLoss { gamma, .. } => gamma,
            _ => S::zero(),
        }
    }

    fn wants_gradients(&self) -> bool {
        matches!(self, ScoreFunction::XgbLoss { .. })
    }
}

/// Per-point statistic consumed by a score function.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PointStat<S> {
    Label(u8),
    Grad { g: S, h: S },
}

/// Additive statistics of a point set with O(1) add/remove.
#[derive(Clone, Debug, PartialEq)]
pub enum ScoreStats<S> {
    Counts { n0: u64, n1: u64 },
    Grad { g: KahanSum<S>, h: KahanSum<S>, n: u64 },
}

impl<S: Scalar> ScoreStats<S> {
    pub fn empty_counts() -> Self {
        ScoreStats::Counts { n0: 0, n1: 0 }
    }

    pub fn empty_grad() -> Self {
        ScoreStats::Grad {
            g: KahanSum::new(),
            h: KahanSum::new(),
            n: 0,
        }
    }

    /// Empty statistics of the same kind as `self`.
    pub fn empty_like(&self) -> Self {
        match self {
            ScoreStats::Counts { .. } => Self::empty_counts(),
            ScoreStats::Grad { .. } => Self::empty_grad(),
        }
    }

    pub fn n(&self) -> u64 {
        match self {
            ScoreStats::Counts { n0, n1 } => n0 + n1,
            ScoreStats::Grad { n, .. } => *n,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.n() == 0
    }

    pub fn add(&mut self, stat: PointStat<S>) {
        match (self, stat) {
            (ScoreStats::Counts { n0, n1 }, PointStat::Label(y)) => {
                if y == 0 {
                    *n0 += 1;
                } else {
                    *n1 += 1;
                }
            }
            (ScoreStats::Grad { g, h, n }, PointStat::Grad { g: gi, h: hi }) => {
                g.add(gi);
                h.add(hi);
                *n += 1;
            }
            _ => panic!("point statistic kind does not match score statistics"),
        }
    }

    pub fn remove(&mut self, stat: PointStat<S>) {
        match (self, stat) {
            (ScoreStats::Counts { n0, n1 }, PointStat::Label(y)) => {
                if y == 0 {
                    *n0 -= 1;
                } else {
                    *n1 -= 1;
                }
            }
            (ScoreStats::Grad { g, h, n }, PointStat::Grad { g: gi, h: hi }) => {
                g.remove(gi);
                h.remove(hi);
                *n -= 1;
            }
            _ => panic!("point statistic kind does not match score statistics"),
        }
    }

    fn with(&self, stat: PointStat<S>) -> Self {
        let mut out = self.clone();
        out.add(stat);
        out
    }

    fn impurity_gini(&self) -> S {
        match self {
            ScoreStats::Counts { n0, n1 } => {
                let n = n0 + n1;
                if n == 0 {
                    return S::zero();
                }
                let n = S::cast_from(n as f64);
                let p0 = S::cast_from(*n0 as f64) / n;
                let p1 = S::cast_from(*n1 as f64) / n;
                S::one() - p0 * p0 - p1 * p1
            }
            ScoreStats::Grad { .. } => panic!("gini needs class counts"),
        }
    }

    fn impurity_entropy(&self) -> S {
        match self {
            ScoreStats::Counts { n0, n1 } => {
                let n = n0 + n1;
                if n == 0 {
                    return S::zero();
                }
                let n = S::cast_from(n as f64);
                let mut e = S::zero();
                for c in [*n0, *n1] {
                    if c > 0 {
                        let p = S::cast_from(c as f64) / n;
                        e = e - p * p.log2();
                    }
                }
                e
            }
            ScoreStats::Grad { .. } => panic!("entropy needs class counts"),
        }
    }

    fn xgb_term(&self, lambda: S) -> S {
        match self {
            ScoreStats::Grad { g, h, .. } => {
                let denom = h.value() + lambda;
                if denom > S::zero() {
                    let gv = g.value();
                    gv * gv / denom
                } else {
                    S::zero()
                }
            }
            ScoreStats::Counts { .. } => panic!("xgb loss needs gradient sums"),
        }
    }

    pub fn grad_sums(&self) -> Option<(S, S)> {
        match self {
            ScoreStats::Grad { g, h, .. } => Some((g.value(), h.value())),
            ScoreStats::Counts { .. } => None,
        }
    }

    pub fn class_counts(&self) -> Option<(u64, u64)> {
        match self {
            ScoreStats::Counts { n0, n1 } => Some((*n0, *n1)),
            ScoreStats::Grad { .. } => None,
        }
    }
}

/// Post-split score `s(I_L, I_R)`; higher is worse for the model.
pub fn score<S: Scalar>(
    sf: ScoreFunction<S>,
    left: &ScoreStats<S>,
    right: &ScoreStats<S>,
) -> Result<S> {
    if left.is_empty() && right.is_empty() {
        return Err(Error::InvalidArgument(
            "score is undefined for two empty children".into(),
        ));
    }
    Ok(match sf {
        ScoreFunction::Gini => weighted_impurity(left, right, ScoreStats::impurity_gini),
        ScoreFunction::Entropy => weighted_impurity(left, right, ScoreStats::impurity_entropy),
        ScoreFunction::XgbLoss { lambda, .. } => {
            let half = S::cast_from(0.5);
            -half * (left.xgb_term(lambda) + right.xgb_term(lambda))
        }
    })
}

fn weighted_impurity<S: Scalar>(
    left: &ScoreStats<S>,
    right: &ScoreStats<S>,
    imp: impl Fn(&ScoreStats<S>) -> S,
) -> S {
    let nl = S::cast_from(left.n() as f64);
    let nr = S::cast_from(right.n() as f64);
    (nl * imp(left) + nr * imp(right)) / (nl + nr)
}

/// Score of a node before splitting, `s(I)`.
pub fn node_score<S: Scalar>(sf: ScoreFunction<S>, stats: &ScoreStats<S>) -> Result<S> {
    score(sf, stats, &stats.empty_like())
}

/// Which child an uncertain point is assigned to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Side {
    Left,
    Right,
}

/// One uncertain point, in ascending-feature-value order (ties by id).
#[derive(Clone, Copy, Debug)]
pub struct UncertainPoint<S> {
    pub id: u32,
    pub stat: PointStat<S>,
}

/// Greedy adversarial assignment: walk the uncertain points in order and put
/// each on whichever side yields the larger post-split score (ties go right).
/// Returns the assignment and the final worst-case score.
pub fn greedy_assign<S: Scalar>(
    delta: &[UncertainPoint<S>],
    base_left: ScoreStats<S>,
    base_right: ScoreStats<S>,
    sf: ScoreFunction<S>,
) -> Result<(Vec<Side>, S)> {
    let mut left = base_left;
    let mut right = base_right;
    let mut assignment = Vec::with_capacity(delta.len());
    for pt in delta {
        let left_probe = left.with(pt.stat);
        let ls = score(sf, &left_probe, &right)?;
        let right_probe = right.with(pt.stat);
        let rs = score(sf, &left, &right_probe)?;
        if ls > rs {
            left = left_probe;
            assignment.push(Side::Left);
        } else {
            right = right_probe;
            assignment.push(Side::Right);
        }
    }
    let final_score = score(sf, &left, &right)?;
    Ok((assignment, final_score))
}

/// Score of one fixed assignment, evaluated with the same incremental
/// machinery the greedy solver uses.
pub fn assignment_score<S: Scalar>(
    delta: &[UncertainPoint<S>],
    sides: &[Side],
    base_left: &ScoreStats<S>,
    base_right: &ScoreStats<S>,
    sf: ScoreFunction<S>,
) -> Result<S> {
    let mut left = base_left.clone();
    let mut right = base_right.clone();
    for (pt, side) in delta.iter().zip(sides) {
        match side {
            Side::Left => left.add(pt.stat),
            Side::Right => right.add(pt.stat),
        }
    }
    score(sf, &left, &right)
}

pub const DEFAULT_BRUTE_FORCE_LIMIT: usize = 20;

/// Exact maximum of the post-split score over all `2^|delta|` assignments.
/// Ties resolve to the lexicographically smallest assignment (left < right).
pub fn brute_force_assign<S: Scalar>(
    delta: &[UncertainPoint<S>],
    base_left: &ScoreStats<S>,
    base_right: &ScoreStats<S>,
    sf: ScoreFunction<S>,
    limit: usize,
) -> Result<(Vec<Side>, S)> {
    let k = delta.len();
    if k > limit {
        return Err(Error::BruteForceLimit { size: k, limit });
    }
    let mut best_score: Option<S> = None;
    let mut best_sides: Vec<Side> = Vec::new();
    for mask in 0u64..(1u64 << k) {
        let sides: Vec<Side> = (0..k)
            .map(|i| {
                if mask >> i & 1 == 0 {
                    Side::Left
                } else {
                    Side::Right
                }
            })
            .collect();
        let s = assignment_score(delta, &sides, base_left, base_right, sf)?;
        let better = match best_score {
            None => true,
            Some(b) => s > b || (s == b && sides < best_sides),
        };
        if better {
            best_score = Some(s);
            best_sides = sides;
        }
    }
    Ok((best_sides, best_score.expect("at least the empty mask was evaluated")))
}

/// Source of per-point statistics for the split search.
#[derive(Clone, Copy, Debug)]
pub enum StatSource<'a, S> {
    /// Class labels straight from the dataset (Gini / entropy).
    Labels,
    /// First/second-order gradients indexed by dataset point id (XgbLoss).
    Gradients { g: &'a [S], h: &'a [S] },
}

/// Everything a node split search needs.
#[derive(Clone, Copy)]
pub struct SplitInput<'a, S> {
    pub dataset: &'a Dataset<S>,
    pub point_ids: &'a [u32],
    pub source: StatSource<'a, S>,
    pub score_fn: ScoreFunction<S>,
    pub min_samples_leaf: usize,
    /// Model prediction score per dataset point id, for conditioned constraints.
    pub score_ctx: Option<&'a [S]>,
}

impl<'a, S: Scalar> SplitInput<'a, S> {
    fn stat_of(&self, id: u32) -> PointStat<S> {
        match self.source {
            StatSource::Labels => PointStat::Label(self.dataset.point(id as usize).label),
            StatSource::Gradients { g, h } => PointStat::Grad {
                g: g[id as usize],
                h: h[id as usize],
            },
        }
    }

    fn empty_stats(&self) -> ScoreStats<S> {
        match self.source {
            StatSource::Labels => ScoreStats::empty_counts(),
            StatSource::Gradients { .. } => ScoreStats::empty_grad(),
        }
    }

    fn validate(&self) -> Result<()> {
        let wants = self.score_fn.wants_gradients();
        let has = matches!(self.source, StatSource::Gradients { .. });
        if wants != has {
            return Err(Error::InvalidArgument(
                "score function and point-statistic source disagree (XgbLoss needs gradients, \
                 impurity scores need labels)"
                    .into(),
            ));
        }
        Ok(())
    }
}

/// Chosen split: feature, threshold, robust gain, and the adversarial
/// assignment of the uncertain set behind that gain.
#[derive(Clone, Debug, PartialEq)]
pub struct SplitDecision<S> {
    pub feature: usize,
    pub threshold: S,
    pub gain: S,
    pub assignment: Vec<(u32, Side)>,
}

struct FeatureBest<S> {
    feature: usize,
    threshold: S,
    gain: S,
    assignment: Vec<(u32, Side)>,
}

/// `(gain desc, feature asc, threshold asc)`: deterministic regardless of
/// parallel evaluation order.
fn better<S: Scalar>(a: &FeatureBest<S>, b: &FeatureBest<S>) -> bool {
    if a.gain != b.gain {
        return a.gain > b.gain;
    }
    if a.feature != b.feature {
        return a.feature < b.feature;
    }
    a.threshold < b.threshold
}

fn sorted_column<S: Scalar>(ds: &Dataset<S>, ids: &[u32], feature: usize) -> Vec<(S, u32)> {
    let mut col: Vec<(S, u32)> = ids
        .iter()
        .map(|&id| (ds.point(id as usize).features[feature], id))
        .collect();
    col.sort_by(|a, b| {
        a.0.partial_cmp(&b.0)
            .expect("feature values must not be NaN")
            .then(a.1.cmp(&b.1))
    });
    col
}

fn column_stats<S: Scalar>(input: &SplitInput<S>, col: &[(S, u32)]) -> ScoreStats<S> {
    let mut stats = input.empty_stats();
    for &(_, id) in col {
        stats.add(input.stat_of(id));
    }
    stats
}

/// Best split ignoring perturbations: plain sorted sweep over midpoint
/// candidates. Returns `None` when no candidate has positive gain.
pub fn best_regular_split<S: Scalar>(
    input: &SplitInput<S>,
    features: &[usize],
) -> Result<Option<SplitDecision<S>>> {
    input.validate()?;
    let m = input.point_ids.len();
    if m < 2 || features.is_empty() {
        return Ok(None);
    }
    let penalty = input.score_fn.gain_penalty();

    let per_feature: Vec<Option<FeatureBest<S>>> = features
        .par_iter()
        .map(|&j| {
            let col = sorted_column(input.dataset, input.point_ids, j);
            let parent = node_score(input.score_fn, &column_stats(input, &col))
                .expect("node is nonempty");
            let mut left = input.empty_stats();
            let mut right = column_stats(input, &col);
            let mut best: Option<FeatureBest<S>> = None;
            for i in 1..m {
                let stat = input.stat_of(col[i - 1].1);
                left.add(stat);
                right.remove(stat);
                if col[i].0 == col[i - 1].0 {
                    continue;
                }
                if i < input.min_samples_leaf || m - i < input.min_samples_leaf {
                    continue;
                }
                let eta = (col[i - 1].0 + col[i].0) * S::cast_from(0.5);
                let after = score(input.score_fn, &left, &right).expect("children nonempty");
                let gain = parent - after - penalty;
                let cand = FeatureBest {
                    feature: j,
                    threshold: eta,
                    gain,
                    assignment: Vec::new(),
                };
                if best.as_ref().map_or(true, |b| better(&cand, b)) {
                    best = Some(cand);
                }
            }
            best
        })
        .collect();

    Ok(reduce_best(per_feature))
}

/// Best robust split under `constraint` (Algorithm 1 with the greedy inner
/// solver). With an all-zero constraint this reproduces
/// [`best_regular_split`] decision-for-decision.
pub fn best_robust_split<S: Scalar>(
    input: &SplitInput<S>,
    features: &[usize],
    constraint: &CostConstraint<S>,
) -> Result<Option<SplitDecision<S>>> {
    input.validate()?;
    constraint.check_dimension(input.dataset.d())?;
    if constraint.needs_score() && input.score_ctx.is_none() {
        return Err(Error::MissingScoreContext);
    }
    let m = input.point_ids.len();
    if m < 2 || features.is_empty() {
        return Ok(None);
    }
    let penalty = input.score_fn.gain_penalty();

    let per_feature: Vec<Result<Option<FeatureBest<S>>>> = features
        .par_iter()
        .map(|&j| robust_feature_best(input, j, constraint, penalty))
        .collect();
    let per_feature = per_feature.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(reduce_best(per_feature))
}

fn robust_feature_best<S: Scalar>(
    input: &SplitInput<S>,
    feature: usize,
    constraint: &CostConstraint<S>,
    penalty: S,
) -> Result<Option<FeatureBest<S>>> {
    let m = input.point_ids.len();
    let col = sorted_column(input.dataset, input.point_ids, feature);
    let parent = node_score(input.score_fn, &column_stats(input, &col))?;

    let mut intervals: Vec<PerturbationInterval<S>> = Vec::with_capacity(m);
    for &(_, id) in &col {
        let ctx = input.score_ctx.map(|s| s[id as usize]);
        intervals.push(constraint.interval_for(input.dataset.point(id as usize), feature, ctx)?);
    }

    // Positions ordered by interval endpoint; as the threshold sweeps up, a
    // point leaves the certain-right set when eta passes its lower endpoint
    // and joins the certain-left set when eta passes its upper endpoint.
    let mut by_lo: Vec<u32> = (0..m as u32).collect();
    by_lo.sort_by(|&a, &b| {
        intervals[a as usize]
            .lo
            .partial_cmp(&intervals[b as usize].lo)
            .expect("interval endpoints must not be NaN")
            .then(col[a as usize].1.cmp(&col[b as usize].1))
    });
    let mut by_hi: Vec<u32> = (0..m as u32).collect();
    by_hi.sort_by(|&a, &b| {
        intervals[a as usize]
            .hi
            .partial_cmp(&intervals[b as usize].hi)
            .expect("interval endpoints must not be NaN")
            .then(col[a as usize].1.cmp(&col[b as usize].1))
    });

    let mut right_certain = column_stats(input, &col);
    let mut left_certain = input.empty_stats();
    let mut uncertain: BTreeSet<u32> = BTreeSet::new();
    let mut lo_ptr = 0usize;
    let mut hi_ptr = 0usize;
    let mut delta_buf: Vec<UncertainPoint<S>> = Vec::new();
    let mut best: Option<FeatureBest<S>> = None;

    for i in 1..m {
        if col[i].0 == col[i - 1].0 {
            continue;
        }
        let eta = (col[i - 1].0 + col[i].0) * S::cast_from(0.5);
        while lo_ptr < m {
            let pos = by_lo[lo_ptr];
            if intervals[pos as usize].lo >= eta {
                break;
            }
            right_certain.remove(input.stat_of(col[pos as usize].1));
            uncertain.insert(pos);
            lo_ptr += 1;
        }
        while hi_ptr < m {
            let pos = by_hi[hi_ptr];
            if intervals[pos as usize].hi >= eta {
                break;
            }
            uncertain.remove(&pos);
            left_certain.add(input.stat_of(col[pos as usize].1));
            hi_ptr += 1;
        }
        if i < input.min_samples_leaf || m - i < input.min_samples_leaf {
            continue;
        }
        delta_buf.clear();
        delta_buf.extend(uncertain.iter().map(|&pos| UncertainPoint {
            id: col[pos as usize].1,
            stat: input.stat_of(col[pos as usize].1),
        }));
        let (mut sides, greedy_score) = greedy_assign(
            &delta_buf,
            left_certain.clone(),
            right_certain.clone(),
            input.score_fn,
        )?;
        // The natural (physical-side) assignment is feasible for the
        // adversary, so it floors the inner maximum; the greedy pass can
        // land below it for gradient-sum scores where contributions cancel.
        let natural_sides: Vec<Side> = uncertain
            .iter()
            .map(|&pos| {
                if col[pos as usize].0 < eta {
                    Side::Left
                } else {
                    Side::Right
                }
            })
            .collect();
        let natural_score = assignment_score(
            &delta_buf,
            &natural_sides,
            &left_certain,
            &right_certain,
            input.score_fn,
        )?;
        let worst = if natural_score > greedy_score {
            sides = natural_sides;
            natural_score
        } else {
            greedy_score
        };
        let gain = parent - worst - penalty;
        let improves = match &best {
            None => true,
            Some(b) => gain > b.gain || (gain == b.gain && eta < b.threshold),
        };
        if improves {
            best = Some(FeatureBest {
                feature,
                threshold: eta,
                gain,
                assignment: delta_buf
                    .iter()
                    .map(|p| p.id)
                    .zip(sides.iter().copied())
                    .collect(),
            });
        }
    }
    Ok(best)
}

fn reduce_best<S: Scalar>(per_feature: Vec<Option<FeatureBest<S>>>) -> Option<SplitDecision<S>> {
    let mut best: Option<FeatureBest<S>> = None;
    for cand in per_feature.into_iter().flatten() {
        if best.as_ref().map_or(true, |b| better(&cand, b)) {
            best = Some(cand);
        }
    }
    let b = best?;
    if b.gain <= S::zero() {
        return None;
    }
    Some(SplitDecision {
        feature: b.feature,
        threshold: b.threshold,
        gain: b.gain,
        assignment: b.assignment,
    })
}

// ---------------------------------------------------------------------------
// Oracle instance sampling (greedy vs brute force), shared by the
// `oracle-compare` subcommand and the acceptance suite.
// ---------------------------------------------------------------------------

/// One sampled (node, feature, threshold) instance with the greedy and
/// exact inner-solver scores.
#[derive(Clone, Debug)]
pub struct OracleInstance<S> {
    pub feature: usize,
    pub threshold: S,
    pub delta_size: usize,
    pub greedy_score: S,
    pub optimal_score: S,
    /// Score of the natural (physical-side) assignment, evaluated with the
    /// same incremental machinery.
    pub natural_score: S,
    pub parent_score: S,
}

impl<S: Scalar> OracleInstance<S> {
    pub fn greedy_equals_optimal(&self) -> bool {
        self.greedy_score == self.optimal_score
    }
}

/// Sample split instances from `ds` and solve each inner problem with both
/// the greedy heuristic and the exhaustive oracle. Instances whose uncertain
/// set is empty or larger than `max_delta` are skipped.
pub fn sample_oracle_instances<S: Scalar>(
    ds: &Dataset<S>,
    constraint: &CostConstraint<S>,
    sf: ScoreFunction<S>,
    samples: usize,
    max_delta: usize,
    seed: u64,
) -> Result<Vec<OracleInstance<S>>> {
    if constraint.needs_score() {
        return Err(Error::MissingScoreContext);
    }
    constraint.check_dimension(ds.d())?;
    let n = ds.len();
    if n < 4 {
        return Err(Error::InvalidArgument(
            "oracle sampling needs at least 4 points".into(),
        ));
    }

    // XgbLoss instances use first-boosting-round logistic gradients.
    let (g, h): (Vec<S>, Vec<S>) = ds
        .labels()
        .map(|y| {
            let half = S::cast_from(0.5);
            let quarter = S::cast_from(0.25);
            (half - S::cast_from(y as f64), quarter)
        })
        .unzip();
    let source = if sf.wants_gradients() {
        StatSource::Gradients { g: &g, h: &h }
    } else {
        StatSource::Labels
    };
    let input_template = SplitInput {
        dataset: ds,
        point_ids: &[],
        source,
        score_fn: sf,
        min_samples_leaf: 1,
        score_ctx: None,
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(samples);
    let mut all_ids: Vec<u32> = (0..n as u32).collect();
    let max_attempts = samples.saturating_mul(200).max(1000);
    let mut attempts = 0usize;
    while out.len() < samples && attempts < max_attempts {
        attempts += 1;
        let node_size = rng.gen_range(4..=n.min(200));
        all_ids.shuffle(&mut rng);
        let node_ids = &all_ids[..node_size];
        let feature = rng.gen_range(0..ds.d());
        let col = sorted_column(ds, node_ids, feature);
        let cut = rng.gen_range(1..node_size);
        if col[cut].0 == col[cut - 1].0 {
            continue;
        }
        let eta = (col[cut - 1].0 + col[cut].0) * S::cast_from(0.5);

        let intervals = col
            .iter()
            .map(|&(_, id)| constraint.interval_for(ds.point(id as usize), feature, None))
            .collect::<Result<Vec<_>>>()?;
        let part = partition_for_threshold(&col, eta, &intervals);
        if part.uncertain.is_empty() || part.uncertain.len() > max_delta {
            continue;
        }

        let input = SplitInput {
            point_ids: node_ids,
            ..input_template
        };
        let mut base_left = input.empty_stats();
        let mut base_right = input.empty_stats();
        let mut delta = Vec::with_capacity(part.uncertain.len());
        let mut natural_sides = Vec::with_capacity(part.uncertain.len());
        for &(v, id) in &col {
            if part.uncertain.contains(&id) {
                delta.push(UncertainPoint {
                    id,
                    stat: input.stat_of(id),
                });
                natural_sides.push(if v < eta { Side::Left } else { Side::Right });
            } else if v < eta {
                base_left.add(input.stat_of(id));
            } else {
                base_right.add(input.stat_of(id));
            }
        }

        let parent_score = node_score(sf, &column_stats(&input, &col))?;
        let (_, greedy_score) = greedy_assign(&delta, base_left.clone(), base_right.clone(), sf)?;
        let (_, optimal_score) =
            brute_force_assign(&delta, &base_left, &base_right, sf, max_delta)?;
        let natural_score = assignment_score(&delta, &natural_sides, &base_left, &base_right, sf)?;
        out.push(OracleInstance {
            feature,
            threshold: eta,
            delta_size: delta.len(),
            greedy_score,
            optimal_score,
            natural_score,
            parent_score,
        });
    }
    if out.len() < samples {
        return Err(Error::InvalidArgument(format!(
            "could only sample {} of {samples} oracle instances (constraint too tight?)",
            out.len()
        )));
    }
    Ok(out)
}

/// Render oracle instances as the `oracle-compare` CSV.
pub fn oracle_instances_to_csv<S: Scalar>(rows: &[OracleInstance<S>]) -> String {
    let mut out = String::from("feature,threshold,delta_size,greedy_score,optimal_score,equal\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.feature,
            r.threshold,
            r.delta_size,
            r.greedy_score,
            r.optimal_score,
            r.greedy_equals_optimal()
        ));
    }
    out
}
