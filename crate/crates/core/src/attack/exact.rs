//! Exact minimal-cost evasion over the threshold-interval product space.
//!
//! Two engines share the same contract (a global minimum-cost adversarial
//! example, a proof of infeasibility, or a limit overrun):
//!
//! * **Sum objectives** (L1, L2, weighted): best-first search. A frontier
//!   node fixes the first `k` attackable features to concrete intervals and
//!   leaves the rest at their original values; its bound (the composed cost
//!   of the fixed choices) is admissible for the subtree and is the exact
//!   objective of the node's own decoded point, so the first decoded point
//!   that flips the label is optimal. Subtrees whose reachable leaves cannot
//!   flip the label are pruned.
//! * **L-infinity**: the optimum is always one of the finitely many
//!   per-(feature, interval) move costs, and feasibility within a cost
//!   budget is monotone, so the engine binary-searches that candidate list.
//!   Each feasibility probe restricts every feature to the intervals
//!   reachable within the budget and runs a depth-first search bounded by
//!   the ensemble's reachable leaf sums.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::Instant;

use crate::ensemble::{TreeEnsembleModel, TreeNode};
use crate::error::Result;
use crate::scalar::Scalar;

use super::space::{build_interval_space, cheapest_point_in_interval, ThresholdIntervalSpace};
use super::{AdversarialExample, AttackObjective, AttackOptions, AttackResult, ObjectiveKind};

/// Find a minimal-cost adversarial example against `model` for the point
/// `(x, y)`, or prove that none exists.
pub fn exact_attack<S: Scalar>(
    model: &TreeEnsembleModel<S>,
    x: &[S],
    y: u8,
    objective: &AttackObjective<S>,
    opts: &AttackOptions<S>,
) -> Result<AttackResult<S>> {
    objective.check_dimension(x.len())?;
    // trivial evasion: the model is already wrong about x
    if model.predict_label(x, opts.cutoff)? != y {
        return Ok(AttackResult::Adversarial(AdversarialExample {
            example: x.to_vec(),
            objective: S::zero(),
            deltas: vec![S::zero(); x.len()],
        }));
    }
    match objective.kind() {
        ObjectiveKind::Linf => linf_attack(model, x, y, objective, opts),
        _ => best_first_attack(model, x, y, objective, opts),
    }
}

struct FeatureChoices<S> {
    feature: usize,
    /// `(interval index, representative value, per-feature cost)`.
    options: Vec<(usize, S, S)>,
    /// Hull of every finite-cost interval: the attacker cannot leave it, no
    /// matter the budget. Infinite weights shrink it to a half-line.
    reach: (S, S),
}

fn collect_choices<S: Scalar>(
    space: &ThresholdIntervalSpace<S>,
    x: &[S],
    objective: &AttackObjective<S>,
    delta_eps: S,
) -> Vec<FeatureChoices<S>> {
    let mut features = Vec::new();
    for j in 0..space.feature_count().min(x.len()) {
        let n = space.interval_count(j);
        if n < 2 {
            continue;
        }
        let mut options: Vec<(usize, S, S)> = (0..n)
            .filter_map(|k| {
                let (value, cost) =
                    cheapest_point_in_interval(x[j], space.interval(j, k), j, objective, delta_eps);
                cost.is_finite().then_some((k, value, cost))
            })
            .collect();
        // ascending cost keeps bounds monotone along every edge of the
        // best-first enumeration tree
        options.sort_by(|a, b| {
            a.2.partial_cmp(&b.2)
                .expect("costs are finite")
                .then(a.0.cmp(&b.0))
        });
        if !options.is_empty() {
            let reach = options
                .iter()
                .map(|&(k, _, _)| space.interval(j, k))
                .fold((S::infinity(), S::neg_infinity()), |(lo, hi), iv| {
                    (lo.min(iv.lo), hi.max(iv.hi))
                });
            features.push(FeatureChoices {
                feature: j,
                options,
                reach,
            });
        }
    }
    features
}

/// Reachable value range per feature, `[lo, hi)`.
type Ranges<S> = Vec<(S, S)>;

/// Min and max ensemble tree-sum over the product of `ranges`.
fn sum_bounds<S: Scalar>(model: &TreeEnsembleModel<S>, ranges: &Ranges<S>) -> (S, S) {
    fn walk<S: Scalar>(nodes: &[TreeNode<S>], idx: usize, ranges: &Ranges<S>) -> (S, S) {
        match &nodes[idx] {
            TreeNode::Leaf { value } => (*value, *value),
            TreeNode::Internal {
                feature,
                threshold,
                left,
                right,
            } => {
                let (lo, hi) = ranges[*feature];
                let left_ok = lo < *threshold;
                let right_ok = hi > *threshold;
                match (left_ok, right_ok) {
                    (true, false) => walk(nodes, *left, ranges),
                    (false, true) => walk(nodes, *right, ranges),
                    (true, true) => {
                        let (lmin, lmax) = walk(nodes, *left, ranges);
                        let (rmin, rmax) = walk(nodes, *right, ranges);
                        (lmin.min(rmin), lmax.max(rmax))
                    }
                    (false, false) => unreachable!("ranges are nonempty"),
                }
            }
        }
    }
    let mut min = S::zero();
    let mut max = S::zero();
    for tree in model.trees() {
        let (lo, hi) = walk(&tree.nodes, 0, ranges);
        min = min + lo;
        max = max + hi;
    }
    (min, max)
}

/// Can any point within `ranges` flip the label away from `y`?
fn can_flip<S: Scalar>(model: &TreeEnsembleModel<S>, ranges: &Ranges<S>, y: u8, rhs: S) -> bool {
    let (min_sum, max_sum) = sum_bounds(model, ranges);
    if y == 0 {
        max_sum >= rhs
    } else {
        min_sum < rhs
    }
}

// ---------------------------------------------------------------------------
// Best-first engine (sum-composed objectives)
// ---------------------------------------------------------------------------

struct Node<S> {
    bound: S,
    /// `choices[i]` indexes `features[i].options`; features beyond
    /// `choices.len()` are still free.
    choices: Vec<u32>,
}

impl<S: Scalar> PartialEq for Node<S> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl<S: Scalar> Eq for Node<S> {}
impl<S: Scalar> PartialOrd for Node<S> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<S: Scalar> Ord for Node<S> {
    // BinaryHeap is a max-heap: "greatest" must be the node to pop next,
    // i.e. smallest bound, deepest, lexicographically smallest choices.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .bound
            .partial_cmp(&self.bound)
            .expect("bounds are finite")
            .then_with(|| self.choices.len().cmp(&other.choices.len()))
            .then_with(|| other.choices.cmp(&self.choices))
    }
}

fn best_first_attack<S: Scalar>(
    model: &TreeEnsembleModel<S>,
    x: &[S],
    y: u8,
    objective: &AttackObjective<S>,
    opts: &AttackOptions<S>,
) -> Result<AttackResult<S>> {
    let kind = objective.kind();
    let space = build_interval_space(model);
    let features = collect_choices(&space, x, objective, opts.delta_eps);
    let rhs = model.flip_rhs_at(opts.cutoff);

    // a free feature can never leave the hull of its finite-cost intervals
    let mut free_ranges: Ranges<S> = vec![(S::neg_infinity(), S::infinity()); x.len()];
    for fc in &features {
        free_ranges[fc.feature] = fc.reach;
    }
    let started = Instant::now();
    let mut popped: u64 = 0;
    let mut frontier: BinaryHeap<Node<S>> = BinaryHeap::new();
    frontier.push(Node {
        bound: S::zero(),
        choices: Vec::new(),
    });
    let mut scratch = x.to_vec();
    let mut ranges: Ranges<S> = free_ranges.clone();

    while let Some(node) = frontier.pop() {
        popped += 1;
        if popped > opts.limits.max_nodes
            || opts
                .limits
                .time_budget
                .is_some_and(|b| popped % 1024 == 0 && started.elapsed() > b)
        {
            return Ok(AttackResult::LimitExceeded { incumbent: None });
        }

        let k = node.choices.len();
        ranges.copy_from_slice(&free_ranges);
        for (fc, &ci) in features.iter().zip(&node.choices) {
            let iv = space.interval(fc.feature, fc.options[ci as usize].0);
            ranges[fc.feature] = (iv.lo, iv.hi);
        }
        let alive = can_flip(model, &ranges, y, rhs);

        if alive {
            scratch.copy_from_slice(x);
            for (fc, &ci) in features.iter().zip(&node.choices) {
                scratch[fc.feature] = fc.options[ci as usize].1;
            }
            if model.predict_label(&scratch, opts.cutoff)? != y {
                let deltas: Vec<S> = scratch.iter().zip(x).map(|(&a, &b)| a - b).collect();
                let objective_value = match kind {
                    ObjectiveKind::L2 => node.bound.sqrt(),
                    _ => node.bound,
                };
                return Ok(AttackResult::Adversarial(AdversarialExample {
                    example: scratch,
                    objective: objective_value,
                    deltas,
                }));
            }
            if k < features.len() {
                let mut choices = node.choices.clone();
                choices.push(0);
                let bound = sum_bound_of(&features, &choices);
                frontier.push(Node { bound, choices });
            }
        }
        // the sibling bumps this node's own last choice, so it is outside
        // this node's (possibly dead) subtree and must be generated anyway
        if k > 0 {
            let last = node.choices[k - 1] as usize;
            if last + 1 < features[k - 1].options.len() {
                let mut choices = node.choices;
                choices[k - 1] = (last + 1) as u32;
                let bound = sum_bound_of(&features, &choices);
                frontier.push(Node { bound, choices });
            }
        }
    }
    Ok(AttackResult::Infeasible)
}

fn sum_bound_of<S: Scalar>(features: &[FeatureChoices<S>], choices: &[u32]) -> S {
    features
        .iter()
        .zip(choices)
        .map(|(fc, &ci)| fc.options[ci as usize].2)
        .fold(S::zero(), |a, b| a + b)
}

// ---------------------------------------------------------------------------
// L-infinity engine (candidate-distance binary search)
// ---------------------------------------------------------------------------

fn linf_attack<S: Scalar>(
    model: &TreeEnsembleModel<S>,
    x: &[S],
    y: u8,
    objective: &AttackObjective<S>,
    opts: &AttackOptions<S>,
) -> Result<AttackResult<S>> {
    let space = build_interval_space(model);
    let features = collect_choices(&space, x, objective, opts.delta_eps);
    let rhs = model.flip_rhs_at(opts.cutoff);

    let mut candidates: Vec<S> = features
        .iter()
        .flat_map(|fc| fc.options.iter().map(|&(_, _, c)| c))
        .collect();
    candidates.push(S::zero());
    candidates.sort_by(|a, b| a.partial_cmp(b).expect("costs are finite"));
    candidates.dedup();

    let mut search = LinfSearch {
        model,
        space: &space,
        features: &features,
        x,
        y,
        rhs,
        opts,
        nodes: 0,
        started: Instant::now(),
        hit_limit: false,
    };

    // binary search the smallest feasible budget
    let mut lo = 0usize;
    let mut hi = candidates.len(); // exclusive; == len means "none feasible"
    let mut best: Option<(S, Vec<usize>)> = None;
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        match search.feasible(candidates[mid]) {
            Some(assignment) => {
                best = Some((candidates[mid], assignment));
                hi = mid;
            }
            None => {
                if search.hit_limit {
                    return Ok(AttackResult::LimitExceeded { incumbent: None });
                }
                lo = mid + 1;
            }
        }
    }

    match best {
        None => Ok(AttackResult::Infeasible),
        Some((_, assignment)) => {
            let mut example = x.to_vec();
            for (fc, &k) in features.iter().zip(&assignment) {
                let (value, _) = cheapest_point_in_interval(
                    x[fc.feature],
                    space.interval(fc.feature, k),
                    fc.feature,
                    objective,
                    opts.delta_eps,
                );
                example[fc.feature] = value;
            }
            debug_assert_ne!(model.predict_label(&example, opts.cutoff)?, y);
            let deltas: Vec<S> = example.iter().zip(x).map(|(&a, &b)| a - b).collect();
            let objective_value = AttackObjective::Linf.cost(x, &example);
            Ok(AttackResult::Adversarial(AdversarialExample {
                example,
                objective: objective_value,
                deltas,
            }))
        }
    }
}

struct LinfSearch<'a, S: Scalar> {
    model: &'a TreeEnsembleModel<S>,
    space: &'a ThresholdIntervalSpace<S>,
    features: &'a [FeatureChoices<S>],
    x: &'a [S],
    y: u8,
    rhs: S,
    opts: &'a AttackOptions<S>,
    nodes: u64,
    started: Instant,
    hit_limit: bool,
}

impl<'a, S: Scalar> LinfSearch<'a, S> {
    /// Interval assignment (per attackable feature) evading within `budget`,
    /// if one exists. `None` either proves infeasibility at this budget or
    /// reports a limit overrun via `hit_limit`.
    fn feasible(&mut self, budget: S) -> Option<Vec<usize>> {
        // contiguous allowed interval range per attackable feature
        let allowed: Vec<(usize, usize)> = self
            .features
            .iter()
            .map(|fc| {
                let ks: Vec<usize> = fc
                    .options
                    .iter()
                    .filter(|&&(_, _, c)| c <= budget)
                    .map(|&(k, _, _)| k)
                    .collect();
                (
                    ks.iter().copied().min().expect("home interval costs 0"),
                    ks.iter().copied().max().expect("home interval costs 0"),
                )
            })
            .collect();
        let mut ranges: Ranges<S> = vec![(S::neg_infinity(), S::infinity()); self.x.len()];
        for (fc, &(klo, khi)) in self.features.iter().zip(&allowed) {
            ranges[fc.feature] = (
                self.space.interval(fc.feature, klo).lo,
                self.space.interval(fc.feature, khi).hi,
            );
        }
        let mut assignment = vec![0usize; self.features.len()];
        self.dfs(0, &allowed, &mut ranges, &mut assignment)
            .then_some(assignment)
    }

    fn dfs(
        &mut self,
        depth: usize,
        allowed: &[(usize, usize)],
        ranges: &mut Ranges<S>,
        assignment: &mut Vec<usize>,
    ) -> bool {
        self.nodes += 1;
        if self.nodes > self.opts.limits.max_nodes
            || self
                .opts
                .limits
                .time_budget
                .is_some_and(|b| self.nodes % 1024 == 0 && self.started.elapsed() > b)
        {
            self.hit_limit = true;
            return false;
        }
        if !can_flip(self.model, ranges, self.y, self.rhs) {
            return false;
        }
        if depth == self.features.len() {
            // every range is a single interval: the bound check was exact
            return true;
        }
        let feature = self.features[depth].feature;
        let (klo, khi) = allowed[depth];
        let saved = ranges[feature];
        for k in klo..=khi {
            let iv = self.space.interval(feature, k);
            ranges[feature] = (iv.lo, iv.hi);
            assignment[depth] = k;
            if self.dfs(depth + 1, allowed, ranges, assignment) {
                ranges[feature] = saved;
                return true;
            }
            if self.hit_limit {
                break;
            }
        }
        ranges[feature] = saved;
        false
    }
}
