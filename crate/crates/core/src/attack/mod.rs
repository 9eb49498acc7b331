//! Minimal-cost evasion attacks against trained ensembles: an exact internal
//! attacker, an LP-file emitter for external MILP solvers, and the adaptive
//! weighted-cost objectives targeting category-derived box constraints.

pub mod exact;
pub mod milp;
pub mod space;

use std::time::Duration;

use rayon::prelude::*;

use crate::costspec::{BoxConstraint, CostCategory, CostFamily};
use crate::dataset::Dataset;
use crate::ensemble::TreeEnsembleModel;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub use exact::exact_attack;
pub use milp::{
    check_assignment, decode_assignment, emit_lp, encode_milp, lp_string, MilpConstraint,
    MilpProgram, Sense,
};
pub use space::{build_interval_space, cheapest_point_in_interval, ThresholdIntervalSpace};

/// Attack objective minimized by the adversary.
#[derive(Clone, Debug, PartialEq)]
pub enum AttackObjective<S> {
    Linf,
    L1,
    L2,
    /// Asymmetric per-feature unit costs; an infinite entry makes that
    /// direction immutable.
    Weighted { inc: Vec<S>, dec: Vec<S> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ObjectiveKind {
    Linf,
    L1,
    L2,
    Weighted,
}

impl ObjectiveKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ObjectiveKind::Linf => "linf",
            ObjectiveKind::L1 => "l1",
            ObjectiveKind::L2 => "l2",
            ObjectiveKind::Weighted => "cost",
        }
    }
}

impl<S: Scalar> AttackObjective<S> {
    pub fn kind(&self) -> ObjectiveKind {
        match self {
            AttackObjective::Linf => ObjectiveKind::Linf,
            AttackObjective::L1 => ObjectiveKind::L1,
            AttackObjective::L2 => ObjectiveKind::L2,
            AttackObjective::Weighted { .. } => ObjectiveKind::Weighted,
        }
    }

    /// `(w_inc, w_dec)` for feature `j`; 1 for the norm objectives.
    pub fn weights(&self, j: usize) -> (S, S) {
        match self {
            AttackObjective::Weighted { inc, dec } => (inc[j], dec[j]),
            _ => (S::one(), S::one()),
        }
    }

    pub fn check_dimension(&self, d: usize) -> Result<()> {
        if let AttackObjective::Weighted { inc, dec } = self {
            if inc.len() != d || dec.len() != d {
                return Err(Error::Dimension {
                    expected: d,
                    actual: inc.len().min(dec.len()),
                });
            }
            for (j, (&i, &e)) in inc.iter().zip(dec).enumerate() {
                if i < S::zero() || e < S::zero() || i.is_nan() || e.is_nan() {
                    return Err(Error::InvalidArgument(format!(
                        "attack weights must be nonnegative (feature {j}: inc={i}, dec={e})"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Total manipulation cost of moving `x` to `x_adv`.
    pub fn cost(&self, x: &[S], x_adv: &[S]) -> S {
        match self {
            AttackObjective::Linf => x
                .iter()
                .zip(x_adv)
                .map(|(&a, &b)| (b - a).abs())
                .fold(S::zero(), S::max),
            AttackObjective::L1 => x.iter().zip(x_adv).map(|(&a, &b)| (b - a).abs()).sum(),
            AttackObjective::L2 => x
                .iter()
                .zip(x_adv)
                .map(|(&a, &b)| (b - a) * (b - a))
                .sum::<S>()
                .sqrt(),
            AttackObjective::Weighted { inc, dec } => x
                .iter()
                .zip(x_adv)
                .enumerate()
                .map(|(j, (&a, &b))| {
                    let delta = b - a;
                    if delta == S::zero() {
                        S::zero()
                    } else if delta > S::zero() {
                        inc[j] * delta
                    } else {
                        dec[j] * -delta
                    }
                })
                .sum(),
        }
    }

    /// Replace infinite weights with `w` (the `--inf-weight 1e6` variant of
    /// running the attack with large finite costs instead of hard exclusion).
    pub fn substitute_infinite(&mut self, w: S) {
        if let AttackObjective::Weighted { inc, dec } = self {
            for v in inc.iter_mut().chain(dec.iter_mut()) {
                if v.is_infinite() {
                    *v = w;
                }
            }
        }
    }
}

/// Adaptive-attack weights per cost category, `(N, L, M, H)`.
pub fn family_weights<S: Scalar>(family: CostFamily) -> [S; 4] {
    let inf = S::infinity();
    match family {
        CostFamily::Cost1 => [S::one(), S::cast_from(2.0), S::cast_from(4.0), inf],
        CostFamily::Cost2 => [
            S::one(),
            S::cast_from(2.0),
            S::cast_from(3.0),
            S::cast_from(3.0),
        ],
        CostFamily::Cost3 => [S::one(), S::one(), S::cast_from(2.0), inf],
        CostFamily::Cost4 => [S::one(), S::cast_from(2.0), S::cast_from(2.0), inf],
    }
}

/// Build the adaptive weighted objective targeting a category-derived box:
/// per feature and direction, the weight of its cost category under `family`.
pub fn adaptive_weights_from_box<S: Scalar>(
    constraint: &BoxConstraint<S>,
    family: CostFamily,
) -> Result<AttackObjective<S>> {
    let categories = constraint.categories().ok_or_else(|| {
        Error::InvalidArgument(
            "adaptive weights need a category-derived box; pass explicit weights otherwise".into(),
        )
    })?;
    let w = family_weights::<S>(family);
    let of = |c: CostCategory| w[c as usize];
    let inc = categories.iter().map(|&(_, i)| of(i)).collect();
    let dec = categories.iter().map(|&(d, _)| of(d)).collect();
    Ok(AttackObjective::Weighted { inc, dec })
}

/// Node/time budget for one exact attack.
#[derive(Clone, Copy, Debug)]
pub struct AttackLimits {
    pub max_nodes: u64,
    pub time_budget: Option<Duration>,
}

impl Default for AttackLimits {
    fn default() -> Self {
        AttackLimits {
            max_nodes: 20_000_000,
            time_budget: None,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct AttackOptions<S> {
    pub cutoff: S,
    /// Open-boundary representative offset: a downward move stops this far
    /// short of the threshold (in units of the normalized feature range).
    pub delta_eps: S,
    /// Slack realizing the strict side of the mislabel inequality in the MILP.
    pub margin_slack: S,
    pub limits: AttackLimits,
}

impl<S: Scalar> Default for AttackOptions<S> {
    fn default() -> Self {
        AttackOptions {
            cutoff: S::cast_from(0.5),
            delta_eps: S::cast_from(1e-6),
            margin_slack: S::cast_from(1e-6),
            limits: AttackLimits::default(),
        }
    }
}

/// A found adversarial example and its objective value.
#[derive(Clone, Debug, PartialEq)]
pub struct AdversarialExample<S> {
    pub example: Vec<S>,
    pub objective: S,
    pub deltas: Vec<S>,
}

/// Outcome of one exact attack.
#[derive(Clone, Debug, PartialEq)]
pub enum AttackResult<S> {
    Adversarial(AdversarialExample<S>),
    /// The whole interval-product space was exhausted: no evasion exists.
    Infeasible,
    /// Node or time budget hit before the search finished.
    LimitExceeded {
        incumbent: Option<AdversarialExample<S>>,
    },
}

impl<S: Scalar> AttackResult<S> {
    pub fn status(&self) -> &'static str {
        match self {
            AttackResult::Adversarial(_) => "adversarial",
            AttackResult::Infeasible => "infeasible",
            AttackResult::LimitExceeded { .. } => "timeout",
        }
    }

    pub fn adversarial(&self) -> Option<&AdversarialExample<S>> {
        match self {
            AttackResult::Adversarial(a) => Some(a),
            _ => None,
        }
    }
}

/// One row of a batch attack.
#[derive(Clone, Debug)]
pub struct BatchRecord<S> {
    /// Index into the attacked dataset.
    pub id: usize,
    pub label: u8,
    /// Whether the clean model classified the point correctly.
    pub originally_correct: bool,
    pub result: AttackResult<S>,
    pub linf: Option<S>,
    pub l1: Option<S>,
    pub l2: Option<S>,
}

/// Attack `indices` of `data` in parallel. Per-point limit overruns are
/// recorded, not fatal.
pub fn batch_attack<S: Scalar>(
    model: &TreeEnsembleModel<S>,
    data: &Dataset<S>,
    indices: &[usize],
    objective: &AttackObjective<S>,
    opts: &AttackOptions<S>,
) -> Result<Vec<BatchRecord<S>>> {
    indices
        .par_iter()
        .map(|&id| {
            let p = data.point(id);
            let originally_correct =
                model.predict_label(&p.features, opts.cutoff)? == p.label;
            let result = exact_attack(model, &p.features, p.label, objective, opts)?;
            let (linf, l1, l2) = match result.adversarial() {
                Some(adv) => (
                    Some(AttackObjective::Linf.cost(&p.features, &adv.example)),
                    Some(AttackObjective::L1.cost(&p.features, &adv.example)),
                    Some(AttackObjective::L2.cost(&p.features, &adv.example)),
                ),
                None => (None, None, None),
            };
            Ok(BatchRecord {
                id,
                label: p.label,
                originally_correct,
                result,
                linf,
                l1,
                l2,
            })
        })
        .collect()
}

/// Render batch results as the attack-report CSV.
pub fn batch_to_csv<S: Scalar>(records: &[BatchRecord<S>]) -> String {
    let mut out = String::from("id,y,status,objective,linf,l1,l2\n");
    let field = |v: Option<S>| v.map(|v| v.to_string()).unwrap_or_default();
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.id,
            r.label,
            r.result.status(),
            field(r.result.adversarial().map(|a| a.objective)),
            field(r.linf),
            field(r.l1),
            field(r.l2),
        ));
    }
    out
}
