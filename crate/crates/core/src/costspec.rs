//! Attack cost-driven constraints: per-feature, per-direction perturbation
//! models and the uncertain-set partition used by robust split search.
//!
//! Two constraint shapes are supported:
//!
//! * **Box**: each feature `j` may move inside `[x^j - l_j, x^j + h_j]`.
//!   The bounds can be spelled out directly, uniformly (`l = h = epsilon`,
//!   the L-infinity cost model), or derived from cost categories
//!   (negligible/low/medium/high mapped to variables `alpha > beta > gamma > mu`).
//! * **Conditioned**: an ordered rule list keyed on the point's label and
//!   optionally on the current model prediction score.
//!
//! Intervals are never clipped to `[0, 1]`; only the position of a value
//! relative to split thresholds matters.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dataset::DataPoint;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Relative cost of manipulating a feature in one direction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CostCategory {
    Negligible,
    Low,
    Medium,
    High,
}

/// Allowance variables for the four categories. Must satisfy
/// `mu <= gamma <= beta <= alpha` (ties merge adjacent categories).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostVariables<S> {
    pub alpha: S,
    pub beta: S,
    pub gamma: S,
    pub mu: S,
}

impl<S: Scalar> CostVariables<S> {
    pub fn allowance(&self, c: CostCategory) -> S {
        match c {
            CostCategory::Negligible => self.alpha,
            CostCategory::Low => self.beta,
            CostCategory::Medium => self.gamma,
            CostCategory::High => self.mu,
        }
    }

    fn validate(&self) -> Result<()> {
        let pairs = [
            ("mu", self.mu, "gamma", self.gamma),
            ("gamma", self.gamma, "beta", self.beta),
            ("beta", self.beta, "alpha", self.alpha),
        ];
        for (lo_name, lo, hi_name, hi) in pairs {
            if lo > hi {
                return Err(Error::CostOrdering(format!(
                    "{lo_name} ({lo}) must not exceed {hi_name} ({hi})"
                )));
            }
        }
        if self.mu < S::zero() {
            return Err(Error::CostOrdering(format!(
                "mu ({}) must be nonnegative",
                self.mu
            )));
        }
        Ok(())
    }
}

/// Adaptive-attack objective family associated with a category-derived box.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CostFamily {
    Cost1,
    Cost2,
    Cost3,
    Cost4,
}

/// Reachable range of one feature for one point; always contains the
/// original value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PerturbationInterval<S> {
    pub lo: S,
    pub hi: S,
}

impl<S: Scalar> PerturbationInterval<S> {
    pub fn around(x: S, dec: S, inc: S) -> Self {
        PerturbationInterval {
            lo: x - dec,
            hi: x + inc,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum BoxBounds<S> {
    Uniform { dec: S, inc: S },
    PerFeature { dec: Vec<S>, inc: Vec<S> },
}

/// Per-feature, per-direction perturbation allowances.
#[derive(Clone, Debug, PartialEq)]
pub struct BoxConstraint<S> {
    bounds: BoxBounds<S>,
    categories: Option<Vec<(CostCategory, CostCategory)>>, // (decrease, increase)
    variables: Option<CostVariables<S>>,
    pub family: Option<CostFamily>,
    pub feature_names: Option<Vec<String>>,
}

impl<S: Scalar> BoxConstraint<S> {
    /// Uniform box `l_j = h_j = epsilon`: the L-infinity cost model.
    pub fn uniform(epsilon: S) -> Self {
        BoxConstraint {
            bounds: BoxBounds::Uniform {
                dec: epsilon,
                inc: epsilon,
            },
            categories: None,
            variables: None,
            family: None,
            feature_names: None,
        }
    }

    pub fn zero() -> Self {
        Self::uniform(S::zero())
    }

    /// Explicit per-feature allowances (`dec[j]` = max decrease, `inc[j]` = max increase).
    pub fn per_feature(dec: Vec<S>, inc: Vec<S>) -> Result<Self> {
        if dec.len() != inc.len() {
            return Err(Error::Dimension {
                expected: dec.len(),
                actual: inc.len(),
            });
        }
        for (j, (&l, &h)) in dec.iter().zip(&inc).enumerate() {
            if l < S::zero() || h < S::zero() {
                return Err(Error::Config(format!(
                    "feature {j}: allowances must be nonnegative (l={l}, h={h})"
                )));
            }
        }
        Ok(BoxConstraint {
            bounds: BoxBounds::PerFeature { dec, inc },
            categories: None,
            variables: None,
            family: None,
            feature_names: None,
        })
    }

    /// Derive allowances from per-feature (decrease, increase) cost categories.
    pub fn from_categories(
        categories: Vec<(CostCategory, CostCategory)>,
        variables: CostVariables<S>,
    ) -> Result<Self> {
        variables.validate()?;
        let dec = categories
            .iter()
            .map(|&(d, _)| variables.allowance(d))
            .collect();
        let inc = categories
            .iter()
            .map(|&(_, i)| variables.allowance(i))
            .collect();
        Ok(BoxConstraint {
            bounds: BoxBounds::PerFeature { dec, inc },
            categories: Some(categories),
            variables: Some(variables),
            family: None,
            feature_names: None,
        })
    }

    pub fn categories(&self) -> Option<&[(CostCategory, CostCategory)]> {
        self.categories.as_deref()
    }

    pub fn variables(&self) -> Option<&CostVariables<S>> {
        self.variables.as_ref()
    }

    /// Allowed (decrease, increase) for feature `j`.
    pub fn allowances(&self, j: usize) -> (S, S) {
        match &self.bounds {
            BoxBounds::Uniform { dec, inc } => (*dec, *inc),
            BoxBounds::PerFeature { dec, inc } => (dec[j], inc[j]),
        }
    }

    /// Number of features the box is bound to, if it is per-feature.
    pub fn dimension(&self) -> Option<usize> {
        match &self.bounds {
            BoxBounds::Uniform { .. } => None,
            BoxBounds::PerFeature { dec, .. } => Some(dec.len()),
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.bounds {
            BoxBounds::Uniform { dec, inc } => dec.is_zero() && inc.is_zero(),
            BoxBounds::PerFeature { dec, inc } => {
                dec.iter().all(|v| v.is_zero()) && inc.iter().all(|v| v.is_zero())
            }
        }
    }
}

/// Which points a conditioned rule applies to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LabelGuard {
    Benign,
    Malicious,
    Any,
}

impl LabelGuard {
    fn matches(self, label: u8) -> bool {
        match self {
            LabelGuard::Benign => label == 0,
            LabelGuard::Malicious => label == 1,
            LabelGuard::Any => true,
        }
    }
}

/// Optional predicate on the current model prediction score.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ScoreGuard<S> {
    GreaterThan(S),
    AtMost(S),
}

impl<S: Scalar> ScoreGuard<S> {
    fn matches(&self, score: S) -> bool {
        match *self {
            ScoreGuard::GreaterThan(t) => score > t,
            ScoreGuard::AtMost(t) => score <= t,
        }
    }
}

/// Interval produced when a rule fires.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RuleAction<S> {
    /// `[x - dec, x + inc]`; zero on both sides pins the feature.
    Allowance { dec: S, inc: S },
    /// Absolute endpoints, extended to contain the current value. A missing
    /// endpoint means "no movement on that side": `hi: 1, lo: none` is
    /// `[x, 1]`.
    Absolute { lo: Option<S>, hi: Option<S> },
    /// Endpoints relative to the value: `[x*(1-dec), x*(1+inc)]`.
    Relative { dec: S, inc: S },
}

impl<S: Scalar> RuleAction<S> {
    fn interval(&self, x: S) -> PerturbationInterval<S> {
        match *self {
            RuleAction::Allowance { dec, inc } => PerturbationInterval::around(x, dec, inc),
            RuleAction::Absolute { lo, hi } => PerturbationInterval {
                lo: lo.map_or(x, |l| l.min(x)),
                hi: hi.map_or(x, |h| h.max(x)),
            },
            RuleAction::Relative { dec, inc } => PerturbationInterval {
                lo: x * (S::one() - dec),
                hi: x * (S::one() + inc),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConditionRule<S> {
    pub label: LabelGuard,
    pub score: Option<ScoreGuard<S>>,
    pub action: RuleAction<S>,
}

/// Ordered, total rule list: the first matching rule decides the interval.
#[derive(Clone, Debug, PartialEq)]
pub struct ConditionedConstraint<S> {
    rules: Vec<ConditionRule<S>>,
}

impl<S: Scalar> ConditionedConstraint<S> {
    pub fn new(rules: Vec<ConditionRule<S>>) -> Result<Self> {
        let last = rules
            .last()
            .ok_or_else(|| Error::Config("conditioned constraint needs at least one rule".into()))?;
        if last.label != LabelGuard::Any || last.score.is_some() {
            return Err(Error::Config(
                "last conditioned rule must be a default (label \"any\", no score guard)".into(),
            ));
        }
        Ok(ConditionedConstraint { rules })
    }

    pub fn rules(&self) -> &[ConditionRule<S>] {
        &self.rules
    }

    fn needs_score(&self) -> bool {
        self.rules.iter().any(|r| r.score.is_some())
    }

    fn interval(&self, label: u8, x: S, score: Option<S>) -> Result<PerturbationInterval<S>> {
        for rule in &self.rules {
            if !rule.label.matches(label) {
                continue;
            }
            match (&rule.score, score) {
                (None, _) => return Ok(rule.action.interval(x)),
                (Some(g), Some(s)) => {
                    if g.matches(s) {
                        return Ok(rule.action.interval(x));
                    }
                }
                (Some(_), None) => return Err(Error::MissingScoreContext),
            }
        }
        unreachable!("rule list is validated to be total")
    }
}

/// Any cost-driven constraint usable by the robust splitter and the attacks.
#[derive(Clone, Debug, PartialEq)]
pub enum CostConstraint<S> {
    Box(BoxConstraint<S>),
    Conditioned(ConditionedConstraint<S>),
}

impl<S: Scalar> CostConstraint<S> {
    pub fn uniform_box(epsilon: S) -> Self {
        CostConstraint::Box(BoxConstraint::uniform(epsilon))
    }

    pub fn zero() -> Self {
        CostConstraint::Box(BoxConstraint::zero())
    }

    pub fn as_box(&self) -> Option<&BoxConstraint<S>> {
        match self {
            CostConstraint::Box(b) => Some(b),
            CostConstraint::Conditioned(_) => None,
        }
    }

    /// True when some rule inspects the model prediction score, in which case
    /// [`CostConstraint::interval_for`] must receive a score context.
    pub fn needs_score(&self) -> bool {
        match self {
            CostConstraint::Box(_) => false,
            CostConstraint::Conditioned(c) => c.needs_score(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            CostConstraint::Box(b) => b.is_zero(),
            CostConstraint::Conditioned(_) => false,
        }
    }

    /// Check compatibility with a `d`-dimensional dataset.
    pub fn check_dimension(&self, d: usize) -> Result<()> {
        if let CostConstraint::Box(b) = self {
            if let Some(bd) = b.dimension() {
                if bd != d {
                    return Err(Error::Dimension {
                        expected: bd,
                        actual: d,
                    });
                }
            }
        }
        Ok(())
    }

    /// Reachable interval of feature `j` for `point`, given the optional
    /// model-score context.
    pub fn interval_for(
        &self,
        point: &DataPoint<S>,
        j: usize,
        ctx: Option<S>,
    ) -> Result<PerturbationInterval<S>> {
        let x = point.features[j];
        match self {
            CostConstraint::Box(b) => {
                let (dec, inc) = b.allowances(j);
                Ok(PerturbationInterval::around(x, dec, inc))
            }
            CostConstraint::Conditioned(c) => c.interval(point.label, x, ctx),
        }
    }
}

/// Split of a node's points at threshold `eta` into certain-left,
/// certain-right, and the uncertain set that can cross the threshold.
#[derive(Clone, Debug, PartialEq)]
pub struct ThresholdPartition {
    pub left_certain: Vec<u32>,
    pub right_certain: Vec<u32>,
    pub uncertain: Vec<u32>,
}

/// Partition a sorted feature column at `eta`.
///
/// `column` holds `(value, point_id)` sorted ascending; `intervals[k]` is the
/// perturbation interval of `column[k]`. Convention: `x < eta` goes left; a
/// left point is uncertain iff `hi >= eta`, a right point iff `lo < eta`.
/// With zero allowances the uncertain set is empty for every threshold.
pub fn partition_for_threshold<S: Scalar>(
    column: &[(S, u32)],
    eta: S,
    intervals: &[PerturbationInterval<S>],
) -> ThresholdPartition {
    debug_assert_eq!(column.len(), intervals.len());
    let mut part = ThresholdPartition {
        left_certain: Vec::new(),
        right_certain: Vec::new(),
        uncertain: Vec::new(),
    };
    for ((value, id), iv) in column.iter().zip(intervals) {
        if *value < eta {
            if iv.hi >= eta {
                part.uncertain.push(*id);
            } else {
                part.left_certain.push(*id);
            }
        } else if iv.lo < eta {
            part.uncertain.push(*id);
        } else {
            part.right_certain.push(*id);
        }
    }
    part
}

// ---------------------------------------------------------------------------
// JSON config (schema 1)
// ---------------------------------------------------------------------------

#[derive(Debug, Serialize, Deserialize)]
struct ConfigFile {
    schema: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    family: Option<CostFamily>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    variables: Option<CostVariables<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    r#box: Option<UniformBoxConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    features: Option<Vec<FeatureConfig>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    rules: Option<Vec<RuleConfig>>,
}

#[derive(Debug, Serialize, Deserialize)]
struct UniformBoxConfig {
    epsilon: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct FeatureConfig {
    name: String,
    #[serde(default)]
    decrease: Option<CostCategory>,
    #[serde(default)]
    increase: Option<CostCategory>,
    #[serde(default)]
    l: Option<f64>,
    #[serde(default)]
    h: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct RuleConfig {
    label: LabelGuard,
    #[serde(default)]
    score_gt: Option<f64>,
    #[serde(default)]
    score_le: Option<f64>,
    #[serde(default)]
    allowance: Option<AllowanceConfig>,
    #[serde(default)]
    absolute: Option<AbsoluteConfig>,
    #[serde(default)]
    relative: Option<AllowanceConfig>,
}

#[derive(Debug, Serialize, Deserialize)]
struct AllowanceConfig {
    dec: f64,
    inc: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct AbsoluteConfig {
    #[serde(default)]
    lo: Option<f64>,
    #[serde(default)]
    hi: Option<f64>,
}

/// Load a cost-config JSON document (schema 1). See `docs/formats.md` for the
/// schema; bundled presets live under `presets/`.
pub fn load_cost_config<S: Scalar>(path: impl AsRef<Path>) -> Result<CostConstraint<S>> {
    let text = fs::read_to_string(path.as_ref())?;
    parse_cost_config(&text)
}

/// Parse a cost-config JSON document from a string.
pub fn parse_cost_config<S: Scalar>(text: &str) -> Result<CostConstraint<S>> {
    let cfg: ConfigFile = serde_json::from_str(text)?;
    if cfg.schema != 1 {
        return Err(Error::SchemaVersion {
            expected: 1,
            found: cfg.schema,
        });
    }

    if let Some(rules) = cfg.rules {
        let rules = rules
            .into_iter()
            .map(parse_rule::<S>)
            .collect::<Result<Vec<_>>>()?;
        return Ok(CostConstraint::Conditioned(ConditionedConstraint::new(
            rules,
        )?));
    }

    if let Some(ub) = cfg.r#box {
        if ub.epsilon < 0.0 {
            return Err(Error::Config(format!(
                "box epsilon must be nonnegative, got {}",
                ub.epsilon
            )));
        }
        return Ok(CostConstraint::Box(BoxConstraint::uniform(S::cast_from(
            ub.epsilon,
        ))));
    }

    let features = cfg.features.ok_or_else(|| {
        Error::Config("config needs one of `box`, `features`, or `rules`".into())
    })?;
    let mut names = Vec::with_capacity(features.len());
    for f in &features {
        if names.contains(&f.name) {
            return Err(Error::Config(format!("duplicate feature name `{}`", f.name)));
        }
        names.push(f.name.clone());
    }

    let categorical = features.iter().all(|f| f.decrease.is_some() && f.increase.is_some());
    let explicit = features.iter().all(|f| f.l.is_some() && f.h.is_some());
    let mut bx = if categorical {
        let variables = cfg
            .variables
            .ok_or_else(|| Error::Config("category-based config needs `variables`".into()))?;
        let vars = CostVariables {
            alpha: S::cast_from(variables.alpha),
            beta: S::cast_from(variables.beta),
            gamma: S::cast_from(variables.gamma),
            mu: S::cast_from(variables.mu),
        };
        let cats = features
            .iter()
            .map(|f| (f.decrease.unwrap(), f.increase.unwrap()))
            .collect();
        BoxConstraint::from_categories(cats, vars)?
    } else if explicit {
        let dec = features.iter().map(|f| S::cast_from(f.l.unwrap())).collect();
        let inc = features.iter().map(|f| S::cast_from(f.h.unwrap())).collect();
        BoxConstraint::per_feature(dec, inc)?
    } else {
        return Err(Error::Config(
            "every feature needs either categories (`decrease`/`increase`) or explicit `l`/`h`"
                .into(),
        ));
    };
    bx.family = cfg.family;
    bx.feature_names = Some(names);
    Ok(CostConstraint::Box(bx))
}

fn parse_rule<S: Scalar>(rc: RuleConfig) -> Result<ConditionRule<S>> {
    let score = match (rc.score_gt, rc.score_le) {
        (Some(_), Some(_)) => {
            return Err(Error::Config(
                "rule may use at most one of `score_gt`/`score_le`".into(),
            ))
        }
        (Some(t), None) => Some(ScoreGuard::GreaterThan(S::cast_from(t))),
        (None, Some(t)) => Some(ScoreGuard::AtMost(S::cast_from(t))),
        (None, None) => None,
    };
    let action = match (rc.allowance, rc.absolute, rc.relative) {
        (Some(a), None, None) => RuleAction::Allowance {
            dec: S::cast_from(a.dec),
            inc: S::cast_from(a.inc),
        },
        (None, Some(a), None) => RuleAction::Absolute {
            lo: a.lo.map(S::cast_from),
            hi: a.hi.map(S::cast_from),
        },
        (None, None, Some(a)) => RuleAction::Relative {
            dec: S::cast_from(a.dec),
            inc: S::cast_from(a.inc),
        },
        _ => {
            return Err(Error::Config(
                "rule needs exactly one of `allowance`, `absolute`, `relative`".into(),
            ))
        }
    };
    Ok(ConditionRule {
        label: rc.label,
        score,
        action,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn point(features: Vec<f64>, label: u8) -> DataPoint<f64> {
        DataPoint { features, label }
    }

    #[test]
    fn box_interval_is_value_plus_minus_allowance() {
        let c = CostConstraint::Box(
            BoxConstraint::per_feature(vec![0.05], vec![0.02]).unwrap(),
        );
        let iv = c.interval_for(&point(vec![0.5], 1), 0, None).unwrap();
        assert!((iv.lo - 0.45).abs() < 1e-15);
        assert!((iv.hi - 0.52).abs() < 1e-15);
    }

    fn paper_conditioned() -> CostConstraint<f64> {
        // benign: pinned; malicious with score > 0.9: may only increase to 1;
        // otherwise: +/- 10% of the value.
        CostConstraint::Conditioned(
            ConditionedConstraint::new(vec![
                ConditionRule {
                    label: LabelGuard::Benign,
                    score: None,
                    action: RuleAction::Allowance { dec: 0.0, inc: 0.0 },
                },
                ConditionRule {
                    label: LabelGuard::Malicious,
                    score: Some(ScoreGuard::GreaterThan(0.9)),
                    action: RuleAction::Absolute {
                        lo: None,
                        hi: Some(1.0),
                    },
                },
                ConditionRule {
                    label: LabelGuard::Any,
                    score: None,
                    action: RuleAction::Relative { dec: 0.1, inc: 0.1 },
                },
            ])
            .unwrap(),
        )
    }

    #[test]
    fn conditioned_benign_is_pinned() {
        let c = paper_conditioned();
        let iv = c.interval_for(&point(vec![0.4], 0), 0, Some(0.2)).unwrap();
        assert_eq!(iv.lo, 0.4);
        assert_eq!(iv.hi, 0.4);
    }

    #[test]
    fn conditioned_high_score_malicious_increases_to_one() {
        let c = paper_conditioned();
        let iv = c.interval_for(&point(vec![0.3], 1), 0, Some(0.95)).unwrap();
        assert_eq!(iv.lo, 0.3);
        assert_eq!(iv.hi, 1.0);
    }

    #[test]
    fn conditioned_low_score_malicious_moves_relatively() {
        let c = paper_conditioned();
        let iv = c.interval_for(&point(vec![0.5], 1), 0, Some(0.5)).unwrap();
        assert!((iv.lo - 0.45).abs() < 1e-15);
        assert!((iv.hi - 0.55).abs() < 1e-15);
    }

    #[test]
    fn conditioned_without_context_errors() {
        let c = paper_conditioned();
        let err = c.interval_for(&point(vec![0.3], 1), 0, None).unwrap_err();
        assert!(matches!(err, Error::MissingScoreContext));
    }

    #[test]
    fn conditioned_needs_default_rule() {
        let err = ConditionedConstraint::<f64>::new(vec![ConditionRule {
            label: LabelGuard::Benign,
            score: None,
            action: RuleAction::Allowance { dec: 0.0, inc: 0.0 },
        }])
        .unwrap_err();
        assert!(matches!(err, Error::Config(_)));
    }

    fn column_and_intervals(
        values: &[f64],
        c: &CostConstraint<f64>,
    ) -> (Vec<(f64, u32)>, Vec<PerturbationInterval<f64>>) {
        let mut column: Vec<(f64, u32)> = values
            .iter()
            .enumerate()
            .map(|(i, &v)| (v, i as u32))
            .collect();
        column.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let intervals = column
            .iter()
            .map(|&(v, _)| {
                c.interval_for(&point(vec![v], 1), 0, None).unwrap()
            })
            .collect();
        (column, intervals)
    }

    #[test]
    fn zero_allowance_gives_empty_uncertain_set() {
        let c = CostConstraint::<f64>::zero();
        let values = [0.1, 0.2, 0.3, 0.4];
        let (column, intervals) = column_and_intervals(&values, &c);
        for eta in [0.05, 0.1, 0.15, 0.25, 0.4, 0.5] {
            let p = partition_for_threshold(&column, eta, &intervals);
            assert!(p.uncertain.is_empty(), "eta={eta}");
            assert_eq!(p.left_certain.len() + p.right_certain.len(), values.len());
        }
    }

    #[test]
    fn nine_point_box_layout_matches_figure() {
        // evenly spaced points x1..x9; eta between x5 and x6; box reaching
        // x3..x6 -> uncertain {x3,x4,x5,x6}, certain left {x1,x2}, right {x7,x8,x9}
        let values: Vec<f64> = (1..=9).map(|i| i as f64 / 10.0).collect();
        let c = CostConstraint::Box(BoxConstraint::per_feature(vec![0.11], vec![0.26]).unwrap());
        let (column, intervals) = column_and_intervals(&values, &c);
        let eta = 0.55;
        let p = partition_for_threshold(&column, eta, &intervals);
        assert_eq!(p.left_certain, vec![0, 1]);
        assert_eq!(p.uncertain, vec![2, 3, 4, 5]);
        assert_eq!(p.right_certain, vec![6, 7, 8]);
    }

    #[test]
    fn point_exactly_at_threshold_with_decrease_allowance_is_uncertain() {
        let c = CostConstraint::Box(BoxConstraint::per_feature(vec![0.1], vec![0.0]).unwrap());
        let (column, intervals) = column_and_intervals(&[0.5], &c);
        let p = partition_for_threshold(&column, 0.5, &intervals);
        assert_eq!(p.uncertain, vec![0]);
    }

    #[test]
    fn config_uniform_box_parses() {
        let c: CostConstraint<f64> =
            parse_cost_config(r#"{"schema":1,"box":{"epsilon":0.03}}"#).unwrap();
        let iv = c.interval_for(&point(vec![0.5], 0), 0, None).unwrap();
        assert!((iv.lo - 0.47).abs() < 1e-15);
        assert!((iv.hi - 0.53).abs() < 1e-15);
    }

    #[test]
    fn config_rejects_inverted_ordering() {
        let text = r#"{
            "schema": 1,
            "variables": {"alpha": 0.04, "beta": 0.06, "gamma": 0.03, "mu": 0.0},
            "features": [{"name": "f0", "decrease": "low", "increase": "negligible"}]
        }"#;
        let err = parse_cost_config::<f64>(text).unwrap_err();
        match err {
            Error::CostOrdering(msg) => assert!(msg.contains("beta"), "{msg}"),
            other => panic!("expected CostOrdering, got {other:?}"),
        }
    }

    #[test]
    fn config_allows_merged_categories() {
        // cost families merge adjacent categories by repeating a value
        let text = r#"{
            "schema": 1,
            "family": "cost2",
            "variables": {"alpha": 0.09, "beta": 0.06, "gamma": 0.03, "mu": 0.03},
            "features": [{"name": "f0", "decrease": "high", "increase": "medium"}]
        }"#;
        let c = parse_cost_config::<f64>(text).unwrap();
        let b = c.as_box().unwrap();
        assert_eq!(b.allowances(0), (0.03, 0.03));
        assert_eq!(b.family, Some(CostFamily::Cost2));
    }

    #[test]
    fn config_schema_version_checked() {
        let err = parse_cost_config::<f64>(r#"{"schema":2,"box":{"epsilon":0.1}}"#).unwrap_err();
        assert!(matches!(
            err,
            Error::SchemaVersion {
                expected: 1,
                found: 2
            }
        ));
    }
}
