//! Second-order gradient boosting with logistic loss (XGBoost-style exact
//! greedy), optionally robust via the cost-constrained splitter.

use rand::seq::index::sample as index_sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::costspec::CostConstraint;
use crate::dataset::Dataset;
use crate::ensemble::model::{sigmoid, GbdtModel};
use crate::ensemble::tree::{Tree, TreeNode};
use crate::error::{Error, Result};
use crate::scalar::{KahanSum, Scalar};
use crate::splitter::{
    best_regular_split, best_robust_split, ScoreFunction, SplitInput, StatSource,
};

/// Hyperparameters shared by the GBDT and random-forest trainers.
#[derive(Clone, Debug, PartialEq)]
pub struct TrainParams<S> {
    /// Number of trees K.
    pub trees: usize,
    pub max_depth: usize,
    /// Shrinkage nu (GBDT only).
    pub learning_rate: S,
    /// L2 leaf regularization lambda (GBDT only).
    pub lambda: S,
    /// Split-acceptance penalty gamma_reg (GBDT only).
    pub gamma: S,
    /// Features drawn per node (d'); `None` = all for GBDT, ceil(sqrt(d)) for RF.
    pub feature_subsample: Option<usize>,
    /// Bootstrap sample size N' (RF only); `None` = N.
    pub bootstrap_size: Option<usize>,
    /// Sample with replacement (RF only); disable to reuse the data verbatim.
    pub bootstrap: bool,
    pub min_samples_leaf: usize,
    pub seed: u64,
}

impl<S: Scalar> Default for TrainParams<S> {
    fn default() -> Self {
        TrainParams {
            trees: 20,
            max_depth: 6,
            learning_rate: S::cast_from(0.3),
            lambda: S::one(),
            gamma: S::zero(),
            feature_subsample: None,
            bootstrap_size: None,
            bootstrap: true,
            min_samples_leaf: 1,
            seed: 0,
        }
    }
}

impl<S: Scalar> TrainParams<S> {
    pub fn validate(&self, n: usize, d: usize) -> Result<()> {
        if self.max_depth == 0 {
            return Err(Error::InvalidArgument("max_depth must be >= 1".into()));
        }
        if self.min_samples_leaf == 0 {
            return Err(Error::InvalidArgument(
                "min_samples_leaf must be >= 1".into(),
            ));
        }
        if let Some(dp) = self.feature_subsample {
            if dp == 0 || dp > d {
                return Err(Error::InvalidArgument(format!(
                    "feature_subsample must be in 1..={d}, got {dp}"
                )));
            }
        }
        if let Some(np) = self.bootstrap_size {
            if np == 0 || np > n {
                return Err(Error::InvalidArgument(format!(
                    "bootstrap_size must be in 1..={n}, got {np}"
                )));
            }
        }
        if self.learning_rate <= S::zero() {
            return Err(Error::InvalidArgument(
                "learning_rate must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Per-round training record.
#[derive(Clone, Debug)]
pub struct TrainRound<S> {
    pub round: usize,
    /// Regularized logistic loss over the training set after this round.
    pub loss: S,
    pub wall_ms: u128,
}

pub struct GbdtTraining<S> {
    pub model: GbdtModel<S>,
    pub rounds: Vec<TrainRound<S>>,
}

pub fn train_gbdt<S: Scalar>(
    train: &Dataset<S>,
    params: &TrainParams<S>,
    constraint: Option<&CostConstraint<S>>,
) -> Result<GbdtModel<S>> {
    Ok(train_gbdt_logged(train, params, constraint)?.model)
}

/// Train and keep the per-round loss log.
pub fn train_gbdt_logged<S: Scalar>(
    train: &Dataset<S>,
    params: &TrainParams<S>,
    constraint: Option<&CostConstraint<S>>,
) -> Result<GbdtTraining<S>> {
    let n = train.len();
    let d = train.d();
    params.validate(n, d)?;
    if !train.has_both_classes() {
        return Err(Error::InvalidArgument(
            "training data must contain both classes".into(),
        ));
    }
    if let Some(c) = constraint {
        c.check_dimension(d)?;
    }

    let base_score = S::zero();
    let mut margins = vec![base_score; n];
    let mut trees: Vec<Tree<S>> = Vec::with_capacity(params.trees);
    let mut rounds = Vec::with_capacity(params.trees);
    // cumulative 1/2 lambda ||w||^2 + gamma * T over all trees
    let mut regularization = KahanSum::<S>::new();
    let started = std::time::Instant::now();

    let score_fn = ScoreFunction::XgbLoss {
        lambda: params.lambda,
        gamma: params.gamma,
    };
    let half = S::cast_from(0.5);

    for round in 0..params.trees {
        let mut g = Vec::with_capacity(n);
        let mut h = Vec::with_capacity(n);
        for (i, p) in train.points().iter().enumerate() {
            let prob = sigmoid(margins[i]);
            g.push(prob - S::cast_from(p.label as f64));
            h.push(prob * (S::one() - prob));
        }
        // conditioned constraints see the prediction of the ensemble built
        // so far, refreshed once per boosting round
        let score_ctx: Option<Vec<S>> = match constraint {
            Some(c) if c.needs_score() => Some(margins.iter().map(|&m| sigmoid(m)).collect()),
            _ => None,
        };

        let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
        rng.set_stream(round as u64 + 1);
        let all_ids: Vec<u32> = (0..n as u32).collect();
        let mut builder = TreeBuilder {
            dataset: train,
            g: &g,
            h: &h,
            score_fn,
            params,
            constraint,
            score_ctx: score_ctx.as_deref(),
            nodes: Vec::new(),
            leaf_updates: Vec::new(),
            rng,
        };
        builder.grow(all_ids, 0)?;
        let tree = Tree {
            nodes: builder.nodes,
        };
        debug_assert!(tree.depth() <= params.max_depth);

        for (ids, weight) in &builder.leaf_updates {
            // complexity of the increment actually added to the ensemble
            let applied = params.learning_rate * *weight;
            regularization.add(half * params.lambda * applied * applied);
            regularization.add(params.gamma);
            for &id in ids {
                margins[id as usize] += applied;
            }
        }
        trees.push(tree);

        let mut data_loss = KahanSum::<S>::new();
        for (i, p) in train.points().iter().enumerate() {
            let prob = sigmoid(margins[i]);
            let y = S::cast_from(p.label as f64);
            // clamped log-loss so saturated margins stay finite
            let eps = S::cast_from(1e-15);
            let prob = prob.max(eps).min(S::one() - eps);
            data_loss.add(-(y * prob.ln() + (S::one() - y) * (S::one() - prob).ln()));
        }
        rounds.push(TrainRound {
            round,
            loss: data_loss.value() + regularization.value(),
            wall_ms: started.elapsed().as_millis(),
        });
    }

    Ok(GbdtTraining {
        model: GbdtModel {
            trees,
            learning_rate: params.learning_rate,
            base_score,
            lambda: params.lambda,
            gamma: params.gamma,
            n_features: d,
            feature_names: train.feature_names.clone(),
            normalization: train.normalization.clone(),
        },
        rounds,
    })
}

struct TreeBuilder<'a, S: Scalar> {
    dataset: &'a Dataset<S>,
    g: &'a [S],
    h: &'a [S],
    score_fn: ScoreFunction<S>,
    params: &'a TrainParams<S>,
    constraint: Option<&'a CostConstraint<S>>,
    score_ctx: Option<&'a [S]>,
    nodes: Vec<TreeNode<S>>,
    leaf_updates: Vec<(Vec<u32>, S)>,
    rng: ChaCha8Rng,
}

impl<'a, S: Scalar> TreeBuilder<'a, S> {
    fn leaf_weight(&self, ids: &[u32]) -> S {
        let mut gs = KahanSum::<S>::new();
        let mut hs = KahanSum::<S>::new();
        for &id in ids {
            gs.add(self.g[id as usize]);
            hs.add(self.h[id as usize]);
        }
        -gs.value() / (hs.value() + self.params.lambda)
    }

    fn make_leaf(&mut self, ids: Vec<u32>) -> usize {
        let weight = self.leaf_weight(&ids);
        let idx = self.nodes.len();
        self.nodes.push(TreeNode::Leaf { value: weight });
        self.leaf_updates.push((ids, weight));
        idx
    }

    fn node_features(&mut self) -> Vec<usize> {
        let d = self.dataset.d();
        match self.params.feature_subsample {
            None => (0..d).collect(),
            Some(dp) => {
                let mut f: Vec<usize> = index_sample(&mut self.rng, d, dp).into_vec();
                f.sort_unstable();
                f
            }
        }
    }

    fn grow(&mut self, ids: Vec<u32>, depth: usize) -> Result<usize> {
        if depth >= self.params.max_depth || ids.len() < 2 * self.params.min_samples_leaf {
            return Ok(self.make_leaf(ids));
        }
        let features = self.node_features();
        let input = SplitInput {
            dataset: self.dataset,
            point_ids: &ids,
            source: StatSource::Gradients {
                g: self.g,
                h: self.h,
            },
            score_fn: self.score_fn,
            min_samples_leaf: self.params.min_samples_leaf,
            score_ctx: self.score_ctx,
        };
        let decision = match self.constraint {
            Some(c) => best_robust_split(&input, &features, c)?,
            None => best_regular_split(&input, &features)?,
        };
        let Some(split) = decision else {
            return Ok(self.make_leaf(ids));
        };

        let (left_ids, right_ids): (Vec<u32>, Vec<u32>) = ids.into_iter().partition(|&id| {
            self.dataset.point(id as usize).features[split.feature] < split.threshold
        });
        let idx = self.nodes.len();
        self.nodes.push(TreeNode::Leaf { value: S::zero() }); // placeholder
        let left = self.grow(left_ids, depth + 1)?;
        let right = self.grow(right_ids, depth + 1)?;
        self.nodes[idx] = TreeNode::Internal {
            feature: split.feature,
            threshold: split.threshold,
            left,
            right,
        };
        Ok(idx)
    }
}
