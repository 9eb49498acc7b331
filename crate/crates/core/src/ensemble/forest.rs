//! Random forest training: bootstrap sampling, per-node feature draws, Gini
//! splits (optionally robust), and Laplace-smoothed leaf probabilities.

use rand::seq::index::sample as index_sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::costspec::CostConstraint;
use crate::dataset::Dataset;
use crate::ensemble::gbdt::TrainParams;
use crate::ensemble::model::RandomForestModel;
use crate::ensemble::tree::{Tree, TreeNode};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::splitter::{
    best_regular_split, best_robust_split, ScoreFunction, SplitInput, StatSource,
};

pub fn train_random_forest<S: Scalar>(
    train: &Dataset<S>,
    params: &TrainParams<S>,
    constraint: Option<&CostConstraint<S>>,
) -> Result<RandomForestModel<S>> {
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

    let d_sub = params
        .feature_subsample
        .unwrap_or_else(|| (d as f64).sqrt().ceil() as usize)
        .min(d)
        .max(1);
    let n_sub = params.bootstrap_size.unwrap_or(n);

    let trees: Vec<Tree<S>> = if constraint.is_some_and(|c| c.needs_score()) {
        // conditioned constraints see the mean prediction of the trees built
        // so far; that forces sequential growth
        let mut trees: Vec<Tree<S>> = Vec::with_capacity(params.trees);
        for t in 0..params.trees {
            let ctx: Vec<S> = train
                .points()
                .iter()
                .map(|p| {
                    if trees.is_empty() {
                        S::cast_from(0.5)
                    } else {
                        trees.iter().map(|tr| tr.eval(&p.features)).sum::<S>()
                            / S::cast_from(trees.len() as f64)
                    }
                })
                .collect();
            trees.push(grow_forest_tree(
                train, params, constraint, d_sub, n_sub, t, Some(&ctx),
            )?);
        }
        trees
    } else {
        (0..params.trees)
            .into_par_iter()
            .map(|t| grow_forest_tree(train, params, constraint, d_sub, n_sub, t, None))
            .collect::<Result<Vec<_>>>()?
    };

    Ok(RandomForestModel {
        trees,
        bootstrap_seed: params.seed,
        n_features: d,
        feature_names: train.feature_names.clone(),
        normalization: train.normalization.clone(),
    })
}

fn grow_forest_tree<S: Scalar>(
    train: &Dataset<S>,
    params: &TrainParams<S>,
    constraint: Option<&CostConstraint<S>>,
    d_sub: usize,
    n_sub: usize,
    tree_index: usize,
    score_ctx: Option<&[S]>,
) -> Result<Tree<S>> {
    let n = train.len();
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    rng.set_stream(tree_index as u64 + 1);

    let ids: Vec<u32> = if params.bootstrap {
        (0..n_sub).map(|_| rng.gen_range(0..n) as u32).collect()
    } else if n_sub == n {
        (0..n as u32).collect()
    } else {
        index_sample(&mut rng, n, n_sub)
            .into_iter()
            .map(|i| i as u32)
            .collect()
    };

    let mut builder = ForestTreeBuilder {
        dataset: train,
        params,
        constraint,
        score_ctx,
        d_sub,
        nodes: Vec::new(),
        rng,
    };
    builder.grow(ids, 0)?;
    let tree = Tree {
        nodes: builder.nodes,
    };
    debug_assert!(tree.depth() <= params.max_depth);
    Ok(tree)
}

struct ForestTreeBuilder<'a, S: Scalar> {
    dataset: &'a Dataset<S>,
    params: &'a TrainParams<S>,
    constraint: Option<&'a CostConstraint<S>>,
    score_ctx: Option<&'a [S]>,
    d_sub: usize,
    nodes: Vec<TreeNode<S>>,
    rng: ChaCha8Rng,
}

impl<'a, S: Scalar> ForestTreeBuilder<'a, S> {
    /// Laplace-smoothed positive fraction `(n1 + 1) / (n + 2)`.
    fn make_leaf(&mut self, ids: &[u32]) -> usize {
        let n1 = ids
            .iter()
            .filter(|&&id| self.dataset.point(id as usize).label == 1)
            .count();
        let value = S::cast_from((n1 + 1) as f64) / S::cast_from((ids.len() + 2) as f64);
        let idx = self.nodes.len();
        self.nodes.push(TreeNode::Leaf { value });
        idx
    }

    fn grow(&mut self, ids: Vec<u32>, depth: usize) -> Result<usize> {
        if depth >= self.params.max_depth || ids.len() < 2 * self.params.min_samples_leaf {
            return Ok(self.make_leaf(&ids));
        }
        let d = self.dataset.d();
        let features: Vec<usize> = if self.d_sub >= d {
            (0..d).collect()
        } else {
            let mut f: Vec<usize> = index_sample(&mut self.rng, d, self.d_sub).into_vec();
            f.sort_unstable();
            f
        };
        let input = SplitInput {
            dataset: self.dataset,
            point_ids: &ids,
            source: StatSource::Labels,
            score_fn: ScoreFunction::Gini,
            min_samples_leaf: self.params.min_samples_leaf,
            score_ctx: self.score_ctx,
        };
        let decision = match self.constraint {
            Some(c) => best_robust_split(&input, &features, c)?,
            None => best_regular_split(&input, &features)?,
        };
        let Some(split) = decision else {
            return Ok(self.make_leaf(&ids));
        };
        let (left_ids, right_ids): (Vec<u32>, Vec<u32>) = ids.into_iter().partition(|&id| {
            self.dataset.point(id as usize).features[split.feature] < split.threshold
        });
        let idx = self.nodes.len();
        self.nodes.push(TreeNode::Leaf { value: S::zero() });
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
