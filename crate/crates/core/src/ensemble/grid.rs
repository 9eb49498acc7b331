//! Grid search over tree count and depth, selecting by validation accuracy.

use crate::costspec::CostConstraint;
use crate::dataset::Dataset;
use crate::ensemble::forest::train_random_forest;
use crate::ensemble::gbdt::{train_gbdt, TrainParams};
use crate::ensemble::model::TreeEnsembleModel;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TrainerKind {
    Gbdt,
    RandomForest,
}

#[derive(Clone, Debug)]
pub struct GridCell<S> {
    pub trees: usize,
    pub depth: usize,
    pub val_accuracy: S,
}

#[derive(Clone, Debug)]
pub struct GridSearchResult<S> {
    /// Base params with the winning (trees, depth) substituted.
    pub best_params: TrainParams<S>,
    pub best_accuracy: S,
    pub cells: Vec<GridCell<S>>,
}

impl<S: Scalar> GridSearchResult<S> {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("trees,depth,val_accuracy\n");
        for c in &self.cells {
            out.push_str(&format!("{},{},{}\n", c.trees, c.depth, c.val_accuracy));
        }
        out
    }
}

fn accuracy_at_half<S: Scalar>(model: &TreeEnsembleModel<S>, data: &Dataset<S>) -> Result<S> {
    let mut correct = 0usize;
    for p in data.points() {
        if model.predict_label(&p.features, S::cast_from(0.5))? == p.label {
            correct += 1;
        }
    }
    Ok(S::cast_from(correct as f64) / S::cast_from(data.len() as f64))
}

/// Train every (trees, depth) combination and pick the highest validation
/// accuracy; ties prefer fewer trees, then shallower depth.
pub fn grid_search<S: Scalar>(
    train: &Dataset<S>,
    val: &Dataset<S>,
    trees_grid: &[usize],
    depth_grid: &[usize],
    base: &TrainParams<S>,
    kind: TrainerKind,
    constraint: Option<&CostConstraint<S>>,
) -> Result<GridSearchResult<S>> {
    if trees_grid.is_empty() || depth_grid.is_empty() {
        return Err(Error::InvalidArgument("grids must be nonempty".into()));
    }
    if val.is_empty() {
        return Err(Error::InvalidArgument(
            "validation set must be nonempty".into(),
        ));
    }
    let mut cells = Vec::with_capacity(trees_grid.len() * depth_grid.len());
    let mut best: Option<(S, usize, usize)> = None;
    let mut trees_sorted = trees_grid.to_vec();
    trees_sorted.sort_unstable();
    let mut depth_sorted = depth_grid.to_vec();
    depth_sorted.sort_unstable();

    for &k in &trees_sorted {
        for &depth in &depth_sorted {
            let params = TrainParams {
                trees: k,
                max_depth: depth,
                ..base.clone()
            };
            let model: TreeEnsembleModel<S> = match kind {
                TrainerKind::Gbdt => train_gbdt(train, &params, constraint)?.into(),
                TrainerKind::RandomForest => {
                    train_random_forest(train, &params, constraint)?.into()
                }
            };
            let acc = accuracy_at_half(&model, val)?;
            cells.push(GridCell {
                trees: k,
                depth,
                val_accuracy: acc,
            });
            // strict improvement only: first cell in (trees asc, depth asc)
            // order wins ties, i.e. fewer trees, then shallower
            if best.map_or(true, |(b, _, _)| acc > b) {
                best = Some((acc, k, depth));
            }
        }
    }
    let (best_accuracy, k, depth) = best.expect("grids are nonempty");
    Ok(GridSearchResult {
        best_params: TrainParams {
            trees: k,
            max_depth: depth,
            ..base.clone()
        },
        best_accuracy,
        cells,
    })
}
