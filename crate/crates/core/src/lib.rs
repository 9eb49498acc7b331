//! Cost-aware robust training of tree ensembles, with an exact minimal-cost
//! evasion attacker and the accompanying metric suite.
//!
//! A tree ensemble trained the usual way is brittle where its split
//! thresholds sit close to the data. Given a per-feature, per-direction
//! perturbation model ([`costspec`]), the robust trainers in [`ensemble`]
//! score every candidate split against the worst-case reassignment of the
//! points an attacker could push across the threshold ([`splitter`]), and
//! the attackers in [`attack`] measure what such evasion actually costs
//! against the finished model.
//!
//! Everything numeric is generic over [`Scalar`] (`f32` or `f64`); the
//! `f64`-backed aliases below are the ones the CLI and the tests use.

pub mod attack;
pub mod costspec;
pub mod dataset;
pub mod ensemble;
pub mod error;
pub mod metrics;
pub mod report;
pub mod scalar;
pub mod splitter;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// `f64`-backed aliases for the main types.
pub type DataPoint = dataset::DataPoint<f64>;
pub type Dataset = dataset::Dataset<f64>;
pub type Normalization = dataset::Normalization<f64>;
pub type BoxConstraint = costspec::BoxConstraint<f64>;
pub type ConditionedConstraint = costspec::ConditionedConstraint<f64>;
pub type CostConstraint = costspec::CostConstraint<f64>;
pub type CostVariables = costspec::CostVariables<f64>;
pub type PerturbationInterval = costspec::PerturbationInterval<f64>;
pub type ScoreFunction = splitter::ScoreFunction<f64>;
pub type ScoreStats = splitter::ScoreStats<f64>;
pub type SplitDecision = splitter::SplitDecision<f64>;
pub type Tree = ensemble::Tree<f64>;
pub type TreeNode = ensemble::TreeNode<f64>;
pub type GbdtModel = ensemble::GbdtModel<f64>;
pub type RandomForestModel = ensemble::RandomForestModel<f64>;
pub type TreeEnsembleModel = ensemble::TreeEnsembleModel<f64>;
pub type TrainParams = ensemble::TrainParams<f64>;
pub type AttackObjective = attack::AttackObjective<f64>;
pub type AttackOptions = attack::AttackOptions<f64>;
pub type AttackResult = attack::AttackResult<f64>;
pub type MilpProgram = attack::MilpProgram<f64>;
pub type RocCurve = metrics::RocCurve<f64>;
pub type RobustnessCurve = metrics::RobustnessCurve<f64>;
