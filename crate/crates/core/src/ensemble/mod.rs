//! Tree-ensemble training (GBDT and random forest), prediction, and model
//! serialization.

pub mod forest;
pub mod gbdt;
pub mod grid;
pub mod model;
pub mod tree;

pub use forest::train_random_forest;
pub use gbdt::{train_gbdt, train_gbdt_logged, GbdtTraining, TrainParams, TrainRound};
pub use grid::{grid_search, GridCell, GridSearchResult, TrainerKind};
pub use model::{
    load_model, model_from_json, model_to_json, save_model, sigmoid, GbdtModel,
    RandomForestModel, TreeEnsembleModel,
};
pub use tree::{LeafPath, Tree, TreeNode};
