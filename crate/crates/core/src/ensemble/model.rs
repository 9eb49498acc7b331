//! Trained ensemble models, prediction, and the JSON model format.
//!
//! Model files follow schema 1:
//! `{schema, kind: "gbdt"|"rf", learning_rate, base_score, trees: [{nodes:
//! [{f,t,l,r} | {leaf}]}], feature_names?, normalization?}`. Round-tripping a
//! model through JSON preserves `f64` predictions bit-exactly.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dataset::Normalization;
use crate::ensemble::tree::{Tree, TreeNode};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub fn sigmoid<S: Scalar>(v: S) -> S {
    S::one() / (S::one() + (-v).exp())
}

/// Gradient boosted trees: margin = base_score + learning_rate * sum of trees,
/// probability = sigmoid(margin).
#[derive(Clone, Debug, PartialEq)]
pub struct GbdtModel<S> {
    pub trees: Vec<Tree<S>>,
    pub learning_rate: S,
    pub base_score: S,
    /// L2 leaf regularization used at training time (not serialized).
    pub lambda: S,
    /// Split-acceptance penalty used at training time (not serialized).
    pub gamma: S,
    pub n_features: usize,
    pub feature_names: Option<Vec<String>>,
    pub normalization: Option<Normalization<S>>,
}

/// Random forest: probability = average of per-tree leaf probabilities.
#[derive(Clone, Debug, PartialEq)]
pub struct RandomForestModel<S> {
    pub trees: Vec<Tree<S>>,
    pub bootstrap_seed: u64,
    pub n_features: usize,
    pub feature_names: Option<Vec<String>>,
    pub normalization: Option<Normalization<S>>,
}

/// Either ensemble kind behind one prediction interface.
#[derive(Clone, Debug, PartialEq)]
pub enum TreeEnsembleModel<S> {
    Gbdt(GbdtModel<S>),
    Forest(RandomForestModel<S>),
}

impl<S: Scalar> From<GbdtModel<S>> for TreeEnsembleModel<S> {
    fn from(m: GbdtModel<S>) -> Self {
        TreeEnsembleModel::Gbdt(m)
    }
}

impl<S: Scalar> From<RandomForestModel<S>> for TreeEnsembleModel<S> {
    fn from(m: RandomForestModel<S>) -> Self {
        TreeEnsembleModel::Forest(m)
    }
}

impl<S: Scalar> TreeEnsembleModel<S> {
    pub fn kind(&self) -> &'static str {
        match self {
            TreeEnsembleModel::Gbdt(_) => "gbdt",
            TreeEnsembleModel::Forest(_) => "rf",
        }
    }

    pub fn trees(&self) -> &[Tree<S>] {
        match self {
            TreeEnsembleModel::Gbdt(m) => &m.trees,
            TreeEnsembleModel::Forest(m) => &m.trees,
        }
    }

    pub fn n_features(&self) -> usize {
        match self {
            TreeEnsembleModel::Gbdt(m) => m.n_features,
            TreeEnsembleModel::Forest(m) => m.n_features,
        }
    }

    pub fn feature_names(&self) -> Option<&[String]> {
        match self {
            TreeEnsembleModel::Gbdt(m) => m.feature_names.as_deref(),
            TreeEnsembleModel::Forest(m) => m.feature_names.as_deref(),
        }
    }

    pub fn normalization(&self) -> Option<&Normalization<S>> {
        match self {
            TreeEnsembleModel::Gbdt(m) => m.normalization.as_ref(),
            TreeEnsembleModel::Forest(m) => m.normalization.as_ref(),
        }
    }

    /// Raw sum of tree outputs, before any aggregation.
    pub fn tree_sum(&self, x: &[S]) -> S {
        self.trees().iter().map(|t| t.eval(x)).sum()
    }

    /// The model predicts label 1 exactly when `tree_sum(x) >= flip_rhs()`
    /// (at the 0.5 probability cutoff). This is the linear form the MILP
    /// encoding and the exact attacker work against.
    pub fn flip_rhs(&self) -> S {
        self.flip_rhs_at(S::cast_from(0.5))
    }

    /// As [`flip_rhs`](Self::flip_rhs) but at an arbitrary probability cutoff.
    pub fn flip_rhs_at(&self, cutoff: S) -> S {
        match self {
            TreeEnsembleModel::Gbdt(m) => {
                let logit = (cutoff / (S::one() - cutoff)).ln();
                (logit - m.base_score) / m.learning_rate
            }
            TreeEnsembleModel::Forest(m) => cutoff * S::cast_from(m.trees.len() as f64),
        }
    }

    pub fn predict_proba(&self, x: &[S]) -> Result<S> {
        if x.len() != self.n_features() {
            return Err(Error::Dimension {
                expected: self.n_features(),
                actual: x.len(),
            });
        }
        Ok(match self {
            TreeEnsembleModel::Gbdt(m) => {
                sigmoid(m.base_score + m.learning_rate * self.tree_sum(x))
            }
            TreeEnsembleModel::Forest(m) => {
                if m.trees.is_empty() {
                    S::cast_from(0.5)
                } else {
                    self.tree_sum(x) / S::cast_from(m.trees.len() as f64)
                }
            }
        })
    }

    /// Label at `cutoff`: probability >= cutoff maps to class 1.
    pub fn predict_label(&self, x: &[S], cutoff: S) -> Result<u8> {
        Ok(u8::from(self.predict_proba(x)? >= cutoff))
    }

    fn max_feature(&self) -> Option<usize> {
        self.trees()
            .iter()
            .flat_map(|t| t.internal_nodes().map(|(f, _)| f))
            .max()
    }

    fn validate(&self) -> Result<()> {
        for (ti, tree) in self.trees().iter().enumerate() {
            tree.validate(&format!("trees[{ti}]"))?;
        }
        if let Some(max_f) = self.max_feature() {
            if max_f >= self.n_features() {
                return Err(Error::Model(format!(
                    "tree references feature {max_f} but the model has {} features",
                    self.n_features()
                )));
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// JSON schema 1
// ---------------------------------------------------------------------------

const MODEL_SCHEMA: u32 = 1;

#[derive(Serialize, Deserialize)]
struct ModelJson {
    schema: u32,
    kind: String,
    learning_rate: f64,
    base_score: f64,
    trees: Vec<TreeJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    feature_names: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    normalization: Option<NormalizationJson>,
}

#[derive(Serialize, Deserialize)]
struct TreeJson {
    nodes: Vec<NodeJson>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum NodeJson {
    Internal { f: usize, t: f64, l: usize, r: usize },
    Leaf { leaf: f64 },
}

#[derive(Serialize, Deserialize)]
struct NormalizationJson {
    min: Vec<f64>,
    max: Vec<f64>,
}

fn tree_to_json<S: Scalar>(tree: &Tree<S>, context: &str) -> Result<TreeJson> {
    let nodes = tree
        .nodes
        .iter()
        .enumerate()
        .map(|(i, n)| match n {
            TreeNode::Internal {
                feature,
                threshold,
                left,
                right,
            } => {
                let t = threshold.cast_f64();
                if t.is_nan() {
                    return Err(Error::Model(format!(
                        "{context}.nodes[{i}].t: NaN threshold rejected"
                    )));
                }
                Ok(NodeJson::Internal {
                    f: *feature,
                    t,
                    l: *left,
                    r: *right,
                })
            }
            TreeNode::Leaf { value } => {
                let v = value.cast_f64();
                if v.is_nan() {
                    return Err(Error::Model(format!(
                        "{context}.nodes[{i}].leaf: NaN value rejected"
                    )));
                }
                Ok(NodeJson::Leaf { leaf: v })
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TreeJson { nodes })
}

fn tree_from_json<S: Scalar>(tree: &TreeJson, context: &str) -> Result<Tree<S>> {
    let nodes = tree
        .nodes
        .iter()
        .enumerate()
        .map(|(i, n)| match n {
            NodeJson::Internal { f, t, l, r } => {
                if t.is_nan() {
                    return Err(Error::Model(format!(
                        "{context}.nodes[{i}].t: NaN threshold rejected"
                    )));
                }
                Ok(TreeNode::Internal {
                    feature: *f,
                    threshold: S::cast_from(*t),
                    left: *l,
                    right: *r,
                })
            }
            NodeJson::Leaf { leaf } => {
                if leaf.is_nan() {
                    return Err(Error::Model(format!(
                        "{context}.nodes[{i}].leaf: NaN value rejected"
                    )));
                }
                Ok(TreeNode::Leaf {
                    value: S::cast_from(*leaf),
                })
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Tree { nodes })
}

/// Serialize a model to the schema-1 JSON string.
pub fn model_to_json<S: Scalar>(model: &TreeEnsembleModel<S>) -> Result<String> {
    model.validate()?;
    let (learning_rate, base_score) = match model {
        TreeEnsembleModel::Gbdt(m) => (m.learning_rate.cast_f64(), m.base_score.cast_f64()),
        TreeEnsembleModel::Forest(_) => (1.0, 0.0),
    };
    if learning_rate.is_nan() || base_score.is_nan() {
        return Err(Error::Model("NaN model parameter rejected".into()));
    }
    let trees = model
        .trees()
        .iter()
        .enumerate()
        .map(|(i, t)| tree_to_json(t, &format!("trees[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    let json = ModelJson {
        schema: MODEL_SCHEMA,
        kind: model.kind().to_string(),
        learning_rate,
        base_score,
        trees,
        feature_names: model.feature_names().map(<[String]>::to_vec),
        normalization: model.normalization().map(|n| NormalizationJson {
            min: n.min.iter().map(|v| v.cast_f64()).collect(),
            max: n.max.iter().map(|v| v.cast_f64()).collect(),
        }),
    };
    Ok(serde_json::to_string_pretty(&json)?)
}

/// Parse a schema-1 JSON model.
pub fn model_from_json<S: Scalar>(text: &str) -> Result<TreeEnsembleModel<S>> {
    let json: ModelJson = serde_json::from_str(text)?;
    if json.schema != MODEL_SCHEMA {
        return Err(Error::SchemaVersion {
            expected: MODEL_SCHEMA,
            found: json.schema,
        });
    }
    let trees = json
        .trees
        .iter()
        .enumerate()
        .map(|(i, t)| tree_from_json(t, &format!("trees[{i}]")))
        .collect::<Result<Vec<Tree<S>>>>()?;
    let normalization = json.normalization.map(|n| Normalization {
        min: n.min.iter().map(|&v| S::cast_from(v)).collect(),
        max: n.max.iter().map(|&v| S::cast_from(v)).collect(),
    });
    let max_feature = trees
        .iter()
        .flat_map(|t| t.internal_nodes().map(|(f, _)| f))
        .max();
    let n_features = normalization
        .as_ref()
        .map(|n: &Normalization<S>| n.min.len())
        .or(json.feature_names.as_ref().map(Vec::len))
        .unwrap_or_else(|| max_feature.map_or(0, |f| f + 1));

    let model = match json.kind.as_str() {
        "gbdt" => TreeEnsembleModel::Gbdt(GbdtModel {
            trees,
            learning_rate: S::cast_from(json.learning_rate),
            base_score: S::cast_from(json.base_score),
            lambda: S::zero(),
            gamma: S::zero(),
            n_features,
            feature_names: json.feature_names,
            normalization,
        }),
        "rf" => TreeEnsembleModel::Forest(RandomForestModel {
            trees,
            bootstrap_seed: 0,
            n_features,
            feature_names: json.feature_names,
            normalization,
        }),
        other => {
            return Err(Error::Model(format!(
                "kind: expected \"gbdt\" or \"rf\", found \"{other}\""
            )))
        }
    };
    model.validate()?;
    Ok(model)
}

pub fn save_model<S: Scalar>(model: &TreeEnsembleModel<S>, path: impl AsRef<Path>) -> Result<()> {
    let json = model_to_json(model)?;
    fs::write(path, json)?;
    Ok(())
}

pub fn load_model<S: Scalar>(path: impl AsRef<Path>) -> Result<TreeEnsembleModel<S>> {
    let text = fs::read_to_string(path)?;
    model_from_json(&text)
}
