//! Shared fixtures: deterministic synthetic datasets and random small models.
//!
//! `breast_cancer_libsvm` regenerates the checked-in desk-scale stand-in for
//! the LIBSVM breast-cancer file (683 rows, 10 integer-valued features on a
//! 1..10 grid, labels {2,4}); see `data/README.md` at the workspace root.

#![allow(dead_code)]

pub mod lp_grammar;

use std::path::PathBuf;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use costtrees::costspec::{BoxConstraint, CostCategory, CostVariables};
use costtrees::dataset::{self, DataPoint, Dataset, DimSpec};
use costtrees::ensemble::{GbdtModel, Tree, TreeEnsembleModel};

pub fn workspace_path(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../..")
        .join(rel)
}

/// Box-Muller standard normal.
fn gauss(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Per-feature (benign mean, benign sd, malignant mean, malignant sd) on the
/// 1..10 grid, loosely mimicking the Wisconsin breast-cancer measurements.
const BC_PROFILES: [(f64, f64, f64, f64); 10] = [
    (3.0, 1.7, 7.2, 2.4),
    (1.4, 1.1, 6.6, 2.8),
    (1.5, 1.2, 6.6, 2.7),
    (1.4, 1.1, 5.6, 3.2),
    (2.1, 1.0, 5.3, 2.5),
    (1.4, 1.3, 7.6, 3.1),
    (2.1, 1.2, 6.0, 2.3),
    (1.3, 1.1, 5.9, 3.4),
    (1.1, 0.7, 2.6, 2.6),
    (2.0, 1.3, 5.5, 2.8),
];

/// Generator shape knobs; see `breast_cancer_libsvm`.
pub struct BcShape {
    /// Latent-severity correlation between features of one sample.
    pub rho: f64,
    /// Scale on the benign (malignant) standard deviations.
    pub benign_sd: f64,
    pub malignant_sd: f64,
    /// Chance of one idiosyncratic out-of-profile feature per sample.
    pub outlier_rate: f64,
    /// Added to every malignant profile mean.
    pub malignant_shift: f64,
    /// Extra separation on the two strongest features (indices 1 and 5).
    pub strong_boost: f64,
}

pub const BC_SHAPE: BcShape = BcShape {
    rho: 0.25,
    benign_sd: 1.0,
    malignant_sd: 1.3,
    outlier_rate: 0.10,
    malignant_shift: -1.0,
    strong_boost: 0.0,
};

/// The 683-row breast-cancer stand-in as LIBSVM text (labels 2 = benign,
/// 4 = malignant).
pub fn breast_cancer_libsvm() -> String {
    breast_cancer_libsvm_shaped(&BC_SHAPE)
}

pub fn breast_cancer_libsvm_shaped(shape: &BcShape) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(0xb2ca);
    let mut rows = Vec::with_capacity(683);
    for i in 0..683 {
        let malignant = i >= 444;
        let t = gauss(&mut rng);
        let mut values = [0.0f64; 10];
        for (j, &(mb, sb, mm, sm)) in BC_PROFILES.iter().enumerate() {
            let boost = if j == 1 || j == 5 { shape.strong_boost } else { 0.0 };
            let (mean, sd) = if malignant {
                (mm + shape.malignant_shift + boost, sm * shape.malignant_sd)
            } else {
                (mb, sb * shape.benign_sd)
            };
            let z = shape.rho * t + (1.0 - shape.rho * shape.rho).sqrt() * gauss(&mut rng);
            values[j] = (mean + sd * z).round().clamp(1.0, 10.0);
        }
        if rng.gen::<f64>() < shape.outlier_rate {
            // one idiosyncratic measurement out of the class profile
            let j = rng.gen_range(0..10);
            values[j] = if malignant {
                rng.gen_range(2..=5) as f64
            } else {
                rng.gen_range(4..=7) as f64
            };
        }
        let fields: Vec<String> = values
            .iter()
            .enumerate()
            .map(|(j, v)| format!("{}:{}", j + 1, v))
            .collect();
        rows.push(format!("{} {}", if malignant { 4 } else { 2 }, fields.join(" ")));
    }
    // deterministic shuffle so the classes are interleaved like the real file
    let mut order: Vec<usize> = (0..rows.len()).collect();
    use rand::seq::SliceRandom;
    order.shuffle(&mut rng);
    let mut out = String::new();
    for idx in order {
        out.push_str(&rows[idx]);
        out.push('\n');
    }
    out
}

/// Load `data/breast-cancer.libsvm`, normalize on the training split, and
/// return `(train, test)` with the 546/137 sizes.
pub fn load_breast_cancer() -> (Dataset<f64>, Dataset<f64>) {
    let path = workspace_path("data/breast-cancer.libsvm");
    let ds: Dataset<f64> = dataset::load_libsvm(path, DimSpec::Auto).expect("dataset present");
    assert_eq!(ds.d(), 10);
    assert_eq!(ds.len(), 683);
    let (train_raw, test_raw) = dataset::split_train_val(&ds, 0.8, 20).unwrap();
    assert_eq!(train_raw.len(), 546);
    assert_eq!(test_raw.len(), 137);
    let (train, norm) = dataset::normalize(&train_raw).unwrap();
    let (test, _) = dataset::apply_normalization(&test_raw, &norm);
    (train, test)
}

/// Random binary dataset: two Gaussian-ish classes with per-feature overlap.
pub fn random_binary_dataset(seed: u64, n: usize, d: usize) -> Dataset<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sep: Vec<f64> = (0..d).map(|_| rng.gen_range(0.05..0.45)).collect();
    let points = (0..n)
        .map(|i| {
            let label = u8::from(i % 2 == 1);
            let shift = if label == 1 { 1.0 } else { -1.0 };
            let features = (0..d)
                .map(|j| (0.5 + shift * sep[j] / 2.0 + 0.22 * gauss(&mut rng)).clamp(0.0, 1.0))
                .collect();
            DataPoint { features, label }
        })
        .collect();
    Dataset::new(points, None).unwrap()
}

/// Random small GBDT of stumps for attack oracles: `<= max_trees` stumps over
/// `<= max_features` features, thresholds in (0.1, 0.9), leaves in (-1, 1).
pub fn random_stump_ensemble(seed: u64, max_trees: usize, max_features: usize) -> TreeEnsembleModel<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = rng.gen_range(2..=max_features);
    let k = rng.gen_range(1..=max_trees);
    let trees = (0..k)
        .map(|_| {
            let f = rng.gen_range(0..d);
            let t = rng.gen_range(0.1..0.9);
            let a = rng.gen_range(-1.0..1.0);
            let b = rng.gen_range(-1.0..1.0);
            Tree::stump(f, t, a, b)
        })
        .collect();
    TreeEnsembleModel::Gbdt(GbdtModel {
        trees,
        learning_rate: 1.0,
        base_score: 0.0,
        lambda: 0.0,
        gamma: 0.0,
        n_features: d,
        feature_names: None,
        normalization: None,
    })
}

/// Uniform random point in `[0,1]^d`.
pub fn random_point(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    (0..d).map(|_| rng.gen::<f64>()).collect()
}

/// Synthetic cost-sensitive detection task for the cost-family check,
/// shaped like count-style abuse features: malicious points sit high,
/// increasing a count is negligible-cost for the attacker, decreasing costs
/// low-to-medium, and two anchor features cannot be decreased at all.
pub struct CostSensitiveTask {
    pub train: Dataset<f64>,
    pub test: Dataset<f64>,
    pub constraint: BoxConstraint<f64>,
}

pub fn cost_sensitive_task(seed: u64) -> CostSensitiveTask {
    let d = 12usize;
    // (decrease, increase) categories per feature
    let categories: Vec<(CostCategory, CostCategory)> = (0..d)
        .map(|j| {
            if j < 6 {
                (CostCategory::Low, CostCategory::Negligible)
            } else if j < 10 {
                (CostCategory::Medium, CostCategory::Negligible)
            } else {
                (CostCategory::High, CostCategory::Negligible)
            }
        })
        .collect();
    // M2 variables
    let variables = CostVariables {
        alpha: 0.12,
        beta: 0.06,
        gamma: 0.03,
        mu: 0.0,
    };
    let constraint = BoxConstraint::from_categories(categories, variables).unwrap();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // counts-like features: 25 levels on [0, 1]
    let mut make = |n: usize| {
        let points = (0..n)
            .map(|i| {
                let label = u8::from(i % 2 == 1);
                let mut features: Vec<f64> = (0..d)
                    .map(|j| {
                        let gap = if j < 10 { 0.14 } else { 0.20 };
                        let center = if label == 1 { 0.38 + gap } else { 0.38 - gap };
                        (center + 0.17 * gauss(&mut rng)).clamp(0.0, 1.0)
                    })
                    .collect();
                // occasional benign-looking measurement on a malicious point
                // and vice versa keeps natural thresholds tight to the data
                if rng.gen::<f64>() < 0.15 {
                    let j = rng.gen_range(0..d);
                    features[j] = if label == 1 {
                        rng.gen_range(0.0..0.3)
                    } else {
                        rng.gen_range(0.5..0.8)
                    };
                }
                for v in features.iter_mut() {
                    *v = (*v * 24.0).round() / 24.0;
                }
                DataPoint { features, label }
            })
            .collect();
        Dataset::new(points, None).unwrap()
    };
    CostSensitiveTask {
        train: make(900),
        test: make(300),
        constraint,
    }
}

/// Malicious test points, the paper's attack population for the cost study.
pub fn malicious_indices(ds: &Dataset<f64>, n: usize, seed: u64) -> Vec<usize> {
    let mut ids: Vec<usize> = (0..ds.len()).filter(|&i| ds.point(i).label == 1).collect();
    use rand::seq::SliceRandom;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ids.shuffle(&mut rng);
    ids.truncate(n);
    ids
}
