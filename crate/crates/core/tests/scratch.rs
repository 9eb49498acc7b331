//! Temporary probes used while tuning the generator; removed before release.

mod common;

use costtrees::attack::{exact_attack, AttackLimits, AttackObjective, AttackOptions, AttackResult};
use costtrees::costspec::CostConstraint;
use costtrees::ensemble::{train_gbdt, TrainParams, TreeEnsembleModel};
use costtrees::metrics::accuracy_fpr;

#[test]
#[ignore]
fn probe_gbdt_train_and_attack() {
    let (train, test) = common::load_breast_cancer();
    let params = TrainParams {
        trees: 4,
        max_depth: 8,
        seed: 1,
        ..TrainParams::default()
    };
    let t0 = std::time::Instant::now();
    let natural: TreeEnsembleModel<f64> = train_gbdt(&train, &params, None).unwrap().into();
    println!("natural train: {:?}", t0.elapsed());
    let (acc, fpr) = accuracy_fpr(&natural, &test, 0.5).unwrap();
    println!("natural acc {acc:.2} fpr {fpr:?}");
    let n_thresholds: usize = {
        let space = costtrees::attack::build_interval_space(&natural);
        (0..10).map(|j| space.thresholds(j).len()).sum()
    };
    println!("natural thresholds total: {n_thresholds}");

    let t1 = std::time::Instant::now();
    let robust: TreeEnsembleModel<f64> =
        train_gbdt(&train, &params, Some(&CostConstraint::uniform_box(0.3)))
            .unwrap()
            .into();
    println!("robust train: {:?}", t1.elapsed());
    let (acc_r, fpr_r) = accuracy_fpr(&robust, &test, 0.5).unwrap();
    println!("robust acc {acc_r:.2} fpr {fpr_r:?}");
    let space = costtrees::attack::build_interval_space(&robust);
    let nt: usize = (0..10).map(|j| space.thresholds(j).len()).sum();
    println!("robust thresholds total: {nt}");

    let opts = AttackOptions {
        limits: AttackLimits {
            max_nodes: 3_000_000,
            time_budget: None,
        },
        ..AttackOptions::default()
    };
    let ids = test.sample_indices(10, 7);
    for model_name in ["natural", "robust"] {
        let model = if model_name == "natural" { &natural } else { &robust };
        let t = std::time::Instant::now();
        let recs = costtrees::attack::batch_attack(model, &test, &ids, &AttackObjective::Linf, &opts).unwrap();
        let sum = costtrees::metrics::robustness_summary(&recs).unwrap();
        println!(
            "{model_name}: mean {:.4} over {} attacked ({} infeasible, {} limit) in {:?}",
            sum.mean_objective, sum.attacked_correct, sum.infeasible, sum.limit_exceeded, t.elapsed()
        );
    }
}

#[test]
#[ignore]
fn probe_rf() {
    let (train, test) = common::load_breast_cancer();
    let rf_nat = TrainParams { trees: 20, max_depth: 4, seed: 2, ..TrainParams::default() };
    let t0 = std::time::Instant::now();
    let natural: TreeEnsembleModel<f64> =
        costtrees::ensemble::train_random_forest(&train, &rf_nat, None).unwrap().into();
    println!("rf natural train: {:?}", t0.elapsed());
    let (acc, fpr) = accuracy_fpr(&natural, &test, 0.5).unwrap();
    println!("rf natural acc {acc:.2} fpr {fpr:?}");

    let rf_rob = TrainParams { trees: 80, max_depth: 8, seed: 2, ..TrainParams::default() };
    let t1 = std::time::Instant::now();
    let robust: TreeEnsembleModel<f64> = costtrees::ensemble::train_random_forest(
        &train, &rf_rob, Some(&CostConstraint::uniform_box(0.3))).unwrap().into();
    println!("rf robust train: {:?}", t1.elapsed());
    let (acc_r, fpr_r) = accuracy_fpr(&robust, &test, 0.5).unwrap();
    println!("rf robust acc {acc_r:.2} fpr {fpr_r:?}");
    for (name, m) in [("nat", &natural), ("rob", &robust)] {
        let space = costtrees::attack::build_interval_space(m);
        let nt: usize = (0..10).map(|j| space.thresholds(j).len()).sum();
        println!("rf {name} thresholds total: {nt}");
    }

    let opts = AttackOptions {
        limits: AttackLimits { max_nodes: 3_000_000, time_budget: None },
        ..AttackOptions::default()
    };
    let ids = test.sample_indices(10, 7);
    for (name, model) in [("nat", &natural), ("rob", &robust)] {
        let t = std::time::Instant::now();
        let mut timeouts = 0;
        for &id in &ids {
            let p = test.point(id);
            let r = exact_attack(model, &p.features, p.label, &AttackObjective::Linf, &opts).unwrap();
            if matches!(r, AttackResult::LimitExceeded { .. }) { timeouts += 1; }
        }
        println!("rf {name}: 10 attacks in {:?} ({timeouts} hit limit)", t.elapsed());
    }
}


#[test]
#[ignore]
fn sweep_shapes() {
    use costtrees::dataset::{self, DimSpec};
    use costtrees::attack::batch_attack;
    use costtrees::metrics::robustness_summary;
    for out in [0.10f64, 0.11, 0.12, 0.13] {
        for shift in [-0.7f64, -1.0] {
            let msd = shift; // reuse printing slot
            let shape = common::BcShape { rho: 0.25, benign_sd: 1.0, malignant_sd: 1.3, outlier_rate: out, malignant_shift: shift, strong_boost: 0.0 };
            let text = common::breast_cancer_libsvm_shaped(&shape);
            let ds: costtrees::Dataset = dataset::load_libsvm_str(&text, DimSpec::Auto).unwrap();
            let (train_raw, test_raw) = dataset::split_train_val(&ds, 0.8, 20).unwrap();
            let (train, norm) = dataset::normalize(&train_raw).unwrap();
            let (test, _) = dataset::apply_normalization(&test_raw, &norm);
            let opts = AttackOptions::default();
            let ids = test.sample_indices(100, 7);

            let gp = TrainParams { trees: 4, max_depth: 8, seed: 1, ..TrainParams::default() };
            let gn: TreeEnsembleModel<f64> = train_gbdt(&train, &gp, None).unwrap().into();
            let gr: TreeEnsembleModel<f64> =
                train_gbdt(&train, &gp, Some(&CostConstraint::uniform_box(0.3))).unwrap().into();
            let (acc_gn, _) = accuracy_fpr(&gn, &test, 0.5).unwrap();
            let sn = robustness_summary(&batch_attack(&gn, &test, &ids, &AttackObjective::Linf, &opts).unwrap()).unwrap();
            let sr = robustness_summary(&batch_attack(&gr, &test, &ids, &AttackObjective::Linf, &opts).unwrap()).unwrap();

            let rpn = TrainParams { trees: 20, max_depth: 4, seed: 2, ..TrainParams::default() };
            let rpr = TrainParams { trees: 80, max_depth: 8, seed: 2, ..TrainParams::default() };
            let fn_: TreeEnsembleModel<f64> = costtrees::ensemble::train_random_forest(&train, &rpn, None).unwrap().into();
            let fr: TreeEnsembleModel<f64> = costtrees::ensemble::train_random_forest(
                &train, &rpr, Some(&CostConstraint::uniform_box(0.3))).unwrap().into();
            let (acc_fn, _) = accuracy_fpr(&fn_, &test, 0.5).unwrap();
            let sfn = robustness_summary(&batch_attack(&fn_, &test, &ids, &AttackObjective::Linf, &opts).unwrap()).unwrap();
            let sfr = robustness_summary(&batch_attack(&fr, &test, &ids, &AttackObjective::Linf, &opts).unwrap()).unwrap();
            println!(
                "out={out} msd={msd}: gbdt acc {acc_gn:.2} linf {:.3}->{:.3} ({:.2}x) | rf acc {acc_fn:.2} linf {:.3}->{:.3} ({:.2}x)",
                sn.mean_objective, sr.mean_objective, sr.mean_objective / sn.mean_objective,
                sfn.mean_objective, sfr.mean_objective, sfr.mean_objective / sfn.mean_objective,
            );
        }
    }
}


#[test]
#[ignore]
fn rf_seed_stability() {
    use costtrees::dataset::{self, DimSpec};
    use costtrees::attack::batch_attack;
    use costtrees::metrics::robustness_summary;
    let bsd: f64 = std::env::var("BSD").ok().and_then(|v| v.parse().ok()).unwrap_or(1.0);
    let shape = common::BcShape { rho: 0.25, benign_sd: bsd, malignant_sd: 1.3, outlier_rate: 0.10, malignant_shift: -1.0, strong_boost: 0.0 };
    let text = common::breast_cancer_libsvm_shaped(&shape);
    let ds: costtrees::Dataset = dataset::load_libsvm_str(&text, DimSpec::Auto).unwrap();
    let (train_raw, test_raw) = dataset::split_train_val(&ds, 0.8, 20).unwrap();
    let (train, norm) = dataset::normalize(&train_raw).unwrap();
    let (test, _) = dataset::apply_normalization(&test_raw, &norm);
    let opts = AttackOptions::default();
    let ids = test.sample_indices(100, 7);
    for seed in 1..=6u64 {
        let msl = std::env::var("MSL").ok().and_then(|v| v.parse().ok()).unwrap_or(1usize);
        let rpn = TrainParams { trees: 20, max_depth: 4, seed, min_samples_leaf: msl, ..TrainParams::default() };
        let rpr = TrainParams { trees: 80, max_depth: 8, seed, min_samples_leaf: msl, ..TrainParams::default() };
        let fn_: TreeEnsembleModel<f64> = costtrees::ensemble::train_random_forest(&train, &rpn, None).unwrap().into();
        let fr: TreeEnsembleModel<f64> = costtrees::ensemble::train_random_forest(
            &train, &rpr, Some(&CostConstraint::uniform_box(0.3))).unwrap().into();
        let (acc_fn, _) = accuracy_fpr(&fn_, &test, 0.5).unwrap();
        let sfn = robustness_summary(&batch_attack(&fn_, &test, &ids, &AttackObjective::Linf, &opts).unwrap()).unwrap();
        let sfr = robustness_summary(&batch_attack(&fr, &test, &ids, &AttackObjective::Linf, &opts).unwrap()).unwrap();
        println!("seed={seed}: rf acc {acc_fn:.2} linf {:.3}->{:.3} ({:.2}x)",
            sfn.mean_objective, sfr.mean_objective, sfr.mean_objective / sfn.mean_objective);
    }
}


#[test]
#[ignore]
fn probe_greedy_vs_natural() {
    use costtrees::splitter::{sample_oracle_instances, ScoreFunction};
    let (train, _) = common::load_breast_cancer();
    let constraint = CostConstraint::uniform_box(0.3);
    for (name, sf, seed) in [
        ("gini", ScoreFunction::Gini, 101u64),
        ("xgb", ScoreFunction::XgbLoss { lambda: 1.0, gamma: 0.0 }, 202),
    ] {
        let instances = sample_oracle_instances(&train, &constraint, sf, 500, 15, seed).unwrap();
        for (i, inst) in instances.iter().enumerate() {
            if inst.greedy_score < inst.natural_score {
                println!(
                    "{name} #{i}: delta={} greedy={:.17} natural={:.17} optimal={:.17} gap={:.3e}",
                    inst.delta_size, inst.greedy_score, inst.natural_score, inst.optimal_score,
                    inst.natural_score - inst.greedy_score
                );
            }
        }
    }
}


#[test]
#[ignore]
fn probe_criterion5_failure() {
    use costtrees::attack::{exact_attack, build_interval_space, cheapest_point_in_interval};
    use rand::SeedableRng;
    let opts = AttackOptions::default();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(777);
    for model_seed in 0..50u64 {
        let model = common::random_stump_ensemble(model_seed, 5, 4);
        let d = model.n_features();
        for point_i in 0..2 {
            let x = common::random_point(&mut rng, d);
            let y = model.predict_label(&x, 0.5).unwrap();
            let objectives = [
                AttackObjective::Linf,
                AttackObjective::L1,
                AttackObjective::L2,
                {
                    use rand::Rng;
                    let mut draw = |rng: &mut rand_chacha::ChaCha8Rng| {
                        (0..d).map(|_| if rng.gen::<f64>() < 0.15 { f64::INFINITY } else { rng.gen_range(0.2..4.0) }).collect::<Vec<f64>>()
                    };
                    AttackObjective::Weighted { inc: draw(&mut rng), dec: draw(&mut rng) }
                },
            ];
            for obj in &objectives {
                let got = exact_attack(&model, &x, y, obj, &opts).unwrap();
                // enumeration
                let space = build_interval_space(&model);
                let counts: Vec<usize> = (0..d).map(|j| space.interval_count(j)).collect();
                let mut indices = vec![0usize; d];
                let mut best: Option<(f64, Vec<f64>)> = None;
                'outer: loop {
                    let mut point = x.clone();
                    let mut ok = true;
                    for j in 0..d {
                        let (v, c) = cheapest_point_in_interval(x[j], space.interval(j, indices[j]), j, obj, opts.delta_eps);
                        if !c.is_finite() { ok = false; break; }
                        point[j] = v;
                    }
                    if ok && model.predict_label(&point, 0.5).unwrap() != y {
                        let cost = obj.cost(&x, &point);
                        if best.as_ref().map_or(true, |b| cost < b.0) { best = Some((cost, point)); }
                    }
                    let mut j = 0;
                    loop {
                        if j == d { break 'outer; }
                        indices[j] += 1;
                        if indices[j] < counts[j] { break; }
                        indices[j] = 0;
                        j += 1;
                    }
                }
                let got_obj = match &got {
                    costtrees::attack::AttackResult::Adversarial(a) => Some(a.objective),
                    _ => None,
                };
                let want_obj = best.as_ref().map(|b| b.0);
                let bad = match (got_obj, want_obj) {
                    (Some(a), Some(b)) => (a - b).abs() > 1e-9,
                    (None, None) => false,
                    _ => true,
                };
                if bad {
                    println!("model {model_seed} point {point_i} obj {obj:?}: exact {got_obj:?} vs enum {want_obj:?}");
                    println!("  x = {x:?} y = {y}");
                    println!("  best point: {:?}", best.as_ref().map(|b| &b.1));
                    println!("  model: {}", costtrees::ensemble::model_to_json(&model).unwrap());
                    return;
                }
            }
        }
    }
    println!("no failures");
}


#[test]
#[ignore]
fn probe_criterion8() {
    use costtrees::attack::{adaptive_weights_from_box, batch_attack};
    use costtrees::costspec::CostFamily;
    use costtrees::metrics::robustness_summary;
    let task = common::cost_sensitive_task(4242);
    for (k, depth) in [(12usize, 4usize), (20, 5)] {
        let params = TrainParams { trees: k, max_depth: depth, seed: 3, min_samples_leaf: 2, ..TrainParams::default() };
        let t0 = std::time::Instant::now();
        let natural: TreeEnsembleModel<f64> = train_gbdt(&task.train, &params, None).unwrap().into();
        let t1 = std::time::Instant::now();
        let robust: TreeEnsembleModel<f64> = train_gbdt(&task.train, &params,
            Some(&CostConstraint::Box(task.constraint.clone()))).unwrap().into();
        let t2 = std::time::Instant::now();
        let objective = adaptive_weights_from_box(&task.constraint, CostFamily::Cost1).unwrap();
        let mut opts = AttackOptions::default();
        opts.limits.max_nodes = 2_000_000;
        let ids = common::malicious_indices(&task.test, 100, 7);
        let rec_n = batch_attack(&natural, &task.test, &ids, &objective, &opts).unwrap();
        let t3 = std::time::Instant::now();
        let rec_r = batch_attack(&robust, &task.test, &ids, &objective, &opts).unwrap();
        let t4 = std::time::Instant::now();
        let sn = robustness_summary(&rec_n).unwrap();
        let sr = robustness_summary(&rec_r).unwrap();
        let (acc_n, _) = accuracy_fpr(&natural, &task.test, 0.5).unwrap();
        let (acc_r, _) = accuracy_fpr(&robust, &task.test, 0.5).unwrap();
        println!("K={k} depth={depth}: acc {acc_n:.2}/{acc_r:.2} cost1 {:.4} ({} att, {} inf, {} lim) -> {:.4} ({} att, {} inf, {} lim) ratio {:.2}x",
            sn.mean_objective, sn.attacked_correct, sn.infeasible, sn.limit_exceeded,
            sr.mean_objective, sr.attacked_correct, sr.infeasible, sr.limit_exceeded,
            sr.mean_objective / sn.mean_objective);
        println!("  train {:?}/{:?} attacks {:?}/{:?}", t1-t0, t2-t1, t3-t2, t4-t3);
    }
}
