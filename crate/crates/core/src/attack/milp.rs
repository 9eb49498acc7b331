//! MILP encoding of minimal-cost evasion and a CPLEX-LP-format emitter.
//!
//! Variables are the model's predicates and leaves: one binary `p_{j}_{k}`
//! per (feature, threshold) meaning `x~^j < t_k`, one binary `z_{t}_{l}` per
//! leaf. Constraints enforce threshold ordering, one active leaf per tree,
//! leaf-to-path consistency, and the mislabel condition at the 0.5 cutoff.
//! The objective is linear (L-infinity via a single bound variable, L1 and
//! weighted costs via split positive/negative per-feature deltas); L2 is
//! emitted as a quadratic-objective block for QP-capable solvers.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::ensemble::TreeEnsembleModel;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::space::{build_interval_space, ThresholdIntervalSpace};
use super::{AttackObjective, AttackOptions, ObjectiveKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug)]
pub struct LinearTerm<S> {
    pub coef: S,
    pub var: String,
}

#[derive(Clone, Debug)]
pub struct MilpConstraint<S> {
    pub name: String,
    pub terms: Vec<LinearTerm<S>>,
    pub sense: Sense,
    pub rhs: S,
}

/// A mixed integer (or quadratic, for L2) program encoding evasion of one
/// point. `fixed_zero` lists delta variables pinned to zero by infinite
/// attack weights.
#[derive(Clone, Debug)]
pub struct MilpProgram<S> {
    pub minimize_linear: Vec<LinearTerm<S>>,
    /// Coefficients of squared terms, rendered inside the `[ ... ] / 2` block.
    pub minimize_quadratic: Vec<LinearTerm<S>>,
    pub constraints: Vec<MilpConstraint<S>>,
    pub binaries: Vec<String>,
    pub fixed_zero: Vec<String>,
}

fn pvar(feature: usize, k: usize) -> String {
    format!("p_{feature}_{k}")
}

fn zvar(tree: usize, leaf_node: usize) -> String {
    format!("z_{tree}_{leaf_node}")
}

fn dinc(feature: usize) -> String {
    format!("dinc_{feature}")
}

fn ddec(feature: usize) -> String {
    format!("ddec_{feature}")
}

/// Encode the evasion of `(x, y)` against `model` as a MILP.
pub fn encode_milp<S: Scalar>(
    model: &TreeEnsembleModel<S>,
    x: &[S],
    y: u8,
    objective: &AttackObjective<S>,
    opts: &AttackOptions<S>,
) -> Result<MilpProgram<S>> {
    objective.check_dimension(x.len())?;
    if model.trees().is_empty() {
        return Err(Error::InvalidArgument(
            "cannot encode an empty ensemble".into(),
        ));
    }
    let kind = objective.kind();
    let space = build_interval_space(model);
    let mut prog = MilpProgram {
        minimize_linear: Vec::new(),
        minimize_quadratic: Vec::new(),
        constraints: Vec::new(),
        binaries: Vec::new(),
        fixed_zero: Vec::new(),
    };

    // predicate variables and threshold ordering
    for j in 0..space.feature_count() {
        let ts = space.thresholds(j);
        for k in 0..ts.len() {
            prog.binaries.push(pvar(j, k));
        }
        for k in 0..ts.len().saturating_sub(1) {
            prog.constraints.push(MilpConstraint {
                name: format!("order_{j}_{k}"),
                terms: vec![
                    LinearTerm {
                        coef: S::one(),
                        var: pvar(j, k),
                    },
                    LinearTerm {
                        coef: -S::one(),
                        var: pvar(j, k + 1),
                    },
                ],
                sense: Sense::Le,
                rhs: S::zero(),
            });
        }
    }

    // leaf variables: one active leaf per tree, each implying its path
    let mut mislabel_terms: Vec<LinearTerm<S>> = Vec::new();
    for (ti, tree) in model.trees().iter().enumerate() {
        let leaves = tree.leaves_with_paths();
        let mut sum_terms = Vec::with_capacity(leaves.len());
        for leaf in &leaves {
            let z = zvar(ti, leaf.node);
            prog.binaries.push(z.clone());
            sum_terms.push(LinearTerm {
                coef: S::one(),
                var: z.clone(),
            });
            mislabel_terms.push(LinearTerm {
                coef: leaf.value,
                var: z.clone(),
            });
            for (step, &(feature, threshold, goes_left)) in leaf.path.iter().enumerate() {
                let k = space
                    .thresholds(feature)
                    .partition_point(|&t| t < threshold);
                debug_assert!(space.thresholds(feature)[k] == threshold);
                let (terms, rhs) = if goes_left {
                    // z <= p
                    (
                        vec![
                            LinearTerm {
                                coef: S::one(),
                                var: z.clone(),
                            },
                            LinearTerm {
                                coef: -S::one(),
                                var: pvar(feature, k),
                            },
                        ],
                        S::zero(),
                    )
                } else {
                    // z <= 1 - p
                    (
                        vec![
                            LinearTerm {
                                coef: S::one(),
                                var: z.clone(),
                            },
                            LinearTerm {
                                coef: S::one(),
                                var: pvar(feature, k),
                            },
                        ],
                        S::one(),
                    )
                };
                prog.constraints.push(MilpConstraint {
                    name: format!("path_{ti}_{}_{step}", leaf.node),
                    terms,
                    sense: Sense::Le,
                    rhs,
                });
            }
        }
        prog.constraints.push(MilpConstraint {
            name: format!("one_leaf_{ti}"),
            terms: sum_terms,
            sense: Sense::Eq,
            rhs: S::one(),
        });
    }

    // mislabel: tree-sum on the wrong side of the cutoff margin
    let rhs = model.flip_rhs_at(opts.cutoff);
    if y == 0 {
        prog.constraints.push(MilpConstraint {
            name: "mislabel".into(),
            terms: mislabel_terms,
            sense: Sense::Ge,
            rhs,
        });
    } else {
        prog.constraints.push(MilpConstraint {
            name: "mislabel".into(),
            terms: mislabel_terms,
            sense: Sense::Le,
            rhs: rhs - opts.margin_slack,
        });
    }

    // objective and delta linking
    for j in 0..space.feature_count() {
        let ts = space.thresholds(j);
        if ts.is_empty() {
            continue;
        }
        let (w_inc, w_dec) = objective.weights(j);
        match kind {
            ObjectiveKind::Linf => {
                for (k, &t) in ts.iter().enumerate() {
                    if t > x[j] {
                        // b >= (t - x)(1 - p)
                        let c = t - x[j];
                        prog.constraints.push(MilpConstraint {
                            name: format!("bound_up_{j}_{k}"),
                            terms: vec![
                                LinearTerm {
                                    coef: S::one(),
                                    var: "b".into(),
                                },
                                LinearTerm {
                                    coef: c,
                                    var: pvar(j, k),
                                },
                            ],
                            sense: Sense::Ge,
                            rhs: c,
                        });
                    } else {
                        // b >= (x - t + eps) p
                        let c = x[j] - t + opts.delta_eps;
                        prog.constraints.push(MilpConstraint {
                            name: format!("bound_down_{j}_{k}"),
                            terms: vec![
                                LinearTerm {
                                    coef: S::one(),
                                    var: "b".into(),
                                },
                                LinearTerm {
                                    coef: -c,
                                    var: pvar(j, k),
                                },
                            ],
                            sense: Sense::Ge,
                            rhs: S::zero(),
                        });
                    }
                }
            }
            _ => {
                for (k, &t) in ts.iter().enumerate() {
                    if t > x[j] {
                        // dinc_j >= (t - x)(1 - p)
                        let c = t - x[j];
                        prog.constraints.push(MilpConstraint {
                            name: format!("delta_up_{j}_{k}"),
                            terms: vec![
                                LinearTerm {
                                    coef: S::one(),
                                    var: dinc(j),
                                },
                                LinearTerm {
                                    coef: c,
                                    var: pvar(j, k),
                                },
                            ],
                            sense: Sense::Ge,
                            rhs: c,
                        });
                    } else {
                        // ddec_j >= (x - t + eps) p
                        let c = x[j] - t + opts.delta_eps;
                        prog.constraints.push(MilpConstraint {
                            name: format!("delta_down_{j}_{k}"),
                            terms: vec![
                                LinearTerm {
                                    coef: S::one(),
                                    var: ddec(j),
                                },
                                LinearTerm {
                                    coef: -c,
                                    var: pvar(j, k),
                                },
                            ],
                            sense: Sense::Ge,
                            rhs: S::zero(),
                        });
                    }
                }
                match kind {
                    ObjectiveKind::L1 => {
                        prog.minimize_linear.push(LinearTerm {
                            coef: S::one(),
                            var: dinc(j),
                        });
                        prog.minimize_linear.push(LinearTerm {
                            coef: S::one(),
                            var: ddec(j),
                        });
                    }
                    ObjectiveKind::L2 => {
                        // 1 * d^2, written as [ 2 d^2 ] / 2
                        prog.minimize_quadratic.push(LinearTerm {
                            coef: S::one(),
                            var: dinc(j),
                        });
                        prog.minimize_quadratic.push(LinearTerm {
                            coef: S::one(),
                            var: ddec(j),
                        });
                    }
                    ObjectiveKind::Weighted => {
                        if w_inc.is_finite() {
                            prog.minimize_linear.push(LinearTerm {
                                coef: w_inc,
                                var: dinc(j),
                            });
                        } else {
                            prog.fixed_zero.push(dinc(j));
                        }
                        if w_dec.is_finite() {
                            prog.minimize_linear.push(LinearTerm {
                                coef: w_dec,
                                var: ddec(j),
                            });
                        } else {
                            prog.fixed_zero.push(ddec(j));
                        }
                    }
                    ObjectiveKind::Linf => unreachable!(),
                }
            }
        }
    }
    if kind == ObjectiveKind::Linf {
        prog.minimize_linear.push(LinearTerm {
            coef: S::one(),
            var: "b".into(),
        });
    }

    Ok(prog)
}

fn fmt_scalar<S: Scalar>(v: S) -> String {
    format!("{}", v.cast_f64())
}

/// Render the program in CPLEX LP text format.
pub fn lp_string<S: Scalar>(prog: &MilpProgram<S>) -> String {
    let mut out = String::new();
    out.push_str("\\ tree-ensemble evasion MILP\n");
    out.push_str("Minimize\n obj:");
    if prog.minimize_linear.is_empty() && prog.minimize_quadratic.is_empty() {
        out.push_str(" 0 b");
    }
    for t in &prog.minimize_linear {
        let _ = write!(out, " {}", term_str(t.coef.cast_f64(), &t.var, false));
    }
    if !prog.minimize_quadratic.is_empty() {
        out.push_str(" [");
        for t in &prog.minimize_quadratic {
            let doubled = t.coef.cast_f64() * 2.0;
            let _ = write!(out, " {}", term_str(doubled, &t.var, true));
        }
        out.push_str(" ] / 2");
    }
    out.push('\n');
    out.push_str("Subject To\n");
    for c in &prog.constraints {
        let _ = write!(out, " {}:", c.name);
        for t in &c.terms {
            let _ = write!(out, " {}", term_str(t.coef.cast_f64(), &t.var, false));
        }
        let sense = match c.sense {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        };
        let _ = writeln!(out, " {sense} {}", fmt_scalar(c.rhs));
    }
    if !prog.fixed_zero.is_empty() {
        out.push_str("Bounds\n");
        for v in &prog.fixed_zero {
            let _ = writeln!(out, " {v} = 0");
        }
    }
    out.push_str("Binaries\n");
    for b in &prog.binaries {
        let _ = writeln!(out, " {b}");
    }
    out.push_str("End\n");
    out
}

/// One signed term, with the sign folded into the leading operator so the
/// expression reads `3 x - 2 y + z`.
fn term_str(coef: f64, var: &str, squared: bool) -> String {
    let suffix = if squared { " ^2" } else { "" };
    if coef < 0.0 {
        format!("- {} {}{}", -coef, var, suffix)
    } else {
        format!("+ {coef} {var}{suffix}")
    }
}

/// Write the LP file.
pub fn emit_lp<S: Scalar>(prog: &MilpProgram<S>, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, lp_string(prog))?;
    Ok(())
}

/// Decode a concrete adversarial point into an assignment of every program
/// variable (predicates, leaves, deltas, bound).
pub fn decode_assignment<S: Scalar>(
    model: &TreeEnsembleModel<S>,
    x: &[S],
    x_adv: &[S],
    objective: &AttackObjective<S>,
) -> HashMap<String, f64> {
    let space: ThresholdIntervalSpace<S> = build_interval_space(model);
    let mut assign = HashMap::new();
    let mut linf: f64 = 0.0;
    for j in 0..space.feature_count() {
        let ts = space.thresholds(j);
        for (k, &t) in ts.iter().enumerate() {
            assign.insert(pvar(j, k), f64::from(x_adv[j] < t));
        }
        if !ts.is_empty() {
            let delta = (x_adv[j] - x[j]).cast_f64();
            assign.insert(dinc(j), delta.max(0.0));
            assign.insert(ddec(j), (-delta).max(0.0));
            linf = linf.max(delta.abs());
        }
    }
    assign.insert("b".into(), linf);
    for (ti, tree) in model.trees().iter().enumerate() {
        // walk to the active leaf
        let mut idx = 0usize;
        loop {
            match &tree.nodes[idx] {
                crate::ensemble::TreeNode::Internal {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    idx = if x_adv[*feature] < *threshold {
                        *left
                    } else {
                        *right
                    };
                }
                crate::ensemble::TreeNode::Leaf { .. } => break,
            }
        }
        for leaf in tree.leaves_with_paths() {
            assign.insert(zvar(ti, leaf.node), f64::from(leaf.node == idx));
        }
    }
    let _ = objective; // weights do not enter the assignment itself
    assign
}

/// Check an assignment against every constraint (and fixed-zero bound).
/// Returns the names of violated constraints; empty means consistent.
pub fn check_assignment<S: Scalar>(
    prog: &MilpProgram<S>,
    assign: &HashMap<String, f64>,
    tol: f64,
) -> Vec<String> {
    let mut violated = Vec::new();
    for c in &prog.constraints {
        let lhs: f64 = c
            .terms
            .iter()
            .map(|t| t.coef.cast_f64() * assign.get(&t.var).copied().unwrap_or(0.0))
            .sum();
        let rhs = c.rhs.cast_f64();
        let ok = match c.sense {
            Sense::Le => lhs <= rhs + tol,
            Sense::Ge => lhs >= rhs - tol,
            Sense::Eq => (lhs - rhs).abs() <= tol,
        };
        if !ok {
            violated.push(c.name.clone());
        }
    }
    for v in &prog.fixed_zero {
        if assign.get(v).copied().unwrap_or(0.0).abs() > tol {
            violated.push(format!("fixed_zero:{v}"));
        }
    }
    violated
}
