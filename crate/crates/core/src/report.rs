//! Markdown report tables mirroring the evaluation layout: model quality
//! (accuracy / FPR / AUC) next to average minimal evasion distances.

use crate::scalar::Scalar;

/// One evaluated model.
#[derive(Clone, Debug, Default)]
pub struct ModelRow {
    pub name: String,
    pub trees: usize,
    pub depth: usize,
    pub accuracy: f64,
    pub fpr: Option<f64>,
    pub auc: Option<f64>,
    /// `(objective name, mean minimal distance)` pairs, e.g. linf/l1/cost1.
    pub distances: Vec<(String, f64)>,
    /// Mean distance ratio versus a baseline row, when applicable.
    pub improvement: Option<f64>,
}

fn fmt2(v: f64) -> String {
    format!("{v:.2}")
}

fn fmt4(v: f64) -> String {
    format!("{v:.4}")
}

/// Render rows as a markdown table. Distance columns are the union of the
/// objective names seen across rows, in first-seen order.
pub fn model_table(rows: &[ModelRow]) -> String {
    let mut objectives: Vec<String> = Vec::new();
    for r in rows {
        for (name, _) in &r.distances {
            if !objectives.contains(name) {
                objectives.push(name.clone());
            }
        }
    }
    let mut header = String::from("| Model | Trees/Depth | Acc (%) | FPR (%) | AUC |");
    let mut rule = String::from("|---|---|---|---|---|");
    for o in &objectives {
        header.push_str(&format!(" Avg {o} |"));
        rule.push_str("---|");
    }
    header.push_str(" Improv. |");
    rule.push_str("---|");

    let mut out = String::new();
    out.push_str(&header);
    out.push('\n');
    out.push_str(&rule);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "| {} | {}/{} | {} | {} | {} |",
            r.name,
            r.trees,
            r.depth,
            fmt2(r.accuracy),
            r.fpr.map(fmt2).unwrap_or_else(|| "-".into()),
            r.auc.map(fmt4).unwrap_or_else(|| "-".into()),
        ));
        for o in &objectives {
            let cell = r
                .distances
                .iter()
                .find(|(name, _)| name == o)
                .map(|&(_, v)| fmt4(v))
                .unwrap_or_else(|| "-".into());
            out.push_str(&format!(" {cell} |"));
        }
        let improv = r
            .improvement
            .map(|v| format!("{v:.2}x"))
            .unwrap_or_else(|| "-".into());
        out.push_str(&format!(" {improv} |\n"));
    }
    out
}

/// Convenience: ratio of two mean distances as an improvement factor.
pub fn improvement_ratio<S: Scalar>(ours: S, baseline: S) -> Option<f64> {
    let b = baseline.cast_f64();
    (b > 0.0).then(|| ours.cast_f64() / b)
}
