use zopt_core::stats::{mean, std_population};

use crate::plan::Algorithm;
use crate::runner::RunRecord;

/// Mean and population standard deviation of the final best values of one
/// `(algorithm, function, dimension)` group.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub algo: Algorithm,
    pub function: String,
    pub dim: usize,
    pub mean_best: f64,
    pub std_best: f64,
    pub mean_elapsed_ms: f64,
    /// Successful runs the statistics are computed over.
    pub trials: usize,
    /// Failed runs in the group; a non-zero count marks the group as incomplete.
    pub failed: usize,
}

impl SummaryRow {
    pub fn is_complete(&self) -> bool {
        self.failed == 0
    }
}

/// Groups in order of first appearance. Failed runs are counted but excluded from the
/// statistics; groups with failures are logged.
pub fn summarize(records: &[RunRecord]) -> Vec<SummaryRow> {
    let mut keys: Vec<(Algorithm, &str, usize)> = Vec::new();
    for r in records {
        let k = (r.algo, r.function.as_str(), r.dim);
        if !keys.contains(&k) {
            keys.push(k);
        }
    }
    keys.into_iter()
        .map(|(algo, function, dim)| {
            let group: Vec<&RunRecord> =
                records.iter().filter(|r| r.algo == algo && r.function == function && r.dim == dim).collect();
            let finals: Vec<f64> = group.iter().filter_map(|r| r.final_best()).collect();
            let times: Vec<f64> = group.iter().filter_map(|r| r.elapsed_ms()).collect();
            let failed = group.len() - finals.len();
            if failed > 0 {
                log::warn!("{algo} on {function} (d = {dim}): {failed} of {} runs failed", group.len());
            }
            let (mean_best, std_best, mean_elapsed_ms) = if finals.is_empty() {
                (f64::NAN, f64::NAN, f64::NAN)
            } else {
                (mean(&finals), std_population(&finals), mean(&times))
            };
            SummaryRow {
                algo,
                function: function.to_string(),
                dim,
                mean_best,
                std_best,
                mean_elapsed_ms,
                trials: finals.len(),
                failed,
            }
        })
        .collect()
}

/// Fixed-width text table of the summary rows.
pub fn format_summary_table(rows: &[SummaryRow]) -> String {
    let mut out = format!(
        "{:<6} {:<12} {:>4} {:>14} {:>14} {:>14}\n",
        "algo", "function", "dim", "mean_best", "std_best", "mean_ms"
    );
    for r in rows {
        out.push_str(&format!(
            "{:<6} {:<12} {:>4} {:>14.6e} {:>14.6e} {:>14.3}{}\n",
            r.algo.id(),
            r.function,
            r.dim,
            r.mean_best,
            r.std_best,
            r.mean_elapsed_ms,
            if r.is_complete() { String::new() } else { format!("  ({} failed)", r.failed) }
        ));
    }
    out
}
