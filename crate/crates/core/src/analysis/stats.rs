use serde::{Deserialize, Serialize};

use super::wilcoxon::{wilcoxon_rank_sum, WilcoxonOutcome};
use crate::error::Result;

/// Mean, best (minimum) and sample standard deviation of final costs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub runs: usize,
    pub mean: f64,
    pub best: f64,
    /// Bessel-corrected; 0 for a single run.
    pub std_dev: f64,
}

impl SummaryStats {
    /// `None` for an empty sample.
    pub fn from_sample(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let best = values.iter().copied().fold(f64::INFINITY, f64::min);
        let std_dev = if values.len() < 2 {
            0.0
        } else {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        };
        Some(Self {
            runs: values.len(),
            mean,
            best,
            std_dev,
        })
    }

    /// Relative gap of the mean to a known optimum, in percent.
    pub fn mean_gap_percent(&self, optimum: f64) -> f64 {
        100.0 * (self.mean - optimum) / optimum
    }
}

/// Per-task comparison of solver `a` against solver `b` on minimization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComparisonOutcome {
    pub a: SummaryStats,
    pub b: SummaryStats,
    pub wilcoxon: WilcoxonOutcome,
}

impl ComparisonOutcome {
    pub fn a_wins_on_mean(&self) -> bool {
        self.a.mean < self.b.mean
    }
}

pub fn compare(a: &[f64], b: &[f64]) -> Result<ComparisonOutcome> {
    let wilcoxon = wilcoxon_rank_sum(a, b)?;
    Ok(ComparisonOutcome {
        a: SummaryStats::from_sample(a).expect("non-empty after wilcoxon check"),
        b: SummaryStats::from_sample(b).expect("non-empty after wilcoxon check"),
        wilcoxon,
    })
}
