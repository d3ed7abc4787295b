//! Post-run analysis over persisted run outputs.

mod complementarity;
mod stats;
mod transfer;
mod wilcoxon;

pub use complementarity::{best_solution_overlap, node_overlap_matrix};
pub use stats::{compare, ComparisonOutcome, SummaryStats};
pub use transfer::{aggregate_transfer, pair_intensities, PairIntensity};
pub use wilcoxon::{
    exact_u_lower_tail, normal_cdf, wilcoxon_rank_sum, WilcoxonOutcome, Z_CRITICAL,
};
