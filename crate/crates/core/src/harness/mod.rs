//! Experiment orchestration: built-in test cases, seeded runs, one JSON
//! record per run, and report generation from persisted records.

mod cases;
mod experiment;
mod report;
mod store;

pub use cases::{builtin_test_cases, find_test_case, known_optimum, TestCase, KNOWN_OPTIMA};
pub use experiment::{
    instance_path, load_instances, opt_tour_path, run_experiment, run_single, ExperimentConfig,
    ExperimentSummary,
};
pub use report::{
    best_tour_sources, complementarity_tables, transfer_table, ComparisonRow,
    ComplementarityTables, Report, ReportFormat, SummaryRow, TourSource, TransferTable,
    WinLossRow,
};
pub use store::{load_records, read_record, record_file_name, write_record, LoadedRecords};
