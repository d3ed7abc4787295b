//! Multifactorial cellular genetic algorithm (MFCGA) for multitask TSP
//! solving, with the canonical MFEA as a baseline, TSPLIB ingestion, and
//! the analysis and experiment tooling needed to compare them.

pub mod analysis;
pub mod cellular;
pub mod error;
pub mod harness;
pub mod mfea;
pub mod mfo;
pub mod operators;
pub mod results;
pub mod tsplib;

pub use cellular::{run_mfcga, CellularConfig, CellularEngine, GridTopology, StepOutcome, Survivor};
pub use error::{Error, Result};
pub use mfea::{run_mfea, MfeaConfig, MfeaEngine};
pub use mfo::{Cost, EvalCounter, MultitaskProblem, UnifiedIndividual};
pub use operators::{order_crossover, two_opt_move, CutPair};
pub use results::{
    InvariantReport, RunMetadata, RunResults, Solver, TaskOutcome, TrajectoryPoint, TransferLedger,
};
pub use tsplib::{node_overlap, parse_opt_tour, parse_tsplib, Tour, TspInstance};
