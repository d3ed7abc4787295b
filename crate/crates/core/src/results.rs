use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mfo::{decode_genome, Cost, MultitaskProblem};
use crate::tsplib::Tour;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Solver {
    Mfcga,
    Mfea,
}

impl Solver {
    pub const ALL: [Solver; 2] = [Solver::Mfcga, Solver::Mfea];

    pub fn as_str(self) -> &'static str {
        match self {
            Solver::Mfcga => "mfcga",
            Solver::Mfea => "mfea",
        }
    }
}

impl fmt::Display for Solver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Solver {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mfcga" => Ok(Solver::Mfcga),
            "mfea" => Ok(Solver::Mfea),
            other => Err(Error::Config(format!("unknown solver `{other}`"))),
        }
    }
}

/// Positive transfer episodes: `counts[src][dst]` counts crossover offspring
/// that won a replacement on task `dst` with genetic material from a parent
/// whose skill factor is `src`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TransferLedger {
    counts: Vec<Vec<u64>>,
}

impl TransferLedger {
    pub fn new(num_tasks: usize) -> Self {
        Self {
            counts: vec![vec![0; num_tasks]; num_tasks],
        }
    }

    pub fn from_counts(counts: Vec<Vec<u64>>) -> Result<Self> {
        let k = counts.len();
        if counts.iter().any(|row| row.len() != k) {
            return Err(Error::Analysis("transfer ledger must be square".into()));
        }
        Ok(Self { counts })
    }

    pub fn num_tasks(&self) -> usize {
        self.counts.len()
    }

    pub fn record(&mut self, src: usize, dst: usize) {
        self.counts[src][dst] += 1;
    }

    pub fn get(&self, src: usize, dst: usize) -> u64 {
        self.counts[src][dst]
    }

    pub fn counts(&self) -> &[Vec<u64>] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn off_diagonal_total(&self) -> u64 {
        self.total() - (0..self.num_tasks()).map(|i| self.counts[i][i]).sum::<u64>()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub evaluations: u64,
    pub best_cost: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskOutcome {
    pub instance: String,
    pub best_cost: u64,
    pub best_tour: Tour,
    pub trajectory: Vec<TrajectoryPoint>,
}

/// Conventions a run was produced under, kept with every record so results
/// stay interpretable on their own.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub population_size: usize,
    pub evaluation_budget: u64,
    pub crossover_probability: f64,
    pub mutation_probability: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<(usize, usize)>,
    pub skill_factor_tie_rule: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mating_rule: Option<String>,
}

pub const SKILL_TIE_RULE: &str = "fewest-current-holders-then-lowest-task-index";

/// Outcome of the in-process invariant checks of a run.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantReport {
    pub checks: u64,
    pub violations: Vec<String>,
}

impl InvariantReport {
    pub(crate) fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.violations.push(what());
        }
    }

    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Everything one seeded execution produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResults {
    pub solver: Solver,
    /// Filled in by the experiment harness; engines leave it empty.
    #[serde(default)]
    pub test_case: String,
    pub seed: u64,
    pub evaluations_used: u64,
    pub tasks: Vec<TaskOutcome>,
    pub transfer: TransferLedger,
    pub metadata: RunMetadata,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub invariants: Option<InvariantReport>,
    /// Kept out of the persisted record so records stay byte-reproducible.
    #[serde(skip)]
    pub wall_time_secs: f64,
}

impl RunResults {
    pub fn best_costs(&self) -> Vec<u64> {
        self.tasks.iter().map(|t| t.best_cost).collect()
    }
}

/// Best cost and genome per task over every evaluation actually performed.
#[derive(Debug, Clone)]
pub(crate) struct BestTracker {
    best: Vec<(Cost, Vec<usize>)>,
    trajectories: Vec<Vec<TrajectoryPoint>>,
}

impl BestTracker {
    pub fn new(num_tasks: usize) -> Self {
        Self {
            best: vec![(Cost::INFINITE, Vec::new()); num_tasks],
            trajectories: vec![Vec::new(); num_tasks],
        }
    }

    #[inline]
    pub fn offer(&mut self, k: usize, cost: Cost, genome: &[usize]) {
        let slot = &mut self.best[k];
        if cost < slot.0 {
            slot.0 = cost;
            slot.1.clear();
            slot.1.extend_from_slice(genome);
        }
    }

    pub fn sample(&mut self, evaluations: u64) {
        for (k, traj) in self.trajectories.iter_mut().enumerate() {
            if traj.last().is_some_and(|p| p.evaluations == evaluations) {
                continue;
            }
            let best_cost = self.best[k]
                .0
                .value()
                .expect("every task is evaluated during initialization");
            traj.push(TrajectoryPoint {
                evaluations,
                best_cost,
            });
        }
    }

    pub fn into_outcomes(self, problem: &MultitaskProblem) -> Vec<TaskOutcome> {
        self.best
            .into_iter()
            .zip(self.trajectories)
            .enumerate()
            .map(|(k, ((cost, genome), trajectory))| {
                let task = problem.task(k);
                let order = decode_genome(&genome, task.dimension());
                TaskOutcome {
                    instance: task.name().to_string(),
                    best_cost: cost.value().expect("task evaluated"),
                    best_tour: Tour::from_vec_unchecked(order),
                    trajectory,
                }
            })
            .collect()
    }
}
