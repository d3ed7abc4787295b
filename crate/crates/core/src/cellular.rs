//! Multifactorial cellular GA.
//!
//! The population lives on a toroidal grid. Cells are swept in row-major
//! order and updated in place (asynchronous policy). Each visit crosses the
//! cell with a random Moore neighbor, applies a 2-opt move to a copy of the
//! cell, evaluates both offspring on the cell's skill factor only, and keeps
//! the best of the three. A cell's skill factor never changes after
//! initialization.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::mfo::{
    assign_scalar_fitness_and_skill, genome_cost, rank_all_tasks, skill_factor_counts, Cost,
    EvalCounter, MultitaskProblem, UnifiedIndividual,
};
use crate::operators::{order_crossover, two_opt_in_place, CutPair};
use crate::results::{
    BestTracker, InvariantReport, RunMetadata, RunResults, Solver, TransferLedger, SKILL_TIE_RULE,
};

/// A `rows x cols` torus; cells are indexed row-major from 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridTopology {
    rows: usize,
    cols: usize,
}

impl GridTopology {
    pub fn new(rows: usize, cols: usize) -> Result<Self> {
        if rows < 3 || cols < 3 {
            return Err(Error::Config(format!(
                "a {rows}x{cols} torus would repeat Moore neighbors; need at least 3x3"
            )));
        }
        Ok(Self { rows, cols })
    }

    /// The most square `rows x cols = size` factorization with `rows <= cols`.
    pub fn most_square(size: usize) -> Result<Self> {
        let rows = (1..=size)
            .take_while(|r| r * r <= size)
            .filter(|r| size.is_multiple_of(*r))
            .last()
            .unwrap_or(1);
        Self::new(rows, size / rows.max(1))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn len(&self) -> usize {
        self.rows * self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn position(&self, index: usize) -> (usize, usize) {
        (index / self.cols, index % self.cols)
    }

    pub fn index(&self, row: usize, col: usize) -> usize {
        row * self.cols + col
    }

    /// NW, N, NE, W, E, SW, S, SE with wraparound on both axes.
    pub fn moore_neighbors(&self, index: usize) -> [usize; 8] {
        assert!(index < self.len(), "cell {index} outside the grid");
        let (r, c) = self.position(index);
        let up = (r + self.rows - 1) % self.rows;
        let down = (r + 1) % self.rows;
        let left = (c + self.cols - 1) % self.cols;
        let right = (c + 1) % self.cols;
        [
            self.index(up, left),
            self.index(up, c),
            self.index(up, right),
            self.index(r, left),
            self.index(r, right),
            self.index(down, left),
            self.index(down, c),
            self.index(down, right),
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellularConfig {
    pub population_size: usize,
    pub grid: GridTopology,
    pub evaluation_budget: u64,
    pub seed: u64,
    /// Run the in-process invariant checks and attach their report.
    pub check_invariants: bool,
}

impl CellularConfig {
    /// Population on the most square torus that holds it exactly.
    pub fn new(population_size: usize, evaluation_budget: u64, seed: u64) -> Result<Self> {
        Ok(Self {
            population_size,
            grid: GridTopology::most_square(population_size)?,
            evaluation_budget,
            seed,
            check_invariants: false,
        })
    }

    pub fn with_invariant_checks(mut self, on: bool) -> Self {
        self.check_invariants = on;
        self
    }

    fn validate(&self, num_tasks: usize) -> Result<()> {
        if self.grid.len() != self.population_size {
            return Err(Error::Config(format!(
                "grid {}x{} does not hold a population of {}",
                self.grid.rows, self.grid.cols, self.population_size
            )));
        }
        let init = (self.population_size * num_tasks) as u64;
        if self.evaluation_budget < init {
            return Err(Error::Config(format!(
                "budget {} cannot cover the initial {init} evaluations",
                self.evaluation_budget
            )));
        }
        Ok(())
    }
}

/// Which individual survived a cell update.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Survivor {
    Parent,
    Crossover,
    Mutation,
}

/// Local improvement selection. Offspring must strictly improve on the
/// parent; between two equally good offspring the mutant is kept, so a
/// crossover survivor is always the strict winner.
pub fn local_selection(parent: Cost, crossover: Cost, mutation: Cost) -> Survivor {
    if crossover < parent && crossover < mutation {
        Survivor::Crossover
    } else if mutation < parent {
        Survivor::Mutation
    } else {
        Survivor::Parent
    }
}

/// Result of one cell update.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StepOutcome {
    pub cell: usize,
    pub neighbor: usize,
    pub survivor: Survivor,
    /// `(source skill factor, destination skill factor)` when the crossover
    /// child replaced the cell.
    pub transfer: Option<(usize, usize)>,
}

pub struct CellularEngine<'a> {
    problem: &'a MultitaskProblem,
    config: CellularConfig,
    neighbors: Vec<[usize; 8]>,
    cells: Vec<UnifiedIndividual>,
    rng: ChaCha8Rng,
    counter: EvalCounter,
    ledger: TransferLedger,
    tracker: BestTracker,
    steps: u64,
    crossover_wins: u64,
    report: Option<InvariantReport>,
    initial_skills: Vec<usize>,
}

impl<'a> CellularEngine<'a> {
    /// Builds the grid population: `P` random permutations evaluated on every
    /// task, ranked, and given scalar fitness and skill factors.
    pub fn new(problem: &'a MultitaskProblem, config: CellularConfig) -> Result<Self> {
        let k = problem.num_tasks();
        config.validate(k)?;
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let mut counter = EvalCounter::new();
        let mut tracker = BestTracker::new(k);

        let mut cells: Vec<UnifiedIndividual> = (0..config.population_size)
            .map(|_| UnifiedIndividual::random(problem.d_max(), k, &mut rng))
            .collect();
        for cell in &mut cells {
            cell.evaluate_all(problem, &mut counter);
            for t in 0..k {
                tracker.offer(t, cell.factorial_cost(t), cell.genome());
            }
        }
        rank_all_tasks(&mut cells);
        assign_scalar_fitness_and_skill(&mut cells);
        tracker.sample(counter.used());

        let neighbors = (0..config.grid.len())
            .map(|i| config.grid.moore_neighbors(i))
            .collect();
        let initial_skills = skill_factor_counts(&cells, k);
        let report = config.check_invariants.then(InvariantReport::default);

        Ok(Self {
            problem,
            config,
            neighbors,
            cells,
            rng,
            counter,
            ledger: TransferLedger::new(k),
            tracker,
            steps: 0,
            crossover_wins: 0,
            report,
            initial_skills,
        })
    }

    pub fn cells(&self) -> &[UnifiedIndividual] {
        &self.cells
    }

    pub fn grid(&self) -> GridTopology {
        self.config.grid
    }

    pub fn evaluations_used(&self) -> u64 {
        self.counter.used()
    }

    pub fn remaining_budget(&self) -> u64 {
        self.config.evaluation_budget - self.counter.used()
    }

    pub fn ledger(&self) -> &TransferLedger {
        &self.ledger
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    /// Updates one cell; costs two evaluations.
    pub fn step_cell(&mut self, cell: usize) -> StepOutcome {
        let d_max = self.problem.d_max();
        let neighbor = self.neighbors[cell][self.rng.gen_range(0..8)];
        let skill = self.cells[cell].skill_factor();
        let task = self.problem.task(skill);
        let parent_cost = self.cells[cell].factorial_cost(skill);

        let cuts = CutPair::random(d_max, &mut self.rng);
        let crossover = order_crossover(self.cells[cell].genome(), self.cells[neighbor].genome(), cuts)
            .expect("grid genomes share the unified length");
        let mut mutation = self.cells[cell].genome().to_vec();
        two_opt_in_place(&mut mutation, CutPair::random(d_max, &mut self.rng));

        let crossover_cost = Cost::finite(genome_cost(&crossover, task));
        let mutation_cost = Cost::finite(genome_cost(&mutation, task));
        self.counter.charge(2);
        self.tracker.offer(skill, crossover_cost, &crossover);
        self.tracker.offer(skill, mutation_cost, &mutation);

        let survivor = local_selection(parent_cost, crossover_cost, mutation_cost);
        let mut transfer = None;
        match survivor {
            Survivor::Parent => {}
            Survivor::Crossover => {
                let source = self.cells[neighbor].skill_factor();
                self.cells[cell].replace_genome(crossover, skill, crossover_cost);
                self.ledger.record(source, skill);
                self.crossover_wins += 1;
                transfer = Some((source, skill));
            }
            Survivor::Mutation => {
                self.cells[cell].replace_genome(mutation, skill, mutation_cost);
            }
        }
        self.steps += 1;

        if let Some(report) = self.report.as_mut() {
            let now = self.cells[cell].factorial_cost(skill);
            report.check(now <= parent_cost, || {
                format!("cell {cell} cost rose from {parent_cost:?} to {now:?}")
            });
            report.check(self.cells[cell].skill_factor() == skill, || {
                format!("cell {cell} changed skill factor")
            });
        }

        StepOutcome {
            cell,
            neighbor,
            survivor,
            transfer,
        }
    }

    /// Sweeps the grid until fewer than two evaluations remain.
    pub fn run(mut self) -> RunResults {
        let started = std::time::Instant::now();
        let size = self.cells.len();
        'sweeps: loop {
            for cell in 0..size {
                if self.remaining_budget() < 2 {
                    break 'sweeps;
                }
                self.step_cell(cell);
            }
            self.tracker.sample(self.counter.used());
            self.check_skill_conservation();
        }
        self.tracker.sample(self.counter.used());
        self.check_skill_conservation();
        self.finish(started.elapsed().as_secs_f64())
    }

    fn check_skill_conservation(&mut self) {
        if let Some(report) = self.report.as_mut() {
            let now = skill_factor_counts(&self.cells, self.problem.num_tasks());
            let initial = &self.initial_skills;
            report.check(&now == initial, || {
                format!("skill factor histogram changed: {initial:?} -> {now:?}")
            });
        }
    }

    fn finish(self, wall_time_secs: f64) -> RunResults {
        let k = self.problem.num_tasks();
        let used = self.counter.used();
        let mut report = self.report;
        let tasks = self.tracker.into_outcomes(self.problem);
        if let Some(report) = report.as_mut() {
            let expected = (self.config.population_size * k) as u64 + 2 * self.steps;
            report.check(used == expected, || {
                format!("used {used} evaluations, expected {expected}")
            });
            report.check(used <= self.config.evaluation_budget, || {
                format!("budget {} exceeded: {used}", self.config.evaluation_budget)
            });
            report.check(self.ledger.total() == self.crossover_wins, || {
                "ledger total differs from crossover replacements".to_string()
            });
            check_outcomes(report, self.problem, &tasks);
        }
        RunResults {
            solver: Solver::Mfcga,
            test_case: String::new(),
            seed: self.config.seed,
            evaluations_used: used,
            tasks,
            transfer: self.ledger,
            metadata: RunMetadata {
                population_size: self.config.population_size,
                evaluation_budget: self.config.evaluation_budget,
                crossover_probability: 1.0,
                mutation_probability: 1.0,
                grid: Some((self.config.grid.rows, self.config.grid.cols)),
                skill_factor_tie_rule: SKILL_TIE_RULE.to_string(),
                mating_rule: None,
            },
            invariants: report,
            wall_time_secs,
        }
    }
}

/// Trajectory monotonicity and best-tour consistency, shared by both engines.
pub(crate) fn check_outcomes(
    report: &mut InvariantReport,
    problem: &MultitaskProblem,
    tasks: &[crate::results::TaskOutcome],
) {
    for (k, outcome) in tasks.iter().enumerate() {
        let monotone = outcome
            .trajectory
            .windows(2)
            .all(|w| w[1].best_cost <= w[0].best_cost && w[1].evaluations > w[0].evaluations);
        report.check(monotone, || {
            format!("trajectory of {} is not monotone", outcome.instance)
        });
        let length = problem.task(k).tour_length(&outcome.best_tour).ok();
        report.check(length == Some(outcome.best_cost), || {
            format!(
                "best tour of {} measures {length:?}, recorded {}",
                outcome.instance, outcome.best_cost
            )
        });
    }
}

/// Convenience wrapper: build the engine and run it to the budget.
pub fn run_mfcga(problem: &MultitaskProblem, config: CellularConfig) -> Result<RunResults> {
    Ok(CellularEngine::new(problem, config)?.run())
}
