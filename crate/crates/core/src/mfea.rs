//! Canonical multifactorial evolutionary algorithm, used as the baseline.
//!
//! Generational loop: random pairing with assortative mating, selective
//! evaluation of each child on one inherited skill factor, then elitist
//! survival of the best `P` of parents plus offspring by scalar fitness.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cellular::check_outcomes;
use crate::error::{Error, Result};
use crate::mfo::{
    assign_scalar_fitness_and_skill, rank_all_tasks, Cost, EvalCounter, MultitaskProblem,
    UnifiedIndividual,
};
use crate::operators::{order_crossover, two_opt_in_place, CutPair};
use crate::results::{
    BestTracker, InvariantReport, RunMetadata, RunResults, Solver, TransferLedger, SKILL_TIE_RULE,
};

pub const MATING_RULE: &str = "crossover when skill factors match, otherwise with \
probability crossover_probability; else copy both parents";

#[derive(Debug, Clone, PartialEq)]
pub struct MfeaConfig {
    pub population_size: usize,
    pub crossover_probability: f64,
    pub mutation_probability: f64,
    pub evaluation_budget: u64,
    pub seed: u64,
    pub check_invariants: bool,
}

impl MfeaConfig {
    /// Crossover probability 0.9 and mutation probability 0.1.
    pub fn new(population_size: usize, evaluation_budget: u64, seed: u64) -> Self {
        Self {
            population_size,
            crossover_probability: 0.9,
            mutation_probability: 0.1,
            evaluation_budget,
            seed,
            check_invariants: false,
        }
    }

    pub fn with_invariant_checks(mut self, on: bool) -> Self {
        self.check_invariants = on;
        self
    }

    fn validate(&self, num_tasks: usize) -> Result<()> {
        for (name, p) in [
            ("crossover", self.crossover_probability),
            ("mutation", self.mutation_probability),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Config(format!("{name} probability {p} outside [0, 1]")));
            }
        }
        if self.population_size < 2 {
            return Err(Error::Config("MFEA needs a population of at least 2".into()));
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

/// How a child was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Lineage {
    pub crossover: bool,
    /// Skill factor the child was evaluated on.
    pub evaluated_on: usize,
    /// Skill factor of the other parent; equal to `evaluated_on` for copies.
    pub other_parent_skill: usize,
}

#[derive(Debug, Clone)]
pub struct Offspring {
    pub individual: UnifiedIndividual,
    pub lineage: Lineage,
}

/// Best `P` of the pool by scalar fitness after re-ranking every task.
/// Returns the survivors and their positions in the pool.
pub fn select_survivors(
    mut pool: Vec<UnifiedIndividual>,
    population_size: usize,
) -> (Vec<UnifiedIndividual>, Vec<usize>) {
    rank_all_tasks(&mut pool);
    assign_scalar_fitness_and_skill(&mut pool);
    let mut order: Vec<usize> = (0..pool.len()).collect();
    // Stable sort keeps pool order (parents first) among equal fitness.
    order.sort_by(|&a, &b| {
        let fa = pool[a].scalar_fitness().expect("fitness assigned");
        let fb = pool[b].scalar_fitness().expect("fitness assigned");
        fb.total_cmp(&fa)
    });
    order.truncate(population_size);
    let mut slots: Vec<Option<UnifiedIndividual>> = pool.into_iter().map(Some).collect();
    let survivors = order
        .iter()
        .map(|&i| slots[i].take().expect("each index chosen once"))
        .collect();
    (survivors, order)
}

/// Elitist survival over `parents ++ offspring`.
pub fn mfea_survive(
    parents: Vec<UnifiedIndividual>,
    offspring: Vec<UnifiedIndividual>,
) -> Vec<UnifiedIndividual> {
    let size = parents.len();
    let mut pool = parents;
    pool.extend(offspring);
    select_survivors(pool, size).0
}

pub struct MfeaEngine<'a> {
    problem: &'a MultitaskProblem,
    config: MfeaConfig,
    population: Vec<UnifiedIndividual>,
    rng: ChaCha8Rng,
    counter: EvalCounter,
    ledger: TransferLedger,
    tracker: BestTracker,
    generations: u64,
    report: Option<InvariantReport>,
}

impl<'a> MfeaEngine<'a> {
    pub fn new(problem: &'a MultitaskProblem, config: MfeaConfig) -> Result<Self> {
        let k = problem.num_tasks();
        config.validate(k)?;
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let mut counter = EvalCounter::new();
        let mut tracker = BestTracker::new(k);
        let mut population: Vec<UnifiedIndividual> = (0..config.population_size)
            .map(|_| UnifiedIndividual::random(problem.d_max(), k, &mut rng))
            .collect();
        for ind in &mut population {
            ind.evaluate_all(problem, &mut counter);
            for t in 0..k {
                tracker.offer(t, ind.factorial_cost(t), ind.genome());
            }
        }
        rank_all_tasks(&mut population);
        assign_scalar_fitness_and_skill(&mut population);
        tracker.sample(counter.used());
        let report = config.check_invariants.then(InvariantReport::default);
        Ok(Self {
            problem,
            config,
            population,
            rng,
            counter,
            ledger: TransferLedger::new(k),
            tracker,
            generations: 0,
            report,
        })
    }

    pub fn population(&self) -> &[UnifiedIndividual] {
        &self.population
    }

    pub fn evaluations_used(&self) -> u64 {
        self.counter.used()
    }

    pub fn generations(&self) -> u64 {
        self.generations
    }

    pub fn ledger(&self) -> &TransferLedger {
        &self.ledger
    }

    fn maybe_mutate(&mut self, genome: &mut [usize]) {
        if self.rng.gen::<f64>() < self.config.mutation_probability {
            let cuts = CutPair::random(genome.len(), &mut self.rng);
            two_opt_in_place(genome, cuts);
        }
    }

    /// Produces and evaluates `P` offspring; costs `P` evaluations.
    pub fn mfea_generation(&mut self) -> Vec<Offspring> {
        let size = self.config.population_size;
        let d_max = self.problem.d_max();
        let k = self.problem.num_tasks();
        let mut children: Vec<(Vec<usize>, Lineage)> = Vec::with_capacity(size + 1);

        while children.len() < size {
            let a = self.rng.gen_range(0..size);
            let mut b = self.rng.gen_range(0..size - 1);
            if b >= a {
                b += 1;
            }
            let (ta, tb) = (
                self.population[a].skill_factor(),
                self.population[b].skill_factor(),
            );
            let mate = ta == tb || self.rng.gen::<f64>() < self.config.crossover_probability;
            if mate {
                let cuts = CutPair::random(d_max, &mut self.rng);
                let (ga, gb) = (self.population[a].genome(), self.population[b].genome());
                let c1 = order_crossover(ga, gb, cuts).expect("equal genome lengths");
                let c2 = order_crossover(gb, ga, cuts).expect("equal genome lengths");
                for mut child in [c1, c2] {
                    self.maybe_mutate(&mut child);
                    let (evaluated_on, other_parent_skill) =
                        if self.rng.gen::<bool>() { (ta, tb) } else { (tb, ta) };
                    children.push((
                        child,
                        Lineage {
                            crossover: true,
                            evaluated_on,
                            other_parent_skill,
                        },
                    ));
                }
            } else {
                for (parent, skill) in [(a, ta), (b, tb)] {
                    let mut child = self.population[parent].genome().to_vec();
                    self.maybe_mutate(&mut child);
                    children.push((
                        child,
                        Lineage {
                            crossover: false,
                            evaluated_on: skill,
                            other_parent_skill: skill,
                        },
                    ));
                }
            }
        }
        children.truncate(size);

        children
            .into_iter()
            .map(|(genome, lineage)| {
                let mut individual = UnifiedIndividual::from_genome_unchecked(genome, k);
                let cost =
                    individual.evaluate_selectively(lineage.evaluated_on, self.problem, &mut self.counter);
                individual.set_skill_factor(lineage.evaluated_on);
                self.tracker.offer(lineage.evaluated_on, cost, individual.genome());
                Offspring { individual, lineage }
            })
            .collect()
    }

    fn population_best(&self) -> Vec<Cost> {
        (0..self.problem.num_tasks())
            .map(|t| {
                self.population
                    .iter()
                    .map(|p| p.factorial_cost(t))
                    .min()
                    .unwrap_or(Cost::INFINITE)
            })
            .collect()
    }

    /// One full generation: offspring, evaluation, survival.
    pub fn step_generation(&mut self) {
        let before = self.report.as_ref().map(|_| self.population_best());
        let offspring = self.mfea_generation();
        let size = self.config.population_size;

        if let Some(report) = self.report.as_mut() {
            for child in &offspring {
                let finite = child
                    .individual
                    .factorial_costs()
                    .iter()
                    .filter(|c| c.is_finite())
                    .count();
                report.check(finite == 1, || {
                    format!("offspring carries {finite} finite factorial costs")
                });
            }
        }

        let lineages: Vec<Lineage> = offspring.iter().map(|o| o.lineage).collect();
        let mut pool = std::mem::take(&mut self.population);
        pool.extend(offspring.into_iter().map(|o| o.individual));
        let (survivors, chosen) = select_survivors(pool, size);
        for &idx in &chosen {
            if let Some(lineage) = idx.checked_sub(size).map(|i| lineages[i]) {
                if lineage.crossover && lineage.other_parent_skill != lineage.evaluated_on {
                    self.ledger
                        .record(lineage.other_parent_skill, lineage.evaluated_on);
                }
            }
        }
        self.population = survivors;
        self.generations += 1;
        self.tracker.sample(self.counter.used());

        if let (Some(report), Some(before)) = (self.report.as_mut(), before) {
            report.check(self.population.len() == size, || {
                format!("population size {} after a generation", self.population.len())
            });
            let after: Vec<Cost> = (0..self.problem.num_tasks())
                .map(|t| {
                    self.population
                        .iter()
                        .map(|p| p.factorial_cost(t))
                        .min()
                        .unwrap_or(Cost::INFINITE)
                })
                .collect();
            let elitist = after.iter().zip(&before).all(|(a, b)| a <= b);
            report.check(elitist, || format!("elitism broken: {before:?} -> {after:?}"));
        }
    }

    /// Runs whole generations while the next one fits in the budget.
    pub fn run(mut self) -> RunResults {
        let started = std::time::Instant::now();
        let size = self.config.population_size as u64;
        while self.counter.used() + size <= self.config.evaluation_budget {
            self.step_generation();
        }
        self.finish(started.elapsed().as_secs_f64())
    }

    fn finish(self, wall_time_secs: f64) -> RunResults {
        let k = self.problem.num_tasks();
        let used = self.counter.used();
        let mut report = self.report;
        let tasks = self.tracker.into_outcomes(self.problem);
        if let Some(report) = report.as_mut() {
            let p = self.config.population_size as u64;
            let expected = p * k as u64 + p * self.generations;
            report.check(used == expected, || {
                format!("used {used} evaluations, expected {expected}")
            });
            report.check(used <= self.config.evaluation_budget, || {
                format!("budget {} exceeded: {used}", self.config.evaluation_budget)
            });
            check_outcomes(report, self.problem, &tasks);
        }
        RunResults {
            solver: Solver::Mfea,
            test_case: String::new(),
            seed: self.config.seed,
            evaluations_used: used,
            tasks,
            transfer: self.ledger,
            metadata: RunMetadata {
                population_size: self.config.population_size,
                evaluation_budget: self.config.evaluation_budget,
                crossover_probability: self.config.crossover_probability,
                mutation_probability: self.config.mutation_probability,
                grid: None,
                skill_factor_tie_rule: SKILL_TIE_RULE.to_string(),
                mating_rule: Some(MATING_RULE.to_string()),
            },
            invariants: report,
            wall_time_secs,
        }
    }
}

pub fn run_mfea(problem: &MultitaskProblem, config: MfeaConfig) -> Result<RunResults> {
    Ok(MfeaEngine::new(problem, config)?.run())
}
