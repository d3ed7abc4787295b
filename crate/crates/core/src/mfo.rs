//! Multifactorial bookkeeping shared by both engines: the unified permutation
//! space, factorial costs and ranks, scalar fitness and skill factors.

use std::fmt;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tsplib::{is_permutation, Tour, TspInstance};

/// Factorial cost of an individual on one task. Unevaluated slots hold
/// [`Cost::INFINITE`], which orders after every finite cost.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(from = "Option<u64>", into = "Option<u64>")]
pub struct Cost(u64);

impl Cost {
    pub const INFINITE: Cost = Cost(u64::MAX);

    pub fn finite(value: u64) -> Self {
        debug_assert!(value != u64::MAX);
        Cost(value)
    }

    pub fn is_finite(self) -> bool {
        self != Self::INFINITE
    }

    pub fn value(self) -> Option<u64> {
        self.is_finite().then_some(self.0)
    }
}

impl fmt::Debug for Cost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.value() {
            Some(v) => write!(f, "{v}"),
            None => f.write_str("inf"),
        }
    }
}

impl From<Option<u64>> for Cost {
    fn from(v: Option<u64>) -> Self {
        v.map_or(Cost::INFINITE, Cost)
    }
}

impl From<Cost> for Option<u64> {
    fn from(c: Cost) -> Self {
        c.value()
    }
}

/// Counts task evaluations (one decode plus one tour length).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EvalCounter {
    used: u64,
}

impl EvalCounter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn used(&self) -> u64 {
        self.used
    }

    pub(crate) fn charge(&mut self, n: u64) {
        self.used += n;
    }
}

/// An ordered bundle of TSP tasks sharing the unified space `0..d_max`.
#[derive(Debug, Clone)]
pub struct MultitaskProblem {
    tasks: Vec<Arc<TspInstance>>,
    d_max: usize,
}

impl MultitaskProblem {
    pub fn new(tasks: Vec<Arc<TspInstance>>) -> Result<Self> {
        let d_max = tasks
            .iter()
            .map(|t| t.dimension())
            .max()
            .ok_or_else(|| Error::Config("a multitask problem needs at least one task".into()))?;
        Ok(Self { tasks, d_max })
    }

    pub fn from_instances(tasks: Vec<TspInstance>) -> Result<Self> {
        Self::new(tasks.into_iter().map(Arc::new).collect())
    }

    pub fn num_tasks(&self) -> usize {
        self.tasks.len()
    }

    pub fn d_max(&self) -> usize {
        self.d_max
    }

    pub fn task(&self, k: usize) -> &TspInstance {
        &self.tasks[k]
    }

    pub fn tasks(&self) -> impl ExactSizeIterator<Item = &TspInstance> {
        self.tasks.iter().map(|t| t.as_ref())
    }

    pub fn task_names(&self) -> Vec<String> {
        self.tasks.iter().map(|t| t.name().to_string()).collect()
    }
}

/// Keeps the genome entries below `dimension`, in genome order.
pub fn decode_genome(genome: &[usize], dimension: usize) -> Vec<usize> {
    genome.iter().copied().filter(|&c| c < dimension).collect()
}

/// Tour length of the decoded genome on `task`, without allocating.
pub fn genome_cost(genome: &[usize], task: &TspInstance) -> u64 {
    let dim = task.dimension();
    let mut cities = genome.iter().copied().filter(|&c| c < dim);
    let Some(first) = cities.next() else {
        return 0;
    };
    let mut prev_row = task.row(first);
    let mut total = 0u64;
    for c in cities {
        total += prev_row[c] as u64;
        prev_row = task.row(c);
    }
    total + prev_row[first] as u64
}

/// A member of the unified population.
#[derive(Debug, Clone, PartialEq)]
pub struct UnifiedIndividual {
    genome: Vec<usize>,
    factorial_costs: Vec<Cost>,
    factorial_ranks: Vec<Option<usize>>,
    scalar_fitness: Option<f64>,
    skill_factor: usize,
}

impl UnifiedIndividual {
    /// An unevaluated individual for `num_tasks` tasks.
    pub fn new(genome: Vec<usize>, num_tasks: usize) -> Result<Self> {
        if !is_permutation(&genome) {
            return Err(Error::Operator("genome is not a permutation".into()));
        }
        Ok(Self::from_genome_unchecked(genome, num_tasks))
    }

    pub(crate) fn from_genome_unchecked(genome: Vec<usize>, num_tasks: usize) -> Self {
        debug_assert!(is_permutation(&genome));
        Self {
            genome,
            factorial_costs: vec![Cost::INFINITE; num_tasks],
            factorial_ranks: vec![None; num_tasks],
            scalar_fitness: None,
            skill_factor: 0,
        }
    }

    pub fn random<R: Rng + ?Sized>(d_max: usize, num_tasks: usize, rng: &mut R) -> Self {
        let mut genome: Vec<usize> = (0..d_max).collect();
        genome.shuffle(rng);
        Self::from_genome_unchecked(genome, num_tasks)
    }

    pub fn genome(&self) -> &[usize] {
        &self.genome
    }

    pub fn factorial_costs(&self) -> &[Cost] {
        &self.factorial_costs
    }

    pub fn factorial_cost(&self, k: usize) -> Cost {
        self.factorial_costs[k]
    }

    pub fn factorial_ranks(&self) -> &[Option<usize>] {
        &self.factorial_ranks
    }

    pub fn scalar_fitness(&self) -> Option<f64> {
        self.scalar_fitness
    }

    /// 0-based task index.
    pub fn skill_factor(&self) -> usize {
        self.skill_factor
    }

    pub(crate) fn set_skill_factor(&mut self, k: usize) {
        self.skill_factor = k;
    }

    pub fn set_factorial_ranks(&mut self, ranks: Vec<Option<usize>>) {
        assert_eq!(ranks.len(), self.factorial_costs.len());
        self.factorial_ranks = ranks;
    }

    pub fn decode(&self, k: usize, problem: &MultitaskProblem) -> Tour {
        Tour::from_vec_unchecked(decode_genome(&self.genome, problem.task(k).dimension()))
    }

    /// Evaluates on every task; charges `K` evaluations.
    pub fn evaluate_all(&mut self, problem: &MultitaskProblem, counter: &mut EvalCounter) {
        for (k, task) in problem.tasks().enumerate() {
            self.factorial_costs[k] = Cost::finite(genome_cost(&self.genome, task));
        }
        counter.charge(problem.num_tasks() as u64);
    }

    /// Evaluates on task `k` only; every other factorial cost becomes infinite.
    pub fn evaluate_selectively(
        &mut self,
        k: usize,
        problem: &MultitaskProblem,
        counter: &mut EvalCounter,
    ) -> Cost {
        self.factorial_costs.fill(Cost::INFINITE);
        let cost = Cost::finite(genome_cost(&self.genome, problem.task(k)));
        self.factorial_costs[k] = cost;
        counter.charge(1);
        cost
    }

    #[cfg(test)]
    pub(crate) fn set_factorial_costs(&mut self, costs: Vec<Cost>) {
        assert_eq!(costs.len(), self.factorial_costs.len());
        self.factorial_costs = costs;
    }

    pub(crate) fn replace_genome(&mut self, genome: Vec<usize>, k: usize, cost: Cost) {
        self.genome = genome;
        self.factorial_costs.fill(Cost::INFINITE);
        self.factorial_costs[k] = cost;
    }

    fn min_rank(&self) -> Option<usize> {
        self.factorial_ranks.iter().copied().collect::<Option<Vec<_>>>()?.into_iter().min()
    }
}

/// Assigns 1-based factorial ranks on task `k`: ascending cost, infinite last,
/// ties kept in population order.
pub fn compute_factorial_ranks(population: &mut [UnifiedIndividual], k: usize) {
    let mut order: Vec<usize> = (0..population.len()).collect();
    order.sort_by_key(|&i| population[i].factorial_costs[k]);
    for (pos, &i) in order.iter().enumerate() {
        population[i].factorial_ranks[k] = Some(pos + 1);
    }
}

pub fn rank_all_tasks(population: &mut [UnifiedIndividual]) {
    let num_tasks = population.first().map_or(0, |p| p.factorial_costs.len());
    for k in 0..num_tasks {
        compute_factorial_ranks(population, k);
    }
}

/// Sets `phi = 1 / min_k rank_k` and the skill factor of every individual.
///
/// When several tasks share the best rank, the individual goes to the tied
/// task that currently has the fewest holders, then to the lowest index.
/// Untied individuals are counted first; tied ones are resolved in population
/// order, each assignment updating the counts.
pub fn assign_scalar_fitness_and_skill(population: &mut [UnifiedIndividual]) {
    let num_tasks = population.first().map_or(0, |p| p.factorial_costs.len());
    let mut holders = vec![0usize; num_tasks];
    let mut tied: Vec<(usize, Vec<usize>)> = Vec::new();

    for (i, ind) in population.iter_mut().enumerate() {
        let best = ind
            .min_rank()
            .expect("factorial ranks must be set for every task");
        ind.scalar_fitness = Some(1.0 / best as f64);
        let argmin: Vec<usize> = ind
            .factorial_ranks
            .iter()
            .enumerate()
            .filter(|(_, r)| **r == Some(best))
            .map(|(k, _)| k)
            .collect();
        if let [k] = argmin[..] {
            ind.skill_factor = k;
            holders[k] += 1;
        } else {
            tied.push((i, argmin));
        }
    }

    for (i, candidates) in tied {
        let k = *candidates
            .iter()
            .min_by_key(|&&k| (holders[k], k))
            .expect("argmin is never empty");
        population[i].skill_factor = k;
        holders[k] += 1;
    }
}

/// Histogram of skill factors over `num_tasks` tasks.
pub fn skill_factor_counts(population: &[UnifiedIndividual], num_tasks: usize) -> Vec<usize> {
    let mut counts = vec![0usize; num_tasks];
    for ind in population {
        counts[ind.skill_factor] += 1;
    }
    counts
}
