use std::collections::{BTreeMap, HashSet};
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use log::info;
use rayon::prelude::*;

use super::cases::{builtin_test_cases, find_test_case, TestCase};
use super::report::Report;
use super::store::{load_records, read_record, record_file_name, write_record};
use crate::cellular::{run_mfcga, CellularConfig};
use crate::error::{Error, Result};
use crate::mfea::{run_mfea, MfeaConfig};
use crate::mfo::MultitaskProblem;
use crate::results::{RunResults, Solver};
use crate::tsplib::TspInstance;

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub test_cases: Vec<String>,
    pub solvers: Vec<Solver>,
    pub repetitions: u64,
    pub evaluation_budget: u64,
    /// Repetition `r` (0-based) runs with seed `base_seed + r`.
    pub base_seed: u64,
    pub population_size: usize,
    pub instance_dir: PathBuf,
    pub output_dir: PathBuf,
    pub check_invariants: bool,
}

impl ExperimentConfig {
    /// All 15 cases, both solvers, 20 repetitions of 500 000 evaluations with
    /// a population of 200.
    pub fn new(instance_dir: impl Into<PathBuf>, output_dir: impl Into<PathBuf>) -> Self {
        Self {
            test_cases: builtin_test_cases().iter().map(|c| c.id.to_string()).collect(),
            solvers: Solver::ALL.to_vec(),
            repetitions: 20,
            evaluation_budget: 500_000,
            base_seed: 0,
            population_size: 200,
            instance_dir: instance_dir.into(),
            output_dir: output_dir.into(),
            check_invariants: false,
        }
    }

    fn validate(&self) -> Result<Vec<TestCase>> {
        if self.repetitions == 0 {
            return Err(Error::Config("repetitions must be at least 1".into()));
        }
        if self.solvers.is_empty() || self.test_cases.is_empty() {
            return Err(Error::Config("nothing to run: no solvers or no test cases".into()));
        }
        self.base_seed
            .checked_add(self.repetitions - 1)
            .ok_or_else(|| Error::Config("seed range overflows u64".into()))?;
        self.test_cases.iter().map(|id| find_test_case(id)).collect()
    }
}

pub fn instance_path(dir: &Path, name: &str) -> PathBuf {
    dir.join(format!("{name}.tsp"))
}

pub fn opt_tour_path(dir: &Path, name: &str) -> PathBuf {
    dir.join(format!("{name}.opt.tour"))
}

/// Loads `<dir>/<name>.tsp` for each name, failing on the first one missing.
pub fn load_instances<'n>(
    dir: &Path,
    names: impl IntoIterator<Item = &'n str>,
) -> Result<BTreeMap<String, Arc<TspInstance>>> {
    let mut out = BTreeMap::new();
    for name in names {
        if out.contains_key(name) {
            continue;
        }
        let path = instance_path(dir, name);
        if !path.is_file() {
            return Err(Error::MissingInstance {
                name: name.to_string(),
                path,
            });
        }
        out.insert(name.to_string(), Arc::new(TspInstance::from_file(&path)?));
    }
    Ok(out)
}

/// One seeded run of `solver` on `problem`.
pub fn run_single(
    problem: &MultitaskProblem,
    solver: Solver,
    population_size: usize,
    evaluation_budget: u64,
    seed: u64,
    check_invariants: bool,
) -> Result<RunResults> {
    let started = Instant::now();
    let mut run = match solver {
        Solver::Mfcga => {
            let cfg = CellularConfig::new(population_size, evaluation_budget, seed)?
                .with_invariant_checks(check_invariants);
            run_mfcga(problem, cfg)?
        }
        Solver::Mfea => {
            let cfg = MfeaConfig::new(population_size, evaluation_budget, seed)
                .with_invariant_checks(check_invariants);
            run_mfea(problem, cfg)?
        }
    };
    run.wall_time_secs = started.elapsed().as_secs_f64();
    Ok(run)
}

#[derive(Debug)]
pub struct ExperimentSummary {
    pub executed: usize,
    pub resumed: usize,
    /// Every record of this configuration, sorted by case, solver and seed.
    pub records: Vec<RunResults>,
    pub report: Report,
}

struct Job<'c> {
    case: &'c TestCase,
    solver: Solver,
    seed: u64,
}

/// Runs every (case, solver, repetition) not already persisted in the output
/// directory, in parallel, then writes the report next to the records.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentSummary> {
    let cases = config.validate()?;
    // Fail before any run if an instance is missing.
    let instances = load_instances(
        &config.instance_dir,
        cases.iter().flat_map(|c| c.task_names.iter().copied()),
    )?;
    let problems: BTreeMap<&str, MultitaskProblem> = cases
        .iter()
        .map(|c| {
            let tasks = c.task_names.iter().map(|n| instances[*n].clone()).collect();
            MultitaskProblem::new(tasks).map(|p| (c.id, p))
        })
        .collect::<Result<_>>()?;

    let records_dir = config.output_dir.join("runs");
    let mut jobs = Vec::new();
    let mut resumed = 0;
    for case in &cases {
        for &solver in &config.solvers {
            for r in 0..config.repetitions {
                let seed = config.base_seed + r;
                let path = records_dir.join(record_file_name(solver, case.id, seed));
                let done = path.is_file()
                    && read_record(&path).is_ok_and(|run| {
                        run.metadata.evaluation_budget == config.evaluation_budget
                            && run.metadata.population_size == config.population_size
                            && (!config.check_invariants || run.invariants.is_some())
                    });
                if done {
                    resumed += 1;
                } else {
                    jobs.push(Job { case, solver, seed });
                }
            }
        }
    }
    info!("{} runs to execute, {resumed} already persisted", jobs.len());

    jobs.par_iter().try_for_each(|job| -> Result<()> {
        let mut run = run_single(
            &problems[job.case.id],
            job.solver,
            config.population_size,
            config.evaluation_budget,
            job.seed,
            config.check_invariants,
        )?;
        run.test_case = job.case.id.to_string();
        if let Some(report) = &run.invariants {
            if !report.is_clean() {
                return Err(Error::Analysis(format!(
                    "{} on {} seed {}: invariant violations {:?}",
                    job.solver, job.case.id, job.seed, report.violations
                )));
            }
        }
        write_record(&records_dir, &run)?;
        info!("finished {} {} seed {}", job.solver, job.case.id, job.seed);
        Ok(())
    })?;

    let wanted: HashSet<String> = cases
        .iter()
        .flat_map(|c| {
            config.solvers.iter().flat_map(move |&s| {
                (0..config.repetitions).map(move |r| record_file_name(s, c.id, config.base_seed + r))
            })
        })
        .collect();
    let loaded = load_records(&records_dir)?;
    let records: Vec<RunResults> = loaded
        .records
        .into_iter()
        .filter(|r| wanted.contains(&record_file_name(r.solver, &r.test_case, r.seed)))
        .collect();

    let instance_list: Vec<TspInstance> = instances.values().map(|i| (**i).clone()).collect();
    let report = Report::build(&records, loaded.skipped)
        .with_complementarity(&instance_list, Some(&config.instance_dir), &records);
    report.write_all(&config.output_dir.join("report"))?;

    Ok(ExperimentSummary {
        executed: jobs.len(),
        resumed,
        records,
        report,
    })
}
