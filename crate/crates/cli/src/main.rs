use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Parser, Subcommand};
use log::warn;

use mfcga_core::analysis::pair_intensities;
use mfcga_core::harness::{
    builtin_test_cases, complementarity_tables, find_test_case, load_instances, load_records,
    run_experiment, transfer_table, ExperimentConfig, Report, ReportFormat, TourSource,
    KNOWN_OPTIMA,
};
use mfcga_core::tsplib::{read_opt_tour, TspInstance};
use mfcga_core::Solver;

#[derive(Parser)]
#[command(name = "mfcga", version, about = "Multitask TSP with MFCGA and MFEA")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run (or resume) an experiment and write records plus a report.
    Run {
        /// Comma-separated test case ids; all 15 when omitted.
        #[arg(long, value_delimiter = ',')]
        cases: Vec<String>,
        #[arg(long, value_delimiter = ',', default_value = "mfcga,mfea")]
        solvers: Vec<Solver>,
        #[arg(long, default_value_t = 20)]
        reps: u64,
        #[arg(long, default_value_t = 500_000)]
        budget: u64,
        /// Repetition r uses seed + r.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        population: usize,
        #[arg(long, default_value = "data/tsplib")]
        instances_dir: PathBuf,
        #[arg(long, default_value = "results")]
        out: PathBuf,
        /// Check engine invariants during every run and abort on a violation.
        #[arg(long)]
        check_invariants: bool,
    },
    /// Rebuild the report from persisted records.
    Report {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value = "text")]
        format: ReportFormat,
        /// Also write every CSV table and the text report here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Averaged transfer matrix of one test case.
    Transfer {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        case: String,
        #[arg(long, default_value = "mfcga")]
        solver: Solver,
    },
    /// Node overlap between instances and, given tours, edge overlap of best tours.
    Complementarity {
        #[arg(long)]
        instances_dir: PathBuf,
        /// Directory of `<name>.opt.tour` files.
        #[arg(long)]
        best_tours_dir: Option<PathBuf>,
    },
    /// Print the built-in test cases.
    ListCases,
}

/// Accepts either an experiment output directory or its `runs` subdirectory.
fn records_dir(input: &Path) -> PathBuf {
    let nested = input.join("runs");
    if nested.is_dir() {
        nested
    } else {
        input.to_path_buf()
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run {
            cases,
            solvers,
            reps,
            budget,
            seed,
            population,
            instances_dir,
            out,
            check_invariants,
        } => {
            let mut config = ExperimentConfig::new(instances_dir, out);
            if !cases.is_empty() {
                config.test_cases = cases;
            }
            config.solvers = solvers;
            config.repetitions = reps;
            config.evaluation_budget = budget;
            config.base_seed = seed;
            config.population_size = population;
            config.check_invariants = check_invariants;
            let summary = run_experiment(&config)?;
            eprintln!(
                "{} runs executed, {} resumed; records in {}",
                summary.executed,
                summary.resumed,
                config.output_dir.join("runs").display()
            );
            print!("{}", summary.report.render_text());
        }
        Command::Report { input, format, out } => {
            let loaded = load_records(&records_dir(&input))?;
            let report = Report::build(&loaded.records, loaded.skipped);
            if let Some(dir) = out {
                report.write_all(&dir)?;
            }
            print!("{}", report.render(format));
        }
        Command::Transfer { input, case, solver } => {
            let case = find_test_case(&case)?.id;
            let loaded = load_records(&records_dir(&input))?;
            let table = transfer_table(&loaded.records, case, solver)?;
            println!("instance,{}", table.names.join(","));
            for (name, row) in table.names.iter().zip(&table.mean) {
                let cells: Vec<String> = row.iter().map(|v| format!("{v:.4}")).collect();
                println!("{name},{}", cells.join(","));
            }
            println!();
            println!("pair,intensity");
            for p in pair_intensities(&table.mean) {
                println!("{}/{},{:.4}", table.names[p.i], table.names[p.j], p.intensity);
            }
        }
        Command::Complementarity {
            instances_dir,
            best_tours_dir,
        } => {
            let mut instances: Vec<TspInstance> = Vec::new();
            for (name, _) in KNOWN_OPTIMA {
                match load_instances(&instances_dir, [name]) {
                    Ok(mut m) => instances.push((*m.remove(name).expect("loaded")).clone()),
                    Err(e) => warn!("{e}"),
                }
            }
            if instances.is_empty() {
                bail!("no instances found in {}", instances_dir.display());
            }
            let tours: Vec<_> = instances
                .iter()
                .map(|inst| {
                    let dir = best_tours_dir.as_ref()?;
                    let path = dir.join(format!("{}.opt.tour", inst.name()));
                    match read_opt_tour(&path) {
                        Ok(t) if t.len() == inst.dimension() => Some((t, TourSource::Optimal)),
                        Ok(_) => {
                            warn!("{}: wrong tour size, skipped", path.display());
                            None
                        }
                        Err(e) => {
                            warn!("{e}; skipped");
                            None
                        }
                    }
                })
                .collect();
            let report = Report {
                complementarity: Some(complementarity_tables(&instances, &tours)),
                ..Default::default()
            };
            let text = report.render_text();
            print!("{}", text.trim_start());
        }
        Command::ListCases => {
            for case in builtin_test_cases() {
                println!("{:<8} {}", case.id, case.task_names.join(", "));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
