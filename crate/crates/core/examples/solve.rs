//! Solve the given TSPLIB files as one multitask problem.
//!
//! `cargo run --release --example solve -- mfcga 500000 7 a.tsp b.tsp`

use mfcga_core::harness::run_single;
use mfcga_core::{MultitaskProblem, Solver, TspInstance};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.len() < 4 {
        return Err("usage: solve <mfcga|mfea> <budget> <seed> <file.tsp>...".into());
    }
    let solver: Solver = args[0].parse()?;
    let budget: u64 = args[1].parse()?;
    let seed: u64 = args[2].parse()?;
    let tasks = args[3..]
        .iter()
        .map(TspInstance::from_file)
        .collect::<Result<Vec<_>, _>>()?;
    let problem = MultitaskProblem::from_instances(tasks)?;
    let run = run_single(&problem, solver, 200, budget, seed, true)?;
    for task in &run.tasks {
        println!("{:<10} {}", task.instance, task.best_cost);
    }
    let inv = run.invariants.as_ref().expect("checks enabled");
    println!(
        "{} evaluations, {:.2}s, {} checks, {} violations, {} transfers",
        run.evaluations_used,
        run.wall_time_secs,
        inv.checks,
        inv.violations.len(),
        run.transfer.total()
    );
    Ok(())
}
