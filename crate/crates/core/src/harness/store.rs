use std::fs;
use std::path::{Path, PathBuf};

use log::warn;

use crate::error::{Error, Result};
use crate::results::{RunResults, Solver};

pub fn record_file_name(solver: Solver, case: &str, seed: u64) -> String {
    format!("{solver}__{case}__seed{seed}.json")
}

fn wall_time_path(record: &Path) -> PathBuf {
    record.with_extension("walltime")
}

/// Writes the record (and its wall-time sidecar) via rename so an interrupted
/// run never leaves a half-written record behind.
pub fn write_record(dir: &Path, run: &RunResults) -> Result<PathBuf> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let path = dir.join(record_file_name(run.solver, &run.test_case, run.seed));
    let tmp = path.with_extension("json.tmp");
    let mut body = serde_json::to_string_pretty(run)?;
    body.push('\n');
    fs::write(&tmp, body).map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, &path).map_err(|e| Error::io(&path, e))?;
    let wall = wall_time_path(&path);
    fs::write(&wall, format!("{:.6}\n", run.wall_time_secs)).map_err(|e| Error::io(&wall, e))?;
    Ok(path)
}

/// Parses one record and checks it is internally consistent.
pub fn read_record(path: &Path) -> Result<RunResults> {
    let corrupt = |message: String| Error::CorruptRecord {
        path: path.to_path_buf(),
        message,
    };
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut run: RunResults = serde_json::from_str(&text).map_err(|e| corrupt(e.to_string()))?;

    let expected = record_file_name(run.solver, &run.test_case, run.seed);
    if path.file_name().and_then(|n| n.to_str()) != Some(expected.as_str()) {
        return Err(corrupt(format!("contents belong in {expected}")));
    }
    if run.evaluations_used > run.metadata.evaluation_budget {
        return Err(corrupt(format!(
            "used {} evaluations over a budget of {}",
            run.evaluations_used, run.metadata.evaluation_budget
        )));
    }
    if run.transfer.num_tasks() != run.tasks.len() {
        return Err(corrupt("transfer ledger size differs from task count".into()));
    }
    for task in &run.tasks {
        let traj = &task.trajectory;
        let monotone = traj.windows(2).all(|w| {
            w[0].evaluations < w[1].evaluations && w[0].best_cost >= w[1].best_cost
        });
        let last = traj.last();
        if !monotone
            || last.map(|p| p.evaluations) != Some(run.evaluations_used)
            || last.map(|p| p.best_cost) != Some(task.best_cost)
        {
            return Err(corrupt(format!("inconsistent trajectory for {}", task.instance)));
        }
    }
    if let Ok(secs) = fs::read_to_string(wall_time_path(path)) {
        run.wall_time_secs = secs.trim().parse().unwrap_or(0.0);
    }
    Ok(run)
}

#[derive(Debug, Default)]
pub struct LoadedRecords {
    /// Sorted by test case, solver and seed.
    pub records: Vec<RunResults>,
    pub skipped: Vec<(PathBuf, String)>,
}

/// Reads every `*.json` record in `dir`, skipping corrupt ones with a warning.
pub fn load_records(dir: &Path) -> Result<LoadedRecords> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    let mut loaded = LoadedRecords::default();
    for path in paths {
        match read_record(&path) {
            Ok(run) => loaded.records.push(run),
            Err(e) => {
                warn!("skipping {}: {e}", path.display());
                loaded.skipped.push((path, e.to_string()));
            }
        }
    }
    loaded
        .records
        .sort_by(|a, b| (&a.test_case, a.solver, a.seed).cmp(&(&b.test_case, b.solver, b.seed)));
    Ok(loaded)
}
