use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use log::warn;

use super::cases::known_optimum;
use super::experiment::opt_tour_path;
use crate::analysis::{
    aggregate_transfer, best_solution_overlap, compare, node_overlap_matrix, pair_intensities,
    ComparisonOutcome, SummaryStats,
};
use crate::error::{Error, Result};
use crate::results::{RunResults, Solver};
use crate::tsplib::{read_opt_tour, Tour, TspInstance};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Text,
    Csv,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "text" => Ok(Self::Text),
            "csv" => Ok(Self::Csv),
            other => Err(Error::Config(format!("unknown report format `{other}`"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SummaryRow {
    pub case: String,
    pub instance: String,
    pub solver: Solver,
    pub stats: SummaryStats,
}

/// One test case row of the win/loss table: the solver with the lower mean
/// per instance, `None` on an exact tie.
#[derive(Debug, Clone)]
pub struct WinLossRow {
    pub case: String,
    pub marks: Vec<(String, Option<Solver>)>,
}

/// MFCGA (`a`) against MFEA (`b`) on one instance.
#[derive(Debug, Clone)]
pub struct ComparisonRow {
    pub case: String,
    pub instance: String,
    pub outcome: ComparisonOutcome,
}

#[derive(Debug, Clone)]
pub struct TransferTable {
    pub case: String,
    pub solver: Solver,
    pub runs: usize,
    pub names: Vec<String>,
    pub mean: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TourSource {
    /// A published optimal tour file.
    Optimal,
    /// The best tour found across the loaded run records.
    BestFound,
}

#[derive(Debug, Clone)]
pub struct ComplementarityTables {
    pub names: Vec<String>,
    pub node_overlap: Vec<Vec<f64>>,
    /// `None` where a tour is unavailable for either instance.
    pub best_solution: Vec<Vec<Option<f64>>>,
    pub tour_sources: Vec<Option<TourSource>>,
}

#[derive(Debug, Clone, Default)]
pub struct Report {
    pub runs: usize,
    pub summary: Vec<SummaryRow>,
    pub win_loss: Vec<WinLossRow>,
    pub comparisons: Vec<ComparisonRow>,
    pub transfer: Vec<TransferTable>,
    pub complementarity: Option<ComplementarityTables>,
    pub skipped: Vec<(PathBuf, String)>,
}

type Grouped<'r> = BTreeMap<&'r str, BTreeMap<Solver, Vec<&'r RunResults>>>;

fn group(records: &[RunResults]) -> Grouped<'_> {
    let mut g: Grouped<'_> = BTreeMap::new();
    for r in records {
        g.entry(&r.test_case).or_default().entry(r.solver).or_default().push(r);
    }
    g
}

fn final_costs(runs: &[&RunResults], task: usize) -> Vec<f64> {
    runs.iter().map(|r| r.tasks[task].best_cost as f64).collect()
}

/// Averaged transfer matrix of one solver on one test case.
pub fn transfer_table(records: &[RunResults], case: &str, solver: Solver) -> Result<TransferTable> {
    let runs: Vec<&RunResults> = records
        .iter()
        .filter(|r| r.test_case == case && r.solver == solver)
        .collect();
    let first = runs.first().ok_or_else(|| {
        Error::Analysis(format!("no {solver} records for test case {case}"))
    })?;
    let ledgers: Vec<_> = runs.iter().map(|r| r.transfer.clone()).collect();
    Ok(TransferTable {
        case: case.to_string(),
        solver,
        runs: runs.len(),
        names: first.tasks.iter().map(|t| t.instance.clone()).collect(),
        mean: aggregate_transfer(&ledgers)?,
    })
}

/// Tour per instance: the optimal tour file when present in `opt_dir`,
/// otherwise the best tour among `records`.
pub fn best_tour_sources(
    instances: &[TspInstance],
    opt_dir: Option<&Path>,
    records: &[RunResults],
) -> Vec<Option<(Tour, TourSource)>> {
    instances
        .iter()
        .map(|inst| {
            if let Some(dir) = opt_dir {
                let path = opt_tour_path(dir, inst.name());
                if path.is_file() {
                    match read_opt_tour(&path) {
                        Ok(t) if t.len() == inst.dimension() => {
                            return Some((t, TourSource::Optimal))
                        }
                        Ok(_) => warn!("{}: tour size differs from instance", path.display()),
                        Err(e) => warn!("{}: {e}", path.display()),
                    }
                }
            }
            let found = records
                .iter()
                .flat_map(|r| &r.tasks)
                .filter(|t| t.instance == inst.name() && t.best_tour.len() == inst.dimension())
                .min_by_key(|t| t.best_cost)
                .map(|t| (t.best_tour.clone(), TourSource::BestFound));
            if found.is_none() {
                warn!("no tour for {}; best-solution overlap skipped", inst.name());
            }
            found
        })
        .collect()
}

pub fn complementarity_tables(
    instances: &[TspInstance],
    tours: &[Option<(Tour, TourSource)>],
) -> ComplementarityTables {
    let k = instances.len();
    let mut best = vec![vec![None; k]; k];
    for i in 0..k {
        for j in 0..k {
            if let (Some((ti, _)), Some((tj, _))) = (&tours[i], &tours[j]) {
                best[i][j] = best_solution_overlap(&instances[i], ti, &instances[j], tj).ok();
            }
        }
    }
    ComplementarityTables {
        names: instances.iter().map(|i| i.name().to_string()).collect(),
        node_overlap: node_overlap_matrix(instances),
        best_solution: best,
        tour_sources: tours.iter().map(|t| t.as_ref().map(|(_, s)| *s)).collect(),
    }
}

impl Report {
    pub fn build(records: &[RunResults], skipped: Vec<(PathBuf, String)>) -> Self {
        let mut report = Report {
            runs: records.len(),
            skipped,
            ..Default::default()
        };
        for (case, by_solver) in group(records) {
            let names: Vec<String> = by_solver
                .values()
                .next()
                .map(|runs| runs[0].tasks.iter().map(|t| t.instance.clone()).collect())
                .unwrap_or_default();
            for (&solver, runs) in &by_solver {
                for (k, name) in names.iter().enumerate() {
                    let stats = SummaryStats::from_sample(&final_costs(runs, k))
                        .expect("grouped runs are non-empty");
                    report.summary.push(SummaryRow {
                        case: case.to_string(),
                        instance: name.clone(),
                        solver,
                        stats,
                    });
                }
                let ledgers: Vec<_> = runs.iter().map(|r| r.transfer.clone()).collect();
                if let Ok(mean) = aggregate_transfer(&ledgers) {
                    report.transfer.push(TransferTable {
                        case: case.to_string(),
                        solver,
                        runs: runs.len(),
                        names: names.clone(),
                        mean,
                    });
                }
            }
            if let (Some(a), Some(b)) = (by_solver.get(&Solver::Mfcga), by_solver.get(&Solver::Mfea)) {
                let mut marks = Vec::new();
                for (k, name) in names.iter().enumerate() {
                    let (ca, cb) = (final_costs(a, k), final_costs(b, k));
                    let (ma, mb) = (mean(&ca), mean(&cb));
                    let winner = if ma < mb {
                        Some(Solver::Mfcga)
                    } else if mb < ma {
                        Some(Solver::Mfea)
                    } else {
                        None
                    };
                    marks.push((name.clone(), winner));
                    if let Ok(outcome) = compare(&ca, &cb) {
                        report.comparisons.push(ComparisonRow {
                            case: case.to_string(),
                            instance: name.clone(),
                            outcome,
                        });
                    }
                }
                report.win_loss.push(WinLossRow {
                    case: case.to_string(),
                    marks,
                });
            }
        }
        report
    }

    /// Adds the instance and best-solution complementarity matrices.
    pub fn with_complementarity(
        mut self,
        instances: &[TspInstance],
        opt_dir: Option<&Path>,
        records: &[RunResults],
    ) -> Self {
        let tours = best_tour_sources(instances, opt_dir, records);
        self.complementarity = Some(complementarity_tables(instances, &tours));
        self
    }

    /// Instance slots won by each solver on mean, and ties.
    pub fn win_counts(&self) -> (usize, usize, usize) {
        let marks = self.win_loss.iter().flat_map(|r| &r.marks);
        marks.fold((0, 0, 0), |(a, b, t), (_, w)| match w {
            Some(Solver::Mfcga) => (a + 1, b, t),
            Some(Solver::Mfea) => (a, b + 1, t),
            None => (a, b, t + 1),
        })
    }

    pub fn summary_csv(&self) -> String {
        let mut out =
            String::from("test_case,instance,solver,runs,mean,best,std_dev,optimum,mean_gap_percent\n");
        for row in &self.summary {
            let opt = known_optimum(&row.instance);
            let _ = writeln!(
                out,
                "{},{},{},{},{:.4},{:.4},{:.4},{},{}",
                row.case,
                row.instance,
                row.solver,
                row.stats.runs,
                row.stats.mean,
                row.stats.best,
                row.stats.std_dev,
                opt.map(|o| o.to_string()).unwrap_or_default(),
                opt.map(|o| format!("{:.4}", row.stats.mean_gap_percent(o as f64)))
                    .unwrap_or_default(),
            );
        }
        out
    }

    pub fn comparison_csv(&self) -> String {
        let mut out = String::from(
            "test_case,instance,mfcga_mean,mfea_mean,winner,u,z,p,significant\n",
        );
        for row in &self.comparisons {
            let o = &row.outcome;
            let winner = if o.a.mean < o.b.mean {
                "mfcga"
            } else if o.b.mean < o.a.mean {
                "mfea"
            } else {
                "tie"
            };
            let _ = writeln!(
                out,
                "{},{},{:.4},{:.4},{winner},{:.4},{:.6},{:.6},{}",
                row.case,
                row.instance,
                o.a.mean,
                o.b.mean,
                o.wilcoxon.u,
                o.wilcoxon.z,
                o.wilcoxon.p,
                o.wilcoxon.significant
            );
        }
        out
    }

    pub fn win_loss_csv(&self) -> String {
        let mut out = String::from("test_case,position,instance,winner\n");
        for row in &self.win_loss {
            for (pos, (name, w)) in row.marks.iter().enumerate() {
                let w = w.map(|s| s.as_str()).unwrap_or("tie");
                let _ = writeln!(out, "{},{},{name},{w}", row.case, pos + 1);
            }
        }
        out
    }

    /// File name and contents of every CSV artifact.
    pub fn csv_tables(&self) -> Vec<(String, String)> {
        let mut files = vec![
            ("summary.csv".to_string(), self.summary_csv()),
            ("win_loss.csv".to_string(), self.win_loss_csv()),
            ("wilcoxon.csv".to_string(), self.comparison_csv()),
        ];
        for t in &self.transfer {
            files.push((
                format!("transfer_{}_{}.csv", t.case, t.solver),
                matrix_csv(&t.names, &t.mean, |v| format!("{v:.4}")),
            ));
        }
        if let Some(c) = &self.complementarity {
            files.push((
                "node_overlap.csv".into(),
                matrix_csv(&c.names, &c.node_overlap, |v| format!("{v:.4}")),
            ));
            files.push((
                "best_solution_overlap.csv".into(),
                matrix_csv(&c.names, &c.best_solution, |v| {
                    v.map(|x| format!("{x:.4}")).unwrap_or_default()
                }),
            ));
        }
        files
    }

    pub fn write_all(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        for (name, body) in self.csv_tables() {
            let path = dir.join(name);
            fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
        }
        let path = dir.join("report.txt");
        fs::write(&path, self.render_text()).map_err(|e| Error::io(&path, e))
    }

    pub fn render(&self, format: ReportFormat) -> String {
        match format {
            ReportFormat::Text => self.render_text(),
            ReportFormat::Csv => self.summary_csv(),
        }
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        if self.runs == 0 && self.complementarity.is_none() {
            out.push_str("No run records found.\n");
        } else if self.runs > 0 {
            self.text_summary(&mut out);
            self.text_win_loss(&mut out);
            self.text_wilcoxon(&mut out);
            for t in &self.transfer {
                let _ = writeln!(
                    out,
                    "\nMean transfer episodes per run, {} {} ({} runs), row = source task",
                    t.case, t.solver, t.runs
                );
                out.push_str(&matrix_text(&t.names, &t.mean, |v| format!("{v:.2}")));
                let top: Vec<String> = pair_intensities(&t.mean)
                    .iter()
                    .take(5)
                    .map(|p| format!("{}/{} {:.2}", t.names[p.i], t.names[p.j], p.intensity))
                    .collect();
                if !top.is_empty() {
                    let _ = writeln!(out, "strongest pairs: {}", top.join(", "));
                }
            }
        }
        if let Some(c) = &self.complementarity {
            out.push_str("\nShared nodes (% of the smaller instance)\n");
            out.push_str(&matrix_text(&c.names, &c.node_overlap, |v| format!("{v:.0}%")));
            out.push_str("\nShared edges between best tours on shared nodes\n");
            out.push_str(&matrix_text(&c.names, &c.best_solution, |v| {
                v.map(|x| format!("{x:.0}%")).unwrap_or_else(|| "-".into())
            }));
            for (name, src) in c.names.iter().zip(&c.tour_sources) {
                let src = match src {
                    Some(TourSource::Optimal) => "optimal tour file",
                    Some(TourSource::BestFound) => "best tour found in runs",
                    None => "no tour",
                };
                let _ = writeln!(out, "  {name}: {src}");
            }
        }
        if !self.skipped.is_empty() {
            let _ = writeln!(out, "\n{} corrupt record(s) skipped:", self.skipped.len());
            for (path, why) in &self.skipped {
                let _ = writeln!(out, "  {}: {why}", path.display());
            }
        }
        out
    }

    fn text_summary(&self, out: &mut String) {
        let _ = writeln!(
            out,
            "{:<8} {:<8} {:<6} {:>4} {:>11} {:>9} {:>9} {:>8}",
            "case", "instance", "solver", "runs", "mean", "best", "std", "gap%"
        );
        for r in &self.summary {
            let gap = known_optimum(&r.instance)
                .map(|o| format!("{:.2}", r.stats.mean_gap_percent(o as f64)))
                .unwrap_or_else(|| "-".into());
            let _ = writeln!(
                out,
                "{:<8} {:<8} {:<6} {:>4} {:>11.2} {:>9.0} {:>9.2} {:>8}",
                r.case, r.instance, r.solver, r.stats.runs, r.stats.mean, r.stats.best,
                r.stats.std_dev, gap
            );
        }
    }

    fn text_win_loss(&self, out: &mut String) {
        if self.win_loss.is_empty() {
            return;
        }
        out.push_str("\nLower mean per instance (C = MFCGA, E = MFEA, = tie)\n");
        for row in &self.win_loss {
            let marks: Vec<String> = row
                .marks
                .iter()
                .map(|(n, w)| {
                    let m = match w {
                        Some(Solver::Mfcga) => "C",
                        Some(Solver::Mfea) => "E",
                        None => "=",
                    };
                    format!("{n}:{m}")
                })
                .collect();
            let _ = writeln!(out, "{:<8} {}", row.case, marks.join(" "));
        }
        let (a, b, t) = self.win_counts();
        let _ = writeln!(out, "MFCGA {a}, MFEA {b}, ties {t}");
    }

    fn text_wilcoxon(&self, out: &mut String) {
        if self.comparisons.is_empty() {
            return;
        }
        out.push_str("\nOne-sided rank-sum test, MFCGA better than MFEA (significant if z < -1.64)\n");
        for row in &self.comparisons {
            let w = &row.outcome.wilcoxon;
            let _ = writeln!(
                out,
                "{:<8} {:<8} U={:>6.1} z={:>7.3} p={:.5} {}",
                row.case,
                row.instance,
                w.u,
                w.z,
                w.p,
                if w.significant { "significant" } else { "-" }
            );
        }
    }
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn matrix_csv<T: Copy>(names: &[String], m: &[Vec<T>], fmt: impl Fn(T) -> String) -> String {
    let mut out = format!("instance,{}\n", names.join(","));
    for (name, row) in names.iter().zip(m) {
        let cells: Vec<String> = row.iter().map(|&v| fmt(v)).collect();
        let _ = writeln!(out, "{name},{}", cells.join(","));
    }
    out
}

fn matrix_text<T: Copy>(names: &[String], m: &[Vec<T>], fmt: impl Fn(T) -> String) -> String {
    let mut out = format!("{:<8}", "");
    for n in names {
        let _ = write!(out, " {n:>8}");
    }
    out.push('\n');
    for (name, row) in names.iter().zip(m) {
        let _ = write!(out, "{name:<8}");
        for &v in row {
            let _ = write!(out, " {:>8}", fmt(v));
        }
        out.push('\n');
    }
    out
}
