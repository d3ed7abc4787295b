use crate::error::{Error, Result};
use crate::results::TransferLedger;

/// Element-wise mean of the ledgers: average episodes per run.
pub fn aggregate_transfer(ledgers: &[TransferLedger]) -> Result<Vec<Vec<f64>>> {
    let first = ledgers
        .first()
        .ok_or_else(|| Error::Analysis("no transfer ledgers to aggregate".into()))?;
    let k = first.num_tasks();
    if let Some(bad) = ledgers.iter().find(|l| l.num_tasks() != k) {
        return Err(Error::Analysis(format!(
            "ledgers disagree on task count: {k} vs {}",
            bad.num_tasks()
        )));
    }
    let mut mean = vec![vec![0.0; k]; k];
    for ledger in ledgers {
        for (row, counts) in mean.iter_mut().zip(ledger.counts()) {
            for (m, &c) in row.iter_mut().zip(counts) {
                *m += c as f64;
            }
        }
    }
    let n = ledgers.len() as f64;
    mean.iter_mut().flatten().for_each(|m| *m /= n);
    Ok(mean)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairIntensity {
    pub i: usize,
    pub j: usize,
    /// `m[i][j] + m[j][i]`.
    pub intensity: f64,
}

/// Unordered inter-task pairs by symmetrized intensity, strongest first.
/// Equal intensities keep `(i, j)` lexicographic order.
pub fn pair_intensities(matrix: &[Vec<f64>]) -> Vec<PairIntensity> {
    let k = matrix.len();
    let mut pairs: Vec<PairIntensity> = (0..k)
        .flat_map(|i| (i + 1..k).map(move |j| (i, j)))
        .map(|(i, j)| PairIntensity {
            i,
            j,
            intensity: matrix[i][j] + matrix[j][i],
        })
        .collect();
    pairs.sort_by(|a, b| b.intensity.total_cmp(&a.intensity));
    pairs
}
