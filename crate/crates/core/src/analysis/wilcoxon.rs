//! One-sided Wilcoxon rank-sum (Mann-Whitney) test.
//!
//! `U = R_a - n(n+1)/2`, where `R_a` is the midrank sum of `a`. Equivalently
//! `U = #{(i, j): b_j < a_i} + #{ties}/2`, so small `U` means `a` tends to be
//! smaller. The normal approximation uses the tie-corrected variance
//!
//! `σ² = nm/12 · ((N + 1) - Σ(t³ - t) / (N(N - 1)))`
//!
//! and a continuity correction of one half toward zero. The alternative is
//! "`a` is stochastically smaller than `b`", so `p = Φ(z)`.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

/// One-sided 95% critical value.
pub const Z_CRITICAL: f64 = -1.64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WilcoxonOutcome {
    pub u: f64,
    pub z: f64,
    pub p: f64,
    /// `z < Z_CRITICAL`.
    pub significant: bool,
    /// Exact lower-tail `P(U ≤ u)`, available when the samples have no ties.
    pub exact_p: Option<f64>,
}

pub fn normal_cdf(z: f64) -> f64 {
    Normal::new(0.0, 1.0).expect("standard normal").cdf(z)
}

pub fn wilcoxon_rank_sum(a: &[f64], b: &[f64]) -> Result<WilcoxonOutcome> {
    if a.len() < 2 || b.len() < 2 {
        return Err(Error::Analysis(format!(
            "rank-sum test needs at least 2 values per sample, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    if a.iter().chain(b).any(|v| v.is_nan()) {
        return Err(Error::Analysis("rank-sum test on NaN values".into()));
    }
    let (n, m) = (a.len(), b.len());
    let total = n + m;

    let mut pooled: Vec<(f64, bool)> = a
        .iter()
        .map(|&v| (v, true))
        .chain(b.iter().map(|&v| (v, false)))
        .collect();
    pooled.sort_by(|x, y| x.0.total_cmp(&y.0));

    let mut rank_sum_a = 0.0;
    let mut tie_term = 0.0;
    let mut has_ties = false;
    let mut start = 0;
    while start < total {
        let mut end = start + 1;
        while end < total && pooled[end].0 == pooled[start].0 {
            end += 1;
        }
        let t = (end - start) as f64;
        // ranks start+1 ..= end share their mean
        let midrank = (start + 1 + end) as f64 / 2.0;
        let from_a = pooled[start..end].iter().filter(|e| e.1).count() as f64;
        rank_sum_a += midrank * from_a;
        if end - start > 1 {
            has_ties = true;
            tie_term += t * t * t - t;
        }
        start = end;
    }

    let (nf, mf, tf) = (n as f64, m as f64, total as f64);
    let u = rank_sum_a - nf * (nf + 1.0) / 2.0;
    let mu = nf * mf / 2.0;
    let variance = nf * mf / 12.0 * ((tf + 1.0) - tie_term / (tf * (tf - 1.0)));
    let exact_p = (!has_ties).then(|| exact_u_lower_tail(n, m, u));

    if variance <= 0.0 {
        // Every value equal: no evidence either way.
        return Ok(WilcoxonOutcome {
            u,
            z: 0.0,
            p: 0.5,
            significant: false,
            exact_p,
        });
    }
    let d = u - mu;
    let corrected = d.signum() * (d.abs() - 0.5).max(0.0);
    let z = corrected / variance.sqrt();
    Ok(WilcoxonOutcome {
        u,
        z,
        p: normal_cdf(z),
        significant: z < Z_CRITICAL,
        exact_p,
    })
}

/// `P(U ≤ u)` under the null for tie-free samples of sizes `n` and `m`.
///
/// Counts arrangements with the recurrence
/// `c(n, m, u) = c(n - 1, m, u - m) + c(n, m - 1, u)`, carried as
/// probabilities so large samples do not overflow.
pub fn exact_u_lower_tail(n: usize, m: usize, u: f64) -> f64 {
    let max_u = n * m;
    if u < 0.0 {
        return 0.0;
    }
    let cutoff = (u.floor() as usize).min(max_u);
    // dist[j][s]: P(U = s) for sizes (i, j), updated in place over i.
    let mut dist: Vec<Vec<f64>> = (0..=m).map(|_| vec![1.0]).collect();
    for i in 1..=n {
        let mut next: Vec<Vec<f64>> = Vec::with_capacity(m + 1);
        next.push(vec![1.0]);
        for j in 1..=m {
            let w_a = i as f64 / (i + j) as f64;
            let w_b = 1.0 - w_a;
            let mut row = vec![0.0; i * j + 1];
            // Largest value is a's: it exceeds all j of b's values.
            for (s, &p) in dist[j].iter().enumerate() {
                row[s + j] += w_a * p;
            }
            // Largest value is b's: U unchanged.
            for (s, &p) in next[j - 1].iter().enumerate() {
                row[s] += w_b * p;
            }
            next.push(row);
        }
        dist = next;
    }
    dist[m][..=cutoff].iter().sum::<f64>().min(1.0)
}
