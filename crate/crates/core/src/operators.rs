//! Permutation operators applied to unified genomes: Davis order crossover and
//! the 2-opt move (a single segment reversal).

use rand::Rng;

use crate::error::{Error, Result};
use crate::tsplib::TspInstance;

/// Inclusive segment bounds `lo..=hi`, 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CutPair {
    lo: usize,
    hi: usize,
}

impl CutPair {
    pub fn new(lo: usize, hi: usize, len: usize) -> Result<Self> {
        if lo > hi || hi >= len {
            return Err(Error::Operator(format!(
                "invalid cuts ({lo}, {hi}) for length {len}"
            )));
        }
        Ok(Self { lo, hi })
    }

    /// Two distinct positions drawn uniformly without replacement, ordered.
    /// A genome of length 1 yields the degenerate pair `(0, 0)`.
    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        assert!(len > 0, "cannot cut an empty genome");
        if len == 1 {
            return Self { lo: 0, hi: 0 };
        }
        let a = rng.gen_range(0..len);
        let mut b = rng.gen_range(0..len - 1);
        if b >= a {
            b += 1;
        }
        Self {
            lo: a.min(b),
            hi: a.max(b),
        }
    }

    pub fn lo(&self) -> usize {
        self.lo
    }

    pub fn hi(&self) -> usize {
        self.hi
    }
}

/// Davis order crossover.
///
/// The child keeps `p1[lo..=hi]` in place. The other positions are filled,
/// starting right after `hi` and wrapping around, with the genes of `p2` read
/// cyclically from the position after `hi`, skipping genes already present.
pub fn order_crossover(p1: &[usize], p2: &[usize], cuts: CutPair) -> Result<Vec<usize>> {
    let n = p1.len();
    if p2.len() != n {
        return Err(Error::Operator(format!(
            "parent lengths differ: {} vs {}",
            n,
            p2.len()
        )));
    }
    if cuts.hi >= n {
        return Err(Error::Operator(format!(
            "cuts ({}, {}) exceed genome length {n}",
            cuts.lo, cuts.hi
        )));
    }
    let mut child = vec![0usize; n];
    let mut present = vec![false; n];
    for pos in cuts.lo..=cuts.hi {
        let gene = p1[pos];
        child[pos] = gene;
        present[gene] = true;
    }
    let mut write = (cuts.hi + 1) % n;
    for offset in 1..=n {
        let gene = p2[(cuts.hi + offset) % n];
        if !present[gene] {
            present[gene] = true;
            child[write] = gene;
            write = (write + 1) % n;
        }
    }
    Ok(child)
}

/// Returns `tour` with positions `lo..=hi` reversed.
pub fn two_opt_move(tour: &[usize], cuts: CutPair) -> Vec<usize> {
    let mut out = tour.to_vec();
    two_opt_in_place(&mut out, cuts);
    out
}

pub fn two_opt_in_place(tour: &mut [usize], cuts: CutPair) {
    if cuts.lo < cuts.hi {
        tour[cuts.lo..=cuts.hi].reverse();
    }
}

/// Change in closed-tour length caused by reversing `lo..=hi` of `tour`:
/// the two new edges minus the two removed ones.
pub fn two_opt_delta(instance: &TspInstance, tour: &[usize], cuts: CutPair) -> i64 {
    let n = tour.len();
    if cuts.lo >= cuts.hi || (cuts.lo == 0 && cuts.hi == n - 1) {
        return 0;
    }
    let before = tour[(cuts.lo + n - 1) % n];
    let first = tour[cuts.lo];
    let last = tour[cuts.hi];
    let after = tour[(cuts.hi + 1) % n];
    let d = |i, j| instance.distance(i, j) as i64;
    d(before, last) + d(first, after) - d(before, first) - d(last, after)
}
