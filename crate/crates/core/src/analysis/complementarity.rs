use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::tsplib::{coord_key, node_overlap, Tour, TspInstance};

type Key = (u64, u64);

/// Symmetric matrix of `node_overlap` percentages; the diagonal is 100.
pub fn node_overlap_matrix(instances: &[TspInstance]) -> Vec<Vec<f64>> {
    let k = instances.len();
    let mut m = vec![vec![100.0; k]; k];
    for i in 0..k {
        for j in i + 1..k {
            let v = node_overlap(&instances[i], &instances[j]);
            m[i][j] = v;
            m[j][i] = v;
        }
    }
    m
}

/// Cyclic sequence of shared coordinates in tour order, each visited once.
fn induced_cycle(instance: &TspInstance, tour: &Tour, shared: &HashSet<Key>) -> Vec<Key> {
    let mut seen = HashSet::new();
    tour.cities()
        .iter()
        .map(|&c| coord_key(instance.coords()[c]))
        .filter(|k| shared.contains(k) && seen.insert(*k))
        .collect()
}

fn cycle_edges(cycle: &[Key]) -> HashSet<(Key, Key)> {
    let n = cycle.len();
    if n < 2 {
        return HashSet::new();
    }
    (0..n)
        .map(|i| {
            let (a, b) = (cycle[i], cycle[(i + 1) % n]);
            if a <= b {
                (a, b)
            } else {
                (b, a)
            }
        })
        .collect()
}

/// Edge agreement between two tours restricted to the cities both instances
/// share (matched by coordinates), in percent.
///
/// Each tour is reduced to the cyclic order in which it visits the shared
/// cities; the result is the share of undirected edges the two reduced
/// cycles have in common. Zero when fewer than two cities are shared.
pub fn best_solution_overlap(
    a: &TspInstance,
    tour_a: &Tour,
    b: &TspInstance,
    tour_b: &Tour,
) -> Result<f64> {
    for (inst, tour) in [(a, tour_a), (b, tour_b)] {
        if tour.len() != inst.dimension() {
            return Err(Error::DimensionMismatch {
                expected: inst.dimension(),
                actual: tour.len(),
            });
        }
    }
    let keys_b: HashSet<Key> = b.coords().iter().map(|&c| coord_key(c)).collect();
    let shared: HashSet<Key> = a
        .coords()
        .iter()
        .map(|&c| coord_key(c))
        .filter(|k| keys_b.contains(k))
        .collect();
    let edges_a = cycle_edges(&induced_cycle(a, tour_a, &shared));
    let edges_b = cycle_edges(&induced_cycle(b, tour_b, &shared));
    let denom = edges_a.len().min(edges_b.len());
    if denom == 0 {
        return Ok(0.0);
    }
    let common = edges_a.intersection(&edges_b).count();
    Ok(100.0 * common as f64 / denom as f64)
}
