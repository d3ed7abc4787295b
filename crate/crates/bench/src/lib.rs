//! Fixtures shared by the benchmarks.

use mfcga_core::{MultitaskProblem, TspInstance};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `n` cities with integer coordinates drawn uniformly from a 4000×4000
/// square, the same scale as the kro instances.
pub fn random_instance(name: &str, n: usize, seed: u64) -> TspInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coords = (0..n)
        .map(|_| (rng.gen_range(0..4000) as f64, rng.gen_range(0..4000) as f64))
        .collect();
    TspInstance::from_coords(name, coords).expect("non-empty instance")
}

/// Eight random tasks with the sizes of the largest built-in test case.
pub fn eight_task_problem(seed: u64) -> MultitaskProblem {
    let sizes = [100, 150, 200, 100, 100, 150, 100, 100];
    let tasks = sizes
        .iter()
        .enumerate()
        .map(|(i, &n)| random_instance(&format!("r{i}"), n, seed + i as u64))
        .collect();
    MultitaskProblem::from_instances(tasks).expect("valid problem")
}
