#![allow(dead_code)]

use std::path::{Path, PathBuf};

use mfcga_core::TspInstance;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn random_instance(name: &str, n: usize, seed: u64) -> TspInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coords = (0..n)
        .map(|_| (rng.gen_range(0..1000) as f64, rng.gen_range(0..1000) as f64))
        .collect();
    TspInstance::from_coords(name, coords).unwrap()
}

/// Exact optimum by enumerating every tour that starts at city 0.
pub fn brute_force_optimum(inst: &TspInstance) -> u64 {
    fn go(inst: &TspInstance, path: &mut Vec<usize>, used: &mut [bool], best: &mut u64) {
        let n = used.len();
        if path.len() == n {
            *best = (*best).min(inst.cycle_length(path));
            return;
        }
        for c in 1..n {
            if !used[c] {
                used[c] = true;
                path.push(c);
                go(inst, path, used, best);
                path.pop();
                used[c] = false;
            }
        }
    }
    let n = inst.dimension();
    let mut used = vec![false; n];
    used[0] = true;
    let mut best = u64::MAX;
    go(inst, &mut vec![0], &mut used, &mut best);
    best
}

/// `MFCGA_INSTANCES_DIR`, else the bundled `data/tsplib`.
pub fn instances_dir() -> PathBuf {
    std::env::var_os("MFCGA_INSTANCES_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| {
            let root = Path::new(env!("CARGO_MANIFEST_DIR")).ancestors().nth(2).unwrap();
            root.join("data/tsplib")
        })
}
