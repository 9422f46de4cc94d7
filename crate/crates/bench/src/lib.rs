//! Fixed inputs for the kernel benchmarks in `benches/`.

use mulab_core::invariants::{EllipticCurve, QuadraticField};
use mulab_core::IntMatrix;

/// A dense n×n integer matrix with entries in [-9, 9] from a linear congruential
/// sequence, so every run times the same input.
pub fn dense_matrix(n: usize, seed: u64) -> IntMatrix {
    let mut state = seed;
    let rows: Vec<Vec<i64>> = (0..n)
        .map(|_| {
            (0..n)
                .map(|_| {
                    state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    ((state >> 33) % 19) as i64 - 9
                })
                .collect()
        })
        .collect();
    IntMatrix::from_i64_rows(&rows)
}

/// The conductor-11 curve with K = Q(√−3) and p = 7.
pub fn level_11_triple() -> (EllipticCurve, QuadraticField, u64) {
    (EllipticCurve::parse("11:0 -1 1 -10 -20").unwrap(), QuadraticField::new(-3).unwrap(), 7)
}
