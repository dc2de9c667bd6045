mod common;

use common::delaunay::{check, random_points, P};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn matches_oracle_on_generic_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let count = rng.gen_range(3..=20);
        let pts = random_points(&mut rng, count, 1 << 20);
        check(&pts, 1.0 / 1024.0).unwrap();
    }
}

#[test]
fn matches_oracle_on_degenerate_grids() {
    // Small grids force cocircular quadruples and collinear runs.
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for round in 0..300 {
        let grid = 3 + (round % 5) as i128;
        let count = rng.gen_range(3..=(grid * grid).min(20) as usize);
        let pts = random_points(&mut rng, count, grid);
        check(&pts, 0.5).unwrap();
    }
}

#[test]
fn matches_oracle_on_full_lattices() {
    for (rows, cols) in [(2, 2), (3, 3), (4, 5), (2, 7), (1, 6)] {
        let pts: Vec<P> = (0..rows)
            .flat_map(|r| (0..cols).map(move |c| (c, r)))
            .collect();
        check(&pts, 1.0).unwrap();
    }
}

#[test]
fn matches_oracle_on_fifty_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for grid in [9, 1 << 16] {
        let pts = random_points(&mut rng, 50, grid);
        check(&pts, 1.0).unwrap();
    }
}
