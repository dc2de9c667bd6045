//! Brute-force Delaunay oracle: every triangle of input points whose
//! (tie-broken) circumcircle holds no other point contributes its edges.
//!
//! Coordinates are drawn on integer grids and passed to the triangulator
//! as exactly representable `f64`, so the oracle can work in `i128`
//! without sharing any arithmetic with the implementation.

use std::collections::BTreeSet;

use netslice::generators::{delaunay, Point2D};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub type P = (i128, i128);

fn det3(m: [[i128; 3]; 3]) -> i128 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

fn det4(m: [[i128; 4]; 4]) -> i128 {
    (0..4)
        .map(|col| {
            let minor = minor4(m, 0, col);
            let sign = if col % 2 == 0 { 1 } else { -1 };
            sign * m[0][col] * det3(minor)
        })
        .sum()
}

fn minor4(m: [[i128; 4]; 4], row: usize, col: usize) -> [[i128; 3]; 3] {
    let mut out = [[0; 3]; 3];
    let rows = (0..4).filter(|&r| r != row);
    for (i, r) in rows.enumerate() {
        let cols = (0..4).filter(|&c| c != col);
        for (j, c) in cols.enumerate() {
            out[i][j] = m[r][c];
        }
    }
    out
}

fn orient(a: P, b: P, c: P) -> i128 {
    (b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0)
}

/// True when point `ids[3]` is inside the circle of counter-clockwise
/// `ids[0..3]`, with lifts `x² + y² + ε^(rank by id)`.
fn inside(pts: &[P], ids: [usize; 4]) -> bool {
    let lifted = ids.map(|i| {
        let (x, y) = pts[i];
        [x, y, x * x + y * y, 1]
    });
    let d = det4(lifted);
    if d != 0 {
        return d > 0;
    }
    let mut rows = [0, 1, 2, 3];
    rows.sort_by_key(|&r| ids[r]);
    for r in rows {
        let sign = if (r + 2) % 2 == 0 { 1 } else { -1 };
        let cof = sign * det3(minor4(lifted, r, 2));
        if cof != 0 {
            return cof > 0;
        }
    }
    panic!("degenerate perturbation");
}

pub fn oracle(pts: &[P]) -> Vec<(usize, usize)> {
    let n = pts.len();
    let mut edges = BTreeSet::new();
    for i in 0..n {
        for j in (i + 1)..n {
            for k in (j + 1)..n {
                let o = orient(pts[i], pts[j], pts[k]);
                if o == 0 {
                    continue;
                }
                let tri = if o > 0 { [i, j, k] } else { [j, i, k] };
                let empty = (0..n)
                    .filter(|l| !tri.contains(l))
                    .all(|l| !inside(pts, [tri[0], tri[1], tri[2], l]));
                if empty {
                    edges.extend([(i, j), (i, k), (j, k)]);
                }
            }
        }
    }
    if edges.is_empty() {
        // All collinear: consecutive points along the line.
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&i| pts[i]);
        for w in order.windows(2) {
            edges.insert((w[0].min(w[1]), w[0].max(w[1])));
        }
    }
    edges.into_iter().collect()
}

pub fn random_points(rng: &mut ChaCha8Rng, count: usize, grid: i128) -> Vec<P> {
    let mut seen = BTreeSet::new();
    while seen.len() < count {
        seen.insert((rng.gen_range(0..grid), rng.gen_range(0..grid)));
    }
    // Shuffle so ids are not in sorted order.
    let mut pts: Vec<P> = seen.into_iter().collect();
    for i in (1..pts.len()).rev() {
        pts.swap(i, rng.gen_range(0..=i));
    }
    pts
}

fn as_f64(pts: &[P], scale: f64) -> Vec<Point2D> {
    pts.iter()
        .map(|&(x, y)| Point2D::new(x as f64 * scale, y as f64 * scale))
        .collect()
}

pub fn check(pts: &[P], scale: f64) -> Result<(), String> {
    let got = delaunay(&as_f64(pts, scale)).map_err(|e| e.to_string())?;
    let want = oracle(pts);
    if got == want {
        Ok(())
    } else {
        Err(format!("points {pts:?}\n got {got:?}\nwant {want:?}"))
    }
}
