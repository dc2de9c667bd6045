//! Exact geometric predicates on `f64` input.
//!
//! Each predicate first evaluates in floating point against a static error
//! bound and only falls back to exact big-integer arithmetic when the sign
//! is not certain. Every finite `f64` is a dyadic rational, so scaling all
//! coordinates of one call by a common power of two makes them integers
//! without changing the sign of any homogeneous determinant.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use std::cmp::Ordering;

use super::Point2D;

const EPS: f64 = f64::EPSILON * 0.5;
const ORIENT_BOUND: f64 = (3.0 + 16.0 * EPS) * EPS;
const INCIRCLE_BOUND: f64 = (10.0 + 96.0 * EPS) * EPS;

fn decompose(x: f64) -> (i64, i32) {
    let bits = x.to_bits();
    let negative = bits >> 63 == 1;
    let biased = ((bits >> 52) & 0x7ff) as i32;
    let frac = (bits & ((1u64 << 52) - 1)) as i64;
    let (mantissa, exp) = if biased == 0 {
        (frac, 1 - 1075)
    } else {
        (frac | (1i64 << 52), biased - 1075)
    };
    (if negative { -mantissa } else { mantissa }, exp)
}

/// Converts coordinates to integers sharing one power-of-two scale.
fn to_exact<const K: usize>(coords: [f64; K]) -> [BigInt; K] {
    let parts = coords.map(decompose);
    let min_exp = parts
        .iter()
        .filter(|(m, _)| *m != 0)
        .map(|&(_, e)| e)
        .min()
        .unwrap_or(0);
    parts.map(|(m, e)| BigInt::from(m) << ((e - min_exp) as usize))
}

fn sign_of(x: &BigInt) -> Ordering {
    if x.is_zero() {
        Ordering::Equal
    } else if x.is_positive() {
        Ordering::Greater
    } else {
        Ordering::Less
    }
}

fn float_sign(x: f64) -> Ordering {
    x.partial_cmp(&0.0).expect("finite determinant")
}

/// Sign of the orientation determinant: `Greater` when `a, b, c` turn
/// counter-clockwise, `Equal` when collinear.
pub fn orient(a: Point2D, b: Point2D, c: Point2D) -> Ordering {
    let left = (a.x - c.x) * (b.y - c.y);
    let right = (a.y - c.y) * (b.x - c.x);
    let det = left - right;
    let bound = ORIENT_BOUND * (left.abs() + right.abs());
    if det > bound || -det > bound {
        return float_sign(det);
    }
    let [ax, ay, bx, by, cx, cy] = to_exact([a.x, a.y, b.x, b.y, c.x, c.y]);
    sign_of(&((&ax - &cx) * (&by - &cy) - (&ay - &cy) * (&bx - &cx)))
}

/// Sign of the in-circle determinant: `Greater` when `d` lies strictly
/// inside the circle through counter-clockwise `a, b, c`.
pub fn incircle(a: Point2D, b: Point2D, c: Point2D, d: Point2D) -> Ordering {
    let (adx, ady) = (a.x - d.x, a.y - d.y);
    let (bdx, bdy) = (b.x - d.x, b.y - d.y);
    let (cdx, cdy) = (c.x - d.x, c.y - d.y);

    let (bdxcdy, cdxbdy) = (bdx * cdy, cdx * bdy);
    let (cdxady, adxcdy) = (cdx * ady, adx * cdy);
    let (adxbdy, bdxady) = (adx * bdy, bdx * ady);
    let alift = adx * adx + ady * ady;
    let blift = bdx * bdx + bdy * bdy;
    let clift = cdx * cdx + cdy * cdy;

    let det = alift * (bdxcdy - cdxbdy) + blift * (cdxady - adxcdy) + clift * (adxbdy - bdxady);
    let permanent = (bdxcdy.abs() + cdxbdy.abs()) * alift
        + (cdxady.abs() + adxcdy.abs()) * blift
        + (adxbdy.abs() + bdxady.abs()) * clift;
    let bound = INCIRCLE_BOUND * permanent;
    if det > bound || -det > bound {
        return float_sign(det);
    }

    let [ax, ay, bx, by, cx, cy, dx, dy] = to_exact([a.x, a.y, b.x, b.y, c.x, c.y, d.x, d.y]);
    let (adx, ady) = (&ax - &dx, &ay - &dy);
    let (bdx, bdy) = (&bx - &dx, &by - &dy);
    let (cdx, cdy) = (&cx - &dx, &cy - &dy);
    let alift = &adx * &adx + &ady * &ady;
    let blift = &bdx * &bdx + &bdy * &bdy;
    let clift = &cdx * &cdx + &cdy * &cdy;
    let det = alift * (&bdx * &cdy - &cdx * &bdy)
        + blift * (&cdx * &ady - &adx * &cdy)
        + clift * (&adx * &bdy - &bdx * &ady);
    sign_of(&det)
}

/// In-circle test with cocircular ties broken by symbolic perturbation.
///
/// Each point is lifted onto the paraboloid `z = x² + y²` plus an
/// infinitesimal `εᵏ`, where `k` is the point's rank by id (smallest id
/// gets the largest lift). On an exact tie the sign is decided by the
/// cofactor belonging to the smallest id whose cofactor is non-zero. The
/// result is never "on the circle", and the induced triangulation is the
/// Delaunay triangulation of the perturbed (generic) point set.
pub fn incircle_perturbed(pts: &[Point2D], ids: [usize; 4]) -> bool {
    let [a, b, c, d] = ids.map(|i| pts[i]);
    match incircle(a, b, c, d) {
        Ordering::Greater => return true,
        Ordering::Less => return false,
        Ordering::Equal => {}
    }
    let mut rows = [0usize, 1, 2, 3];
    rows.sort_by_key(|&r| ids[r]);
    for row in rows {
        let others: Vec<Point2D> = (0..4).filter(|&r| r != row).map(|r| pts[ids[r]]).collect();
        let minor = orient(others[0], others[1], others[2]);
        if minor == Ordering::Equal {
            continue;
        }
        // Cofactor sign of the lift column is (-1)^row.
        let cofactor = if row % 2 == 0 { minor } else { minor.reverse() };
        return cofactor == Ordering::Greater;
    }
    unreachable!("four distinct cocircular points have no collinear triple")
}
