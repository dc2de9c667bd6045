//! Incremental Bowyer–Watson Delaunay triangulation.
//!
//! The convex hull is closed off by "ghost" triangles that share a single
//! symbolic vertex at infinity. A ghost triangle `(u, v, ∞)` is in conflict
//! with a point lying strictly to the left of `u → v`, or on the open segment
//! `uv`. This plays the role of a super-triangle without the missing-hull-edge
//! failure a finite one has on nearly collinear hull points.
//!
//! Points are inserted in id order. Cocircular ties are resolved by
//! [`incircle_perturbed`], so the output is unique for every input.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};

use super::predicates::{incircle_perturbed, orient};
use super::{GenError, Point2D};

const INF: usize = usize::MAX;

#[derive(Debug, Clone, Copy)]
struct Tri {
    v: [usize; 3],
    alive: bool,
}

impl Tri {
    fn is_ghost(&self) -> bool {
        self.v[2] == INF
    }

    fn edges(&self) -> [(usize, usize); 3] {
        let [a, b, c] = self.v;
        [(a, b), (b, c), (c, a)]
    }
}

struct Mesh<'a> {
    pts: &'a [Point2D],
    tris: Vec<Tri>,
    owner: HashMap<(usize, usize), usize>,
}

impl<'a> Mesh<'a> {
    fn add(&mut self, v: [usize; 3]) {
        // Ghosts keep the infinite vertex last.
        let v = match v {
            [INF, b, c] => [b, c, INF],
            [a, INF, c] => [c, a, INF],
            v => v,
        };
        let id = self.tris.len();
        let tri = Tri { v, alive: true };
        debug_assert!(
            tri.is_ghost()
                || orient(self.pts[v[0]], self.pts[v[1]], self.pts[v[2]]) == Ordering::Greater,
            "new triangle {v:?} is not counter-clockwise"
        );
        for e in tri.edges() {
            let prev = self.owner.insert(e, id);
            debug_assert!(prev.is_none(), "directed edge {e:?} owned twice");
        }
        self.tris.push(tri);
    }

    fn kill(&mut self, id: usize) {
        self.tris[id].alive = false;
        for e in self.tris[id].edges() {
            self.owner.remove(&e);
        }
    }

    fn strictly_between(&self, u: usize, v: usize, p: usize) -> bool {
        let (a, b, q) = (self.pts[u], self.pts[v], self.pts[p]);
        let inside = |lo: f64, hi: f64, x: f64| (lo < x && x < hi) || (hi < x && x < lo);
        if a.x != b.x {
            inside(a.x, b.x, q.x)
        } else {
            inside(a.y, b.y, q.y)
        }
    }

    fn conflicts(&self, id: usize, p: usize) -> bool {
        let t = &self.tris[id];
        let [a, b, c] = t.v;
        if t.is_ghost() {
            match orient(self.pts[a], self.pts[b], self.pts[p]) {
                Ordering::Greater => true,
                Ordering::Less => false,
                Ordering::Equal => self.strictly_between(a, b, p),
            }
        } else {
            incircle_perturbed(self.pts, [a, b, c, p])
        }
    }

    fn insert(&mut self, p: usize) {
        let seed = (0..self.tris.len())
            .find(|&t| self.tris[t].alive && self.conflicts(t, p))
            .expect("every point conflicts with some triangle");

        let mut state: HashMap<usize, bool> = HashMap::new();
        state.insert(seed, true);
        let mut stack = vec![seed];
        let mut cavity = Vec::new();
        let mut boundary = Vec::new();
        while let Some(t) = stack.pop() {
            cavity.push(t);
            for (a, b) in self.tris[t].edges() {
                let nb = self.owner[&(b, a)];
                let in_cavity = *state.entry(nb).or_insert_with(|| {
                    let hit = self.conflicts(nb, p);
                    if hit {
                        stack.push(nb);
                    }
                    hit
                });
                if !in_cavity {
                    boundary.push((a, b));
                }
            }
        }
        for t in cavity {
            self.kill(t);
        }
        for (a, b) in boundary {
            self.add([a, b, p]);
        }
    }
}

fn collinear_path(pts: &[Point2D]) -> Vec<(usize, usize)> {
    let mut order: Vec<usize> = (0..pts.len()).collect();
    order.sort_by(|&i, &j| {
        pts[i]
            .x
            .total_cmp(&pts[j].x)
            .then(pts[i].y.total_cmp(&pts[j].y))
    });
    order
        .windows(2)
        .map(|w| (w[0].min(w[1]), w[0].max(w[1])))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect()
}

/// Delaunay edge set of `points` as sorted `(u, v)` pairs with `u < v`.
///
/// When every point is collinear (or there are fewer than three), the
/// result is the path through the points in `(x, y)` order.
pub fn delaunay(points: &[Point2D]) -> Result<Vec<(usize, usize)>, GenError> {
    if let Some(i) = points
        .iter()
        .position(|p| !p.x.is_finite() || !p.y.is_finite())
    {
        return Err(GenError::NonFinitePoint(i));
    }
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&i, &j| {
        points[i]
            .x
            .total_cmp(&points[j].x)
            .then(points[i].y.total_cmp(&points[j].y))
    });
    for w in order.windows(2) {
        if points[w[0]] == points[w[1]] {
            return Err(GenError::DuplicatePoint(w[0].min(w[1]), w[0].max(w[1])));
        }
    }
    if points.len() < 3 {
        return Ok(collinear_path(points));
    }

    let Some(k) =
        (2..points.len()).find(|&k| orient(points[0], points[1], points[k]) != Ordering::Equal)
    else {
        return Ok(collinear_path(points));
    };
    let first = if orient(points[0], points[1], points[k]) == Ordering::Greater {
        [0, 1, k]
    } else {
        [1, 0, k]
    };

    let mut mesh = Mesh {
        pts: points,
        tris: Vec::with_capacity(4 * points.len()),
        owner: HashMap::with_capacity(12 * points.len()),
    };
    mesh.add(first);
    let [a, b, c] = first;
    for (u, v) in [(a, b), (b, c), (c, a)] {
        mesh.add([v, u, INF]);
    }
    for p in 2..points.len() {
        if p != k {
            mesh.insert(p);
        }
    }

    let mut edges = BTreeSet::new();
    for t in mesh.tris.iter().filter(|t| t.alive && !t.is_ghost()) {
        for (u, v) in t.edges() {
            edges.insert((u.min(v), u.max(v)));
        }
    }
    Ok(edges.into_iter().collect())
}
