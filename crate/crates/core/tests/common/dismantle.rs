use std::collections::BTreeSet;

use netslice::graph::Graph;
use netslice::walk::{run_parallel, ParallelOptions};

/// What every trajectory of a parallel dismantling is reduced to.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Outcome {
    pub splits: Vec<(u64, usize, usize)>,
    pub root_permanence: u64,
    pub steps: u64,
}

#[derive(Clone)]
struct Live {
    members: Vec<usize>,
    position: usize,
    birth: u64,
}

#[derive(Clone)]
struct Branch {
    edges: BTreeSet<(usize, usize)>,
    live: Vec<Live>,
    tick: u64,
    steps: u64,
    splits: Vec<(u64, usize, usize)>,
    root_death: Option<u64>,
}

fn key(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

fn reach(edges: &BTreeSet<(usize, usize)>, from: usize, within: &[usize]) -> Vec<usize> {
    let mut seen = vec![from];
    let mut i = 0;
    while i < seen.len() {
        let x = seen[i];
        for &y in within {
            if !seen.contains(&y) && edges.contains(&key(x, y)) {
                seen.push(y);
            }
        }
        i += 1;
    }
    seen.sort_unstable();
    seen
}

/// Follows every branch of the random choices (start node, each move,
/// each spawned agent's placement) of a parallel dismantling.
pub fn enumerate(n: usize, edges: &[(usize, usize)]) -> BTreeSet<Outcome> {
    let mut out = BTreeSet::new();
    for start in 0..n {
        let b = Branch {
            edges: edges.iter().map(|&(a, b)| key(a, b)).collect(),
            live: vec![Live {
                members: (0..n).collect(),
                position: start,
                birth: 0,
            }],
            tick: 0,
            steps: 0,
            splits: vec![],
            root_death: None,
        };
        explore_tick(b, &mut out);
    }
    out
}

fn explore_tick(mut b: Branch, out: &mut BTreeSet<Outcome>) {
    if b.live.is_empty() {
        out.insert(Outcome {
            splits: b.splits,
            root_permanence: b.root_death.unwrap(),
            steps: b.steps,
        });
        return;
    }
    b.tick += 1;
    // Movers are the components alive at the start of the tick, in
    // creation order; spawned agents wait for the next tick.
    let movers = b.live.len();
    explore_move(b, 0, movers, Vec::new(), out);
}

fn explore_move(
    b: Branch,
    i: usize,
    movers: usize,
    spawned: Vec<Live>,
    out: &mut BTreeSet<Outcome>,
) {
    if i == movers {
        let mut next = b;
        next.live.retain(|l| l.members.len() > 1);
        next.live.extend(spawned);
        return explore_tick(next, out);
    }
    let agent = b.live[i].clone();
    let alpha = agent.position;
    let nbrs: Vec<usize> = agent
        .members
        .iter()
        .copied()
        .filter(|&y| b.edges.contains(&key(alpha, y)))
        .collect();
    for beta in nbrs {
        let mut nb = b.clone();
        nb.edges.remove(&key(alpha, beta));
        nb.steps += 1;
        let side = reach(&nb.edges, beta, &agent.members);
        if side.contains(&alpha) {
            nb.live[i].position = beta;
            explore_move(nb, i + 1, movers, spawned.clone(), out);
            continue;
        }
        let other: Vec<usize> = agent
            .members
            .iter()
            .copied()
            .filter(|x| !side.contains(x))
            .collect();
        let (small, big) = if side.len() <= other.len() {
            (side.len(), other.len())
        } else {
            (other.len(), side.len())
        };
        nb.splits.push((nb.tick, small, big));
        if agent.birth == 0 && nb.root_death.is_none() {
            nb.root_death = Some(nb.tick);
        }
        // The parent retires; shrinking it to one member drops it below.
        nb.live[i].members.truncate(1);
        let children: Vec<Vec<usize>> = [side, other].into_iter().filter(|c| c.len() > 1).collect();
        let mut placements: Vec<Vec<Live>> = vec![spawned.clone()];
        for c in &children {
            placements = placements
                .into_iter()
                .flat_map(|p| {
                    c.iter()
                        .map(move |&pos| {
                            let mut p = p.clone();
                            p.push(Live {
                                members: c.clone(),
                                position: pos,
                                birth: nb.tick,
                            });
                            p
                        })
                        .collect::<Vec<_>>()
                })
                .collect();
        }
        for p in placements {
            explore_move(nb.clone(), i + 1, movers, p, out);
        }
    }
}

pub fn engine_outcomes(g: &Graph, seeds: u64) -> BTreeSet<Outcome> {
    (0..seeds)
        .map(|seed| {
            let run = run_parallel(g, seed, ParallelOptions::default()).unwrap();
            Outcome {
                splits: run.events.iter().map(|e| (e.tick, e.n, e.m)).collect(),
                root_permanence: run.dendrogram.root().permanence().unwrap(),
                steps: run.total_steps,
            }
        })
        .collect()
}
