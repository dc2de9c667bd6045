mod common;

use common::dismantle::{engine_outcomes, enumerate, Outcome};
use netslice::dendrogram::{Axis, Dendrogram};
use netslice::generators::{generate, GenSpec, Model};
use netslice::graph::Graph;
use netslice::walk::{run_parallel, run_sequential, ParallelOptions};
use proptest::prelude::*;

#[test]
fn k3_matches_exhaustive_enumeration() {
    let expected = enumerate(3, &[(0, 1), (0, 2), (1, 2)]);
    assert_eq!(
        expected.into_iter().collect::<Vec<_>>(),
        vec![Outcome {
            splits: vec![(2, 1, 2), (3, 1, 1)],
            root_permanence: 2,
            steps: 3
        }]
    );
    assert_eq!(
        engine_outcomes(&Graph::complete(3), 500),
        enumerate(3, &[(0, 1), (0, 2), (1, 2)])
    );
}

#[test]
fn small_graphs_match_exhaustive_enumeration() {
    let cases: Vec<(usize, Vec<(usize, usize)>)> = vec![
        (4, vec![(0, 1), (1, 2), (2, 3)]),
        (4, vec![(0, 1), (0, 2), (0, 3)]),
        (4, vec![(0, 1), (1, 2), (2, 3), (3, 0)]),
        (4, vec![(0, 1), (1, 2), (2, 0), (2, 3)]),
    ];
    for (n, edges) in cases {
        let g = Graph::from_edges(n, edges.iter().copied()).unwrap();
        let expected = enumerate(n, &edges);
        let seen = engine_outcomes(&g, 3000);
        assert!(
            seen.is_subset(&expected),
            "{edges:?}: engine produced an impossible outcome"
        );
        assert_eq!(
            seen, expected,
            "{edges:?}: some reachable outcome never sampled"
        );
    }
}

#[test]
fn k3_sequential_walk() {
    for seed in 0..200 {
        let t = run_sequential(&Graph::complete(3), seed).unwrap();
        let sizes: Vec<_> = t.splits.iter().map(|e| (e.n, e.m)).collect();
        // The walker always stands in the pair after the first cut.
        assert_eq!(sizes, [(1, 2), (1, 1)]);
        assert_eq!(t.duration, 3);
    }
}

fn model_graph(model: Model, seed: u64) -> Graph {
    generate(&GenSpec::new(model, 49, seed)).unwrap().graph
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn parallel_run_conserves(model_idx in 0usize..3, gseed: u64, wseed: u64) {
        let g = model_graph(Model::ALL[model_idx], gseed);
        let run = run_parallel(&g, wseed, ParallelOptions::default()).unwrap();
        prop_assert_eq!(run.total_steps as usize, g.edge_count());
        prop_assert_eq!(run.events.len(), g.node_count() - 1);
        for e in &run.events {
            prop_assert_eq!(e.n + e.m, e.parent_size);
            prop_assert!(1 <= e.n && e.n <= e.m);
        }
        let leaf_total: usize = run.dendrogram.leaves().map(|r| r.size).sum();
        prop_assert_eq!(leaf_total, g.node_count());
        prop_assert!(run.dendrogram.leaves().all(|r| r.size == 1));
        prop_assert!(run.dendrogram.validate().is_ok());
    }

    #[test]
    fn events_rebuild_the_dendrogram(model_idx in 0usize..3, gseed: u64, wseed: u64) {
        let g = model_graph(Model::ALL[model_idx], gseed);
        let run = run_parallel(&g, wseed, ParallelOptions::default()).unwrap();
        let rebuilt = Dendrogram::build(&run.events, g.node_count()).unwrap();
        let engine = run.dendrogram.without_members();
        prop_assert!(rebuilt.records().eq(engine.records()));
    }

    #[test]
    fn time_axis_newick_round_trips(model_idx in 0usize..3, gseed: u64, wseed: u64) {
        let g = model_graph(Model::ALL[model_idx], gseed);
        let run = run_parallel(&g, wseed, ParallelOptions::default()).unwrap();
        let d = run.dendrogram.without_members();
        let text = d.export_newick(Axis::Time);
        let back = Dendrogram::parse_newick(&text, Axis::Time).unwrap();
        prop_assert!(back.records().eq(d.records()));
        prop_assert_eq!(back.export_newick(Axis::Time), text);
    }

    #[test]
    fn json_round_trips(gseed: u64, wseed: u64, cut in 1u64..40) {
        let g = model_graph(Model::Ba, gseed);
        let opts = ParallelOptions { truncate_at_tick: Some(cut) };
        let run = run_parallel(&g, wseed, opts).unwrap();
        let d = run.dendrogram.without_members();
        let back = Dendrogram::from_json(&d.to_json()).unwrap();
        prop_assert_eq!(back, d);
    }

    #[test]
    fn sequential_walk_conserves(model_idx in 0usize..3, gseed: u64, wseed: u64) {
        let g = model_graph(Model::ALL[model_idx], gseed);
        let t = run_sequential(&g, wseed).unwrap();
        prop_assert!(t.duration as usize <= g.edge_count());
        let mut size = g.node_count();
        for (e, &branch) in t.splits.iter().zip(&t.branches) {
            prop_assert_eq!(e.parent_size, size);
            prop_assert_eq!(e.n + e.m, size);
            size = if branch == e.child_small_id { e.n } else { e.m };
        }
        prop_assert_eq!(size, 1);
    }
}

#[test]
fn truncated_runs_mark_open_leaves() {
    let g = model_graph(Model::Geo, 5);
    let run = run_parallel(
        &g,
        9,
        ParallelOptions {
            truncate_at_tick: Some(10),
        },
    )
    .unwrap();
    assert!(run.truncated);
    assert!(run.total_steps < g.edge_count() as u64);
    let leaf_total: usize = run.dendrogram.leaves().map(|r| r.size).sum();
    assert_eq!(leaf_total, g.node_count());
    assert!(run.dendrogram.leaves().any(|r| r.truncated));
    assert!(run.dendrogram.leaves().all(|r| r.truncated == (r.size > 1)));
}

#[test]
fn runs_are_reproducible() {
    let g = model_graph(Model::Er, 3);
    for seed in [0, 1, u64::MAX] {
        assert_eq!(
            run_parallel(&g, seed, ParallelOptions::default()).unwrap(),
            run_parallel(&g, seed, ParallelOptions::default()).unwrap()
        );
        assert_eq!(
            run_sequential(&g, seed).unwrap(),
            run_sequential(&g, seed).unwrap()
        );
    }
}
