//! Acceptance criteria, one line each. Runs without the libtest harness so
//! the verdicts are always printed; exits non-zero if any criterion fails.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use common::delaunay::{check, random_points};
use common::dismantle::{engine_outcomes, enumerate};
use netslice::experiment::{run_campaign, Executor, ExperimentConfig, Replication};
use netslice::generators::{ba_edge_count, generate, GenSpec, Model};
use netslice::graph::Graph;
use netslice::walk::{run_parallel, ParallelOptions};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const N: usize = 100;

type Verdict = Result<String, String>;

fn conservation() -> Verdict {
    let config = ExperimentConfig {
        n: N,
        replications: 1000,
        walks_per_network: 0,
        parallel_runs_per_network: 1,
        master_seed: 101,
        exemplars: 0,
        ..ExperimentConfig::default()
    };
    let jobs: Vec<(Model, usize)> = Model::ALL
        .iter()
        .flat_map(|&m| (0..config.replications).map(move |r| (m, r)))
        .collect();
    let violations = Executor::default()
        .map(&jobs, |&(model, r)| {
            let g = generate(&config.gen_spec(model, config.network_seed(model, r)))
                .map_err(|e| e.to_string())?
                .graph;
            let run = run_parallel(
                &g,
                config.parallel_seed(model, r, 0),
                ParallelOptions::default(),
            )
            .map_err(|e| e.to_string())?;
            let mut bad = run
                .events
                .iter()
                .filter(|e| e.n + e.m != e.parent_size)
                .count();
            let leaves: usize = run.dendrogram.leaves().map(|l| l.size).sum();
            bad += (leaves != g.node_count()) as usize;
            bad += (run.total_steps != g.edge_count() as u64) as usize;
            bad += (run.events.len() != g.node_count() - 1) as usize;
            Ok::<usize, String>(bad)
        })
        .map_err(|e| e.to_string())?;
    let mut total = 0;
    for v in violations {
        total += v?;
    }
    let msg = format!("{} runs, {total} violations", jobs.len());
    if total == 0 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn k3_oracle() -> Verdict {
    let expected = enumerate(3, &[(0, 1), (0, 2), (1, 2)]);
    let seen = engine_outcomes(&Graph::complete(3), 1000);
    let only = expected.iter().next().cloned();
    let msg = format!("enumerated {expected:?}, engine over 1000 seeds {seen:?}");
    let want = Some((vec![(2, 1, 2), (3, 1, 1)], 2, 3));
    let got = only.map(|o| (o.splits, o.root_permanence, o.steps));
    if seen == expected && expected.len() == 1 && got == want {
        Ok("splits (1,2) then (1,1), root permanence 2, 3 steps".into())
    } else {
        Err(msg)
    }
}

fn delaunay_equivalence() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut mismatches = Vec::new();
    for i in 0..100 {
        let count = rng.gen_range(3..=20);
        // Alternate fine grids with coarse ones that force ties.
        let grid = if i % 2 == 0 { 1 << 20 } else { 6 };
        let pts = random_points(&mut rng, count, grid);
        if let Err(e) = check(&pts, 1.0 / 64.0) {
            mismatches.push(e);
        }
    }
    match mismatches.first() {
        None => Ok("100 point sets, 0 mismatches".into()),
        Some(first) => Err(format!("{} mismatches; first:\n{first}", mismatches.len())),
    }
}

fn mean_degree(model: Model) -> Result<f64, String> {
    let mut sum = 0.0;
    for seed in 0..100 {
        let g = generate(&GenSpec::new(model, N, seed))
            .map_err(|e| e.to_string())?
            .graph;
        sum += g.mean_degree();
    }
    Ok(sum / 100.0)
}

fn degree_calibration() -> Verdict {
    let er = mean_degree(Model::Er)?;
    // Every BA network has the same edge count, so its mean degree is exact.
    let mut ba_edges = Vec::new();
    for seed in 0..100 {
        let g = generate(&GenSpec::new(Model::Ba, N, seed)).map_err(|e| e.to_string())?;
        ba_edges.push(g.graph.edge_count());
    }
    let uniform = ba_edges.iter().all(|&e| e == ba_edges[0]);
    let ba = 2.0 * ba_edges[0] as f64 / N as f64;
    let geo = mean_degree(Model::Geo)?;
    let ba_exact = 2.0 * ba_edge_count(N, 3) as f64 / N as f64;
    let msg = format!("ER {er:.3}, BA {ba:.3} (closed form {ba_exact}), GEO {geo:.3}");
    if (er - 5.7).abs() <= 0.5
        && uniform
        && ba == ba_exact
        && ba_exact == 5.88
        && (geo - 5.7).abs() <= 0.3
    {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn ordinal_duration() -> Verdict {
    let config = ExperimentConfig {
        n: N,
        replications: 50,
        walks_per_network: 200,
        parallel_runs_per_network: 0,
        master_seed: 202,
        exemplars: 0,
        ..ExperimentConfig::default()
    };
    let c = run_campaign(&config, Executor::default()).map_err(|e| e.to_string())?;
    if !c.succeeded() {
        return Err(format!("{} failed replications", c.failures.len()));
    }
    let stat = |m: Model| {
        let d = &c.model(m).unwrap().duration.pooled;
        (d.mean.unwrap(), d.std.unwrap())
    };
    let (er, ba, geo) = (stat(Model::Er), stat(Model::Ba), stat(Model::Geo));
    let msg = format!(
        "mean/std ER {:.2}/{:.2}, BA {:.2}/{:.2}, GEO {:.2}/{:.2}",
        er.0, er.1, ba.0, ba.1, geo.0, geo.1
    );
    if ba.0 < er.0 && ba.0 < geo.0 && ba.1 < er.1 && ba.1 < geo.1 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

/// 500 parallel runs per model, one per network.
fn dismantling_campaign() -> Result<netslice::Campaign, String> {
    let config = ExperimentConfig {
        n: N,
        replications: 500,
        walks_per_network: 0,
        parallel_runs_per_network: 1,
        master_seed: 303,
        exemplars: 0,
        ..ExperimentConfig::default()
    };
    let c = run_campaign(&config, Executor::default()).map_err(|e| e.to_string())?;
    if !c.succeeded() {
        return Err(format!("{} failed replications", c.failures.len()));
    }
    Ok(c)
}

fn region_probabilities(c: &netslice::Campaign) -> Verdict {
    let pr = |m: Model| c.model(m).unwrap().scatter.p_r.unwrap();
    let (er, ba, geo) = (pr(Model::Er), pr(Model::Ba), pr(Model::Geo));
    let msg = format!("p_r ER {er:.5}, BA {ba:.5}, GEO {geo:.5} (cut {})", N / 4);
    if er < 0.05 && ba < 0.05 && geo > 2.0 * er.max(ba) {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn permanence_similarity(c: &netslice::Campaign) -> Verdict {
    let means: Vec<f64> = Model::ALL
        .iter()
        .map(|&m| c.model(m).unwrap().permanence.pooled.mean.unwrap())
        .collect();
    let common = means.iter().sum::<f64>() / means.len() as f64;
    let worst = means
        .iter()
        .map(|m| (m - common).abs() / common)
        .fold(0.0, f64::max);
    let msg = format!(
        "mean permanence ER {:.3}, BA {:.3}, GEO {:.3}; max deviation {:.1}%",
        means[0],
        means[1],
        means[2],
        100.0 * worst
    );
    if worst <= 0.35 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn determinism() -> Verdict {
    let config = ExperimentConfig {
        n: N,
        replications: 12,
        walks_per_network: 20,
        parallel_runs_per_network: 3,
        master_seed: 404,
        ..ExperimentConfig::default()
    };
    let run = |ex: Executor| -> Result<(String, Vec<Replication>), String> {
        let c = run_campaign(&config, ex).map_err(|e| e.to_string())?;
        Ok((c.summary_json(), c.replications))
    };
    let (reference, reps) = run(Executor::Serial)?;
    let executors = [
        Executor::Serial,
        #[cfg(feature = "parallel")]
        Executor::Rayon { threads: Some(1) },
        #[cfg(feature = "parallel")]
        Executor::Rayon { threads: Some(2) },
        #[cfg(feature = "parallel")]
        Executor::Rayon { threads: Some(7) },
    ];
    for ex in &executors {
        let (json, other) = run(*ex)?;
        let same_runs = reps
            .iter()
            .zip(&other)
            .all(|(a, b)| a.durations == b.durations && a.events == b.events);
        if json != reference || !same_runs {
            return Err(format!("{ex:?} differs from the first serial run"));
        }
    }
    Ok(format!(
        "{} executors, identical {}-byte summaries",
        executors.len(),
        reference.len()
    ))
}

fn main() -> ExitCode {
    let mut failed = 0;
    let mut report = |name: &str, started: Instant, verdict: Verdict| {
        let secs = started.elapsed().as_secs_f64();
        match verdict {
            Ok(detail) => println!("PASS {name}: {detail} [{secs:.1}s]"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {name}: {detail} [{secs:.1}s]");
            }
        }
    };
    let t = Instant::now();
    report("conservation", t, conservation());
    let t = Instant::now();
    report("k3-oracle", t, k3_oracle());
    let t = Instant::now();
    report("delaunay-equivalence", t, delaunay_equivalence());
    let t = Instant::now();
    report("degree-calibration", t, degree_calibration());
    let t = Instant::now();
    report("ordinal-duration", t, ordinal_duration());
    let t = Instant::now();
    match dismantling_campaign() {
        Ok(c) => {
            report("region-probabilities", t, region_probabilities(&c));
            let t = Instant::now();
            report("permanence-similarity", t, permanence_similarity(&c));
        }
        Err(e) => {
            report("region-probabilities", t, Err(e.clone()));
            report("permanence-similarity", t, Err(e));
        }
    }
    let t = Instant::now();
    report("determinism", t, determinism());
    if failed == 0 {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} criteria failed");
        ExitCode::FAILURE
    }
}
