use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use netslice::dendrogram::{Axis, Dendrogram};
use netslice::experiment::{run_campaign, Executor, ExperimentConfig};
use netslice::generators::{generate, GenSpec, Model};
use netslice::graph::Graph;
use netslice::rng::derive_seed;
use netslice::stats::{
    histogram_summary, permanence_values, scatter_summary, Binning, RegionSpec, ScatterScope,
};
use netslice::walk::{run_parallel, run_sequential, ParallelOptions, SplitEvent, WalkTrace};
use serde::Serialize;
use serde_json::json;

use crate::config::{parse_enum, pick, FileConfig};
use crate::output::{csv_rows, read, recorded_seed, Audit, OutDir};
use crate::{
    Cli, Command, ExperimentArgs, GenFlags, GenerateArgs, ModeArg, ModelArg, ScopeArg, StatsArgs,
    WalkArgs,
};

/// Runs a subcommand; `Ok(false)` means it finished with recorded failures.
pub fn run(cli: Cli) -> Result<bool> {
    let file = FileConfig::load(cli.config.as_deref())?;
    match cli.command {
        Command::Generate(a) => cmd_generate(a, &file),
        Command::Walk(a) => cmd_walk(a, &file),
        Command::Experiment(a) => cmd_experiment(a, &file),
        Command::Stats(a) => cmd_stats(a, &file),
    }
}

fn models(flags: &GenFlags, file: &FileConfig, default: ModelArg) -> Result<Vec<Model>> {
    let arg = pick(
        flags.model,
        parse_enum("model", file.model.as_deref())?,
        default,
    );
    Ok(match arg {
        ModelArg::Er => vec![Model::Er],
        ModelArg::Ba => vec![Model::Ba],
        ModelArg::Geo => vec![Model::Geo],
        ModelArg::All => Model::ALL.to_vec(),
    })
}

fn scope(flag: Option<ScopeArg>, file: &FileConfig) -> Result<ScatterScope> {
    Ok(
        match pick(
            flag,
            parse_enum("scope", file.scope.as_deref())?,
            ScopeArg::AllLevels,
        ) {
            ScopeArg::AllLevels => ScatterScope::AllLevels,
            ScopeArg::RootOnly => ScatterScope::RootOnly,
        },
    )
}

/// Experiment settings from flags over file over defaults.
fn experiment_config(a: &ExperimentArgs, file: &FileConfig) -> Result<ExperimentConfig> {
    let d = ExperimentConfig::default();
    Ok(ExperimentConfig {
        models: models(&a.gen, file, ModelArg::All)?,
        n: pick(a.gen.n, file.n, d.n),
        replications: pick(a.replications, file.replications, d.replications),
        walks_per_network: pick(a.walks, file.walks, d.walks_per_network),
        parallel_runs_per_network: pick(
            a.parallel_runs,
            file.parallel_runs,
            d.parallel_runs_per_network,
        ),
        master_seed: file.master_seed(a.master_seed)?,
        region_cut: a.region_cut.or(file.region_cut),
        scatter_scope: scope(a.scope, file)?,
        truncate_at_tick: a.truncate_at_tick.or(file.truncate_at_tick),
        er_p: a.gen.er_p.or(file.er_p),
        ba_attach: a.gen.ba_attach.or(file.ba_attach),
        geo_jitter: a.gen.geo_jitter.or(file.geo_jitter),
        exemplars: pick(a.exemplars, file.exemplars, d.exemplars),
        ..d
    })
}

#[derive(Serialize)]
struct GeneratedFile {
    file: String,
    model: Model,
    replication: Option<usize>,
    nodes: usize,
    edges: usize,
    spec: GenSpec,
    warnings: Vec<String>,
}

#[derive(Serialize)]
struct GenFailure {
    model: Model,
    seed: u64,
    error: String,
}

fn cmd_generate(a: GenerateArgs, file: &FileConfig) -> Result<bool> {
    // Reuse the campaign's seed derivation so `generate` reproduces the
    // networks an experiment with the same master seed would use.
    let mut base = experiment_config(
        &ExperimentArgs {
            gen: a.gen,
            replications: a.replications,
            walks: Some(1),
            parallel_runs: None,
            master_seed: a.master_seed,
            region_cut: None,
            scope: None,
            truncate_at_tick: None,
            exemplars: None,
            threads: None,
            out: None,
        },
        file,
    )?;
    if a.replications.is_none() && file.replications.is_none() {
        base.replications = 1;
    }
    let explicit = a.seed.or(file.seed);
    let mut jobs = Vec::new();
    for &model in &base.models {
        match explicit {
            Some(seed) => jobs.push((model, None, seed)),
            None => {
                for r in 0..base.replications {
                    jobs.push((model, Some(r), base.network_seed(model, r)));
                }
            }
        }
    }
    let audit_config = json!({
        "command": "generate",
        "models": base.models,
        "n": base.n,
        "seed": explicit,
        "master_seed": base.master_seed,
        "replications": base.replications,
        "er_p": base.er_p,
        "ba_attach": base.ba_attach,
        "geo_jitter": base.geo_jitter,
    });
    let audit = Audit::new(&audit_config, Some(explicit.unwrap_or(base.master_seed)));
    let mut out = OutDir::create(file.out(a.out))?;
    let mut files = Vec::new();
    let mut failures = Vec::new();
    for (model, replication, seed) in jobs {
        let spec = base.gen_spec(model, seed);
        match generate(&spec) {
            Ok(g) => {
                let name = format!("{}_{seed}.edges", model.name());
                let mut comments = audit.comments();
                comments.push(format!("model={} seed={seed}", model.name()));
                out.write(&name, &g.to_text(&comments))?;
                files.push(GeneratedFile {
                    file: name,
                    model,
                    replication,
                    nodes: g.graph.node_count(),
                    edges: g.graph.edge_count(),
                    spec,
                    warnings: g.warnings,
                });
            }
            Err(e) => failures.push(GenFailure {
                model,
                seed,
                error: e.to_string(),
            }),
        }
    }
    let defaults: Vec<GenSpec> = base.models.iter().map(|&m| base.gen_spec(m, 0)).collect();
    out.write(
        "manifest.json",
        &audit.json(&json!({ "defaults": defaults, "files": files, "failures": failures }))?,
    )?;
    for f in &failures {
        eprintln!("failed: {} seed {}: {}", f.model.name(), f.seed, f.error);
    }
    println!("wrote {} networks to {}", files.len(), out_root(&out));
    Ok(failures.is_empty())
}

fn out_root(out: &OutDir) -> String {
    out.written()
        .first()
        .and_then(|p| p.parent())
        .map_or_else(|| ".".into(), |p| p.display().to_string())
}

fn events_csv(events: &[SplitEvent], audit: &Audit) -> String {
    let mut s = format!("# {}\n{}\n", audit.line(), SplitEvent::CSV_HEADER);
    for e in events {
        s.push_str(&e.csv_row());
        s.push('\n');
    }
    s
}

fn traces_csv(traces: &[WalkTrace], audit: &Audit) -> String {
    let mut s = format!("# {}\n{}\n", audit.line(), WalkTrace::CSV_HEADER);
    for t in traces {
        s.push_str(&t.csv_row());
        s.push('\n');
    }
    s
}

fn write_dendrogram(out: &mut OutDir, stem: &str, d: &Dendrogram, audit: &Audit) -> Result<()> {
    out.write(&format!("{stem}.json"), &audit.tag_json(&d.to_json())?)?;
    out.write(
        &format!("{stem}_size.nwk"),
        &audit.newick(&d.export_newick(Axis::Size)),
    )?;
    out.write(
        &format!("{stem}_time.nwk"),
        &audit.newick(&d.export_newick(Axis::Time)),
    )?;
    Ok(())
}

fn cmd_walk(a: WalkArgs, file: &FileConfig) -> Result<bool> {
    let text = read(&a.graph)?;
    let graph =
        Graph::from_edge_list(&text).with_context(|| format!("parsing {}", a.graph.display()))?;
    let mode = pick(
        a.mode,
        parse_enum("mode", file.mode.as_deref())?,
        ModeArg::Parallel,
    );
    let master_seed = file.master_seed(a.master_seed)?;
    let walks = pick(a.walks, file.walks, 1);
    let truncate = a.truncate_at_tick.or(file.truncate_at_tick);
    if mode == ModeArg::Sequential {
        ensure!(walks >= 1, "--walks must be >= 1");
        ensure!(
            truncate.is_none(),
            "--truncate-at-tick applies to parallel mode"
        );
    }
    let audit = Audit::new(
        &json!({
            "command": "walk",
            "graph": netslice::experiment::config_hash(&text),
            "mode": format!("{mode:?}"),
            "master_seed": master_seed,
            "walks": walks,
            "truncate_at_tick": truncate,
        }),
        Some(master_seed),
    );
    let mut out = OutDir::create(file.out(a.out))?;
    match mode {
        ModeArg::Sequential => {
            let mut traces = Vec::with_capacity(walks);
            for w in 0..walks {
                traces.push(run_sequential(
                    &graph,
                    derive_seed(master_seed, &[w as u64]),
                )?);
            }
            let events: Vec<SplitEvent> = traces
                .iter()
                .flat_map(|t| t.splits.iter().copied())
                .collect();
            out.write("events.csv", &events_csv(&events, &audit))?;
            out.write("traces.csv", &traces_csv(&traces, &audit))?;
            let total: u64 = traces.iter().map(|t| t.duration).sum();
            println!(
                "{walks} sequential walks, mean duration {:.2}",
                total as f64 / walks as f64
            );
        }
        ModeArg::Parallel => {
            let opts = ParallelOptions {
                truncate_at_tick: truncate,
            };
            let run = run_parallel(&graph, master_seed, opts)?;
            out.write("events.csv", &events_csv(&run.events, &audit))?;
            write_dendrogram(&mut out, "dendrogram", &run.dendrogram, &audit)?;
            println!(
                "parallel run: {} splits, {} of {} edges removed{}",
                run.events.len(),
                run.total_steps,
                run.initial_edges,
                if run.truncated { ", truncated" } else { "" }
            );
        }
    }
    Ok(true)
}

fn cmd_experiment(a: ExperimentArgs, file: &FileConfig) -> Result<bool> {
    let config = experiment_config(&a, file)?;
    let threads = a.threads.or(file.threads);
    let executor = match threads {
        Some(0) => Executor::Serial,
        #[cfg(feature = "parallel")]
        t => Executor::Rayon { threads: t },
        #[cfg(not(feature = "parallel"))]
        _ => Executor::Serial,
    };
    let mut out = OutDir::create(file.out(a.out))?;
    let campaign = run_campaign(&config, executor)?;
    let audit = Audit {
        config_hash: campaign.config_hash.clone(),
        master_seed: Some(config.master_seed),
    };
    let comments = audit.comments();
    out.write("summary.json", &audit.tag_json(&campaign.summary_json())?)?;
    out.write(
        "failures.json",
        &audit.json(&json!({ "failures": campaign.failures }))?,
    )?;
    for m in &campaign.models {
        let name = m.model.name();
        out.write(&format!("{name}_degree.csv"), &m.degree.to_csv(&comments))?;
        out.write(
            &format!("{name}_duration.csv"),
            &m.duration.to_csv(&comments),
        )?;
        out.write(
            &format!("{name}_permanence.csv"),
            &m.permanence.to_csv(&comments),
        )?;
        out.write(
            &format!("{name}_scatter.csv"),
            &m.scatter.points_csv(&comments),
        )?;
    }
    for rep in &campaign.replications {
        if let Some(run) = &rep.exemplar {
            let stem = format!("{}_exemplar{}", rep.model.name(), rep.index);
            write_dendrogram(&mut out, &stem, &run.dendrogram.without_members(), &audit)?;
        }
    }
    for m in &campaign.models {
        let fmt = |v: Option<f64>| v.map_or("-".into(), |x| format!("{x:.4}"));
        println!(
            "{}: {} networks, <k> {}, duration {} ± {}, p_l {} p_r {}, permanence {}",
            m.model.name(),
            m.replications_ok,
            fmt(m.mean_degree),
            fmt(m.duration.pooled.mean),
            fmt(m.duration.pooled.std),
            fmt(m.scatter.p_l),
            fmt(m.scatter.p_r),
            fmt(m.permanence.pooled.mean),
        );
    }
    for f in &campaign.failures {
        eprintln!(
            "failed: {} replication {}: {}",
            f.model.name(),
            f.replication,
            f.error
        );
    }
    Ok(campaign.succeeded())
}

fn read_events(paths: &[PathBuf]) -> Result<Vec<SplitEvent>> {
    let mut events = Vec::new();
    for p in paths {
        let text = read(p)?;
        for (line, row) in csv_rows(&text, SplitEvent::CSV_HEADER) {
            events.push(
                SplitEvent::parse_csv_row(row)
                    .map_err(|e| anyhow::anyhow!("{}:{line}: {e}", p.display()))?,
            );
        }
    }
    Ok(events)
}

fn read_durations(path: &Path) -> Result<Vec<u64>> {
    let text = read(path)?;
    let mut out = Vec::new();
    for (line, row) in csv_rows(&text, WalkTrace::CSV_HEADER) {
        let field = row.split(',').nth(2);
        match field.and_then(|f| f.trim().parse().ok()) {
            Some(d) => out.push(d),
            None => bail!(
                "{}:{line}: expected `{}`",
                path.display(),
                WalkTrace::CSV_HEADER
            ),
        }
    }
    Ok(out)
}

fn cmd_stats(a: StatsArgs, file: &FileConfig) -> Result<bool> {
    ensure!(
        !(a.events.is_empty() && a.traces.is_empty() && a.dendrogram.is_empty()),
        "give at least one of --events, --traces, --dendrogram"
    );
    let inputs: Vec<&PathBuf> = a
        .events
        .iter()
        .chain(&a.traces)
        .chain(&a.dendrogram)
        .collect();
    let mut digests = Vec::new();
    let mut seeds = Vec::new();
    for p in &inputs {
        let text = read(p)?;
        digests.push(netslice::experiment::config_hash(&text));
        seeds.push(recorded_seed(&text));
    }
    // Carry the inputs' master seed forward when they agree on one.
    let master_seed = match seeds.first() {
        Some(&Some(s)) if seeds.iter().all(|x| *x == Some(s)) => Some(s),
        _ => None,
    };
    let scope = scope(a.scope, file)?;
    let region_cut = a.region_cut.or(file.region_cut);
    let audit = Audit::new(
        &json!({
            "command": "stats",
            "inputs": digests,
            "n": a.n,
            "region_cut": region_cut,
            "scope": scope,
        }),
        master_seed,
    );
    let comments = audit.comments();
    let mut report = serde_json::Map::new();
    let mut csvs = Vec::new();
    if !a.events.is_empty() {
        let events = read_events(&a.events)?;
        let n = match a.n.or(file.n) {
            Some(n) => n,
            None => events
                .iter()
                .map(|e| e.parent_size)
                .max()
                .context("no events to infer --n from")?,
        };
        let region = match region_cut {
            Some(c) => RegionSpec::with_cut(n, c)?,
            None => RegionSpec::new(n),
        };
        let s = scatter_summary(&events, &region, scope)?;
        csvs.push(("scatter.csv", s.points_csv(&comments)));
        report.insert("scatter".into(), serde_json::to_value(&s)?);
    }
    if !a.traces.is_empty() {
        let reps = a
            .traces
            .iter()
            .map(|p| read_durations(p))
            .collect::<Result<Vec<_>>>()?;
        let h = histogram_summary(&reps, Binning::DURATION)?;
        csvs.push(("duration.csv", h.to_csv(&comments)));
        report.insert("duration".into(), serde_json::to_value(&h)?);
    }
    if !a.dendrogram.is_empty() {
        let mut reps = Vec::new();
        for p in &a.dendrogram {
            let d = Dendrogram::from_json(&read(p)?)
                .with_context(|| format!("parsing {}", p.display()))?;
            reps.push(permanence_values(d.records()));
        }
        let h = histogram_summary(&reps, Binning::PERMANENCE)?;
        csvs.push(("permanence.csv", h.to_csv(&comments)));
        report.insert("permanence".into(), serde_json::to_value(&h)?);
    }
    let json = audit.json(&report)?;
    match a.out.or_else(|| file.out.clone()) {
        Some(dir) => {
            let mut out = OutDir::create(dir)?;
            out.write("stats.json", &json)?;
            for (name, body) in csvs {
                out.write(name, &body)?;
            }
        }
        None => print!("{json}"),
    }
    Ok(true)
}
