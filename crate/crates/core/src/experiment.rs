//! Campaign runner: many networks per model, sequential walks and parallel
//! dismantlings on each, aggregated into per-model summaries.
//!
//! Every network and every walk draws from its own substream,
//! `derive_seed(master_seed, [model, replication, stream kind, index])`, so
//! any single walk can be re-run alone. Replications are independent; with
//! the `parallel` feature they are spread over a rayon pool, and results are
//! always merged in replication order, so the worker count never changes
//! the output.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::generators::{generate, GenSpec, Model};
use crate::graph::Graph;
use crate::rng::derive_seed;
use crate::stats::{
    degree_histogram, histogram_summary, permanence_values, scatter_summary, Binning, Moments,
    RegionSpec, ScatterScope, ScatterSummary, StatSummary, StatsError,
};
use crate::walk::{run_parallel, run_sequential, ParallelOptions, ParallelRun, SplitEvent};

const STREAM_GENERATE: u64 = 0;
const STREAM_SEQUENTIAL: u64 = 1;
const STREAM_PARALLEL: u64 = 2;

#[derive(Debug, Error, PartialEq)]
pub enum ExperimentError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error("thread pool: {0}")]
    Pool(String),
}

/// Everything that determines a campaign's output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub models: Vec<Model>,
    pub n: usize,
    /// Networks generated per model.
    pub replications: usize,
    /// Sequential walks per network.
    pub walks_per_network: usize,
    /// Parallel dismantlings per network.
    pub parallel_runs_per_network: usize,
    pub master_seed: u64,
    /// Dividing line of the (n, m) triangle; `None` means `n / 4`.
    pub region_cut: Option<f64>,
    pub scatter_scope: ScatterScope,
    pub truncate_at_tick: Option<u64>,
    pub er_p: Option<f64>,
    pub ba_attach: Option<usize>,
    pub geo_jitter: Option<f64>,
    pub duration_bin_width: f64,
    pub permanence_quantile: f64,
    /// Parallel runs kept whole (first run of the first networks).
    pub exemplars: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            models: Model::ALL.to_vec(),
            n: 100,
            replications: 50,
            walks_per_network: 200,
            parallel_runs_per_network: 1,
            master_seed: 1,
            region_cut: None,
            scatter_scope: ScatterScope::AllLevels,
            truncate_at_tick: None,
            er_p: None,
            ba_attach: None,
            geo_jitter: None,
            duration_bin_width: 25.0,
            permanence_quantile: 0.99,
            exemplars: 3,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), ExperimentError> {
        let bad = |m: &str| Err(ExperimentError::Config(m.into()));
        if self.models.is_empty() {
            return bad("at least one model is required");
        }
        if self.replications == 0 {
            return bad("replications must be >= 1");
        }
        if self.walks_per_network == 0 && self.parallel_runs_per_network == 0 {
            return bad("walks_per_network or parallel_runs_per_network must be >= 1");
        }
        if self.n < 2 {
            return bad("n must be >= 2");
        }
        self.region()?;
        for model in &self.models {
            self.gen_spec(*model, 0)
                .validate()
                .map_err(|e| ExperimentError::Config(e.to_string()))?;
        }
        Ok(())
    }

    pub fn region(&self) -> Result<RegionSpec, ExperimentError> {
        Ok(match self.region_cut {
            Some(cut) => RegionSpec::with_cut(self.n, cut)?,
            None => RegionSpec::new(self.n),
        })
    }

    pub fn gen_spec(&self, model: Model, seed: u64) -> GenSpec {
        let mut spec = GenSpec::new(model, self.n, seed);
        if let Some(p) = self.er_p {
            spec.er_p = p;
        }
        if let Some(m) = self.ba_attach {
            spec.ba_attach = m;
        }
        if let Some(j) = self.geo_jitter {
            spec.geo_jitter = j;
        }
        spec
    }

    pub fn hash(&self) -> String {
        config_hash(self)
    }

    pub fn network_seed(&self, model: Model, replication: usize) -> u64 {
        derive_seed(
            self.master_seed,
            &[model.tag(), replication as u64, STREAM_GENERATE, 0],
        )
    }

    pub fn sequential_seed(&self, model: Model, replication: usize, walk: usize) -> u64 {
        derive_seed(
            self.master_seed,
            &[
                model.tag(),
                replication as u64,
                STREAM_SEQUENTIAL,
                walk as u64,
            ],
        )
    }

    pub fn parallel_seed(&self, model: Model, replication: usize, run: usize) -> u64 {
        derive_seed(
            self.master_seed,
            &[model.tag(), replication as u64, STREAM_PARALLEL, run as u64],
        )
    }
}

/// First 16 hex digits of SHA-256 over the JSON encoding of `config`.
pub fn config_hash<T: Serialize>(config: &T) -> String {
    let json = serde_json::to_vec(config).expect("config serializes");
    let digest = Sha256::digest(&json);
    digest[..8].iter().map(|b| format!("{b:02x}")).collect()
}

/// How replications are scheduled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Executor {
    Serial,
    /// Rayon pool; `None` uses rayon's default thread count.
    #[cfg(feature = "parallel")]
    Rayon {
        threads: Option<usize>,
    },
}

impl Default for Executor {
    fn default() -> Self {
        #[cfg(feature = "parallel")]
        {
            Executor::Rayon { threads: None }
        }
        #[cfg(not(feature = "parallel"))]
        {
            Executor::Serial
        }
    }
}

impl Executor {
    /// Maps `f` over `items`, returning results in input order.
    pub fn map<T, R, F>(&self, items: &[T], f: F) -> Result<Vec<R>, ExperimentError>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        match *self {
            Executor::Serial => Ok(items.iter().map(f).collect()),
            #[cfg(feature = "parallel")]
            Executor::Rayon { threads } => {
                use rayon::prelude::*;
                let mut builder = rayon::ThreadPoolBuilder::new();
                if let Some(t) = threads {
                    builder = builder.num_threads(t);
                }
                let pool = builder
                    .build()
                    .map_err(|e| ExperimentError::Pool(e.to_string()))?;
                Ok(pool.install(|| items.par_iter().map(f).collect()))
            }
        }
    }
}

/// Raw output of one network.
#[derive(Debug, Clone)]
pub struct Replication {
    pub model: Model,
    pub index: usize,
    pub network_seed: u64,
    pub graph: Graph,
    pub durations: Vec<u64>,
    pub events: Vec<SplitEvent>,
    pub permanences: Vec<u64>,
    pub total_steps: u64,
    pub truncated_runs: usize,
    /// Kept when `index < exemplars`.
    pub exemplar: Option<ParallelRun>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Failure {
    pub model: Model,
    pub replication: usize,
    pub network_seed: u64,
    pub error: String,
}

pub fn run_replication(
    config: &ExperimentConfig,
    model: Model,
    index: usize,
) -> Result<Replication, Failure> {
    let network_seed = config.network_seed(model, index);
    let fail = |error: String| Failure {
        model,
        replication: index,
        network_seed,
        error,
    };
    let generated =
        generate(&config.gen_spec(model, network_seed)).map_err(|e| fail(e.to_string()))?;
    let graph = generated.graph;

    let mut durations = Vec::with_capacity(config.walks_per_network);
    for w in 0..config.walks_per_network {
        let trace = run_sequential(&graph, config.sequential_seed(model, index, w))
            .map_err(|e| fail(format!("sequential walk {w}: {e}")))?;
        durations.push(trace.duration);
    }

    let options = ParallelOptions {
        truncate_at_tick: config.truncate_at_tick,
    };
    let mut events = Vec::new();
    let mut permanences = Vec::new();
    let mut total_steps = 0;
    let mut truncated_runs = 0;
    let mut exemplar = None;
    for j in 0..config.parallel_runs_per_network {
        let mut run = run_parallel(&graph, config.parallel_seed(model, index, j), options)
            .map_err(|e| fail(format!("parallel run {j}: {e}")))?;
        events.extend_from_slice(&run.events);
        permanences.extend(permanence_values(run.records()));
        total_steps += run.total_steps;
        truncated_runs += run.truncated as usize;
        if j == 0 && index < config.exemplars {
            run.dendrogram.meta.model = Some(model.name().to_owned());
            exemplar = Some(run);
        }
    }
    Ok(Replication {
        model,
        index,
        network_seed,
        graph,
        durations,
        events,
        permanences,
        total_steps,
        truncated_runs,
        exemplar,
        warnings: generated.warnings,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSummary {
    pub model: Model,
    pub replications_ok: usize,
    pub failures: usize,
    pub nodes: Moments,
    pub mean_degree: Option<f64>,
    pub degree: StatSummary,
    pub duration: StatSummary,
    pub scatter: ScatterSummary,
    pub permanence: StatSummary,
    pub parallel_runs: usize,
    pub truncated_runs: usize,
}

/// Everything a campaign produced.
#[derive(Debug, Clone)]
pub struct Campaign {
    pub config: ExperimentConfig,
    pub config_hash: String,
    pub models: Vec<ModelSummary>,
    pub failures: Vec<Failure>,
    pub replications: Vec<Replication>,
}

#[derive(Serialize)]
struct SummaryDoc<'a> {
    config_hash: &'a str,
    master_seed: u64,
    config: &'a ExperimentConfig,
    models: &'a [ModelSummary],
    failures: &'a [Failure],
}

impl Campaign {
    pub fn succeeded(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn model(&self, model: Model) -> Option<&ModelSummary> {
        self.models.iter().find(|m| m.model == model)
    }

    pub fn summary_json(&self) -> String {
        serde_json::to_string_pretty(&SummaryDoc {
            config_hash: &self.config_hash,
            master_seed: self.config.master_seed,
            config: &self.config,
            models: &self.models,
            failures: &self.failures,
        })
        .expect("summary serializes")
    }

    /// One `key=value` line identifying the campaign, for file headers.
    pub fn audit_line(&self) -> String {
        format!(
            "config_hash={} master_seed={}",
            self.config_hash, self.config.master_seed
        )
    }
}

pub fn run_campaign(
    config: &ExperimentConfig,
    executor: Executor,
) -> Result<Campaign, ExperimentError> {
    config.validate()?;
    let jobs: Vec<(Model, usize)> = config
        .models
        .iter()
        .flat_map(|&m| (0..config.replications).map(move |r| (m, r)))
        .collect();
    let outcomes = executor.map(&jobs, |&(m, r)| run_replication(config, m, r))?;

    let mut failures = Vec::new();
    let mut replications = Vec::new();
    for o in outcomes {
        match o {
            Ok(rep) => replications.push(rep),
            Err(f) => failures.push(f),
        }
    }
    let region = config.region()?;
    let mut models = Vec::new();
    for &model in &config.models {
        let reps: Vec<&Replication> = replications.iter().filter(|r| r.model == model).collect();
        let graphs: Vec<Graph> = reps.iter().map(|r| r.graph.clone()).collect();
        let durations: Vec<&[u64]> = reps.iter().map(|r| &r.durations[..]).collect();
        let permanences: Vec<&[u64]> = reps.iter().map(|r| &r.permanences[..]).collect();
        let events: Vec<SplitEvent> = reps.iter().flat_map(|r| r.events.iter().copied()).collect();
        let degree = degree_histogram(&graphs);
        models.push(ModelSummary {
            model,
            replications_ok: reps.len(),
            failures: failures.iter().filter(|f| f.model == model).count(),
            nodes: Moments::from_values(graphs.iter().map(|g| g.node_count() as u64)),
            mean_degree: degree.pooled.mean,
            degree,
            duration: histogram_summary(&durations, Binning::Width(config.duration_bin_width))?,
            scatter: scatter_summary(&events, &region, config.scatter_scope)?,
            permanence: histogram_summary(
                &permanences,
                Binning::UnitWithOverflow(config.permanence_quantile),
            )?,
            parallel_runs: reps.len() * config.parallel_runs_per_network,
            truncated_runs: reps.iter().map(|r| r.truncated_runs).sum(),
        });
    }
    Ok(Campaign {
        config_hash: config.hash(),
        config: config.clone(),
        models,
        failures,
        replications,
    })
}
