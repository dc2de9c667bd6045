//! Statistics over dismantling runs: the (n, m) split triangle with its
//! balanced/unbalanced regions, and mean ± std histograms across
//! replications.
//!
//! Sums are accumulated in exact integer arithmetic, so every summary is
//! independent of the order replications are merged in.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dendrogram::ComponentRecord;
use crate::graph::Graph;
use crate::walk::{SplitEvent, WalkTrace};

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("region cut {cut} outside [1, {half}]")]
    BadCut { cut: f64, half: f64 },
    #[error("split ({n}, {m}) lies outside the triangle 1 <= n <= m, n + m <= {n_total}")]
    OutsideTriangle { n: usize, m: usize, n_total: usize },
    #[error("bin width must be positive, got {0}")]
    BadBinWidth(f64),
    #[error("quantile must lie in (0, 1], got {0}")]
    BadQuantile(f64),
}

/// Which side of the dividing line a split falls on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Region {
    /// Unbalanced: the smaller child is below the cut.
    L,
    /// Balanced: the smaller child reaches the cut.
    R,
}

/// The admissible (n, m) triangle for an initial structure of `n_total`
/// nodes, divided by the vertical line `n = cut`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionSpec {
    pub n_total: usize,
    pub cut: f64,
}

impl RegionSpec {
    /// Default cut at a quarter of the initial size.
    pub fn new(n_total: usize) -> Self {
        Self {
            n_total,
            cut: n_total as f64 / 4.0,
        }
    }

    pub fn with_cut(n_total: usize, cut: f64) -> Result<Self, StatsError> {
        let half = n_total as f64 / 2.0;
        if !(cut >= 1.0 && cut <= half) {
            return Err(StatsError::BadCut { cut, half });
        }
        Ok(Self { n_total, cut })
    }
}

/// Classifies a split; the cut itself belongs to the balanced side.
pub fn classify_region(n: usize, m: usize, spec: &RegionSpec) -> Result<Region, StatsError> {
    if n < 1 || n > m || n + m > spec.n_total {
        return Err(StatsError::OutsideTriangle {
            n,
            m,
            n_total: spec.n_total,
        });
    }
    Ok(if n as f64 >= spec.cut {
        Region::R
    } else {
        Region::L
    })
}

/// Which splits enter a scatter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScatterScope {
    /// Every split at every level of the hierarchy.
    #[default]
    AllLevels,
    /// Only splits of the initial structure itself.
    RootOnly,
}

/// Pooled moments of a set of integer observations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub struct Moments {
    pub count: u64,
    /// `None` when there are no observations.
    pub mean: Option<f64>,
    /// Population standard deviation.
    pub std: Option<f64>,
}

#[derive(Debug, Clone, Copy, Default)]
struct ExactSums {
    count: u128,
    sum: u128,
    sum_sq: u128,
}

impl ExactSums {
    fn push(&mut self, x: u64) {
        self.count += 1;
        self.sum += x as u128;
        self.sum_sq += (x as u128) * (x as u128);
    }

    fn mean(&self) -> Option<f64> {
        (self.count > 0).then(|| self.sum as f64 / self.count as f64)
    }

    fn std(&self) -> Option<f64> {
        (self.count > 0).then(|| {
            // count² · var = count · Σx² − (Σx)², exactly.
            let num = self.count * self.sum_sq - self.sum * self.sum;
            (num as f64).sqrt() / self.count as f64
        })
    }
}

impl Moments {
    pub fn from_values<I: IntoIterator<Item = u64>>(values: I) -> Self {
        let mut s = ExactSums::default();
        for x in values {
            s.push(x);
        }
        Self {
            count: s.count as u64,
            mean: s.mean(),
            std: s.std(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScatterSummary {
    #[serde(skip)]
    pub points: Vec<(usize, usize)>,
    pub count: usize,
    pub n_total: usize,
    pub cut: f64,
    pub scope: ScatterScope,
    pub mean_n: Option<f64>,
    pub mean_m: Option<f64>,
    pub std_n: Option<f64>,
    pub std_m: Option<f64>,
    pub p_l: Option<f64>,
    pub p_r: Option<f64>,
}

impl ScatterSummary {
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `n,m` rows.
    pub fn points_csv(&self, comments: &[String]) -> String {
        let mut out = String::new();
        for c in comments {
            writeln!(out, "# {c}").unwrap();
        }
        out.push_str("n,m\n");
        for (n, m) in &self.points {
            writeln!(out, "{n},{m}").unwrap();
        }
        out
    }
}

/// Pools split sizes and the fraction falling on each side of the cut.
pub fn scatter_summary(
    events: &[SplitEvent],
    spec: &RegionSpec,
    scope: ScatterScope,
) -> Result<ScatterSummary, StatsError> {
    let mut points = Vec::with_capacity(events.len());
    let (mut ns, mut ms) = (ExactSums::default(), ExactSums::default());
    let mut right = 0usize;
    for e in events {
        // The root is the only component as large as the initial structure.
        if scope == ScatterScope::RootOnly && e.parent_size != spec.n_total {
            continue;
        }
        if classify_region(e.n, e.m, spec)? == Region::R {
            right += 1;
        }
        ns.push(e.n as u64);
        ms.push(e.m as u64);
        points.push((e.n, e.m));
    }
    let count = points.len();
    let p_r = (count > 0).then(|| right as f64 / count as f64);
    Ok(ScatterSummary {
        count,
        n_total: spec.n_total,
        cut: spec.cut,
        scope,
        mean_n: ns.mean(),
        mean_m: ms.mean(),
        std_n: ns.std(),
        std_m: ms.std(),
        p_l: (count > 0).then(|| (count - right) as f64 / count as f64),
        p_r,
        points,
    })
}

/// How histogram bins are laid out over non-negative integer values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Binning {
    /// Bins `[k·w, (k+1)·w)` from 0 up to the largest value.
    Width(f64),
    /// One bin per integer from 0 up to the largest value.
    Unit,
    /// One bin per integer from the smallest value up to the given
    /// quantile, then a single overflow bin for the rest.
    UnitWithOverflow(f64),
}

impl Binning {
    pub const DURATION: Binning = Binning::Width(25.0);
    pub const PERMANENCE: Binning = Binning::UnitWithOverflow(0.99);

    fn edges(&self, pooled: &mut [u64]) -> Result<Vec<f64>, StatsError> {
        pooled.sort_unstable();
        let (Some(&lo), Some(&hi)) = (pooled.first(), pooled.last()) else {
            return Ok(Vec::new());
        };
        Ok(match *self {
            Binning::Width(w) => {
                if !(w > 0.0 && w.is_finite()) {
                    return Err(StatsError::BadBinWidth(w));
                }
                let bins = (hi as f64 / w).floor() as usize + 1;
                (0..=bins).map(|k| k as f64 * w).collect()
            }
            Binning::Unit => (0..=hi + 1).map(|v| v as f64).collect(),
            Binning::UnitWithOverflow(q) => {
                if !(q > 0.0 && q <= 1.0) {
                    return Err(StatsError::BadQuantile(q));
                }
                // Nearest-rank quantile.
                let rank = ((q * pooled.len() as f64).ceil() as usize).max(1);
                let top = pooled[rank - 1];
                let mut edges: Vec<f64> = (lo..=top + 1).map(|v| v as f64).collect();
                if hi > top {
                    edges.push((hi + 1) as f64);
                }
                edges
            }
        })
    }
}

/// Per-bin mean ± population std of counts across replications.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatSummary {
    pub bin_edges: Vec<f64>,
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
    pub replication_count: usize,
    /// Moments of all observations pooled together.
    pub pooled: Moments,
}

impl StatSummary {
    pub const CSV_HEADER: &'static str = "bin_low,bin_high,mean,std";

    pub fn bins(&self) -> usize {
        self.mean.len()
    }

    pub fn to_csv(&self, comments: &[String]) -> String {
        let mut out = String::new();
        for c in comments {
            writeln!(out, "# {c}").unwrap();
        }
        out.push_str(Self::CSV_HEADER);
        out.push('\n');
        for i in 0..self.bins() {
            writeln!(
                out,
                "{},{},{},{}",
                self.bin_edges[i],
                self.bin_edges[i + 1],
                self.mean[i],
                self.std[i]
            )
            .unwrap();
        }
        out
    }
}

/// Histograms each replication's observations on shared bins and
/// aggregates the counts.
pub fn histogram_summary<R: AsRef<[u64]>>(
    replications: &[R],
    binning: Binning,
) -> Result<StatSummary, StatsError> {
    let mut pooled: Vec<u64> = replications
        .iter()
        .flat_map(|r| r.as_ref().iter().copied())
        .collect();
    let moments = Moments::from_values(pooled.iter().copied());
    let edges = binning.edges(&mut pooled)?;
    let bins = edges.len().saturating_sub(1);
    let mut sums = vec![ExactSums::default(); bins];
    let mut counts = vec![0u64; bins];
    for rep in replications {
        counts.iter_mut().for_each(|c| *c = 0);
        for &x in rep.as_ref() {
            let v = x as f64;
            // Values beyond the last unit bin land in the overflow bin.
            let idx = edges[1..].partition_point(|&hi| hi <= v).min(bins - 1);
            counts[idx] += 1;
        }
        debug_assert_eq!(counts.iter().sum::<u64>(), rep.as_ref().len() as u64);
        for (s, &c) in sums.iter_mut().zip(&counts) {
            s.push(c);
        }
    }
    Ok(StatSummary {
        bin_edges: edges,
        mean: sums.iter().map(|s| s.mean().unwrap_or(0.0)).collect(),
        std: sums.iter().map(|s| s.std().unwrap_or(0.0)).collect(),
        replication_count: replications.len(),
        pooled: moments,
    })
}

/// Permanence of every component that split, one list per replication.
pub fn permanence_values<'a, I>(records: I) -> Vec<u64>
where
    I: IntoIterator<Item = &'a ComponentRecord>,
{
    records
        .into_iter()
        .filter_map(ComponentRecord::permanence)
        .collect()
}

pub fn permanence_histogram(
    runs: &[Vec<ComponentRecord>],
    binning: Binning,
) -> Result<StatSummary, StatsError> {
    let reps: Vec<Vec<u64>> = runs.iter().map(permanence_values).collect();
    histogram_summary(&reps, binning)
}

/// Sequential walk durations, one list per network.
pub fn duration_histogram(
    networks: &[Vec<WalkTrace>],
    binning: Binning,
) -> Result<StatSummary, StatsError> {
    let reps: Vec<Vec<u64>> = networks
        .iter()
        .map(|ts| ts.iter().map(|t| t.duration).collect())
        .collect();
    histogram_summary(&reps, binning)
}

pub fn degree_histogram(graphs: &[Graph]) -> StatSummary {
    let reps: Vec<Vec<u64>> = graphs
        .iter()
        .map(|g| g.degrees().into_iter().map(|d| d as u64).collect())
        .collect();
    histogram_summary(&reps, Binning::Unit).expect("unit bins need no parameters")
}
