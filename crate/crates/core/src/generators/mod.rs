//! Network models: Erdős–Rényi, Barabási–Albert and a geometric model built
//! from the Delaunay adjacency of a jittered square lattice.

mod delaunay;
pub mod predicates;

use std::fmt::{self, Write as _};
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, GraphError};
use crate::rng::{derive_seed, pick_index, stream};

pub use delaunay::delaunay;

/// Mean degree the default parameters are calibrated towards.
pub const TARGET_MEAN_DEGREE: f64 = 5.7;
pub const DEFAULT_BA_ATTACH: usize = 3;
pub const DEFAULT_GEO_JITTER: f64 = 0.25;
const MAX_GEO_ATTEMPTS: u64 = 16;

#[derive(Debug, Error, PartialEq)]
pub enum GenError {
    #[error("invalid generator parameters: {0}")]
    InvalidSpec(String),
    #[error("largest component has {0} node(s); at least 2 are needed for a walk")]
    Degenerate(usize),
    #[error("points {0} and {1} coincide")]
    DuplicatePoint(usize, usize),
    #[error("point {0} has a non-finite coordinate")]
    NonFinitePoint(usize),
    #[error("jitter produced coincident points in {0} consecutive attempts")]
    JitterExhausted(u64),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Er,
    Ba,
    Geo,
}

impl Model {
    pub const ALL: [Model; 3] = [Model::Er, Model::Ba, Model::Geo];

    pub fn name(self) -> &'static str {
        match self {
            Model::Er => "er",
            Model::Ba => "ba",
            Model::Geo => "geo",
        }
    }

    /// Stable word used when deriving substreams.
    pub fn tag(self) -> u64 {
        match self {
            Model::Er => 1,
            Model::Ba => 2,
            Model::Geo => 3,
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Model {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "er" => Ok(Model::Er),
            "ba" => Ok(Model::Ba),
            "geo" => Ok(Model::Geo),
            other => Err(format!("unknown model `{other}` (expected er, ba or geo)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point2D {
    pub x: f64,
    pub y: f64,
}

impl Point2D {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }
}

/// Full parameter set for one generated network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    pub model: Model,
    pub n_target: usize,
    pub er_p: f64,
    pub ba_attach: usize,
    pub geo_rows: usize,
    pub geo_cols: usize,
    pub geo_jitter: f64,
    pub seed: u64,
}

impl GenSpec {
    /// Defaults calibrated to a mean degree near 5.7: `p = 5.7 / (N - 1)`,
    /// three attachments per BA node, and a near-square lattice with jitter
    /// 0.25 for GEO.
    pub fn new(model: Model, n_target: usize, seed: u64) -> Self {
        let (geo_rows, geo_cols) = lattice_shape(n_target);
        Self {
            model,
            n_target,
            er_p: if n_target > 1 {
                (TARGET_MEAN_DEGREE / (n_target - 1) as f64).min(1.0)
            } else {
                1.0
            },
            ba_attach: DEFAULT_BA_ATTACH,
            geo_rows,
            geo_cols,
            geo_jitter: DEFAULT_GEO_JITTER,
            seed,
        }
    }

    pub fn validate(&self) -> Result<(), GenError> {
        let bad = |m: String| Err(GenError::InvalidSpec(m));
        if self.n_target == 0 {
            return bad("n_target must be positive".into());
        }
        match self.model {
            // Endpoints are accepted: p = 1 gives the complete graph and
            // p = 0 fails later as a degenerate component.
            Model::Er if !(0.0..=1.0).contains(&self.er_p) => {
                bad(format!("er_p = {} outside [0, 1]", self.er_p))
            }
            Model::Ba if self.ba_attach == 0 || self.ba_attach >= self.n_target => bad(format!(
                "ba_attach = {} must satisfy 1 <= m < n_target = {}",
                self.ba_attach, self.n_target
            )),
            Model::Geo if self.geo_rows * self.geo_cols != self.n_target => bad(format!(
                "geo_rows * geo_cols = {} differs from n_target = {}",
                self.geo_rows * self.geo_cols,
                self.n_target
            )),
            Model::Geo if !(self.geo_jitter.is_finite() && self.geo_jitter >= 0.0) => bad(format!(
                "geo_jitter = {} must be finite and >= 0",
                self.geo_jitter
            )),
            _ => Ok(()),
        }
    }
}

/// Rows and columns of the most nearly square lattice with `n` points.
pub fn lattice_shape(n: usize) -> (usize, usize) {
    let mut rows = (n as f64).sqrt() as usize;
    while rows > 1 && !n.is_multiple_of(rows) {
        rows -= 1;
    }
    let rows = rows.max(1);
    (rows, n / rows)
}

/// A generated network with whatever side data the model produces.
#[derive(Debug, Clone, PartialEq)]
pub struct Generated {
    pub graph: Graph,
    /// Node coordinates (GEO only), indexed by node id.
    pub layout: Option<Vec<Point2D>>,
    pub warnings: Vec<String>,
}

impl Generated {
    /// Edge-list text, followed by a `# layout` section of `id x y` lines
    /// when coordinates are known.
    pub fn to_text(&self, comments: &[String]) -> String {
        let mut out = self.graph.to_edge_list(comments);
        if let Some(layout) = &self.layout {
            out.push_str("# layout\n");
            for (i, p) in layout.iter().enumerate() {
                writeln!(out, "{i} {} {}", p.x, p.y).unwrap();
            }
        }
        out
    }
}

/// Parses the optional `# layout` section of an edge-list file.
pub fn parse_layout(text: &str) -> Result<Option<Vec<Point2D>>, GraphError> {
    let mut lines = text
        .lines()
        .enumerate()
        .skip_while(|(_, l)| l.trim() != "# layout");
    if lines.next().is_none() {
        return Ok(None);
    }
    let mut out = Vec::new();
    for (idx, raw) in lines {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |msg: &str| GraphError::Parse {
            line: idx + 1,
            msg: format!("{msg}: `{line}`"),
        };
        let fields: Vec<&str> = line.split_whitespace().collect();
        let [id, x, y] = fields[..] else {
            return Err(err("expected `id x y`"));
        };
        let id: usize = id.parse().map_err(|_| err("bad node id"))?;
        if id != out.len() {
            return Err(err("layout ids must be consecutive from 0"));
        }
        let x: f64 = x.parse().map_err(|_| err("bad x coordinate"))?;
        let y: f64 = y.parse().map_err(|_| err("bad y coordinate"))?;
        out.push(Point2D::new(x, y));
    }
    Ok(Some(out))
}

pub fn generate(spec: &GenSpec) -> Result<Generated, GenError> {
    spec.validate()?;
    match spec.model {
        Model::Er => gen_er(spec).map(plain),
        Model::Ba => gen_ba(spec).map(plain),
        Model::Geo => gen_geo(spec),
    }
}

fn plain(graph: Graph) -> Generated {
    Generated {
        graph,
        layout: None,
        warnings: Vec::new(),
    }
}

fn model_stream(spec: &GenSpec, attempt: u64) -> crate::rng::StreamRng {
    stream(derive_seed(spec.seed, &[spec.model.tag(), attempt]))
}

/// G(N, p) before any component extraction.
pub fn gen_er_full(spec: &GenSpec) -> Result<Graph, GenError> {
    spec.validate()?;
    let mut rng = model_stream(spec, 0);
    let n = spec.n_target;
    let mut g = Graph::new(n);
    for u in 0..n {
        for v in (u + 1)..n {
            if rng.gen::<f64>() < spec.er_p {
                g.add_edge(u, v)?;
            }
        }
    }
    Ok(g)
}

/// Erdős–Rényi graph reduced to its largest component, relabelled densely.
pub fn gen_er(spec: &GenSpec) -> Result<Graph, GenError> {
    let full = gen_er_full(spec)?;
    let keep = full.largest_component()?;
    if keep.len() < 2 {
        return Err(GenError::Degenerate(keep.len()));
    }
    Ok(full.induced_subgraph(&keep))
}

/// Preferential attachment grown from a clique on `m + 1` nodes.
pub fn gen_ba(spec: &GenSpec) -> Result<Graph, GenError> {
    spec.validate()?;
    let (n, m) = (spec.n_target, spec.ba_attach);
    let mut rng = model_stream(spec, 0);
    let mut g = Graph::new(n);
    // One entry per edge endpoint, so a uniform draw is degree-proportional.
    let mut endpoints = Vec::with_capacity(2 * (m * (m + 1) / 2 + m * n));
    for u in 0..=m {
        for v in (u + 1)..=m {
            g.add_edge(u, v)?;
            endpoints.extend([u, v]);
        }
    }
    let mut targets = Vec::with_capacity(m);
    for new in (m + 1)..n {
        targets.clear();
        while targets.len() < m {
            let t = endpoints[pick_index(&mut rng, endpoints.len())];
            if !targets.contains(&t) {
                targets.push(t);
            }
        }
        for &t in &targets {
            g.add_edge(new, t)?;
            endpoints.extend([new, t]);
        }
    }
    Ok(g)
}

/// Closed-form BA edge count for `n` nodes and `m` attachments.
pub fn ba_edge_count(n: usize, m: usize) -> usize {
    m * (m + 1) / 2 + m * (n - m - 1)
}

/// Jittered lattice connected along its Delaunay edges.
pub fn gen_geo(spec: &GenSpec) -> Result<Generated, GenError> {
    spec.validate()?;
    let mut warnings = Vec::new();
    for attempt in 0..MAX_GEO_ATTEMPTS {
        let points = jittered_lattice(spec, attempt);
        match delaunay(&points) {
            Ok(edges) => {
                let graph = Graph::from_edges(points.len(), edges)?;
                return Ok(Generated {
                    graph,
                    layout: Some(points),
                    warnings,
                });
            }
            Err(GenError::DuplicatePoint(a, b)) => warnings.push(format!(
                "attempt {attempt}: points {a} and {b} coincide after jitter; redrawing"
            )),
            Err(e) => return Err(e),
        }
    }
    Err(GenError::JitterExhausted(MAX_GEO_ATTEMPTS))
}

/// Point `r * cols + c` sits at `(c, r)` plus independent uniform
/// displacements in `[-jitter, jitter]` on each axis.
pub fn jittered_lattice(spec: &GenSpec, attempt: u64) -> Vec<Point2D> {
    let mut rng = model_stream(spec, attempt);
    let j = spec.geo_jitter;
    let mut draw = || if j > 0.0 { rng.gen_range(-j..=j) } else { 0.0 };
    let mut pts = Vec::with_capacity(spec.geo_rows * spec.geo_cols);
    for r in 0..spec.geo_rows {
        for c in 0..spec.geo_cols {
            let dx = draw();
            let dy = draw();
            pts.push(Point2D::new(c as f64 + dx, r as f64 + dy));
        }
    }
    pts
}
