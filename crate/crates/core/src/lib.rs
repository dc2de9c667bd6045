//! Progressive dismantling of complex networks by edge-deleting random
//! walks.
//!
//! A walker deletes every edge it traverses. Whenever a deletion cuts its
//! component in two, the split is recorded; the full history forms a binary
//! hierarchy ([`dendrogram::Dendrogram`]). [`generators`] builds the
//! Erdős–Rényi, Barabási–Albert and Delaunay-lattice networks the walks run
//! on, [`walk`] drives sequential and parallel walks, [`stats`] summarizes
//! them and [`experiment`] runs whole seeded campaigns.

pub mod dendrogram;
pub mod experiment;
pub mod generators;
pub mod graph;
pub mod rng;
pub mod stats;
pub mod walk;

pub use dendrogram::{Axis, ComponentRecord, Dendrogram};
pub use experiment::{run_campaign, Campaign, Executor, ExperimentConfig};
pub use generators::{generate, GenSpec, Model};
pub use graph::{Graph, NodeId, NodeSet};
pub use walk::{run_parallel, run_sequential, Mode, ParallelOptions, SplitEvent, WalkTrace};
