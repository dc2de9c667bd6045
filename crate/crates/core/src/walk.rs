//! Edge-deleting uniform random walks.
//!
//! Every traversed edge is removed. When a removal disconnects the walker's
//! component, the component splits in exactly two and a [`SplitEvent`] is
//! emitted. In sequential mode a single agent follows the child it stepped
//! into; in parallel mode every child of size two or more gets its own
//! agent.
//!
//! Parallel runs use a synchronous clock. At each tick every active agent
//! moves once, in ascending component-id order; agents spawned by a split
//! first move on the next tick. A component's permanence is therefore
//! `death_tick - birth_tick`.
//!
//! RNG draws, in order: the start node; then per move one neighbor draw
//! over the sorted current neighbors; then per split one placement draw for
//! each child that receives an agent (smaller child first).

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dendrogram::{ComponentRecord, Dendrogram, DendrogramMeta};
use crate::graph::{Graph, NodeId, NodeSet, Reach};
use crate::rng::{pick_index, stream, StreamRng};

pub type ComponentId = usize;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WalkError {
    #[error("graph needs at least 2 nodes and 1 edge (has {nodes} nodes, {edges} edges)")]
    TooSmall { nodes: usize, edges: usize },
    #[error("graph is not connected")]
    Disconnected,
    #[error("agent {0} is inactive")]
    InactiveAgent(usize),
    #[error("agent {agent} sits in component {component} of size 1")]
    StrandedAgent {
        agent: usize,
        component: ComponentId,
    },
    #[error("component {0} is a leaf and has no permanence")]
    LeafPermanence(ComponentId),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Sequential,
    Parallel,
}

/// One two-way break, with `1 <= n <= m` and `n + m = parent_size`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SplitEvent {
    pub tick: u64,
    pub parent_id: ComponentId,
    pub parent_size: usize,
    pub n: usize,
    pub m: usize,
    pub child_small_id: ComponentId,
    pub child_big_id: ComponentId,
}

impl SplitEvent {
    pub const CSV_HEADER: &'static str =
        "tick,parent_id,parent_size,n,m,child_small_id,child_big_id";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.tick,
            self.parent_id,
            self.parent_size,
            self.n,
            self.m,
            self.child_small_id,
            self.child_big_id
        )
    }

    pub fn parse_csv_row(line: &str) -> Result<Self, String> {
        let fields: Vec<&str> = line.trim().split(',').collect();
        if fields.len() != 7 {
            return Err(format!("expected 7 fields, found {}", fields.len()));
        }
        let mut nums = [0u64; 7];
        for (slot, f) in nums.iter_mut().zip(&fields) {
            *slot = f.trim().parse().map_err(|_| format!("bad number `{f}`"))?;
        }
        let [tick, parent_id, parent_size, n, m, child_small_id, child_big_id] = nums;
        Ok(Self {
            tick,
            parent_id: parent_id as usize,
            parent_size: parent_size as usize,
            n: n as usize,
            m: m as usize,
            child_small_id: child_small_id as usize,
            child_big_id: child_big_id as usize,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Agent {
    pub component_id: ComponentId,
    pub position: NodeId,
    pub active: bool,
}

/// Mutable state of one walk: the shrinking graph, the component
/// partition and the agents.
pub struct WalkState {
    graph: Graph,
    mode: Mode,
    component_of: Vec<ComponentId>,
    records: Vec<ComponentRecord>,
    agents: Vec<Agent>,
    tick: u64,
    steps: u64,
    initial_edges: usize,
    start_node: NodeId,
    rng: StreamRng,
}

impl WalkState {
    /// Places one agent on a uniformly chosen node of a connected graph.
    pub fn new(graph: Graph, seed: u64, mode: Mode) -> Result<Self, WalkError> {
        let (nodes, edges) = (graph.node_count(), graph.edge_count());
        if nodes < 2 || edges < 1 {
            return Err(WalkError::TooSmall { nodes, edges });
        }
        if !graph.is_connected() {
            return Err(WalkError::Disconnected);
        }
        let mut rng = stream(seed);
        let start_node = pick_index(&mut rng, nodes);
        let members: NodeSet = (0..nodes).collect();
        Ok(Self {
            mode,
            component_of: vec![0; nodes],
            records: vec![ComponentRecord::root(nodes, Some(members))],
            agents: vec![Agent {
                component_id: 0,
                position: start_node,
                active: true,
            }],
            tick: 0,
            steps: 0,
            initial_edges: edges,
            start_node,
            rng,
            graph,
        })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn agents(&self) -> &[Agent] {
        &self.agents
    }

    pub fn records(&self) -> &[ComponentRecord] {
        &self.records
    }

    pub fn tick(&self) -> u64 {
        self.tick
    }

    /// Agent moves made so far, equal to edges removed so far.
    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn start_node(&self) -> NodeId {
        self.start_node
    }

    pub fn component_of(&self, node: NodeId) -> ComponentId {
        self.component_of[node]
    }

    /// Moves `agent` across a uniformly chosen incident edge and deletes
    /// it. Returns the split that deletion caused, if any.
    pub fn step_agent(&mut self, agent: usize) -> Result<Option<SplitEvent>, WalkError> {
        let Agent {
            component_id: cid,
            position: alpha,
            active,
        } = self.agents[agent];
        if !active {
            return Err(WalkError::InactiveAgent(agent));
        }
        if self.records[cid].size < 2 {
            return Err(WalkError::StrandedAgent {
                agent,
                component: cid,
            });
        }
        let nbrs = self.graph.neighbors(alpha);
        // A connected component of size >= 2 has no isolated node.
        debug_assert!(!nbrs.is_empty(), "agent {agent} has no move");
        let beta = nbrs[pick_index(&mut self.rng, nbrs.len())];
        self.graph
            .remove_edge(alpha, beta)
            .expect("edge to a current neighbor exists");
        self.agents[agent].position = beta;
        self.steps += 1;

        let labels = &self.component_of;
        let beta_side = match self.graph.search(beta, Some(alpha), |x| labels[x] == cid) {
            Reach::Found => return Ok(None),
            Reach::Exhausted(set) => set,
        };
        Ok(Some(self.split(cid, alpha, beta_side)))
    }

    fn split(&mut self, cid: ComponentId, alpha: NodeId, beta_side: NodeSet) -> SplitEvent {
        let parent_members = self.records[cid]
            .members
            .take()
            .expect("live components keep their members");
        let alpha_side: NodeSet = parent_members
            .iter()
            .filter(|&x| !beta_side.contains(x))
            .collect();
        debug_assert_eq!(
            self.graph
                .component_of(alpha, &parent_members)
                .ok()
                .as_ref(),
            Some(&alpha_side),
            "a single deletion must leave exactly two components"
        );

        // Smaller child first; equal sizes put the one holding the smallest
        // node first.
        let (small, big) =
            if (alpha_side.len(), alpha_side.first()) <= (beta_side.len(), beta_side.first()) {
                (alpha_side, beta_side)
            } else {
                (beta_side, alpha_side)
            };
        let small_id = self.records.len();
        let big_id = small_id + 1;
        let event = SplitEvent {
            tick: self.tick,
            parent_id: cid,
            parent_size: parent_members.len(),
            n: small.len(),
            m: big.len(),
            child_small_id: small_id,
            child_big_id: big_id,
        };
        debug_assert!(event.n >= 1 && event.n <= event.m);
        debug_assert_eq!(event.n + event.m, event.parent_size);

        let parent = &mut self.records[cid];
        parent.death_tick = Some(self.tick);
        parent.children = Some([small_id, big_id]);
        for (id, set) in [(small_id, small), (big_id, big)] {
            for x in set.iter() {
                self.component_of[x] = id;
            }
            self.records.push(ComponentRecord {
                id,
                parent_id: Some(cid),
                size: set.len(),
                members: Some(set),
                birth_tick: self.tick,
                death_tick: None,
                children: None,
                truncated: false,
            });
        }
        event
    }

    fn place_agent(&mut self, component: ComponentId) -> NodeId {
        let members = self.records[component]
            .members
            .as_ref()
            .expect("live components keep their members");
        members.as_slice()[pick_index(&mut self.rng, members.len())]
    }

    /// Reassigns agents after `event`, which `agent` just caused.
    ///
    /// Sequential: the agent stays in the child holding its position and
    /// jumps to a uniform node of it (possibly its current node). Parallel:
    /// the agent retires and each child of size >= 2 gets a fresh agent.
    /// Returns the component the sequential agent continues in.
    pub fn resolve_split(&mut self, event: &SplitEvent, agent: usize) -> ComponentId {
        match self.mode {
            Mode::Sequential => {
                let child = self.component_of[self.agents[agent].position];
                let position = self.place_agent(child);
                self.agents[agent] = Agent {
                    component_id: child,
                    position,
                    active: self.records[child].size >= 2,
                };
                child
            }
            Mode::Parallel => {
                self.agents[agent].active = false;
                for child in [event.child_small_id, event.child_big_id] {
                    if self.records[child].size >= 2 {
                        let position = self.place_agent(child);
                        self.agents.push(Agent {
                            component_id: child,
                            position,
                            active: true,
                        });
                    }
                }
                event.child_small_id
            }
        }
    }

    /// Runs one synchronous tick in parallel mode; returns the splits.
    pub fn parallel_tick(&mut self) -> Vec<SplitEvent> {
        self.agents.retain(|a| a.active);
        self.tick += 1;
        let movers = self.agents.len();
        let mut events = Vec::new();
        for i in 0..movers {
            if let Some(event) = self.step_agent(i).expect("scheduled agents are live") {
                self.resolve_split(&event, i);
                events.push(event);
            }
        }
        events
    }

    pub fn has_active_agents(&self) -> bool {
        self.agents.iter().any(|a| a.active)
    }

    fn into_dendrogram(mut self, seed: u64) -> Dendrogram {
        for r in &mut self.records {
            r.truncated = r.is_leaf() && r.size > 1;
        }
        Dendrogram::from_records(
            self.records,
            DendrogramMeta {
                n: self.graph.node_count(),
                edges: self.initial_edges,
                seed,
                model: None,
                final_tick: self.tick,
            },
        )
    }
}

/// Summary of one sequential walk.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WalkTrace {
    pub seed: u64,
    pub start_node: NodeId,
    /// Number of edge traversals until the agent was stranded.
    pub duration: u64,
    pub splits: Vec<SplitEvent>,
    /// Component entered after each split.
    pub branches: Vec<ComponentId>,
}

impl WalkTrace {
    pub const CSV_HEADER: &'static str = "seed,start_node,duration,num_splits";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{}",
            self.seed,
            self.start_node,
            self.duration,
            self.splits.len()
        )
    }
}

/// Single-agent walk until the agent's component shrinks to one node.
pub fn run_sequential(graph: &Graph, seed: u64) -> Result<WalkTrace, WalkError> {
    let mut state = WalkState::new(graph.clone(), seed, Mode::Sequential)?;
    let mut splits = Vec::new();
    let mut branches = Vec::new();
    while state.agents[0].active {
        // Sequential ticks count the agent's own moves.
        state.tick += 1;
        if let Some(event) = state.step_agent(0)? {
            branches.push(state.resolve_split(&event, 0));
            splits.push(event);
        }
    }
    Ok(WalkTrace {
        seed,
        start_node: state.start_node,
        duration: state.steps,
        splits,
        branches,
    })
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParallelOptions {
    /// Stop after this many ticks, leaving unsplit components as
    /// truncated leaves.
    pub truncate_at_tick: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParallelRun {
    pub dendrogram: Dendrogram,
    pub events: Vec<SplitEvent>,
    pub start_node: NodeId,
    pub total_steps: u64,
    pub initial_edges: usize,
    pub truncated: bool,
}

impl ParallelRun {
    pub fn records(&self) -> impl Iterator<Item = &ComponentRecord> {
        self.dendrogram.records()
    }
}

/// Agent-per-component dismantling until every component is a single node.
pub fn run_parallel(
    graph: &Graph,
    seed: u64,
    options: ParallelOptions,
) -> Result<ParallelRun, WalkError> {
    let mut state = WalkState::new(graph.clone(), seed, Mode::Parallel)?;
    let mut events = Vec::new();
    while state.has_active_agents() {
        if options.truncate_at_tick.is_some_and(|t| state.tick >= t) {
            break;
        }
        events.extend(state.parallel_tick());
    }
    let truncated = state.has_active_agents();
    let total_steps = state.steps;
    let initial_edges = state.initial_edges;
    let start_node = state.start_node;
    debug_assert!(truncated || state.graph.edge_count() == 0);
    debug_assert_eq!(
        total_steps as usize,
        initial_edges - state.graph.edge_count()
    );
    Ok(ParallelRun {
        dendrogram: state.into_dendrogram(seed),
        events,
        start_node,
        total_steps,
        initial_edges,
        truncated,
    })
}

/// Steps the component's agent took before the component split.
pub fn permanence_of(record: &ComponentRecord) -> Result<u64, WalkError> {
    record
        .permanence()
        .ok_or(WalkError::LeafPermanence(record.id))
}
