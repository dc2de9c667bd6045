//! Mutable simple undirected graph with dense node ids.
//!
//! Neighbor lists are kept sorted so that iteration order, and therefore
//! every seeded neighbor draw, is identical across platforms.

use std::collections::VecDeque;
use std::fmt::Write as _;

use thiserror::Error;

pub type NodeId = usize;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("node {node} out of range for graph with {node_count} nodes")]
    InvalidNode { node: NodeId, node_count: usize },
    #[error("self-loop on node {0} is not allowed")]
    SelfLoop(NodeId),
    #[error("edge ({0}, {1}) already present")]
    DuplicateEdge(NodeId, NodeId),
    #[error("edge ({0}, {1}) does not exist")]
    MissingEdge(NodeId, NodeId),
    #[error("graph has no nodes")]
    Empty,
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// A set of node ids, stored sorted and deduplicated.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct NodeSet(Vec<NodeId>);

impl NodeSet {
    pub fn new() -> Self {
        Self(Vec::new())
    }

    /// Builds a set from ids that are already strictly increasing.
    pub(crate) fn from_sorted_unchecked(ids: Vec<NodeId>) -> Self {
        debug_assert!(ids.windows(2).all(|w| w[0] < w[1]));
        Self(ids)
    }

    pub fn contains(&self, node: NodeId) -> bool {
        self.0.binary_search(&node).is_ok()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[NodeId] {
        &self.0
    }

    /// Smallest member, if any.
    pub fn first(&self) -> Option<NodeId> {
        self.0.first().copied()
    }

    pub fn is_disjoint(&self, other: &NodeSet) -> bool {
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].cmp(&other.0[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => return false,
            }
        }
        true
    }

    pub fn union(&self, other: &NodeSet) -> NodeSet {
        self.iter().chain(other.iter()).collect()
    }
}

impl FromIterator<NodeId> for NodeSet {
    fn from_iter<I: IntoIterator<Item = NodeId>>(iter: I) -> Self {
        let mut ids: Vec<NodeId> = iter.into_iter().collect();
        ids.sort_unstable();
        ids.dedup();
        Self(ids)
    }
}

impl<'a> IntoIterator for &'a NodeSet {
    type Item = &'a NodeId;
    type IntoIter = std::slice::Iter<'a, NodeId>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adjacency: Vec<Vec<NodeId>>,
    edge_count: usize,
}

impl Graph {
    /// Creates an edgeless graph on `node_count` nodes.
    pub fn new(node_count: usize) -> Self {
        Self {
            adjacency: vec![Vec::new(); node_count],
            edge_count: 0,
        }
    }

    pub fn from_edges<I>(node_count: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (NodeId, NodeId)>,
    {
        let mut g = Self::new(node_count);
        for (u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    /// Complete graph on `n` nodes.
    pub fn complete(n: usize) -> Self {
        let mut g = Self::new(n);
        for u in 0..n {
            for v in (u + 1)..n {
                g.add_edge(u, v).expect("complete graph edges are distinct");
            }
        }
        g
    }

    /// Path 0 - 1 - ... - (n-1).
    pub fn path(n: usize) -> Self {
        Self::from_edges(n, (1..n).map(|v| (v - 1, v))).expect("path edges are distinct")
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    fn check_node(&self, node: NodeId) -> Result<(), GraphError> {
        if node < self.adjacency.len() {
            Ok(())
        } else {
            Err(GraphError::InvalidNode {
                node,
                node_count: self.adjacency.len(),
            })
        }
    }

    pub fn degree(&self, node: NodeId) -> Result<usize, GraphError> {
        self.check_node(node)?;
        Ok(self.adjacency[node].len())
    }

    /// Sorted neighbors of `node`.
    ///
    /// Panics if `node` is out of range.
    pub fn neighbors(&self, node: NodeId) -> &[NodeId] {
        &self.adjacency[node]
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        u < self.adjacency.len() && self.adjacency[u].binary_search(&v).is_ok()
    }

    pub fn add_edge(&mut self, u: NodeId, v: NodeId) -> Result<(), GraphError> {
        self.check_node(u)?;
        self.check_node(v)?;
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        let pos_u = match self.adjacency[u].binary_search(&v) {
            Ok(_) => return Err(GraphError::DuplicateEdge(u.min(v), u.max(v))),
            Err(pos) => pos,
        };
        self.adjacency[u].insert(pos_u, v);
        let pos_v = self.adjacency[v]
            .binary_search(&u)
            .expect_err("adjacency symmetry violated");
        self.adjacency[v].insert(pos_v, u);
        self.edge_count += 1;
        self.debug_check();
        Ok(())
    }

    pub fn remove_edge(&mut self, u: NodeId, v: NodeId) -> Result<(), GraphError> {
        self.check_node(u)?;
        self.check_node(v)?;
        let pos_u = self.adjacency[u]
            .binary_search(&v)
            .map_err(|_| GraphError::MissingEdge(u, v))?;
        self.adjacency[u].remove(pos_u);
        let pos_v = self.adjacency[v]
            .binary_search(&u)
            .expect("adjacency symmetry violated");
        self.adjacency[v].remove(pos_v);
        self.edge_count -= 1;
        self.debug_check();
        Ok(())
    }

    /// All edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.adjacency.iter().enumerate().flat_map(|(u, nbrs)| {
            nbrs.iter()
                .copied()
                .filter(move |&v| v > u)
                .map(move |v| (u, v))
        })
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adjacency.iter().map(Vec::len).collect()
    }

    pub fn mean_degree(&self) -> f64 {
        if self.adjacency.is_empty() {
            0.0
        } else {
            2.0 * self.edge_count as f64 / self.adjacency.len() as f64
        }
    }

    /// Breadth-first search from `start` through nodes accepted by `in_scope`.
    ///
    /// Stops early and returns `Reach::Found` as soon as `target` is dequeued.
    /// Otherwise returns every reached node, sorted.
    pub(crate) fn search<F>(&self, start: NodeId, target: Option<NodeId>, in_scope: F) -> Reach
    where
        F: Fn(NodeId) -> bool,
    {
        let mut seen = vec![false; self.adjacency.len()];
        let mut queue = VecDeque::new();
        let mut reached = Vec::new();
        seen[start] = true;
        queue.push_back(start);
        while let Some(x) = queue.pop_front() {
            if Some(x) == target {
                return Reach::Found;
            }
            reached.push(x);
            for &y in &self.adjacency[x] {
                if !seen[y] && in_scope(y) {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
        reached.sort_unstable();
        Reach::Exhausted(NodeSet::from_sorted_unchecked(reached))
    }

    /// True iff a path from `u` to `v` exists using current edges and only
    /// nodes of `within`.
    pub fn connected(&self, u: NodeId, v: NodeId, within: &NodeSet) -> Result<bool, GraphError> {
        self.check_node(u)?;
        self.check_node(v)?;
        debug_assert!(within.contains(u) && within.contains(v));
        Ok(matches!(
            self.search(u, Some(v), |x| within.contains(x)),
            Reach::Found
        ))
    }

    /// Maximal set of nodes reachable from `u` inside `within`.
    pub fn component_of(&self, u: NodeId, within: &NodeSet) -> Result<NodeSet, GraphError> {
        self.check_node(u)?;
        debug_assert!(within.contains(u));
        match self.search(u, None, |x| within.contains(x)) {
            Reach::Exhausted(set) => Ok(set),
            Reach::Found => unreachable!("search without target cannot report Found"),
        }
    }

    /// Connected components, each sorted, ordered by smallest member.
    pub fn components(&self) -> Vec<NodeSet> {
        let mut assigned = vec![false; self.adjacency.len()];
        let mut out = Vec::new();
        for start in 0..self.adjacency.len() {
            if assigned[start] {
                continue;
            }
            let Reach::Exhausted(set) = self.search(start, None, |_| true) else {
                unreachable!()
            };
            for x in set.iter() {
                assigned[x] = true;
            }
            out.push(set);
        }
        out
    }

    /// A maximum-cardinality component; ties go to the one holding the
    /// smallest node id.
    pub fn largest_component(&self) -> Result<NodeSet, GraphError> {
        if self.adjacency.is_empty() {
            return Err(GraphError::Empty);
        }
        let mut best: Option<NodeSet> = None;
        // components() yields in ascending order of smallest member, so a
        // strict comparison keeps the earliest among equal sizes.
        for comp in self.components() {
            if best.as_ref().is_none_or(|b| comp.len() > b.len()) {
                best = Some(comp);
            }
        }
        Ok(best.expect("non-empty graph has a component"))
    }

    /// Subgraph induced by `keep`, relabelled to `0..keep.len()` in
    /// ascending original-id order.
    pub fn induced_subgraph(&self, keep: &NodeSet) -> Graph {
        let mut new_id = vec![usize::MAX; self.adjacency.len()];
        for (i, x) in keep.iter().enumerate() {
            new_id[x] = i;
        }
        let mut g = Graph::new(keep.len());
        for (u, v) in self.edges() {
            if new_id[u] != usize::MAX && new_id[v] != usize::MAX {
                g.add_edge(new_id[u], new_id[v])
                    .expect("induced edges are distinct");
            }
        }
        g
    }

    pub fn is_connected(&self) -> bool {
        !self.adjacency.is_empty() && self.components().len() == 1
    }

    /// Checks symmetry, absence of self-loops and the edge counter.
    pub fn validate(&self) -> Result<(), String> {
        let mut half = 0usize;
        for (u, nbrs) in self.adjacency.iter().enumerate() {
            if nbrs.windows(2).any(|w| w[0] >= w[1]) {
                return Err(format!("neighbors of {u} not strictly sorted"));
            }
            for &v in nbrs {
                if v == u {
                    return Err(format!("self-loop at {u}"));
                }
                if v >= self.adjacency.len() || self.adjacency[v].binary_search(&u).is_err() {
                    return Err(format!("edge ({u}, {v}) is not symmetric"));
                }
            }
            half += nbrs.len();
        }
        if half != 2 * self.edge_count {
            return Err(format!(
                "edge_count {} but neighbor lists hold {} endpoints",
                self.edge_count, half
            ));
        }
        Ok(())
    }

    #[inline]
    fn debug_check(&self) {
        #[cfg(debug_assertions)]
        if self.adjacency.len() <= 256 {
            if let Err(e) = self.validate() {
                panic!("graph invariant violated: {e}");
            }
        }
    }

    /// Serializes to the edge-list text format: a `# nodes=<N>` header,
    /// optional `# key=value` comment lines, then one `u v` line per edge
    /// with `u < v`.
    pub fn to_edge_list(&self, comments: &[String]) -> String {
        let mut out = String::new();
        writeln!(out, "# nodes={}", self.node_count()).unwrap();
        for c in comments {
            writeln!(out, "# {c}").unwrap();
        }
        for (u, v) in self.edges() {
            writeln!(out, "{u} {v}").unwrap();
        }
        out
    }

    /// Parses the edge-list format. Comment lines other than the header are
    /// ignored; anything after a `# layout` line is left to the caller.
    pub fn from_edge_list(text: &str) -> Result<Self, GraphError> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or(GraphError::Parse {
            line: 1,
            msg: "missing `# nodes=<N>` header".into(),
        })?;
        let node_count = header
            .trim()
            .strip_prefix('#')
            .map(str::trim)
            .and_then(|h| h.strip_prefix("nodes="))
            .and_then(|n| n.trim().parse::<usize>().ok())
            .ok_or(GraphError::Parse {
                line: 1,
                msg: format!("expected `# nodes=<N>`, found `{header}`"),
            })?;
        let mut g = Graph::new(node_count);
        for (idx, raw) in lines {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(comment) = line.strip_prefix('#') {
                if comment.trim() == "layout" {
                    break;
                }
                continue;
            }
            let parse_err = |msg: String| GraphError::Parse { line: line_no, msg };
            let mut parts = line.split_whitespace();
            let (Some(a), Some(b), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(parse_err(format!("expected `u v`, found `{line}`")));
            };
            let u: NodeId = a
                .parse()
                .map_err(|_| parse_err(format!("bad node id `{a}`")))?;
            let v: NodeId = b
                .parse()
                .map_err(|_| parse_err(format!("bad node id `{b}`")))?;
            g.add_edge(u, v).map_err(|e| parse_err(e.to_string()))?;
        }
        Ok(g)
    }
}

pub(crate) enum Reach {
    Found,
    Exhausted(NodeSet),
}
