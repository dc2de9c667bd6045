//! The split hierarchy as a binary tree of component records, with JSON,
//! drawing and Newick exports.
//!
//! Newick labels follow `<kind><id>_<size>` where `kind` is `T` for leaves
//! left unsplit by a truncated run (the root included), `R` for the root,
//! `N` for other internal nodes and `L` for leaves. Branch lengths come from the chosen
//! axis: `parent.size - size` on the size axis (root 0), and the number of
//! ticks the component lived on the time axis, where leaves run until the
//! final tick. Children are written in layout order.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::NodeSet;
use crate::walk::{ComponentId, SplitEvent};

#[derive(Debug, Error, PartialEq)]
pub enum DendroError {
    #[error("event at tick {tick}: unknown parent component {parent}")]
    UnknownParent { tick: u64, parent: ComponentId },
    #[error("event at tick {tick}: component {parent} already split")]
    AlreadySplit { tick: u64, parent: ComponentId },
    #[error("event at tick {tick}: {msg}")]
    BadEvent { tick: u64, msg: String },
    #[error("component {0} is a leaf and has no permanence")]
    LeafPermanence(ComponentId),
    #[error("newick: {0}")]
    Newick(String),
    #[error("json: {0}")]
    Json(String),
}

/// One component's lifetime in the hierarchy.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentRecord {
    pub id: ComponentId,
    pub parent_id: Option<ComponentId>,
    /// Member nodes, when known (records rebuilt from events carry none).
    #[serde(skip)]
    pub members: Option<NodeSet>,
    pub size: usize,
    pub birth_tick: u64,
    /// Tick at which the component split; `None` for leaves.
    pub death_tick: Option<u64>,
    /// Smaller child first, then larger.
    pub children: Option<[ComponentId; 2]>,
    /// Still of size > 1 when the run was cut short.
    pub truncated: bool,
}

impl ComponentRecord {
    pub fn root(size: usize, members: Option<NodeSet>) -> Self {
        Self {
            id: 0,
            parent_id: None,
            members,
            size,
            birth_tick: 0,
            death_tick: None,
            children: None,
            truncated: false,
        }
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_none()
    }

    /// Steps taken by the component's agent between assignment and split.
    pub fn permanence(&self) -> Option<u64> {
        self.death_tick.map(|d| d - self.birth_tick)
    }
}

/// Which quantity the vertical axis of an export encodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    Size,
    Time,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct DendrogramMeta {
    pub n: usize,
    pub edges: usize,
    pub seed: u64,
    pub model: Option<String>,
    pub final_tick: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dendrogram {
    root_id: ComponentId,
    records: BTreeMap<ComponentId, ComponentRecord>,
    pub meta: DendrogramMeta,
}

#[derive(Serialize, Deserialize)]
struct JsonNode {
    id: ComponentId,
    parent: Option<ComponentId>,
    size: usize,
    birth: u64,
    death: Option<u64>,
    children: Vec<ComponentId>,
    truncated: bool,
}

#[derive(Serialize, Deserialize)]
struct JsonDoc {
    meta: DendrogramMeta,
    nodes: Vec<JsonNode>,
}

/// Positioned node of a drawing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DrawNode {
    pub id: ComponentId,
    pub parent: Option<ComponentId>,
    pub label: String,
    pub size: usize,
    pub x: f64,
    /// Lower end of the node's branch (its junction, or the leaf tip).
    pub y: f64,
    /// Upper end of the branch: where it hangs off its parent.
    pub y_parent: f64,
    pub leaf: bool,
    pub truncated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Drawing {
    pub axis: Axis,
    pub meta: DendrogramMeta,
    /// Leaf ids from left to right.
    pub leaf_order: Vec<ComponentId>,
    pub nodes: Vec<DrawNode>,
}

impl Dendrogram {
    /// Assembles a tree from already linked records.
    pub fn from_records(
        records: impl IntoIterator<Item = ComponentRecord>,
        meta: DendrogramMeta,
    ) -> Self {
        let records: BTreeMap<_, _> = records.into_iter().map(|r| (r.id, r)).collect();
        let root_id = records
            .values()
            .find(|r| r.parent_id.is_none())
            .map(|r| r.id)
            .expect("records contain a root");
        Self {
            root_id,
            records,
            meta,
        }
    }

    /// Replays a split history on a root of size `n`.
    ///
    /// The root id is taken from the first event (0 when there are none).
    pub fn build(events: &[SplitEvent], n: usize) -> Result<Self, DendroError> {
        let root_id = events.first().map_or(0, |e| e.parent_id);
        let mut root = ComponentRecord::root(n, None);
        root.id = root_id;
        let mut records = BTreeMap::from([(root_id, root)]);
        let mut last_tick = 0;
        for e in events {
            let bad = |msg: String| DendroError::BadEvent { tick: e.tick, msg };
            let parent = records
                .get_mut(&e.parent_id)
                .ok_or(DendroError::UnknownParent {
                    tick: e.tick,
                    parent: e.parent_id,
                })?;
            if !parent.is_leaf() {
                return Err(DendroError::AlreadySplit {
                    tick: e.tick,
                    parent: e.parent_id,
                });
            }
            if parent.size != e.parent_size {
                return Err(bad(format!(
                    "parent size {} but component {} has size {}",
                    e.parent_size, e.parent_id, parent.size
                )));
            }
            if e.n < 1 || e.n > e.m || e.n + e.m != e.parent_size {
                return Err(bad(format!(
                    "sizes ({}, {}) do not split {}",
                    e.n, e.m, e.parent_size
                )));
            }
            if e.tick < parent.birth_tick || e.tick < last_tick {
                return Err(bad("tick goes backwards".into()));
            }
            parent.death_tick = Some(e.tick);
            parent.children = Some([e.child_small_id, e.child_big_id]);
            last_tick = e.tick;
            for (id, size) in [(e.child_small_id, e.n), (e.child_big_id, e.m)] {
                if records.contains_key(&id) || e.child_small_id == e.child_big_id {
                    return Err(bad(format!("child id {id} reused")));
                }
                records.insert(
                    id,
                    ComponentRecord {
                        id,
                        parent_id: Some(e.parent_id),
                        members: None,
                        size,
                        birth_tick: e.tick,
                        death_tick: None,
                        children: None,
                        truncated: false,
                    },
                );
            }
        }
        Ok(Self {
            root_id,
            records,
            meta: DendrogramMeta {
                n,
                final_tick: last_tick,
                ..DendrogramMeta::default()
            },
        })
    }

    pub fn root(&self) -> &ComponentRecord {
        &self.records[&self.root_id]
    }

    pub fn get(&self, id: ComponentId) -> Option<&ComponentRecord> {
        self.records.get(&id)
    }

    /// Records in ascending id order.
    pub fn records(&self) -> impl Iterator<Item = &ComponentRecord> {
        self.records.values()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn leaves(&self) -> impl Iterator<Item = &ComponentRecord> {
        self.records.values().filter(|r| r.is_leaf())
    }

    pub fn permanence_of(&self, id: ComponentId) -> Result<u64, DendroError> {
        self.records
            .get(&id)
            .and_then(ComponentRecord::permanence)
            .ok_or(DendroError::LeafPermanence(id))
    }

    /// Same tree without member sets, as recovered from events or exports.
    pub fn without_members(&self) -> Self {
        let mut d = self.clone();
        for r in d.records.values_mut() {
            r.members = None;
        }
        d
    }

    /// Checks binarity, size sums and tick monotonicity.
    pub fn validate(&self) -> Result<(), String> {
        let root = self.root();
        if root.birth_tick != 0 {
            return Err("root birth tick is not 0".into());
        }
        let mut leaf_sum = 0;
        for r in self.records.values() {
            match r.children {
                None => leaf_sum += r.size,
                Some([a, b]) => {
                    let (ca, cb) = match (self.records.get(&a), self.records.get(&b)) {
                        (Some(ca), Some(cb)) => (ca, cb),
                        _ => return Err(format!("component {} has a missing child", r.id)),
                    };
                    if ca.size + cb.size != r.size {
                        return Err(format!("children of {} do not sum to its size", r.id));
                    }
                    let death = r
                        .death_tick
                        .ok_or(format!("internal component {} has no death tick", r.id))?;
                    if death <= r.birth_tick && r.parent_id.is_some() {
                        return Err(format!("component {} dies before it is born", r.id));
                    }
                    if ca.birth_tick != death || cb.birth_tick != death {
                        return Err(format!("children of {} not born at its death", r.id));
                    }
                    if ca.parent_id != Some(r.id) || cb.parent_id != Some(r.id) {
                        return Err(format!("children of {} point elsewhere", r.id));
                    }
                }
            }
        }
        if leaf_sum != root.size {
            return Err(format!(
                "leaf sizes sum to {leaf_sum}, root has {}",
                root.size
            ));
        }
        Ok(())
    }

    fn ordered_children(&self, r: &ComponentRecord) -> Option<[ComponentId; 2]> {
        let [a, b] = r.children?;
        let key = |id: ComponentId| {
            let c = &self.records[&id];
            (c.death_tick.unwrap_or(u64::MAX), id)
        };
        Some(if key(a) <= key(b) { [a, b] } else { [b, a] })
    }

    /// Leaves left to right: at every junction the child that splits
    /// first goes on the left.
    pub fn leaf_order(&self) -> Vec<ComponentId> {
        let mut out = Vec::new();
        let mut stack = vec![self.root_id];
        while let Some(id) = stack.pop() {
            match self.ordered_children(&self.records[&id]) {
                Some([left, right]) => {
                    stack.push(right);
                    stack.push(left);
                }
                None => out.push(id),
            }
        }
        out
    }

    fn label(&self, r: &ComponentRecord) -> String {
        let kind = if r.truncated {
            'T'
        } else if r.id == self.root_id {
            'R'
        } else if !r.is_leaf() {
            'N'
        } else {
            'L'
        };
        format!("{kind}{}_{}", r.id, r.size)
    }

    fn branch(&self, r: &ComponentRecord, axis: Axis) -> (f64, f64) {
        match axis {
            Axis::Size => {
                let top = r.parent_id.map_or(r.size, |p| self.records[&p].size);
                (r.size as f64, top as f64)
            }
            Axis::Time => {
                let end = r.death_tick.unwrap_or(self.meta.final_tick);
                (end as f64, r.birth_tick as f64)
            }
        }
    }

    /// Node positions for a plot on the given axis. Both axes share the
    /// same horizontal layout.
    pub fn layout(&self, axis: Axis) -> Drawing {
        let leaf_order = self.leaf_order();
        let mut x: BTreeMap<ComponentId, f64> = leaf_order
            .iter()
            .enumerate()
            .map(|(i, &id)| (id, i as f64))
            .collect();
        // Children always have larger ids than their parent in engine
        // output, but rebuilt trees need not, so resolve by post-order.
        fn place(d: &Dendrogram, id: ComponentId, x: &mut BTreeMap<ComponentId, f64>) -> f64 {
            if let Some(&v) = x.get(&id) {
                return v;
            }
            let [a, b] = d.records[&id].children.expect("leaves are pre-placed");
            let v = 0.5 * (place(d, a, x) + place(d, b, x));
            x.insert(id, v);
            v
        }
        let nodes = self
            .records
            .values()
            .map(|r| {
                let (y, y_parent) = self.branch(r, axis);
                DrawNode {
                    id: r.id,
                    parent: r.parent_id,
                    label: self.label(r),
                    size: r.size,
                    x: place(self, r.id, &mut x),
                    y,
                    y_parent,
                    leaf: r.is_leaf(),
                    truncated: r.truncated,
                }
            })
            .collect();
        Drawing {
            axis,
            meta: self.meta.clone(),
            leaf_order,
            nodes,
        }
    }

    pub fn export_size_axis(&self) -> Drawing {
        self.layout(Axis::Size)
    }

    pub fn export_time_axis(&self) -> Drawing {
        self.layout(Axis::Time)
    }

    /// `{meta, nodes:[{id,parent,size,birth,death,children,truncated}]}`
    pub fn to_json(&self) -> String {
        let doc = JsonDoc {
            meta: self.meta.clone(),
            nodes: self
                .records
                .values()
                .map(|r| JsonNode {
                    id: r.id,
                    parent: r.parent_id,
                    size: r.size,
                    birth: r.birth_tick,
                    death: r.death_tick,
                    children: r.children.map(Vec::from).unwrap_or_default(),
                    truncated: r.truncated,
                })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("dendrogram serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, DendroError> {
        let doc: JsonDoc =
            serde_json::from_str(text).map_err(|e| DendroError::Json(e.to_string()))?;
        let mut records = Vec::with_capacity(doc.nodes.len());
        for node in doc.nodes {
            let children = match node.children[..] {
                [] => None,
                [a, b] => Some([a, b]),
                _ => {
                    return Err(DendroError::Json(format!(
                        "component {} has {} children",
                        node.id,
                        node.children.len()
                    )))
                }
            };
            records.push(ComponentRecord {
                id: node.id,
                parent_id: node.parent,
                members: None,
                size: node.size,
                birth_tick: node.birth,
                death_tick: node.death,
                children,
                truncated: node.truncated,
            });
        }
        if records.iter().filter(|r| r.parent_id.is_none()).count() != 1 {
            return Err(DendroError::Json("expected exactly one root".into()));
        }
        let d = Self::from_records(records, doc.meta);
        d.validate().map_err(DendroError::Json)?;
        Ok(d)
    }

    pub fn export_newick(&self, axis: Axis) -> String {
        fn write(d: &Dendrogram, id: ComponentId, axis: Axis, out: &mut String) {
            let r = &d.records[&id];
            if let Some([a, b]) = d.ordered_children(r) {
                out.push('(');
                write(d, a, axis, out);
                out.push(',');
                write(d, b, axis, out);
                out.push(')');
            }
            let (y, y_parent) = d.branch(r, axis);
            write!(out, "{}:{}", d.label(r), (y - y_parent).abs()).unwrap();
        }
        let mut out = String::new();
        write(self, self.root_id, axis, &mut out);
        out.push(';');
        out
    }

    /// Inverse of [`export_newick`](Self::export_newick).
    ///
    /// A time-axis string restores ticks exactly. A size-axis string carries
    /// no timing, so every record comes back with birth 0 and no death tick.
    /// Leading `[...]` comments are skipped.
    pub fn parse_newick(text: &str, axis: Axis) -> Result<Self, DendroError> {
        let mut text = text.trim();
        while let Some(rest) = text.strip_prefix('[') {
            let end = rest
                .find(']')
                .ok_or_else(|| DendroError::Newick("unterminated comment".into()))?;
            text = rest[end + 1..].trim_start();
        }
        let mut p = NewickParser {
            s: text.as_bytes(),
            pos: 0,
            out: Vec::new(),
        };
        let root = p.node(None)?;
        p.expect(b';')?;
        if p.pos != p.s.len() {
            return Err(DendroError::Newick(format!(
                "trailing input at byte {}",
                p.pos
            )));
        }
        let mut records: BTreeMap<ComponentId, ComponentRecord> = BTreeMap::new();
        let mut final_tick = 0u64;
        // Ticks are resolved top down from the root.
        let by_id: BTreeMap<ComponentId, &ParsedNode> = p.out.iter().map(|n| (n.id, n)).collect();
        if by_id.len() != p.out.len() {
            return Err(DendroError::Newick("duplicate component id".into()));
        }
        let mut stack = vec![(root, 0u64)];
        while let Some((id, birth)) = stack.pop() {
            let node = by_id[&id];
            if axis == Axis::Size {
                let expected = match node.parent {
                    None => 0,
                    Some(pid) => by_id[&pid].size.checked_sub(node.size).ok_or_else(|| {
                        DendroError::Newick(format!("component {id} is larger than its parent"))
                    })?,
                };
                if node.length != expected as f64 {
                    return Err(DendroError::Newick(format!(
                        "component {id}: size-axis length {} but sizes imply {expected}",
                        node.length
                    )));
                }
            }
            let span = node.length as u64;
            let (birth_tick, death_tick) = match axis {
                Axis::Time if node.children.is_some() => (birth, Some(birth + span)),
                Axis::Time => {
                    final_tick = final_tick.max(birth + span);
                    (birth, None)
                }
                Axis::Size => (0, None),
            };
            if let Some(kids) = node.children {
                let child_birth = death_tick.unwrap_or(0);
                for k in kids {
                    stack.push((k, child_birth));
                }
                // Smaller child first; equal sizes keep the smaller id first.
                let mut small_first = kids;
                small_first.sort_by_key(|k| (by_id[k].size, *k));
                records.insert(
                    id,
                    ComponentRecord {
                        id,
                        parent_id: node.parent,
                        members: None,
                        size: node.size,
                        birth_tick,
                        death_tick,
                        children: Some(small_first),
                        truncated: false,
                    },
                );
            } else {
                records.insert(
                    id,
                    ComponentRecord {
                        id,
                        parent_id: node.parent,
                        members: None,
                        size: node.size,
                        birth_tick,
                        death_tick: None,
                        children: None,
                        truncated: node.truncated,
                    },
                );
            }
        }
        let n = records[&root].size;
        Ok(Self {
            root_id: root,
            records,
            meta: DendrogramMeta {
                n,
                final_tick,
                ..DendrogramMeta::default()
            },
        })
    }
}

struct ParsedNode {
    id: ComponentId,
    parent: Option<ComponentId>,
    size: usize,
    length: f64,
    children: Option<[ComponentId; 2]>,
    truncated: bool,
}

struct NewickParser<'a> {
    s: &'a [u8],
    pos: usize,
    out: Vec<ParsedNode>,
}

impl NewickParser<'_> {
    fn err<T>(&self, msg: &str) -> Result<T, DendroError> {
        Err(DendroError::Newick(format!("{msg} at byte {}", self.pos)))
    }

    fn expect(&mut self, c: u8) -> Result<(), DendroError> {
        if self.s.get(self.pos) == Some(&c) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(&format!("expected `{}`", c as char))
        }
    }

    fn token(&mut self) -> &str {
        let start = self.pos;
        while self
            .s
            .get(self.pos)
            .is_some_and(|c| !matches!(c, b'(' | b')' | b',' | b':' | b';'))
        {
            self.pos += 1;
        }
        std::str::from_utf8(&self.s[start..self.pos]).unwrap_or("")
    }

    fn node(&mut self, parent: Option<ComponentId>) -> Result<ComponentId, DendroError> {
        // Children are parsed before the label that names their parent, so
        // they are linked afterwards.
        let mut kids = None;
        if self.s.get(self.pos) == Some(&b'(') {
            self.pos += 1;
            let first = self.out.len();
            let a = self.node(None)?;
            self.expect(b',')?;
            let b = self.node(None)?;
            self.expect(b')')?;
            kids = Some(([a, b], first));
        }
        let label = self.token().to_owned();
        self.expect(b':')?;
        let length: f64 = match self.token().parse() {
            Ok(v) => v,
            Err(_) => return self.err("bad branch length"),
        };
        let mut chars = label.chars();
        let kind = chars.next();
        let Some((id, size)) = chars
            .as_str()
            .split_once('_')
            .and_then(|(i, s)| Some((i.parse::<ComponentId>().ok()?, s.parse::<usize>().ok()?)))
        else {
            return self.err(&format!("bad label `{label}`"));
        };
        match (kind, kids.is_some()) {
            (Some('R' | 'N'), true) | (Some('L' | 'T' | 'R'), false) => {}
            _ => return self.err(&format!("label `{label}` does not match node shape")),
        }
        if let Some((pair, first)) = kids {
            for n in &mut self.out[first..] {
                if pair.contains(&n.id) {
                    n.parent = Some(id);
                }
            }
        }
        self.out.push(ParsedNode {
            id,
            parent,
            size,
            length,
            children: kids.map(|(pair, _)| pair),
            truncated: kind == Some('T'),
        });
        Ok(id)
    }
}
