//! Parity game graphs for direct, delayed and fair simulation, plus
//! reversible transition-level modifications.
//!
//! Vertices are interned to dense [`VertexId`]s. A vertex created by a
//! modification is appended and is truncated again by [`GameGraph::undo`].
//! Purged vertices stay in place as tombstones so ids remain stable.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::automaton::{BuchiAutomaton, IndexedAutomaton, SymbolTable, Transition};
use crate::solver::Measure;

pub type VertexId = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Flavor {
    Direct,
    Delayed,
    Fair,
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Flavor::Direct => "direct",
            Flavor::Delayed => "delayed",
            Flavor::Fair => "fair",
        })
    }
}

/// The player who moves next at a vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Owner {
    /// V0: Duplicator answers Spoiler's last letter.
    Duplicator,
    /// V1: Spoiler picks a transition.
    Spoiler,
}

/// Structural description of a vertex by state names.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Vertex {
    SpoilerTurn {
        spoiler: String,
        duplicator: String,
        bit: Option<bool>,
    },
    DuplicatorTurn {
        spoiler: String,
        duplicator: String,
        symbol: String,
        bit: Option<bool>,
    },
}

impl Vertex {
    pub fn spoiler_turn(q: &str, q2: &str) -> Self {
        Vertex::SpoilerTurn {
            spoiler: q.into(),
            duplicator: q2.into(),
            bit: None,
        }
    }

    pub fn duplicator_turn(q: &str, q2: &str, a: &str) -> Self {
        Vertex::DuplicatorTurn {
            spoiler: q.into(),
            duplicator: q2.into(),
            symbol: a.into(),
            bit: None,
        }
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let bit = |b: &Option<bool>| match b {
            Some(b) => format!("{},", *b as u8),
            None => String::new(),
        };
        match self {
            Vertex::SpoilerTurn {
                spoiler,
                duplicator,
                bit: b,
            } => write!(f, "({}{spoiler},{duplicator})", bit(b)),
            Vertex::DuplicatorTurn {
                spoiler,
                duplicator,
                symbol,
                bit: b,
            } => write!(f, "({}{spoiler},{duplicator},{symbol})", bit(b)),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("Spoiler's automaton has a dead end at `{0}`")]
    DeadEnd(String),
    #[error("operation requires a fair game graph, got {0}")]
    NotFair(Flavor),
    #[error("transition {0} is already present")]
    Overlap(Transition),
    #[error("transition {0} is not present")]
    Missing(Transition),
    #[error("transition {0} references a state or symbol outside the game")]
    Foreign(Transition),
    #[error("removing {0} would leave a dead end in Spoiler's automaton")]
    WouldDeadEnd(Transition),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) struct Key {
    pub(crate) spoiler: u32,
    pub(crate) duplicator: u32,
    pub(crate) symbol: Option<u32>,
    pub(crate) bit: Option<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Edge {
    pub(crate) other: VertexId,
    /// Edge belongs to the fair graph but not to the direct graph.
    pub(crate) excluded: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Op {
    AddEdge(VertexId, VertexId),
    RemoveEdge {
        from: VertexId,
        to: VertexId,
        excluded: bool,
        succ_pos: usize,
        pred_pos: usize,
    },
    AddVertex(VertexId),
    Kill(VertexId),
    SpoilerInsert(u32, u32, u32),
    SpoilerRemove(u32, u32, u32),
    DuplicatorRemove(u32, u32, u32),
}

/// A solver entry `(vertex, mu, B, C)` saved before an in-place update.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SavedEntry {
    pub vertex: VertexId,
    pub mu: Measure,
    pub best: Measure,
    pub count: u32,
}

/// Reversible record of one modification of a [`GameGraph`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GraphDelta {
    ops: Vec<Op>,
    /// Filled lazily by in-place incremental solving, restored on undo.
    pub saved_solver_entries: Vec<SavedEntry>,
    /// Length of the measure vectors before the modification.
    pub(crate) solver_len: Option<usize>,
}

impl GraphDelta {
    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn added_edges(&self) -> Vec<(VertexId, VertexId)> {
        self.ops
            .iter()
            .filter_map(|op| match *op {
                Op::AddEdge(f, t) => Some((f, t)),
                _ => None,
            })
            .collect()
    }

    pub fn removed_edges(&self) -> Vec<(VertexId, VertexId)> {
        self.ops
            .iter()
            .filter_map(|op| match *op {
                Op::RemoveEdge { from, to, .. } => Some((from, to)),
                _ => None,
            })
            .collect()
    }

    pub fn added_vertices(&self) -> Vec<VertexId> {
        self.ops
            .iter()
            .filter_map(|op| match *op {
                Op::AddVertex(v) => Some(v),
                _ => None,
            })
            .collect()
    }

    pub fn purged_vertices(&self) -> Vec<VertexId> {
        self.ops
            .iter()
            .filter_map(|op| match *op {
                Op::Kill(v) => Some(v),
                _ => None,
            })
            .collect()
    }

    /// Vertices whose successor set changed, including created ones.
    pub fn touched(&self) -> Vec<VertexId> {
        let mut out: Vec<VertexId> = self
            .ops
            .iter()
            .filter_map(|op| match *op {
                Op::AddEdge(f, _) => Some(f),
                Op::RemoveEdge { from, .. } => Some(from),
                Op::AddVertex(v) => Some(v),
                _ => None,
            })
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Concatenates `later` onto `self`; undoing the result undoes both.
    pub fn merge(&mut self, later: GraphDelta) {
        self.ops.extend(later.ops);
        self.saved_solver_entries.extend(later.saved_solver_entries);
    }
}

/// A parity game arena on Spoiler's automaton `A` and Duplicator's
/// automaton `A'`.
#[derive(Debug, Clone)]
pub struct GameGraph {
    flavor: Flavor,
    direct_view: bool,
    symbols: SymbolTable,
    pub(crate) spoiler: IndexedAutomaton,
    pub(crate) duplicator: IndexedAutomaton,
    keys: Vec<Key>,
    priority: Vec<u8>,
    alive: Vec<bool>,
    succ: Vec<Vec<Edge>>,
    pred: Vec<Vec<Edge>>,
    index: HashMap<Key, VertexId>,
}

/// Builds the game graph of the given flavor for Spoiler playing on
/// `spoiler` and Duplicator on `duplicator`.
pub fn build_game_graph(
    spoiler: &BuchiAutomaton,
    duplicator: &BuchiAutomaton,
    flavor: Flavor,
) -> Result<GameGraph, GraphError> {
    GameGraph::build(spoiler, duplicator, flavor)
}

/// Adds Spoiler moves for the transitions `t` (the graph of `add(A, T)`).
pub fn add_transitions_spoiler(g: &mut GameGraph, t: &[Transition]) -> Result<GraphDelta, GraphError> {
    g.add_transitions_spoiler(t)
}

/// Removes Duplicator moves that use the transitions `t` (the graph of
/// `rem(A', T)`).
pub fn remove_transitions_duplicator(
    g: &mut GameGraph,
    t: &[Transition],
) -> Result<GraphDelta, GraphError> {
    g.remove_transitions_duplicator(t)
}

/// Removes Spoiler moves that use the transitions `t`. V0 vertices left
/// without predecessors stay until [`purge_unreachable_v0`].
pub fn remove_transitions_spoiler(g: &mut GameGraph, t: &[Transition]) -> Result<GraphDelta, GraphError> {
    g.remove_transitions_spoiler(t)
}

/// Deletes every V0 vertex that has no predecessor.
pub fn purge_unreachable_v0(g: &mut GameGraph) -> GraphDelta {
    g.purge_unreachable_v0()
}

fn bool_priority_fair(q_final: bool, q2_final: bool) -> u8 {
    if q2_final {
        0
    } else if q_final {
        1
    } else {
        2
    }
}

impl GameGraph {
    fn build(spoiler: &BuchiAutomaton, duplicator: &BuchiAutomaton, flavor: Flavor) -> Result<Self, GraphError> {
        if let Some(q) = spoiler.dead_ends().into_iter().next() {
            return Err(GraphError::DeadEnd(q));
        }
        let symbols = SymbolTable::new(spoiler.alphabet().iter().chain(duplicator.alphabet()));
        let mut g = GameGraph {
            flavor,
            direct_view: flavor == Flavor::Direct,
            spoiler: spoiler.indexed(&symbols),
            duplicator: duplicator.indexed(&symbols),
            symbols,
            keys: Vec::new(),
            priority: Vec::new(),
            alive: Vec::new(),
            succ: Vec::new(),
            pred: Vec::new(),
            index: HashMap::new(),
        };
        match flavor {
            Flavor::Direct | Flavor::Fair => g.build_fair(),
            Flavor::Delayed => g.build_delayed(),
        }
        Ok(g)
    }

    fn push_vertex(&mut self, key: Key, priority: u8) -> VertexId {
        let id = self.keys.len() as VertexId;
        self.keys.push(key);
        self.priority.push(priority);
        self.alive.push(true);
        self.succ.push(Vec::new());
        self.pred.push(Vec::new());
        self.index.insert(key, id);
        id
    }

    fn push_edge(&mut self, from: VertexId, to: VertexId, excluded: bool) {
        self.succ[from as usize].push(Edge { other: to, excluded });
        self.pred[to as usize].push(Edge {
            other: from,
            excluded,
        });
    }

    fn v1_key(q: u32, q2: u32) -> Key {
        Key {
            spoiler: q,
            duplicator: q2,
            symbol: None,
            bit: None,
        }
    }

    fn v0_key(q: u32, q2: u32, a: u32) -> Key {
        Key {
            spoiler: q,
            duplicator: q2,
            symbol: Some(a),
            bit: None,
        }
    }

    fn spoiler_excluded(&self, q: u32, q2: u32) -> bool {
        self.spoiler.is_final[q as usize] && !self.duplicator.is_final[q2 as usize]
    }

    fn build_fair(&mut self) {
        let n = self.spoiler.len() as u32;
        let m = self.duplicator.len() as u32;
        for q in 0..n {
            for q2 in 0..m {
                let p = bool_priority_fair(self.spoiler.is_final[q as usize], self.duplicator.is_final[q2 as usize]);
                self.push_vertex(Self::v1_key(q, q2), p);
            }
        }
        for q in 0..n {
            for a in self.incoming_symbols(q) {
                for q2 in 0..m {
                    self.create_fair_v0(q, q2, a, None);
                }
            }
        }
        for q in 0..n {
            for (a, dst) in self.spoiler.out[q as usize].clone() {
                for q2 in 0..m {
                    let from = self.index[&Self::v1_key(q, q2)];
                    let to = self.index[&Self::v0_key(dst, q2, a)];
                    let excluded = self.spoiler_excluded(q, q2);
                    self.push_edge(from, to, excluded);
                }
            }
        }
    }

    /// Creates V0 vertex `(q, q2, a)` with its Duplicator moves.
    fn create_fair_v0(&mut self, q: u32, q2: u32, a: u32, log: Option<&mut Vec<Op>>) -> VertexId {
        let id = self.push_vertex(Self::v0_key(q, q2, a), 2);
        let targets: Vec<u32> = self.duplicator.successors_on(q2, a).collect();
        for t in targets {
            let to = self.index[&Self::v1_key(q, t)];
            let excluded = self.spoiler_excluded(q, t);
            self.push_edge(id, to, excluded);
        }
        if let Some(log) = log {
            log.push(Op::AddVertex(id));
        }
        id
    }

    fn incoming_symbols(&self, q: u32) -> Vec<u32> {
        let mut syms: Vec<u32> = self.spoiler.inc[q as usize].iter().map(|&(s, _)| s).collect();
        syms.dedup();
        syms
    }

    fn build_delayed(&mut self) {
        let n = self.spoiler.len() as u32;
        let m = self.duplicator.len() as u32;
        let key = |b: bool, q: u32, q2: u32, a: Option<u32>| Key {
            spoiler: q,
            duplicator: q2,
            symbol: a,
            bit: Some(b),
        };
        for q in 0..n {
            for q2 in 0..m {
                for b in [false, true] {
                    if b && self.duplicator.is_final[q2 as usize] {
                        continue;
                    }
                    self.push_vertex(key(b, q, q2, None), b as u8);
                }
            }
        }
        for q in 0..n {
            let q_final = self.spoiler.is_final[q as usize];
            for a in self.incoming_symbols(q) {
                for q2 in 0..m {
                    for b in [false, true] {
                        // a Spoiler move into a final state always sets the bit
                        if !b && q_final {
                            continue;
                        }
                        self.push_vertex(key(b, q, q2, Some(a)), 2);
                    }
                }
            }
        }
        for id in 0..self.keys.len() {
            let k = self.keys[id];
            let b = k.bit.unwrap();
            match k.symbol {
                None => {
                    for (a, dst) in self.spoiler.out[k.spoiler as usize].clone() {
                        let nb = b || self.spoiler.is_final[dst as usize];
                        let to = self.index[&key(nb, dst, k.duplicator, Some(a))];
                        self.push_edge(id as VertexId, to, false);
                    }
                }
                Some(a) => {
                    let targets: Vec<u32> = self.duplicator.successors_on(k.duplicator, a).collect();
                    for t in targets {
                        let nb = b && !self.duplicator.is_final[t as usize];
                        let to = self.index[&key(nb, k.spoiler, t, None)];
                        self.push_edge(id as VertexId, to, false);
                    }
                }
            }
        }
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    pub(crate) fn direct_view(&self) -> bool {
        self.direct_view
    }

    /// Switches a fair graph between its own edges and priorities and those
    /// of the direct graph on the same automata. Constant time.
    pub(crate) fn set_direct_view(&mut self, on: bool) {
        debug_assert!(self.flavor == Flavor::Fair || on);
        self.direct_view = on;
    }

    /// Number of allocated vertex ids, including purged ones.
    pub fn capacity(&self) -> usize {
        self.keys.len()
    }

    pub fn is_alive(&self, v: VertexId) -> bool {
        self.alive[v as usize]
    }

    pub fn vertex_ids(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.keys.len() as VertexId).filter(|&v| self.alive[v as usize])
    }

    pub fn num_vertices(&self) -> usize {
        self.alive.iter().filter(|&&a| a).count()
    }

    pub fn num_v0(&self) -> usize {
        self.vertex_ids().filter(|&v| self.owner(v) == Owner::Duplicator).count()
    }

    pub fn num_v1(&self) -> usize {
        self.vertex_ids().filter(|&v| self.owner(v) == Owner::Spoiler).count()
    }

    pub fn num_edges(&self) -> usize {
        self.vertex_ids().map(|v| self.successors(v).count()).sum()
    }

    /// Number of priority-1 vertices, the `n` of the progress measure.
    pub fn num_priority_one(&self) -> usize {
        self.vertex_ids().filter(|&v| self.priority(v) == 1).count()
    }

    pub fn owner(&self, v: VertexId) -> Owner {
        if self.keys[v as usize].symbol.is_some() {
            Owner::Duplicator
        } else {
            Owner::Spoiler
        }
    }

    pub fn priority(&self, v: VertexId) -> u8 {
        if self.direct_view {
            0
        } else {
            self.priority[v as usize]
        }
    }

    #[inline]
    fn visible(&self, e: &Edge) -> bool {
        !(self.direct_view && e.excluded)
    }

    pub fn successors(&self, v: VertexId) -> impl Iterator<Item = VertexId> + '_ {
        self.succ[v as usize]
            .iter()
            .filter(move |e| self.visible(e))
            .map(|e| e.other)
    }

    pub fn predecessors(&self, v: VertexId) -> impl Iterator<Item = VertexId> + '_ {
        self.pred[v as usize]
            .iter()
            .filter(move |e| self.visible(e))
            .map(|e| e.other)
    }

    #[cfg(test)]
    pub(crate) fn key(&self, v: VertexId) -> Key {
        self.keys[v as usize]
    }

    pub fn vertex(&self, v: VertexId) -> Vertex {
        let k = self.keys[v as usize];
        let spoiler = self.spoiler.names[k.spoiler as usize].clone();
        let duplicator = self.duplicator.names[k.duplicator as usize].clone();
        match k.symbol {
            None => Vertex::SpoilerTurn {
                spoiler,
                duplicator,
                bit: k.bit,
            },
            Some(a) => Vertex::DuplicatorTurn {
                spoiler,
                duplicator,
                symbol: self.symbols.name(a).to_string(),
                bit: k.bit,
            },
        }
    }

    pub fn vertex_name(&self, v: VertexId) -> String {
        self.vertex(v).to_string()
    }

    /// Looks up a live vertex by its structural description.
    pub fn find(&self, vertex: &Vertex) -> Option<VertexId> {
        let key = match vertex {
            Vertex::SpoilerTurn {
                spoiler,
                duplicator,
                bit,
            } => Key {
                spoiler: *self.spoiler.index.get(spoiler)?,
                duplicator: *self.duplicator.index.get(duplicator)?,
                symbol: None,
                bit: *bit,
            },
            Vertex::DuplicatorTurn {
                spoiler,
                duplicator,
                symbol,
                bit,
            } => Key {
                spoiler: *self.spoiler.index.get(spoiler)?,
                duplicator: *self.duplicator.index.get(duplicator)?,
                symbol: Some(self.symbols.get(symbol)?),
                bit: *bit,
            },
        };
        self.index.get(&key).copied().filter(|&v| self.alive[v as usize])
    }

    /// The vertex whose measure decides `q ⪯ q2`. For the delayed flavor
    /// the bit starts set iff `q` is final and `q2` is not.
    pub fn relation_vertex(&self, q: &str, q2: &str) -> Option<VertexId> {
        let qi = *self.spoiler.index.get(q)?;
        let q2i = *self.duplicator.index.get(q2)?;
        self.relation_vertex_idx(qi, q2i)
    }

    pub(crate) fn relation_vertex_idx(&self, q: u32, q2: u32) -> Option<VertexId> {
        let bit = match self.flavor {
            Flavor::Delayed => Some(self.spoiler_excluded(q, q2)),
            _ => None,
        };
        self.index
            .get(&Key {
                spoiler: q,
                duplicator: q2,
                symbol: None,
                bit,
            })
            .copied()
    }

    pub fn spoiler_states(&self) -> &[String] {
        &self.spoiler.names
    }

    pub fn duplicator_states(&self) -> &[String] {
        &self.duplicator.names
    }

    /// Deterministic adjacency listing, one live vertex per line:
    /// `vertexid priority -> succ1 succ2 …`, sorted by vertex id.
    pub fn debug_dump(&self) -> String {
        let mut lines: Vec<String> = self
            .vertex_ids()
            .map(|v| {
                let mut succs: Vec<String> = self.successors(v).map(|w| self.vertex_name(w)).collect();
                succs.sort();
                let mut line = format!("{} {} ->", self.vertex_name(v), self.priority(v));
                for s in succs {
                    line.push(' ');
                    line.push_str(&s);
                }
                line
            })
            .collect();
        lines.sort();
        let mut out = lines.join("\n");
        out.push('\n');
        out
    }

    fn require_fair(&self) -> Result<(), GraphError> {
        if self.flavor == Flavor::Fair {
            Ok(())
        } else {
            Err(GraphError::NotFair(self.flavor))
        }
    }

    fn encode(&self, aut: &IndexedAutomaton, t: &Transition) -> Result<(u32, u32, u32), GraphError> {
        let foreign = || GraphError::Foreign(t.clone());
        Ok((
            *aut.index.get(&t.src).ok_or_else(foreign)?,
            self.symbols.get(&t.symbol).ok_or_else(foreign)?,
            *aut.index.get(&t.dst).ok_or_else(foreign)?,
        ))
    }

    fn add_transitions_spoiler(&mut self, ts: &[Transition]) -> Result<GraphDelta, GraphError> {
        self.require_fair()?;
        let mut encoded = Vec::with_capacity(ts.len());
        for t in ts {
            let e = self.encode(&self.spoiler, t)?;
            if self.spoiler.has(e.0, e.1, e.2) || encoded.contains(&e) {
                return Err(GraphError::Overlap(t.clone()));
            }
            encoded.push(e);
        }
        let mut ops = Vec::new();
        let m = self.duplicator.len() as u32;
        for (src, a, dst) in encoded {
            if !self.spoiler.has_incoming_symbol(dst, a) {
                for q2 in 0..m {
                    let id = self.create_fair_v0(dst, q2, a, Some(&mut ops));
                    for e in self.succ[id as usize].clone() {
                        ops.push(Op::AddEdge(id, e.other));
                    }
                }
            }
            self.spoiler.insert(src, a, dst);
            ops.push(Op::SpoilerInsert(src, a, dst));
            for q2 in 0..m {
                let from = self.index[&Self::v1_key(src, q2)];
                let to = self.index[&Self::v0_key(dst, q2, a)];
                let excluded = self.spoiler_excluded(src, q2);
                self.push_edge(from, to, excluded);
                ops.push(Op::AddEdge(from, to));
            }
        }
        Ok(GraphDelta {
            ops,
            ..Default::default()
        })
    }

    fn remove_edge(&mut self, from: VertexId, to: VertexId, ops: &mut Vec<Op>) {
        let succ_pos = self.succ[from as usize]
            .iter()
            .position(|e| e.other == to)
            .expect("edge present");
        let excluded = self.succ[from as usize].remove(succ_pos).excluded;
        let pred_pos = self.pred[to as usize]
            .iter()
            .position(|e| e.other == from)
            .expect("edge present");
        self.pred[to as usize].remove(pred_pos);
        ops.push(Op::RemoveEdge {
            from,
            to,
            excluded,
            succ_pos,
            pred_pos,
        });
    }

    fn remove_transitions_duplicator(&mut self, ts: &[Transition]) -> Result<GraphDelta, GraphError> {
        self.require_fair()?;
        let mut encoded = Vec::with_capacity(ts.len());
        for t in ts {
            let e = self.encode(&self.duplicator, t)?;
            if !self.duplicator.has(e.0, e.1, e.2) || encoded.contains(&e) {
                return Err(GraphError::Missing(t.clone()));
            }
            encoded.push(e);
        }
        let mut ops = Vec::new();
        let n = self.spoiler.len() as u32;
        for (src, a, dst) in encoded {
            for q in 0..n {
                let Some(&from) = self.index.get(&Self::v0_key(q, src, a)) else {
                    continue;
                };
                if !self.alive[from as usize] {
                    continue;
                }
                let to = self.index[&Self::v1_key(q, dst)];
                self.remove_edge(from, to, &mut ops);
            }
            self.duplicator.remove(src, a, dst);
            ops.push(Op::DuplicatorRemove(src, a, dst));
        }
        Ok(GraphDelta {
            ops,
            ..Default::default()
        })
    }

    fn remove_transitions_spoiler(&mut self, ts: &[Transition]) -> Result<GraphDelta, GraphError> {
        self.require_fair()?;
        let mut encoded = Vec::with_capacity(ts.len());
        let mut out_degree: HashMap<u32, usize> = HashMap::new();
        for t in ts {
            let e = self.encode(&self.spoiler, t)?;
            if !self.spoiler.has(e.0, e.1, e.2) || encoded.contains(&e) {
                return Err(GraphError::Missing(t.clone()));
            }
            let d = out_degree
                .entry(e.0)
                .or_insert_with(|| self.spoiler.out[e.0 as usize].len());
            *d -= 1;
            if *d == 0 {
                return Err(GraphError::WouldDeadEnd(t.clone()));
            }
            encoded.push(e);
        }
        let mut ops = Vec::new();
        let m = self.duplicator.len() as u32;
        for (src, a, dst) in encoded {
            for q2 in 0..m {
                let from = self.index[&Self::v1_key(src, q2)];
                let to = self.index[&Self::v0_key(dst, q2, a)];
                self.remove_edge(from, to, &mut ops);
            }
            self.spoiler.remove(src, a, dst);
            ops.push(Op::SpoilerRemove(src, a, dst));
        }
        Ok(GraphDelta {
            ops,
            ..Default::default()
        })
    }

    fn purge_unreachable_v0(&mut self) -> GraphDelta {
        let mut ops = Vec::new();
        for v in 0..self.keys.len() as VertexId {
            if !self.alive[v as usize] || self.owner(v) != Owner::Duplicator {
                continue;
            }
            if self.predecessors(v).next().is_some() {
                continue;
            }
            while let Some(e) = self.succ[v as usize].last().copied() {
                self.remove_edge(v, e.other, &mut ops);
            }
            // hidden in-edges of a fair graph in direct view keep the vertex
            // reachable once the view is switched back
            if !self.pred[v as usize].is_empty() {
                continue;
            }
            self.alive[v as usize] = false;
            ops.push(Op::Kill(v));
        }
        GraphDelta {
            ops,
            ..Default::default()
        }
    }

    /// Reverts `delta`. Deltas must be undone in reverse order of creation.
    /// Solver entries saved in the delta are restored by the solver, not here.
    pub fn undo(&mut self, delta: &GraphDelta) {
        for op in delta.ops.iter().rev() {
            match *op {
                Op::AddEdge(from, to) => {
                    let p = self.succ[from as usize]
                        .iter()
                        .rposition(|e| e.other == to)
                        .expect("edge present");
                    self.succ[from as usize].remove(p);
                    let p = self.pred[to as usize]
                        .iter()
                        .rposition(|e| e.other == from)
                        .expect("edge present");
                    self.pred[to as usize].remove(p);
                }
                Op::RemoveEdge {
                    from,
                    to,
                    excluded,
                    succ_pos,
                    pred_pos,
                } => {
                    self.succ[from as usize].insert(succ_pos, Edge { other: to, excluded });
                    self.pred[to as usize].insert(
                        pred_pos,
                        Edge {
                            other: from,
                            excluded,
                        },
                    );
                }
                Op::AddVertex(v) => {
                    debug_assert_eq!(v as usize + 1, self.keys.len());
                    let key = self.keys.pop().unwrap();
                    self.index.remove(&key);
                    self.priority.pop();
                    self.alive.pop();
                    self.succ.pop();
                    self.pred.pop();
                }
                Op::Kill(v) => self.alive[v as usize] = true,
                Op::SpoilerInsert(s, a, d) => {
                    self.spoiler.remove(s, a, d);
                }
                Op::SpoilerRemove(s, a, d) => {
                    self.spoiler.insert(s, a, d);
                }
                Op::DuplicatorRemove(s, a, d) => {
                    self.duplicator.insert(s, a, d);
                }
            }
        }
    }

    /// Structural equality including internal ids and adjacency order.
    pub fn identical(&self, other: &GameGraph) -> bool {
        self.flavor == other.flavor
            && self.direct_view == other.direct_view
            && self.symbols == other.symbols
            && self.spoiler == other.spoiler
            && self.duplicator == other.duplicator
            && self.keys == other.keys
            && self.priority == other.priority
            && self.alive == other.alive
            && self.succ == other.succ
            && self.pred == other.pred
            && self.index == other.index
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::parse_ba;

    const TWO_STATE: &str = "q0\na,q0->q0\nb,q0->q1\nb,q1->q1\na,q1->q0\nq0";

    fn t(s: &str, a: &str, d: &str) -> Transition {
        Transition::new(s, a, d)
    }

    #[test]
    fn fair_graph_of_two_state_example() {
        let a = parse_ba(TWO_STATE).unwrap();
        let g = build_game_graph(&a, &a, Flavor::Fair).unwrap();
        assert_eq!(g.num_v1(), 4);
        assert_eq!(g.num_v0(), 4);
        assert!(g.find(&Vertex::duplicator_turn("q1", "q0", "a")).is_none());
        let v01 = g.find(&Vertex::spoiler_turn("q0", "q1")).unwrap();
        assert_eq!(g.priority(v01), 1);
        let v11 = g.find(&Vertex::spoiler_turn("q1", "q1")).unwrap();
        assert_eq!(g.priority(v11), 2);
        let v00 = g.find(&Vertex::spoiler_turn("q0", "q0")).unwrap();
        assert_eq!(g.priority(v00), 0);
        assert_eq!(g.num_priority_one(), 1);
    }

    #[test]
    fn single_self_loop() {
        let a = parse_ba("q\na,q->q\n").unwrap();
        let g = build_game_graph(&a, &a, Flavor::Fair).unwrap();
        assert_eq!(g.num_vertices(), 2);
        assert_eq!(g.num_edges(), 2);
        assert_eq!(g.debug_dump(), "(q,q) 2 -> (q,q,a)\n(q,q,a) 2 -> (q,q)\n");
    }

    #[test]
    fn dead_end_is_rejected() {
        let a = parse_ba("q0\na,q0->q1\n").unwrap();
        assert_eq!(
            build_game_graph(&a, &a, Flavor::Fair).unwrap_err(),
            GraphError::DeadEnd("q1".into())
        );
    }

    #[test]
    fn direct_view_matches_direct_build() {
        let a = parse_ba(TWO_STATE).unwrap();
        let mut fair = build_game_graph(&a, &a, Flavor::Fair).unwrap();
        let direct = build_game_graph(&a, &a, Flavor::Direct).unwrap();
        fair.set_direct_view(true);
        assert_eq!(fair.debug_dump(), direct.debug_dump());
        assert!(direct.num_edges() < fair.num_edges() || fair.num_edges() == direct.num_edges());
    }

    #[test]
    fn delayed_bits() {
        let a = parse_ba(TWO_STATE).unwrap();
        let g = build_game_graph(&a, &a, Flavor::Delayed).unwrap();
        // (1,q,q0) is forbidden since q0 is final
        assert_eq!(g.num_v1(), 6);
        let start = g.relation_vertex("q0", "q1").unwrap();
        assert_eq!(g.key(start).bit, Some(true));
        assert_eq!(g.priority(start), 1);
        let start = g.relation_vertex("q1", "q0").unwrap();
        assert_eq!(g.key(start).bit, Some(false));
    }

    #[test]
    fn add_then_undo_is_identity() {
        let a = parse_ba(TWO_STATE).unwrap();
        let mut g = build_game_graph(&a, &a, Flavor::Fair).unwrap();
        let before = g.clone();
        let ts = [t("q0", "a", "q1"), t("q1", "a", "q1"), t("q0", "b", "q0"), t("q1", "b", "q0")];
        let d = add_transitions_spoiler(&mut g, &ts).unwrap();
        assert!(!d.added_vertices().is_empty());
        let expected = build_game_graph(&a.with_transitions(ts.iter().cloned()), &a, Flavor::Fair).unwrap();
        assert_eq!(g.debug_dump(), expected.debug_dump());
        g.undo(&d);
        assert!(g.identical(&before));
    }

    #[test]
    fn add_rejects_overlap_and_wrong_flavor() {
        let a = parse_ba(TWO_STATE).unwrap();
        let mut g = build_game_graph(&a, &a, Flavor::Fair).unwrap();
        assert!(matches!(
            add_transitions_spoiler(&mut g, &[t("q0", "a", "q0")]),
            Err(GraphError::Overlap(_))
        ));
        let mut d = build_game_graph(&a, &a, Flavor::Direct).unwrap();
        assert_eq!(
            add_transitions_spoiler(&mut d, &[t("q0", "a", "q1")]).unwrap_err(),
            GraphError::NotFair(Flavor::Direct)
        );
        let d = add_transitions_spoiler(&mut g, &[]).unwrap();
        assert!(d.is_empty());
    }

    #[test]
    fn spoiler_removal_then_purge() {
        // q2 is entered by `b` only from q1; dropping that move isolates the
        // V0 vertices (q2, x, b)
        let a = parse_ba("q0\na,q0->q1\nb,q1->q2\na,q1->q0\na,q2->q0\nq0").unwrap();
        let mut g = build_game_graph(&a, &a, Flavor::Fair).unwrap();
        let before = g.clone();
        let d1 = remove_transitions_spoiler(&mut g, &[t("q1", "b", "q2")]).unwrap();
        let d2 = purge_unreachable_v0(&mut g);
        assert_eq!(d2.purged_vertices().len(), 3);
        assert!(g.find(&Vertex::duplicator_turn("q2", "q0", "b")).is_none());
        let rebuilt =
            build_game_graph(&a.without_transitions([&t("q1", "b", "q2")]), &a, Flavor::Fair).unwrap();
        assert_eq!(g.debug_dump(), rebuilt.debug_dump());
        assert!(purge_unreachable_v0(&mut g).is_empty());
        g.undo(&d2);
        g.undo(&d1);
        assert!(g.identical(&before));
    }
}
