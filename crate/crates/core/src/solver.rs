//! Progress measures for three-priority parity games.
//!
//! [`solve`] is the working-list algorithm with cached best-neighbour values
//! `B` and counters `C`; [`solve_naive`] is the plain lifting fixpoint used
//! as an oracle. Both compute the least simultaneous fixed point of
//! [`lift`].
//!
//! At a priority-0 vertex every finite successor measure is equivalent, so
//! successors are read as `0` when finite and `∞` otherwise. Dead ends are
//! lost by the player to move and evaluate to `∞`.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};
use std::fmt;

use petgraph::algo::kosaraju_scc;
use petgraph::graph::DiGraph;
use thiserror::Error;

use crate::game_graph::{GameGraph, GraphDelta, Owner, SavedEntry, VertexId};

/// A progress measure value in `{0, …, n} ∪ {∞}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Measure {
    Finite(u32),
    Infinite,
}

impl Measure {
    pub const ZERO: Measure = Measure::Finite(0);

    pub fn is_infinite(self) -> bool {
        self == Measure::Infinite
    }

    pub fn is_finite(self) -> bool {
        !self.is_infinite()
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Measure::Finite(x) => write!(f, "{x}"),
            Measure::Infinite => f.write_str("inf"),
        }
    }
}

/// `incr_i(x)` with `n` priority-1 vertices.
pub fn incr(i: u8, x: Measure, n: u32) -> Measure {
    match (i, x) {
        (_, Measure::Infinite) => Measure::Infinite,
        (1, Measure::Finite(v)) if v < n => Measure::Finite(v + 1),
        (1, Measure::Finite(_)) => Measure::Infinite,
        (0, _) => Measure::ZERO,
        _ => x,
    }
}

#[inline]
fn view(p: u8, m: Measure) -> Measure {
    if p == 0 && m.is_finite() {
        Measure::ZERO
    } else {
        m
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SolverError {
    #[error("vertex {0} is a dead end")]
    DeadEnd(String),
    #[error("measure covers {measure} vertices but the graph has {graph}")]
    Universe { measure: usize, graph: usize },
    #[error("vertex {0} is not part of the graph")]
    UnknownVertex(VertexId),
}

/// Per-vertex `mu`, `B` and `C`, indexed by [`VertexId`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProgressMeasure {
    n: u32,
    mu: Vec<Measure>,
    best: Vec<Measure>,
    count: Vec<u32>,
}

impl ProgressMeasure {
    /// The all-zero measure on `g`.
    pub fn zero(g: &GameGraph) -> Self {
        let len = g.capacity();
        let mut pm = ProgressMeasure {
            n: g.num_priority_one() as u32,
            mu: vec![Measure::ZERO; len],
            best: vec![Measure::ZERO; len],
            count: vec![0; len],
        };
        for v in g.vertex_ids() {
            pm.count[v as usize] = g.successors(v).count() as u32;
        }
        pm
    }

    /// Number of priority-1 vertices; `n + 1` is the infinity bound.
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn infinity_bound(&self) -> u32 {
        self.n + 1
    }

    pub fn len(&self) -> usize {
        self.mu.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mu.is_empty()
    }

    pub fn mu(&self, v: VertexId) -> Measure {
        self.mu[v as usize]
    }

    pub fn best(&self, v: VertexId) -> Measure {
        self.best[v as usize]
    }

    pub fn count(&self, v: VertexId) -> u32 {
        self.count[v as usize]
    }

    pub fn values(&self) -> &[Measure] {
        &self.mu
    }

    pub fn set_mu(&mut self, v: VertexId, m: Measure) {
        self.mu[v as usize] = m;
    }

    /// Fills `B` and `C` from the current `mu`.
    pub fn refresh_caches(&mut self, g: &GameGraph) {
        for v in g.vertex_ids() {
            let (b, c) = best_and_count(g, v, |_, w| self.mu[w as usize]);
            self.best[v as usize] = b;
            self.count[v as usize] = c;
        }
    }

    /// True if both measures agree on which live vertices of `g` are won
    /// by Duplicator. Vertices beyond either measure are ignored.
    pub fn same_winning_set(&self, other: &ProgressMeasure, g: &GameGraph) -> bool {
        let len = self.len().min(other.len());
        g.vertex_ids()
            .take_while(|&v| (v as usize) < len)
            .all(|v| self.mu(v).is_finite() == other.mu(v).is_finite())
    }

    /// Pointwise `self ≥ other` on their common vertices.
    pub fn dominates(&self, other: &ProgressMeasure, g: &GameGraph) -> bool {
        let len = self.len().min(other.len());
        g.vertex_ids()
            .take_while(|&v| (v as usize) < len)
            .all(|v| self.mu(v) >= other.mu(v))
    }

    /// Pointwise equality of `mu` on the live vertices of `g`.
    pub fn same_values(&self, other: &ProgressMeasure, g: &GameGraph) -> bool {
        self.len() == other.len() && g.vertex_ids().all(|v| self.mu(v) == other.mu(v))
    }
}

/// Best neighbour value and its multiplicity, reading successor measures
/// through `read(v, w)`. Dead ends give `(∞, 0)`.
fn best_and_count(
    g: &GameGraph,
    v: VertexId,
    read: impl Fn(VertexId, VertexId) -> Measure,
) -> (Measure, u32) {
    let p = g.priority(v);
    let duplicator = g.owner(v) == Owner::Duplicator;
    let mut best: Option<Measure> = None;
    let mut count = 0;
    for w in g.successors(v) {
        let m = view(p, read(v, w));
        match best {
            None => {
                best = Some(m);
                count = 1;
            }
            Some(b) if b == m => count += 1,
            Some(b) if (duplicator && m < b) || (!duplicator && m > b) => {
                best = Some(m);
                count = 1;
            }
            _ => {}
        }
    }
    match best {
        Some(b) => (b, count),
        None => (Measure::Infinite, 0),
    }
}

/// `best-nghb-ms(mu, v)`: the minimum (Duplicator) or maximum (Spoiler)
/// successor measure. At priority 0 successors are read as `0` or `∞`.
pub fn best_nghb_ms(pm: &ProgressMeasure, g: &GameGraph, v: VertexId) -> Result<Measure, SolverError> {
    check_vertex(pm, g, v)?;
    match best_and_count(g, v, |_, w| pm.mu(w)) {
        (_, 0) => Err(SolverError::DeadEnd(g.vertex_name(v))),
        (b, _) => Ok(b),
    }
}

/// `nghb-cnt(mu, v)`: how many successors attain `best-nghb-ms(mu, v)`.
pub fn nghb_cnt(pm: &ProgressMeasure, g: &GameGraph, v: VertexId) -> Result<u32, SolverError> {
    check_vertex(pm, g, v)?;
    match best_and_count(g, v, |_, w| pm.mu(w)) {
        (_, 0) => Err(SolverError::DeadEnd(g.vertex_name(v))),
        (_, c) => Ok(c),
    }
}

fn check_vertex(pm: &ProgressMeasure, g: &GameGraph, v: VertexId) -> Result<(), SolverError> {
    if (v as usize) >= g.capacity() || !g.is_alive(v) {
        return Err(SolverError::UnknownVertex(v));
    }
    if pm.len() != g.capacity() {
        return Err(SolverError::Universe {
            measure: pm.len(),
            graph: g.capacity(),
        });
    }
    Ok(())
}

/// `lift_u(mu)`: `mu` with `mu(u) := incr_p(u)(best-nghb-ms(mu, u))`.
pub fn lift(pm: &ProgressMeasure, g: &GameGraph, u: VertexId) -> ProgressMeasure {
    let mut out = pm.clone();
    out.mu[u as usize] = lifted(pm, g, u);
    out
}

fn lifted(pm: &ProgressMeasure, g: &GameGraph, u: VertexId) -> Measure {
    let (b, _) = best_and_count(g, u, |_, w| pm.mu(w));
    incr(g.priority(u), b, pm.n)
}

/// Plain fixpoint iteration: sweep all vertices, lifting every vertex whose
/// lift strictly increases its measure, until nothing changes.
pub fn solve_naive(g: &GameGraph) -> ProgressMeasure {
    let mut pm = ProgressMeasure::zero(g);
    loop {
        let mut changed = false;
        for v in g.vertex_ids() {
            let m = lifted(&pm, g, v);
            if m > pm.mu(v) {
                pm.mu[v as usize] = m;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    pm.refresh_caches(g);
    pm
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WorkOrder {
    #[default]
    Fifo,
    /// Pop the vertex with the largest current measure first.
    MaxMeasureFirst,
}

#[derive(Debug, Clone, Copy)]
pub struct SolverConfig<'a> {
    /// Solve strongly connected components one at a time, sinks first, each
    /// with its own bound.
    pub use_scc_bounds: bool,
    pub work_order: WorkOrder,
    /// Stop with [`Outcome::Diverged`] once a vertex finite here reaches `∞`.
    pub reference_measure: Option<&'a ProgressMeasure>,
    /// Start dead ends at `∞` instead of lifting them there.
    pub smart_init: bool,
    /// Print `vertexid old_mu new_mu B C` for each pop to stderr.
    pub trace: bool,
}

impl Default for SolverConfig<'_> {
    fn default() -> Self {
        SolverConfig {
            use_scc_bounds: false,
            work_order: WorkOrder::Fifo,
            reference_measure: None,
            smart_init: true,
            trace: trace_from_env(),
        }
    }
}

/// True when `OMEGA_REDUCE_TRACE=1`.
pub fn trace_from_env() -> bool {
    std::env::var("OMEGA_REDUCE_TRACE").is_ok_and(|v| v == "1")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Converged,
    /// Aborted early: the winning set shrank relative to the reference.
    Diverged,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SolveStats {
    pub pops: u64,
    /// Largest number of times a single vertex entered the working list.
    pub max_entries: u32,
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub measure: ProgressMeasure,
    pub outcome: Outcome,
    pub stats: SolveStats,
}

enum WorkList {
    Fifo(VecDeque<VertexId>),
    Max(BinaryHeap<(Measure, Reverse<u64>, VertexId)>, u64),
}

impl WorkList {
    fn new(order: WorkOrder) -> Self {
        match order {
            WorkOrder::Fifo => WorkList::Fifo(VecDeque::new()),
            WorkOrder::MaxMeasureFirst => WorkList::Max(BinaryHeap::new(), 0),
        }
    }

    fn push(&mut self, v: VertexId, key: Measure) {
        match self {
            WorkList::Fifo(q) => q.push_back(v),
            WorkList::Max(h, seq) => {
                h.push((key, Reverse(*seq), v));
                *seq += 1;
            }
        }
    }

    fn pop(&mut self) -> Option<VertexId> {
        match self {
            WorkList::Fifo(q) => q.pop_front(),
            WorkList::Max(h, _) => h.pop().map(|(_, _, v)| v),
        }
    }
}

/// Where divergence is judged against.
enum Reference<'a> {
    None,
    Measure(&'a ProgressMeasure),
    /// In-place run: the prior values of vertices below this id.
    Prior(usize),
}

struct Engine<'a, 'g> {
    g: &'g GameGraph,
    pm: &'a mut ProgressMeasure,
    list: WorkList,
    in_list: Vec<bool>,
    entries: Vec<u32>,
    stats: SolveStats,
    trace: bool,
    reference: Reference<'a>,
    /// SCC id per vertex and the per-SCC bound, when solving by components.
    scc: Option<(Vec<u32>, Vec<u32>)>,
    saved: Option<(&'a mut Vec<SavedEntry>, Vec<bool>)>,
}

impl<'a, 'g> Engine<'a, 'g> {
    fn new(g: &'g GameGraph, pm: &'a mut ProgressMeasure, cfg: &SolverConfig<'a>) -> Self {
        let len = g.capacity();
        Engine {
            g,
            pm,
            list: WorkList::new(cfg.work_order),
            in_list: vec![false; len],
            entries: vec![0; len],
            stats: SolveStats::default(),
            trace: cfg.trace,
            reference: match cfg.reference_measure {
                Some(r) => Reference::Measure(r),
                None => Reference::None,
            },
            scc: None,
            saved: None,
        }
    }

    fn bound(&self, v: VertexId) -> u32 {
        match &self.scc {
            Some((comp, bounds)) => bounds[comp[v as usize] as usize],
            None => self.pm.n,
        }
    }

    fn read(&self, v: VertexId, w: VertexId) -> Measure {
        let m = self.pm.mu[w as usize];
        match &self.scc {
            Some((comp, _)) if comp[v as usize] != comp[w as usize] => view(0, m),
            _ => m,
        }
    }

    fn same_scc(&self, v: VertexId, w: VertexId) -> bool {
        match &self.scc {
            Some((comp, _)) => comp[v as usize] == comp[w as usize],
            None => true,
        }
    }

    fn save(&mut self, v: VertexId) {
        if let Some((log, seen)) = &mut self.saved {
            let i = v as usize;
            if i < seen.len() && !seen[i] {
                seen[i] = true;
                log.push(SavedEntry {
                    vertex: v,
                    mu: self.pm.mu[i],
                    best: self.pm.best[i],
                    count: self.pm.count[i],
                });
            }
        }
    }

    fn recompute(&mut self, v: VertexId) -> (Measure, u32) {
        let (b, c) = best_and_count(self.g, v, |v, w| self.read(v, w));
        self.save(v);
        self.pm.best[v as usize] = b;
        self.pm.count[v as usize] = c;
        (b, c)
    }

    fn push(&mut self, v: VertexId) {
        let i = v as usize;
        if !self.in_list[i] {
            self.in_list[i] = true;
            self.entries[i] += 1;
            self.list.push(v, self.pm.mu[i]);
        }
    }

    /// Recomputes `B`/`C` of `v` and queues it if its lift would raise it.
    fn seed(&mut self, v: VertexId) {
        let (b, _) = self.recompute(v);
        if incr(self.g.priority(v), b, self.bound(v)) > self.pm.mu[v as usize] {
            self.push(v);
        }
    }

    fn diverges(&self, v: VertexId, old: Measure) -> bool {
        match self.reference {
            Reference::None => false,
            Reference::Measure(r) => (v as usize) < r.len() && r.mu(v).is_finite(),
            Reference::Prior(len) => (v as usize) < len && old.is_finite(),
        }
    }

    fn run(&mut self) -> Outcome {
        let g = self.g;
        while let Some(v) = self.list.pop() {
            self.in_list[v as usize] = false;
            self.stats.pops += 1;
            let old = self.pm.mu[v as usize];
            let (b, c) = self.recompute(v);
            let new = old.max(incr(g.priority(v), b, self.bound(v)));
            if self.trace {
                eprintln!("{} {} {} {} {}", g.vertex_name(v), old, new, b, c);
            }
            if new == old {
                continue;
            }
            self.save(v);
            self.pm.mu[v as usize] = new;
            if new.is_infinite() && self.diverges(v, old) {
                return Outcome::Diverged;
            }
            for w in g.predecessors(v) {
                if self.in_list[w as usize] || !self.same_scc(v, w) || self.pm.mu[w as usize].is_infinite() {
                    continue;
                }
                let pw = g.priority(w);
                let (nv, ov) = (view(pw, new), view(pw, old));
                if nv == ov {
                    continue;
                }
                let bw = self.pm.best[w as usize];
                match g.owner(w) {
                    Owner::Spoiler => {
                        if nv > bw {
                            if incr(pw, nv, self.bound(w)) > self.pm.mu[w as usize] {
                                self.push(w);
                            } else {
                                self.save(w);
                                self.pm.best[w as usize] = nv;
                                self.pm.count[w as usize] = 1;
                            }
                        } else if nv == bw && ov < bw {
                            self.save(w);
                            self.pm.count[w as usize] += 1;
                        }
                    }
                    Owner::Duplicator => {
                        if ov == bw {
                            if self.pm.count[w as usize] > 1 {
                                self.save(w);
                                self.pm.count[w as usize] -= 1;
                            } else {
                                self.push(w);
                            }
                        }
                    }
                }
            }
        }
        Outcome::Converged
    }

    fn finish(mut self) -> SolveStats {
        self.stats.max_entries = self.entries.iter().copied().max().unwrap_or(0);
        self.stats
    }
}

fn initial_measure(g: &GameGraph, smart_init: bool) -> ProgressMeasure {
    let mut pm = ProgressMeasure::zero(g);
    if smart_init {
        for v in g.vertex_ids() {
            if g.successors(v).next().is_none() {
                pm.mu[v as usize] = Measure::Infinite;
            }
        }
    }
    pm
}

/// Computes the least simultaneous fixed point of all lift operators.
///
/// With `use_scc_bounds` the finite values are local to each component;
/// only the finite/infinite split is meaningful then.
pub fn solve(g: &GameGraph, cfg: &SolverConfig) -> Solution {
    let mut pm = initial_measure(g, cfg.smart_init);
    let (outcome, stats) = if cfg.use_scc_bounds {
        solve_by_components(g, &mut pm, cfg)
    } else {
        let mut engine = Engine::new(g, &mut pm, cfg);
        for v in g.vertex_ids() {
            engine.seed(v);
        }
        let outcome = engine.run();
        (outcome, engine.finish())
    };
    Solution {
        measure: pm,
        outcome,
        stats,
    }
}

fn solve_by_components(g: &GameGraph, pm: &mut ProgressMeasure, cfg: &SolverConfig) -> (Outcome, SolveStats) {
    let ids: Vec<VertexId> = g.vertex_ids().collect();
    let mut local = vec![u32::MAX; g.capacity()];
    for (i, &v) in ids.iter().enumerate() {
        local[v as usize] = i as u32;
    }
    let mut dg = DiGraph::<(), ()>::with_capacity(ids.len(), g.num_edges());
    for _ in &ids {
        dg.add_node(());
    }
    for &v in &ids {
        for w in g.successors(v) {
            dg.add_edge(local[v as usize].into(), local[w as usize].into(), ());
        }
    }
    let components = kosaraju_scc(&dg);
    let mut comp = vec![u32::MAX; g.capacity()];
    let mut bounds = Vec::with_capacity(components.len());
    for (c, members) in components.iter().enumerate() {
        let mut ones = 0;
        for m in members {
            let v = ids[m.index()];
            comp[v as usize] = c as u32;
            if g.priority(v) == 1 {
                ones += 1;
            }
        }
        bounds.push(ones);
    }
    let mut engine = Engine::new(g, pm, cfg);
    engine.scc = Some((comp, bounds));
    let mut outcome = Outcome::Converged;
    for members in &components {
        for m in members {
            engine.seed(ids[m.index()]);
        }
        outcome = engine.run();
        if outcome == Outcome::Diverged {
            break;
        }
    }
    (outcome, engine.finish())
}

/// Re-solves after `delta` was applied to `g`, starting from `prior`, the
/// fixed point before the change. Only vertices whose successors changed
/// are re-examined at first; everything else is reached by notification.
pub fn solve_incremental(
    g: &GameGraph,
    prior: &ProgressMeasure,
    delta: &GraphDelta,
    cfg: &SolverConfig,
) -> Result<Solution, SolverError> {
    let mut pm = prior.clone();
    let mut scratch = delta.clone();
    scratch.saved_solver_entries.clear();
    let (outcome, stats) = warm(g, &mut pm, &mut scratch, cfg, false)?;
    Ok(Solution {
        measure: pm,
        outcome,
        stats,
    })
}

/// In-place form of [`solve_incremental`]. Entries are snapshotted into
/// `delta` before they change, so [`restore_measure`] can roll back. With
/// `fast_detect` the run stops as soon as a previously won vertex is lost.
pub fn solve_incremental_in_place(
    g: &GameGraph,
    pm: &mut ProgressMeasure,
    delta: &mut GraphDelta,
    cfg: &SolverConfig,
    fast_detect: bool,
) -> Result<(Outcome, SolveStats), SolverError> {
    warm(g, pm, delta, cfg, fast_detect)
}

fn warm(
    g: &GameGraph,
    pm: &mut ProgressMeasure,
    delta: &mut GraphDelta,
    cfg: &SolverConfig,
    in_place_detect: bool,
) -> Result<(Outcome, SolveStats), SolverError> {
    let prior_len = pm.len();
    let created = g.capacity().saturating_sub(prior_len);
    if prior_len > g.capacity() || created != delta.added_vertices().len() {
        return Err(SolverError::Universe {
            measure: prior_len,
            graph: g.capacity(),
        });
    }
    delta.solver_len = Some(prior_len);
    let n = g.num_priority_one() as u32;
    if cfg.use_scc_bounds || n != pm.n {
        // component bounds and a changed n do not carry over; start afresh
        for v in 0..prior_len as VertexId {
            delta.saved_solver_entries.push(SavedEntry {
                vertex: v,
                mu: pm.mu(v),
                best: pm.best(v),
                count: pm.count(v),
            });
        }
        let prior = pm.clone();
        let c = SolverConfig {
            reference_measure: if in_place_detect { Some(&prior) } else { cfg.reference_measure },
            ..*cfg
        };
        let sol = solve(g, &c);
        *pm = sol.measure;
        return Ok((sol.outcome, sol.stats));
    }
    pm.mu.resize(g.capacity(), Measure::ZERO);
    pm.best.resize(g.capacity(), Measure::ZERO);
    pm.count.resize(g.capacity(), 0);
    for v in prior_len as VertexId..g.capacity() as VertexId {
        if cfg.smart_init && g.successors(v).next().is_none() {
            pm.mu[v as usize] = Measure::Infinite;
        }
    }
    let touched = delta.touched();
    let mut engine = Engine::new(g, pm, cfg);
    if in_place_detect {
        engine.reference = Reference::Prior(prior_len);
    }
    engine.saved = Some((&mut delta.saved_solver_entries, vec![false; prior_len]));
    for v in touched {
        if g.is_alive(v) {
            engine.seed(v);
        }
    }
    let outcome = engine.run();
    let stats = engine.finish();
    Ok((outcome, stats))
}

/// Rolls `pm` back to its state before the in-place solve recorded in
/// `delta`.
pub fn restore_measure(pm: &mut ProgressMeasure, delta: &GraphDelta) {
    for e in delta.saved_solver_entries.iter().rev() {
        let i = e.vertex as usize;
        pm.mu[i] = e.mu;
        pm.best[i] = e.best;
        pm.count[i] = e.count;
    }
    if let Some(len) = delta.solver_len {
        pm.mu.truncate(len);
        pm.best.truncate(len);
        pm.count.truncate(len);
    }
}
