//! Simulation relations and automaton reduction.
//!
//! The fair methods merge mutually fair-similar states and remove
//! transitions to fair-smaller siblings, checking every change by
//! re-solving a modified game. The direct and delayed methods merge the
//! equivalence classes of their relation without checks.

mod candidates;
mod relation;
mod session;

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use petgraph::unionfind::UnionFind;
use thiserror::Error;

use crate::automaton::{remove_dead_ends, remove_nonlive_states, remove_unreachable_states, BuchiAutomaton, Transition};
use crate::game_graph::{build_game_graph, purge_unreachable_v0, Flavor, GameGraph, GraphError};
use crate::solver::{solve, ProgressMeasure, SolverConfig, SolverError, WorkOrder};

pub use candidates::{apply_merge, candidate_merges, candidate_removals, keep_rule, merge_closure_transitions};
pub use relation::{compute_relation, extract_relation, fair_direct_prepass, SimulationRelation};
pub use session::{try_merge, try_remove, Attempt};

use candidates::has_bigger_sibling;
use relation::fair_direct_prepass_with;
use session::{probe_merge, probe_remove};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MinimizeError {
    #[error("automaton has dead ends and preprocessing is disabled")]
    DeadEnds,
    #[error("solver run was aborted; no relation available")]
    Diverged,
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Solver(#[from] SolverError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub enum Method {
    Fair,
    #[default]
    FairDirect,
    Direct,
    Delayed,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Fair, Method::FairDirect, Method::Direct, Method::Delayed];

    pub fn name(self) -> &'static str {
        match self {
            Method::Fair => "fair",
            Method::FairDirect => "fair-direct",
            Method::Direct => "direct",
            Method::Delayed => "delayed",
        }
    }

    fn is_fair(self) -> bool {
        matches!(self, Method::Fair | Method::FairDirect)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("unknown value `{0}`")]
pub struct UnknownName(pub String);

impl FromStr for Method {
    type Err = UnknownName;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "fair" => Ok(Method::Fair),
            "fair-direct" | "fair_direct" => Ok(Method::FairDirect),
            "direct" => Ok(Method::Direct),
            "delayed" => Ok(Method::Delayed),
            _ => Err(UnknownName(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Preprocess {
    None,
    #[default]
    DeadEnds,
    Nonlive,
}

impl FromStr for Preprocess {
    type Err = UnknownName;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "none" => Ok(Preprocess::None),
            "dead-ends" | "dead_ends" => Ok(Preprocess::DeadEnds),
            "nonlive" => Ok(Preprocess::Nonlive),
            _ => Err(UnknownName(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ApplicationMode {
    /// Keep every accepted change before testing the next one.
    #[default]
    Sequential,
    /// Test everything against the initial game, apply at the end, then
    /// verify the result and fall back to sequential on failure.
    Batch,
}

impl FromStr for ApplicationMode {
    type Err = UnknownName;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sequential" => Ok(ApplicationMode::Sequential),
            "batch" => Ok(ApplicationMode::Batch),
            _ => Err(UnknownName(s.to_string())),
        }
    }
}

/// Optimization toggles.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Optimizations {
    pub scc: bool,
    pub reuse: bool,
    pub history: bool,
    pub smart_init: bool,
    pub fast_detect: bool,
    pub equiv_classes: bool,
    pub purge_unreachable: bool,
    pub max_measure_first: bool,
}

impl Optimizations {
    pub const NAMES: [&'static str; 8] = [
        "scc",
        "reuse",
        "history",
        "smart-init",
        "fast-detect",
        "equiv-classes",
        "purge",
        "max-first",
    ];

    pub fn none() -> Self {
        Optimizations {
            scc: false,
            reuse: false,
            history: false,
            smart_init: false,
            fast_detect: false,
            equiv_classes: false,
            purge_unreachable: false,
            max_measure_first: false,
        }
    }

    pub fn all() -> Self {
        Optimizations {
            scc: true,
            reuse: true,
            history: true,
            smart_init: true,
            fast_detect: true,
            equiv_classes: true,
            purge_unreachable: true,
            max_measure_first: true,
        }
    }

    pub fn set(&mut self, name: &str, on: bool) -> Result<(), UnknownName> {
        let flag = match name {
            "scc" => &mut self.scc,
            "reuse" => &mut self.reuse,
            "history" => &mut self.history,
            "smart-init" | "smart_init" => &mut self.smart_init,
            "fast-detect" | "fast_detect" => &mut self.fast_detect,
            "equiv-classes" | "equiv_classes" => &mut self.equiv_classes,
            "purge" | "purge-unreachable" | "purge_unreachable" => &mut self.purge_unreachable,
            "max-first" | "max-measure-first" => &mut self.max_measure_first,
            _ => return Err(UnknownName(name.to_string())),
        };
        *flag = on;
        Ok(())
    }

    pub fn from_names<'a>(names: impl IntoIterator<Item = &'a str>) -> Result<Self, UnknownName> {
        let mut o = Optimizations::none();
        for n in names {
            o.set(n, true)?;
        }
        Ok(o)
    }
}

impl Default for Optimizations {
    fn default() -> Self {
        Optimizations {
            scc: false,
            max_measure_first: false,
            ..Optimizations::all()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct MinimizeConfig {
    pub method: Method,
    pub optimizations: Optimizations,
    pub preprocess: Preprocess,
    pub application_mode: ApplicationMode,
}

impl MinimizeConfig {
    pub fn with_method(method: Method) -> Self {
        MinimizeConfig {
            method,
            ..Default::default()
        }
    }

    pub fn solver_config(&self) -> SolverConfig<'static> {
        let o = self.optimizations;
        SolverConfig {
            use_scc_bounds: o.scc,
            work_order: if o.max_measure_first {
                WorkOrder::MaxMeasureFirst
            } else {
                WorkOrder::Fifo
            },
            smart_init: o.smart_init,
            ..SolverConfig::default()
        }
    }
}

/// Counters and sizes of one [`minimize`] run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MinimizeStats {
    pub elapsed_seconds: f64,
    pub q_in: usize,
    pub delta_in: usize,
    pub q_out: usize,
    pub delta_out: usize,
    /// Size of the first game graph built for the method.
    pub game_vertices: usize,
    pub game_edges: usize,
    /// `n + 1` for that graph.
    pub infinity_bound: u32,
    pub states_removed: usize,
    /// Accepted redundant-transition removals; `None` for methods without
    /// a removal phase.
    pub transitions_removed: Option<usize>,
    pub attempts_merge: usize,
    pub attempts_removal: usize,
    pub accepted_merge: usize,
    pub accepted_removal: usize,
    /// Merges accepted through the union-find shortcut.
    pub merges_by_classes: usize,
    /// Merges and removals certified by direct simulation.
    pub merges_by_direct: usize,
    pub removals_by_direct: usize,
    /// Closure transitions added by accepted merges.
    pub closure_transitions: usize,
    /// Batch mode failed verification and was redone sequentially.
    pub demoted: bool,
}

/// Reduces `a` without changing its language.
pub fn minimize(a: &BuchiAutomaton, cfg: &MinimizeConfig) -> Result<(BuchiAutomaton, MinimizeStats), MinimizeError> {
    let start = Instant::now();
    let mut stats = MinimizeStats {
        q_in: a.num_states(),
        delta_in: a.num_transitions(),
        ..Default::default()
    };
    let pre = match cfg.preprocess {
        Preprocess::None => {
            if a.has_dead_ends() {
                return Err(MinimizeError::DeadEnds);
            }
            a.clone()
        }
        Preprocess::DeadEnds => remove_dead_ends(a),
        Preprocess::Nonlive => remove_nonlive_states(a),
    };

    if cfg.method.is_fair() {
        stats.transitions_removed = Some(0);
    }
    let reduced = if pre.num_states() == 0 {
        stats.infinity_bound = 1;
        pre
    } else if cfg.method.is_fair() {
        match cfg.application_mode {
            ApplicationMode::Sequential => fair_sequential(pre, cfg, &mut stats)?,
            ApplicationMode::Batch => fair_batch(pre, cfg, &mut stats)?,
        }
    } else {
        quotient(pre, cfg, &mut stats)?
    };
    let out = remove_unreachable_states(&reduced);

    stats.q_out = out.num_states();
    stats.delta_out = out.num_transitions();
    stats.states_removed = stats.q_in - stats.q_out;
    if stats.transitions_removed.is_some() {
        stats.transitions_removed = Some(stats.accepted_removal);
    }
    stats.elapsed_seconds = start.elapsed().as_secs_f64();
    Ok((out, stats))
}

fn record_game(stats: &mut MinimizeStats, g: &GameGraph) {
    if stats.game_vertices == 0 {
        stats.game_vertices = g.num_vertices();
        stats.game_edges = g.num_edges();
        stats.infinity_bound = g.num_priority_one() as u32 + 1;
    }
}

fn fresh_fair(
    a: &BuchiAutomaton,
    cfg: &MinimizeConfig,
    stats: &mut MinimizeStats,
) -> Result<(GameGraph, ProgressMeasure), MinimizeError> {
    let mut g = build_game_graph(a, a, Flavor::Fair)?;
    record_game(stats, &g);
    if cfg.optimizations.purge_unreachable {
        purge_unreachable_v0(&mut g);
    }
    let base = solve(&g, &cfg.solver_config()).measure;
    Ok((g, base))
}

/// Union-find over state names with the keep-rule deciding nothing here;
/// it only answers whether two states are already known to be mergeable.
struct Classes {
    index: HashMap<String, usize>,
    uf: UnionFind<usize>,
}

impl Classes {
    fn new(a: &BuchiAutomaton) -> Self {
        let index: HashMap<String, usize> = a.states().iter().cloned().enumerate().map(|(i, q)| (q, i)).collect();
        Classes {
            uf: UnionFind::new(index.len()),
            index,
        }
    }

    fn same(&self, q: &str, q2: &str) -> bool {
        match (self.index.get(q), self.index.get(q2)) {
            (Some(&i), Some(&j)) => self.uf.equiv(i, j),
            _ => false,
        }
    }

    fn union(&mut self, q: &str, q2: &str) {
        if let (Some(&i), Some(&j)) = (self.index.get(q), self.index.get(q2)) {
            self.uf.union(i, j);
        }
    }
}

fn mutual(rel: &SimulationRelation, q: &str, q2: &str) -> bool {
    rel.contains(q, q2) && rel.contains(q2, q)
}

fn fair_sequential(
    mut a: BuchiAutomaton,
    cfg: &MinimizeConfig,
    stats: &mut MinimizeStats,
) -> Result<BuchiAutomaton, MinimizeError> {
    let opts = cfg.optimizations;
    let scfg = cfg.solver_config();
    let (mut g, mut base) = fresh_fair(&a, cfg, stats)?;
    let mut classes = Classes::new(&a);
    let mut rejected: HashSet<(String, String)> = HashSet::new();

    'merges: loop {
        let rel = SimulationRelation::from_measure(&base, &g);
        let direct = (cfg.method == Method::FairDirect).then(|| fair_direct_prepass_with(&mut g, &scfg));
        for (q1, q2) in candidate_merges(&rel) {
            if rejected.contains(&(q1.clone(), q2.clone())) {
                continue;
            }
            stats.attempts_merge += 1;
            let accepted = if opts.equiv_classes && classes.same(&q1, &q2) {
                stats.merges_by_classes += 1;
                true
            } else if direct.as_ref().is_some_and(|d| mutual(d, &q1, &q2)) {
                stats.merges_by_direct += 1;
                true
            } else {
                try_merge(&a, &mut g, &mut base, &q1, &q2, cfg)?.accepted
            };
            if !accepted {
                rejected.insert((q1, q2));
                continue;
            }
            let (keep, drop) = keep_rule(&a, &q1, &q2);
            stats.closure_transitions += merge_closure_transitions(&a, keep, drop).len();
            a = apply_merge(&a, keep, drop);
            classes.union(&q1, &q2);
            stats.accepted_merge += 1;
            (g, base) = fresh_fair(&a, cfg, stats)?;
            continue 'merges;
        }
        break;
    }

    if cfg.method == Method::FairDirect {
        let direct = fair_direct_prepass_with(&mut g, &scfg);
        let rel = SimulationRelation::from_measure(&base, &g);
        let before = a.num_transitions();
        for t in candidate_removals(&a, &rel) {
            if has_bigger_sibling(&a, &t, |x, y| direct.contains(x, y)) {
                a = a.without_transitions([&t]);
                stats.attempts_removal += 1;
                stats.accepted_removal += 1;
                stats.removals_by_direct += 1;
            }
        }
        if a.num_transitions() != before {
            (g, base) = fresh_fair(&a, cfg, stats)?;
        }
    }

    let rel = SimulationRelation::from_measure(&base, &g);
    let mut d = a.clone();
    for t in candidate_removals(&a, &rel) {
        if !d.has_transition(&t) || !has_bigger_sibling(&d, &t, |x, y| rel.contains(x, y)) {
            continue;
        }
        stats.attempts_removal += 1;
        if try_remove(&mut g, &mut base, &t, cfg)?.accepted {
            d = d.without_transitions([&t]);
            stats.accepted_removal += 1;
            if opts.purge_unreachable {
                purge_unreachable_v0(&mut g);
            }
        }
    }
    Ok(d)
}

fn fair_batch(
    a: BuchiAutomaton,
    cfg: &MinimizeConfig,
    stats: &mut MinimizeStats,
) -> Result<BuchiAutomaton, MinimizeError> {
    let opts = cfg.optimizations;
    let (mut g, mut base) = fresh_fair(&a, cfg, stats)?;
    let rel = SimulationRelation::from_measure(&base, &g);
    let direct = (cfg.method == Method::FairDirect).then(|| fair_direct_prepass_with(&mut g, &cfg.solver_config()));
    let mut classes = Classes::new(&a);

    let mut merges = Vec::new();
    for (q1, q2) in candidate_merges(&rel) {
        stats.attempts_merge += 1;
        let accepted = if opts.equiv_classes && classes.same(&q1, &q2) {
            stats.merges_by_classes += 1;
            true
        } else if direct.as_ref().is_some_and(|d| mutual(d, &q1, &q2)) {
            stats.merges_by_direct += 1;
            true
        } else {
            probe_merge(&a, &mut g, &mut base, &q1, &q2, cfg)?
        };
        if accepted {
            classes.union(&q1, &q2);
            merges.push((q1, q2));
        }
    }

    let mut removals = Vec::new();
    for t in candidate_removals(&a, &rel) {
        stats.attempts_removal += 1;
        let accepted = if direct
            .as_ref()
            .is_some_and(|d| has_bigger_sibling(&a, &t, |x, y| d.contains(x, y)))
        {
            stats.removals_by_direct += 1;
            true
        } else {
            probe_remove(&mut g, &mut base, &t, cfg)?
        };
        if accepted {
            removals.push(t);
        }
    }

    let mut out = a.clone();
    let mut merged_into: BTreeMap<String, String> = BTreeMap::new();
    let find = |m: &BTreeMap<String, String>, q: &str| {
        let mut cur = q.to_string();
        while let Some(next) = m.get(&cur) {
            cur = next.clone();
        }
        cur
    };
    for (q1, q2) in &merges {
        let (r1, r2) = (find(&merged_into, q1), find(&merged_into, q2));
        if r1 == r2 {
            continue;
        }
        let (keep, drop) = keep_rule(&out, &r1, &r2);
        stats.closure_transitions += merge_closure_transitions(&out, keep, drop).len();
        out = apply_merge(&out, keep, drop);
        merged_into.insert(drop.to_string(), keep.to_string());
        stats.accepted_merge += 1;
    }
    for t in &removals {
        let mapped = Transition::new(find(&merged_into, &t.src), t.symbol.clone(), find(&merged_into, &t.dst));
        if out.has_transition(&mapped) {
            out = out.without_transitions([&mapped]);
            stats.accepted_removal += 1;
        }
    }
    let out = remove_dead_ends(&out);

    if fair_equivalent(&a, &out)? {
        return Ok(out);
    }
    stats.demoted = true;
    let keep_game = (stats.game_vertices, stats.game_edges, stats.infinity_bound);
    *stats = MinimizeStats {
        q_in: stats.q_in,
        delta_in: stats.delta_in,
        transitions_removed: Some(0),
        demoted: true,
        ..Default::default()
    };
    (stats.game_vertices, stats.game_edges, stats.infinity_bound) = keep_game;
    fair_sequential(a, cfg, stats)
}

/// Fair simulation in both directions between the initial states of `x`
/// and `y`, computed on their disjoint union. Implies language equality.
pub fn fair_equivalent(x: &BuchiAutomaton, y: &BuchiAutomaton) -> Result<bool, MinimizeError> {
    let tag = |a: &BuchiAutomaton, p: &str| {
        let r = |q: &str| format!("{p}.{q}");
        (
            a.initial().iter().map(|q| r(q)).collect::<Vec<_>>(),
            a.transitions()
                .iter()
                .map(|t| Transition::new(r(&t.src), t.symbol.clone(), r(&t.dst)))
                .collect::<Vec<_>>(),
            a.final_states().iter().map(|q| r(q)).collect::<Vec<_>>(),
        )
    };
    let (xi, xt, xf) = tag(x, "l");
    let (yi, yt, yf) = tag(y, "r");
    let union = BuchiAutomaton::from_parts(
        xi.iter().chain(&yi).cloned(),
        xt.into_iter().chain(yt),
        xf.into_iter().chain(yf),
    );
    let union = remove_dead_ends(&union);
    let alive = |q: &String| union.states().contains(q);
    let xi: Vec<&String> = xi.iter().filter(|q| alive(q)).collect();
    let yi: Vec<&String> = yi.iter().filter(|q| alive(q)).collect();
    if union.num_states() == 0 {
        return Ok(xi.is_empty() && yi.is_empty());
    }
    let rel = compute_relation(&union, Flavor::Fair)?;
    let covers = |from: &[&String], to: &[&String]| from.iter().all(|p| to.iter().any(|q| rel.contains(p, q)));
    Ok(covers(&xi, &yi) && covers(&yi, &xi))
}

fn quotient(
    mut a: BuchiAutomaton,
    cfg: &MinimizeConfig,
    stats: &mut MinimizeStats,
) -> Result<BuchiAutomaton, MinimizeError> {
    let flavor = match cfg.method {
        Method::Direct => Flavor::Direct,
        _ => Flavor::Delayed,
    };
    let g = build_game_graph(&a, &a, flavor)?;
    record_game(stats, &g);
    let sol = solve(&g, &cfg.solver_config());
    let rel = SimulationRelation::from_measure(&sol.measure, &g);
    let states: Vec<String> = a.states().iter().cloned().collect();
    let mut assigned: HashSet<&str> = HashSet::new();
    let mut classes: Vec<Vec<&str>> = Vec::new();
    for q in &states {
        if assigned.contains(q.as_str()) {
            continue;
        }
        let class: Vec<&str> = states
            .iter()
            .filter(|p| !assigned.contains(p.as_str()) && (*p == q || mutual(&rel, q, p)))
            .map(String::as_str)
            .collect();
        assigned.extend(class.iter().copied());
        classes.push(class);
    }
    for class in classes.into_iter().filter(|c| c.len() > 1) {
        let keep = class.iter().copied().find(|q| a.is_final(q)).unwrap_or(class[0]).to_string();
        for drop in class.iter().filter(|q| **q != keep) {
            stats.attempts_merge += 1;
            stats.accepted_merge += 1;
            a = apply_merge(&a, &keep, drop);
        }
    }
    Ok(a)
}
