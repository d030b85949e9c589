use std::collections::BTreeSet;

use crate::automaton::BuchiAutomaton;
use crate::game_graph::{build_game_graph, Flavor, GameGraph, GraphError};
use crate::solver::{solve, Outcome, ProgressMeasure, Solution, SolverConfig};

use super::MinimizeError;

/// Pairs `(q, q2)` with `q ⪯ q2`: `q2` simulates `q`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimulationRelation {
    flavor: Flavor,
    spoiler: Vec<String>,
    duplicator: Vec<String>,
    matrix: Vec<bool>,
}

impl SimulationRelation {
    /// The relation read off a fixed point: `q ⪯ q2` iff the measure of the
    /// vertex for `(q, q2)` is finite.
    pub fn from_measure(pm: &ProgressMeasure, g: &GameGraph) -> Self {
        let spoiler = g.spoiler_states().to_vec();
        let duplicator = g.duplicator_states().to_vec();
        let mut matrix = vec![false; spoiler.len() * duplicator.len()];
        for i in 0..spoiler.len() {
            for j in 0..duplicator.len() {
                let v = g.relation_vertex_idx(i as u32, j as u32).expect("every state pair has a vertex");
                matrix[i * duplicator.len() + j] = pm.mu(v).is_finite();
            }
        }
        SimulationRelation {
            flavor: if g.direct_view() { Flavor::Direct } else { g.flavor() },
            spoiler,
            duplicator,
            matrix,
        }
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    pub(crate) fn holds_idx(&self, q: usize, q2: usize) -> bool {
        self.matrix[q * self.duplicator.len() + q2]
    }

    fn spoiler_index(&self, q: &str) -> Option<usize> {
        self.spoiler.binary_search_by(|s| s.as_str().cmp(q)).ok()
    }

    fn duplicator_index(&self, q: &str) -> Option<usize> {
        self.duplicator.binary_search_by(|s| s.as_str().cmp(q)).ok()
    }

    /// `q ⪯ q2`.
    pub fn contains(&self, q: &str, q2: &str) -> bool {
        match (self.spoiler_index(q), self.duplicator_index(q2)) {
            (Some(i), Some(j)) => self.holds_idx(i, j),
            _ => false,
        }
    }

    pub fn pairs(&self) -> BTreeSet<(String, String)> {
        let mut out = BTreeSet::new();
        for (i, q) in self.spoiler.iter().enumerate() {
            for (j, q2) in self.duplicator.iter().enumerate() {
                if self.holds_idx(i, j) {
                    out.insert((q.clone(), q2.clone()));
                }
            }
        }
        out
    }

    pub fn len(&self) -> usize {
        self.matrix.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_subset(&self, other: &SimulationRelation) -> bool {
        self.pairs().iter().all(|(q, q2)| other.contains(q, q2))
    }

    pub fn is_reflexive(&self) -> bool {
        self.spoiler.iter().all(|q| self.contains(q, q))
    }

    /// Only meaningful when both players play on the same automaton.
    pub fn is_transitive(&self) -> bool {
        let n = self.spoiler.len();
        if self.spoiler != self.duplicator {
            return false;
        }
        (0..n).all(|i| {
            (0..n).all(|j| {
                !self.holds_idx(i, j) || (0..n).all(|k| !self.holds_idx(j, k) || self.holds_idx(i, k))
            })
        })
    }

    pub(crate) fn states(&self) -> &[String] {
        &self.spoiler
    }
}

/// Reads the relation off a completed solve. Aborted runs carry no relation.
pub fn extract_relation(sol: &Solution, g: &GameGraph) -> Result<SimulationRelation, MinimizeError> {
    if sol.outcome == Outcome::Diverged {
        return Err(MinimizeError::Diverged);
    }
    Ok(SimulationRelation::from_measure(&sol.measure, g))
}

/// Builds the game of the given flavor on `a` against itself, solves it and
/// extracts the relation.
pub fn compute_relation(a: &BuchiAutomaton, flavor: Flavor) -> Result<SimulationRelation, GraphError> {
    let g = build_game_graph(a, a, flavor)?;
    let sol = solve(&g, &SolverConfig::default());
    Ok(SimulationRelation::from_measure(&sol.measure, &g))
}

/// Solves the direct game hidden in a fair graph: excluded edges are
/// switched off, priorities read as 0, and the view is restored afterwards.
pub fn fair_direct_prepass(g: &mut GameGraph) -> SimulationRelation {
    fair_direct_prepass_with(g, &SolverConfig::default())
}

pub(crate) fn fair_direct_prepass_with(g: &mut GameGraph, cfg: &SolverConfig) -> SimulationRelation {
    let cfg = SolverConfig {
        reference_measure: None,
        ..*cfg
    };
    g.set_direct_view(true);
    let sol = solve(g, &cfg);
    let rel = SimulationRelation::from_measure(&sol.measure, g);
    g.set_direct_view(false);
    rel
}
