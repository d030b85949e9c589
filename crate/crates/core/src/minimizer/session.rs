use crate::automaton::{BuchiAutomaton, Transition};
use crate::game_graph::{add_transitions_spoiler, remove_transitions_duplicator, GameGraph, GraphDelta, GraphError};
use crate::solver::{
    restore_measure, solve, solve_incremental, solve_incremental_in_place, Outcome, ProgressMeasure, SolveStats,
    SolverConfig,
};

use super::candidates::merge_closure_transitions;
use super::{MinimizeConfig, MinimizeError};

/// Result of one merge or removal check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Attempt {
    pub accepted: bool,
    /// The transitions added to Spoiler's side (merges) or removed from
    /// Duplicator's side (removals).
    pub transitions: Vec<Transition>,
    pub stats: SolveStats,
}

/// Checks whether `q` and `q2` can be merged: Spoiler gets the closure
/// transitions, the game is re-solved, and the merge is accepted iff the
/// winning set is unchanged.
///
/// On rejection `g` and `base` are restored. On acceptance they describe
/// the modified game when the `history` optimization is on; otherwise they
/// are replaced by the modified copy.
pub fn try_merge(
    a: &BuchiAutomaton,
    g: &mut GameGraph,
    base: &mut ProgressMeasure,
    q: &str,
    q2: &str,
    cfg: &MinimizeConfig,
) -> Result<Attempt, MinimizeError> {
    let t: Vec<Transition> = merge_closure_transitions(a, q, q2).into_iter().collect();
    let (accepted, stats) = check(g, base, cfg, true, |g| add_transitions_spoiler(g, &t))?;
    Ok(Attempt {
        accepted,
        transitions: t,
        stats,
    })
}

/// Checks whether Duplicator can do without transition `t`.
pub fn try_remove(
    g: &mut GameGraph,
    base: &mut ProgressMeasure,
    t: &Transition,
    cfg: &MinimizeConfig,
) -> Result<Attempt, MinimizeError> {
    let ts = vec![t.clone()];
    let (accepted, stats) = check(g, base, cfg, true, |g| remove_transitions_duplicator(g, &ts))?;
    Ok(Attempt {
        accepted,
        transitions: ts,
        stats,
    })
}

/// Like [`try_merge`] but always leaves `g` and `base` as they were.
pub(crate) fn probe_merge(
    a: &BuchiAutomaton,
    g: &mut GameGraph,
    base: &mut ProgressMeasure,
    q: &str,
    q2: &str,
    cfg: &MinimizeConfig,
) -> Result<bool, MinimizeError> {
    let t: Vec<Transition> = merge_closure_transitions(a, q, q2).into_iter().collect();
    Ok(check(g, base, cfg, false, |g| add_transitions_spoiler(g, &t))?.0)
}

pub(crate) fn probe_remove(
    g: &mut GameGraph,
    base: &mut ProgressMeasure,
    t: &Transition,
    cfg: &MinimizeConfig,
) -> Result<bool, MinimizeError> {
    let ts = vec![t.clone()];
    Ok(check(g, base, cfg, false, |g| remove_transitions_duplicator(g, &ts))?.0)
}

fn check(
    g: &mut GameGraph,
    base: &mut ProgressMeasure,
    cfg: &MinimizeConfig,
    keep_on_accept: bool,
    modify: impl FnOnce(&mut GameGraph) -> Result<GraphDelta, GraphError>,
) -> Result<(bool, SolveStats), MinimizeError> {
    let opts = cfg.optimizations;
    let scfg = cfg.solver_config();

    if !opts.history {
        let mut copy = g.clone();
        let delta = modify(&mut copy)?;
        let sc = SolverConfig {
            reference_measure: opts.fast_detect.then_some(&*base),
            ..scfg
        };
        let sol = if opts.reuse {
            solve_incremental(&copy, base, &delta, &sc)?
        } else {
            solve(&copy, &sc)
        };
        let accepted = sol.outcome == Outcome::Converged && sol.measure.same_winning_set(base, &copy);
        if accepted && keep_on_accept {
            *g = copy;
            *base = sol.measure;
        }
        return Ok((accepted, sol.stats));
    }

    let mut delta = modify(g)?;
    if opts.reuse {
        let (outcome, stats) = solve_incremental_in_place(g, base, &mut delta, &scfg, opts.fast_detect)?;
        let accepted = outcome == Outcome::Converged
            && delta
                .saved_solver_entries
                .iter()
                .all(|e| e.mu.is_finite() == base.mu(e.vertex).is_finite());
        if !(accepted && keep_on_accept) {
            restore_measure(base, &delta);
            g.undo(&delta);
        }
        Ok((accepted, stats))
    } else {
        let sc = SolverConfig {
            reference_measure: opts.fast_detect.then_some(&*base),
            ..scfg
        };
        let sol = solve(g, &sc);
        let accepted = sol.outcome == Outcome::Converged && sol.measure.same_winning_set(base, g);
        if accepted && keep_on_accept {
            *base = sol.measure;
        } else {
            g.undo(&delta);
        }
        Ok((accepted, sol.stats))
    }
}
