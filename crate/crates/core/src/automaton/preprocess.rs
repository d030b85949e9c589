use std::collections::{BTreeSet, HashMap, VecDeque};

use petgraph::algo::kosaraju_scc;
use petgraph::graph::DiGraph;

use super::BuchiAutomaton;

/// Removes dead ends until none is left. Deleting a dead end can turn its
/// predecessors into dead ends, so the removal cascades.
pub fn remove_dead_ends(a: &BuchiAutomaton) -> BuchiAutomaton {
    let mut out_degree: HashMap<&str, usize> = a.states().iter().map(|q| (q.as_str(), 0)).collect();
    let mut preds: HashMap<&str, Vec<&str>> = HashMap::new();
    for t in a.transitions() {
        *out_degree.get_mut(t.src.as_str()).unwrap() += 1;
        preds.entry(t.dst.as_str()).or_default().push(t.src.as_str());
    }
    let mut removed: BTreeSet<&str> = BTreeSet::new();
    let mut queue: VecDeque<&str> = out_degree
        .iter()
        .filter(|(_, &d)| d == 0)
        .map(|(&q, _)| q)
        .collect();
    while let Some(q) = queue.pop_front() {
        if !removed.insert(q) {
            continue;
        }
        for &p in preds.get(q).map(Vec::as_slice).unwrap_or(&[]) {
            let d = out_degree.get_mut(p).unwrap();
            *d -= 1;
            if *d == 0 {
                queue.push_back(p);
            }
        }
    }
    a.restrict(|q| !removed.contains(q))
}

struct StateGraph<'a> {
    names: Vec<&'a str>,
    graph: DiGraph<(), ()>,
}

impl<'a> StateGraph<'a> {
    fn new(a: &'a BuchiAutomaton) -> Self {
        let names: Vec<&str> = a.states().iter().map(String::as_str).collect();
        let index: HashMap<&str, u32> = names.iter().enumerate().map(|(i, &q)| (q, i as u32)).collect();
        let edges = a
            .transitions()
            .iter()
            .map(|t| (index[t.src.as_str()], index[t.dst.as_str()]));
        let mut graph = DiGraph::<(), ()>::from_edges(edges);
        while graph.node_count() < names.len() {
            graph.add_node(());
        }
        StateGraph { names, graph }
    }

    fn reach(&self, seeds: impl IntoIterator<Item = usize>, dir: petgraph::Direction) -> Vec<bool> {
        let mut seen = vec![false; self.names.len()];
        let mut stack: Vec<usize> = seeds.into_iter().collect();
        for &s in &stack {
            seen[s] = true;
        }
        while let Some(v) = stack.pop() {
            for w in self.graph.neighbors_directed((v as u32).into(), dir) {
                let w = w.index();
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen
    }
}

/// Keeps only the states that occur on some accepting run: reachable from an
/// initial state and able to reach a final state that lies on a cycle.
pub fn remove_nonlive_states(a: &BuchiAutomaton) -> BuchiAutomaton {
    let g = StateGraph::new(a);
    let mut final_on_cycle = Vec::new();
    for scc in kosaraju_scc(&g.graph) {
        let cyclic = scc.len() > 1 || g.graph.contains_edge(scc[0], scc[0]);
        if cyclic {
            final_on_cycle.extend(
                scc.iter()
                    .map(|v| v.index())
                    .filter(|&i| a.is_final(g.names[i])),
            );
        }
    }
    let forward = g.reach(
        (0..g.names.len()).filter(|&i| a.is_initial(g.names[i])),
        petgraph::Direction::Outgoing,
    );
    let backward = g.reach(final_on_cycle, petgraph::Direction::Incoming);
    let live: BTreeSet<&str> = (0..g.names.len())
        .filter(|&i| forward[i] && backward[i])
        .map(|i| g.names[i])
        .collect();
    a.restrict(|q| live.contains(q))
}

/// Drops the states not reachable from an initial state.
pub fn remove_unreachable_states(a: &BuchiAutomaton) -> BuchiAutomaton {
    let g = StateGraph::new(a);
    let forward = g.reach(
        (0..g.names.len()).filter(|&i| a.is_initial(g.names[i])),
        petgraph::Direction::Outgoing,
    );
    let keep: BTreeSet<&str> = (0..g.names.len()).filter(|&i| forward[i]).map(|i| g.names[i]).collect();
    a.restrict(|q| keep.contains(q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::parse_ba;

    #[test]
    fn dead_end_cascade() {
        let a = parse_ba("q0\na,q0->q1\na,q1->q2\nq2").unwrap();
        let r = remove_dead_ends(&a);
        assert_eq!(r.num_states(), 0);
        assert_eq!(r.num_transitions(), 0);
    }

    #[test]
    fn total_automaton_is_unchanged() {
        let a = parse_ba("q0\na,q0->q1\na,q1->q0\nq1").unwrap();
        assert_eq!(remove_dead_ends(&a), a);
        assert_eq!(remove_nonlive_states(&a), a);
        assert_eq!(remove_unreachable_states(&a), a);
    }

    #[test]
    fn nonlive_drops_state_without_accepting_future() {
        let a = parse_ba("q0\nb,q0->q0\na,q0->q1\na,q1->q1\nb,q1->q1\nq0").unwrap();
        let r = remove_nonlive_states(&a);
        assert!(!r.states().contains("q1"));
        assert_eq!(r.num_transitions(), 1);
    }

    #[test]
    fn final_without_cycle_is_not_live() {
        let a = parse_ba("q0\na,q0->q1\na,q1->q2\na,q2->q2\nq1").unwrap();
        assert_eq!(remove_nonlive_states(&a).num_states(), 0);
    }

    #[test]
    fn unreachable_states_go() {
        let a = parse_ba("q0\na,q0->q0\na,q1->q0\nq0").unwrap();
        let r = remove_unreachable_states(&a);
        assert_eq!(r.num_states(), 1);
    }
}
