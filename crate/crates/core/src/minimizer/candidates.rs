use std::collections::BTreeSet;

use crate::automaton::{BuchiAutomaton, Transition};

use super::SimulationRelation;

/// Unordered pairs `{q, q2}`, `q < q2`, that simulate each other.
pub fn candidate_merges(rel: &SimulationRelation) -> Vec<(String, String)> {
    let states = rel.states();
    let mut out = Vec::new();
    for i in 0..states.len() {
        for j in i + 1..states.len() {
            if rel.holds_idx(i, j) && rel.holds_idx(j, i) {
                out.push((states[i].clone(), states[j].clone()));
            }
        }
    }
    out
}

/// Transitions `(q, a, q2)` with a sibling `(q, a, q3)`, `q3 ≠ q2`, such
/// that `q2 ⪯ q3`.
pub fn candidate_removals(a: &BuchiAutomaton, rel: &SimulationRelation) -> Vec<Transition> {
    a.transitions()
        .iter()
        .filter(|t| has_bigger_sibling(a, t, |x, y| rel.contains(x, y)))
        .cloned()
        .collect()
}

pub(crate) fn has_bigger_sibling(a: &BuchiAutomaton, t: &Transition, le: impl Fn(&str, &str) -> bool) -> bool {
    a.outgoing(&t.src)
        .any(|s| s.symbol == t.symbol && s.dst != t.dst && le(&t.dst, &s.dst))
}

/// The transitions missing for `q` and `q2` to have identical incoming and
/// outgoing possibilities. The four copy rules (outgoing of `q2` to `q`,
/// incoming of `q2` to `q`, and the two mirrored ones) are applied until
/// nothing new appears, so moves between the two states and self-loops are
/// closed as well.
pub fn merge_closure_transitions(a: &BuchiAutomaton, q: &str, q2: &str) -> BTreeSet<Transition> {
    let mut all: BTreeSet<Transition> = a.transitions().clone();
    let mut added = BTreeSet::new();
    loop {
        let mut fresh = Vec::new();
        for t in &all {
            for (from, to) in [(q2, q), (q, q2)] {
                if t.src == from {
                    fresh.push(Transition::new(to, t.symbol.clone(), t.dst.clone()));
                }
                if t.dst == from {
                    fresh.push(Transition::new(t.src.clone(), t.symbol.clone(), to));
                }
            }
        }
        let mut grew = false;
        for t in fresh {
            if all.insert(t.clone()) {
                added.insert(t);
                grew = true;
            }
        }
        if !grew {
            return added;
        }
    }
}

/// Which state of a merge pair survives: `q2` is dropped unless it is final
/// and `q1` is not.
pub fn keep_rule<'s>(a: &BuchiAutomaton, q1: &'s str, q2: &'s str) -> (&'s str, &'s str) {
    if a.is_final(q2) && !a.is_final(q1) {
        (q2, q1)
    } else {
        (q1, q2)
    }
}

/// Merges `drop` into `keep`: the closure transitions are added, `drop` is
/// deleted together with its transitions, and `keep` becomes initial when
/// `drop` was.
pub fn apply_merge(a: &BuchiAutomaton, keep: &str, drop: &str) -> BuchiAutomaton {
    let closure = merge_closure_transitions(a, keep, drop);
    let mut out = a.with_transitions(closure);
    if out.is_initial(drop) {
        out.set_initial(keep, true);
    }
    if out.is_final(drop) && !out.is_final(keep) {
        // callers use keep_rule; keep the language safe regardless
        out.set_final(keep, true);
    }
    out.without_state(drop)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::parse_ba;

    fn t(s: &str, a: &str, d: &str) -> Transition {
        Transition::new(s, a, d)
    }

    #[test]
    fn closure_of_two_state_example() {
        let a = parse_ba("q0\na,q0->q0\nb,q0->q1\nb,q1->q1\na,q1->q0\nq0").unwrap();
        let closure = merge_closure_transitions(&a, "q0", "q1");
        let expected: BTreeSet<_> =
            [t("q0", "a", "q1"), t("q1", "a", "q1"), t("q0", "b", "q0"), t("q1", "b", "q0")].into();
        assert_eq!(closure, expected);
    }

    #[test]
    fn identical_rows_need_nothing() {
        let a = parse_ba("p\na,p->x\na,q->x\na,x->x\na,x->p\na,x->q\nx").unwrap();
        assert!(merge_closure_transitions(&a, "p", "q").is_empty());
        let m = apply_merge(&a, "p", "q");
        assert_eq!(m.num_states(), 2);
        assert_eq!(m.num_transitions(), 3);
    }

    #[test]
    fn self_loop_on_dropped_state_survives() {
        let a = parse_ba("k\nb,k->d\na,d->d\nd").unwrap();
        let m = apply_merge(&a, "d", "k");
        assert!(m.has_transition(&t("d", "a", "d")));
        assert!(m.has_transition(&t("d", "b", "d")));
        assert!(m.is_initial("d"));
    }

    #[test]
    fn keep_rule_prefers_final() {
        let a = parse_ba("x\na,x->y\na,y->x\ny").unwrap();
        assert_eq!(keep_rule(&a, "x", "y"), ("y", "x"));
        assert_eq!(keep_rule(&a, "y", "x"), ("y", "x"));
    }
}
