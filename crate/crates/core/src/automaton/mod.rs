//! Büchi automata: the value type, the line-based interchange format,
//! language-preserving preprocessing, a lasso-word membership oracle and a
//! seeded random generator.

mod format;
mod generator;
mod lasso;
mod preprocess;

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

pub use format::{parse_ba, serialize_ba, ParseError};
pub use generator::{random_automaton, symbol_names, GeneratorConfig, GeneratorError};
pub use lasso::{accepts_lasso, LassoError, LassoOracle, LassoWord};
pub use preprocess::{remove_dead_ends, remove_nonlive_states, remove_unreachable_states};

/// A labelled transition `src --symbol--> dst`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Transition {
    pub src: String,
    pub symbol: String,
    pub dst: String,
}

impl Transition {
    pub fn new(src: impl Into<String>, symbol: impl Into<String>, dst: impl Into<String>) -> Self {
        Transition {
            src: src.into(),
            symbol: symbol.into(),
            dst: dst.into(),
        }
    }
}

impl fmt::Display for Transition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.src, self.symbol, self.dst)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AutomatonError {
    #[error("initial state `{0}` is not a state of the automaton")]
    UnknownInitial(String),
    #[error("final state `{0}` is not a state of the automaton")]
    UnknownFinal(String),
    #[error("transition {0} references an unknown state")]
    UnknownState(Transition),
    #[error("transition {0} uses a symbol outside the alphabet")]
    UnknownSymbol(Transition),
}

/// A nondeterministic Büchi automaton over string identifiers.
///
/// All components are kept in ordered sets, so two automata compare equal
/// exactly when they have the same alphabet, states, initial states,
/// transitions and final states.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BuchiAutomaton {
    alphabet: BTreeSet<String>,
    states: BTreeSet<String>,
    initial: BTreeSet<String>,
    transitions: BTreeSet<Transition>,
    final_states: BTreeSet<String>,
}

impl BuchiAutomaton {
    pub fn new(
        alphabet: impl IntoIterator<Item = String>,
        states: impl IntoIterator<Item = String>,
        initial: impl IntoIterator<Item = String>,
        transitions: impl IntoIterator<Item = Transition>,
        final_states: impl IntoIterator<Item = String>,
    ) -> Result<Self, AutomatonError> {
        let automaton = BuchiAutomaton {
            alphabet: alphabet.into_iter().collect(),
            states: states.into_iter().collect(),
            initial: initial.into_iter().collect(),
            transitions: transitions.into_iter().collect(),
            final_states: final_states.into_iter().collect(),
        };
        automaton.validate()?;
        Ok(automaton)
    }

    /// Builds an automaton whose states and alphabet are exactly the ones
    /// mentioned by the given components.
    pub fn from_parts<S: Into<String>>(
        initial: impl IntoIterator<Item = S>,
        transitions: impl IntoIterator<Item = Transition>,
        final_states: impl IntoIterator<Item = S>,
    ) -> Self {
        let initial: BTreeSet<String> = initial.into_iter().map(Into::into).collect();
        let final_states: BTreeSet<String> = final_states.into_iter().map(Into::into).collect();
        let transitions: BTreeSet<Transition> = transitions.into_iter().collect();
        let mut states: BTreeSet<String> = initial.union(&final_states).cloned().collect();
        let mut alphabet = BTreeSet::new();
        for t in &transitions {
            states.insert(t.src.clone());
            states.insert(t.dst.clone());
            alphabet.insert(t.symbol.clone());
        }
        BuchiAutomaton {
            alphabet,
            states,
            initial,
            transitions,
            final_states,
        }
    }

    fn validate(&self) -> Result<(), AutomatonError> {
        if let Some(q) = self.initial.iter().find(|q| !self.states.contains(*q)) {
            return Err(AutomatonError::UnknownInitial(q.clone()));
        }
        if let Some(q) = self.final_states.iter().find(|q| !self.states.contains(*q)) {
            return Err(AutomatonError::UnknownFinal(q.clone()));
        }
        for t in &self.transitions {
            if !self.states.contains(&t.src) || !self.states.contains(&t.dst) {
                return Err(AutomatonError::UnknownState(t.clone()));
            }
            if !self.alphabet.contains(&t.symbol) {
                return Err(AutomatonError::UnknownSymbol(t.clone()));
            }
        }
        Ok(())
    }

    pub fn alphabet(&self) -> &BTreeSet<String> {
        &self.alphabet
    }

    pub fn states(&self) -> &BTreeSet<String> {
        &self.states
    }

    pub fn initial(&self) -> &BTreeSet<String> {
        &self.initial
    }

    pub fn final_states(&self) -> &BTreeSet<String> {
        &self.final_states
    }

    pub fn transitions(&self) -> &BTreeSet<Transition> {
        &self.transitions
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn num_transitions(&self) -> usize {
        self.transitions.len()
    }

    pub fn is_initial(&self, q: &str) -> bool {
        self.initial.contains(q)
    }

    pub fn is_final(&self, q: &str) -> bool {
        self.final_states.contains(q)
    }

    pub fn has_transition(&self, t: &Transition) -> bool {
        self.transitions.contains(t)
    }

    /// Outgoing transitions of `q`, in order.
    pub fn outgoing<'a>(&'a self, q: &'a str) -> impl Iterator<Item = &'a Transition> + 'a {
        self.transitions.iter().filter(move |t| t.src == q)
    }

    /// Incoming transitions of `q`, in order.
    pub fn incoming<'a>(&'a self, q: &'a str) -> impl Iterator<Item = &'a Transition> + 'a {
        self.transitions.iter().filter(move |t| t.dst == q)
    }

    /// `add(A, T)`: the same automaton with the transitions of `extra` added.
    /// New symbols extend the alphabet; new endpoints extend the state set.
    pub fn with_transitions(&self, extra: impl IntoIterator<Item = Transition>) -> Self {
        let mut out = self.clone();
        for t in extra {
            out.alphabet.insert(t.symbol.clone());
            out.states.insert(t.src.clone());
            out.states.insert(t.dst.clone());
            out.transitions.insert(t);
        }
        out
    }

    /// `rem(A, T)`: the same automaton without the given transitions.
    pub fn without_transitions<'a>(&self, removed: impl IntoIterator<Item = &'a Transition>) -> Self {
        let mut out = self.clone();
        for t in removed {
            out.transitions.remove(t);
        }
        out
    }

    /// Restriction to the states satisfying `keep`; transitions touching a
    /// dropped state are dropped too. The alphabet is unchanged.
    pub fn restrict(&self, mut keep: impl FnMut(&str) -> bool) -> Self {
        let states: BTreeSet<String> = self.states.iter().filter(|q| keep(q)).cloned().collect();
        BuchiAutomaton {
            alphabet: self.alphabet.clone(),
            initial: self.initial.intersection(&states).cloned().collect(),
            final_states: self.final_states.intersection(&states).cloned().collect(),
            transitions: self
                .transitions
                .iter()
                .filter(|t| states.contains(&t.src) && states.contains(&t.dst))
                .cloned()
                .collect(),
            states,
        }
    }

    /// Deletes `q` with all of its transitions.
    pub fn without_state(&self, q: &str) -> Self {
        self.restrict(|s| s != q)
    }

    pub(crate) fn set_final(&mut self, q: &str, fin: bool) {
        if fin {
            self.final_states.insert(q.to_string());
        } else {
            self.final_states.remove(q);
        }
    }

    pub(crate) fn set_initial(&mut self, q: &str, initial: bool) {
        if initial {
            self.initial.insert(q.to_string());
        } else {
            self.initial.remove(q);
        }
    }

    /// States without any outgoing transition.
    pub fn dead_ends(&self) -> BTreeSet<String> {
        let mut alive: BTreeSet<&str> = BTreeSet::new();
        for t in &self.transitions {
            alive.insert(&t.src);
        }
        self.states
            .iter()
            .filter(|q| !alive.contains(q.as_str()))
            .cloned()
            .collect()
    }

    pub fn has_dead_ends(&self) -> bool {
        !self.dead_ends().is_empty()
    }

    /// At most one successor per (state, symbol).
    pub fn is_deterministic(&self) -> bool {
        let mut seen = BTreeSet::new();
        self.transitions
            .iter()
            .all(|t| seen.insert((t.src.as_str(), t.symbol.as_str())))
    }

    /// Dense index view used by the graph and solver code.
    pub(crate) fn indexed(&self, alphabet: &SymbolTable) -> IndexedAutomaton {
        IndexedAutomaton::build(self, alphabet)
    }
}

/// Dense numbering of a set of symbols.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct SymbolTable {
    names: Vec<String>,
    index: HashMap<String, u32>,
}

impl SymbolTable {
    pub(crate) fn new<'a>(symbols: impl IntoIterator<Item = &'a String>) -> Self {
        let names: Vec<String> = symbols
            .into_iter()
            .cloned()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let index = names
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i as u32))
            .collect();
        SymbolTable { names, index }
    }

    pub(crate) fn get(&self, symbol: &str) -> Option<u32> {
        self.index.get(symbol).copied()
    }

    pub(crate) fn name(&self, symbol: u32) -> &str {
        &self.names[symbol as usize]
    }

}

/// States numbered in lexicographic order with adjacency lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct IndexedAutomaton {
    pub(crate) names: Vec<String>,
    pub(crate) index: HashMap<String, u32>,
    pub(crate) is_final: Vec<bool>,
    pub(crate) is_initial: Vec<bool>,
    /// `out[q]` holds `(symbol, dst)` pairs, sorted.
    pub(crate) out: Vec<Vec<(u32, u32)>>,
    /// `inc[q]` holds `(symbol, src)` pairs, sorted.
    pub(crate) inc: Vec<Vec<(u32, u32)>>,
}

impl IndexedAutomaton {
    fn build(a: &BuchiAutomaton, alphabet: &SymbolTable) -> Self {
        let names: Vec<String> = a.states.iter().cloned().collect();
        let index: HashMap<String, u32> = names
            .iter()
            .enumerate()
            .map(|(i, q)| (q.clone(), i as u32))
            .collect();
        let n = names.len();
        let mut out = vec![Vec::new(); n];
        let mut inc = vec![Vec::new(); n];
        for t in &a.transitions {
            let s = index[&t.src];
            let d = index[&t.dst];
            let sym = alphabet
                .get(&t.symbol)
                .expect("symbol table covers the automaton alphabet");
            out[s as usize].push((sym, d));
            inc[d as usize].push((sym, s));
        }
        for list in out.iter_mut().chain(inc.iter_mut()) {
            list.sort_unstable();
        }
        IndexedAutomaton {
            is_final: names.iter().map(|q| a.is_final(q)).collect(),
            is_initial: names.iter().map(|q| a.is_initial(q)).collect(),
            names,
            index,
            out,
            inc,
        }
    }

    pub(crate) fn len(&self) -> usize {
        self.names.len()
    }

    pub(crate) fn has(&self, src: u32, sym: u32, dst: u32) -> bool {
        self.out[src as usize].binary_search(&(sym, dst)).is_ok()
    }

    pub(crate) fn has_incoming_symbol(&self, q: u32, sym: u32) -> bool {
        self.inc[q as usize].iter().any(|&(s, _)| s == sym)
    }

    pub(crate) fn successors_on(&self, q: u32, sym: u32) -> impl Iterator<Item = u32> + '_ {
        self.out[q as usize]
            .iter()
            .filter(move |&&(s, _)| s == sym)
            .map(|&(_, d)| d)
    }

    pub(crate) fn insert(&mut self, src: u32, sym: u32, dst: u32) -> bool {
        match self.out[src as usize].binary_search(&(sym, dst)) {
            Ok(_) => false,
            Err(pos) => {
                self.out[src as usize].insert(pos, (sym, dst));
                let inc = &mut self.inc[dst as usize];
                let ipos = inc.binary_search(&(sym, src)).unwrap_err();
                inc.insert(ipos, (sym, src));
                true
            }
        }
    }

    pub(crate) fn remove(&mut self, src: u32, sym: u32, dst: u32) -> bool {
        match self.out[src as usize].binary_search(&(sym, dst)) {
            Ok(pos) => {
                self.out[src as usize].remove(pos);
                let inc = &mut self.inc[dst as usize];
                if let Ok(ipos) = inc.binary_search(&(sym, src)) {
                    inc.remove(ipos);
                }
                true
            }
            Err(_) => false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str, a: &str, d: &str) -> Transition {
        Transition::new(s, a, d)
    }

    #[test]
    fn new_rejects_unknown_components() {
        let err = BuchiAutomaton::new(
            ["a".to_string()],
            ["q0".to_string()],
            ["q1".to_string()],
            [],
            [],
        )
        .unwrap_err();
        assert_eq!(err, AutomatonError::UnknownInitial("q1".into()));

        let err = BuchiAutomaton::new(
            ["a".to_string()],
            ["q0".to_string()],
            ["q0".to_string()],
            [t("q0", "b", "q0")],
            [],
        )
        .unwrap_err();
        assert!(matches!(err, AutomatonError::UnknownSymbol(_)));
    }

    #[test]
    fn from_parts_collects_states_and_symbols() {
        let a = BuchiAutomaton::from_parts(["q0"], [t("q0", "a", "q1"), t("q1", "b", "q0")], ["q1"]);
        assert_eq!(a.num_states(), 2);
        assert_eq!(a.alphabet().len(), 2);
        assert!(a.is_final("q1"));
        assert!(a.is_initial("q0"));
        assert!(!a.has_dead_ends());
    }

    #[test]
    fn restrict_drops_touching_transitions() {
        let a = BuchiAutomaton::from_parts(
            ["q0"],
            [t("q0", "a", "q1"), t("q1", "a", "q2"), t("q2", "a", "q2")],
            ["q2"],
        );
        let r = a.without_state("q1");
        assert_eq!(r.num_transitions(), 1);
        assert_eq!(r.states().len(), 2);
        assert_eq!(r.alphabet(), a.alphabet());
    }

    #[test]
    fn indexed_adjacency_is_sorted_and_mutable() {
        let a = BuchiAutomaton::from_parts(["x"], [t("x", "b", "y"), t("x", "a", "y"), t("y", "a", "x")], ["x"]);
        let table = SymbolTable::new(a.alphabet());
        let mut idx = a.indexed(&table);
        assert_eq!(idx.out[0], vec![(0, 1), (1, 1)]);
        assert!(idx.has_incoming_symbol(0, 0));
        assert!(!idx.has_incoming_symbol(0, 1));
        assert!(idx.insert(0, 0, 0));
        assert!(!idx.insert(0, 0, 0));
        assert!(idx.remove(0, 0, 0));
        assert_eq!(idx.inc[0], vec![(0, 1)]);
    }
}
