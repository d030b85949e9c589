use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use super::{BuchiAutomaton, IndexedAutomaton, SymbolTable};

/// The ultimately periodic word `stem · period^ω`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LassoWord {
    pub stem: Vec<String>,
    pub period: Vec<String>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LassoError {
    #[error("the loop of a lasso word must be nonempty")]
    EmptyLoop,
    #[error("symbol `{0}` is not in the alphabet")]
    UnknownSymbol(String),
}

impl LassoWord {
    pub fn new<S: Into<String>>(
        stem: impl IntoIterator<Item = S>,
        period: impl IntoIterator<Item = S>,
    ) -> Result<Self, LassoError> {
        let period: Vec<String> = period.into_iter().map(Into::into).collect();
        if period.is_empty() {
            return Err(LassoError::EmptyLoop);
        }
        Ok(LassoWord {
            stem: stem.into_iter().map(Into::into).collect(),
            period,
        })
    }

    /// Single-character symbols, e.g. `LassoWord::from_chars("ab", "b")`.
    pub fn from_chars(stem: &str, period: &str) -> Result<Self, LassoError> {
        LassoWord::new(
            stem.chars().map(String::from),
            period.chars().map(String::from),
        )
    }

    /// True if no shorter representation of the same ω-word exists: the loop
    /// is primitive and the stem cannot be folded into the loop.
    pub fn is_canonical(&self) -> bool {
        if !is_primitive(&self.period) {
            return false;
        }
        match self.stem.last() {
            Some(s) => s != self.period.last().unwrap(),
            None => true,
        }
    }

    /// Every distinct ω-word that has a representation with stem length at
    /// most `max_stem` and loop length in `1..=max_loop`, each listed once in
    /// its canonical form.
    pub fn enumerate(alphabet: &[String], max_stem: usize, max_loop: usize) -> Vec<LassoWord> {
        let mut loops = Vec::new();
        for len in 1..=max_loop {
            for w in words(alphabet, len) {
                if is_primitive(&w) {
                    loops.push(w);
                }
            }
        }
        let mut out = Vec::new();
        for len in 0..=max_stem {
            for stem in words(alphabet, len) {
                for period in &loops {
                    if stem.last().is_some_and(|s| s == period.last().unwrap()) {
                        continue;
                    }
                    out.push(LassoWord {
                        stem: stem.clone(),
                        period: period.clone(),
                    });
                }
            }
        }
        out
    }
}

impl fmt::Display for LassoWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})^w", self.stem.join(""), self.period.join(""))
    }
}

fn is_primitive(w: &[String]) -> bool {
    let n = w.len();
    (1..n).filter(|d| n % d == 0).all(|d| (d..n).any(|i| w[i] != w[i - d]))
}

fn words(alphabet: &[String], len: usize) -> Vec<Vec<String>> {
    let mut acc = vec![Vec::new()];
    for _ in 0..len {
        acc = acc
            .into_iter()
            .flat_map(|w| {
                alphabet.iter().map(move |s| {
                    let mut v = w.clone();
                    v.push(s.clone());
                    v
                })
            })
            .collect();
    }
    acc
}

/// Membership test `stem · loop^ω ∈ L(A)`.
///
/// The stem is run as a subset simulation. The loop is unrolled into a
/// product of states and loop positions; the word is accepted iff a final
/// product node is reachable from the stem targets and lies on a cycle.
pub fn accepts_lasso(a: &BuchiAutomaton, w: &LassoWord) -> Result<bool, LassoError> {
    LassoOracle::new(a).accepts(w)
}

/// Reusable form of [`accepts_lasso`] for checking many words against one
/// automaton.
pub struct LassoOracle {
    symbols: SymbolTable,
    automaton: IndexedAutomaton,
}

impl LassoOracle {
    pub fn new(a: &BuchiAutomaton) -> Self {
        let symbols = SymbolTable::new(a.alphabet());
        let automaton = a.indexed(&symbols);
        LassoOracle { symbols, automaton }
    }

    fn encode(&self, w: &[String]) -> Result<Vec<u32>, LassoError> {
        w.iter()
            .map(|s| self.symbols.get(s).ok_or_else(|| LassoError::UnknownSymbol(s.clone())))
            .collect()
    }

    pub fn accepts(&self, w: &LassoWord) -> Result<bool, LassoError> {
        if w.period.is_empty() {
            return Err(LassoError::EmptyLoop);
        }
        let stem = self.encode(&w.stem)?;
        let period = self.encode(&w.period)?;
        Ok(self.accepts_encoded(&stem, &period))
    }

    fn accepts_encoded(&self, stem: &[u32], period: &[u32]) -> bool {
        let a = &self.automaton;
        let n = a.len();
        let mut current: BTreeSet<u32> = (0..n as u32).filter(|&q| a.is_initial[q as usize]).collect();
        for &sym in stem {
            current = current.iter().flat_map(|&q| a.successors_on(q, sym)).collect();
            if current.is_empty() {
                return false;
            }
        }
        let len = period.len();
        let node = |q: u32, i: usize| q as usize * len + i;
        let succ = |v: usize| {
            let (q, i) = ((v / len) as u32, v % len);
            a.successors_on(q, period[i]).map(move |d| node(d, (i + 1) % len))
        };
        let total = n * len;
        let mut reached = vec![false; total];
        let mut stack: Vec<usize> = current.iter().map(|&q| node(q, 0)).collect();
        for &v in &stack {
            reached[v] = true;
        }
        while let Some(v) = stack.pop() {
            for w in succ(v) {
                if !reached[w] {
                    reached[w] = true;
                    stack.push(w);
                }
            }
        }
        for f in (0..total).filter(|&v| reached[v] && a.is_final[v / len]) {
            let mut seen = vec![false; total];
            let mut stack: Vec<usize> = succ(f).collect();
            while let Some(v) = stack.pop() {
                if v == f {
                    return true;
                }
                if !seen[v] {
                    seen[v] = true;
                    stack.extend(succ(v));
                }
            }
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::parse_ba;

    const DEAD_END: &str = "q1\na,q1->q2\na,q2->q2\na,q1->q3\nb,q3->q4\na,q4->q3\nb,q3->q5\nq2\nq4";

    #[test]
    fn dead_end_example() {
        let a = parse_ba(DEAD_END).unwrap();
        assert!(accepts_lasso(&a, &LassoWord::from_chars("", "a").unwrap()).unwrap());
        assert!(accepts_lasso(&a, &LassoWord::from_chars("a", "ba").unwrap()).unwrap());
        assert!(!accepts_lasso(&a, &LassoWord::from_chars("ab", "b").unwrap()).unwrap());
    }

    #[test]
    fn no_final_states_accepts_nothing() {
        let a = parse_ba("q0\na,q0->q0\n").unwrap();
        assert!(!accepts_lasso(&a, &LassoWord::from_chars("", "a").unwrap()).unwrap());
    }

    #[test]
    fn unknown_symbol_is_an_error() {
        let a = parse_ba("q0\na,q0->q0\nq0").unwrap();
        assert_eq!(
            accepts_lasso(&a, &LassoWord::from_chars("", "z").unwrap()),
            Err(LassoError::UnknownSymbol("z".into()))
        );
        assert_eq!(LassoWord::from_chars("a", ""), Err(LassoError::EmptyLoop));
    }

    #[test]
    fn enumeration_lists_canonical_words_once() {
        let sigma = vec!["a".to_string(), "b".to_string()];
        let all = LassoWord::enumerate(&sigma, 2, 2);
        assert!(all.iter().all(LassoWord::is_canonical));
        // loops a, b, ab, ba; each nonempty stem excludes the two loops ending in its last symbol
        assert_eq!(all.len(), 4 + 2 * 2 + 4 * 2);
        let set: BTreeSet<_> = all.iter().collect();
        assert_eq!(set.len(), all.len());
    }
}
