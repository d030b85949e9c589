use std::collections::BTreeSet;

use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::{BuchiAutomaton, Transition};

/// Parameters of [`random_automaton`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratorConfig {
    pub n_states: usize,
    pub alphabet_size: usize,
    pub n_final: usize,
    /// Fraction of (state, symbol) pairs that get at least one transition.
    pub totality: f64,
    pub seed: u64,
}

#[derive(Debug, Error, PartialEq)]
pub enum GeneratorError {
    #[error("n_states must be positive")]
    NoStates,
    #[error("alphabet_size must be positive")]
    NoSymbols,
    #[error("n_final = {n_final} exceeds n_states = {n_states}")]
    TooManyFinals { n_final: usize, n_states: usize },
    #[error("totality {0} is outside [0, 1]")]
    Totality(f64),
}

impl GeneratorConfig {
    pub fn validate(&self) -> Result<(), GeneratorError> {
        if self.n_states == 0 {
            return Err(GeneratorError::NoStates);
        }
        if self.alphabet_size == 0 {
            return Err(GeneratorError::NoSymbols);
        }
        if self.n_final > self.n_states {
            return Err(GeneratorError::TooManyFinals {
                n_final: self.n_final,
                n_states: self.n_states,
            });
        }
        if !(0.0..=1.0).contains(&self.totality) {
            return Err(GeneratorError::Totality(self.totality));
        }
        Ok(())
    }
}

/// Symbol names `a`..`z`, or `s0`, `s1`, … for larger alphabets.
pub fn symbol_names(k: usize) -> Vec<String> {
    if k <= 26 {
        (0..k).map(|i| ((b'a' + i as u8) as char).to_string()).collect()
    } else {
        (0..k).map(|i| format!("s{i}")).collect()
    }
}

/// A seeded random automaton in which every state is reachable from the
/// single initial state `q0`.
///
/// A random spanning tree rooted at `q0` provides connectivity. Uniformly
/// drawn transitions are then added until `ceil(totality · n · k)` distinct
/// (state, symbol) pairs have an outgoing transition. Final states are drawn
/// without replacement.
pub fn random_automaton(cfg: &GeneratorConfig) -> Result<BuchiAutomaton, GeneratorError> {
    cfg.validate()?;
    let n = cfg.n_states;
    let k = cfg.alphabet_size;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let names: Vec<String> = (0..n).map(|i| format!("q{i}")).collect();
    let symbols = symbol_names(k);

    let mut order: Vec<usize> = (1..n).collect();
    order.shuffle(&mut rng);
    order.insert(0, 0);

    let mut edges: BTreeSet<(usize, usize, usize)> = BTreeSet::new();
    let mut covered: BTreeSet<(usize, usize)> = BTreeSet::new();
    for i in 1..n {
        let parent = order[rng.gen_range(0..i)];
        let sym = rng.gen_range(0..k);
        edges.insert((parent, sym, order[i]));
        covered.insert((parent, sym));
    }

    let target = ((cfg.totality * (n * k) as f64).ceil() as usize).min(n * k);
    while covered.len() < target {
        let src = rng.gen_range(0..n);
        let sym = rng.gen_range(0..k);
        let dst = rng.gen_range(0..n);
        edges.insert((src, sym, dst));
        covered.insert((src, sym));
    }

    let finals = index::sample(&mut rng, n, cfg.n_final);
    Ok(BuchiAutomaton::from_parts(
        [names[0].clone()],
        edges
            .into_iter()
            .map(|(s, a, d)| Transition::new(names[s].clone(), symbols[a].clone(), names[d].clone())),
        finals.into_iter().map(|i| names[i].clone()),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::remove_unreachable_states;

    fn cfg(n: usize, k: usize, f: usize, t: f64, seed: u64) -> GeneratorConfig {
        GeneratorConfig {
            n_states: n,
            alphabet_size: k,
            n_final: f,
            totality: t,
            seed,
        }
    }

    #[test]
    fn table_shaped_instance() {
        for seed in 0..5 {
            let a = random_automaton(&cfg(100, 5, 10, 0.05, seed)).unwrap();
            assert_eq!(a.num_states(), 100);
            assert!(a.num_transitions() >= 99);
            assert_eq!(a.final_states().len(), 10);
            assert_eq!(a.initial().len(), 1);
            assert_eq!(remove_unreachable_states(&a).num_states(), 100);
        }
    }

    #[test]
    fn single_state_self_loop() {
        let a = random_automaton(&cfg(1, 1, 1, 1.0, 3)).unwrap();
        assert_eq!(a.num_states(), 1);
        assert!(a.has_transition(&Transition::new("q0", "a", "q0")));
        assert!(a.is_final("q0"));
    }

    #[test]
    fn seed_determinism() {
        let c = cfg(20, 3, 4, 0.4, 99);
        assert_eq!(random_automaton(&c).unwrap(), random_automaton(&c).unwrap());
        assert_ne!(
            random_automaton(&c).unwrap(),
            random_automaton(&GeneratorConfig { seed: 100, ..c }).unwrap()
        );
    }

    #[test]
    fn totality_target_is_met() {
        let a = random_automaton(&cfg(10, 2, 2, 0.75, 1)).unwrap();
        let pairs: BTreeSet<_> = a.transitions().iter().map(|t| (&t.src, &t.symbol)).collect();
        assert!(pairs.len() >= 15);
    }

    #[test]
    fn invalid_configs() {
        assert_eq!(random_automaton(&cfg(0, 1, 0, 0.5, 0)), Err(GeneratorError::NoStates));
        assert_eq!(random_automaton(&cfg(2, 0, 0, 0.5, 0)), Err(GeneratorError::NoSymbols));
        assert!(matches!(
            random_automaton(&cfg(2, 1, 3, 0.5, 0)),
            Err(GeneratorError::TooManyFinals { .. })
        ));
        assert_eq!(random_automaton(&cfg(2, 1, 1, 1.5, 0)), Err(GeneratorError::Totality(1.5)));
    }
}
