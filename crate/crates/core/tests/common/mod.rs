#![allow(dead_code)]

use omega_reduce::automaton::{
    random_automaton, remove_dead_ends, BuchiAutomaton, GeneratorConfig, LassoError, LassoOracle, LassoWord,
};
use omega_reduce::game_graph::{GameGraph, Owner, VertexId};

pub fn fixture(name: &str) -> BuchiAutomaton {
    let path = format!("{}/fixtures/{name}.ba", env!("CARGO_MANIFEST_DIR"));
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"));
    omega_reduce::automaton::parse_ba(&text).unwrap()
}

/// Small random automaton with at most `max_states` states and a one- or
/// two-letter alphabet, derived from `seed`.
pub fn small_automaton(seed: u64, max_states: usize, max_alphabet: usize) -> BuchiAutomaton {
    let n = 1 + (seed as usize * 7 + 3) % max_states;
    let k = 1 + (seed as usize / 3) % max_alphabet;
    let n_final = (seed as usize / 5) % (n + 1);
    let totality = [0.3, 0.5, 0.7, 0.9, 1.0][(seed as usize / 11) % 5];
    random_automaton(&GeneratorConfig {
        n_states: n,
        alphabet_size: k,
        n_final,
        totality,
        seed,
    })
    .unwrap()
}

/// Same as [`small_automaton`] but without dead ends and never empty.
pub fn small_live_automaton(seed: u64, max_states: usize, max_alphabet: usize) -> BuchiAutomaton {
    let mut s = seed;
    loop {
        let a = remove_dead_ends(&small_automaton(s, max_states, max_alphabet));
        if a.num_states() > 0 {
            return a;
        }
        s += 1_000_003;
    }
}

/// Membership with symbols the automaton never uses counting as rejection.
pub fn member(o: &LassoOracle, w: &LassoWord) -> bool {
    match o.accepts(w) {
        Ok(b) => b,
        Err(LassoError::UnknownSymbol(_)) => false,
        Err(e) => panic!("{e}"),
    }
}

/// Independent membership test: full product of the automaton with the
/// lasso's own deterministic automaton, transitive closure by Warshall, and
/// acceptance iff a reachable final product node lies on a cycle.
pub fn brute_accepts(a: &BuchiAutomaton, w: &LassoWord) -> bool {
    let states: Vec<&String> = a.states().iter().collect();
    let pos = w.stem.len() + w.period.len();
    let n = states.len() * pos;
    let idx = |q: usize, i: usize| q * pos + i;
    let letter = |i: usize| if i < w.stem.len() { &w.stem[i] } else { &w.period[i - w.stem.len()] };
    let next = |i: usize| if i + 1 < pos { i + 1 } else { w.stem.len() };
    let mut reach = vec![vec![false; n]; n];
    for (qi, q) in states.iter().enumerate() {
        for i in 0..pos {
            for t in a.outgoing(q) {
                if &t.symbol == letter(i) {
                    let di = states.iter().position(|s| **s == t.dst).unwrap();
                    reach[idx(qi, i)][idx(di, next(i))] = true;
                }
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            if reach[i][k] {
                for j in 0..n {
                    if reach[k][j] {
                        reach[i][j] = true;
                    }
                }
            }
        }
    }
    let starts: Vec<usize> = states
        .iter()
        .enumerate()
        .filter(|(_, q)| a.is_initial(q))
        .map(|(i, _)| idx(i, 0))
        .collect();
    (0..states.len()).any(|qi| {
        a.is_final(states[qi])
            && (w.stem.len()..pos).any(|i| {
                let v = idx(qi, i);
                reach[v][v] && starts.iter().any(|&s| s == v || reach[s][v])
            })
    })
}

/// Language equality on every canonical lasso word with bounded stem and
/// loop over `alphabet`. Returns the first disagreement.
pub fn lasso_difference(
    x: &BuchiAutomaton,
    y: &BuchiAutomaton,
    alphabet: &[String],
    max_stem: usize,
    max_loop: usize,
) -> Option<LassoWord> {
    let ox = LassoOracle::new(x);
    let oy = LassoOracle::new(y);
    LassoWord::enumerate(alphabet, max_stem, max_loop)
        .into_iter()
        .find(|w| member(&ox, w) != member(&oy, w))
}

/// Duplicator's winning region, computed by Zielonka's recursive algorithm.
/// A play is won by Duplicator iff the least priority seen infinitely often
/// is even; a player who cannot move makes Duplicator lose.
pub fn zielonka_duplicator_wins(g: &GameGraph) -> Vec<bool> {
    let cap = g.capacity();
    let mut present = vec![false; cap];
    for v in g.vertex_ids() {
        present[v as usize] = true;
    }
    let succ: Vec<Vec<VertexId>> = (0..cap as VertexId)
        .map(|v| if present[v as usize] { g.successors(v).collect() } else { Vec::new() })
        .collect();
    let mut pred: Vec<Vec<VertexId>> = vec![Vec::new(); cap];
    for v in 0..cap {
        for &w in &succ[v] {
            pred[w as usize].push(v as VertexId);
        }
    }
    // max-parity with player 0 = Duplicator: p' = 2 - p keeps parity
    let prio: Vec<u8> = (0..cap as VertexId)
        .map(|v| if present[v as usize] && succ[v as usize].is_empty() { 1 } else if present[v as usize] { 2 - g.priority(v) } else { 0 })
        .collect();
    let player: Vec<u8> = (0..cap as VertexId)
        .map(|v| if !present[v as usize] { 0 } else if g.owner(v) == Owner::Duplicator { 0 } else { 1 })
        .collect();
    let game = Game { succ, pred, prio, player };
    let (w0, _) = game.solve(&present);
    w0
}

struct Game {
    succ: Vec<Vec<VertexId>>,
    pred: Vec<Vec<VertexId>>,
    prio: Vec<u8>,
    player: Vec<u8>,
}

impl Game {
    /// Dead ends are treated as self-loops, so the moves of `v` in the
    /// subgame `s` are its successors in `s`, or `v` itself.
    fn moves(&self, v: usize, s: &[bool]) -> Vec<usize> {
        if self.succ[v].is_empty() {
            return vec![v];
        }
        self.succ[v].iter().map(|&w| w as usize).filter(|&w| s[w]).collect()
    }

    fn attractor(&self, s: &[bool], target: &[bool], p: u8) -> Vec<bool> {
        let mut attr = target.to_vec();
        let mut changed = true;
        while changed {
            changed = false;
            for v in 0..s.len() {
                if !s[v] || attr[v] {
                    continue;
                }
                let m = self.moves(v, s);
                let hit = if self.player[v] == p {
                    m.iter().any(|&w| attr[w])
                } else {
                    !m.is_empty() && m.iter().all(|&w| attr[w])
                };
                if hit {
                    attr[v] = true;
                    changed = true;
                }
            }
        }
        attr
    }

    fn solve(&self, s: &[bool]) -> (Vec<bool>, Vec<bool>) {
        let n = s.len();
        let Some(d) = (0..n).filter(|&v| s[v]).map(|v| self.prio[v]).max() else {
            return (vec![false; n], vec![false; n]);
        };
        let i = d % 2;
        let u: Vec<bool> = (0..n).map(|v| s[v] && self.prio[v] == d).collect();
        let a = self.attractor(s, &u, i);
        let rest: Vec<bool> = (0..n).map(|v| s[v] && !a[v]).collect();
        let (w0, w1) = self.solve(&rest);
        let w_opp = if i == 0 { &w1 } else { &w0 };
        if !w_opp.iter().any(|&b| b) {
            let all = s.to_vec();
            return if i == 0 { (all, vec![false; n]) } else { (vec![false; n], all) };
        }
        let b = self.attractor(s, w_opp, 1 - i);
        let rest: Vec<bool> = (0..n).map(|v| s[v] && !b[v]).collect();
        let (mut w0, mut w1) = self.solve(&rest);
        let target = if i == 0 { &mut w1 } else { &mut w0 };
        for v in 0..n {
            if b[v] {
                target[v] = true;
            }
        }
        (w0, w1)
    }
}
