mod common;

use common::{brute_accepts, lasso_difference, member, small_automaton, small_live_automaton, zielonka_duplicator_wins};
use omega_reduce::automaton::{
    parse_ba, remove_dead_ends, remove_nonlive_states, serialize_ba, GeneratorConfig, LassoOracle,
    LassoWord, Transition,
};
use omega_reduce::bench::{generate_corpus, run_bench, write_csv};
use omega_reduce::game_graph::{add_transitions_spoiler, build_game_graph, remove_transitions_duplicator, Flavor};
use omega_reduce::minimizer::{
    candidate_merges, compute_relation, fair_direct_prepass, minimize, try_merge, ApplicationMode, Method,
    MinimizeConfig,
};
use omega_reduce::solver::{solve, SolverConfig};
use proptest::prelude::*;

fn alphabet(k: usize) -> Vec<String> {
    ["a", "b", "c"][..k].iter().map(|s| s.to_string()).collect()
}

fn quiet() -> SolverConfig<'static> {
    SolverConfig::default()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn serialize_parse_round_trip(seed in 0u64..10_000) {
        let a = small_automaton(seed, 8, 3);
        let text = serialize_ba(&a);
        prop_assert_eq!(parse_ba(&text).unwrap(), a);
        prop_assert_eq!(serialize_ba(&parse_ba(&text).unwrap()), text);
    }

    #[test]
    fn lasso_oracle_matches_product_closure(seed in 0u64..10_000) {
        let a = small_automaton(seed, 5, 2);
        let o = LassoOracle::new(&a);
        let sigma: Vec<String> = a.alphabet().iter().cloned().collect();
        for w in LassoWord::enumerate(&sigma, 3, 3) {
            prop_assert_eq!(member(&o, &w), brute_accepts(&a, &w), "{:?}", w);
        }
    }

    #[test]
    fn preprocessing_keeps_the_language(seed in 0u64..10_000) {
        let a = small_automaton(seed, 6, 2);
        let sigma = alphabet(2);
        prop_assert!(lasso_difference(&a, &remove_dead_ends(&a), &sigma, 4, 4).is_none());
        prop_assert!(lasso_difference(&a, &remove_nonlive_states(&a), &sigma, 4, 4).is_none());
    }

    #[test]
    fn winning_sets_match_zielonka(seed in 0u64..10_000, f in 0usize..3) {
        let a = small_live_automaton(seed, 5, 2);
        let flavor = [Flavor::Fair, Flavor::Delayed, Flavor::Direct][f];
        let g = build_game_graph(&a, &a, flavor).unwrap();
        let pm = solve(&g, &quiet()).measure;
        let oracle = zielonka_duplicator_wins(&g);
        for v in g.vertex_ids() {
            prop_assert_eq!(pm.mu(v).is_finite(), oracle[v as usize], "{}", g.vertex_name(v));
        }
    }

    #[test]
    fn undo_restores_the_graph(seed in 0u64..10_000, s in 0usize..64, d in 0usize..64) {
        let a = small_live_automaton(seed, 6, 2);
        let mut g = build_game_graph(&a, &a, Flavor::Fair).unwrap();
        let before = g.clone();
        let states: Vec<&String> = a.states().iter().collect();
        let sym = a.alphabet().iter().next().unwrap().clone();
        let t = Transition::new(states[s % states.len()], &sym, states[d % states.len()]);
        if !a.has_transition(&t) {
            let added = add_transitions_spoiler(&mut g, &[t]).unwrap();
            g.undo(&added);
            prop_assert!(g.identical(&before));
        }
        let ts: Vec<&Transition> = a.transitions().iter().collect();
        let r = ts[s % ts.len()].clone();
        let removed = remove_transitions_duplicator(&mut g, &[r]).unwrap();
        g.undo(&removed);
        prop_assert!(g.identical(&before));
    }

    #[test]
    fn direct_prepass_merges_pass_the_fair_check(seed in 0u64..10_000) {
        let a = small_live_automaton(seed, 6, 2);
        let mut g = build_game_graph(&a, &a, Flavor::Fair).unwrap();
        let direct = fair_direct_prepass(&mut g);
        let cfg = MinimizeConfig::with_method(Method::Fair);
        for (p, q) in candidate_merges(&direct) {
            let mut g = build_game_graph(&a, &a, Flavor::Fair).unwrap();
            let mut base = solve(&g, &quiet()).measure;
            prop_assert!(try_merge(&a, &mut g, &mut base, &p, &q, &cfg).unwrap().accepted, "{},{}", p, q);
        }
    }

    #[test]
    fn output_size_is_bounded_by_closure(seed in 0u64..10_000, m in 0usize..4) {
        let a = small_automaton(seed, 7, 2);
        let (out, stats) = minimize(&a, &MinimizeConfig::with_method(Method::ALL[m])).unwrap();
        prop_assert!(out.num_transitions() <= a.num_transitions() + stats.closure_transitions);
        prop_assert!(out.num_states() <= a.num_states());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    // Batch mode unions classes and skips the solver for pairs already in
    // one class; a forced check of such a pair must agree.
    #[test]
    fn class_shortcut_agrees_with_forced_check(seed in 0u64..10_000) {
        let a = small_live_automaton(seed, 6, 2);
        let rel = compute_relation(&a, Flavor::Fair).unwrap();
        let cfg = MinimizeConfig::with_method(Method::Fair);
        let accepted = |p: &str, q: &str| {
            let mut g = build_game_graph(&a, &a, Flavor::Fair).unwrap();
            let mut base = solve(&g, &quiet()).measure;
            try_merge(&a, &mut g, &mut base, p, q, &cfg).unwrap().accepted
        };
        let pairs: Vec<(String, String)> =
            candidate_merges(&rel).into_iter().filter(|(p, q)| accepted(p, q)).collect();
        for (x, y) in &pairs {
            for (y2, z) in &pairs {
                let z = if y == y2 && x != z { z } else if y == z && x != y2 { y2 } else { continue };
                prop_assert!(accepted(x, z), "{} {} {}", x, y, z);
            }
        }
        let batch = MinimizeConfig { application_mode: ApplicationMode::Batch, ..cfg };
        let (out, _) = minimize(&a, &batch).unwrap();
        prop_assert!(lasso_difference(&a, &out, &alphabet(2), 4, 4).is_none());
    }
}

#[test]
fn csv_rows_reparse_with_exact_means() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = GeneratorConfig {
        n_states: 12,
        alphabet_size: 2,
        n_final: 3,
        totality: 0.4,
        seed: 5,
    };
    let files = generate_corpus(&cfg, 6, dir.path()).unwrap();
    let methods = [Method::Fair, Method::Direct, Method::Delayed];
    let run = run_bench(&files, &methods, &MinimizeConfig::default());
    assert!(run.failures.is_empty());
    let mut buf = Vec::new();
    write_csv(&run.records, &methods, &mut buf).unwrap();

    let mut rd = csv::Reader::from_reader(buf.as_slice());
    let rows: Vec<csv::StringRecord> = rd.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), files.len() * methods.len() + methods.len());
    for m in methods {
        let data: Vec<&csv::StringRecord> = rows.iter().filter(|r| &r[0] != "mean" && r[1] == *m.name()).collect();
        let mean = rows.iter().find(|r| &r[0] == "mean" && r[1] == *m.name()).unwrap();
        assert_eq!(data.len(), files.len());
        for col in [3, 4, 5, 6, 7, 8] {
            let avg: f64 = data.iter().map(|r| r[col].parse::<f64>().unwrap()).sum::<f64>() / data.len() as f64;
            let got: f64 = mean[col].parse().unwrap();
            assert!((got - avg).abs() <= 1e-9 * avg.abs().max(1.0), "{m} col {col}: {got} vs {avg}");
        }
        let tr: Vec<&str> = data.iter().map(|r| &r[9]).collect();
        if m == Method::Direct || m == Method::Delayed {
            assert!(tr.iter().all(|c| c.is_empty()));
        } else {
            assert!(tr.iter().all(|c| c.parse::<usize>().is_ok()));
        }
    }
}
