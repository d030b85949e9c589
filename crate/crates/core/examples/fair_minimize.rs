//! Minimize automata with every method and check the language on lasso
//! words.

use omega_reduce::automaton::{parse_ba, serialize_ba, LassoOracle, LassoWord};
use omega_reduce::minimizer::{minimize, Method, MinimizeConfig, Preprocess};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let fixtures = [
        ("branches", include_str!("../fixtures/branches.ba")),
        ("two_state", include_str!("../fixtures/two_state.ba")),
        ("merge_and_remove", include_str!("../fixtures/merge_and_remove.ba")),
        ("redundant_edge", include_str!("../fixtures/redundant_edge.ba")),
    ];
    for (name, text) in fixtures {
        let a = parse_ba(text)?;
        let words = LassoWord::enumerate(&a.alphabet().iter().cloned().collect::<Vec<_>>(), 4, 4);
        let before = LassoOracle::new(&a);
        for method in Method::ALL {
            let cfg = MinimizeConfig {
                method,
                preprocess: Preprocess::Nonlive,
                ..Default::default()
            };
            let (m, stats) = minimize(&a, &cfg)?;
            let after = LassoOracle::new(&m);
            let same = words.iter().all(|w| before.accepts(w) == after.accepts(w));
            println!(
                "{name} {method}: {} -> {} states, {} -> {} transitions, language kept on {} words: {same}",
                stats.q_in,
                stats.q_out,
                stats.delta_in,
                stats.delta_out,
                words.len()
            );
        }
    }

    let a = parse_ba(include_str!("../fixtures/merge_and_remove.ba"))?;
    let (m, _) = minimize(&a, &MinimizeConfig::with_method(Method::Fair))?;
    print!("merge_and_remove reduced:\n{}", serialize_ba(&m));
    Ok(())
}
