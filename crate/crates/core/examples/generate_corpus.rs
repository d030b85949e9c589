//! Write a small seeded corpus of random automata.
//!
//! cargo run --example generate_corpus [DIR]

use std::path::PathBuf;

use omega_reduce::automaton::{random_automaton, GeneratorConfig};
use omega_reduce::bench::generate_corpus;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = GeneratorConfig {
        n_states: 20,
        alphabet_size: 3,
        n_final: 4,
        totality: 0.4,
        seed: 2024,
    };
    let a = random_automaton(&cfg)?;
    println!("one instance: {} states, {} transitions", a.num_states(), a.num_transitions());

    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("omega-reduce-corpus"));
    let files = generate_corpus(&cfg, 10, &dir)?;
    for f in &files {
        println!("{}", f.display());
    }
    Ok(())
}
