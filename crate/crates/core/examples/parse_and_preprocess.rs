//! Parse an automaton in BA format, clean it up and write it back.
//!
//! cargo run --example parse_and_preprocess [FILE.ba]

use omega_reduce::automaton::{parse_ba, remove_dead_ends, remove_nonlive_states, serialize_ba};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let text = match std::env::args().nth(1) {
        Some(path) => std::fs::read_to_string(path)?,
        None => include_str!("../fixtures/branches.ba").to_string(),
    };
    let a = parse_ba(&text)?;
    println!(
        "{} states, {} transitions, alphabet {:?}, deterministic: {}",
        a.num_states(),
        a.num_transitions(),
        a.alphabet(),
        a.is_deterministic()
    );

    let no_dead = remove_dead_ends(&a);
    let live = remove_nonlive_states(&a);
    println!("after dead-end removal: {} states", no_dead.num_states());
    println!("after non-live removal: {} states", live.num_states());
    print!("{}", serialize_ba(&live));
    Ok(())
}
