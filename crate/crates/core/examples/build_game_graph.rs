//! Build the three simulation games for a small automaton and print them.

use omega_reduce::automaton::parse_ba;
use omega_reduce::game_graph::{build_game_graph, Flavor};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let a = parse_ba(include_str!("../fixtures/two_state.ba"))?;
    for flavor in [Flavor::Direct, Flavor::Delayed, Flavor::Fair] {
        let g = build_game_graph(&a, &a, flavor)?;
        println!(
            "{flavor:?}: |V| = {} (V0 {}, V1 {}), |E| = {}, priority-1 vertices = {}",
            g.num_vertices(),
            g.num_v0(),
            g.num_v1(),
            g.num_edges(),
            g.num_priority_one()
        );
        if flavor == Flavor::Fair {
            // name priority -> successors
            print!("{}", g.debug_dump());
        }
    }
    Ok(())
}
