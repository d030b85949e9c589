//! Solve a fair simulation game and read the relation off the fixed point.
//!
//! Set OMEGA_REDUCE_TRACE=1 to watch every lift.

use omega_reduce::automaton::parse_ba;
use omega_reduce::game_graph::{build_game_graph, Flavor};
use omega_reduce::minimizer::extract_relation;
use omega_reduce::solver::{solve, solve_naive, SolverConfig, WorkOrder};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let a = parse_ba(include_str!("../fixtures/b_omega.ba"))?;
    let g = build_game_graph(&a, &a, Flavor::Fair)?;

    let sol = solve(&g, &SolverConfig::default());
    println!("n = {}, pops = {}", sol.measure.n(), sol.stats.pops);
    for v in g.vertex_ids() {
        println!("  mu{} = {}", g.vertex(v), sol.measure.mu(v));
    }

    let naive = solve_naive(&g);
    println!("worklist solver agrees with naive lifting: {}", naive.same_values(&sol.measure, &g));

    let scc = solve(
        &g,
        &SolverConfig {
            use_scc_bounds: true,
            work_order: WorkOrder::MaxMeasureFirst,
            ..SolverConfig::default()
        },
    );
    println!("scc run pops = {}", scc.stats.pops);

    let rel = extract_relation(&sol, &g)?;
    for (q, q2) in rel.pairs() {
        println!("  {q} <=f {q2}");
    }
    Ok(())
}
