pub mod automaton;

pub use automaton::{BuchiAutomaton, Transition};
pub mod game_graph;
pub mod solver;
pub mod minimizer;
pub use minimizer::{minimize, MinimizeConfig, MinimizeError, MinimizeStats, Method};
pub mod bench;
