//! Generate a corpus, minimize it with three methods and print the CSV.

use omega_reduce::automaton::GeneratorConfig;
use omega_reduce::bench::{corpus_files, generate_corpus, run_bench, write_csv};
use omega_reduce::minimizer::{Method, MinimizeConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join(format!("omega-reduce-bench-{}", std::process::id()));
    let cfg = GeneratorConfig {
        n_states: 15,
        alphabet_size: 2,
        n_final: 3,
        totality: 0.6,
        seed: 7,
    };
    generate_corpus(&cfg, 8, &dir)?;

    let methods = [Method::Fair, Method::Direct, Method::Delayed];
    let run = run_bench(&corpus_files(&dir)?, &methods, &MinimizeConfig::default());
    for (file, e) in &run.failures {
        eprintln!("{file}: {e}");
    }
    write_csv(&run.records, &methods, std::io::stdout())?;
    std::fs::remove_dir_all(&dir)?;
    Ok(())
}
