use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use omega_reduce::automaton::GeneratorConfig;
use omega_reduce::bench::{self, CliError};
use omega_reduce::minimizer::{ApplicationMode, Method, MinimizeConfig, Optimizations, Preprocess};

#[derive(Parser)]
#[command(name = "omega-reduce", version, about = "Reduce Büchi automata with simulation games")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Tuning {
    /// Enable an optimization; when given at least once, only the listed
    /// ones are on. One of scc, reuse, history, smart-init, fast-detect,
    /// equiv-classes, purge, max-first.
    #[arg(long = "opt", value_name = "NAME")]
    opts: Vec<String>,
    /// Turn every optimization off.
    #[arg(long, conflicts_with = "opts")]
    no_opt: bool,
    #[arg(long, default_value = "dead-ends", value_name = "none|dead-ends|nonlive")]
    preprocess: Preprocess,
    #[arg(long, default_value = "sequential", value_name = "sequential|batch")]
    mode: ApplicationMode,
}

impl Tuning {
    fn config(&self, method: Method) -> Result<MinimizeConfig, String> {
        let optimizations = if self.no_opt {
            Optimizations::none()
        } else if self.opts.is_empty() {
            Optimizations::default()
        } else {
            Optimizations::from_names(self.opts.iter().map(String::as_str)).map_err(|e| e.to_string())?
        };
        Ok(MinimizeConfig {
            method,
            optimizations,
            preprocess: self.preprocess,
            application_mode: self.mode,
        })
    }
}

#[derive(Subcommand)]
enum Command {
    /// Minimize one automaton in BA format.
    Minimize {
        #[arg(long, default_value = "fair-direct", value_name = "fair|fair-direct|direct|delayed")]
        method: Method,
        #[command(flatten)]
        tuning: Tuning,
        #[arg(short, long)]
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Write a corpus of random connected automata.
    Generate {
        #[arg(long)]
        states: usize,
        #[arg(long)]
        alphabet: usize,
        #[arg(long)]
        r#final: usize,
        #[arg(long)]
        totality: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(short = 'd', long)]
        dir: PathBuf,
    },
    /// Minimize every .ba file of a directory and write the stats CSV.
    Bench {
        #[arg(short = 'd', long)]
        dir: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "fair,direct,delayed")]
        methods: Vec<Method>,
        #[command(flatten)]
        tuning: Tuning,
        #[arg(short, long)]
        output: PathBuf,
    },
}

fn fail(e: &CliError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Minimize {
            method,
            tuning,
            input,
            output,
        } => {
            let cfg = match tuning.config(method) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            };
            match bench::minimize_file(&input, &output, &cfg) {
                Ok(stats) => {
                    if stats.q_in > 0 && stats.q_out == 0 {
                        eprintln!("warning: preprocessing left an empty automaton (empty language)");
                    }
                    println!("{}", bench::stats_line(method, &stats));
                    ExitCode::SUCCESS
                }
                Err(e) => fail(&e),
            }
        }
        Command::Generate {
            states,
            alphabet,
            r#final,
            totality,
            seed,
            count,
            dir,
        } => {
            let cfg = GeneratorConfig {
                n_states: states,
                alphabet_size: alphabet,
                n_final: r#final,
                totality,
                seed,
            };
            match bench::generate_corpus(&cfg, count, &dir) {
                Ok(paths) => {
                    println!("wrote {} automata to {}", paths.len(), dir.display());
                    ExitCode::SUCCESS
                }
                Err(e) => fail(&e),
            }
        }
        Command::Bench {
            dir,
            methods,
            tuning,
            output,
        } => {
            let base = match tuning.config(Method::default()) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            };
            let files = match bench::corpus_files(&dir) {
                Ok(f) => f,
                Err(e) => return fail(&e),
            };
            let run = bench::run_bench(&files, &methods, &base);
            for (file, e) in &run.failures {
                eprintln!("failed: {file}: {e}");
            }
            let written = File::create(&output)
                .map_err(|source| CliError::Io {
                    path: output.clone(),
                    source,
                })
                .and_then(|f| bench::write_csv(&run.records, &methods, BufWriter::new(f)));
            if let Err(e) = written {
                return fail(&e);
            }
            println!("{} runs, {} failures, csv at {}", run.records.len(), run.failures.len(), output.display());
            if run.failures.is_empty() {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
