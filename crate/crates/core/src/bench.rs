//! Corpus generation, batch runs and the stats CSV behind the command-line
//! tool.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use thiserror::Error;

use crate::automaton::{parse_ba, random_automaton, serialize_ba, GeneratorConfig, GeneratorError, ParseError};
use crate::minimizer::{minimize, Method, MinimizeConfig, MinimizeError, MinimizeStats};

pub const CSV_HEADER: [&str; 10] = [
    "file",
    "method",
    "time_s",
    "Q",
    "Delta",
    "V",
    "E",
    "infinity",
    "states_removed",
    "transitions_removed",
];

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: ParseError },
    #[error(transparent)]
    Generator(#[from] GeneratorError),
    #[error("{path}: {source}")]
    Minimize { path: PathBuf, source: MinimizeError },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse { .. } | CliError::Generator(_) => 2,
            CliError::Minimize { .. } => 3,
            CliError::Io { .. } | CliError::Csv(_) => 1,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// One minimization run of one corpus file.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub file: String,
    pub method: Method,
    pub stats: MinimizeStats,
}

/// Reads, minimizes and writes one automaton.
pub fn minimize_file(input: &Path, output: &Path, cfg: &MinimizeConfig) -> Result<MinimizeStats, CliError> {
    let text = fs::read_to_string(input).map_err(io_err(input))?;
    let a = parse_ba(&text).map_err(|source| CliError::Parse {
        path: input.to_path_buf(),
        source,
    })?;
    let (out, stats) = minimize(&a, cfg).map_err(|source| CliError::Minimize {
        path: input.to_path_buf(),
        source,
    })?;
    fs::write(output, serialize_ba(&out)).map_err(io_err(output))?;
    Ok(stats)
}

pub fn stats_line(method: Method, s: &MinimizeStats) -> String {
    let t = s.transitions_removed.map_or("-".to_string(), |t| t.to_string());
    format!(
        "method={method} time={:.6}s Q={} Delta={} V={} E={} infinity={} s={} t={t} Q_out={} Delta_out={}",
        s.elapsed_seconds, s.q_in, s.delta_in, s.game_vertices, s.game_edges, s.infinity_bound, s.states_removed, s.q_out, s.delta_out,
    )
}

/// Seed used for the automaton at `index` of a corpus generated from
/// `seed`.
pub fn corpus_seed(seed: u64, index: usize) -> u64 {
    seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(index as u64)
}

pub fn corpus_file_name(seed: u64, index: usize) -> String {
    format!("auto_{seed}_{index}.ba")
}

/// Writes `count` random automata into `dir`, creating it if needed.
pub fn generate_corpus(cfg: &GeneratorConfig, count: usize, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    cfg.validate()?;
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut paths = Vec::with_capacity(count);
    for i in 0..count {
        let a = random_automaton(&GeneratorConfig {
            seed: corpus_seed(cfg.seed, i),
            ..*cfg
        })?;
        let path = dir.join(corpus_file_name(cfg.seed, i));
        fs::write(&path, serialize_ba(&a)).map_err(io_err(&path))?;
        paths.push(path);
    }
    Ok(paths)
}

/// The `.ba` files of `dir`, sorted by name.
pub fn corpus_files(dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let mut files = Vec::new();
    for entry in fs::read_dir(dir).map_err(io_err(dir))? {
        let path = entry.map_err(io_err(dir))?.path();
        if path.extension().is_some_and(|e| e == "ba") {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

#[derive(Debug, Default)]
pub struct BenchRun {
    /// In (file, method) order.
    pub records: Vec<RunRecord>,
    pub failures: Vec<(String, CliError)>,
}

/// Minimizes every file with every method, in parallel. `base` supplies
/// everything but the method.
pub fn run_bench(files: &[PathBuf], methods: &[Method], base: &MinimizeConfig) -> BenchRun {
    let jobs: Vec<(&PathBuf, Method)> = files.iter().flat_map(|f| methods.iter().map(move |&m| (f, m))).collect();
    let results: Vec<Result<RunRecord, (String, CliError)>> = jobs
        .par_iter()
        .map(|&(path, method)| {
            let name = path.file_name().map_or_else(|| path.display().to_string(), |n| n.to_string_lossy().into_owned());
            let run = || -> Result<RunRecord, CliError> {
                let text = fs::read_to_string(path).map_err(io_err(path))?;
                let a = parse_ba(&text).map_err(|source| CliError::Parse {
                    path: path.clone(),
                    source,
                })?;
                let cfg = MinimizeConfig { method, ..*base };
                let start = Instant::now();
                let (_, mut stats) = minimize(&a, &cfg).map_err(|source| CliError::Minimize {
                    path: path.clone(),
                    source,
                })?;
                stats.elapsed_seconds = start.elapsed().as_secs_f64();
                Ok(RunRecord {
                    file: name.clone(),
                    method,
                    stats,
                })
            };
            run().map_err(|e| (name.clone(), e))
        })
        .collect();
    let mut out = BenchRun::default();
    for r in results {
        match r {
            Ok(rec) => out.records.push(rec),
            Err(f) => out.failures.push(f),
        }
    }
    out
}

fn record_row(r: &RunRecord) -> Vec<String> {
    let s = &r.stats;
    vec![
        r.file.clone(),
        r.method.to_string(),
        s.elapsed_seconds.to_string(),
        s.q_in.to_string(),
        s.delta_in.to_string(),
        s.game_vertices.to_string(),
        s.game_edges.to_string(),
        s.infinity_bound.to_string(),
        s.states_removed.to_string(),
        s.transitions_removed.map_or(String::new(), |t| t.to_string()),
    ]
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

fn mean_row(method: Method, records: &[&RunRecord]) -> Vec<String> {
    let col = |f: &dyn Fn(&MinimizeStats) -> Option<f64>| {
        mean(records.iter().filter_map(|r| f(&r.stats))).map_or(String::new(), |m| m.to_string())
    };
    vec![
        "mean".to_string(),
        method.to_string(),
        col(&|s| Some(s.elapsed_seconds)),
        col(&|s| Some(s.q_in as f64)),
        col(&|s| Some(s.delta_in as f64)),
        col(&|s| Some(s.game_vertices as f64)),
        col(&|s| Some(s.game_edges as f64)),
        col(&|s| Some(s.infinity_bound as f64)),
        col(&|s| Some(s.states_removed as f64)),
        col(&|s| s.transitions_removed.map(|t| t as f64)),
    ]
}

/// Writes the header, one row per record and one mean row per method, in
/// the order of `methods`.
pub fn write_csv<W: Write>(records: &[RunRecord], methods: &[Method], out: W) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.write_record(record_row(r))?;
    }
    for &m in methods {
        let rows: Vec<&RunRecord> = records.iter().filter(|r| r.method == m).collect();
        if !rows.is_empty() {
            w.write_record(mean_row(m, &rows))?;
        }
    }
    w.flush().map_err(|source| CliError::Io {
        path: PathBuf::from("<csv>"),
        source,
    })?;
    Ok(())
}
