use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_omega-reduce"))
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(format!("{name}.ba"))
}

fn run(cmd: &mut Command) -> Output {
    cmd.output().expect("spawn omega-reduce")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn minimize(name: &str, method: &str, out: &Path) -> Output {
    run(bin()
        .args(["minimize", "--method", method, "-i"])
        .arg(fixture(name))
        .arg("-o")
        .arg(out))
}

#[test]
fn minimize_keeps_a_minimal_automaton() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out.ba");
    let o = minimize("two_state", "fair", &out);
    assert!(o.status.success(), "{o:?}");
    let line = stdout(&o);
    assert!(line.contains(" s=0 "), "{line}");
    assert!(line.contains(" t=0 "), "{line}");
    let parse = |p: &Path| omega_reduce::automaton::parse_ba(&fs::read_to_string(p).unwrap()).unwrap();
    assert_eq!(parse(&out), parse(&fixture("two_state")));
}

#[test]
fn minimize_removes_the_redundant_transition() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out.ba");
    let o = minimize("redundant_edge", "fair", &out);
    assert!(o.status.success(), "{o:?}");
    assert!(stdout(&o).contains(" t=1 "), "{}", stdout(&o));
    assert!(!fs::read_to_string(&out).unwrap().contains("a,q0->q1"));
}

#[test]
fn empty_result_is_a_warning() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out.ba");
    let o = minimize("single", "fair-direct", &out);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("warning"));
    assert_eq!(fs::read_to_string(&out).unwrap(), "");
}

#[test]
fn malformed_input_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.ba");
    fs::write(&bad, "q0\na,q0-q1\nq0\n").unwrap();
    let o = run(bin().args(["minimize", "-i"]).arg(&bad).arg("-o").arg(dir.path().join("o.ba")));
    assert_eq!(o.status.code(), Some(2));
    let o = run(bin().args(["minimize", "-i"]).arg(dir.path().join("missing.ba")).arg("-o").arg("x"));
    assert_eq!(o.status.code(), Some(1));
}

fn generate(dir: &Path, count: usize, seed: u64) -> Output {
    run(bin()
        .args(["generate", "--states", "15", "--alphabet", "2", "--final", "3", "--totality", "0.3"])
        .args(["--seed", &seed.to_string(), "--count", &count.to_string(), "-d"])
        .arg(dir))
}

fn ba_files(dir: &Path) -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "ba"))
        .collect();
    v.sort();
    v
}

#[test]
fn generate_is_deterministic() {
    let x = tempfile::tempdir().unwrap();
    let y = tempfile::tempdir().unwrap();
    assert!(generate(x.path(), 3, 11).status.success());
    assert!(generate(y.path(), 3, 11).status.success());
    let (fx, fy) = (ba_files(x.path()), ba_files(y.path()));
    assert_eq!(fx.len(), 3);
    for (a, b) in fx.iter().zip(&fy) {
        assert_eq!(a.file_name(), b.file_name());
        assert_eq!(fs::read(a).unwrap(), fs::read(b).unwrap());
    }

    let empty = tempfile::tempdir().unwrap();
    assert!(generate(empty.path(), 0, 11).status.success());
    assert!(ba_files(empty.path()).is_empty());

    let o = run(bin()
        .args(["generate", "--states", "3", "--alphabet", "1", "--final", "5", "--totality", "0.5", "-d"])
        .arg(empty.path()));
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bench_writes_one_row_per_run_and_means() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus");
    assert!(generate(&corpus, 4, 3).status.success());
    let csv_path = dir.path().join("bench.csv");
    let o = run(bin().args(["bench", "-d"]).arg(&corpus).arg("-o").arg(&csv_path));
    assert!(o.status.success(), "{o:?}");
    let text = fs::read_to_string(&csv_path).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "file,method,time_s,Q,Delta,V,E,infinity,states_removed,transitions_removed"
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 4 * 3 + 3);
    assert_eq!(rows.iter().filter(|r| r.starts_with("mean,")).count(), 3);
}
