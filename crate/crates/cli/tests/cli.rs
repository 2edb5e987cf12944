use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn wormnet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wormnet"))
        .args(args)
        .output()
        .expect("spawn wormnet")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn generate(dir: &Path, n: &str, worms: &str, pool: &str, seeds: &str, seed: &str) {
    let o = wormnet(&[
        "generate", "--er", n, "0.3", "--worms", worms, "--pool", pool, "--seeds", seeds,
        "--seed", seed, "--out", p(dir),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn simulate_three_node_graph() {
    let o = wormnet(&[
        "simulate",
        "--graph",
        p(&fixture("g3.txt")),
        "--states",
        p(&fixture("g3_states.txt")),
    ]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("final [1,2,2] after 1 steps"), "{out}");
    assert!(out.contains("final [0,0,0] after 0 steps"), "{out}");
}

#[test]
fn generate_is_byte_reproducible() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    generate(a.path(), "12", "2", "30", "3", "11");
    generate(b.path(), "12", "2", "30", "3", "11");
    for f in ["graph.txt", "pool.txt"] {
        assert_eq!(
            fs::read(a.path().join(f)).unwrap(),
            fs::read(b.path().join(f)).unwrap(),
            "{f}"
        );
    }
    let c = tempfile::tempdir().unwrap();
    generate(c.path(), "12", "2", "30", "3", "12");
    assert_ne!(
        fs::read(a.path().join("pool.txt")).unwrap(),
        fs::read(c.path().join("pool.txt")).unwrap()
    );
}

#[test]
fn exhaustive_verify_is_clean() {
    let d = tempfile::tempdir().unwrap();
    generate(d.path(), "5", "2", "10", "2", "3");
    let o = wormnet(&["compile-verify", "--graph", p(&d.path().join("graph.txt")), "--exhaustive"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("243/243 match, 0 mismatches"));
}

#[test]
fn corrupted_params_exit_nonzero() {
    let d = tempfile::tempdir().unwrap();
    generate(d.path(), "8", "2", "10", "2", "5");
    let text = fs::read_to_string(d.path().join("graph.txt")).unwrap();
    let bad: String = text
        .lines()
        .map(|l| {
            if let Some(rest) = l.strip_prefix("node ") {
                let id = rest.split_whitespace().next().unwrap();
                format!("node {id} 0 0\n")
            } else {
                format!("{l}\n")
            }
        })
        .collect();
    let bad_path = d.path().join("bad.txt");
    fs::write(&bad_path, bad).unwrap();
    let o = wormnet(&[
        "compile-verify",
        "--graph",
        p(&d.path().join("graph.txt")),
        "--params",
        p(&bad_path),
        "--exhaustive",
    ]);
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
}

#[test]
fn non_power_of_two_worms_rejected() {
    let d = tempfile::tempdir().unwrap();
    let o = wormnet(&[
        "generate", "--er", "6", "0.3", "--worms", "3", "--pool", "5", "--seeds", "1",
        "--out", p(d.path()),
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn missing_file_is_an_error() {
    let o = wormnet(&["simulate", "--graph", "/nonexistent/g.txt", "--states", "/nonexistent/s.txt"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!o.stderr.is_empty());
}

#[test]
fn train_then_eval() {
    let d = tempfile::tempdir().unwrap();
    generate(d.path(), "15", "2", "60", "3", "8");
    let run = d.path().join("run");
    let o = wormnet(&[
        "train", "--graph", p(&d.path().join("graph.txt")), "--pool", p(&d.path().join("pool.txt")),
        "--train", "40", "--test", "20", "--epochs", "3", "--seed", "1", "--out", p(&run),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let hist = fs::read_to_string(run.join("history.csv")).unwrap();
    assert_eq!(hist.lines().count(), 1 + 3);
    assert!(hist.starts_with("epoch,train_surrogate_loss,val_hard_loss,accuracy"));
    for f in ["params.txt", "model.cvnn"] {
        assert!(run.join(f).exists(), "{f}");
    }
    let o = wormnet(&[
        "eval", "--graph", p(&d.path().join("graph.txt")), "--params", p(&run.join("params.txt")),
        "--pool", p(&d.path().join("pool.txt")), "--train", "40", "--test", "20", "--seed", "1",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    assert!(out.contains("proposed") && out.contains("random"), "{out}");
}

#[test]
fn pool_from_another_graph_rejected() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    generate(a.path(), "10", "2", "20", "2", "1");
    generate(b.path(), "10", "2", "20", "2", "2");
    let o = wormnet(&[
        "eval", "--graph", p(&a.path().join("graph.txt")), "--params", p(&a.path().join("graph.txt")),
        "--pool", p(&b.path().join("pool.txt")),
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn report_writes_tables() {
    let d = tempfile::tempdir().unwrap();
    let out = d.path().join("rep");
    let o = wormnet(&[
        "report", "--er", "12", "0.3", "--worms", "2", "--runs", "2", "--pool", "40", "--train",
        "24", "--test", "16", "--epochs", "2", "--no-sweep", "--out", p(&out),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(out.join("methods.csv")).unwrap();
    let lines: Vec<_> = csv.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("proposed,") && lines[2].starts_with("random,"));
    assert_eq!(lines[0].split(',').count(), 9);
}
