use std::path::PathBuf;
use std::process::{Command, Output};

fn dbsearch(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dbsearch")).args(args).output().unwrap()
}

fn data(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "data", "tsplib", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("dbsearch-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn curves_csv_lists_every_schedule() {
    let out = dbsearch(&["curves", "--b", "8", "--n", "8", "--family", "binomial", "--plateaus"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("strategy,leaves,cum_prob"));
    let names: std::collections::BTreeSet<&str> = lines.map(|l| l.split(',').next().unwrap()).collect();
    assert!(names.contains("lds") && names.contains("dbs(2)+lds"));
    assert!((1..=8).all(|c| names.contains(format!("dbs({c})").as_str())));
    assert!(!text.contains('\r'));
}

#[test]
fn verify_theorems_small_grid() {
    let out = dbsearch(&["verify-theorems", "--max-b", "4", "--max-n", "4"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("all checks passed"));
}

#[test]
fn generated_full_square_solves_instantly() {
    let path = scratch("holes0.pls");
    let p = path.to_str().unwrap();
    assert!(dbsearch(&["gen-pls", "--order", "6", "--holes", "0", "--balanced", "--seed", "4", "--out", p])
        .status
        .success());
    let out = dbsearch(&["solve-pls", p]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap(), std::fs::read_to_string(&path).unwrap());
}

#[test]
fn infeasible_square_exits_one() {
    let path = scratch("bad.pls");
    std::fs::write(&path, "3\n1 2 0\n0 0 3\n0 0 0\n").unwrap();
    let out = dbsearch(&["solve-pls", path.to_str().unwrap(), "--strategy", "lds"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn tsp_reaches_exact_optimum() {
    let out = dbsearch(&["solve-tsp", &data("gr17.tsp"), "--strategy", "dbs", "--optimum", "auto"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("length 2085"), "{text}");
}

#[test]
fn input_errors_exit_two() {
    assert_eq!(dbsearch(&["solve-tsp", "/nonexistent.tsp"]).status.code(), Some(2));
    assert_eq!(dbsearch(&["solve-tsp", &data("gr17.tsp"), "--strategy", "bfs"]).status.code(), Some(2));
    assert_eq!(dbsearch(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(dbsearch(&["curves", "--b", "8", "--n", "8", "--bogus"]).status.code(), Some(2));
    let dup = scratch("dup.pls");
    std::fs::write(&dup, "2\n1 1\n0 0\n").unwrap();
    let out = dbsearch(&["solve-pls", dup.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("row 0"));
}

#[test]
fn bench_config_runs() {
    let cfg = scratch("bench.cfg");
    std::fs::write(
        &cfg,
        format!(
            "tsp = {}\ngenerate_pls = 2 8 12 1\nstrategies = lds, dbs\ntime_limit = 60\n",
            data("gr17.tsp")
        ),
    )
    .unwrap();
    let out = dbsearch(&["bench", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("gr17") && text.contains("mean") && text.contains("bpls.order8.holes12.s1"));
}
