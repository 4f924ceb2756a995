use std::path::Path;
use std::process::{Command, Output};

use lrsdp::output::{read_trace, ResultDocument};

fn lrsdp(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lrsdp")).args(args).current_dir(dir).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

#[test]
fn solve_single_edge_writes_json_and_trace() {
    let dir = tempfile::tempdir().unwrap();
    let o = lrsdp(&["solve", "--generate", "maxcut-edge", "--tol", "1e-8", "--output", "r.json", "--trace", "t.csv"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let doc = ResultDocument::read(&dir.path().join("r.json")).unwrap();
    assert!((doc.objective - 1.0).abs() <= 1e-8);
    assert_eq!(doc.status, "converged");
    assert_eq!((doc.problem.n, doc.problem.m, doc.problem.manifold.as_str()), (2, 0, "unit-diagonal"));
    let csv = std::fs::read_to_string(dir.path().join("t.csv")).unwrap();
    assert!(csv.starts_with("k,p,sigma,eps,eta_p,eta_d,eta_g,eta_max,gradnorm,inner_iters,time\n"));
    assert_eq!(read_trace(&csv).unwrap().len(), doc.trace.len());
}

#[test]
fn malformed_sdpa_reports_line_number() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.dat-s"), "1\n1\n2\n1.0\n1 1 1 1 1.0\n1 1 x 2 0.5\n").unwrap();
    let o = lrsdp(&["solve", "--input", "bad.dat-s", "--manifold", "unit-diagonal"], dir.path());
    assert_eq!(code(&o), 1);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 6"), "{err}");
}

#[test]
fn missing_file_and_unknown_flag_are_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&lrsdp(&["solve", "--input", "nope.dat-s"], dir.path())), 1);
    let o = lrsdp(&["solve", "--generate", "maxcut-edge", "--frobnicate"], dir.path());
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));
    assert_eq!(code(&lrsdp(&["solve"], dir.path())), 1);
    assert_eq!(code(&lrsdp(&["solve", "--generate", "bqp", "--manifold", "sphere"], dir.path())), 1);
    assert_eq!(code(&lrsdp(&["--help"], dir.path())), 0);
}

#[test]
fn iteration_limit_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let o = lrsdp(&["solve", "--generate", "maxcut-triangle", "--max-iters", "1"], dir.path());
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stdout).contains("iteration-limit"));
}

#[test]
fn check_accepts_solution_and_rejects_tampering() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["solve", "--generate", "bqp", "--q", "4", "--instance-seed", "2", "--output", "r.json"];
    assert_eq!(code(&lrsdp(&args, dir.path())), 0);
    let check = ["check", "--generate", "bqp", "--q", "4", "--instance-seed", "2", "--solution"];
    let ok = lrsdp(&[&check[..], &["r.json"]].concat(), dir.path());
    assert_eq!(code(&ok), 0, "{}", String::from_utf8_lossy(&ok.stdout));

    let mut doc = ResultDocument::read(&dir.path().join("r.json")).unwrap();
    doc.factor[3][0] *= 0.5;
    doc.write(&dir.path().join("t.json")).unwrap();
    let bad = lrsdp(&[&check[..], &["t.json"]].concat(), dir.path());
    assert_eq!(code(&bad), 2);
    assert!(String::from_utf8_lossy(&bad.stdout).contains("not certified"));
}

#[test]
fn generated_sdpa_round_trips_through_solve() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&lrsdp(&["generate", "bqp", "--q", "3", "--output", "b.dat-s"], dir.path())), 0);
    let reread = lrsdp::sdpa::read_sdpa(&dir.path().join("b.dat-s")).unwrap();
    let (qm, c) = lrsdp::core::generators::random_bqp(3, 0);
    let direct = lrsdp::core::generators::gen_bqp_moment(&qm, &c).unwrap();
    assert_eq!(reread.num_constraints(), direct.num_constraints());
    assert_eq!(reread.constraints(), direct.constraints());
    let o = lrsdp(&["solve", "--input", "b.dat-s", "--manifold", "unit-diagonal"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let stdout = lrsdp(&["generate", "maxcut-edge"], dir.path());
    assert!(String::from_utf8_lossy(&stdout.stdout).starts_with("0\n1\n2\n"));
}

#[test]
fn gset_family_reads_graph_file() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("g.txt"), "800 3\n1 2 1\n2 3 1\n799 800 -1\n").unwrap();
    let o = lrsdp(&["solve", "--generate", "gset", "--graph", "g.txt", "--output", "r.json"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let doc = ResultDocument::read(&dir.path().join("r.json")).unwrap();
    assert_eq!(doc.problem.n, 800);
    assert!((doc.objective - 2.0).abs() <= 1e-6);
}

#[test]
fn identical_arguments_give_identical_documents() {
    let dir = tempfile::tempdir().unwrap();
    let run = |out: &str| {
        let o = lrsdp(&["solve", "--generate", "quartic-sphere", "--q", "3", "--seed", "4", "--output", out], dir.path());
        assert_eq!(code(&o), 0);
        let mut d = ResultDocument::read(&dir.path().join(out)).unwrap();
        d.wall_time = 0.0;
        d.trace.iter_mut().for_each(|r| r.time = 0.0);
        d
    };
    assert_eq!(run("a.json"), run("b.json"));
}
