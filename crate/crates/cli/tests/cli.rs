//! End-to-end tests against the built binary: exit codes, document
//! emission, verification verdicts, and CLI/library agreement.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use cutmatch::document::{document_from_json, document_to_json};
use cutmatch::rational::{parse_rational, rat};

fn binary() -> &'static str {
    env!("CARGO_BIN_EXE_cutmatch")
}

fn run(args: &[&str]) -> Output {
    Command::new(binary()).args(args).output().expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

fn write_graph(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

fn cycle8(dir: &Path) -> PathBuf {
    write_graph(dir, "cycle8.txt", "8 8\n0 1\n1 2\n2 3\n3 4\n4 5\n5 6\n6 7\n7 0\n")
}

fn k8(dir: &Path) -> PathBuf {
    let mut text = String::from("8 56\n");
    for u in 0..8 {
        for v in 0..8 {
            if u != v {
                text.push_str(&format!("{u} {v}\n"));
            }
        }
    }
    write_graph(dir, "k8.txt", &text)
}

#[test]
fn solve_cycle_emits_verified_cut() {
    let dir = tempfile::tempdir().unwrap();
    let graph = cycle8(dir.path());
    let cert = dir.path().join("cert.json");
    let output = run(&[
        "solve",
        graph.to_str().unwrap(),
        "--alpha",
        "1/1",
        "--seed",
        "7",
        "--mode",
        "exact",
        "--out",
        cert.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(0), "stderr: {}", stderr(&output));
    assert!(stdout(&output).starts_with("cut:"), "summary: {}", stdout(&output));

    let document = document_from_json(&fs::read_to_string(&cert).unwrap()).unwrap();
    assert_eq!(document.result, "cut");
    let payload = document.cut.expect("cut payload");
    let expansion = parse_rational(&payload.expansion).unwrap();
    assert!(expansion <= rat(1, 1));

    let verify = run(&["verify", graph.to_str().unwrap(), cert.to_str().unwrap()]);
    assert_eq!(verify.status.code(), Some(0));
    assert!(stdout(&verify).contains("ACCEPT"));
}

#[test]
fn solve_k8_emits_expander_with_small_potential() {
    let dir = tempfile::tempdir().unwrap();
    let graph = k8(dir.path());
    let cert = dir.path().join("cert.json");
    let output = run(&[
        "solve",
        graph.to_str().unwrap(),
        "--alpha",
        "1/1",
        "--seed",
        "7",
        "--mode",
        "exact",
        "--out",
        cert.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(0));
    let document = document_from_json(&fs::read_to_string(&cert).unwrap()).unwrap();
    assert_eq!(document.result, "expander");
    let payload = document.expander.expect("expander payload");
    let psi = parse_rational(&payload.final_psi.expect("exact mode records psi")).unwrap();
    assert!(psi <= rat(1, 256), "psi too large");

    let verify = run(&["verify", graph.to_str().unwrap(), cert.to_str().unwrap()]);
    assert_eq!(verify.status.code(), Some(0));
}

#[test]
fn auto_on_path_reports_zero_expansion() {
    let dir = tempfile::tempdir().unwrap();
    let graph = write_graph(dir.path(), "path2.txt", "2 1\n0 1\n");
    let output = run(&["solve", graph.to_str().unwrap(), "--auto"]);
    assert_eq!(output.status.code(), Some(0));
    let document = document_from_json(&stdout(&output)).unwrap();
    assert_eq!(document.result, "cut");
    assert_eq!(document.cut.unwrap().expansion, "0/1");
}

#[test]
fn odd_vertex_count_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let graph = write_graph(dir.path(), "tri.txt", "3 3\n0 1\n1 2\n2 0\n");
    let output = run(&["solve", graph.to_str().unwrap(), "--alpha", "1/1"]);
    assert_eq!(output.status.code(), Some(1));
    assert!(stderr(&output).contains("even"), "stderr: {}", stderr(&output));
}

#[test]
fn alpha_and_auto_are_mutually_exclusive() {
    let dir = tempfile::tempdir().unwrap();
    let graph = cycle8(dir.path());
    let both = run(&["solve", graph.to_str().unwrap(), "--alpha", "1/1", "--auto"]);
    assert_ne!(both.status.code(), Some(0));
    let neither = run(&["solve", graph.to_str().unwrap()]);
    assert_eq!(neither.status.code(), Some(1));
}

#[test]
fn malformed_alpha_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let graph = cycle8(dir.path());
    for alpha in ["0", "-1/2", "abc", "1/0"] {
        let output = run(&["solve", graph.to_str().unwrap(), "--alpha", alpha]);
        assert_eq!(output.status.code(), Some(1), "alpha {alpha}");
    }
}

#[test]
fn identical_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let graph = k8(dir.path());
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for out in [&a, &b] {
        let output = run(&[
            "solve",
            graph.to_str().unwrap(),
            "--alpha",
            "2/3",
            "--seed",
            "11",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(output.status.code(), Some(0));
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn tampered_certificate_is_rejected_with_code() {
    let dir = tempfile::tempdir().unwrap();
    let graph = k8(dir.path());
    let cert = dir.path().join("cert.json");
    run(&[
        "solve",
        graph.to_str().unwrap(),
        "--alpha",
        "1/1",
        "--seed",
        "7",
        "--out",
        cert.to_str().unwrap(),
    ]);

    let mut document = document_from_json(&fs::read_to_string(&cert).unwrap()).unwrap();
    let payload = document.expander.as_mut().unwrap();
    let path = &mut payload.matchings[0].forward[0].path;
    path.insert(1, path[0]);
    fs::write(&cert, document_to_json(&document)).unwrap();

    let verify = run(&["verify", graph.to_str().unwrap(), cert.to_str().unwrap()]);
    assert_eq!(verify.status.code(), Some(3));
    assert!(stdout(&verify).contains("REJECT embedding-path"), "{}", stdout(&verify));
}

#[test]
fn certificate_for_a_different_graph_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let graph = k8(dir.path());
    let other = cycle8(dir.path());
    let cert = dir.path().join("cert.json");
    run(&[
        "solve",
        graph.to_str().unwrap(),
        "--alpha",
        "1/1",
        "--seed",
        "7",
        "--out",
        cert.to_str().unwrap(),
    ]);
    let verify = run(&["verify", other.to_str().unwrap(), cert.to_str().unwrap()]);
    assert_eq!(verify.status.code(), Some(1));
    assert!(stderr(&verify).contains("hash"), "{}", stderr(&verify));
}

#[test]
fn oracle_prints_optimum_and_witness() {
    let dir = tempfile::tempdir().unwrap();
    let cycle4 = write_graph(dir.path(), "cycle4.txt", "4 4\n0 1\n1 2\n2 3\n3 0\n");
    let output = run(&["oracle", cycle4.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(0));
    assert!(stdout(&output).contains("OPT = 1/2"), "{}", stdout(&output));

    let path2 = write_graph(dir.path(), "path2.txt", "2 1\n0 1\n");
    let output = run(&["oracle", path2.to_str().unwrap()]);
    assert!(stdout(&output).contains("OPT = 0/1"));

    let mut k4 = String::from("4 12\n");
    for u in 0..4 {
        for v in 0..4 {
            if u != v {
                k4.push_str(&format!("{u} {v}\n"));
            }
        }
    }
    let k4 = write_graph(dir.path(), "k4.txt", &k4);
    let output = run(&["oracle", k4.to_str().unwrap()]);
    assert!(stdout(&output).contains("OPT = 2/1"));
}

#[test]
fn oracle_rejects_oversized_instances() {
    let dir = tempfile::tempdir().unwrap();
    let mut text = String::from("22 22\n");
    for i in 0..22 {
        text.push_str(&format!("{i} {}\n", (i + 1) % 22));
    }
    let graph = write_graph(dir.path(), "big.txt", &text);
    let output = run(&["oracle", graph.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(1));
}

#[test]
fn flow_subcommand_reports_value_and_cut() {
    let dir = tempfile::tempdir().unwrap();
    let network = write_graph(
        dir.path(),
        "net.txt",
        "# two-path network\n4 5\n0 3\n0 1 2\n1 3 1\n1 2 1\n2 3 2\n0 2 1\n",
    );
    let output = run(&["flow", network.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(0));
    let text = stdout(&output);
    assert!(text.contains("max flow = 3"), "{text}");
    assert!(text.contains("capacity = 3"), "{text}");
}

#[test]
fn inconclusive_run_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let graph = k8(dir.path());
    let output = run(&[
        "solve",
        graph.to_str().unwrap(),
        "--alpha",
        "1/1",
        "--seed",
        "7",
        "--round-cap",
        "1",
    ]);
    assert_eq!(output.status.code(), Some(2), "{}", stderr(&output));
    let document = document_from_json(&stdout(&output)).unwrap();
    assert_eq!(document.result, "inconclusive");
    let verify_path = dir.path().join("inc.json");
    fs::write(&verify_path, stdout(&output)).unwrap();
    let verify = run(&["verify", graph.to_str().unwrap(), verify_path.to_str().unwrap()]);
    assert_eq!(verify.status.code(), Some(0));
}

#[test]
fn missing_file_is_an_input_error() {
    let output = run(&["solve", "/nonexistent/g.txt", "--alpha", "1/1"]);
    assert_eq!(output.status.code(), Some(1));
}

#[test]
fn parse_error_reports_line_number() {
    let dir = tempfile::tempdir().unwrap();
    let graph = write_graph(dir.path(), "bad.txt", "2 1\n0 7\n");
    let output = run(&["solve", graph.to_str().unwrap(), "--alpha", "1/1"]);
    assert_eq!(output.status.code(), Some(1));
    assert!(stderr(&output).contains("line 2"), "{}", stderr(&output));
}

#[test]
fn bench_emits_consistent_table() {
    let output = run(&["bench", "--seed", "3"]);
    assert_eq!(output.status.code(), Some(0), "{}", stderr(&output));
    let text = stdout(&output);
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert_eq!(
        header,
        "family,n,m,alpha,branch,rounds,maxflow_calls,wall_ms,value,ratio_vs_opt"
    );
    let mut rows = 0;
    let mut complete_rounds: Vec<(usize, usize)> = Vec::new();
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 10, "row: {line}");
        let n: usize = fields[1].parse().unwrap();
        let rounds: usize = fields[5].parse().unwrap();
        let calls: usize = fields[6].parse().unwrap();
        match fields[4] {
            "cut" => assert!(calls == 2 * rounds + 1 || calls == 2 * rounds + 2),
            _ => assert_eq!(calls, 2 * rounds),
        }
        if n <= 14 {
            let ratio: f64 = fields[9].parse().unwrap();
            let bound = 8.0 * (n as f64).log2().powi(2);
            assert!(ratio <= bound, "row: {line}");
        }
        if fields[0] == "complete" {
            complete_rounds.push((n, rounds));
        }
        rows += 1;
    }
    assert_eq!(rows, 12);

    // On bidirected complete graphs the round count tracks log2(n)^2:
    // monotone in n and inside a generous constant band around it.
    assert_eq!(complete_rounds.len(), 4);
    for pair in complete_rounds.windows(2) {
        assert!(pair[1].1 >= pair[0].1, "rounds should not shrink with n");
    }
    for (n, rounds) in complete_rounds {
        let log_sq = (n as f64).log2().powi(2);
        assert!((rounds as f64) <= 10.0 * log_sq, "n = {n}: {rounds} rounds");
        assert!((rounds as f64) >= log_sq / 8.0, "n = {n}: {rounds} rounds");
    }
}

/// The CLI is a thin shell: solving through the library with the same
/// configuration yields the identical document.
#[test]
fn cli_matches_library_output() {
    let dir = tempfile::tempdir().unwrap();
    let graph_path = cycle8(dir.path());
    let cert = dir.path().join("cert.json");
    run(&[
        "solve",
        graph_path.to_str().unwrap(),
        "--alpha",
        "1/2",
        "--seed",
        "5",
        "--out",
        cert.to_str().unwrap(),
    ]);
    let cli_json = fs::read_to_string(&cert).unwrap();

    let graph = cutmatch::graph::parse_graph(&fs::read_to_string(&graph_path).unwrap()).unwrap();
    let config = cutmatch::game::GameConfig::new(rat(1, 2), 5);
    let result = cutmatch::game::play_game(&graph, &config).unwrap();
    let lib_json =
        document_to_json(&cutmatch::document::document_from_game(&graph, &config, &result));
    assert_eq!(cli_json, lib_json);
}
