use std::process::Command;

fn ctc(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_ctc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &tempfile::TempDir, name: &str, content: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, content).unwrap();
    p.to_str().unwrap().to_string()
}

const G_2K4: &str = "0 1\n0 2\n0 3\n1 2\n1 3\n2 3\n3 4\n3 5\n3 6\n4 5\n4 6\n5 6\n";

#[test]
fn index_is_idempotent() {
    let dir = tempfile::tempdir().unwrap();
    let graph = write(&dir, "g.txt", G_2K4);
    let idx1 = dir.path().join("a.idx");
    let idx2 = dir.path().join("b.idx");
    for p in [&idx1, &idx2] {
        let out = ctc(&["index", "--graph", &graph, "--out", p.to_str().unwrap()]);
        assert!(out.status.success());
    }
    assert_eq!(std::fs::read(&idx1).unwrap(), std::fs::read(&idx2).unwrap());
    let stats = String::from_utf8(
        ctc(&["index", "--graph", &graph, "--out", idx1.to_str().unwrap()]).stdout,
    )
    .unwrap();
    assert!(stats.contains("n=7 m=12 tau_bar=4"), "{stats}");
}

#[test]
fn query_emits_expected_json() {
    let dir = tempfile::tempdir().unwrap();
    let graph = write(&dir, "g.txt", G_2K4);
    let out = ctc(&[
        "query", "--graph", &graph, "--algo", "basic", "--query", "0", "--no-timing",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["k"], 4);
    assert_eq!(v["nodes"], serde_json::json!([0, 1, 2, 3]));
    assert_eq!(v["diameter"], 1);
    assert_eq!(v["status"], "ok");
    assert_eq!(v["elapsed_ms"], 0);

    let out = ctc(&[
        "query", "--graph", &graph, "--algo", "bd", "--query", "0", "--no-timing",
    ]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["nodes"].as_array().unwrap().len(), 7);
}

#[test]
fn unknown_node_becomes_status_not_abort() {
    let dir = tempfile::tempdir().unwrap();
    let graph = write(&dir, "g.txt", G_2K4);
    let workload = write(&dir, "wl.txt", "99\n0\n");
    let out = ctc(&[
        "query", "--graph", &graph, "--algo", "bd", "--queries", &workload, "--no-timing",
    ]);
    assert!(out.status.success());
    let lines: Vec<serde_json::Value> = std::str::from_utf8(&out.stdout)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0]["status"], "no_community");
    assert!(lines[0]["reason"].as_str().unwrap().contains("99"));
    assert_eq!(lines[1]["status"], "ok");
}

#[test]
fn config_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let graph = write(&dir, "g.txt", G_2K4);
    // bad algorithm name
    let out = ctc(&[
        "query", "--graph", &graph, "--algo", "nope", "--query", "0",
    ]);
    assert_eq!(out.status.code(), Some(1));
    // neither --query nor --queries
    let out = ctc(&["query", "--graph", &graph, "--algo", "bd"]);
    assert_eq!(out.status.code(), Some(1));
    // unknown flag
    let out = ctc(&["query", "--nonsense"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn data_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad_graph = write(&dir, "bad.txt", "1 2\nthree four\n");
    let out = ctc(&["index", "--graph", &bad_graph, "--out", "/dev/null"]);
    assert_eq!(out.status.code(), Some(2));

    // index built for a different graph is refused
    let g1 = write(&dir, "g1.txt", G_2K4);
    let g2 = write(&dir, "g2.txt", "0 1\n1 2\n0 2\n");
    let idx = dir.path().join("g1.idx");
    assert!(ctc(&["index", "--graph", &g1, "--out", idx.to_str().unwrap()])
        .status
        .success());
    let out = ctc(&[
        "query", "--graph", &g2, "--index", idx.to_str().unwrap(),
        "--algo", "bd", "--query", "0",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn oracle_algo_respects_size_guard() {
    let dir = tempfile::tempdir().unwrap();
    let graph = write(&dir, "g.txt", G_2K4);
    let out = ctc(&[
        "query", "--graph", &graph, "--algo", "oracle", "--query", "0", "--no-timing",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["k"], 4);
    assert_eq!(v["nodes"], serde_json::json!([0, 1, 2, 3]));

    // 17 nodes exceeds the enumeration guard
    let mut big = String::new();
    for i in 0..17 {
        big.push_str(&format!("{} {}\n", i, (i + 1) % 17));
    }
    let big_graph = write(&dir, "big.txt", &big);
    let out = ctc(&[
        "query", "--graph", &big_graph, "--algo", "oracle", "--query", "0",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn threads_env_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let graph = write(&dir, "g.txt", G_2K4);
    let workload = write(&dir, "wl.txt", "0\n4\n0 4\n1 2\n5 6\n");
    let mut outputs = Vec::new();
    for threads in ["1", "4"] {
        let out = Command::new(env!("CARGO_BIN_EXE_ctc"))
            .args([
                "query", "--graph", &graph, "--algo", "lctc",
                "--queries", &workload, "--no-timing",
            ])
            .env("CTC_THREADS", threads)
            .output()
            .unwrap();
        assert!(out.status.success());
        outputs.push(out.stdout);
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn eval_scores_planted_results() {
    let dir = tempfile::tempdir().unwrap();
    let graph_path = dir.path().join("planted.txt");
    let out = ctc(&[
        "gen-fixture", "planted", "--seed", "11",
        "--out", graph_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let truth = write(
        &dir,
        "truth.txt",
        "0 1 2 3 4 5 6 7\n8 9 10 11 12 13 14 15\n16 17 18 19 20 21 22 23\n",
    );
    let workload = write(&dir, "wl.txt", "0 5\n9 14\n17 23\n");
    let results = dir.path().join("res.jsonl");
    let out = ctc(&[
        "query", "--graph", graph_path.to_str().unwrap(), "--algo", "lctc",
        "--queries", &workload, "--no-timing", "--out", results.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let out = ctc(&[
        "eval", "--results", results.to_str().unwrap(), "--truth", &truth,
        "--graph", graph_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["mean_f1"], 1.0);
    assert_eq!(v["scored"], 3);
    assert_eq!(v["no_community"], 0);
}

#[test]
fn eval_rejects_empty_results() {
    let dir = tempfile::tempdir().unwrap();
    let empty = write(&dir, "empty.jsonl", "");
    let out = ctc(&["eval", "--results", &empty]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn gen_queries_header_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let graph = write(&dir, "g.txt", G_2K4);
    let run = || {
        let out = ctc(&[
            "gen-queries", "--graph", &graph, "--size", "2", "--fraction", "1.0",
            "--inter-distance", "1", "--count", "10", "--seed", "21",
        ]);
        assert!(out.status.success());
        String::from_utf8(out.stdout).unwrap()
    };
    let a = run();
    assert_eq!(a, run());
    assert!(a.starts_with("#seed 21\n"));
    assert!(a.contains("#params size=2"));
    assert_eq!(a.lines().filter(|l| !l.starts_with('#')).count(), 10);
}
