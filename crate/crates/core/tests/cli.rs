//! End-to-end drives of the `diamsketch` binary: output shapes, determinism,
//! error reporting, and the documented example invocations.

use std::io::Read;
use std::process::{Command, Output, Stdio};

use diamsketch::harness;
use diamsketch::io as dio;
use diamsketch::metric::{shortest_path_metric, BipartiteGraph};

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_diamsketch"));
    // keep the tests hermetic even if the test runner's environment sets it
    cmd.env_remove("DIAMSKETCH_SEED");
    cmd
}

fn run_ok(cmd: &mut Command) -> Output {
    let out = cmd.output().expect("spawn diamsketch");
    assert!(
        out.status.success(),
        "expected success, got {:?}\nstderr: {}",
        out.status,
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn run_err(cmd: &mut Command) -> String {
    let out = cmd.output().expect("spawn diamsketch");
    assert!(!out.status.success(), "expected failure, command succeeded");
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn stdout_str(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 stdout")
}

#[test]
fn gen_metric_is_byte_deterministic() {
    let args = ["gen-metric", "--bipartite", "-n", "60", "-p", "0.1", "-k", "2", "--seed", "9"];
    let a = run_ok(bin().args(args));
    let b = run_ok(bin().args(args));
    assert_eq!(a.stdout, b.stdout);
    assert!(!a.stdout.is_empty());

    let report = String::from_utf8_lossy(&a.stderr).into_owned();
    assert!(report.contains("|I*|"), "property report missing: {report}");

    let c = run_ok(bin().args(args).env("DIAMSKETCH_SEED", "10"));
    assert_ne!(a.stdout, c.stdout, "env seed override had no effect");
}

#[test]
fn gen_metric_spec_invocation_writes_a_parseable_graph() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.txt");
    run_ok(bin().args([
        "gen-metric",
        "--bipartite",
        "-n",
        "100",
        "-p",
        "auto",
        "-k",
        "2",
        "--seed",
        "1",
    ])
    .arg("--out")
    .arg(&path));

    let g = dio::read_graph(&path).expect("generated file parses");
    assert_eq!(g.n(), 100);

    // --out and stdout carry the same bytes
    let streamed = run_ok(bin().args([
        "gen-metric", "--bipartite", "-n", "100", "-p", "auto", "-k", "2", "--seed", "1",
    ]));
    assert_eq!(streamed.stdout, std::fs::read(&path).unwrap());
}

#[test]
fn replay_oracle_matches_the_library_and_baseline_rejects_deletions() {
    let dir = tempfile::tempdir().unwrap();
    let metric_path = dir.path().join("m.csv");
    let stream_path = dir.path().join("s.txt");

    let m = harness::random_connected_metric(12, 3.0, 77).unwrap();
    dio::write_dense_metric(&metric_path, &m).unwrap();
    let updates = vec![(0usize, 1i64), (5, 1), (9, 1), (5, -1), (11, 1)];
    dio::write_stream(&stream_path, &updates).unwrap();

    let out = run_ok(bin().args([
        "replay",
        "--stream",
        stream_path.to_str().unwrap(),
        "--metric",
        metric_path.to_str().unwrap(),
        "--oracle",
    ]));
    let x = dio::apply_stream(&updates, 12, 1 << 20).unwrap();
    let expect = harness::replay_oracle(&m, &updates).unwrap();
    assert_eq!(stdout_str(&out).trim(), format!("diameter,{expect}"));
    assert!(x.support().contains(&0) && !x.support().contains(&5));

    // deletion at stream position 4 (1-based) kills the insertion-only baseline
    let err = run_err(bin().args([
        "replay",
        "--stream",
        stream_path.to_str().unwrap(),
        "--metric",
        metric_path.to_str().unwrap(),
        "--baseline",
    ]));
    assert!(err.contains('4'), "deletion position missing from: {err}");
}

#[test]
fn replay_demands_exactly_one_metric_source_and_one_mode() {
    let dir = tempfile::tempdir().unwrap();
    let metric_path = dir.path().join("m.csv");
    let stream_path = dir.path().join("s.txt");
    let graph_path = dir.path().join("g.txt");

    // the dense dump sentinel-completes disconnected pairs, so agreement with
    // the raw graph metric needs a connected instance
    let g = (3..)
        .map(|seed| BipartiteGraph::gen(6, 0.6, seed).unwrap())
        .find(|g| shortest_path_metric(g).dense_with_sentinel().1)
        .unwrap();
    dio::write_graph(&graph_path, &g).unwrap();
    dio::write_dense_metric(&metric_path, &shortest_path_metric(&g)).unwrap();
    dio::write_stream(&stream_path, &[(0, 1), (3, 1)]).unwrap();

    let err = run_err(bin().args([
        "replay",
        "--stream",
        stream_path.to_str().unwrap(),
        "--metric",
        metric_path.to_str().unwrap(),
        "--graph",
        graph_path.to_str().unwrap(),
        "--oracle",
    ]));
    assert!(err.contains("exactly one"), "unexpected: {err}");

    let err = run_err(bin().args(["replay", "--stream", stream_path.to_str().unwrap(), "--oracle"]));
    assert!(err.contains("exactly one"), "unexpected: {err}");

    let err = run_err(bin().args([
        "replay",
        "--stream",
        stream_path.to_str().unwrap(),
        "--metric",
        metric_path.to_str().unwrap(),
    ]));
    assert!(err.contains("exactly one"), "unexpected: {err}");

    // graph-backed metric agrees with its dense dump
    let via_graph = run_ok(bin().args([
        "replay",
        "--stream",
        stream_path.to_str().unwrap(),
        "--graph",
        graph_path.to_str().unwrap(),
        "--oracle",
    ]));
    let via_metric = run_ok(bin().args([
        "replay",
        "--stream",
        stream_path.to_str().unwrap(),
        "--metric",
        metric_path.to_str().unwrap(),
        "--oracle",
    ]));
    assert_eq!(via_graph.stdout, via_metric.stdout);
}

#[test]
fn malformed_files_report_one_based_line_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let metric_path = dir.path().join("m.csv");
    let m = harness::random_connected_metric(8, 3.0, 5).unwrap();
    dio::write_dense_metric(&metric_path, &m).unwrap();

    let stream_path = dir.path().join("bad.txt");
    std::fs::write(&stream_path, "+ 0\n+ 1\n* 2\n").unwrap();
    let err = run_err(bin().args([
        "replay",
        "--stream",
        stream_path.to_str().unwrap(),
        "--metric",
        metric_path.to_str().unwrap(),
        "--oracle",
    ]));
    assert!(err.contains("line 3"), "unexpected: {err}");

    let graph_path = dir.path().join("bad_g.txt");
    std::fs::write(&graph_path, "5 0.5\n0 1\n").unwrap();
    let err = run_err(bin().args([
        "lab",
        "properties",
        "--graph",
        graph_path.to_str().unwrap(),
    ]));
    assert!(err.contains("line 1"), "unexpected: {err}");

    let matrix_path = dir.path().join("bad_t.txt");
    std::fs::write(&matrix_path, "2 3\n1 0 2\n4 5\n").unwrap();
    let ok_graph = dir.path().join("g.txt");
    dio::write_graph(&ok_graph, &BipartiteGraph::gen(3, 0.5, 1).unwrap()).unwrap();
    let err = run_err(bin().args([
        "lab",
        "fooling",
        "--matrix",
        matrix_path.to_str().unwrap(),
        "--graph",
        ok_graph.to_str().unwrap(),
    ]));
    assert!(err.contains("line 3"), "unexpected: {err}");
}

#[test]
fn diam_estimate_reports_eta_decisions_and_space() {
    let dir = tempfile::tempdir().unwrap();
    let metric_path = dir.path().join("m.csv");
    let stream_path = dir.path().join("s.txt");

    let m = harness::random_connected_metric(16, 3.0, 41).unwrap();
    dio::write_dense_metric(&metric_path, &m).unwrap();
    dio::write_stream(&stream_path, &[(0, 1), (7, 1), (12, 1), (3, 1)]).unwrap();

    let args = [
        "diam-estimate",
        "--metric",
        metric_path.to_str().unwrap(),
        "--stream",
        stream_path.to_str().unwrap(),
        "--c",
        "10",
        "--delta",
        "0.25",
        "--seed",
        "7",
        "--report-space",
    ];
    let out = run_ok(bin().args(args));
    let text = stdout_str(&out);
    let mut lines = text.lines();

    let eta_line = lines.next().expect("eta line");
    let eta: f64 = eta_line.strip_prefix("eta,").expect("eta prefix").parse().unwrap();
    assert!(eta.is_finite() && eta > 0.0, "bad eta in {eta_line}");

    assert_eq!(lines.next(), Some("distinct_support,true"));
    assert_eq!(lines.next(), Some("threshold,sketch_threshold,decision,query_point,witness"));

    let mut saw_rows = false;
    let mut saw_bytes = false;
    for line in lines {
        if let Some(rest) = line.strip_prefix("rows,") {
            rest.parse::<u64>().unwrap();
            saw_rows = true;
        } else if let Some(rest) = line.strip_prefix("bytes,") {
            rest.parse::<u64>().unwrap();
            saw_bytes = true;
        } else {
            let fields: Vec<&str> = line.split(',').collect();
            assert_eq!(fields.len(), 5, "bad decision row: {line}");
            fields[0].parse::<f64>().unwrap();
            fields[1].parse::<f64>().unwrap();
            assert!(fields[2] == "far" || fields[2] == "close", "bad decision: {line}");
            assert!(fields[2] == "far" || fields[4] == "-", "close rows carry no witness: {line}");
        }
    }
    assert!(saw_rows && saw_bytes, "--report-space lines missing:\n{text}");

    // same seed, same bytes
    let again = run_ok(bin().args(args));
    assert_eq!(out.stdout, again.stdout);

    let err = run_err(bin().args([
        "diam-estimate",
        "--metric",
        metric_path.to_str().unwrap(),
        "--stream",
        stream_path.to_str().unwrap(),
        "--c",
        "6",
        "--delta",
        "0.25",
    ]));
    assert!(err.contains('c'), "c=6 should be rejected: {err}");
}

#[test]
fn tradeoff_emits_one_csv_row_per_factor() {
    let out = run_ok(bin().args([
        "tradeoff", "--c", "10,14", "--n", "10", "--trials", "3", "--seed", "2",
    ]));
    let text = stdout_str(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "c,rows,bytes,success_rate");
    assert_eq!(lines.len(), 3, "expected 2 data rows:\n{text}");
    for line in &lines[1..] {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 4);
        fields[0].parse::<f64>().unwrap();
        fields[1].parse::<u64>().unwrap();
        fields[2].parse::<u64>().unwrap();
        let rate: f64 = fields[3].parse().unwrap();
        assert!((0.0..=1.0).contains(&rate));
    }
}

#[test]
fn lab_minrank_presets_match_known_values() {
    for (preset, t, want) in [("edgeless", 4, 4), ("complete", 4, 1), ("cycle", 5, 4)] {
        let out = run_ok(bin().args([
            "lab",
            "minrank",
            "--preset",
            preset,
            "--t",
            &t.to_string(),
        ]));
        let text = stdout_str(&out);
        assert!(
            text.lines().any(|l| l == format!("minrank,{want}")),
            "{preset}({t}): expected minrank {want}, got:\n{text}"
        );
    }

    let err = run_err(bin().args(["lab", "minrank", "--preset", "star", "--t", "3"]));
    assert!(err.contains("star"), "unexpected: {err}");
}

#[test]
fn lab_pipeline_runs_on_one_instance_file() {
    let dir = tempfile::tempdir().unwrap();
    let graph_path = dir.path().join("g.txt");
    run_ok(bin().args([
        "gen-metric", "--bipartite", "-n", "40", "-p", "auto", "-k", "2", "--seed", "6",
    ])
    .arg("--out")
    .arg(&graph_path));

    let props = run_ok(bin().args([
        "lab",
        "properties",
        "--graph",
        graph_path.to_str().unwrap(),
        "-k",
        "2",
    ]));
    assert!(stdout_str(&props).contains("|I*|"));

    let samples = run_ok(bin().args([
        "lab",
        "sample-hard",
        "--graph",
        graph_path.to_str().unwrap(),
        "-k",
        "2",
        "--samples",
        "3",
        "--seed",
        "6",
    ]));
    let text = stdout_str(&samples);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("sample,i,coin,passes"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 3);
    for row in rows {
        assert!(row.ends_with(",true"), "hard sample failed the diameter check: {row}");
    }

    // a sketch too small to pin every index: some column admits a kernel vector
    let matrix_path = dir.path().join("t.txt");
    let g = dio::read_graph(&graph_path).unwrap();
    let t = diamsketch::lab::SketchMatrix::random(3, g.n(), 5, 99).unwrap();
    dio::write_matrix(&matrix_path, &t).unwrap();

    let scan = run_ok(bin().args([
        "lab",
        "fooling",
        "--matrix",
        matrix_path.to_str().unwrap(),
        "--graph",
        graph_path.to_str().unwrap(),
    ]));
    let text = stdout_str(&scan);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("i,exists"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), g.n());
    assert!(rows.iter().any(|r| r.ends_with(",true")), "no fooled column at s=3:\n{}", rows.join("\n"));

    // single-index mode prints the vector itself
    let fooled: usize = rows
        .iter()
        .find(|r| r.ends_with(",true"))
        .and_then(|r| r.split(',').next())
        .unwrap()
        .parse()
        .unwrap();
    let one = run_ok(bin().args([
        "lab",
        "fooling",
        "--matrix",
        matrix_path.to_str().unwrap(),
        "--graph",
        graph_path.to_str().unwrap(),
        "-i",
        &fooled.to_string(),
    ]));
    let vector = stdout_str(&one);
    assert!(vector.split_whitespace().count() == g.n(), "bad vector: {vector}");

    // dual certificate over the default (eligible) constrained set
    let dual = run_ok(bin().args([
        "lab",
        "dual",
        "--matrix",
        matrix_path.to_str().unwrap(),
        "--graph",
        graph_path.to_str().unwrap(),
    ]));
    let text = stdout_str(&dual);
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows.len(), g.n() + 1, "M rows plus the rank line");
    for row in &rows[..g.n()] {
        assert_eq!(row.split(',').count(), g.n());
    }
    let rank: usize = rows[g.n()].strip_prefix("numeric_rank,").unwrap().parse().unwrap();
    assert!(rank <= t.s(), "rank {rank} exceeds sketch rows {}", t.s());
}

#[test]
fn lab_adversary_reports_a_rate_and_baseline_is_exact() {
    let out = run_ok(bin().args([
        "lab", "adversary", "-n", "30", "-k", "2", "--seed", "4", "--trials", "5", "--baseline",
    ]));
    let text = stdout_str(&out);
    assert!(text.lines().any(|l| l == "trials,5"), "unexpected:\n{text}");
    assert!(text.lines().any(|l| l == "failures,0"), "exact baseline must never fail:\n{text}");
    assert!(text.lines().any(|l| l == "rate,0"), "unexpected:\n{text}");
}

#[test]
fn closed_stdout_is_not_an_error() {
    let mut child = bin()
        .args(["gen-metric", "--bipartite", "-n", "2000", "-p", "auto", "-k", "2", "--seed", "3"])
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .spawn()
        .expect("spawn diamsketch");
    let mut stdout = child.stdout.take().unwrap();
    let mut buf = [0u8; 256];
    let n = stdout.read(&mut buf).unwrap();
    assert!(n > 0);
    drop(stdout); // close the pipe mid-write
    let status = child.wait().unwrap();
    assert!(status.success(), "broken pipe surfaced as failure: {status:?}");
}
