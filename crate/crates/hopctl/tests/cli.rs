//! End-to-end runs of the binary: pipelines, exit codes, determinism.

use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

fn hopctl(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hopctl"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn hopctl_stdin(dir: &Path, args: &[&str], input: &str) -> Output {
    use std::io::Write;
    let mut child = Command::new(env!("CARGO_BIN_EXE_hopctl"))
        .current_dir(dir)
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child
        .stdin
        .as_mut()
        .unwrap()
        .write_all(input.as_bytes())
        .unwrap();
    child.wait_with_output().unwrap()
}

fn workdir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join("hopctl-cli-tests").join(name);
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap_or(-1)
}

#[test]
fn gen_build_validate_pipeline_exits_zero() {
    let dir = workdir("pipeline");
    let out = hopctl(
        &dir,
        &["gen", "--kind", "path", "--n", "5", "--out", "p5.hop"],
    );
    assert_eq!(code(&out), 0, "{out:?}");
    let out = hopctl(
        &dir,
        &[
            "build", "--graph", "p5.hop", "--method", "tree", "--h", "2", "--out", "p5.hs",
        ],
    );
    assert_eq!(code(&out), 0, "{out:?}");
    let out = hopctl(
        &dir,
        &["validate", "--graph", "p5.hop", "--hopset", "p5.hs"],
    );
    assert_eq!(code(&out), 0, "{out:?}");
    assert!(String::from_utf8_lossy(&out.stdout).contains("PASS"));
}

#[test]
fn oracle_query_reports_distance_and_lookups() {
    let dir = workdir("query");
    hopctl(
        &dir,
        &[
            "gen", "--kind", "grid", "--rows", "3", "--cols", "4", "--out", "g.hop",
        ],
    );
    let out = hopctl(
        &dir,
        &[
            "build",
            "--graph",
            "g.hop",
            "--method",
            "treewidth",
            "--h",
            "3",
            "--out",
            "g.hs",
        ],
    );
    assert_eq!(code(&out), 0, "{out:?}");
    let out = hopctl_stdin(
        &dir,
        &["query", "--graph", "g.hop", "--oracle", "g.hs.oracle"],
        "1 12\n4 4\n",
    );
    assert_eq!(code(&out), 0, "{out:?}");
    let text = String::from_utf8_lossy(&out.stdout);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0].split_whitespace().next(), Some("5"));
    // Identity query answers 0 with at least one probe.
    let mut id = lines[1].split_whitespace();
    assert_eq!(id.next(), Some("0"));
    assert!(id.next().unwrap().parse::<u64>().unwrap() >= 1);
}

#[test]
fn validation_failure_exits_two() {
    let dir = workdir("invalid");
    hopctl(
        &dir,
        &["gen", "--kind", "path", "--n", "6", "--out", "p6.hop"],
    );
    // A single exact-weight shortcut is a fine hopset edge set, but it
    // cannot cover everything at hop bound 1.
    std::fs::write(dir.join("weak.hs"), "p hopset 6 1 1\ns 1 3 2 0\n").unwrap();
    let out = hopctl(
        &dir,
        &["validate", "--graph", "p6.hop", "--hopset", "weak.hs"],
    );
    assert_eq!(code(&out), 2, "{out:?}");
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL"));
}

#[test]
fn parse_and_config_errors_exit_three() {
    let dir = workdir("errs");
    std::fs::write(dir.join("bad.hop"), "p hop 2 1\ne 1 1 5\n").unwrap();
    let out = hopctl(
        &dir,
        &["validate", "--graph", "bad.hop", "--hopset", "bad.hop"],
    );
    assert_eq!(code(&out), 3, "{out:?}");

    hopctl(
        &dir,
        &["gen", "--kind", "path", "--n", "4", "--out", "p4.hop"],
    );
    let out = hopctl(
        &dir,
        &[
            "build",
            "--graph",
            "p4.hop",
            "--method",
            "tree",
            "--h",
            "2",
            "--size-bound",
            "4",
            "--out",
            "x.hs",
        ],
    );
    assert_eq!(code(&out), 3, "{out:?}");

    // lp methods need unique shortest paths; a plain unit path has them,
    // but a 4-cycle does not.
    std::fs::write(
        dir.join("c4.hop"),
        "p hop 4 4\ne 1 2 1\ne 1 4 1\ne 2 3 1\ne 3 4 1\n",
    )
    .unwrap();
    let out = hopctl(
        &dir,
        &[
            "build", "--graph", "c4.hop", "--method", "lp", "--h", "2", "--out", "c4.hs",
        ],
    );
    assert_eq!(code(&out), 3, "{out:?}");
    assert!(String::from_utf8_lossy(&out.stderr).contains("gen --usp"));
}

#[test]
fn infeasible_tradeoff_exits_four() {
    let dir = workdir("infeasible");
    hopctl(
        &dir,
        &[
            "gen", "--kind", "path", "--n", "9", "--usp", "--out", "p9.hop",
        ],
    );
    let out = hopctl(
        &dir,
        &[
            "build",
            "--graph",
            "p9.hop",
            "--method",
            "lp3",
            "--size-bound",
            "0",
            "--out",
            "p9.hs",
        ],
    );
    assert_eq!(code(&out), 4, "{out:?}");
}

#[test]
fn generated_artifacts_are_deterministic() {
    let dir = workdir("determinism");
    for out in ["a.hop", "b.hop"] {
        hopctl(
            &dir,
            &[
                "gen", "--kind", "gnm", "--n", "20", "--m", "40", "--seed", "9", "--usp", "--out",
                out,
            ],
        );
    }
    assert_eq!(
        std::fs::read(dir.join("a.hop")).unwrap(),
        std::fs::read(dir.join("b.hop")).unwrap()
    );
    for out in ["a.hs", "b.hs"] {
        let r = hopctl(
            &dir,
            &[
                "build", "--graph", "a.hop", "--method", "lp", "--h", "3", "--seed", "5", "--out",
                out,
            ],
        );
        assert_eq!(code(&r), 0, "{r:?}");
    }
    assert_eq!(
        std::fs::read(dir.join("a.hs")).unwrap(),
        std::fs::read(dir.join("b.hs")).unwrap()
    );
}

#[test]
fn bench_rows_stay_in_growth_band() {
    let dir = workdir("bench");
    let out = hopctl(
        &dir,
        &[
            "bench",
            "--method",
            "tree",
            "--h",
            "3",
            "--n",
            "256,1024,4096",
            "--json",
            "b.jsonl",
        ],
    );
    assert_eq!(code(&out), 0, "{out:?}");
    let text = String::from_utf8_lossy(&out.stdout);
    let mut ratios = Vec::new();
    for line in text.lines() {
        let n: f64 = field(line, "n=").parse().unwrap();
        let h: f64 = field(line, "H=").parse().unwrap();
        assert!(line.contains("valid=PASS"));
        // lambda_3 of these sizes: 3, 4, 4.
        let lam = if n as u32 == 256 { 3.0 } else { 4.0 };
        ratios.push(h / (n * lam));
    }
    assert_eq!(ratios.len(), 3);
    let spread = ratios.iter().cloned().fold(f64::MIN, f64::max)
        / ratios.iter().cloned().fold(f64::MAX, f64::min);
    assert!(spread < 2.0, "ratios {ratios:?}");

    let out = hopctl(&dir, &["stats", "--bench", "b.jsonl"]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("tree"));
}

fn field<'a>(line: &'a str, key: &str) -> &'a str {
    let start = line.find(key).unwrap() + key.len();
    line[start..].split_whitespace().next().unwrap()
}
