//! End-to-end tests of the `imark` binary: spawns the real executable and
//! checks stdout, stderr, and exit codes.

use std::io::Write;
use std::process::{Command, Stdio};

fn imark() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_imark"));
    cmd.env_remove("IMARK_CACHE_DIR");
    cmd
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = imark().args(args).output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn run_with_stdin(args: &[&str], input: &str) -> (i32, String, String) {
    let mut child = imark()
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(input.as_bytes())
        .unwrap();
    let out = child.wait_with_output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn sg_uses_closed_form_for_solved_families() {
    let (code, stdout, stderr) = run(&["sg", "--sub", "1,2,3,4", "--div", "6", "-n", "30"]);
    assert_eq!(code, 0);
    assert_eq!(stdout, "5\n");
    assert_eq!(stderr, "source: closed-form\n");
}

#[test]
fn sg_uses_oracle_for_general_games() {
    let (code, stdout, stderr) = run(&["sg", "--sub", "1", "--div", "2,3", "-n", "3"]);
    assert_eq!(code, 0);
    assert_eq!(stdout, "2\n");
    assert_eq!(stderr, "source: oracle\n");

    let (code, stdout, _) = run(&["sg", "--sub", "1", "--div", "2,3", "-n", "0"]);
    assert_eq!(code, 0);
    assert_eq!(stdout, "0\n");
}

#[test]
fn sg_force_oracle_overrides_dispatch() {
    let (code, stdout, stderr) = run(&[
        "sg",
        "--sub",
        "1,2,3,4",
        "--div",
        "6",
        "-n",
        "30",
        "--force-oracle",
    ]);
    assert_eq!(code, 0);
    assert_eq!(stdout, "5\n");
    assert_eq!(stderr, "source: oracle\n");
}

#[test]
fn sg_rejects_invalid_specs() {
    let (code, _, stderr) = run(&["sg", "--sub", "0", "--div", "2", "-n", "5"]);
    assert_eq!(code, 2);
    assert!(stderr.contains("subtraction"));

    let (code, _, stderr) = run(&["sg", "--sub", "1", "--div", "1", "-n", "5"]);
    assert_eq!(code, 2);
    assert!(stderr.contains("divisor"));
}

#[test]
fn seq_csv_matches_known_prefix() {
    let (code, stdout, _) = run(&["seq", "--sub", "2", "--div", "3", "--to", "12"]);
    assert_eq!(code, 0);
    assert_eq!(
        stdout,
        "n,sg\n0,0\n1,0\n2,1\n3,1\n4,0\n5,0\n6,2\n7,1\n8,0\n9,0\n10,1\n11,1\n12,2\n"
    );
}

#[test]
fn seq_json_lines() {
    let (code, stdout, _) = run(&[
        "seq", "--sub", "1", "--div", "3", "--to", "6", "--format", "json",
    ]);
    assert_eq!(code, 0);
    assert_eq!(stdout.lines().count(), 7);
    assert_eq!(stdout.lines().last().unwrap(), r#"{"n":6,"sg":2}"#);
}

#[test]
fn seq_negative_bound_is_a_usage_error() {
    let (code, _, _) = run(&["seq", "--sub", "2", "--div", "3", "--to", "-1"]);
    assert_eq!(code, 2);
}

#[test]
fn seq_empty_range_emits_header_only() {
    let (code, stdout, _) = run(&[
        "seq", "--sub", "2", "--div", "3", "--from", "9", "--to", "4",
    ]);
    assert_eq!(code, 0);
    assert_eq!(stdout, "n,sg\n");
}

#[test]
fn seq_writes_files_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("seq.csv");
    let (code, stdout, _) = run(&[
        "seq",
        "--sub",
        "1",
        "--div",
        "2,3",
        "--to",
        "100",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert_eq!(stdout, "");
    let from_file = std::fs::read_to_string(&path).unwrap();
    let (_, direct, _) = run(&["seq", "--sub", "1", "--div", "2,3", "--to", "100"]);
    assert_eq!(from_file, direct);
}

#[test]
fn gaps_reports_stable_json() {
    let (code, stdout, _) = run(&["gaps", "--sub", "1", "--div", "2,3", "-n", "10000"]);
    assert_eq!(code, 0);
    assert!(stdout.starts_with(r#"{"spec":{"S":[1],"D":[2,3]},"N":10000,"per_value":["#));
    assert!(stdout.contains(r#"{"value":0,"first":0,"count":4104,"max_gap":4,"max_gap_end":23}"#));
}

#[test]
fn verify_battery_passes_at_small_scale() {
    let (code, stdout, _) = run(&["verify", "-n", "2000", "--jobs", "4"]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = stdout.lines().collect();
    assert_eq!(lines.len(), 20);
    assert!(lines.iter().all(|l| l.starts_with("ok: ")));
    // deterministic job order regardless of --jobs
    let (_, repeat, _) = run(&["verify", "-n", "2000", "--jobs", "1"]);
    assert_eq!(stdout, repeat);
}

#[test]
fn verify_single_spec_modes() {
    let (code, stdout, _) = run(&["verify", "--sub", "2", "--div", "7", "-n", "3000"]);
    assert_eq!(code, 0);
    assert!(stdout.starts_with("ok: theorem-2 (k=7)"));

    let (code, stdout, _) = run(&["verify", "--sub", "1", "--div", "2,3", "-n", "3000"]);
    assert_eq!(code, 0);
    assert!(stdout.starts_with("ok: window theorems and residue lemma"));

    let (code, _, stderr) = run(&["verify", "--sub", "1,3", "--div", "5", "-n", "1000"]);
    assert_eq!(code, 2);
    assert!(stderr.contains("nothing to verify"));
}

#[test]
fn conjecture_exit_codes_follow_findings() {
    let (code, stdout, stderr) = run(&["conjecture", "--sub", "1", "--div", "3", "-n", "10000"]);
    assert_eq!(code, 0);
    assert!(stdout.contains(r#""violation_count":0"#));
    assert!(stderr.contains("conjecture holds"));

    let (code, stdout, stderr) = run(&["conjecture", "--sub", "1", "--div", "2", "-n", "1000"]);
    assert_eq!(code, 1);
    assert!(stdout.contains(r#""violations":[6,"#));
    assert!(stderr.contains("CONJECTURE VIOLATED"));
    assert!(stderr.contains("first at n=6"));

    let (code, _, _) = run(&["conjecture", "--sub", "2", "--div", "4", "-n", "100"]);
    assert_eq!(code, 2);
}

#[test]
fn sum_reports_components_and_outcome() {
    let (code, stdout, _) = run(&["sum", "--game", "1;2,3;3", "--game", "2;5;5"]);
    assert_eq!(code, 0);
    assert_eq!(
        stdout,
        "component 0: S={1}, D={2,3}, n=3, sg=2\n\
         component 1: S={2}, D={5}, n=5, sg=2\n\
         xor: 0\n\
         outcome: P (previous player wins)\n\
         winning move: none\n"
    );
}

#[test]
fn sum_finds_the_winning_move() {
    let (code, stdout, _) = run(&["sum", "--game", "1;2;3", "--game", "1;2;2"]);
    assert_eq!(code, 0);
    assert!(stdout.ends_with("winning move: component 0: 3 -> 2\n"));
    assert!(stdout.contains("outcome: N (next player wins)"));
}

#[test]
fn sum_rejects_malformed_games() {
    let (code, _, _) = run(&["sum", "--game", "1;2"]);
    assert_eq!(code, 2);
    let (code, _, _) = run(&["sum", "--game", "1;x;3"]);
    assert_eq!(code, 2);
    let (code, _, _) = run(&["sum", "--game", "0;2;3"]);
    assert_eq!(code, 2);
}

#[test]
fn play_engine_wins_from_a_winning_position() {
    // engine at 3 moves to value 0; the human's only reply is 1; the
    // engine then takes the last move
    let (code, stdout, _) =
        run_with_stdin(&["play", "--sub", "1", "--div", "2,3", "-n", "3"], "1\n");
    assert_eq!(code, 0);
    assert!(stdout.contains("engine plays 3 -> 2"));
    assert!(stdout.contains("engine plays 1 -> 0"));
    assert!(stdout.ends_with("pile: 0, no moves remain; engine wins\n"));
}

#[test]
fn play_from_terminal_position_means_mover_loses() {
    let (code, stdout, _) = run_with_stdin(&["play", "--sub", "1", "--div", "2,3", "-n", "0"], "");
    assert_eq!(code, 0);
    assert_eq!(stdout, "pile: 0, no moves remain; you win\n");
}

#[test]
fn play_reprompts_on_malformed_input() {
    let (code, stdout, _) = run_with_stdin(
        &[
            "play", "--sub", "1", "--div", "2,3", "-n", "2", "--first", "human",
        ],
        "zap\n9\n1\n",
    );
    assert_eq!(code, 0);
    assert_eq!(stdout.matches("illegal move; choose one of: 1").count(), 2);
    assert!(stdout.ends_with("pile: 0, no moves remain; engine wins\n"));
}

#[test]
fn cache_is_created_reused_and_extended() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("t.imrk");
    let cache_str = cache.to_str().unwrap();

    let (code, stdout, _) = run(&[
        "sg", "--sub", "1", "--div", "2,3", "-n", "5000", "--cache", cache_str,
    ]);
    assert_eq!(code, 0);
    assert_eq!(stdout, "2\n");
    let first_len = std::fs::metadata(&cache).unwrap().len();

    // covered query: reused as-is
    let (code, stdout, _) = run(&[
        "sg", "--sub", "1", "--div", "2,3", "-n", "3", "--cache", cache_str,
    ]);
    assert_eq!(code, 0);
    assert_eq!(stdout, "2\n");
    assert_eq!(std::fs::metadata(&cache).unwrap().len(), first_len);

    // larger query: extended in place
    let (code, _, _) = run(&[
        "seq", "--sub", "1", "--div", "2,3", "--to", "9000", "--cache", cache_str,
    ]);
    assert_eq!(code, 0);
    assert!(std::fs::metadata(&cache).unwrap().len() > first_len);
}

#[test]
fn cache_with_wrong_spec_is_refused() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("t.imrk");
    let cache_str = cache.to_str().unwrap();
    let (code, _, _) = run(&[
        "sg", "--sub", "1", "--div", "2,3", "-n", "100", "--cache", cache_str,
    ]);
    assert_eq!(code, 0);
    let (code, _, stderr) = run(&[
        "gaps", "--sub", "1", "--div", "2", "-n", "50", "--cache", cache_str,
    ]);
    assert_eq!(code, 3);
    assert!(stderr.contains("mismatch"));
}

#[test]
fn corrupt_cache_is_a_runtime_error() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("t.imrk");
    let cache_str = cache.to_str().unwrap();
    let (code, _, _) = run(&[
        "sg", "--sub", "1", "--div", "2,3", "-n", "100", "--cache", cache_str,
    ]);
    assert_eq!(code, 0);
    let mut bytes = std::fs::read(&cache).unwrap();
    bytes[0] ^= 0xFF;
    std::fs::write(&cache, &bytes).unwrap();
    let (code, _, stderr) = run(&[
        "sg", "--sub", "1", "--div", "2,3", "-n", "100", "--cache", cache_str,
    ]);
    assert_eq!(code, 3);
    assert!(stderr.contains("corrupt"));
}

#[test]
fn cache_dir_env_var_names_files_by_slug() {
    let dir = tempfile::tempdir().unwrap();
    let out = imark()
        .env("IMARK_CACHE_DIR", dir.path())
        .args(["gaps", "--sub", "1", "--div", "2", "-n", "50"])
        .output()
        .unwrap();
    assert_eq!(out.status.code().unwrap(), 0);
    assert!(dir.path().join("s1_d2.imrk").exists());
}

#[test]
fn mem_limit_is_enforced() {
    let (code, _, stderr) = run(&[
        "gaps",
        "--sub",
        "1",
        "--div",
        "2,3",
        "-n",
        "100000",
        "--mem-limit",
        "100",
    ]);
    assert_eq!(code, 3);
    assert!(stderr.contains("memory budget"));
}
