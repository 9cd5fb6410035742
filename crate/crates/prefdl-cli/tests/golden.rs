//! Golden tests: every corpus script must reproduce its recorded
//! machine-mode output byte for byte, with the documented exit codes.

use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

fn repo_root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..").canonicalize().unwrap()
}

fn run(args: &[&str], stdin: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_prefdl"));
    cmd.current_dir(repo_root()).args(args);
    match stdin {
        Some(input) => {
            cmd.stdin(Stdio::piped()).stdout(Stdio::piped()).stderr(Stdio::piped());
            let mut child = cmd.spawn().expect("spawn prefdl");
            use std::io::Write;
            child.stdin.as_mut().unwrap().write_all(input.as_bytes()).unwrap();
            child.wait_with_output().expect("wait for prefdl")
        }
        None => cmd.output().expect("run prefdl"),
    }
}

const SCRIPTS: &[(&str, &str)] = &[
    ("tweety", "corpus/tweety.pdt"),
    ("preference_cycle", "corpus/preference_cycle.pdt"),
    ("typed_sources", "corpus/typed_sources.pdt"),
    ("recency_vs_source", "corpus/recency_vs_source.pdt"),
    ("twins", "corpus/twins.pdt"),
    ("penguin_contraction", "corpus/penguin_contraction.pdt"),
    ("postulates", "corpus/contested_p.pdt"),
    ("penguin_contracted_session", "corpus/penguin_contracted.session.json"),
];

#[test]
fn corpus_scripts_match_recorded_outputs() {
    for (script, theory) in SCRIPTS {
        let out = run(
            &[
                "--theory",
                theory,
                "--script",
                &format!("corpus/scripts/{script}.cmds"),
                "--machine",
            ],
            None,
        );
        assert!(out.status.success(), "{script}: {}", String::from_utf8_lossy(&out.stderr));
        let expected =
            std::fs::read(repo_root().join(format!("corpus/expected/{script}.jsonl")))
                .unwrap_or_else(|_| panic!("missing golden for {script}"));
        assert_eq!(
            out.stdout,
            expected,
            "{script} drifted from its golden output:\n{}",
            String::from_utf8_lossy(&out.stdout)
        );
    }
}

#[test]
fn machine_output_is_deterministic() {
    let args = [
        "--theory",
        "corpus/recency_vs_source.pdt",
        "--script",
        "corpus/scripts/recency_vs_source.cmds",
        "--machine",
    ];
    let a = run(&args, None);
    let b = run(&args, None);
    assert_eq!(a.stdout, b.stdout, "two runs of the same script differ");
}

#[test]
fn exit_code_2_for_parse_errors() {
    // malformed command line inside the script
    let out = run(&["--theory", "corpus/tweety.pdt", "--machine"], Some("query p <\n"));
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stdout));
    // unknown theory file reports on stderr
    let out = run(&["--theory", "corpus/nonexistent.pdt"], None);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn exit_code_1_for_engine_errors() {
    // preferred extensions are undefined once a constraint exists
    let out = run(
        &["--theory", "corpus/penguin_contracted.session.json", "--machine"],
        Some("preferred\n"),
    );
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stdout));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("engine-error"), "{text}");
}

#[test]
fn exit_code_3_for_resource_caps() {
    let out = run(
        &["--theory", "corpus/typed_sources.pdt", "--machine"],
        Some("set max-models 1\nextensions all\n"),
    );
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stdout));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("resource-cap"), "{text}");
}

#[test]
fn failing_commands_leave_the_session_usable() {
    // the bad query errors, the good ones still answer
    let out = run(
        &["--theory", "corpus/tweety.pdt", "--machine"],
        Some("query nosuchname < d2\nquery ~flies(tweety)\n"),
    );
    let text = String::from_utf8_lossy(&out.stdout);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].contains("\"status\":\"error\""));
    assert!(lines[1].contains("\"accepted\":true"));
}

#[test]
fn repl_reads_piped_commands() {
    let out = run(
        &[],
        Some("revise p\nquery p\nquit\n"),
    );
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("revised: d1: p"), "{text}");
    assert!(text.contains("accepted: true"), "{text}");
    assert!(text.contains("bye"), "{text}");
}

#[test]
fn session_save_and_resume_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("session.json");
    let path_str = path.to_str().unwrap();
    let out = run(
        &["--theory", "corpus/contested_p.pdt", "--machine"],
        Some(&format!("revise d1 < d2\nsave {path_str}\n")),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    // resuming the session reproduces the accepted conclusions
    let out = run(
        &["--theory", path_str, "--machine"],
        Some("query p\nquery ~p\n"),
    );
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].contains("\"accepted\":true"), "{text}");
    assert!(lines[1].contains("\"accepted\":false"), "{text}");
}
