mod common;

use std::io::{BufRead, BufReader, Write};
use std::process::{Command, Output, Stdio};
use std::sync::Arc;
use std::time::Duration;

use common::{golden_path, script_path, SCRIPTS};
use morphplay_core::scene::bundled_house;
use morphplay_core::session::{SessionConfig, SessionState};

fn morphplay() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_morphplay"));
    cmd.env_remove(morphplay::SCENE_DIR_ENV);
    cmd
}

fn run(args: &[&str]) -> Output {
    morphplay().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

const HATCH_SCENE: &str = r#"{"name":"shed","parts":[{"id":"hatch","name":"Hatch",
    "bbox":{"min":[0,0,0],"max":[1,1,1]},
    "pose":{"rotation":[1,0,0,0,1,0,0,0,1],"translation":[0,0,0]}}],
    "constraints":{"hatch":{"kind":"rotatable","axis":"x","sense":"ccw",
        "anchor":[0,0,5],"angle_range":[0,90]}}}"#;

#[test]
fn validate_bundled_scene() {
    let o = run(&["validate", "house"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "parts: 12, rotatable: 8, translatable: 1\n");
}

#[test]
fn validate_reports_anchor_outside_box() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("shed.json");
    std::fs::write(&path, HATCH_SCENE).unwrap();
    let o = run(&["validate", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("hatch") && err.contains("anchor"), "{err}");
}

#[test]
fn validate_reports_field_path_of_malformed_document() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, r#"{"name":"s","parts":[{"id":"a"}]}"#).unwrap();
    let o = run(&["validate", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("parts[0]"), "{}", stderr(&o));
}

#[test]
fn validate_missing_file_is_an_io_error() {
    let o = run(&["validate", "/nonexistent/scene.json"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn scene_dir_lookup() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("shed.json"),
        HATCH_SCENE.replace("[0,0,5]", "[0,0,1]"),
    )
    .unwrap();
    let o = morphplay()
        .env(morphplay::SCENE_DIR_ENV, dir.path())
        .args(["validate", "shed"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o), "parts: 1, rotatable: 1, translatable: 0\n");
}

#[test]
fn oracle_examples() {
    let o = run(&[
        "oracle", "2", "0", "0", "--axis", "z", "--sense", "ccw", "--angle", "90", "--pivot",
        "1,0,0",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "1.000000000 1.000000000 0.000000000\n");

    let o = run(&["oracle", "-1.5", "2.25", "7", "--translate", "0,0,0"]);
    assert_eq!(stdout(&o), "-1.500000000 2.250000000 7.000000000\n");

    let o = run(&[
        "oracle", "-1.5", "2.25", "7", "--axis", "y", "--sense", "cw", "--angle", "0",
    ]);
    assert_eq!(stdout(&o), "-1.500000000 2.250000000 7.000000000\n");

    let o = run(&["oracle", "1.5", "2", "0", "--translate", "-1.5,0.5,3"]);
    assert_eq!(stdout(&o), "0.000000000 2.500000000 3.000000000\n");

    let o = run(&[
        "oracle", "0", "1", "0", "--axis", "x", "--sense", "ccw", "--angle", "-90", "--pivot",
        "-1,0,0",
    ]);
    assert_eq!(stdout(&o), "0.000000000 0.000000000 -1.000000000\n");
}

#[test]
fn oracle_flag_conflicts_exit_one() {
    for args in [
        &[
            "oracle",
            "1",
            "2",
            "3",
            "--translate",
            "1,1,1",
            "--axis",
            "z",
        ][..],
        &["oracle", "1", "2", "3", "--axis", "z", "--sense", "cw"],
        &[
            "oracle", "1", "2", "3", "--axis", "q", "--sense", "cw", "--angle", "5",
        ],
        &["oracle", "1", "2", "--translate", "0,0,0"],
        &["oracle", "1", "2", "3", "--translate", "0,0"],
    ] {
        let o = run(args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        assert!(o.stdout.is_empty());
    }
}

#[test]
fn replay_matches_goldens() {
    for name in SCRIPTS {
        let o = run(&[
            "replay",
            "house",
            script_path(name).to_str().unwrap(),
            "--golden",
            golden_path(name).to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0), "{name}: {}", stderr(&o));
        assert_eq!(
            stdout(&o),
            std::fs::read_to_string(golden_path(name)).unwrap()
        );
    }
}

#[test]
fn replay_twice_is_byte_identical() {
    let script = script_path("mixed_session");
    let a = run(&["replay", "house", script.to_str().unwrap()]);
    let b = run(&["replay", "house", script.to_str().unwrap()]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn replay_reads_standard_input() {
    let mut child = morphplay()
        .args(["replay", "house", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    let script = std::fs::read(script_path("entrance_door")).unwrap();
    child.stdin.take().unwrap().write_all(&script).unwrap();
    let o = child.wait_with_output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        stdout(&o),
        std::fs::read_to_string(golden_path("entrance_door")).unwrap()
    );
}

#[test]
fn empty_script_transcript() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.script");
    std::fs::write(&path, "").unwrap();
    let o = run(&["replay", "house", path.to_str().unwrap()]);
    let kinds: Vec<String> = stdout(&o)
        .lines()
        .map(|l| {
            serde_json::from_str::<serde_json::Value>(l).unwrap()["type"]
                .as_str()
                .unwrap()
                .to_owned()
        })
        .collect();
    assert_eq!(kinds, ["scene", "state_update", "snapshot"]);
}

#[test]
fn replay_script_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.script");
    std::fs::write(&path, "{\"type\":\"reset\"}\nnot json\n").unwrap();
    let o = run(&["replay", "house", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));
}

#[test]
fn golden_mismatch_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let golden = dir.path().join("golden.transcript");
    std::fs::write(&golden, "{}\n").unwrap();
    let o = run(&[
        "replay",
        "house",
        script_path("entrance_door").to_str().unwrap(),
        "--golden",
        golden.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("line 1"));
}

#[test]
fn silent_verdicts_strip_preview_verdicts() {
    let o = run(&[
        "replay",
        "house",
        script_path("entrance_door").to_str().unwrap(),
        "--silent-verdicts",
    ]);
    let mut previews = 0;
    for line in stdout(&o).lines() {
        let m: serde_json::Value = serde_json::from_str(line).unwrap();
        if m["type"] == "preview" {
            previews += 1;
            assert!(m["payload"].get("verdict").is_none());
            assert!(m["payload"].get("pose").is_some());
        }
    }
    assert_eq!(previews, 8);
}

#[test]
fn bad_pivot_tolerance_exits_one() {
    let o = run(&[
        "replay",
        "house",
        script_path("entrance_door").to_str().unwrap(),
        "--pivot-tolerance",
        "-1",
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn serve_bind_failure_exits_two() {
    let taken = std::net::TcpListener::bind("127.0.0.1:0").unwrap();
    let port = taken.local_addr().unwrap().port().to_string();
    let o = run(&["serve", "house", "--port", &port]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn serve_interrupt_flushes_restorable_snapshot() {
    let dir = tempfile::tempdir().unwrap();
    let mut child = morphplay()
        .args([
            "serve",
            "house",
            "--port",
            "0",
            "--snapshot-dir",
            dir.path().to_str().unwrap(),
        ])
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    let mut out = BufReader::new(child.stdout.take().unwrap());
    let mut banner = String::new();
    out.read_line(&mut banner).unwrap();
    let url = banner
        .trim()
        .strip_prefix("listening on ")
        .unwrap()
        .to_owned()
        + "main";

    let rt = tokio::runtime::Runtime::new().unwrap();
    let messages = morphplay::replay::parse_script(
        &std::fs::read_to_string(script_path("entrance_door")).unwrap(),
    )
    .unwrap();
    let lines = rt
        .block_on(morphplay::client::socket_replay(
            &url,
            &messages,
            Duration::from_secs(10),
        ))
        .unwrap();
    assert_eq!(lines.len(), 19);

    let status = Command::new("kill")
        .args(["-INT", &child.id().to_string()])
        .status()
        .unwrap();
    assert!(status.success());
    let mut rest = String::new();
    std::io::Read::read_to_string(&mut out, &mut rest).unwrap();
    assert_eq!(child.wait().unwrap().code(), Some(0));
    assert!(rest.contains("main.snapshot.json"), "{rest}");

    let text = std::fs::read_to_string(dir.path().join("main.snapshot.json")).unwrap();
    let restored =
        SessionState::restore(Arc::new(bundled_house()), SessionConfig::default(), &text).unwrap();
    assert_eq!(restored.seq(), 8);
    assert_eq!(restored.snapshot_text(), text);
    assert!(restored.last_preview().unwrap().verdict.is_feasible());

    // the file is accepted back by the server
    let mut again = morphplay()
        .args([
            "serve",
            "house",
            "--port",
            "0",
            "--snapshot-dir",
            dir.path().to_str().unwrap(),
        ])
        .arg("--restore")
        .arg(dir.path().join("main.snapshot.json"))
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    let mut banner = String::new();
    BufReader::new(again.stdout.take().unwrap())
        .read_line(&mut banner)
        .unwrap();
    assert!(banner.starts_with("listening on"));
    again.kill().unwrap();
    let _ = again.wait();
}
