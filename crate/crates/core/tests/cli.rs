use std::fs;
use std::process::Command;

use wandsynth_core::EngineConfig;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_wandsynth"));
    c.env_remove("NL_CONFIG").env("RUST_LOG", "warn");
    c
}

#[test]
fn print_config_emits_defaults() {
    let out = bin().arg("print-config").output().unwrap();
    assert!(out.status.success());
    let cfg = EngineConfig::from_json(std::str::from_utf8(&out.stdout).unwrap()).unwrap();
    assert_eq!(cfg, EngineConfig::default());
}

#[test]
fn config_path_falls_back_to_env() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("engine.json");
    fs::write(&path, r#"{"gesture": {"repeat_ms": 100}, "control": {"tick_hz": 60}}"#).unwrap();
    let out = bin().arg("print-config").env("NL_CONFIG", &path).output().unwrap();
    assert!(out.status.success());
    let cfg = EngineConfig::from_json(std::str::from_utf8(&out.stdout).unwrap()).unwrap();
    assert_eq!(cfg.gesture.repeat_ms, 100);
    assert_eq!(cfg.control.tick_hz, 60.0);
    assert_eq!(cfg.wand, Default::default());
}

#[test]
fn invalid_config_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    fs::write(&path, r#"{"mapping": {"c_max": 9000}}"#).unwrap();
    let out = bin().args(["print-config", "--config"]).arg(&path).output().unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("c_max"));

    fs::write(&path, r#"{"wand": {"keystep": 0.1}}"#).unwrap();
    let out = bin().args(["print-config", "--config"]).arg(&path).output().unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("keystep"));
}

#[test]
fn render_writes_wav_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let script = dir.path().join("take.txt");
    fs::write(&script, "# two wands\n0 O\n0 P\n250 W\n500 GESTURE R MOVE 0.1 0\n").unwrap();
    let wav = dir.path().join("take.wav");
    let out = bin()
        .args(["render", "--script"])
        .arg(&script)
        .arg("--out")
        .arg(&wav)
        .args(["--duration", "1.0"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let bytes = fs::read(&wav).unwrap();
    assert_eq!(bytes.len(), 44 + 48_000 * 2 * 4);
    assert_eq!(u16::from_le_bytes([bytes[20], bytes[21]]), 3);
    let report = fs::read_to_string(dir.path().join("take.state.txt")).unwrap();
    assert!(report.contains("left.y=0.55\n"));
    assert!(report.contains("right.x=0.6\n"));
}

#[test]
fn render_reports_script_line() {
    let dir = tempfile::tempdir().unwrap();
    let script = dir.path().join("bad.txt");
    fs::write(&script, "0 O\n10 X\n").unwrap();
    let out = bin()
        .args(["render", "--script"])
        .arg(&script)
        .arg("--out")
        .arg(dir.path().join("x.wav"))
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn run_without_audio_device_fails_explicitly() {
    let out = bin()
        .args(["run", "--input", "keys", "--ws", "127.0.0.1:0"])
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("--no-audio"));
}
