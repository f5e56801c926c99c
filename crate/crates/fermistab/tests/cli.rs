use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use fermistab::report::{read_csv, Sidecar};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_fermistab"));
    c.env("RUST_LOG", "warn");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn fermistab")
}

fn write_config(dir: &Path, body: &str) -> PathBuf {
    let p = dir.join("sweep.toml");
    std::fs::write(&p, format!("seed = 7\nout = \"{}\"\n{body}", dir.join("out").display())).unwrap();
    p
}

const DK_SR: &str = r#"
[[noise]]
model = "SD"
p = 0.001
[[sweep]]
encodings = ["DK"]
trotter_steps = [2]
mitigations = ["SR"]
shots = 5000
"#;

fn files_with(dir: &Path, ext: &str) -> Vec<PathBuf> {
    let mut v: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == ext))
        .collect();
    v.sort();
    v
}

#[test]
fn generate_writes_circuit_and_sidecar() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), DK_SR);
    let out = run(&["generate", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let points = tmp.path().join("out/points");
    assert_eq!(files_with(&points, "circuit").len(), 1);
    let side: Sidecar = serde_json::from_str(&std::fs::read_to_string(&files_with(&points, "json")[0]).unwrap()).unwrap();
    assert!(side.gate_counts.two_qubit > 0);
    assert!(side.logical_gate_counts.two_qubit <= side.gate_counts.two_qubit);
    assert!(!side.postselection_rows.is_empty());
    assert_eq!(side.shots, 5000);
}

#[test]
fn odd_size_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), &DK_SR.replace("encodings = [\"DK\"]", "encodings = [\"DK\"]\nsizes = [5]"));
    let out = run(&["generate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("must be even"));
}

#[test]
fn unknown_key_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), &format!("{DK_SR}bogus = 1\n"));
    assert_eq!(run(&["sweep", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn missing_batch_is_a_runtime_error() {
    let tmp = tempfile::tempdir().unwrap();
    let missing = tmp.path().join("nothing.fsb");
    let out = run(&["analyze", "--out", tmp.path().to_str().unwrap(), missing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn staged_commands_are_reproducible_and_match_sweep() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), DK_SR);
    let cfg = cfg.to_str().unwrap();
    let mut batches = Vec::new();
    for _ in 0..2 {
        for cmd in ["generate", "sample", "analyze"] {
            let out = run(&[cmd, "--config", cfg]);
            assert!(out.status.success(), "{cmd}: {}", String::from_utf8_lossy(&out.stderr));
        }
        let fsb = &files_with(&tmp.path().join("out/points"), "fsb")[0];
        batches.push(std::fs::read(fsb).unwrap());
    }
    assert_eq!(batches[0], batches[1]);
    let staged = std::fs::read(tmp.path().join("out/results.csv")).unwrap();
    assert!(run(&["sweep", "--config", cfg]).status.success());
    let swept = std::fs::read(tmp.path().join("out/results.csv")).unwrap();
    assert_eq!(staged, swept);

    assert!(run(&["plot", "--config", cfg]).status.success());
    let svgs = files_with(&tmp.path().join("out/plots"), "svg");
    assert_eq!(svgs.len(), 1);
    assert!(std::fs::read_to_string(&svgs[0]).unwrap().contains("<svg"));
}

#[test]
fn heavy_noise_point_is_excluded() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), &DK_SR.replace("p = 0.001", "p = 0.05"));
    let out = run(&["sweep", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = read_csv(std::fs::File::open(tmp.path().join("out/results.csv")).unwrap()).unwrap();
    assert_eq!(rows.len(), 1);
    assert!(rows[0].excluded);
    assert!(rows[0].r_det >= 0.995 || rows[0].n_post < 500);
}

#[test]
fn explain_lists_points() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), DK_SR);
    let out = run(&["generate", "--explain", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("DK") && text.contains("SR"), "{text}");
}

#[test]
fn dump_operators() {
    let out = run(&["dump", "operators", "--l", "4"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(text.lines().filter(|l| l.starts_with("S ")).count(), 8);
    assert_eq!(run(&["dump", "operators", "--l", "2"]).status.code(), Some(2));
}
