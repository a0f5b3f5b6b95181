use std::fs;
use std::path::Path;
use std::process::Command;

fn run(kind: &str, cfg: &str, out: &Path, extra: &[&str]) -> (i32, String) {
    let cfg_path = out.with_extension("cfg");
    fs::write(&cfg_path, cfg).unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_chaoslab"))
        .arg(kind)
        .arg("--config")
        .arg(&cfg_path)
        .arg("--out")
        .arg(out)
        .args(extra)
        .output()
        .unwrap();
    (o.status.code().unwrap(), String::from_utf8_lossy(&o.stdout).into_owned() + &String::from_utf8_lossy(&o.stderr))
}

#[test]
fn sample_smoke_writes_field_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let (code, log) = run("sample", "dim = 1\nm = 1024\nt_max = 4\nreplicas = 1\n", &out, &[]);
    assert_eq!(code, 0, "{log}");
    let csv = fs::read_to_string(out.join("samples_field.csv")).unwrap();
    assert!(csv.starts_with("replica,index,x,value\n"));
    assert_eq!(csv.lines().count(), 1025);
    assert!(!csv.contains('\r'));
    let manifest: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["config_hash"].as_str().unwrap().len(), 64);
    assert!(manifest["wall_time_seconds"].as_f64().is_some());
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["passed"], true);
}

#[test]
fn reruns_and_worker_counts_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "m = 256\nt_max = 3\ngamma = 0.5, 1.0\nreplicas = 40\nbatch = 7\nseed = 11\n";
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    run("moments", &format!("{cfg}radii = 0.05, 0.1, 0.2, 0.4\n"), &a, &["--workers", "1"]);
    run("moments", &format!("{cfg}radii = 0.05, 0.1, 0.2, 0.4\n"), &b, &["--workers", "3"]);
    assert_eq!(fs::read(a.join("samples_moments.csv")).unwrap(), fs::read(b.join("samples_moments.csv")).unwrap());
    let (c, d) = (dir.path().join("c"), dir.path().join("d"));
    run("brw", "generations = 8\nreplicas = 50\n", &c, &[]);
    run("brw", "generations = 8\nreplicas = 50\n", &d, &["--workers", "2"]);
    assert_eq!(fs::read(c.join("samples_brw.csv")).unwrap(), fs::read(d.join("samples_brw.csv")).unwrap());
}

#[test]
fn interrupted_run_resumes_to_the_same_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r");
    let cfg = "kind = sh-ratio\nm = 256\nt_max = 3\nreplicas = 30\nbatch = 4\n";
    run("sh-ratio", cfg, &out, &[]);
    let full = fs::read(out.join("samples_ratio.csv")).unwrap();
    let text = String::from_utf8(full.clone()).unwrap();
    let kept: String = text.lines().take(12).map(|l| format!("{l}\n")).collect();
    fs::write(out.join("samples_ratio.csv"), kept).unwrap();
    run("sh-ratio", cfg, &out, &[]);
    assert_eq!(fs::read(out.join("samples_ratio.csv")).unwrap(), full);
    // A different seed must not resume from the old rows.
    run("sh-ratio", cfg, &out, &["--seed", "9"]);
    assert_ne!(fs::read(out.join("samples_ratio.csv")).unwrap(), full);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let (code, log) = run("sample", "dim = 5\n", &dir.path().join("bad"), &[]);
    assert_eq!(code, 1);
    assert!(log.contains("`dim`"), "{log}");
    let (code, _) = run("sample", "nonsense\n", &dir.path().join("bad2"), &[]);
    assert_eq!(code, 1);
    let (code, _) = run("warp", "m = 64\n", &dir.path().join("bad3"), &[]);
    assert_eq!(code, 1);
    let (code, _) = run("sample", "kind = brw\n", &dir.path().join("bad4"), &[]);
    assert_eq!(code, 1);
    // Grid coarser than the finest scale: the run completes but a check fails.
    let (code, log) = run("sample", "m = 16\nt_max = 4\nreplicas = 1\n", &dir.path().join("coarse"), &[]);
    assert_eq!(code, 2, "{log}");
    assert!(log.contains("FAIL grid-spacing-vs-finest-scale"));
}
