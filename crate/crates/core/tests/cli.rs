mod common;

use std::path::Path;
use std::process::{Command, Output};

use fristogram::lfio::write_config;

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fristogram")).args(args).output().unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn scene(dir: &Path) -> std::path::PathBuf {
    let cfg = dir.join("array.json");
    std::fs::write(&cfg, write_config(&common::desk_rig())).unwrap();
    let lf = dir.join("lf");
    let out = cli(&["gen-scene", "--config", p(&cfg), "--out", p(&lf), "--seed", "3"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    lf
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(cli(&[]).status.code(), Some(2));
    assert_eq!(cli(&["bin", "--no-such-flag"]).status.code(), Some(2));
    assert_eq!(cli(&["--threads", "0", "metrics", "--ref", "a", "--test", "b"]).status.code(), Some(2));
}

#[test]
fn missing_input_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let out = cli(&["bin", "--lf", p(&dir.path().join("nope")), "--out", p(&dir.path().join("x.csv"))]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());
}

#[test]
fn identical_images_report_infinite_psnr() {
    let dir = tempfile::tempdir().unwrap();
    let lf = scene(dir.path());
    let view = lf.join("cam_0_0.ppm");
    let out = cli(&["metrics", "--ref", p(&view), "--test", p(&view)]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), "psnr_db=inf ssim=1.000000");
}

#[test]
fn fristogram_csv_conserves_rays() {
    let dir = tempfile::tempdir().unwrap();
    let lf = scene(dir.path());
    let csv = dir.path().join("hist.csv");
    let cdf = dir.path().join("cdf.csv");
    let out = cli(&["fristogram", "--lf", p(&lf), "--out", p(&csv), "--cdf", p(&cdf)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    let field = |key: &str| -> u64 {
        let tok = stdout.split_whitespace().find(|t| t.starts_with(&format!("{key}="))).unwrap();
        tok[key.len() + 1..].parse().unwrap()
    };
    assert_eq!(field("total_rays") + field("rejected"), 16 * 64 * 64);

    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("ray_count,froxel_count"));
    let (mut rays, mut froxels) = (0u64, 0u64);
    for l in lines {
        let (r, n) = l.split_once(',').unwrap();
        let (r, n): (u64, u64) = (r.parse().unwrap(), n.parse().unwrap());
        rays += r * n;
        froxels += n;
    }
    assert_eq!(rays, field("total_rays"));
    assert_eq!(froxels, field("nonempty_froxels"));

    let last = std::fs::read_to_string(&cdf).unwrap().lines().last().unwrap().to_string();
    assert!(last.ends_with(",1") || last.ends_with(",1.0") || last.ends_with(",1.000000"), "{last}");
    assert!(dir.path().join("hist.csv.manifest.json").exists());
}

#[test]
fn synthesize_writes_image_mask_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let lf = scene(dir.path());
    let frxl = dir.path().join("f.frxl");
    assert!(cli(&["reduce", "--lf", p(&lf), "--filter", "mean", "--out", p(&frxl)]).status.success());
    let img = dir.path().join("v.ppm");
    let mask = dir.path().join("m.pgm");
    let out = cli(&["synthesize", "--field", p(&frxl), "--camera", "1,2", "--out", p(&img), "--mask", p(&mask)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(std::fs::read(&img).unwrap().starts_with(b"P6"));
    assert!(std::fs::read(&mask).unwrap().starts_with(b"P5"));
    let manifest: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("v.ppm.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["outputs"].as_array().unwrap().len(), 2);
    assert!(manifest["config_hash"].as_str().unwrap().len() == 64);
}
