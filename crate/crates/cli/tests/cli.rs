use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use foldnet::conv::{conv_network, ConvNetwork, Tensor3};
use foldnet::network::{fc_network, forward, InitRange};
use foldnet::persist::to_document;
use foldnet::{SplitMix64, Vector, ZipMode};
use foldnet_cli::metrics::parse_pearson;
use tempfile::TempDir;

fn foldnet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_foldnet"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn path(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_str().unwrap().to_owned()
}

fn succeed(args: &[&str]) {
    let out = foldnet(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn single_sample_metrics() {
    let dir = TempDir::new().unwrap();
    let csv = path(&dir, "m.csv");
    succeed(&["train-sine", "--samples", "1", "--out", &csv]);
    let text = fs::read_to_string(&csv).unwrap();
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[0], "sample_index,error");
    assert!(lines[1].starts_with("0,"));
    assert!(parse_pearson(&text).unwrap().is_nan());
}

#[test]
fn same_seed_same_bytes() {
    let dir = TempDir::new().unwrap();
    let run = |name: &str, seed: &str| {
        let (csv, net) = (
            path(&dir, &format!("{name}.csv")),
            path(&dir, &format!("{name}.json")),
        );
        succeed(&[
            "train-sine",
            "--samples",
            "200",
            "--seed",
            seed,
            "--out",
            &csv,
            "--save",
            &net,
        ]);
        (fs::read(&csv).unwrap(), fs::read(&net).unwrap())
    };
    let a = run("a", "4");
    assert_eq!(a, run("b", "4"));
    assert_ne!(a, run("c", "5"));
}

#[test]
fn broken_network_files_fail() {
    let dir = TempDir::new().unwrap();
    let net = path(&dir, "n.json");
    succeed(&[
        "train-sine",
        "--samples",
        "5",
        "--out",
        &path(&dir, "m.csv"),
        "--save",
        &net,
    ]);
    let text = fs::read_to_string(&net).unwrap();
    fs::write(&net, &text[..text.len() / 2]).unwrap();
    let out = foldnet(&["eval", "--load", &net, "--input", "0.5"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));

    let missing = foldnet(&["eval", "--load", &path(&dir, "nope.json"), "--input", "0.5"]);
    assert!(!missing.status.success());
    let resume = foldnet(&[
        "train-sine",
        "--load",
        &path(&dir, "nope.json"),
        "--out",
        &path(&dir, "x.csv"),
    ]);
    assert!(!resume.status.success());
}

#[test]
fn bad_flags_fail() {
    let dir = TempDir::new().unwrap();
    let csv = path(&dir, "m.csv");
    assert!(!foldnet(&["train-sine", "--lr", "-1", "--out", &csv])
        .status
        .success());
    assert!(!foldnet(&["train-sine", "--samples", "0", "--out", &csv])
        .status
        .success());
    assert!(!foldnet(&["train-sine", "--init", "2:1", "--out", &csv])
        .status
        .success());
    assert!(!foldnet(&["train-sine"]).status.success());
}

#[test]
fn eval_matches_forward_bitwise() {
    let dir = TempDir::new().unwrap();
    let net_path = path(&dir, "fc.json");
    let network = fc_network(&mut SplitMix64::new(9), InitRange::default()).unwrap();
    fs::write(&net_path, to_document(&network).unwrap()).unwrap();
    let x = 0.123456789_f64;
    let out = foldnet(&["eval", "--load", &net_path, "--input", &x.to_string()]);
    assert!(out.status.success());
    let printed: f64 = String::from_utf8(out.stdout)
        .unwrap()
        .trim()
        .parse()
        .unwrap();
    let expected = forward(&network, Vector::new(vec![x]).unwrap(), ZipMode::Strict).unwrap()[0][0];
    assert_eq!(printed.to_bits(), expected.to_bits());
}

#[test]
fn eval_conv_network_from_file() {
    let dir = TempDir::new().unwrap();
    let (net_path, input_path) = (path(&dir, "xo.json"), path(&dir, "in.txt"));
    let network =
        conv_network(&mut SplitMix64::new(2), InitRange::new(-0.5, 0.5).unwrap()).unwrap();
    fs::write(&net_path, to_document(&network).unwrap()).unwrap();
    let pixels: Vec<f64> = (0..49).map(|i| (i % 7) as f64 / 7.0).collect();
    let text: Vec<String> = pixels.iter().map(|v| v.to_string()).collect();
    fs::write(&input_path, text.join("\n")).unwrap();
    let out = foldnet(&["eval", "--load", &net_path, "--input-file", &input_path]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let printed: Vec<f64> = String::from_utf8(out.stdout)
        .unwrap()
        .trim()
        .split(',')
        .map(|t| t.parse().unwrap())
        .collect();
    let expected = forward::<ConvNetwork, _, _>(
        &network,
        Tensor3::new(7, 7, 1, pixels).unwrap(),
        ZipMode::Strict,
    )
    .unwrap();
    assert_eq!(printed, expected[0].as_slice());
    let wrong_shape = foldnet(&["eval", "--load", &net_path, "--input", "1,2,3"]);
    assert!(!wrong_shape.status.success());
}

#[test]
fn input_layer_alone_echoes() {
    let dir = TempDir::new().unwrap();
    let net = path(&dir, "id.json");
    fs::write(
        &net,
        r#"{"format":"foldnet/1","layers":[{"kind":"input"}]}"#,
    )
    .unwrap();
    let out = foldnet(&["eval", "--load", &net, "--input", "0.25,-3,7"]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "0.25,-3,7\n");
}

#[test]
fn unknown_format_is_rejected() {
    let dir = TempDir::new().unwrap();
    let net = path(&dir, "v2.json");
    fs::write(
        &net,
        r#"{"format":"foldnet/2","layers":[{"kind":"input"}]}"#,
    )
    .unwrap();
    let out = foldnet(&["eval", "--load", &net, "--input", "1"]);
    assert!(!out.status.success());
}

#[test]
fn save_then_resume() {
    let dir = TempDir::new().unwrap();
    let (first, second) = (path(&dir, "1.json"), path(&dir, "2.json"));
    succeed(&[
        "train-xo",
        "--samples",
        "1",
        "--out",
        &path(&dir, "a.csv"),
        "--save",
        &first,
    ]);
    succeed(&[
        "train-xo",
        "--samples",
        "3",
        "--load",
        &first,
        "--out",
        &path(&dir, "b.csv"),
        "--save",
        &second,
    ]);
    assert_ne!(fs::read(&first).unwrap(), fs::read(&second).unwrap());
    let csv = fs::read_to_string(path(&dir, "a.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
}

#[test]
fn gen_xo_is_seeded() {
    let dir = TempDir::new().unwrap();
    let gen = |name: &str, seed: &str| {
        let p = path(&dir, name);
        succeed(&["gen-xo", "--samples", "20", "--seed", seed, "--out", &p]);
        fs::read_to_string(Path::new(&p)).unwrap()
    };
    let a = gen("a.csv", "1");
    assert_eq!(a, gen("b.csv", "1"));
    assert_ne!(a, gen("c.csv", "2"));
    assert_eq!(a.lines().count(), 21);
    assert!(a
        .lines()
        .skip(1)
        .all(|l| l.starts_with("X,") || l.starts_with("O,")));
}
