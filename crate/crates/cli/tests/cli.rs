//! End-to-end runs of the `xideform` binary: exit codes, determinism, cache, cleanup.

use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str], cwd: &Path, cache: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_xideform"))
        .args(args)
        .current_dir(cwd)
        .env("XIDEFORM_CACHE_DIR", cache)
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

const SMALL: [&str; 10] = [
    "--spec", "zeta", "--t", "-1", "--strip", "-0.21:-0.19", "--ymin", "103.5", "--ymax", "104.5",
];

#[test]
fn eval_prints_value_and_metadata() {
    let d = tempfile::tempdir().unwrap();
    let o = run(&["eval", "--what", "jmap", "--t", "-1", "--s", "-0.25+40i"], d.path(), d.path());
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.contains("value = "), "{text}");
    assert!(text.contains("digits = 34"), "{text}");

    let o = run(&["eval", "--what", "ft", "--t", "-1", "--s", "10"], d.path(), d.path());
    assert_eq!(code(&o), 0);
    let line = stdout(&o).lines().next().unwrap().to_string();
    let re: f64 = line.trim_start_matches("value = ").split('+').next().unwrap().parse().unwrap();
    assert!((re - 1.0).abs() < 1e-2, "{line}");
}

#[test]
fn exit_codes_follow_the_contract() {
    let d = tempfile::tempdir().unwrap();
    // usage
    assert_eq!(code(&run(&["eval", "--what", "nope"], d.path(), d.path())), 2);
    assert_eq!(code(&run(&["eval", "--what", "f", "--s", "1+zi"], d.path(), d.path())), 2);
    assert_eq!(code(&run(&["eval", "--spec", "/no/such/spec.json", "--what", "f", "--s", "2"], d.path(), d.path())), 2);
    // numeric
    let o = run(&["eval", "--what", "ft", "--t", "0.5", "--s", "10"], d.path(), d.path());
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("DomainError"));
    // witness not found within a tiny height budget
    let o = run(&["witness", "--t", "-1", "--ymax", "40"], d.path(), d.path());
    assert_eq!(code(&o), 4);
    assert!(!d.path().join("zeta_t-1_witness.json").exists());
}

#[test]
fn zeros_are_deterministic_and_cached() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let cache_a = a.path().join("cache");
    let cache_b = b.path().join("cache");
    let mut args = vec!["zeros"];
    args.extend(SMALL);
    assert_eq!(code(&run(&args, a.path(), &cache_a)), 0);
    assert_eq!(code(&run(&args, b.path(), &cache_b)), 0);
    let name = "zeta_t-1_ft_zeros.csv";
    let fa = std::fs::read(a.path().join(name)).unwrap();
    let fb = std::fs::read(b.path().join(name)).unwrap();
    assert_eq!(fa, fb);
    let csv = String::from_utf8(fa.clone()).unwrap();
    assert_eq!(csv.lines().next(), Some("re,im,residual,method"));
    assert_eq!(csv.lines().count(), 2, "{csv}");
    assert_eq!(std::fs::read_dir(&cache_a).unwrap().count(), 1);

    // a cache hit reproduces the fresh result
    std::fs::remove_file(a.path().join(name)).unwrap();
    assert_eq!(code(&run(&args, a.path(), &cache_a)), 0);
    assert_eq!(std::fs::read(a.path().join(name)).unwrap(), fb);
}

#[test]
fn figure_outputs_and_cleanup() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = [
        "figure", "--spec", "zeta", "--t", "-1", "--strip", "-0.22:-0.19", "--ymin", "103", "--ymax", "107",
    ];
    assert_eq!(code(&run(&args, a.path(), &a.path().join("cache"))), 0);
    assert_eq!(code(&run(&args, b.path(), &b.path().join("cache"))), 0);
    for f in ["zeta_t-1_ft_zeros.csv", "zeta_t-1_xi_zeros.csv"] {
        assert_eq!(std::fs::read(a.path().join(f)).unwrap(), std::fs::read(b.path().join(f)).unwrap());
    }
    let strip_version = |p: &Path| -> String {
        std::fs::read_to_string(p)
            .unwrap()
            .lines()
            .filter(|l| !l.starts_with("<!-- xideform"))
            .collect::<Vec<_>>()
            .join("\n")
    };
    let svg = strip_version(&a.path().join("zeta_t-1_figure.svg"));
    assert_eq!(svg, strip_version(&b.path().join("zeta_t-1_figure.svg")));
    assert_eq!(svg.matches("<polyline").count(), 2);

    // the SVG target is a directory, so the last write fails and the CSVs are removed
    let c = tempfile::tempdir().unwrap();
    std::fs::create_dir(c.path().join("zeta_t-1_figure.svg")).unwrap();
    let o = run(&args, c.path(), &a.path().join("cache"));
    assert_eq!(code(&o), 3);
    assert!(!c.path().join("zeta_t-1_ft_zeros.csv").exists());
    assert!(!c.path().join("zeta_t-1_xi_zeros.csv").exists());
}
