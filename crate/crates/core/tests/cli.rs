use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use minflex::cli::{report_path, Outcome, Report};
use minflex::flexcheck::Verdict;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn minflex(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_minflex"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env("MINFLEX_THREADS", "2")
        .output()
        .unwrap()
}

fn report(out: &Path) -> (String, Report) {
    let text = std::fs::read_to_string(report_path(out)).unwrap();
    let report = Report::from_json(&text).unwrap();
    (text, report)
}

fn classify_domain(file: &str) -> (i32, Report) {
    let dir = tempfile::tempdir().unwrap();
    let path = data(file);
    let out = minflex(dir.path(), &["classify", "--domain", path.to_str().unwrap()]);
    let (_, r) = report(dir.path());
    (out.status.code().unwrap(), r)
}

fn verdict(r: &Report) -> Verdict {
    match &r.outcome {
        Outcome::Classify { classification } => classification.verdict,
        other => panic!("unexpected outcome {other:?}"),
    }
}

#[test]
fn domain_verdicts_and_exit_codes() {
    for (file, code, v) in [
        ("wedge.json", 0, Verdict::Flexible),
        ("halfspace.json", 2, Verdict::NotFlexible),
        ("ball-complement.json", 0, Verdict::Flexible),
    ] {
        let (got, r) = classify_domain(file);
        assert_eq!((got, verdict(&r)), (code, v), "{file}");
        assert_eq!(r.exit_code, code);
        assert!(!r.rules.is_empty());
    }
}

#[test]
fn complex_body_classification() {
    let dir = tempfile::tempdir().unwrap();
    let body = data("disc-times-c.json");
    let out = minflex(dir.path(), &["classify", "--body", body.to_str().unwrap(), "--complex"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(verdict(&report(dir.path()).1), Verdict::NotFlexible);

    let body = data("cylinder.json");
    let out = minflex(dir.path(), &["classify", "--body", body.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn witness_and_psh_commands() {
    let dir = tempfile::tempdir().unwrap();
    let domain = data("ball-complement.json");
    let out = minflex(dir.path(), &["witness", "--domain", domain.to_str().unwrap(), "--radii", "1,10,100"]);
    assert_eq!(out.status.code(), Some(0));
    match report(dir.path()).1.outcome {
        Outcome::Witness { tube_ok, growth_ok, radii, .. } => {
            assert!(tube_ok && growth_ok);
            assert_eq!(radii, vec![1.0, 10.0, 100.0]);
        }
        other => panic!("{other:?}"),
    }

    // x1² + x2² − x3²/2 has Hessian eigenvalues −1, 2, 2
    let tau = data("diag.json");
    let p2 = minflex(dir.path(), &["check-psh", "--tau", tau.to_str().unwrap(), "--p", "2", "--grid", "9"]);
    assert_eq!(p2.status.code(), Some(0));
    let p1 = minflex(dir.path(), &["check-psh", "--tau", tau.to_str().unwrap(), "--p", "1", "--grid", "9"]);
    assert_eq!(p1.status.code(), Some(2));
}

#[test]
fn surface_and_arc_commands() {
    let dir = tempfile::tempdir().unwrap();
    let domain = data("ball-complement.json");
    let out = minflex(
        dir.path(),
        &["verify-surface", "--surface", "catenoid", "--domain", domain.to_str().unwrap(), "--offset", "3,0,0"],
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));

    let out = minflex(
        dir.path(),
        &["extend-arc", "--domain", domain.to_str().unwrap(), "--from", "-3,0,0.5", "--to", "3,0,-0.5"],
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    match report(dir.path()).1.outcome {
        Outcome::ExtendArc { polyline, check, .. } => {
            assert!(polyline.len() >= 3, "the straight segment crosses the ball");
            assert!(check.all_inside);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.json");
    let out = minflex(dir.path(), &["classify", "--domain", missing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());
    let out = minflex(dir.path(), &["verify-surface", "--surface", "torus"]);
    assert_eq!(out.status.code(), Some(1));
    let out = minflex(dir.path(), &["no-such-command"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn reports_round_trip_and_are_deterministic() {
    let wedge = data("wedge.json");
    let args = ["witness", "--domain", wedge.to_str().unwrap(), "--seed", "7"];
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    minflex(a.path(), &args);
    minflex(b.path(), &args);
    let (text_a, report_a) = report(a.path());
    let (text_b, _) = report(b.path());
    assert_eq!(text_a, text_b);
    assert_eq!(report_a.to_json().unwrap(), text_a);
    assert_eq!(report_a.config.seed, 7);
}
