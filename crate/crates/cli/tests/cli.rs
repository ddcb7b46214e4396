use std::path::{Path, PathBuf};

use polyconn::instances::{InstanceFile, RouteFile};
use polyconn_cli::{exit, run_args};

fn fixture(name: &str) -> String {
    let p: PathBuf = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name);
    p.to_str().unwrap().to_owned()
}

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut full = vec!["polyconn"];
    full.extend_from_slice(args);
    let code = run_args(full, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

#[test]
fn route_writes_verified_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let (code, _, err) = run(&[
        "route",
        &fixture("diameter.json"),
        "-o",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, exit::OK, "{err}");
    assert!(err.is_empty());
    let r = RouteFile::parse(&std::fs::read(&out).unwrap()).unwrap();
    assert!(!r.untouched);
    assert!(r.verify.as_ref().unwrap().pass);
    let (code, stdout, _) = run(&["verify", &fixture("diameter.json"), out.to_str().unwrap()]);
    assert_eq!(code, exit::OK);
    assert!(stdout.ends_with("pass\n"));
}

#[test]
fn endpoint_inside_obstacle_is_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let bytes = std::fs::read(fixture("diameter.json")).unwrap();
    let mut f = InstanceFile::parse(&bytes).unwrap();
    let q = f.query.as_mut().unwrap();
    q.x = vec![0.25, 0.0];
    q.polyline.as_mut().unwrap()[0] = vec![0.25, 0.0];
    let path = dir.path().join("bad.json");
    std::fs::write(&path, f.to_bytes()).unwrap();
    let (code, stdout, err) = run(&["route", path.to_str().unwrap()]);
    assert_eq!(code, exit::INPUT);
    assert!(stdout.is_empty());
    assert!(err.contains("x, y ∈ U∖(∪ S_i)"), "{err}");
}

#[test]
fn touching_closures_is_hypothesis_failure() {
    let (code, _, err) = run(&["route", &fixture("touching.json")]);
    assert_eq!(code, exit::HYPOTHESIS);
    assert!(err.contains("disjoint closures"), "{err}");
    assert_eq!(
        run(&["validate", &fixture("touching.json")]).0,
        exit::HYPOTHESIS
    );
}

#[test]
fn face_segment_is_um_violation() {
    assert_eq!(
        run(&["route", &fixture("linf_face.json")]).0,
        exit::UM_VIOLATION
    );
    assert_eq!(
        run(&["check-um", &fixture("linf_face.json")]).0,
        exit::UM_VIOLATION
    );
    assert_eq!(
        run(&["check-um", &fixture("linf_face_perturbed.json")]).0,
        exit::OK
    );
}

#[test]
fn tolerance_flags_apply() {
    let (code, _, _) = run(&["--tol-sep", "5", "validate", &fixture("two_balls.json")]);
    assert_eq!(code, exit::HYPOTHESIS);
    let (code, _, err) = run(&["--tol-class=-1", "validate", &fixture("two_balls.json")]);
    assert_eq!(code, exit::INPUT, "{err}");
}

#[test]
fn verify_rejects_straight_line_through_ball() {
    let dir = tempfile::tempdir().unwrap();
    let mut f = InstanceFile::parse(&std::fs::read(fixture("diameter.json")).unwrap()).unwrap();
    f.obstacles.clear();
    let free = dir.path().join("free.json");
    std::fs::write(&free, f.to_bytes()).unwrap();
    let out = dir.path().join("r.json");
    let (code, _, _) = run(&["route", free.to_str().unwrap(), "-o", out.to_str().unwrap()]);
    assert_eq!(code, exit::OK);
    let r = RouteFile::parse(&std::fs::read(&out).unwrap()).unwrap();
    assert!(r.untouched);
    let (code, stdout, err) = run(&[
        "--step",
        "0.01",
        "verify",
        &fixture("diameter.json"),
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, exit::VERIFICATION);
    assert!(!stdout.contains("pass"));
    assert!(!err.is_empty());
}

#[test]
fn plot_outputs() {
    let (code, svg, _) = run(&["plot", &fixture("empty.json")]);
    assert_eq!(code, exit::OK);
    assert_eq!(svg.matches("<rect").count(), 1);
    assert!(!svg.contains("<circle"));

    let dir = tempfile::tempdir().unwrap();
    let route = dir.path().join("r.json");
    run(&[
        "route",
        &fixture("diameter.json"),
        "-o",
        route.to_str().unwrap(),
    ]);
    let (code, svg, _) = run(&[
        "plot",
        &fixture("diameter.json"),
        "--route",
        route.to_str().unwrap(),
    ]);
    assert_eq!(code, exit::OK);
    assert_eq!(svg.matches("<circle").count(), 1);
    assert!(svg.contains(r#"class="collar""#));

    assert_eq!(
        run(&["plot", &fixture("space3d.json")]).0,
        exit::UNSUPPORTED
    );
}

#[test]
fn gen_is_deterministic() {
    let a = run(&[
        "--seed",
        "3",
        "gen",
        "--count",
        "10",
        "--query-vertices",
        "5",
    ]);
    let b = run(&[
        "--seed",
        "3",
        "gen",
        "--count",
        "10",
        "--query-vertices",
        "5",
    ]);
    assert_eq!(a.0, exit::OK);
    assert_eq!(a, b);
    let c = run(&["--seed", "4", "gen", "--count", "10"]);
    assert_ne!(a.1, c.1);
    assert_eq!(
        run(&[
            "gen",
            "--count",
            "500",
            "--radius-min",
            "2",
            "--radius-max",
            "3"
        ])
        .0,
        exit::GENERATION
    );
}

#[test]
fn error_codes_for_bad_files() {
    assert_eq!(run(&["validate", "/nonexistent/file.json"]).0, exit::IO);
    assert_eq!(
        run(&["validate", &fixture("invalid/unknown_field.json")]).0,
        exit::PARSE
    );
    assert_eq!(
        run(&["validate", &fixture("invalid/dim1.json")]).0,
        exit::INPUT
    );
    assert_eq!(run(&["frobnicate"]).0, exit::USAGE);
    let (code, _, err) = run(&["route", &fixture("invalid/dim1.json")]);
    assert_ne!(code, exit::OK);
    assert!(!err.is_empty());
}

#[test]
fn every_failure_prints_a_diagnostic() {
    for name in [
        "linf_face.json",
        "touching.json",
        "invalid/dim1.json",
        "invalid/unknown_field.json",
    ] {
        let (code, _, err) = run(&["route", &fixture(name)]);
        assert_ne!(code, exit::OK);
        assert!(err.starts_with("error: "), "{name}: {err}");
    }
}
