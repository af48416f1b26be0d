//! End-to-end runs of the binary: exit codes, report formats, basis export.

use std::path::PathBuf;
use std::process::{Command, Output};

use derham::Report;

fn derham(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_derham")).args(args).env_remove("DERHAM_JOBS").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn reports(args: &[&str]) -> Vec<Report> {
    let o = derham(args);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_str(&stdout(&o)).unwrap()
}

fn temp_file(name: &str, text: &str) -> PathBuf {
    let p = std::env::temp_dir().join(format!("derham-cli-{}-{}", std::process::id(), name));
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn cube_enrichment_grows_with_k() {
    let rs = reports(&["verify", "--element", "cube", "--family", "1", "--k", "0..2", "--report", "json"]);
    let dh: Vec<usize> = rs.iter().map(|r| r.delta.as_ref().unwrap().dim_h).collect();
    assert_eq!(dh, [12, 15, 18]);
    assert!(rs.iter().all(|r| r.exact && r.compatible));
    assert_eq!(rs.iter().map(|r| r.m_index).collect::<Vec<_>>(), [Some(6), Some(9), Some(12)]);
}

#[test]
fn interval_report() {
    let rs = reports(&["verify", "--element", "interval", "--k", "0", "--report", "json"]);
    assert_eq!(rs.len(), 1);
    let r = &rs[0];
    assert_eq!((r.dims.h, r.dims.e, r.dims.v, r.dims.w), (2, None, None, 1));
    assert_eq!(r.delta, None);
    assert_eq!(r.m_index, None);
}

#[test]
fn json_round_trips() {
    let o = derham(&["verify", "--element", "pyramid", "--family", "2", "--k", "1", "--report", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let rs: Vec<Report> = serde_json::from_str(&text).unwrap();
    let again: Vec<Report> = serde_json::from_str(&serde_json::to_string(&rs).unwrap()).unwrap();
    assert_eq!(rs, again);
    let raw: serde_json::Value = serde_json::from_str(&text).unwrap();
    let obj = raw[0].as_object().unwrap();
    for key in ["element", "family", "k", "dims", "exact", "compatible", "delta", "mIndex", "notes"] {
        assert!(obj.contains_key(key), "{key}");
    }
    assert_eq!(raw[0]["delta"]["props"].as_array().unwrap().len(), 8);
    assert!(raw[0]["dims"]["V"].is_number());
}

#[test]
fn text_report_and_output_file() {
    let out = std::env::temp_dir().join(format!("derham-cli-{}-out.txt", std::process::id()));
    let o = derham(&["verify", "--element", "square", "--family", "2", "--k", "1", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.contains("square family 2 k=1: PASS"), "{text}");
    assert!(text.contains("1 of 1 passed"));
    let _ = std::fs::remove_file(out);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(derham(&["verify", "--element", "tet", "--family", "3"]).status.code(), Some(2));
    assert_eq!(derham(&["verify", "--bogus"]).status.code(), Some(2));
    assert_eq!(derham(&["verify", "--element", "blob"]).status.code(), Some(2));
    assert_eq!(derham(&["verify", "--k", "2..1"]).status.code(), Some(2));
    assert_eq!(derham(&["verify", "--element", "polygon"]).status.code(), Some(2));
    assert_eq!(derham(&["basis", "--element", "cube"]).status.code(), Some(2));
    assert_eq!(derham(&["verify", "--element", "polygon", "--polygon-vertices", "/nonexistent/file"]).status.code(), Some(2));
    let o = Command::new(env!("CARGO_BIN_EXE_derham")).args(["verify", "--element", "interval"]).env("DERHAM_JOBS", "0").output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn jobs_cap_is_respected() {
    let o = Command::new(env!("CARGO_BIN_EXE_derham"))
        .args(["table", "--element", "triangle", "--k", "0..1"])
        .env("DERHAM_JOBS", "1")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 5);
}

#[test]
fn polygon_from_file() {
    let p = temp_file("pentagon.txt", "# convex pentagon\n0 0\n1 0\n3/2 1/2\n1/2 3/2\n-1/2 1\n");
    let rs = reports(&["verify", "--element", "polygon", "--family", "1", "--k", "0..1", "--polygon-vertices", p.to_str().unwrap(), "--report", "json"]);
    assert_eq!(rs.len(), 2);
    assert_eq!((rs[0].dims.h, rs[0].dims.e, rs[0].dims.w), (10, Some(10), 1));
    assert!(rs.iter().all(|r| r.exact && r.compatible));
    let bad = temp_file("bad.txt", "0 0\n1 0\n1 1\n2 -5\n");
    assert_eq!(derham(&["verify", "--element", "polygon", "--polygon-vertices", bad.to_str().unwrap()]).status.code(), Some(2));
    let _ = std::fs::remove_file(p);
    let _ = std::fs::remove_file(bad);
}

#[test]
fn basis_export_examples() {
    let o = derham(&["basis", "--element", "interval", "--family", "1", "--k", "0"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("# element=interval family=1 k=0\n"));
    assert!(text.lines().any(|l| l == "1"));
    assert!(text.lines().any(|l| l == "1 * x^1"));

    let sq = stdout(&derham(&["basis", "--element", "square", "--family", "2", "--k", "0"]));
    assert!(sq.lines().any(|l| l == "1 * y^1 | -1 * x^1"), "{sq}");

    let py = stdout(&derham(&["basis", "--element", "pyramid", "--family", "2", "--k", "0"]));
    assert!(py.lines().any(|l| l == "1 * x^1 y^1 / (1-z)^1"), "{py}");
}

#[test]
fn basis_lines_parse_back() {
    let text = stdout(&derham(&["basis", "--element", "pyramid", "--family", "1", "--k", "1"]));
    let mut n = 0;
    for line in text.lines().filter(|l| !l.starts_with('#') && !l.starts_with('[')) {
        derham_core::polyalg::parse_field(line, 3).unwrap();
        n += 1;
    }
    assert!(n > 100);
}

#[test]
fn output_is_deterministic() {
    let args = ["verify", "--element", "tet", "--k", "0..1", "--seed", "7", "--report", "json"];
    assert_eq!(derham(&args).stdout, derham(&args).stdout);
}

#[test]
fn any_failing_job_exits_one() {
    use derham::commands::{verdict_code, verify_job};
    use derham::config::Job;
    use derham_core::spaces::Shape;
    let job = Job { shape: Shape::reference(derham_core::ElementKind::Tet).unwrap(), family: 2, k: 0 };
    let good = verify_job(&job, 0, true).unwrap();
    assert!(good.pass);
    let mut bad = good.clone();
    bad.pass = false;
    assert_eq!(verdict_code(std::slice::from_ref(&good)), derham::EXIT_PASS);
    assert_eq!(verdict_code(&[good, bad]), derham::EXIT_FAIL);
}
