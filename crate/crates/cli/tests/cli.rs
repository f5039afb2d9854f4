use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use hypam::export::read_ply;
use hypam::{FloorDiagram, HPoint, Surface};
use serde_json::{json, Value};

const L2: &str = r#"{"p":{"re":[1,0,0,0],"im":[0,0,0,0]},"q":{"re":[0,0,0,1],"im":[0,0,0,0]}}"#;

fn hypam(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hypam")).args(args).output().unwrap()
}

fn write_job(dir: &Path, name: &str, job: &Value) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, serde_json::to_string(job).unwrap()).unwrap();
    p
}

fn report(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn l2_job(command: &str) -> Value {
    json!({ "command": command, "input": { "line": serde_json::from_str::<Value>(L2).unwrap() } })
}

#[test]
fn l2_classifies_as_geodesic() {
    let dir = tempfile::tempdir().unwrap();
    let job = write_job(dir.path(), "job.json", &l2_job("line-classify"));
    let out = dir.path().join("report.json");
    let o = hypam(&["run", "--job", job.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r = report(&out);
    assert_eq!(r["class"], "geodesic");
    assert_eq!(r["endpoints"], json!(["0", "inf"]));
    assert_eq!(r["command"], "line-classify");
}

#[test]
fn malformed_job_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let job = dir.path().join("job.json");
    std::fs::write(&job, "{\"command\": ").unwrap();
    let out = dir.path().join("report.json");
    let o = hypam(&["run", "--job", job.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(!out.exists());
}

#[test]
fn unknown_fields_and_missing_seed_are_input_errors() {
    let dir = tempfile::tempdir().unwrap();
    let mut extra = l2_job("line-classify");
    extra["colour"] = json!("red");
    let job = write_job(dir.path(), "extra.json", &extra);
    assert_eq!(hypam(&["run", "--job", job.to_str().unwrap()]).status.code(), Some(3));

    let job = write_job(dir.path(), "sample.json", &l2_job("line-sample"));
    assert_eq!(hypam(&["run", "--job", job.to_str().unwrap()]).status.code(), Some(3));
    assert_eq!(hypam(&["run", "--job", job.to_str().unwrap(), "--seed", "4"]).status.code(), Some(0));

    let job = write_job(dir.path(), "classify.json", &l2_job("line-classify"));
    assert_eq!(hypam(&["run", "--job", job.to_str().unwrap(), "--tol.bogus", "1"]).status.code(), Some(3));
}

#[test]
fn tolerance_override_is_echoed() {
    let dir = tempfile::tempdir().unwrap();
    let job = write_job(dir.path(), "job.json", &l2_job("line-classify"));
    let out = dir.path().join("r.json");
    let o = hypam(&["run", "--job", job.to_str().unwrap(), "--tol.eps_q=1e-6", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(report(&out)["tolerances"]["eps_q"], 1e-6);
}

#[test]
fn reports_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let job = json!({
        "command": "surface-convexity",
        "seed": 9,
        "starts": 32,
        "input": { "surface": Surface::hole_quadric(), "pairs": 4, "steps": 8 },
    });
    let job = write_job(dir.path(), "job.json", &job);
    let mut runs = Vec::new();
    for k in 0..2 {
        let out = dir.path().join(format!("r{k}.json"));
        let o = hypam(&["run", "--job", job.to_str().unwrap(), "--out", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        let mut r = report(&out);
        r.as_object_mut().unwrap().remove("timing");
        runs.push(r);
    }
    assert_eq!(runs[0], runs[1]);
    assert_eq!(runs[0]["violations"], 0);
}

#[test]
fn hole_excludes_origin() {
    let dir = tempfile::tempdir().unwrap();
    let job = json!({ "seed": 1, "input": { "surface": Surface::hole_quadric(), "point": HPoint::origin() } });
    let job = write_job(dir.path(), "job.json", &job);
    let out = dir.path().join("r.json");
    let o = hypam(&["surface-member", "--job", job.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(report(&out)["member"], false);
}

#[test]
fn invalid_diagram_is_a_verdict_failure() {
    let dir = tempfile::tempdir().unwrap();
    let mut d = FloorDiagram::figure1();
    d.degree += 1;
    let job = write_job(dir.path(), "job.json", &json!({ "command": "trop-validate", "input": { "diagram": d } }));
    let out = dir.path().join("r.json");
    let o = hypam(&["run", "--job", job.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let r = report(&out);
    assert_eq!(r["verdicts"]["valid"], false);
    assert!(!r["violations"].as_array().unwrap().is_empty());
}

#[test]
fn theta_artifact_round_trips_through_export() {
    let dir = tempfile::tempdir().unwrap();
    let ply = dir.path().join("theta.ply");
    let job = json!({ "command": "trop-theta", "density": 500, "input": { "diagram": FloorDiagram::figure1() } });
    let job = write_job(dir.path(), "job.json", &job);
    let o = hypam(&["run", "--job", job.to_str().unwrap(), "--artifact", ply.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let (pts, tags) = read_ply(std::io::BufReader::new(std::fs::File::open(&ply).unwrap())).unwrap();
    assert_eq!(pts.len(), tags.unwrap().len());

    let csv = dir.path().join("theta.csv");
    let job = write_job(dir.path(), "export.json", &json!({ "input": { "from": ply.to_str().unwrap() } }));
    let o = hypam(&["export", "--job", job.to_str().unwrap(), "--artifact", csv.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("x,y,z,piece"));
    assert_eq!(text.lines().count(), pts.len() + 1);
}

#[test]
fn selftest_passes() {
    for cmd in ["line-classify", "curve-gauss", "trop-validate", "export"] {
        let o = hypam(&[cmd, "--selftest"]);
        assert_eq!(o.status.code(), Some(0), "{cmd}: {}", String::from_utf8_lossy(&o.stdout));
    }
}
