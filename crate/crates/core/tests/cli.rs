use std::process::{Command, Output};

fn torus_mm(args: &[&str], env: Option<(&str, &str)>) -> Output {
    let mut c = Command::new(env!("CARGO_BIN_EXE_torus-mm"));
    c.args(args).env_remove("TORUS_MM_CONSTANTS");
    if let Some((k, v)) = env {
        c.env(k, v);
    }
    c.output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn farey_dist_example() {
    let o = torus_mm(&["farey", "dist", "0/1", "2/5"], None);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "2\n");
}

#[test]
fn pa_build_example() {
    let o = torus_mm(&["pa", "build", "--k", "2", "--tuple", "1"], None);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["trace"], "6");
    assert_eq!(v["matrix"], "[[5,2],[2,1]]");
}

#[test]
fn exit_codes() {
    let o = torus_mm(&["farey", "dist", "--nope"], None);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));
    assert_eq!(torus_mm(&["hier", "build", "--m1", "0/1|5/1", "--m2", "0/1|1/0"], None).status.code(), Some(3));
    assert_eq!(torus_mm(&["orbits", "spectrum", "--n", "12", "--B", "9", "--budget-tuples", "100"], None).status.code(), Some(2));
    assert_eq!(torus_mm(&["mm", "support", "--pairs", "300", "--height", "10", "--threshold", "5"], None).status.code(), Some(1));
}

#[test]
fn byte_reproducible() {
    let args = ["mm", "contraction", "--m1", "0/1|1/0", "--m2", "3/7|1/2", "--samples", "5", "--seed", "11"];
    let a = torus_mm(&args, None);
    let b = torus_mm(&args, None);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn constants_file_override() {
    let frozen = include_str!("../constants/frozen.txt");
    let altered = frozen.replace("\nc2 = 27\n", "\nc2 = 0.5\n");
    assert_ne!(altered, frozen);
    let path = std::env::temp_dir().join(format!("torus-mm-constants-{}.txt", std::process::id()));
    std::fs::write(&path, altered).unwrap();
    let args = ["mm", "formula", "--m1", "0/1|1/0", "--m2", "0/1|1/5"];
    let base = torus_mm(&args, None);
    let env = torus_mm(&args, Some(("TORUS_MM_CONSTANTS", path.to_str().unwrap())));
    let flag = torus_mm(&[&args[..], &["--constants", path.to_str().unwrap()]].concat(), None);
    std::fs::remove_file(&path).unwrap();
    let c2 = |o: &Output| serde_json::from_str::<serde_json::Value>(stdout(o).trim()).unwrap()["c2"].clone();
    assert_eq!(c2(&base), 27.0);
    assert_eq!(c2(&env), 0.5);
    assert_eq!(c2(&flag), 0.5);
    // total 6, distance 5: 6/1.25 - 0.5 <= 5 <= 1.25 * 6 + 0.5 still holds
    assert_eq!(env.status.code(), Some(0));
}
