use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kgplanar")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn qdim_prints_the_dimensions() {
    let o = run(&["qdim", "--n-range", "6..=10", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let text = v.to_string();
    for d in ["6", "8", "9"] {
        assert!(text.contains(d), "{text}");
    }
}

#[test]
fn certify_petersen_holds() {
    let o = run(&["certify", "--n", "5", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["n"], 5);
    assert_eq!(v["property_g"], true);
    assert_eq!(v["quantum_symmetry"], "none");
}

#[test]
fn capacity_is_undecided() {
    let o = run(&["certify", "--n", "20", "--kmax", "4"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn usage_errors() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(3));
    assert_eq!(run(&["certify", "--n", "3"]).status.code(), Some(3));
    assert_eq!(run(&["appendix", "--d", "4", "--gen", "(1 2"]).status.code(), Some(3));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn witness_writes_to_file() {
    let dir = std::env::temp_dir().join(format!("kgplanar-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("x.json");
    let o = run(&["witness", "--n", "5", "--format", "json", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let body = std::fs::read_to_string(&path).unwrap();
    assert!(serde_json::from_str::<serde_json::Value>(&body).is_ok());
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn appendix_cyclic_group() {
    let o = run(&["appendix", "--d", "4", "--gen", "(1 2 3 4)"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains('6'));
}
