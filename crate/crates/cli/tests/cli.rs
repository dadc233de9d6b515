use std::process::Command;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_thickpoints"));
    c.env_remove("THICKPOINTS_THREADS");
    c
}

#[test]
fn unknown_experiment_exits_2_and_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let st = bin().args(["foo", "--out"]).arg(&out).output().unwrap();
    assert_eq!(st.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&st.stderr).contains("unknown-experiment"));
    assert!(!out.exists());
}

#[test]
fn invalid_parameter_exits_2_with_its_own_code() {
    let dir = tempfile::tempdir().unwrap();
    let st = bin()
        .args(["pair-thick", "--param", "b=0.2", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(st.status.code(), Some(2));
    let err = String::from_utf8_lossy(&st.stderr);
    assert!(err.contains("invalid-parameter") && err.contains("0 < b < 1/(2π)"), "{err}");
}

#[test]
fn unwritable_output_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "x").unwrap();
    let st = bin().args(["green-disc-check", "--out"]).arg(blocker.join("sub")).output().unwrap();
    assert_eq!(st.status.code(), Some(4));
}

#[test]
fn config_file_and_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(
        &cfg,
        "experiment.name = kac-lattice\nrun.seed = 5\nrun.replicas = 2\nparam.R = 6\nparam.walks = 50\noutput.formats = json\n",
    )
    .unwrap();
    let out = dir.path().join("o");
    let st = bin()
        .args(["kac-lattice", "--config"])
        .arg(&cfg)
        .args(["--seed", "9", "--threads", "2", "--format", "json,csv", "--out"])
        .arg(&out)
        .output()
        .unwrap();
    assert!(st.status.success(), "{}", String::from_utf8_lossy(&st.stderr));
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("kac-lattice.json")).unwrap()).unwrap();
    assert_eq!(json["config"]["master_seed"], 9);
    assert_eq!(json["config"]["replicas"], 2);
    assert_eq!(json["config"]["params"]["R"], 6.0);
    assert_eq!(json["schema_version"], 1);
    assert!(out.join("kac-lattice.csv").exists());
}

#[test]
fn thread_count_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let mut bodies = Vec::new();
    for t in ["1", "3"] {
        let out = dir.path().join(t);
        let st = bin()
            .args(["hitting-prob", "--seed", "3", "--replicas", "3", "--param", "walks=100", "--format", "csv", "--threads", t, "--out"])
            .arg(&out)
            .output()
            .unwrap();
        assert!(st.status.success());
        bodies.push(std::fs::read_to_string(out.join("hitting-prob.csv")).unwrap());
    }
    assert_eq!(bodies[0], bodies[1]);
}

#[test]
fn bad_threads_flag_is_a_config_error() {
    let st = bin().args(["kac-lattice", "--threads", "zero"]).output().unwrap();
    assert_eq!(st.status.code(), Some(2));
    let st = bin().env("THICKPOINTS_THREADS", "nope").args(["kac-lattice"]).output().unwrap();
    assert_eq!(st.status.code(), Some(2));
}

#[test]
fn list_shows_all_experiments() {
    let st = bin().arg("--list").output().unwrap();
    assert!(st.status.success());
    let text = String::from_utf8_lossy(&st.stdout);
    assert_eq!(text.lines().filter(|l| !l.starts_with(' ')).count(), 11);
}
