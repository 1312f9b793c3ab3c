use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn grouptest(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_grouptest"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("run grouptest")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_str(&stdout(o)).unwrap()
}

#[test]
fn design_rid_example() {
    let dir = tempfile::tempdir().unwrap();
    let o = grouptest(
        &[
            "design", "--model", "rid", "--n", "1000", "--d", "1", "--delta", "0.1", "--seed", "7",
            "--out", "m.txt",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["m"], 58);
    assert_eq!(v["feasible"], true);
    assert_eq!(v["seed"], 7);
    let text = fs::read_to_string(dir.path().join("m.txt")).unwrap();
    assert!(text.starts_with("58 1000\n"));
    // same seed, same file
    grouptest(
        &[
            "design", "--model", "rid", "--n", "1000", "--d", "1", "--delta", "0.1", "--seed", "7",
            "--out", "m2.txt",
        ],
        dir.path(),
    );
    assert_eq!(text, fs::read_to_string(dir.path().join("m2.txt")).unwrap());
}

#[test]
fn missing_n_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = grouptest(
        &[
            "design", "--model", "rid", "--d", "1", "--delta", "0.1", "--seed", "1",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn conflicting_parameters_are_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let base = [
        "design", "--model", "rid", "--n", "100", "--d", "2", "--seed", "1",
    ];
    let with = |extra: &[&str]| {
        let mut a: Vec<&str> = base.to_vec();
        a.extend_from_slice(extra);
        grouptest(&a, dir.path()).status.code()
    };
    assert_eq!(with(&["--delta", "0.1", "--r", "5"]), Some(2));
    assert_eq!(with(&["--delta", "0.1", "--p", "0.5"]), Some(2));
    assert_eq!(with(&["--m", "20", "--p", "0.5"]), Some(0));
    assert_eq!(with(&["--m", "20", "--p", "1.5"]), Some(2));
    assert_eq!(with(&[]), Some(2));
    assert_eq!(with(&["--delta", "0.1", "--entropy"]), Some(2));
}

#[test]
fn utdq_default_sizing_is_simplified() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "design", "--model", "utdq", "--q", "3", "--d", "5", "--n", "1000", "--delta", "0.1",
        "--seed", "3",
    ];
    let v = json(&grouptest(&args, dir.path()));
    assert_eq!(v["method"], "transversal_simplified");
    assert_eq!(v["param"], 3);
    assert_eq!(v["m"].as_u64().unwrap() % 3, 0);
    let mut exact = args.to_vec();
    exact.push("--exact-utdq-sizing");
    let o = grouptest(&exact, dir.path());
    let v = json(&o);
    assert_eq!(v["method"], "transversal_exact");
    // q^{d+1} = 729 makes the Chernoff term large but still below 1 here
    assert_eq!(
        o.status.code(),
        Some(if v["feasible"] == true { 0 } else { 3 })
    );
}

#[test]
fn infeasible_sizing_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let o = grouptest(
        &[
            "design", "--model", "rssd", "--n", "100", "--d", "1", "--delta", "0.1", "--seed", "1",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(json(&o)["feasible"], false);
    assert!(String::from_utf8_lossy(&o.stderr).contains("infeasible"));
}

#[test]
fn utdq_design_writes_qary_file_that_check_expands() {
    let dir = tempfile::tempdir().unwrap();
    let o = grouptest(
        &[
            "design", "--model", "utdq", "--n", "50", "--d", "2", "--m", "40", "--seed", "9",
            "--out", "u.txt",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0));
    let text = fs::read_to_string(dir.path().join("u.txt")).unwrap();
    let q = json(&o)["param"].as_u64().unwrap();
    assert_eq!(text.lines().next().unwrap(), format!("{} 50 {q}", 40 / q));
    let o = grouptest(
        &["check", "--matrix", "u.txt", "--defectives", "3,7"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("disjunct="));
}

#[test]
fn check_and_decode_examples() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("id.txt"), "3 3\n100\n010\n001\n").unwrap();
    fs::write(dir.path().join("ones.txt"), "2 2\n11\n11\n").unwrap();
    let o = grouptest(
        &[
            "check",
            "--matrix",
            "id.txt",
            "--defectives",
            "1",
            "--separable",
        ],
        dir.path(),
    );
    assert_eq!(stdout(&o), "disjunct=true\nseparable=true\n");
    let o = grouptest(
        &["decode", "--matrix", "id.txt", "--defectives", "1"],
        dir.path(),
    );
    assert_eq!(stdout(&o), "[1]\n");
    let o = grouptest(
        &["check", "--matrix", "ones.txt", "--defectives", "1"],
        dir.path(),
    );
    assert_eq!(stdout(&o), "disjunct=false\n");
    let o = grouptest(
        &["decode", "--matrix", "ones.txt", "--defectives", "1"],
        dir.path(),
    );
    assert_eq!(stdout(&o), "[1,2]\n");
}

#[test]
fn decode_from_answer_file() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("id.txt"), "3 3\n100\n010\n001\n").unwrap();
    fs::write(dir.path().join("a.txt"), "010\n").unwrap();
    let o = grouptest(
        &["decode", "--matrix", "id.txt", "--answers", "a.txt"],
        dir.path(),
    );
    assert_eq!(stdout(&o), "[2]\n");
    fs::write(dir.path().join("short.txt"), "01\n").unwrap();
    let o = grouptest(
        &["decode", "--matrix", "id.txt", "--answers", "short.txt"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&o.stderr).contains("short.txt"));
}

#[test]
fn io_and_parse_errors_exit_4() {
    let dir = tempfile::tempdir().unwrap();
    let o = grouptest(
        &["check", "--matrix", "absent.txt", "--defectives", "1"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(4));
    fs::write(dir.path().join("bad.txt"), "2 3\n101\n1x1\n").unwrap();
    let o = grouptest(
        &["check", "--matrix", "bad.txt", "--defectives", "1"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&o.stderr).contains("bad.txt:3:"));
}

#[test]
fn separable_size_guard() {
    let dir = tempfile::tempdir().unwrap();
    let row: String = "0".repeat(2000);
    fs::write(dir.path().join("wide.txt"), format!("1 2000\n{row}\n")).unwrap();
    let o = grouptest(
        &[
            "check",
            "--matrix",
            "wide.txt",
            "--defectives",
            "1,2,3",
            "--separable",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("too large"));
}

#[test]
fn mc_outputs_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let base = [
        "mc", "--model", "rrsd", "--n", "300", "--d", "2", "--m", "30", "--trials", "300",
        "--seed", "5",
    ];
    let run = |extra: &[&str]| {
        let mut a = base.to_vec();
        a.extend_from_slice(extra);
        let o = grouptest(&a, dir.path());
        assert_eq!(
            o.status.code(),
            Some(0),
            "{}",
            String::from_utf8_lossy(&o.stderr)
        );
        stdout(&o)
    };
    let csv = run(&["--jobs", "1"]);
    assert_eq!(csv, run(&["--jobs", "3"]));
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "model,n,m,param,d,delta,trials,disjunct_successes,decode_successes,frequency,wilson_ci_low,wilson_ci_high,seed"
    );
    assert!(lines.next().unwrap().starts_with("rrsd,300,30,r="));
    let v: serde_json::Value = serde_json::from_str(&run(&["--format", "json"])).unwrap();
    assert_eq!(v["trials"], 300);
    assert_eq!(v["disjunct_successes"], v["decode_successes"]);
    assert_eq!(v["master_seed"], 5);
}

#[test]
fn mc_auto_sized() {
    let dir = tempfile::tempdir().unwrap();
    let o = grouptest(
        &[
            "mc", "--model", "rid", "--n", "200", "--d", "2", "--delta", "0.1", "--trials", "200",
            "--seed", "1", "--format", "json",
        ],
        dir.path(),
    );
    let v = json(&o);
    assert_eq!(v["delta"], 0.1);
    assert!(v["disjunct_successes"].as_u64().unwrap() >= 170);
}

#[test]
fn sweep_small() {
    let dir = tempfile::tempdir().unwrap();
    let o = grouptest(
        &[
            "sweep",
            "--model",
            "rid",
            "--d",
            "1",
            "--n-list",
            "50,200,800",
            "--target",
            "0.8",
            "--trials",
            "60",
            "--seed",
            "2",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let mut lines = out.lines();
    assert_eq!(
        lines.next().unwrap(),
        "n,m_star,target,trials_per_probe,slope_over_d"
    );
    let rows: Vec<Vec<String>> = lines
        .map(|l| l.split(',').map(String::from).collect())
        .collect();
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r[4] == rows[0][4] && !r[4].is_empty()));
    let o = grouptest(
        &[
            "sweep", "--model", "rid", "--d", "1", "--n-list", "50,200", "--target", "0.8",
            "--trials", "60", "--seed", "2", "--format", "json",
        ],
        dir.path(),
    );
    let v = json(&o);
    assert!(v["slope_over_d"].is_null());
    assert_eq!(v["points"].as_array().unwrap().len(), 2);
    assert!(!v["probes"][0]["probes"].as_array().unwrap().is_empty());
}

#[test]
fn table1_output() {
    let dir = tempfile::tempdir().unwrap();
    let o = grouptest(&["table1", "--dmax", "2"], dir.path());
    let out = stdout(&o);
    let blocks: Vec<&str> = out.split("\n\n").collect();
    assert_eq!(blocks.len(), 2);
    let table: Vec<&str> = blocks[0].lines().collect();
    assert_eq!(table[0], "d,rid,rrsd,rssd,rssd_alpha,utdq,utdq_q");
    assert!(table[1].starts_with("2,2.718282,2.718282,"));
    assert!(table[2].starts_with("inf,2.718282,2.718282,2.081369,,2.081369,"));
    assert!(blocks[1].starts_with("d,rssd,ref_rssd"));
    let o = grouptest(&["table1", "--dmax", "3", "--no-compare"], dir.path());
    assert_eq!(stdout(&o).lines().count(), 4);
    let o = grouptest(&["table1", "--dmax", "1"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn config_file_with_override() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("run.conf"),
        "model = rid\nn = 1000\nd = 2\ndelta = 0.1\nseed = 7\n",
    )
    .unwrap();
    let v = json(&grouptest(
        &["design", "--config", "run.conf", "--d", "1"],
        dir.path(),
    ));
    assert_eq!(v["m"], 58);
}
