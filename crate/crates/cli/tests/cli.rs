use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use fairsched::format::parse_instance;
use tempfile::TempDir;

fn fairsched(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fairsched"))
        .args(args)
        .current_dir(cwd)
        .env_remove("FAIRSCHED_SEED")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn generate_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let args = ["generate", "random", "--n", "6", "--m", "4", "--seed", "11"];
    let a = fairsched(&args, dir.path());
    let b = fairsched(&args, dir.path());
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let c = fairsched(&["generate", "random", "--n", "6", "--m", "4", "--seed", "12"], dir.path());
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn seed_from_environment() {
    let dir = TempDir::new().unwrap();
    let flag = fairsched(&["generate", "random", "--seed", "5"], dir.path());
    let env = Command::new(env!("CARGO_BIN_EXE_fairsched"))
        .args(["generate", "random"])
        .env("FAIRSCHED_SEED", "5")
        .output()
        .unwrap();
    assert_eq!(flag.stdout, env.stdout);
}

#[test]
fn auto_agrees_with_oracle_and_writes_verified_witness() {
    let dir = TempDir::new().unwrap();
    let p = dir.path();
    for seed in 0..15 {
        let seed = seed.to_string();
        let gen = ["generate", "random", "--n", "5", "--m", "4", "--k", "2", "--seed", &seed, "-o", "i.json"];
        assert_eq!(code(&fairsched(&gen, p)), 0);
        let auto = fairsched(&["solve", "i.json", "--out", "s.json", "--report", "r.json"], p);
        let oracle = fairsched(&["solve", "i.json", "--algorithm", "oracle"], p);
        assert_eq!(code(&auto), code(&oracle), "seed {seed}");
        let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(p.join("r.json")).unwrap()).unwrap();
        assert_eq!(report["fingerprint"].as_str().unwrap().len(), 64);
        if code(&auto) == 0 {
            assert_eq!(stdout(&auto).trim(), "YES");
            assert_eq!(report["witness_verified"], true);
            assert_eq!(code(&fairsched(&["verify", "i.json", "s.json"], p)), 0);
            fs::remove_file(p.join("s.json")).unwrap();
        } else {
            assert_eq!(stdout(&auto).trim(), "NO");
            assert_eq!(code(&auto), 1);
        }
    }
}

#[test]
fn verify_rejects_conflicting_schedule() {
    let dir = TempDir::new().unwrap();
    let p = dir.path();
    fs::write(p.join("i.json"), r#"{"n":2,"m":1,"k":1,"jobs":[[{"p":2,"d":3},{"p":2,"d":4}]]}"#).unwrap();
    fs::write(p.join("s.json"), r#"{"days":[[1,2]]}"#).unwrap();
    let out = fairsched(&["verify", "i.json", "s.json"], p);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("\"feasible\": false"));
}

#[test]
fn matching_on_non_unit_is_a_precondition_error() {
    let dir = TempDir::new().unwrap();
    let p = dir.path();
    fs::write(p.join("i.json"), r#"{"n":1,"m":2,"k":1,"jobs":[[{"p":2,"d":3}],[{"p":1,"d":3}]]}"#).unwrap();
    let out = fairsched(&["solve", "i.json", "--algorithm", "matching"], p);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("p_{i,j}=1"));
}

#[test]
fn tiny_budget_is_undecided() {
    let dir = TempDir::new().unwrap();
    let p = dir.path();
    let gen = ["generate", "random", "--n", "8", "--m", "5", "--k", "2", "--seed", "4", "-o", "i.json"];
    assert_eq!(code(&fairsched(&gen, p)), 0);
    let out = fairsched(&["solve", "i.json", "--algorithm", "oracle", "--budget-nodes", "0"], p);
    assert_eq!(code(&out), 2);
}

#[test]
fn malformed_input_exits_four() {
    let dir = TempDir::new().unwrap();
    let p = dir.path();
    fs::write(p.join("bad.json"), "{").unwrap();
    assert_eq!(code(&fairsched(&["solve", "bad.json", "--report", "r.json"], p)), 4);
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(p.join("r.json")).unwrap()).unwrap();
    assert!(report["error"].as_str().unwrap().contains("parsing bad.json"));
    assert_eq!(code(&fairsched(&["solve", "missing.json"], p)), 4);
}

#[test]
fn three_sat_gadget_has_three_days_of_length_two() {
    let dir = TempDir::new().unwrap();
    let p = dir.path();
    fs::write(p.join("f.cnf"), "c xor\np cnf 2 2\n1 2 0\n-1 -2 0\n").unwrap();
    let out = fairsched(&["generate", "from-3sat", "f.cnf", "-o", "g.json", "--roles", "roles.json"], p);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let inst = parse_instance(&fs::read(p.join("g.json")).unwrap()).unwrap();
    assert_eq!(inst.m(), 3);
    assert_eq!(inst.uniform_k(), Some(1));
    for day in 0..3 {
        for c in 0..inst.n() {
            assert_eq!(inst.job(day, c).unwrap().processing_time, 2);
        }
    }
    let roles: serde_json::Value = serde_json::from_str(&fs::read_to_string(p.join("roles.json")).unwrap()).unwrap();
    assert_eq!(roles.as_array().unwrap().len(), inst.n());
    assert_eq!(code(&fairsched(&["solve", "g.json"], p)), 0);

    fs::write(p.join("u.cnf"), "p cnf 4 5\n1 2 0\n1 -2 0\n-1 3 0\n-3 4 0\n-3 -4 0\n").unwrap();
    assert_eq!(code(&fairsched(&["generate", "from-3sat", "u.cnf", "-o", "u.json"], p)), 0);
    assert_eq!(code(&fairsched(&["solve", "u.json"], p)), 2);
    assert_eq!(code(&fairsched(&["solve", "u.json", "--oracle-bits", "40"], p)), 1);

    fs::write(p.join("x.cnf"), "p cnf 2 4\n1 2 0\n1 -2 0\n-1 2 0\n-1 -2 0\n").unwrap();
    let out = fairsched(&["generate", "from-3sat", "x.cnf"], p);
    assert_eq!(code(&out), 4);
    assert!(String::from_utf8_lossy(&out.stderr).contains("occurs 4 times"));
}

#[test]
fn mis_gadget_with_its_decomposition() {
    let dir = TempDir::new().unwrap();
    let p = dir.path();
    fs::write(p.join("g.txt"), "v 1 1\nv 2 1\nv 3 2\nv 4 2\ne 1 3\ne 2 4\n").unwrap();
    let gen = ["generate", "from-mis", "g.txt", "-o", "i.json", "--td", "g.td", "--roles", "r.json"];
    assert_eq!(code(&fairsched(&gen, p)), 0);
    let td = fs::read_to_string(p.join("g.td")).unwrap();
    assert!(td.starts_with("s td "));
    assert_eq!(td.split_whitespace().nth(3), Some("5"), "width 4 means bags of 5");
    assert_eq!(code(&fairsched(&["solve", "i.json", "--td", "g.td", "--out", "s.json"], p)), 0);
    assert_eq!(code(&fairsched(&["verify", "i.json", "s.json"], p)), 0);
}

#[test]
fn transform_and_pull_back() {
    let dir = TempDir::new().unwrap();
    let p = dir.path();
    fs::write(
        p.join("i.json"),
        r#"{"n":2,"m":2,"k_per_client":[2,1],"jobs":[[{"p":2,"d":2},{"p":2,"d":3}],[{"p":1,"d":1},{"p":1,"d":5}]]}"#,
    )
    .unwrap();
    let out = fairsched(&["transform", "per-client-to-uniform", "i.json", "-o", "t.json"], p);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("per-client-to-uniform:"));
    let target = parse_instance(&fs::read(p.join("t.json")).unwrap()).unwrap();
    assert_eq!((target.n(), target.m(), target.uniform_k()), (4, 4, Some(2)));
    assert_eq!(code(&fairsched(&["solve", "t.json", "--out", "ts.json"], p)), 0);
    let back = fairsched(&["transform", "per-client-to-uniform", "i.json", "--pull-back", "ts.json", "-o", "s.json"], p);
    assert_eq!(code(&back), 0);
    assert_eq!(code(&fairsched(&["verify", "i.json", "s.json"], p)), 0);
}

#[test]
fn machines_transform_rejects_large_k() {
    let dir = TempDir::new().unwrap();
    let p = dir.path();
    fs::write(p.join("i.json"), r#"{"n":1,"m":1,"k":2,"machines":2,"jobs":[[{"p":1,"d":1}]]}"#).unwrap();
    assert_eq!(code(&fairsched(&["transform", "machines-to-days", "i.json"], p)), 3);
}

#[test]
fn exports() {
    let dir = TempDir::new().unwrap();
    let p = dir.path();
    fs::write(p.join("i.json"), r#"{"n":2,"m":2,"k":1,"jobs":[[{"p":2,"d":2},{"p":2,"d":3}],[{"p":2,"d":2},{"p":2,"d":3}]]}"#)
        .unwrap();
    let lp = fairsched(&["export-ilp", "i.json"], p);
    assert_eq!(code(&lp), 0);
    assert!(stdout(&lp).contains("Subject To"));
    let json = fairsched(&["export-ilp", "i.json", "--format", "json", "--per-day"], p);
    let v: serde_json::Value = serde_json::from_slice(&json.stdout).unwrap();
    assert!(v.is_object());
    let dot = fairsched(&["export-dot", "i.json", "--day", "1"], p);
    assert!(stdout(&dot).contains("1 -- 2"));
    assert_eq!(code(&fairsched(&["export-dot", "i.json", "--day", "3"], p)), 4);
    let td = fairsched(&["export-td", "i.json"], p);
    assert!(stdout(&td).starts_with("s td"));
}

#[test]
fn bench_family_csv() {
    let dir = TempDir::new().unwrap();
    let p = dir.path();
    let out = fairsched(
        &["bench", "--family", "matching", "--sizes", "20,40", "--m", "4", "--repeat", "2", "-o", "b.csv"],
        p,
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(p.join("b.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "label,algorithm,n,m,answer,median_ms,repeats");
    assert_eq!(lines.len(), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("matching: log-log slope"));
}

#[test]
fn bench_suite_file() {
    let dir = TempDir::new().unwrap();
    let p = dir.path();
    fs::write(p.join("i.json"), r#"{"n":2,"m":2,"k":1,"jobs":[[{"p":1,"d":1},{"p":1,"d":2}],[{"p":1,"d":1},{"p":1,"d":2}]]}"#)
        .unwrap();
    fs::write(p.join("suite.txt"), "# comment\ni.json matching\nmissing.json auto\ni.json auto\n").unwrap();
    let out = fairsched(&["bench", "--suite", "suite.txt", "--repeat", "1", "--jobs", "2"], p);
    assert_eq!(code(&out), 0);
    let lines: Vec<String> = stdout(&out).lines().map(String::from).collect();
    assert_eq!(lines.len(), 4);
    assert!(lines[2].starts_with("missing.json,auto,0,0,error: reading"));
    assert!(lines[3].starts_with("i.json,"));
}
