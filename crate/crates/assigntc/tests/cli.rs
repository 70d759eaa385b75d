// Copyright 2026 the assigntc authors
// SPDX-License-Identifier: Apache-2.0

use std::path::Path;
use std::process::{Command, Output};

use assigntc::io::{read_assignment, read_instance, write_assignment, write_instance};
use assigntc_core::{Assignment, Instance};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_assigntc")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

fn write(dir: &Path, name: &str, inst: &Instance) -> String {
    let p = dir.join(name);
    write_instance(&p, inst).unwrap();
    p.to_str().unwrap().to_owned()
}

fn tiny() -> Instance {
    Instance::new(vec![2, 1], vec![2, 1], vec![3.0, 1.0, 0.0, 2.0, 5.0, 1.0, 4.0, 4.0, 4.0], vec![1, 1, 1, 1]).unwrap()
}

#[test]
fn instance_and_assignment_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let inst = tiny().with_metadata("note", vec![1.5]);
    let p = dir.path().join("i.json");
    write_instance(&p, &inst).unwrap();
    assert_eq!(read_instance(&p).unwrap(), inst);
    let asg = Assignment::from_pairs(vec![(0, 1), (2, 0)]);
    let q = dir.path().join("a.json");
    write_assignment(&q, &asg).unwrap();
    assert_eq!(read_assignment(&q).unwrap(), asg);
}

#[test]
fn gen_reports_sizes_and_rejects_missing_data() {
    let dir = tempfile::tempdir().unwrap();
    let fixtures = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/sg");
    let out = dir.path().join("g.json");
    let o = bin(&[
        "gen", "--model", "dist", "--sigma2", "1", "--n", "1350", "--seed", "7", "--data", fixtures, "-o",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let inst = read_instance(&out).unwrap();
    assert_eq!((inst.n(), inst.m()), (1350, 1350));
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("n=1350 m=1350 k=3 l=9"));

    let o = bin(&["gen", "--model", "chicago", "--sigma2", "0", "--n", "2261"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["blocks"].as_array().unwrap().len(), 37);
    assert_eq!(v["utilities"].as_array().unwrap().len(), 2261 * 2261);

    let o = bin(&["gen", "--model", "dist", "--data", dir.path().join("absent").to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    let o = bin(&["gen", "--model", "proj", "--data", "sg-desk"]);
    assert_eq!(code(&o), 2, "proj without --rho-km");
}

#[test]
fn solve_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "t.json", &tiny());
    let o = bin(&["solve", "--method", "exact", "--oracle-check", &p]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    assert_eq!(v["optimal"], true);
    assert_eq!(v["objective"], 9.0);
    assert!(String::from_utf8_lossy(&o.stderr).contains("oracle check passed"));

    let o = bin(&["solve", "--method", "mcf-type", &p]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("type-uniform"));

    let o = bin(&["solve", "--method", "greedy", "--oracle-check", &p]);
    assert_eq!(code(&o), 0);
    assert!((json(&o)["ratio"].as_f64().unwrap() - 1.0 / 3.0).abs() < 1e-15);

    let o = bin(&["solve", "--gap", "0.5", &p]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["optimal"], false);
    let o = bin(&["solve", "--gap=-1", &p]);
    assert_eq!(code(&o), 2);

    let o = bin(&["solve", "--method", "nope", &p]);
    assert_eq!(code(&o), 2);
    let o = bin(&["solve", dir.path().join("missing.json").to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    std::fs::write(dir.path().join("bad.json"), "{").unwrap();
    let o = bin(&["solve", dir.path().join("bad.json").to_str().unwrap()]);
    assert_eq!(code(&o), 2);
}

#[test]
fn budget_exhaustion_exits_with_four() {
    let dir = tempfile::tempdir().unwrap();
    let desk = dir.path().join("desk.json");
    let o = bin(&["gen", "--model", "dist", "--sigma2", "1", "--data", "sg-desk", "--seed", "2", "-o", desk.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let o = bin(&["solve", "--method", "exact", "--node-limit", "1", desk.to_str().unwrap()]);
    assert_eq!(code(&o), 4, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(json(&o)["optimal"], false);
}

#[test]
fn pod_reports_bounds() {
    let dir = tempfile::tempdir().unwrap();
    let e0 = dir.path().join("e0.json");
    let o = bin(&["gen", "--model", "ethn", "--sigma2", "0", "--data", "sg", "-o", e0.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let o = bin(&["pod", e0.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    assert_eq!(v["method"], "mcf-type");
    assert!((v["bound_thm4"].as_f64().unwrap() - 20.0 / 3.0).abs() < 1e-9);
    assert!((v["bound_thm4_effective"].as_f64().unwrap() - 6.933).abs() < 1e-3);
    assert!(v["pod"].as_f64().unwrap() >= 1.0);
    assert!(String::from_utf8_lossy(&o.stderr).contains("Chinese"));

    // slack capacities give PoD 1
    let slack = Instance::new(vec![2, 1], vec![2, 1], tiny().utilities().to_vec(), vec![2, 1, 1, 1]).unwrap();
    let p = write(dir.path(), "slack.json", &slack);
    let o = bin(&["pod", "--effective", "--method", "exact", &p]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["pod"], 1.0);
    let o = bin(&["pod", "--method", "greedy", &p]);
    assert_eq!(code(&o), 3);
}

#[test]
fn lottery_is_reproducible_across_processes() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "t.json", &tiny());
    let run = |name: &str| {
        let csv = dir.path().join(name);
        let o = bin(&["lottery", &p, "--trials", "100", "--seed", "1", "--csv", csv.to_str().unwrap()]);
        assert_eq!(code(&o), 0);
        (o.stdout, std::fs::read_to_string(csv).unwrap())
    };
    let (s1, c1) = run("a.csv");
    let (s2, c2) = run("b.csv");
    assert_eq!((s1.clone(), c1.clone()), (s2, c2));
    assert_eq!(c1.lines().count(), 101);
    assert_eq!(c1.lines().next().unwrap(), "trial,seed,welfare,ratio");
    for line in c1.lines().skip(1) {
        let ratio: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
        assert!(ratio >= 1.0);
    }

    let one = bin(&["lottery", &p, "--trials", "1", "--seed", "4"]);
    let v: serde_json::Value = serde_json::from_slice(&one.stdout).unwrap();
    assert_eq!(v["min_welfare"], v["max_welfare"]);
    assert_eq!(v["mean_welfare"], v["min_welfare"]);
}

#[test]
fn experiment_writes_rows_in_grid_order() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.toml");
    std::fs::write(
        &cfg,
        r#"
scenario = "smoke"
data = "sg-desk"
master_seed = 3
reps = 2
trials = 10

[[grid]]
model = "ethn"
params = [0.0]
n = [135]

[[grid]]
model = "price"
params = [0.0, 50.0]
n = [135]
"#,
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    let o = bin(&["experiment", cfg.to_str().unwrap(), "--threads", "2", "-o", out_dir.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let table = std::fs::read_to_string(out_dir.join("results.csv")).unwrap();
    let mut lines = table.lines();
    assert!(lines
        .next()
        .unwrap()
        .starts_with("scenario,model,param,n,m,rep_count,mean_pod,se_pod,mean_bound5,mean_lottery_ratio,se_lottery_ratio"));
    let models: Vec<&str> = lines.map(|l| l.split(',').nth(1).unwrap()).collect();
    assert_eq!(models, ["ethn", "price", "price"]);
    assert_eq!(std::fs::read_to_string(out_dir.join("replications.csv")).unwrap().lines().count(), 7);

    let stdout = bin(&["experiment", cfg.to_str().unwrap(), "--threads", "1"]);
    assert_eq!(String::from_utf8(stdout.stdout).unwrap(), table);

    std::fs::write(&cfg, "scenario = \"x\"\n").unwrap();
    assert_eq!(code(&bin(&["experiment", cfg.to_str().unwrap()])), 2);
}
