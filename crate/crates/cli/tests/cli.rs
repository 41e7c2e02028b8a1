use std::path::Path;
use std::process::{Command, Output};

fn codim2(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_codim2")).args(args).arg("-q").output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn data_rows(csv: &str) -> Vec<&str> {
    csv.lines().filter(|l| !l.starts_with('#')).collect()
}

fn json(o: &Output) -> serde_json::Value {
    assert!(o.status.success(), "{}", stderr(o));
    serde_json::from_str(&stdout(o)).unwrap()
}

#[test]
fn reduce_reports_signs_for_case_i() {
    let v = json(&codim2(&["reduce", "--alpha", "1.25", "--gamma", "-1.2", "--format", "json"]));
    assert_eq!(v["data"]["normal_form"]["s1"], 1);
    assert_eq!(v["data"]["normal_form"]["s2"], 1);
    assert_eq!(v["metadata"]["alpha"], "1.25");
}

#[test]
fn reduce_on_the_double_zero_point_is_a_domain_error() {
    let o = codim2(&["reduce", "--alpha", "1", "--gamma", "-1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("pitchfork line"), "{}", stderr(&o));
}

#[test]
fn reduce_output_reproduces_one_shot_curves() {
    let pend = ["--alpha", "1.1", "--gamma", "-1.05", "--pendulum-omega-hat", "0.8", "--pendulum-delta", "1"];
    let mut args = vec!["reduce", "--format", "json"];
    args.extend_from_slice(&pend);
    let r = json(&codim2(&args));
    let d = &r["data"];
    let fmt = |v: &serde_json::Value| format!("{:e}", v.as_f64().unwrap());
    let (s1, s2) = (d["normal_form"]["s1"].to_string(), d["normal_form"]["s2"].to_string());
    let (w, delta, h) = (fmt(&d["scaled"]["omega_hat"]), fmt(&d["scaled"]["delta_big"]), fmt(&d["h_amplitude"]));
    let two_step = codim2(&[
        "curves", "--s1", &s1, "--s2", &s2, "--omega-hat", &w, "--delta", &delta, "--h-amplitude", &h,
    ]);
    let mut one_shot = vec!["curves", "--from-pendulum"];
    one_shot.extend_from_slice(&pend);
    let one_shot = codim2(&one_shot);
    assert!(two_step.status.success() && one_shot.status.success(), "{}", stderr(&two_step));
    let (a, b) = (stdout(&two_step), stdout(&one_shot));
    assert!(data_rows(&a).len() > 5);
    assert_eq!(data_rows(&a), data_rows(&b));
}

#[test]
fn proposition_curves_pass_through_double_zero_point() {
    let o = codim2(&["curves", "--prop", "P62", "--m", "1", "--omega-hat", "0.8"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let rows = data_rows(&text);
    assert_eq!(rows[0], "alpha,gamma,kind,m,n,extremum,proposition");
    let starts: Vec<&str> = rows[1..].iter().filter(|r| r.starts_with("9.99999999999999") || r.starts_with("1.0000000000000000e0,")).copied().collect();
    assert_eq!(starts.len(), 2, "{text}");
    for r in starts {
        let gamma: f64 = r.split(',').nth(1).unwrap().parse().unwrap();
        assert!((gamma + 1.0).abs() < 1e-12);
    }
}

#[test]
fn unperturbed_skeleton_has_five_curves() {
    let o = codim2(&["curves", "--unperturbed", "--s1", "-1", "--s2", "1"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(data_rows(&stdout(&o)).len(), 6);
}

#[test]
fn empty_grid_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("curves.csv");
    let o = codim2(&["curves", "--prop", "P61", "--nu1-grid", "", "-o", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!path.exists());
}

#[test]
fn identical_config_gives_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# pendulum curves\nprop = P62\nomega-hat = 0.8\nnu1_grid = 0, 0.01, 0.02\n").unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        let o = codim2(&["curves", "--config", cfg.to_str().unwrap(), "-o", out.to_str().unwrap()]);
        assert!(o.status.success(), "{}", stderr(&o));
        std::fs::read(out).unwrap()
    };
    let (a, b) = (run("a.csv"), run("b.csv"));
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    assert!(!text.contains('\r'));
    assert!(text.contains("# prop = P62\n") && text.contains("# nu1_grid = 0, 0.01, 0.02\n"));
}

#[test]
fn flags_override_config_and_bad_fields_are_located() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "alpha = 1.25\ngamma = -1.2\n").unwrap();
    let v = json(&codim2(&["reduce", "--config", cfg.to_str().unwrap(), "--alpha", "1.3", "--format", "json"]));
    assert_eq!(v["metadata"]["alpha"], "1.3");
    assert_eq!(v["metadata"]["gamma"], "-1.2");

    std::fs::write(&cfg, "alpha = 1.25\nomega_hatt = 3\n").unwrap();
    let o = codim2(&["reduce", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 2") && stderr(&o).contains("omega_hatt"), "{}", stderr(&o));

    std::fs::write(&cfg, "delta0 = -0.2\n").unwrap();
    let o = codim2(&["reduce", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("delta0"), "{}", stderr(&o));
}

#[test]
fn blow_up_is_a_numerical_failure() {
    let o = codim2(&["simulate", "--x0", "5,0", "--t-end", "50"]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

#[test]
fn simulate_outputs() {
    let o = codim2(&["simulate", "--x0", "0.3,0", "--t-end", "5", "--samples", "10"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let rows = data_rows(&text);
    assert_eq!(rows[0], "t,z1,z2");
    assert_eq!(rows.len(), 12);

    let o = codim2(&["simulate", "--mode", "orbit", "--nu-hat", "-1", "--format", "json"]);
    let v = json(&o);
    assert_eq!(v["data"][0]["stability"], "sink");
}

#[test]
fn manifolds_are_traced_from_the_saddle() {
    let o = codim2(&["manifolds", "--seeds", "20", "--iterates", "4", "--branches", "unstable+,stable-"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let rows = data_rows(&text);
    assert_eq!(rows[0], "branch,index,z1,z2");
    assert!(rows.iter().any(|r| r.starts_with("unstable+,")) && rows.iter().any(|r| r.starts_with("stable-,")));
    assert!(text.contains("# saddle = "));
}

#[test]
fn verify_experiments_pass_and_fail_with_codes() {
    let o = codim2(&["verify", "hhat"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(data_rows(&stdout(&o)).iter().skip(1).all(|r| r.ends_with(",true")));

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let o = codim2(&["verify", "jintegrals", "--points", "4", "--tol", "1e-30", "--format", "json", "-o", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["data"]["passed"], false);
    assert!(Path::new(&path).exists());
}

#[test]
fn verify_fold_convergence() {
    let o = codim2(&["verify", "fold-convergence", "--case", "i", "--m", "1"]);
    assert!(o.status.success(), "{}", stderr(&o));
}

#[test]
fn unknown_subcommand_is_a_usage_error() {
    assert_eq!(codim2(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(codim2(&["verify", "nothing"]).status.code(), Some(2));
}
