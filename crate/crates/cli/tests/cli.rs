use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_riffshuffle"))
        .args(args)
        .env_remove("RIFFSHUFFLE_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("valid json")
}

#[test]
fn exact_pmf_csv() {
    let out = run(&["pmf", "--p", "1/2", "--m", "3", "--exact", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "k,pmf,cdf\n0,1/4,1/4\n1,3/8,5/8\n2,3/8,1/1\n");
}

#[test]
fn fraction_implies_exact() {
    let a = run(&["pmf", "--p", "1/2", "--m", "3"]);
    let b = run(&["pmf", "--p", "0.5", "--m", "3", "--exact"]);
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn float_pmf_round_trips() {
    let out = run(&["pmf", "--p", "0.3", "--m", "7"]);
    let body = stdout(&out);
    let mut lines = body.lines();
    assert_eq!(lines.next(), Some("k,pmf,cdf"));
    let params = riffshuffle::Params::new(0.3, 7).unwrap();
    for (k, line) in lines.enumerate() {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols[0], k.to_string());
        assert_eq!(cols[1].parse::<f64>().unwrap(), params.pmf(k).unwrap());
    }
}

#[test]
fn exact_json_uses_strings() {
    let v = json(&run(&["pmf", "--p", "1/2", "--m", "3", "--format", "json"]));
    assert_eq!(v["pmf"][0], "1/4");
    assert_eq!(v["cdf"][2], "1/1");
    assert_eq!(v["p"], "1/2");
    assert_eq!(v["exact"], true);
}

#[test]
fn mode_json() {
    let out = run(&["mode", "--p", "0.5", "--m", "5", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("\"modes\":[3,4]"));
    assert_eq!(json(&run(&["mode", "--p", "1/10", "--m", "4", "--format", "json"]))["modes"], serde_json::json!([0]));
}

#[test]
fn check_reports_violation() {
    let out = run(&["check", "--p", "1/10", "--m", "2", "--extended"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stdout(&out).contains("violation at k=1"));
    let v = json(&run(&["check", "--p", "1/10", "--m", "2", "--extended", "--format", "json"]));
    assert_eq!(v["first_violation"], 1);
    assert_eq!(v["log_concave"], false);
}

#[test]
fn check_passes_at_half() {
    let out = run(&["check", "--p", "1/2", "--m", "12", "--extended"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let out = run(&["check", "--p", "0.5", "--m", "12"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn scan_first_failing_m() {
    let out = run(&["scan", "--p", "3/10", "--m-max", "50", "--extended"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "p,m_max,extended,first_failing_m\n3/10,50,true,4\n");
    let v = json(&run(&["scan", "--p", "1/2", "--m-max", "30", "--extended", "--format", "json"]));
    assert!(v["first_failing_m"].is_null());
}

#[test]
fn sample_is_deterministic() {
    let args = ["sample", "--p", "0.3", "--m", "5", "--n", "5000", "--seed", "3"];
    let (a, b) = (run(&args), run(&args));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v = json(&run(&["sample", "--p", "0.3", "--m", "5", "--n", "5000", "--seed", "3", "--format", "json"]));
    let total: u64 = v["counts"].as_array().unwrap().iter().map(|c| c.as_u64().unwrap()).sum();
    assert_eq!(total, 5000);
}

#[test]
fn seed_from_environment() {
    let base = ["sample", "--p", "0.4", "--m", "6", "--n", "2000", "--format", "json"];
    let with_env = |seed: &str| {
        Command::new(env!("CARGO_BIN_EXE_riffshuffle"))
            .args(base)
            .env("RIFFSHUFFLE_SEED", seed)
            .output()
            .unwrap()
    };
    assert_eq!(json(&with_env("99"))["seed"], 99);
    let explicit = run(&["sample", "--p", "0.4", "--m", "6", "--n", "2000", "--format", "json", "--seed", "99"]);
    assert_eq!(with_env("99").stdout, explicit.stdout);
    assert_eq!(json(&run(&base))["seed"], 1);
}

#[test]
fn domain_and_usage_errors_exit_one() {
    for args in [
        &["pmf", "--p", "1.5", "--m", "3"][..],
        &["pmf", "--p", "0", "--m", "3"],
        &["pmf", "--p", "1/2", "--m", "0"],
        &["pmf", "--p", "abc", "--m", "3"],
        &["pmf", "--p", "0.3"],
        &["pmf", "--p", "0.3", "--m", "3", "--format", "xml"],
        &["sample", "--p", "0.3", "--m", "3", "--mechanism", "cards"],
        &["scan", "--p", "1/3", "--m-max", "1"],
        &["frobnicate"],
    ] {
        let out = run(args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(!out.stderr.is_empty());
        assert!(out.stdout.is_empty());
    }
}

#[test]
fn help_exits_zero() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["pmf", "--help"]).status.code(), Some(0));
}

#[test]
fn quick_verify_reports_every_criterion() {
    let out = run(&["verify", "--quick", "--format", "json"]);
    let v = json(&out);
    let criteria = v["criteria"].as_array().unwrap();
    assert_eq!(criteria.len(), 11);
    let all_passed = criteria.iter().all(|c| c["passed"] == true);
    assert_eq!(v["passed"], all_passed);
    assert_eq!(out.status.code(), Some(if all_passed { 0 } else { 2 }));
    for c in criteria.iter().filter(|c| c["id"] != 11) {
        assert_eq!(c["passed"], true, "{c}");
    }
}
