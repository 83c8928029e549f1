use std::f64::consts::FRAC_PI_2;
use std::process::{Command, Output};

use loscov::analytic::{
    additive_error_gamma, road_area_fraction, theorem1_area_fraction, theorem2_area_fraction, ErrorVariant,
    QuadratureSettings,
};
use loscov::sampling::ScenarioParams;
use serde_json::Value;

fn loscov(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_loscov"))
        .args(args)
        .env_remove("LOSCOV_THREADS")
        .output()
        .expect("run loscov")
}

fn ok_stdout(args: &[&str]) -> String {
    let out = loscov(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> Value {
    serde_json::from_str(&ok_stdout(args)).unwrap()
}

/// Header comments and the table of a CSV document.
fn csv_table(text: &str) -> (Vec<String>, Vec<String>, Vec<Vec<String>>) {
    let comments = text.lines().filter(|l| l.starts_with('#')).map(str::to_string).collect();
    let body: String = text.lines().filter(|l| !l.starts_with('#')).map(|l| format!("{l}\n")).collect();
    let mut r = csv::Reader::from_reader(body.as_bytes());
    let header = r.headers().unwrap().iter().map(str::to_string).collect();
    let rows = r.records().map(|rec| rec.unwrap().iter().map(str::to_string).collect()).collect();
    (comments, header, rows)
}

fn exit_code(args: &[&str]) -> i32 {
    loscov(args).status.code().unwrap()
}

#[test]
fn eval_matches_library() {
    let v = json(&["eval", "--preset", "3gpp-urban-a", "--gamma", "66", "--eta", "25"]);
    let p = ScenarioParams::from_per_km(5.0, 2.0, 25.0, 66.0, 25.0);
    let r = &v["result"];
    let f = |k: &str| r[k].as_f64().unwrap();
    assert_eq!(f("theorem1"), theorem1_area_fraction(&p).value);
    assert_eq!(f("theorem2"), theorem2_area_fraction(&p, &QuadratureSettings::default()).unwrap().value);
    assert_eq!(f("road_fraction"), road_area_fraction(p.lambda_l, p.eta).value);
    assert_eq!(f("gamma_err_as_printed"), additive_error_gamma(&p, ErrorVariant::AsPrinted));
    assert_eq!(f("gamma_err_theorem1_consistent"), additive_error_gamma(&p, ErrorVariant::Theorem1Consistent));
    assert_eq!(v["seed"], 1);
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(v["params"]["gamma"], 66.0);
}

#[test]
fn eval_road_fraction_of_preset() {
    let v = json(&["eval", "--preset", "3gpp-urban-a"]);
    assert!((v["result"]["road_fraction"].as_f64().unwrap() - 0.3935).abs() < 5e-5);
}

#[test]
fn eval_zero_gamma_is_zero() {
    let v = json(&["eval", "--gamma", "0"]);
    for k in ["theorem1", "theorem2", "additive", "gamma_err_theorem1_consistent"] {
        assert_eq!(v["result"][k].as_f64().unwrap(), 0.0, "{k}");
    }
}

#[test]
fn eval_csv_round_trips_json() {
    let args = ["eval", "--preset", "dense-urban", "--gamma", "150", "--printed-display"];
    let v = json(&args);
    let text = ok_stdout(&[&args[..], &["--format", "csv"]].concat());
    let (comments, header, rows) = csv_table(&text);
    assert!(comments.contains(&"# lambda_l=0.015".to_string()));
    assert!(comments.contains(&"# seed=1".to_string()));
    assert_eq!(rows.len(), 1);
    for (k, cell) in header.iter().zip(&rows[0]) {
        assert_eq!(cell.parse::<f64>().unwrap(), v["result"][k].as_f64().unwrap(), "{k}");
    }
}

#[test]
fn simulate_single_scene() {
    let v = json(&["simulate", "--n-scenes", "1", "--mode", "rsu"]);
    let m = v["result"]["rsu"]["mean"].as_f64().unwrap();
    assert!(m == 0.0 || m == 1.0);
    assert!(v["result"]["rsu_relay"].is_null());
}

#[test]
fn simulate_is_repeatable() {
    let args = ["simulate", "--n-scenes", "3000", "--seed", "5", "--relay-mode", "exact"];
    assert_eq!(ok_stdout(&args), ok_stdout(&args));
    let v = json(&args);
    assert_eq!(v["result"]["relay_mode"], "exact_vehicle");
    assert_eq!(v["result"]["n_scenes"], 3000);
}

#[test]
fn simulate_relay_gain_near_fourteen_tenths() {
    let v = json(&["simulate", "--preset", "3gpp-urban-a", "--gamma", "66", "--eta", "25"]);
    let r = v["result"]["ratio"].as_f64().unwrap();
    assert!((r - 1.42).abs() < 0.08, "{r}");
}

#[test]
fn sweep_schema_and_empty_axis() {
    assert_eq!(exit_code(&["sweep", "--axis", "gamma", "--values", ""]), 2);
    assert_eq!(exit_code(&["sweep", "--axis", "gamma"]), 2);
    assert_eq!(exit_code(&["sweep", "--axis", "theta", "--values", "1"]), 2);
    let text = ok_stdout(&["sweep", "--axis", "gamma", "--values", "50,100", "--n-scenes", "500"]);
    let (_, header, rows) = csv_table(&text);
    assert_eq!(
        header[..8],
        ["gamma", "mc_rsu", "mc_rsu_relay", "thm1", "thm2", "additive", "gamma_err", "ratio"]
    );
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[1][0], "100");
}

#[test]
fn sweep_per_km_axis() {
    let text = ok_stdout(&["sweep", "--axis", "lambda-l", "--values", "3,5", "--n-scenes", "200"]);
    let (comments, header, rows) = csv_table(&text);
    assert_eq!(header[0], "lambda_l");
    assert!(comments.contains(&"# axis_units=per_km".to_string()));
    let thm1: f64 = rows[0][3].parse().unwrap();
    let p = ScenarioParams::from_per_km(3.0, 2.0, 25.0, 100.0, 100.0);
    assert_eq!(thm1, theorem1_area_fraction(&p).value);
}

#[test]
fn sweep_reproduces_rsu_closed_form() {
    for lambda in ["3", "5"] {
        let text = ok_stdout(&[
            "sweep", "--axis", "gamma", "--from", "25", "--to", "300", "--step", "25", "--lambda-l", lambda, "--mu",
            "4", "--eta", "100", "--n-scenes", "20000",
        ]);
        let (_, header, rows) = csv_table(&text);
        let col = |name: &str| header.iter().position(|h| h == name).unwrap();
        assert_eq!(rows.len(), 12);
        for row in rows {
            let get = |name: &str| row[col(name)].parse::<f64>().unwrap();
            let (mc, se, thm1) = (get("mc_rsu"), get("mc_rsu_se"), get("thm1"));
            assert!((mc - thm1).abs() <= 4.0 * se, "{row:?}");
        }
    }
}

#[test]
fn scene_outputs() {
    let text = ok_stdout(&["scene", "--preset", "3gpp-urban-a", "--manhattan", "--seed", "3"]);
    let mut lines = 0;
    for l in text.lines() {
        let v: Value = serde_json::from_str(l).unwrap();
        if v["kind"] == "line" {
            let a = v["angle"].as_f64().unwrap();
            assert!(a == 0.0 || a == FRAC_PI_2);
            lines += 1;
        }
    }
    assert!(lines > 0);
    assert_eq!(text, ok_stdout(&["scene", "--preset", "3gpp-urban-a", "--manhattan", "--seed", "3"]));

    let tiny = ok_stdout(&["scene", "--radius", "0.001"]);
    let records: Vec<Value> = tiny.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(records[0]["kind"], "header");
    assert!(records.len() <= 2);

    let csv_text = ok_stdout(&["scene", "--format", "csv", "--radius", "500"]);
    assert!(csv_text.starts_with("# tool=loscov"));
}

#[test]
fn config_file_and_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "preset = \"3gpp-urban-b\"\ngamma = 40.0\nseed = 77\n").unwrap();
    let path = cfg.to_str().unwrap();
    let v = json(&["eval", "--config", path, "--eta", "50"]);
    assert_eq!(v["seed"], 77);
    assert_eq!(v["params"]["mu"], 0.004);
    assert_eq!(v["params"]["gamma"], 40.0);
    assert_eq!(v["params"]["eta"], 50.0);
    let v = json(&["eval", "--config", path, "--gamma", "10", "--preset", "dense-urban"]);
    assert_eq!(v["params"]["gamma"], 10.0);
    assert_eq!(v["params"]["lambda_l"], 0.015);

    std::fs::write(&cfg, "gama = 40.0\n").unwrap();
    assert_eq!(exit_code(&["eval", "--config", path]), 2);
}

#[test]
fn exit_codes() {
    assert_eq!(exit_code(&["eval", "--mu=-2"]), 2);
    assert_eq!(exit_code(&["frobnicate"]), 2);
    assert_eq!(exit_code(&["eval", "--config", "/nonexistent/run.toml"]), 1);
    assert_eq!(exit_code(&["eval", "--out", "/nonexistent/dir/out.json"]), 1);
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("q.toml");
    std::fs::write(&cfg, "rel_tol = 1e-15\nabs_tol = 1e-300\nmax_subdivisions = 2\n").unwrap();
    let out = loscov(&["eval", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(!out.stderr.is_empty());
}

#[test]
fn out_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("e.json");
    let stdout = ok_stdout(&["eval", "--preset", "3gpp-urban-b"]);
    ok_stdout(&["eval", "--preset", "3gpp-urban-b", "--out", path.to_str().unwrap()]);
    assert_eq!(std::fs::read_to_string(&path).unwrap(), stdout);
}

#[test]
fn thread_count_does_not_change_output() {
    let base = ["simulate", "--n-scenes", "20000", "--seed", "9", "--format", "csv"];
    let one = ok_stdout(&[&base[..], &["--threads", "1"]].concat());
    let four = ok_stdout(&[&base[..], &["--threads", "4"]].concat());
    let env = Command::new(env!("CARGO_BIN_EXE_loscov")).args(base).env("LOSCOV_THREADS", "3").output().unwrap();
    assert_eq!(one, four);
    assert_eq!(one.as_bytes(), &env.stdout[..]);
}
