use std::collections::BTreeMap;
use std::path::Path;
use std::process::{Command, Output};

use qwalk_core::coin::{dft_coin, equal_up_to_global_phase, grover_coin, synthesize_coin};
use qwalk_core::io::{coin_to_json, params_to_string, parse_coin_json, parse_params, parse_probability_csv, parse_state};
use qwalk_core::walk::{probability, LatticeState};
use qwalk_core::{Coin, Params};
use tempfile::TempDir;

fn qwalk(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qwalk")).current_dir(dir).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn read_dir_bytes(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
        })
        .collect()
}

#[test]
fn zero_steps_writes_initial_distribution() {
    let tmp = TempDir::new().unwrap();
    let o = qwalk(tmp.path(), &["run", "--coin", "grover", "--steps", "0", "--emit", "probability", "--out-dir", "out"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(tmp.path().join("out/probability.csv")).unwrap();
    let field = parse_probability_csv::<f64>(&text).unwrap();
    assert_eq!(field, probability(&LatticeState::symmetric_origin()));
    assert!(stdout(&o).contains("support size: 1"));
}

#[test]
fn verify_reports_grover_deviation_for_parameter_file() {
    let tmp = TempDir::new().unwrap();
    std::fs::write(tmp.path().join("grover.params"), params_to_string(&Params::grover())).unwrap();
    let o = qwalk(tmp.path(), &["run", "--coin-params", "grover.params", "--verify", "--steps", "2"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    let line = out.lines().find(|l| l.starts_with("verify: max deviation from grover ")).expect(&out);
    let value: f64 = line.rsplit(' ').next().unwrap().parse().unwrap();
    assert!(value <= 1e-12, "{line}");
}

#[test]
fn permuted_dft_prime_dumps_dft_coin() {
    let tmp = TempDir::new().unwrap();
    let o = qwalk(tmp.path(), &["run", "--coin", "dft-prime", "--permute-lu", "--emit", "coin", "--out-dir", "o"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let coin: Coin = parse_coin_json(&std::fs::read_to_string(tmp.path().join("o/coin.json")).unwrap()).unwrap();
    assert_eq!(coin, dft_coin());
}

#[test]
fn identical_configs_give_identical_bytes() {
    let tmp = TempDir::new().unwrap();
    let args = [
        "run", "--coin", "dft", "--steps", "12", "--emit", "state,probability,marginals,slices,spectrum,moments,coin",
        "--out-dir", "out",
    ];
    assert!(qwalk(tmp.path(), &args).status.success());
    let first = read_dir_bytes(&tmp.path().join("out"));
    assert!(qwalk(tmp.path(), &args).status.success());
    assert_eq!(first, read_dir_bytes(&tmp.path().join("out")));
    assert_eq!(first.len(), 8);
}

#[test]
fn emitted_files_reingest_normalized() {
    let tmp = TempDir::new().unwrap();
    let o = qwalk(tmp.path(), &["run", "--steps", "7", "--emit", "state,probability", "--out-dir", "o"]);
    assert!(o.status.success());
    let state_text = std::fs::read_to_string(tmp.path().join("o/state.csv")).unwrap();
    let (state, _) = parse_state::<f64>(&state_text).unwrap();
    assert_eq!(state.step_count(), 7);
    let field = parse_probability_csv::<f64>(&std::fs::read_to_string(tmp.path().join("o/probability.csv")).unwrap())
        .unwrap();
    assert!((field.total() - 1.0).abs() <= 1e-10);

    // A saved state is a valid starting point.
    let o = qwalk(tmp.path(), &["run", "--initial", "o/state.csv", "--steps", "3", "--emit", "state", "--out-dir", "o2"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let direct = qwalk(tmp.path(), &["run", "--steps", "10", "--emit", "state", "--out-dir", "o3"]);
    assert!(direct.status.success());
    let (a, _) = parse_state::<f64>(&std::fs::read_to_string(tmp.path().join("o2/state.csv")).unwrap()).unwrap();
    let (b, _) = parse_state::<f64>(&std::fs::read_to_string(tmp.path().join("o3/state.csv")).unwrap()).unwrap();
    assert_eq!(a.step_count(), 10);
    assert!(a.max_abs_diff(&b) <= 1e-12);
}

#[test]
fn flags_override_config_file() {
    let tmp = TempDir::new().unwrap();
    std::fs::write(tmp.path().join("c.toml"), "coin = \"dft\"\nsteps = 2\nout_dir = \"fromfile\"\n").unwrap();
    let o = qwalk(tmp.path(), &["run", "--config", "c.toml", "--steps", "5"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(tmp.path().join("fromfile/run_manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["config"]["steps"], 5);
    assert_eq!(manifest["config"]["coin"]["name"], "dft");
    assert_eq!(manifest["config_sha256"].as_str().unwrap().len(), 64);
    assert_eq!(manifest["tolerances"]["norm"], 1e-10);
}

#[test]
fn defaults_document_is_a_valid_config() {
    let tmp = TempDir::new().unwrap();
    let o = qwalk(tmp.path(), &["defaults"]);
    assert!(o.status.success());
    std::fs::write(tmp.path().join("d.toml"), stdout(&o)).unwrap();
    let o = qwalk(tmp.path(), &["run", "--config", "d.toml"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(tmp.path().join("qwalk-out/probability.csv").exists());
}

#[test]
fn invalid_config_names_the_key() {
    let tmp = TempDir::new().unwrap();
    std::fs::write(tmp.path().join("bad.toml"), "stepz = 3\n").unwrap();
    let o = qwalk(tmp.path(), &["run", "--config", "bad.toml"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("stepz"));

    std::fs::write(tmp.path().join("two.toml"), "coin = \"dft\"\ncoin_params = \"grover\"\n").unwrap();
    let o = qwalk(tmp.path(), &["run", "--config", "two.toml"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("coin_params"));

    for (flag, value) in [("--omega-y", "-3"), ("--mode", "diagonal"), ("--emit", "plot"), ("--periodic", "2")] {
        let o = qwalk(tmp.path(), &["run", flag, value]);
        assert_eq!(o.status.code(), Some(2), "{flag}");
        assert!(stderr(&o).contains(flag), "{flag}: {}", stderr(&o));
    }
}

#[test]
fn collision_exits_nonzero_listing_sites() {
    let tmp = TempDir::new().unwrap();
    let o = qwalk(tmp.path(), &["run", "--omega-y", "1", "--steps", "2", "--emit", "spectrum", "--out-dir", "o"]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stderr(&o).contains("collision: (-1, 1) <-> (1, -1)"), "{}", stderr(&o));
    assert!(!tmp.path().join("o").exists());

    let o = qwalk(tmp.path(), &["detect-collisions", "--omega-y", "1000", "--extent", "400"]);
    assert!(o.status.success());
    let o = qwalk(tmp.path(), &["detect-collisions", "--omega-y", "3/2", "--extent", "2"]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stdout(&o).contains("(-2, 0) <-> (1, -2)"));
}

#[test]
fn periodic_line_and_decimal_runs() {
    let tmp = TempDir::new().unwrap();
    let o = qwalk(tmp.path(), &["run", "--periodic", "5", "--steps", "20", "--out-dir", "p"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("periodic 5x5"));
    let o = qwalk(tmp.path(), &["run", "--mode", "line-two-coins", "--steps", "6", "--out-dir", "l"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let o = qwalk(
        tmp.path(),
        &["run", "--omega-y", "1.4142135623730951", "--emit", "spectrum", "--out-dir", "s", "--steps", "4"],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let manifest = std::fs::read_to_string(tmp.path().join("s/run_manifest.json")).unwrap();
    assert!(manifest.contains("\"frequencies\": \"f64\""));
}

fn fit_file(dir: &Path, target: &Coin) -> (Output, Option<Params>) {
    std::fs::write(dir.join("target.json"), coin_to_json(target)).unwrap();
    let o = qwalk(dir, &["fit", "target.json", "--out", "fit.params"]);
    let params = std::fs::read_to_string(dir.join("fit.params")).ok().map(|t| parse_params(&t).unwrap());
    (o, params)
}

#[test]
fn fit_round_trips_random_coin() {
    let tmp = TempDir::new().unwrap();
    let v: [f64; 16] = std::array::from_fn(|i| if i < 4 { 0.1 + 0.3 * i as f64 } else { (i as f64 * 1.7).sin() * 3.0 });
    let target = synthesize_coin(&Params::from_array(&v));
    let (o, params) = fit_file(tmp.path(), &target);
    assert!(o.status.success(), "{}", stderr(&o));
    let residual: f64 = stdout(&o).lines().find_map(|l| l.strip_prefix("residual: ")).unwrap().parse().unwrap();
    assert!(residual <= 1e-8);
    assert!(equal_up_to_global_phase(&synthesize_coin(&params.unwrap()), &target, 1e-8));
}

#[test]
fn fit_grover_succeeds_and_rejects_non_unitary() {
    let tmp = TempDir::new().unwrap();
    let (o, params) = fit_file(tmp.path(), &grover_coin());
    assert!(o.status.success());
    assert!(equal_up_to_global_phase(&synthesize_coin(&params.unwrap()), &grover_coin(), 1e-8));

    let bad = grover_coin::<f64>().scale(&num_complex::Complex::new(2.0, 0.0));
    std::fs::remove_file(tmp.path().join("fit.params")).unwrap();
    let (o, params) = fit_file(tmp.path(), &bad);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("unitary"), "{}", stderr(&o));
    assert!(params.is_none());
}

#[test]
fn fit_reports_unreachable_dft() {
    let tmp = TempDir::new().unwrap();
    std::fs::write(tmp.path().join("t.json"), coin_to_json(&dft_coin::<f64>())).unwrap();
    let o = qwalk(tmp.path(), &["fit", "t.json", "--starts", "4", "--max-iterations", "200"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("status: not-reachable"));
}

#[test]
fn verify_presets_passes() {
    let tmp = TempDir::new().unwrap();
    let o = qwalk(tmp.path(), &["verify-presets"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().filter(|l| l.starts_with("PASS")).count(), 5);
}
