use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use hbr_core::benchmarks::{expected_bitstring, Algorithm, BenchmarkSpec};
use hbr_core::circuit::{count_gates, parse_qasm, GateKind};
use serde_json::Value;

fn hbr(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hbr"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn ok(o: &Output) {
    assert!(
        o.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&o.stderr)
    );
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn generate_ghz_has_eight_gates() {
    let dir = tempfile::tempdir().unwrap();
    ok(&hbr(&["generate", "--alg", "ghz", "--n", "8"], dir.path()));
    let c =
        parse_qasm(&fs::read_to_string(dir.path().join("ghz_n8_seed42.qasm")).unwrap()).unwrap();
    let counts = count_gates(&c);
    assert_eq!(c.gates.len() - counts.n_measure, 8);
    assert!(dir.path().join("manifest.json").exists());
}

#[test]
fn generate_is_deterministic_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let read = |sub: &str, seed: &str| {
        let out = dir.path().join(sub);
        ok(&hbr(
            &["generate", "--alg", "qdrift", "--n", "10", "--seed", seed],
            &out,
        ));
        fs::read(out.join(format!("qdrift_n10_seed{seed}.qasm"))).unwrap()
    };
    assert_eq!(read("a", "43"), read("b", "43"));
    assert_ne!(read("c", "43"), read("d", "44"));
}

#[test]
fn generate_bv_oracle_has_six_cx() {
    let dir = tempfile::tempdir().unwrap();
    ok(&hbr(&["generate", "--alg", "bv", "--n", "12"], dir.path()));
    let c =
        parse_qasm(&fs::read_to_string(dir.path().join("bv_n12_seed42.qasm")).unwrap()).unwrap();
    assert_eq!(count_gates(&c).per_kind.get(&GateKind::Cx), Some(&6));
}

#[test]
fn qft_policies_share_synthesis() {
    let dir = tempfile::tempdir().unwrap();
    ok(&hbr(
        &[
            "attribute",
            "--alg",
            "qft",
            "--n",
            "10",
            "--policy",
            "compact",
            "--policy",
            "recursive",
            "--router",
            "deterministic",
        ],
        dir.path(),
    ));
    let report = json(&dir.path().join("attribution.json"));
    let rows = report["widths"][0]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0]["df_hb"], rows[1]["df_hb"]);
    let csv = fs::read_to_string(dir.path().join("attribution.csv")).unwrap();
    assert!(csv.starts_with("variant,n,seed,df_h,df_b,df_hb,df_r,pct_h,pct_b,pct_r"));
    let waterfall = fs::read_to_string(dir.path().join("waterfall.csv")).unwrap();
    assert_eq!(waterfall.lines().count(), 1 + 2 * 5);
}

#[test]
fn all_to_all_has_no_routing_loss() {
    let dir = tempfile::tempdir().unwrap();
    ok(&hbr(
        &[
            "attribute",
            "--alg",
            "grover",
            "--n",
            "6",
            "--basis",
            "ionq-forte",
            "--policy",
            "compact",
            "--policy",
            "recursive",
        ],
        dir.path(),
    ));
    let report = json(&dir.path().join("attribution.json"));
    for row in report["widths"][0]["rows"].as_array().unwrap() {
        assert_eq!(row["df_r"].as_f64(), Some(0.0));
        assert_eq!(row["pct_r"].as_f64(), Some(0.0));
    }
}

#[test]
fn qdrift_attribution_averages_channel_seeds() {
    let dir = tempfile::tempdir().unwrap();
    ok(&hbr(
        &[
            "attribute",
            "--alg",
            "qdrift",
            "--n",
            "6",
            "--qdrift-samples",
            "100",
        ],
        dir.path(),
    ));
    let csv = fs::read_to_string(dir.path().join("attribution.csv")).unwrap();
    let seeds: Vec<&str> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(2).unwrap())
        .collect();
    assert_eq!(seeds, ["42", "43", "44", "45", "46", "mean"]);
}

#[test]
fn manifest_replay_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    ok(&hbr(
        &[
            "attribute",
            "--alg",
            "qpe",
            "--n",
            "6",
            "--router",
            "stochastic",
            "--router",
            "deterministic",
        ],
        &out,
    ));
    let names = [
        "manifest.json",
        "runs.json",
        "attribution.csv",
        "attribution.json",
        "waterfall.csv",
    ];
    let first: Vec<Vec<u8>> = names
        .iter()
        .map(|f| fs::read(out.join(f)).unwrap())
        .collect();
    let replay = Command::new(env!("CARGO_BIN_EXE_hbr"))
        .arg("run")
        .arg(out.join("manifest.json"))
        .output()
        .unwrap();
    ok(&replay);
    for (name, bytes) in names.iter().zip(&first) {
        assert_eq!(
            &fs::read(out.join(name)).unwrap(),
            bytes,
            "{name} changed on replay"
        );
    }
}

#[test]
fn grover_cliff_crosses_at_five() {
    let dir = tempfile::tempdir().unwrap();
    ok(&hbr(
        &["cliff", "--alg", "grover", "--n", "3-7"],
        dir.path(),
    ));
    let report = json(&dir.path().join("cliff.json"));
    assert_eq!(report[0]["projection"]["first_crossing"], 5);
}

#[test]
fn invalid_widths_are_gaps_and_fail_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let o = hbr(&["cliff", "--alg", "qaoa", "--n", "4-5"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    let csv = fs::read_to_string(dir.path().join("cliff.csv")).unwrap();
    let odd = csv.lines().find(|l| l.contains(",5,")).unwrap();
    assert!(odd.contains("not defined"), "{odd}");
}

#[test]
fn budget_overruns_are_marked_but_not_failures() {
    let dir = tempfile::tempdir().unwrap();
    ok(&hbr(
        &["cliff", "--alg", "ghz", "--n", "3-4", "--budget-secs", "0"],
        dir.path(),
    ));
    let csv = fs::read_to_string(dir.path().join("cliff.csv")).unwrap();
    assert_eq!(csv.matches("time budget").count(), 2);
}

#[test]
fn deterministic_router_seed_sigma_is_zero() {
    let dir = tempfile::tempdir().unwrap();
    ok(&hbr(
        &[
            "seeds",
            "--alg",
            "qft",
            "--n",
            "6",
            "--router",
            "deterministic",
        ],
        dir.path(),
    ));
    let csv = fs::read_to_string(dir.path().join("seeds_summary.csv")).unwrap();
    for line in csv.lines().skip(1) {
        assert!(line.ends_with(",0.0"), "{line}");
    }
    let rows = fs::read_to_string(dir.path().join("seeds.csv")).unwrap();
    assert_eq!(rows.lines().count(), 1 + 2 * 25);
}

#[test]
fn sensitivity_reports_every_variant() {
    let dir = tempfile::tempdir().unwrap();
    ok(&hbr(
        &[
            "sensitivity",
            "--alg",
            "ghz",
            "--n",
            "6",
            "--router",
            "stochastic",
            "--router",
            "deterministic",
        ],
        dir.path(),
    ));
    let csv = fs::read_to_string(dir.path().join("sensitivity.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
    for line in csv.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        if f[5] == "false" {
            assert_eq!(f[2], f[3]);
        }
    }
    assert!(dir.path().join("calibration_perturbed.json").exists());
}

#[test]
fn validate_with_sampler_agrees() {
    let dir = tempfile::tempdir().unwrap();
    ok(&hbr(
        &["validate", "--alg", "ghz", "--n", "4", "--shots", "2048"],
        dir.path(),
    ));
    let report = json(&dir.path().join("validate.json"));
    assert_eq!(report[0]["all_agree"], true);
    assert!(report[0]["pearson_r"].as_f64().unwrap() > 0.9);
}

#[test]
fn validate_accepts_external_counts() {
    let dir = tempfile::tempdir().unwrap();
    let target = expected_bitstring(&BenchmarkSpec::new(Algorithm::Bv, 4)).unwrap();
    let wrong: String = target
        .chars()
        .map(|c| if c == '0' { '1' } else { '0' })
        .collect();
    let counts = |hits: u64| serde_json::json!({"counts": {&target: hits, &wrong: 1000 - hits}, "shots": 1000});
    let path = dir.path().join("counts.json");
    fs::write(
        &path,
        serde_json::json!({"compact-deterministic": counts(900), "recursive-deterministic": counts(900)}).to_string(),
    )
    .unwrap();
    let out = dir.path().join("v");
    let o = Command::new(env!("CARGO_BIN_EXE_hbr"))
        .args([
            "validate",
            "--alg",
            "bv",
            "--n",
            "4",
            "--router",
            "deterministic",
            "--counts",
        ])
        .arg(&path)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    let csv = fs::read_to_string(out.join("validate.csv")).unwrap();
    assert!(csv.contains(",0.9,"), "{csv}");
    // Identical predictions give Pearson zero variance, which counts as a failed analysis.
    assert_eq!(o.status.code(), Some(1));

    fs::write(
        &path,
        serde_json::json!({"compact-deterministic": counts(900)}).to_string(),
    )
    .unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_hbr"))
        .args([
            "validate",
            "--alg",
            "bv",
            "--n",
            "4",
            "--router",
            "deterministic",
            "--counts",
        ])
        .arg(&path)
        .arg("--out")
        .arg(dir.path().join("w"))
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("missing counts"));
}

#[test]
fn bad_manifest_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.json");
    fs::write(&path, "{}").unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_hbr"))
        .arg("run")
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}
