use std::collections::BTreeMap;
use std::path::Path;
use std::process::Command;

use qodesign::bundled;
use qodesign::cli::{run, EXIT_OK, EXIT_REJECTED, EXIT_USAGE};
use qodesign::experiments::{self, ExperimentKey, ExperimentParams};
use qodesign::optical_model::{serialize_setup, Component, ComponentKind, Unit};
use qodesign::report::{write_bundle, BundleInput, ReportError, DESIGN_FILE, HISTORY_FILE, METRICS_FILE, SUMMARY_FILE};

fn cli(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("qodesign").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn tree(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
        })
        .collect()
}

#[test]
fn bundle_contents() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("hom");
    let setup = bundled::setup(ExperimentKey::Hom);
    let params = ExperimentParams::default_for(ExperimentKey::Hom);
    let metrics = experiments::run(&params, 5).unwrap();
    let input = BundleInput {
        setup: &setup,
        key: ExperimentKey::Hom,
        params: &params,
        metrics: &metrics,
        history: &[],
        seed: 5,
    };
    let bundle = write_bundle(&out, &input).unwrap();
    let files = tree(&out);
    for name in [DESIGN_FILE, METRICS_FILE, SUMMARY_FILE, HISTORY_FILE, "coincidence_vs_delay.csv"] {
        assert!(files.contains_key(name), "{name}");
    }
    assert_eq!(bundle.files.len(), files.len());
    assert_eq!(files[DESIGN_FILE], serialize_setup(&setup));

    let json: serde_json::Value = serde_json::from_slice(&files[METRICS_FILE]).unwrap();
    assert_eq!(json["experiment"], "hom");
    assert_eq!(json["seed"], 5);
    assert_eq!(json["scalars"]["visibility"].as_f64().unwrap(), metrics.get("visibility"));
    assert_eq!(json["series"]["coincidence_vs_delay"], "coincidence_vs_delay.csv");

    let mut reader = csv::Reader::from_reader(&files["coincidence_vs_delay.csv"][..]);
    assert_eq!(reader.headers().unwrap(), vec!["delay_fs", "value"]);
    let rows: Vec<(f64, f64)> = reader.deserialize().map(Result::unwrap).collect();
    assert_eq!(rows.len(), metrics.series["coincidence_vs_delay"].values.len());
    assert_eq!(rows[3].1, metrics.series["coincidence_vs_delay"].values[3]);

    let summary = String::from_utf8(files[SUMMARY_FILE].clone()).unwrap();
    assert!(summary.starts_with(&format!("# {}", setup.title)));
    assert!(summary.contains("| visibility |"));

    assert!(matches!(write_bundle(&out, &input), Err(ReportError::NotEmpty(_))));
}

#[test]
fn exit_codes() {
    assert_eq!(cli(&["intent", "What is EIT?"]), (EXIT_OK, "chat\n".into(), String::new()));
    assert_eq!(cli(&["intent", "Design a Michelson interferometer"]).1, "design\n");
    assert_eq!(cli(&["frobnicate"]).0, EXIT_USAGE);
    assert_eq!(cli(&["toolbox", "list", "--tier", "nonsense"]).0, EXIT_USAGE);
    assert_eq!(cli(&["retrieve", "bell", "--top", "0"]).0, EXIT_USAGE);
    assert_eq!(cli(&["--version"]).0, EXIT_OK);

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, b"{\"title\": 3}").unwrap();
    let (code, _, err) = cli(&["lint", bad.to_str().unwrap()]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("title"));

    let good = dir.path().join("hom.json");
    std::fs::write(&good, serialize_setup(&bundled::setup(ExperimentKey::Hom))).unwrap();
    assert_eq!(cli(&["lint", good.to_str().unwrap()]).0, EXIT_OK);

    let mut squeezed = bundled::setup(ExperimentKey::Hom);
    squeezed
        .components
        .push(Component::new("opo", ComponentKind::Crystal, "Squeezer", 1.0, 1.0).with("squeezing_db", 68.0, Unit::DB));
    let sq = dir.path().join("squeezed.json");
    std::fs::write(&sq, serialize_setup(&squeezed)).unwrap();
    let (code, _, err) = cli(&["lint", sq.to_str().unwrap()]);
    assert_eq!(code, EXIT_REJECTED);
    assert!(err.contains("squeezing"));
    let out = dir.path().join("sq-out");
    let (code, stdout, _) = cli(&["pipeline", "run", sq.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code, EXIT_REJECTED);
    assert!(stdout.contains("rejected before running"));
    assert!(!out.exists());
}

#[test]
fn simulate_refuses_a_used_directory() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("mz");
    let args = ["simulate", "--experiment", "mach_zehnder", "--out", out.to_str().unwrap()];
    assert_eq!(cli(&args).0, EXIT_OK);
    let (code, _, err) = cli(&args);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("not empty"));
    assert_eq!(cli(&["simulate", "--experiment", "warp", "--out", "x"]).0, EXIT_USAGE);

    let params = dir.path().join("p.json");
    std::fs::write(&params, br#"{"wavelength_nm": -5}"#).unwrap();
    let out = dir.path().join("neg");
    let (code, _, err) = cli(&["simulate", "--experiment", "michelson", "--params", params.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("wavelength_nm"), "{err}");
}

#[test]
fn toolbox_and_retrieve() {
    let (code, out, _) = cli(&["toolbox", "list", "--tier", "composites"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out.lines().count(), 13);
    let (code, out, _) = cli(&["retrieve", "Franson interferometer energy-time entanglement", "--top", "3"]);
    assert_eq!(code, EXIT_OK);
    let first = out.lines().next().unwrap();
    assert!(first.contains(&bundled::setup(ExperimentKey::Franson).title), "{out}");
    assert!(out.lines().last().unwrap().starts_with("match: "));
}

fn binary(args: &[&str], threads: usize) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_qodesign"))
        .args(args)
        .env("RAYON_NUM_THREADS", threads.to_string())
        .env_remove("TOOLBOX_DIR")
        .output()
        .unwrap()
}

#[test]
fn binary_output_is_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let setup = dir.path().join("bb84.json");
    std::fs::write(&setup, serialize_setup(&bundled::setup(ExperimentKey::Bb84))).unwrap();
    let mut bundles = Vec::new();
    for threads in [1, 4] {
        let sim = dir.path().join(format!("sim-{threads}"));
        let o = binary(&["simulate", "--experiment", "bb84", "--seed", "7", "--out", sim.to_str().unwrap()], threads);
        assert!(o.status.success());
        let pipe = dir.path().join(format!("pipe-{threads}"));
        let o = binary(&["pipeline", "run", setup.to_str().unwrap(), "--seed", "7", "--out", pipe.to_str().unwrap()], threads);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        bundles.push((tree(&sim), tree(&pipe)));
    }
    assert_eq!(bundles[0], bundles[1]);
}
