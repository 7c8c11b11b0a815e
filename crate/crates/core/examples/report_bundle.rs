//! Runs the pipeline on the bundled Bell setup and writes a report bundle.

use qodesign::bundled;
use qodesign::experiments::ExperimentKey;
use qodesign::pipeline::{run_pipeline, PipelineConfig, Stages};
use qodesign::report::{write_bundle, BundleInput};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let setup = bundled::setup(ExperimentKey::BellSpdc);
    let config = PipelineConfig::default();
    let outcome = run_pipeline(&setup, &Stages::default(), &config);
    let best = outcome.best();
    let (Some(metrics), Some(params), Some(key)) = (&best.metrics, &best.params, best.key) else {
        return Err("pipeline produced no metrics".into());
    };
    let dir = tempfile::tempdir()?;
    let out = dir.path().join("bell");
    let bundle = write_bundle(
        &out,
        &BundleInput {
            setup: &setup,
            key,
            params,
            metrics,
            history: &outcome.history,
            seed: config.seed,
        },
    )?;
    for f in &bundle.files {
        println!("{} ({} bytes)", f.display(), std::fs::metadata(f)?.len());
    }
    println!();
    print!("{}", std::fs::read_to_string(out.join(qodesign::report::SUMMARY_FILE))?);
    Ok(())
}
