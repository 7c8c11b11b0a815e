//! Plugs custom stages into the pipeline: a generator that starts from the
//! wrong simulator and a refiner that sweeps the seed before switching.

use qodesign::bundled;
use qodesign::experiments::{bind_setup, ExperimentKey};
use qodesign::optical_model::OpticalSetup;
use qodesign::pipeline::{infer_key, run_pipeline, Generator, PipelineConfig, Refiner, RunPlan, RunRecord, Stages};

struct StartWith(ExperimentKey);

impl Generator for StartWith {
    fn plan(&self, setup: &OpticalSetup, seed: u64) -> Result<RunPlan, String> {
        Ok(RunPlan {
            key: self.0,
            params: bind_setup(self.0, setup).0,
            seed,
        })
    }
}

struct SeedThenSwitch;

impl Refiner for SeedThenSwitch {
    fn refine(&self, setup: &OpticalSetup, plan: &RunPlan, record: &RunRecord) -> Option<RunPlan> {
        if record.iteration == 1 {
            return Some(RunPlan {
                seed: plan.seed + 1,
                ..plan.clone()
            });
        }
        let key = infer_key(setup)?;
        Some(RunPlan {
            key,
            params: bind_setup(key, setup).0,
            seed: plan.seed,
        })
    }
}

fn main() {
    let setup = bundled::setup(ExperimentKey::Franson);
    let stages = Stages {
        generator: Box::new(StartWith(ExperimentKey::Michelson)),
        refiner: Box::new(SeedThenSwitch),
        ..Default::default()
    };
    let outcome = run_pipeline(&setup, &stages, &PipelineConfig::default());
    for r in &outcome.history {
        println!("iteration {} {:?} score {}", r.iteration, r.key.map(|k| k.as_str()), r.score());
        for c in r.concerns.iter().take(3) {
            println!("    {c}");
        }
    }
    println!("kept iteration {} with score {} after {} executions", outcome.best().iteration, outcome.score(), outcome.executions);
}
