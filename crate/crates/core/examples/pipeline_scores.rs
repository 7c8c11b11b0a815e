//! Runs the validation pipeline over every bundled setup and prints the
//! rubric breakdown.

use qodesign::bundled;
use qodesign::pipeline::{classify_domain, lint_design, run_pipeline, PipelineConfig, Stages};

fn main() {
    let stages = Stages::default();
    for (key, setup) in bundled::setups() {
        let verdict = lint_design(&setup);
        let outcome = run_pipeline(&setup, &stages, &PipelineConfig::default());
        let best = outcome.best();
        print!("{key:<22} {:<18} lint={} score={}", classify_domain(&setup).as_str(), verdict.approved, best.score());
        if let Some(a) = &best.alignment {
            print!("  a={:.2} b={:.2} c={:.2} d={:.2}", a.formalism, a.components, a.parameters, a.observables);
        }
        println!();
        for c in &best.concerns {
            println!("    {c}");
        }
    }
}
