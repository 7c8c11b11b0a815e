//! Runs every bundled setup through its simulator and prints headline scalars.

use qodesign::bundled;
use qodesign::experiments::{bind_setup, run};

fn main() {
    for (key, setup) in bundled::setups() {
        let (params, bindings) = bind_setup(key, &setup);
        match run(&params, 42) {
            Ok(m) => {
                println!("{key} ({} bindings)", bindings.len());
                for outcome in &setup.expected_outcomes {
                    match m.scalar(outcome) {
                        Some(v) => println!("  {outcome:<28} {v:.6}"),
                        None => println!("  {outcome:<28} (series)"),
                    }
                }
            }
            Err(e) => println!("{key}: {e}"),
        }
    }
}
