//! Lints a sound setup and two broken variants.

use qodesign::bundled;
use qodesign::experiments::ExperimentKey;
use qodesign::optical_model::{validate_structure, Component, ComponentKind, Unit};
use qodesign::pipeline::lint_design;

fn main() {
    let sound = bundled::setup(ExperimentKey::Hom);

    let mut squeezed = sound.clone();
    squeezed
        .components
        .push(Component::new("opo", ComponentKind::Crystal, "OPO Squeezer", 50.0, 80.0).with("squeezing_db", 68.0, Unit::DB));

    let mut cut = sound.clone();
    cut.beam_paths.truncate(2);

    for (name, setup) in [("bundled HOM", &sound), ("68 dB squeezer", &squeezed), ("cut beam path", &cut)] {
        let v = lint_design(setup);
        println!("{name}: approved={} confidence={:.2}", v.approved, v.confidence);
        for c in &v.concerns {
            println!("  {c}");
        }
        println!("  structure findings: {}", validate_structure(setup).len());
    }
}
