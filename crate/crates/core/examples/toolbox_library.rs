//! Saves the bundled library to a scratch directory, approves a new version
//! of a composite and records usage of a custom component.

use qodesign::bundled;
use qodesign::experiments::ExperimentKey;
use qodesign::toolbox::{load_toolbox, Toolbox};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = tempfile::tempdir()?;
    let mut tb = Toolbox::bundled();
    let paths = tb.save_to(dir.path())?;
    println!("{} primitives, {} composites, {} custom", tb.primitives().len(), tb.composites().len(), tb.custom().len());

    let mut setup = bundled::setup(ExperimentKey::MachZehnder);
    setup.description.push_str(" Second arm fitted with a piezo phase shifter.");
    let now: chrono::DateTime<chrono::Utc> = "2026-01-15T10:00:00Z".parse()?;
    let approved = tb.approve_setup(&setup, &setup.title.clone(), now)?;
    println!("approved {} v{}", approved.name, approved.version);

    if let Some(part) = tb.custom().first().map(|c| c.name.clone()) {
        let used = tb.record_usage(&part, now)?;
        println!("{} used {} times", used.name, used.usage_count);
    }

    let reloaded = load_toolbox(&paths)?;
    let latest = reloaded.latest(&setup.title).expect("just approved");
    println!("on disk: {} v{} at {}", latest.name, latest.version, latest.approved_at);
    Ok(())
}
