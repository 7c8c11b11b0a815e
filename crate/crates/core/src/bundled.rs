//! Reference setups shipped with the crate, one per experiment key.

use crate::experiments::ExperimentKey;
use crate::optical_model::{parse_setup, OpticalSetup};

macro_rules! setup_json {
    ($name:literal) => {
        include_str!(concat!("../data/setups/", $name, ".json"))
    };
}

pub fn setup_json(key: ExperimentKey) -> &'static str {
    match key {
        ExperimentKey::Hom => setup_json!("hom"),
        ExperimentKey::MachZehnder => setup_json!("mach_zehnder"),
        ExperimentKey::Michelson => setup_json!("michelson"),
        ExperimentKey::BellSpdc => setup_json!("bell_spdc"),
        ExperimentKey::QuantumEraser => setup_json!("quantum_eraser"),
        ExperimentKey::Bb84 => setup_json!("bb84"),
        ExperimentKey::Franson => setup_json!("franson"),
        ExperimentKey::GhzFusion => setup_json!("ghz_fusion"),
        ExperimentKey::Teleportation => setup_json!("teleportation"),
        ExperimentKey::Hyperentanglement => setup_json!("hyperentanglement"),
        ExperimentKey::BosonSampling => setup_json!("boson_sampling"),
        ExperimentKey::Eit => setup_json!("eit"),
        ExperimentKey::FrequencyConversion => setup_json!("frequency_conversion"),
    }
}

pub fn setup(key: ExperimentKey) -> OpticalSetup {
    parse_setup(setup_json(key).as_bytes()).unwrap_or_else(|e| panic!("bundled setup {key} is invalid: {e}"))
}

pub fn setups() -> Vec<(ExperimentKey, OpticalSetup)> {
    ExperimentKey::ALL.into_iter().map(|k| (k, setup(k))).collect()
}
