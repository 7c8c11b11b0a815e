//! The thirteen experiment simulators, addressed by a stable key.
//!
//! Each simulator takes typed parameters (with defaults matching the bundled
//! setup of the same key) and a seed, and returns a [`MetricSet`].
//! [`bind_setup`] derives parameters from an [`OpticalSetup`] and records
//! which setup values they came from.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::optical_model::{from_json_bytes, Component, ComponentKind, OpticalSetup, SetupError};

pub mod metric_set;

pub mod bb84;
pub mod bell_spdc;
pub mod boson_sampling;
pub mod eit;
pub mod franson;
pub mod frequency_conversion;
pub mod ghz_fusion;
pub mod hom;
pub mod hyperentanglement;
pub mod mach_zehnder;
pub mod michelson;
pub mod quantum_eraser;
pub mod teleportation;

pub use metric_set::{normalize_name, MetricSet, Series};

/// Planck constant (J s) and speed of light (m/s).
pub const PLANCK: f64 = 6.626_070_15e-34;
pub const LIGHT_SPEED: f64 = 299_792_458.0;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum SimError {
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("{name} = {value} is outside {range}")]
    OutOfRange { name: &'static str, value: f64, range: &'static str },
    #[error("scan {0} is empty")]
    EmptyScan(&'static str),
    #[error("non-finite result in {0}")]
    NonFinite(String),
    #[error(transparent)]
    Quantum(#[from] qcore::QError),
}

pub type SimResult<T> = Result<T, SimError>;

pub(crate) fn check_range(name: &'static str, value: f64, lo: f64, hi: f64, range: &'static str) -> SimResult<()> {
    if value.is_finite() && (lo..=hi).contains(&value) {
        Ok(())
    } else {
        Err(SimError::OutOfRange { name, value, range })
    }
}

pub(crate) fn check_positive(name: &'static str, value: f64) -> SimResult<()> {
    check_range(name, value, f64::MIN_POSITIVE, f64::MAX, "(0, inf)")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhysicsDomain {
    DiscretePhotonic,
    Temporal,
    ContinuousVariable,
    Atomic,
}

impl PhysicsDomain {
    pub fn as_str(self) -> &'static str {
        match self {
            PhysicsDomain::DiscretePhotonic => "discrete_photonic",
            PhysicsDomain::Temporal => "temporal",
            PhysicsDomain::ContinuousVariable => "continuous_variable",
            PhysicsDomain::Atomic => "atomic",
        }
    }
}

impl fmt::Display for PhysicsDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKey {
    Hom,
    MachZehnder,
    Michelson,
    BellSpdc,
    QuantumEraser,
    Bb84,
    Franson,
    GhzFusion,
    Teleportation,
    Hyperentanglement,
    BosonSampling,
    Eit,
    FrequencyConversion,
}

impl ExperimentKey {
    pub const ALL: [ExperimentKey; 13] = [
        ExperimentKey::Hom,
        ExperimentKey::MachZehnder,
        ExperimentKey::Michelson,
        ExperimentKey::BellSpdc,
        ExperimentKey::QuantumEraser,
        ExperimentKey::Bb84,
        ExperimentKey::Franson,
        ExperimentKey::GhzFusion,
        ExperimentKey::Teleportation,
        ExperimentKey::Hyperentanglement,
        ExperimentKey::BosonSampling,
        ExperimentKey::Eit,
        ExperimentKey::FrequencyConversion,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentKey::Hom => "hom",
            ExperimentKey::MachZehnder => "mach_zehnder",
            ExperimentKey::Michelson => "michelson",
            ExperimentKey::BellSpdc => "bell_spdc",
            ExperimentKey::QuantumEraser => "quantum_eraser",
            ExperimentKey::Bb84 => "bb84",
            ExperimentKey::Franson => "franson",
            ExperimentKey::GhzFusion => "ghz_fusion",
            ExperimentKey::Teleportation => "teleportation",
            ExperimentKey::Hyperentanglement => "hyperentanglement",
            ExperimentKey::BosonSampling => "boson_sampling",
            ExperimentKey::Eit => "eit",
            ExperimentKey::FrequencyConversion => "frequency_conversion",
        }
    }

    /// The formalism each simulator is written in.
    pub fn domain(self) -> PhysicsDomain {
        match self {
            ExperimentKey::Hom | ExperimentKey::Franson => PhysicsDomain::Temporal,
            ExperimentKey::Eit => PhysicsDomain::Atomic,
            _ => PhysicsDomain::DiscretePhotonic,
        }
    }

    /// Component categories whose effect the simulator models.
    pub fn modeled_kinds(self) -> &'static [ComponentKind] {
        use ComponentKind::*;
        match self {
            ExperimentKey::Hom => &[Source, Crystal, PassiveOptics, Modulation, Detector, Measurement],
            ExperimentKey::MachZehnder => &[Source, PassiveOptics, Modulation, Detector],
            ExperimentKey::Michelson => &[Source, PassiveOptics, Modulation, Detector],
            ExperimentKey::BellSpdc => &[Source, Crystal, PassiveOptics, Detector, Measurement],
            ExperimentKey::QuantumEraser => &[Source, Crystal, PassiveOptics, Detector, Measurement],
            ExperimentKey::Bb84 => &[Source, PassiveOptics, Modulation, Detector, Measurement],
            ExperimentKey::Franson => &[Source, Crystal, PassiveOptics, Modulation, Detector, Measurement],
            ExperimentKey::GhzFusion => &[Source, Crystal, PassiveOptics, Detector, Measurement],
            ExperimentKey::Teleportation => &[Source, Crystal, PassiveOptics, Modulation, Detector, Measurement],
            ExperimentKey::Hyperentanglement => &[Source, Crystal, PassiveOptics, Modulation, Detector, Measurement],
            ExperimentKey::BosonSampling => &[Source, Crystal, PassiveOptics, Modulation, Detector, Measurement],
            ExperimentKey::Eit => &[Source, Crystal, PassiveOptics, Modulation, Detector, Measurement],
            ExperimentKey::FrequencyConversion => &[Source, Crystal, PassiveOptics, Detector],
        }
    }
}

impl fmt::Display for ExperimentKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown experiment key {0:?}")]
pub struct UnknownKey(pub String);

impl FromStr for ExperimentKey {
    type Err = UnknownKey;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ExperimentKey::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| UnknownKey(s.to_string()))
    }
}

/// Detector and mode-quality imperfections shared by the photon-counting
/// simulators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseParams {
    pub detector_efficiency: f64,
    pub dark_count_rate_hz: f64,
    pub mode_matching: f64,
    pub distinguishability: f64,
}

impl NoiseParams {
    pub const IDEAL: NoiseParams = NoiseParams {
        detector_efficiency: 1.0,
        dark_count_rate_hz: 0.0,
        mode_matching: 1.0,
        distinguishability: 0.0,
    };

    pub fn validate(&self) -> SimResult<()> {
        check_range("detector_efficiency", self.detector_efficiency, 0.0, 1.0, "[0, 1]")?;
        check_range("dark_count_rate_hz", self.dark_count_rate_hz, 0.0, f64::MAX, "[0, inf)")?;
        check_range("mode_matching", self.mode_matching, 0.0, 1.0, "[0, 1]")?;
        check_range("distinguishability", self.distinguishability, 0.0, 1.0, "[0, 1]")
    }

    fn record(&self, m: &mut MetricSet) {
        m.input("detector_efficiency", self.detector_efficiency);
        m.input("dark_count_rate_hz", self.dark_count_rate_hz);
        m.input("mode_matching", self.mode_matching);
        m.input("distinguishability", self.distinguishability);
    }
}

impl Default for NoiseParams {
    fn default() -> Self {
        NoiseParams {
            detector_efficiency: 0.65,
            dark_count_rate_hz: 25.0,
            mode_matching: 0.95,
            distinguishability: 0.02,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "experiment", content = "params", rename_all = "snake_case")]
pub enum ExperimentParams {
    Hom(hom::HomParams),
    MachZehnder(mach_zehnder::MachZehnderParams),
    Michelson(michelson::MichelsonParams),
    BellSpdc(bell_spdc::BellParams),
    QuantumEraser(quantum_eraser::EraserParams),
    Bb84(bb84::Bb84Params),
    Franson(franson::FransonParams),
    GhzFusion(ghz_fusion::GhzParams),
    Teleportation(teleportation::TeleportationParams),
    Hyperentanglement(hyperentanglement::HyperParams),
    BosonSampling(boson_sampling::BosonParams),
    Eit(eit::EitParams),
    FrequencyConversion(frequency_conversion::ConversionParams),
}

macro_rules! dispatch {
    ($value:expr, $p:ident => $body:expr) => {
        match $value {
            ExperimentParams::Hom($p) => $body,
            ExperimentParams::MachZehnder($p) => $body,
            ExperimentParams::Michelson($p) => $body,
            ExperimentParams::BellSpdc($p) => $body,
            ExperimentParams::QuantumEraser($p) => $body,
            ExperimentParams::Bb84($p) => $body,
            ExperimentParams::Franson($p) => $body,
            ExperimentParams::GhzFusion($p) => $body,
            ExperimentParams::Teleportation($p) => $body,
            ExperimentParams::Hyperentanglement($p) => $body,
            ExperimentParams::BosonSampling($p) => $body,
            ExperimentParams::Eit($p) => $body,
            ExperimentParams::FrequencyConversion($p) => $body,
        }
    };
}

impl ExperimentParams {
    pub fn key(&self) -> ExperimentKey {
        match self {
            ExperimentParams::Hom(_) => ExperimentKey::Hom,
            ExperimentParams::MachZehnder(_) => ExperimentKey::MachZehnder,
            ExperimentParams::Michelson(_) => ExperimentKey::Michelson,
            ExperimentParams::BellSpdc(_) => ExperimentKey::BellSpdc,
            ExperimentParams::QuantumEraser(_) => ExperimentKey::QuantumEraser,
            ExperimentParams::Bb84(_) => ExperimentKey::Bb84,
            ExperimentParams::Franson(_) => ExperimentKey::Franson,
            ExperimentParams::GhzFusion(_) => ExperimentKey::GhzFusion,
            ExperimentParams::Teleportation(_) => ExperimentKey::Teleportation,
            ExperimentParams::Hyperentanglement(_) => ExperimentKey::Hyperentanglement,
            ExperimentParams::BosonSampling(_) => ExperimentKey::BosonSampling,
            ExperimentParams::Eit(_) => ExperimentKey::Eit,
            ExperimentParams::FrequencyConversion(_) => ExperimentKey::FrequencyConversion,
        }
    }

    pub fn default_for(key: ExperimentKey) -> Self {
        match key {
            ExperimentKey::Hom => ExperimentParams::Hom(Default::default()),
            ExperimentKey::MachZehnder => ExperimentParams::MachZehnder(Default::default()),
            ExperimentKey::Michelson => ExperimentParams::Michelson(Default::default()),
            ExperimentKey::BellSpdc => ExperimentParams::BellSpdc(Default::default()),
            ExperimentKey::QuantumEraser => ExperimentParams::QuantumEraser(Default::default()),
            ExperimentKey::Bb84 => ExperimentParams::Bb84(Default::default()),
            ExperimentKey::Franson => ExperimentParams::Franson(Default::default()),
            ExperimentKey::GhzFusion => ExperimentParams::GhzFusion(Default::default()),
            ExperimentKey::Teleportation => ExperimentParams::Teleportation(Default::default()),
            ExperimentKey::Hyperentanglement => ExperimentParams::Hyperentanglement(Default::default()),
            ExperimentKey::BosonSampling => ExperimentParams::BosonSampling(Default::default()),
            ExperimentKey::Eit => ExperimentParams::Eit(Default::default()),
            ExperimentKey::FrequencyConversion => ExperimentParams::FrequencyConversion(Default::default()),
        }
    }

    /// Parses a bare parameter object for `key`; omitted fields keep their
    /// defaults and unknown fields are rejected.
    pub fn from_json(key: ExperimentKey, bytes: &[u8]) -> Result<Self, SetupError> {
        Ok(match key {
            ExperimentKey::Hom => ExperimentParams::Hom(from_json_bytes(bytes)?),
            ExperimentKey::MachZehnder => ExperimentParams::MachZehnder(from_json_bytes(bytes)?),
            ExperimentKey::Michelson => ExperimentParams::Michelson(from_json_bytes(bytes)?),
            ExperimentKey::BellSpdc => ExperimentParams::BellSpdc(from_json_bytes(bytes)?),
            ExperimentKey::QuantumEraser => ExperimentParams::QuantumEraser(from_json_bytes(bytes)?),
            ExperimentKey::Bb84 => ExperimentParams::Bb84(from_json_bytes(bytes)?),
            ExperimentKey::Franson => ExperimentParams::Franson(from_json_bytes(bytes)?),
            ExperimentKey::GhzFusion => ExperimentParams::GhzFusion(from_json_bytes(bytes)?),
            ExperimentKey::Teleportation => ExperimentParams::Teleportation(from_json_bytes(bytes)?),
            ExperimentKey::Hyperentanglement => ExperimentParams::Hyperentanglement(from_json_bytes(bytes)?),
            ExperimentKey::BosonSampling => ExperimentParams::BosonSampling(from_json_bytes(bytes)?),
            ExperimentKey::Eit => ExperimentParams::Eit(from_json_bytes(bytes)?),
            ExperimentKey::FrequencyConversion => ExperimentParams::FrequencyConversion(from_json_bytes(bytes)?),
        })
    }

    /// The bare parameter object, the inverse of [`ExperimentParams::from_json`].
    pub fn to_json_value(&self) -> serde_json::Value {
        dispatch!(self, p => serde_json::to_value(p).expect("params serialize"))
    }
}

/// Runs the simulator selected by `params`. All randomness derives from
/// `seed`.
pub fn run(params: &ExperimentParams, seed: u64) -> SimResult<MetricSet> {
    let m = match params {
        ExperimentParams::Hom(p) => hom::simulate(p, seed),
        ExperimentParams::MachZehnder(p) => mach_zehnder::simulate(p),
        ExperimentParams::Michelson(p) => michelson::simulate(p),
        ExperimentParams::BellSpdc(p) => bell_spdc::simulate(p),
        ExperimentParams::QuantumEraser(p) => quantum_eraser::simulate(p, seed),
        ExperimentParams::Bb84(p) => bb84::simulate(p, seed),
        ExperimentParams::Franson(p) => franson::simulate(p),
        ExperimentParams::GhzFusion(p) => ghz_fusion::simulate(p),
        ExperimentParams::Teleportation(p) => teleportation::simulate(p),
        ExperimentParams::Hyperentanglement(p) => hyperentanglement::simulate(p),
        ExperimentParams::BosonSampling(p) => boson_sampling::simulate(p),
        ExperimentParams::Eit(p) => eit::simulate(p),
        ExperimentParams::FrequencyConversion(p) => frequency_conversion::simulate(p),
    }?;
    m.check_finite()?;
    Ok(m)
}

/// A simulator parameter taken from a setup value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Binding {
    /// Name of the simulator input, as recorded in [`MetricSet::inputs`].
    pub param: String,
    pub setup_value: f64,
    /// Id of the component the value was read from.
    pub source: String,
    pub rel_tol: f64,
}

impl Binding {
    pub fn matches(&self, used: f64) -> bool {
        (used - self.setup_value).abs() <= self.rel_tol * self.setup_value.abs().max(1e-12)
    }
}

/// Reads parameters out of a setup.
pub(crate) struct Binder<'a> {
    setup: &'a OpticalSetup,
    pub bindings: Vec<Binding>,
}

pub(crate) fn label_has(c: &Component, needle: &str) -> bool {
    c.label.to_lowercase().contains(&needle.to_lowercase())
}

impl<'a> Binder<'a> {
    pub fn new(setup: &'a OpticalSetup) -> Self {
        Binder {
            setup,
            bindings: Vec::new(),
        }
    }

    pub fn setup(&self) -> &'a OpticalSetup {
        self.setup
    }

    /// First component accepted by `filter` that carries `param`.
    pub fn find(&self, param: &str, filter: impl Fn(&Component) -> bool) -> Option<(&'a Component, f64)> {
        self.setup
            .components
            .iter()
            .filter(|c| filter(c))
            .find_map(|c| c.param(param).map(|v| (c, v)))
    }

    /// Sets `target` from the first matching component, converted.
    pub fn bind(&mut self, field: &str, param: &str, filter: impl Fn(&Component) -> bool, convert: impl Fn(f64) -> f64, target: &mut f64) {
        if let Some((c, v)) = self.find(param, filter) {
            let value = convert(v);
            *target = value;
            self.push(field, value, &c.id);
        }
    }

    pub fn push(&mut self, field: &str, value: f64, source: &str) {
        self.bindings.push(Binding {
            param: field.to_string(),
            setup_value: value,
            source: source.to_string(),
            rel_tol: 1e-6,
        });
    }

    /// Mean efficiency over detectors that declare one.
    pub fn detector_efficiency(&mut self, target: &mut f64) {
        let effs: Vec<(&str, f64)> = self
            .setup
            .of_kind(ComponentKind::Detector)
            .filter_map(|c| c.param("efficiency").map(|v| (c.id.as_str(), v)))
            .collect();
        if !effs.is_empty() {
            let mean = effs.iter().map(|e| e.1).sum::<f64>() / effs.len() as f64;
            *target = mean;
            self.push("detector_efficiency", mean, effs[0].0);
        }
    }

    pub fn dark_counts(&mut self, target: &mut f64) {
        self.bind("dark_count_rate_hz", "dark_counts_hz", |c| c.kind == ComponentKind::Detector, |v| v, target);
    }
}

pub fn bind_setup(key: ExperimentKey, setup: &OpticalSetup) -> (ExperimentParams, Vec<Binding>) {
    let mut b = Binder::new(setup);
    let params = match key {
        ExperimentKey::Hom => ExperimentParams::Hom(hom::bind(&mut b)),
        ExperimentKey::MachZehnder => ExperimentParams::MachZehnder(mach_zehnder::bind(&mut b)),
        ExperimentKey::Michelson => ExperimentParams::Michelson(michelson::bind(&mut b)),
        ExperimentKey::BellSpdc => ExperimentParams::BellSpdc(bell_spdc::bind(&mut b)),
        ExperimentKey::QuantumEraser => ExperimentParams::QuantumEraser(quantum_eraser::bind(&mut b)),
        ExperimentKey::Bb84 => ExperimentParams::Bb84(bb84::bind(&mut b)),
        ExperimentKey::Franson => ExperimentParams::Franson(franson::bind(&mut b)),
        ExperimentKey::GhzFusion => ExperimentParams::GhzFusion(ghz_fusion::bind(&mut b)),
        ExperimentKey::Teleportation => ExperimentParams::Teleportation(teleportation::bind(&mut b)),
        ExperimentKey::Hyperentanglement => ExperimentParams::Hyperentanglement(hyperentanglement::bind(&mut b)),
        ExperimentKey::BosonSampling => ExperimentParams::BosonSampling(boson_sampling::bind(&mut b)),
        ExperimentKey::Eit => ExperimentParams::Eit(eit::bind(&mut b)),
        ExperimentKey::FrequencyConversion => ExperimentParams::FrequencyConversion(frequency_conversion::bind(&mut b)),
    };
    (params, b.bindings)
}
