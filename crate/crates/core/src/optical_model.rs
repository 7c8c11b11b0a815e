//! Optical setup graph: components on a table, directed beam paths, and the
//! JSON file format.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ComponentKind {
    Source,
    Detector,
    Crystal,
    PassiveOptics,
    Measurement,
    Modulation,
}

impl ComponentKind {
    pub const ALL: [ComponentKind; 6] = [
        ComponentKind::Source,
        ComponentKind::Detector,
        ComponentKind::Crystal,
        ComponentKind::PassiveOptics,
        ComponentKind::Measurement,
        ComponentKind::Modulation,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ComponentKind::Source => "source",
            ComponentKind::Detector => "detector",
            ComponentKind::Crystal => "crystal",
            ComponentKind::PassiveOptics => "passive_optics",
            ComponentKind::Measurement => "measurement",
            ComponentKind::Modulation => "modulation",
        }
    }
}

impl fmt::Display for ComponentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Unit {
    #[serde(rename = "nm")]
    Nm,
    #[serde(rename = "mm")]
    Mm,
    #[serde(rename = "m")]
    M,
    #[serde(rename = "mW")]
    MW,
    #[serde(rename = "MHz")]
    MHz,
    #[serde(rename = "GHz")]
    GHz,
    #[serde(rename = "Hz")]
    Hz,
    #[serde(rename = "ps")]
    Ps,
    #[serde(rename = "fs")]
    Fs,
    #[serde(rename = "dB")]
    DB,
    #[serde(rename = "degree")]
    Degree,
    #[serde(rename = "dimensionless")]
    Dimensionless,
    #[serde(rename = "count_per_s")]
    CountPerS,
    #[serde(rename = "celsius")]
    Celsius,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Quantity {
    pub value: f64,
    pub unit: Unit,
}

impl Quantity {
    pub fn new(value: f64, unit: Unit) -> Self {
        Quantity { value, unit }
    }
}

/// Parameter names that may carry decibel values.
pub fn db_allowed(param: &str) -> bool {
    let p = param.to_ascii_lowercase();
    ["squeezing", "attenuation", "rejection"]
        .iter()
        .any(|k| p.contains(k))
}

/// Documented parameter vocabulary. Other names are accepted as-is.
pub const CANONICAL_PARAMS: &[&str] = &[
    "wavelength_nm",
    "power_mW",
    "efficiency",
    "reflectivity",
    "bandwidth_nm",
    "dark_counts_hz",
    "timing_resolution_ps",
    "transmittivity",
    "angle_deg",
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Position {
    pub x_mm: f64,
    pub y_mm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Component {
    pub id: String,
    pub kind: ComponentKind,
    pub label: String,
    pub position: Position,
    #[serde(default)]
    pub params: BTreeMap<String, Quantity>,
}

impl Component {
    pub fn new(id: &str, kind: ComponentKind, label: &str, x_mm: f64, y_mm: f64) -> Self {
        Component {
            id: id.to_string(),
            kind,
            label: label.to_string(),
            position: Position { x_mm, y_mm },
            params: BTreeMap::new(),
        }
    }

    pub fn with(mut self, name: &str, value: f64, unit: Unit) -> Self {
        self.params.insert(name.to_string(), Quantity::new(value, unit));
        self
    }

    pub fn param(&self, name: &str) -> Option<f64> {
        self.params.get(name).map(|q| q.value)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BeamPath {
    pub from_id: String,
    pub to_id: String,
    pub order_index: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OpticalSetup {
    pub title: String,
    pub description: String,
    pub components: Vec<Component>,
    pub beam_paths: Vec<BeamPath>,
    pub physics_explanation: String,
    pub expected_outcomes: Vec<String>,
    pub created_at: DateTime<Utc>,
}

impl OpticalSetup {
    pub fn component(&self, id: &str) -> Option<&Component> {
        self.components.iter().find(|c| c.id == id)
    }

    pub fn of_kind(&self, kind: ComponentKind) -> impl Iterator<Item = &Component> {
        self.components.iter().filter(move |c| c.kind == kind)
    }

    /// Chains beam paths through `ids` in order.
    pub fn connect(&mut self, ids: &[&str]) {
        for w in ids.windows(2) {
            let order_index = self.beam_paths.len() as u32;
            self.beam_paths.push(BeamPath {
                from_id: w[0].to_string(),
                to_id: w[1].to_string(),
                order_index,
            });
        }
    }

    /// All (component, value) pairs for a parameter name.
    pub fn param_values<'a>(&'a self, name: &'a str) -> impl Iterator<Item = (&'a Component, f64)> + 'a {
        self.components
            .iter()
            .filter_map(move |c| c.param(name).map(|v| (c, v)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "finding", rename_all = "snake_case")]
pub enum StructureFinding {
    MissingSource,
    MissingDetector,
    DuplicateId { id: String },
    DanglingEndpoint { from_id: String, to_id: String, missing: String },
    SelfLoop { id: String },
    UnreachableDetector { id: String },
}

impl fmt::Display for StructureFinding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StructureFinding::MissingSource => write!(f, "setup has no source component"),
            StructureFinding::MissingDetector => write!(f, "setup has no detector component"),
            StructureFinding::DuplicateId { id } => write!(f, "component id '{id}' is used more than once"),
            StructureFinding::DanglingEndpoint { from_id, to_id, missing } => {
                write!(f, "beam path {from_id} -> {to_id} references unknown component '{missing}'")
            }
            StructureFinding::SelfLoop { id } => write!(f, "beam path loops on '{id}'"),
            StructureFinding::UnreachableDetector { id } => {
                write!(f, "detector '{id}' is not reachable from any source")
            }
        }
    }
}

/// Structural problems of a setup, sorted. Empty means sound.
pub fn validate_structure(setup: &OpticalSetup) -> Vec<StructureFinding> {
    let mut findings = Vec::new();
    let mut seen: HashMap<&str, usize> = HashMap::new();
    for c in &setup.components {
        *seen.entry(c.id.as_str()).or_default() += 1;
    }
    for (id, n) in &seen {
        if *n > 1 {
            findings.push(StructureFinding::DuplicateId { id: id.to_string() });
        }
    }
    if setup.of_kind(ComponentKind::Source).next().is_none() {
        findings.push(StructureFinding::MissingSource);
    }
    if setup.of_kind(ComponentKind::Detector).next().is_none() {
        findings.push(StructureFinding::MissingDetector);
    }

    let mut adjacency: HashMap<&str, Vec<&str>> = HashMap::new();
    for p in &setup.beam_paths {
        for end in [&p.from_id, &p.to_id] {
            if !seen.contains_key(end.as_str()) {
                findings.push(StructureFinding::DanglingEndpoint {
                    from_id: p.from_id.clone(),
                    to_id: p.to_id.clone(),
                    missing: end.clone(),
                });
            }
        }
        if p.from_id == p.to_id {
            findings.push(StructureFinding::SelfLoop { id: p.from_id.clone() });
            continue;
        }
        adjacency.entry(p.from_id.as_str()).or_default().push(p.to_id.as_str());
    }

    let mut reached: BTreeSet<&str> = BTreeSet::new();
    let mut queue: VecDeque<&str> = VecDeque::new();
    for s in setup.of_kind(ComponentKind::Source) {
        if reached.insert(s.id.as_str()) {
            queue.push_back(s.id.as_str());
        }
    }
    while let Some(node) = queue.pop_front() {
        for &next in adjacency.get(node).into_iter().flatten() {
            if reached.insert(next) {
                queue.push_back(next);
            }
        }
    }
    let detectors: BTreeSet<&str> = setup
        .of_kind(ComponentKind::Detector)
        .map(|c| c.id.as_str())
        .collect();
    for d in detectors {
        if !reached.contains(d) {
            findings.push(StructureFinding::UnreachableDetector { id: d.to_string() });
        }
    }
    findings.sort();
    findings.dedup();
    findings
}

#[derive(Debug, Error)]
pub enum SetupError {
    #[error("{path}: {message} (line {line}, column {column})")]
    Syntax {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{path}: {message}")]
    Invalid { path: String, message: String },
}

impl SetupError {
    pub fn path(&self) -> &str {
        match self {
            SetupError::Syntax { path, .. } | SetupError::Invalid { path, .. } => path,
        }
    }
}

pub fn serialize_setup(setup: &OpticalSetup) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(setup).expect("setup is always serializable");
    out.push(b'\n');
    out
}

/// Strict JSON decoding with a JSON-path diagnostic on failure.
pub(crate) fn from_json_bytes<T: serde::de::DeserializeOwned>(bytes: &[u8]) -> Result<T, SetupError> {
    let de = &mut serde_json::Deserializer::from_slice(bytes);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        SetupError::Syntax {
            path,
            line: inner.line(),
            column: inner.column(),
            message: inner.to_string(),
        }
    })
}

pub fn parse_setup(bytes: &[u8]) -> Result<OpticalSetup, SetupError> {
    let setup: OpticalSetup = from_json_bytes(bytes)?;
    check_values(&setup)?;
    Ok(setup)
}

fn check_values(setup: &OpticalSetup) -> Result<(), SetupError> {
    for (i, c) in setup.components.iter().enumerate() {
        if c.id.trim().is_empty() {
            return Err(SetupError::Invalid {
                path: format!("components[{i}].id"),
                message: "component id is empty".into(),
            });
        }
        if !c.position.x_mm.is_finite() || !c.position.y_mm.is_finite() {
            return Err(SetupError::Invalid {
                path: format!("components[{i}].position"),
                message: "position is not finite".into(),
            });
        }
        for (name, q) in &c.params {
            let path = format!("components[{i}].params.{name}");
            if !q.value.is_finite() {
                return Err(SetupError::Invalid {
                    path,
                    message: "value is not finite".into(),
                });
            }
            if q.unit == Unit::DB && !db_allowed(name) {
                return Err(SetupError::Invalid {
                    path,
                    message: "dB units are only allowed on squeezing, attenuation or rejection parameters".into(),
                });
            }
        }
    }
    for (i, p) in setup.beam_paths.iter().enumerate() {
        if p.from_id.is_empty() || p.to_id.is_empty() {
            return Err(SetupError::Invalid {
                path: format!("beam_paths[{i}]"),
                message: "beam path endpoint id is empty".into(),
            });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> OpticalSetup {
        let mut s = OpticalSetup {
            title: "t".into(),
            description: "d".into(),
            components: vec![
                Component::new("laser", ComponentKind::Source, "Laser", 0.0, 0.0)
                    .with("wavelength_nm", 810.0, Unit::Nm),
                Component::new("det", ComponentKind::Detector, "Detector", 100.0, 0.0),
            ],
            beam_paths: vec![],
            physics_explanation: String::new(),
            expected_outcomes: vec![],
            created_at: "2025-01-01T00:00:00Z".parse().unwrap(),
        };
        s.connect(&["laser", "det"]);
        s
    }

    #[test]
    fn sound_minimal_setup() {
        assert!(validate_structure(&tiny()).is_empty());
    }

    #[test]
    fn detector_without_input_is_unreachable() {
        let mut s = tiny();
        s.beam_paths.clear();
        assert_eq!(
            validate_structure(&s),
            vec![StructureFinding::UnreachableDetector { id: "det".into() }]
        );
    }

    #[test]
    fn empty_setup_round_trips_and_is_flagged() {
        let mut s = tiny();
        s.components.clear();
        s.beam_paths.clear();
        let back = parse_setup(&serialize_setup(&s)).unwrap();
        assert_eq!(back, s);
        assert_eq!(
            validate_structure(&back),
            vec![StructureFinding::MissingSource, StructureFinding::MissingDetector]
        );
    }

    #[test]
    fn unknown_unit_names_the_field() {
        let text = String::from_utf8(serialize_setup(&tiny()))
            .unwrap()
            .replace("\"nm\"", "\"furlong\"");
        let err = parse_setup(text.as_bytes()).unwrap_err();
        assert!(err.path().contains("components[0].params.wavelength_nm"), "{err}");
    }

    #[test]
    fn db_only_on_allowed_params() {
        let mut s = tiny();
        s.components[0] = s.components[0].clone().with("power_mW", 3.0, Unit::DB);
        let err = parse_setup(&serialize_setup(&s)).unwrap_err();
        assert!(err.to_string().contains("dB"));
        assert!(db_allowed("squeezing_db"));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = String::from_utf8(serialize_setup(&tiny()))
            .unwrap()
            .replacen("\"title\"", "\"colour\": 1, \"title\"", 1);
        assert!(parse_setup(text.as_bytes()).is_err());
    }
}
