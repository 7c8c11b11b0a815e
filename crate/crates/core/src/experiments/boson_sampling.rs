//! Indistinguishable photons through a passive linear network, with the
//! output distribution computed both by Fock-space evolution and from
//! matrix permanents.

use qcore::network::Element;
use qcore::{Network, QError};
use serde::{Deserialize, Serialize};

use super::{check_range, label_has, Binder, MetricSet, SimError, SimResult};
use crate::optical_model::ComponentKind;

pub const MAX_MODES: usize = 6;
pub const MAX_PHOTONS: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum NetworkElement {
    BeamSplitter { modes: [usize; 2], transmittance: f64 },
    PhaseShifter { mode: usize, phase_rad: f64 },
}

impl NetworkElement {
    fn to_element(self) -> Element {
        match self {
            NetworkElement::BeamSplitter { modes, transmittance } => {
                Element::splitter_with_transmittance(transmittance, (modes[0], modes[1]))
            }
            NetworkElement::PhaseShifter { mode, phase_rad } => Element::PhaseShifter { phi: phase_rad, mode },
        }
    }

    fn input_name(&self, k: usize) -> String {
        match self {
            NetworkElement::BeamSplitter { .. } => format!("element_{k}_transmittance"),
            NetworkElement::PhaseShifter { .. } => format!("element_{k}_phase_rad"),
        }
    }

    fn value(&self) -> f64 {
        match *self {
            NetworkElement::BeamSplitter { transmittance, .. } => transmittance,
            NetworkElement::PhaseShifter { phase_rad, .. } => phase_rad,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BosonParams {
    pub modes: usize,
    /// Applied in order, one element per layer.
    pub elements: Vec<NetworkElement>,
    pub input: Vec<usize>,
    pub detector_efficiency: f64,
}

impl Default for BosonParams {
    fn default() -> Self {
        let bs = |i: usize, t: f64| NetworkElement::BeamSplitter {
            modes: [i, i + 1],
            transmittance: t,
        };
        BosonParams {
            modes: 4,
            elements: vec![bs(0, 0.33), bs(1, 0.67), bs(2, 0.5), bs(0, 0.5), bs(1, 0.5), bs(2, 0.5)],
            input: vec![1, 1, 1, 1],
            detector_efficiency: 0.85,
        }
    }
}

pub fn network(p: &BosonParams) -> SimResult<Network> {
    let layers = p.elements.iter().map(|e| vec![e.to_element()]).collect();
    Ok(Network::new(p.modes, layers)?)
}

pub fn total_variation(a: &[(Vec<usize>, f64)], b: &[(Vec<usize>, f64)]) -> f64 {
    0.5 * a.iter().zip(b).map(|(x, y)| (x.1 - y.1).abs()).sum::<f64>()
}

pub fn simulate(p: &BosonParams) -> SimResult<MetricSet> {
    if p.modes == 0 || p.modes > MAX_MODES {
        return Err(SimError::Precondition(format!("modes must be in 1..={MAX_MODES}, got {}", p.modes)));
    }
    if p.input.len() != p.modes {
        return Err(SimError::Precondition(format!(
            "input has {} entries for {} modes",
            p.input.len(),
            p.modes
        )));
    }
    let photons: usize = p.input.iter().sum();
    if photons == 0 || photons > MAX_PHOTONS {
        return Err(SimError::Precondition(format!("photon number must be in 1..={MAX_PHOTONS}, got {photons}")));
    }
    check_range("detector_efficiency", p.detector_efficiency, 0.0, 1.0, "[0, 1]")?;
    for e in &p.elements {
        if let NetworkElement::BeamSplitter { transmittance, .. } = e {
            check_range("transmittance", *transmittance, 0.0, 1.0, "[0, 1]")?;
        }
    }
    let net = network(p)?;
    let evolved = net.evolution_distribution(&p.input)?;
    let permanents = net.permanent_distribution(&p.input)?;
    if evolved.iter().zip(&permanents).any(|(a, b)| a.0 != b.0) {
        return Err(SimError::Quantum(QError::NonFinite("outcome ordering")));
    }

    let (basis, u) = net.fock_unitary(photons)?;
    let state = basis.state(&p.input)?.evolve(&u)?;
    let rho = state.density();
    let mut mean_total = 0.0;
    for mode in 0..p.modes {
        mean_total += rho.expectation(&basis.number_operator(mode)?)?;
    }

    let probs: Vec<f64> = evolved.iter().map(|x| x.1).collect();
    let collision: f64 = probs.iter().map(|q| q * q).sum();
    let bunching: f64 = evolved.iter().filter(|(cfg, _)| cfg.iter().any(|&n| n > 1)).map(|x| x.1).sum();
    let entropy: f64 = probs.iter().filter(|&&q| q > 0.0).map(|q| -q * q.log2()).sum();
    let overlap: f64 = evolved.iter().zip(&permanents).map(|(a, b)| (a.1 * b.1).max(0.0).sqrt()).sum();

    let mut m = MetricSet::default();
    m.set("tv_distance", total_variation(&evolved, &permanents));
    m.set("distribution_fidelity", overlap * overlap);
    m.set("purity", rho.purity());
    m.set("photon_number_deviation", (mean_total - photons as f64).abs());
    m.set("probability_sum", probs.iter().sum::<f64>());
    m.set("bunching_probability", bunching);
    m.set("collision_probability", collision);
    m.set("shannon_entropy_bits", entropy);
    m.set("effective_dimension", 1.0 / collision);
    m.set("num_outcomes", probs.len() as f64);
    m.set("detection_fourfold", p.detector_efficiency.powi(photons as i32));
    let outcomes: Vec<f64> = (0..probs.len()).map(|k| k as f64).collect();
    m.series("output_distribution", "outcome_index", outcomes, probs);
    for (k, e) in p.elements.iter().enumerate() {
        m.input(e.input_name(k), e.value());
    }
    m.input("detector_efficiency", p.detector_efficiency);
    m.input("photons", photons as f64);
    m.note("outcome_index follows lexicographic order of occupation patterns, first mode largest first");
    m.note("detection_fourfold is the all-detector efficiency product, eta^n");
    Ok(m)
}

/// Mode pair from a label ending in two digits, e.g. "... 23" → (1, 2).
fn label_modes(label: &str) -> Option<[usize; 2]> {
    let digits: Vec<usize> = label
        .split_whitespace()
        .last()?
        .chars()
        .map(|ch| ch.to_digit(10).map(|d| d as usize))
        .collect::<Option<_>>()?;
    match digits[..] {
        [a, b] if a >= 1 && b >= 1 && a != b => Some([a - 1, b - 1]),
        _ => None,
    }
}

/// Mode index from a label ending in "Mode k".
fn label_mode(label: &str) -> Option<usize> {
    let k: usize = label.split_whitespace().last()?.parse().ok()?;
    k.checked_sub(1)
}

pub(super) fn bind(b: &mut Binder) -> BosonParams {
    let mut p = BosonParams::default();
    let setup = b.setup();
    let mut elements = Vec::new();
    let mut sources = Vec::new();
    for stage in ["l1", "network beam splitter", "l2", "output beam splitter"] {
        for c in &setup.components {
            let element = if stage.starts_with('l') {
                if c.kind != ComponentKind::Modulation || !label_has(c, &format!(" {stage} ")) {
                    continue;
                }
                match (label_mode(&c.label), c.param("phase_deg")) {
                    (Some(mode), Some(deg)) => NetworkElement::PhaseShifter {
                        mode,
                        phase_rad: deg.to_radians(),
                    },
                    _ => continue,
                }
            } else {
                if !label_has(c, stage) {
                    continue;
                }
                match (label_modes(&c.label), c.param("transmittivity")) {
                    (Some(modes), Some(t)) => NetworkElement::BeamSplitter { modes, transmittance: t },
                    _ => continue,
                }
            };
            elements.push(element);
            sources.push(c.id.clone());
        }
    }
    let max_mode = elements
        .iter()
        .map(|e| match e {
            NetworkElement::BeamSplitter { modes, .. } => modes[0].max(modes[1]),
            NetworkElement::PhaseShifter { mode, .. } => *mode,
        })
        .max();
    if let Some(max_mode) = max_mode.filter(|&m| m < MAX_MODES) {
        if elements.iter().any(|e| matches!(e, NetworkElement::BeamSplitter { .. })) {
            p.modes = max_mode + 1;
            p.input = vec![1; p.modes];
            for (k, (e, id)) in elements.iter().zip(&sources).enumerate() {
                b.push(&e.input_name(k), e.value(), id);
            }
            p.elements = elements;
        }
    }
    b.detector_efficiency(&mut p.detector_efficiency);
    p
}
