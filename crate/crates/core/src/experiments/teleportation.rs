//! Polarization-qubit teleportation through a shared |Φ+⟩ pair.
//!
//! Alice's input |ψ⟩ = cos θ|H⟩ + sin θ|V⟩ is qubit 0, the pair is qubits 1
//! and 2. A Bell measurement on qubits 0 and 1 leaves Bob's qubit 2 in
//! σ|ψ⟩, undone with I, σz, σx or σxσz.

use qcore::linalg::{self, c, identity, pauli_x, pauli_z, CMatrix, CVector};
use qcore::metrics::Bell;
use qcore::{partial_trace, tensor, QuantumState, Structure};
use serde::{Deserialize, Serialize};

use super::bell_spdc::fmt_angle;
use super::{check_range, label_has, Binder, MetricSet, SimError, SimResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TeleportationParams {
    pub input_angles_deg: Vec<f64>,
    pub hom_visibility: f64,
    pub detector_efficiency: f64,
}

impl Default for TeleportationParams {
    fn default() -> Self {
        TeleportationParams {
            input_angles_deg: vec![0.0, 30.0, 45.0, 60.0, 90.0],
            hom_visibility: 0.95,
            detector_efficiency: 0.7,
        }
    }
}

/// Pauli correction Bob applies for each Bell outcome.
pub fn correction(outcome: Bell) -> CMatrix {
    match outcome {
        Bell::PhiPlus => identity(2),
        Bell::PhiMinus => pauli_z(),
        Bell::PsiPlus => pauli_x(),
        Bell::PsiMinus => pauli_z() * pauli_x(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub outcome: Bell,
    pub probability: f64,
    pub fidelity: f64,
}

/// Runs the protocol on an arbitrary normalized qubit and returns the four
/// measurement branches.
pub fn teleport(psi: &QuantumState) -> SimResult<Vec<Branch>> {
    if psi.dim() != 2 {
        return Err(SimError::Precondition("input must be a single qubit".into()));
    }
    let rho = tensor(psi, &Bell::PhiPlus.state()).density();
    Bell::ALL
        .iter()
        .map(|&outcome| {
            let proj = linalg::kron(&outcome.state().density().matrix().clone(), &identity(2));
            let probability = rho.expectation(&proj)?;
            let collapsed = &proj * rho.matrix() * &proj / c(probability, 0.0);
            let collapsed = qcore::DensityMatrix::new(linalg::hermitize(&collapsed), Structure::Qubits(3))?;
            let bob = partial_trace(&collapsed, &[2])?.evolve(&correction(outcome))?;
            Ok(Branch {
                outcome,
                probability,
                fidelity: bob.fidelity_with(psi)?,
            })
        })
        .collect()
}

pub fn input_state(theta_deg: f64) -> SimResult<QuantumState> {
    let t = theta_deg.to_radians();
    Ok(QuantumState::new(CVector::from_vec(vec![c(t.cos(), 0.0), c(t.sin(), 0.0)]), Structure::Qubits(1))?)
}

pub fn simulate(p: &TeleportationParams) -> SimResult<MetricSet> {
    check_range("hom_visibility", p.hom_visibility, 0.0, 1.0, "[0, 1]")?;
    check_range("detector_efficiency", p.detector_efficiency, 0.0, 1.0, "[0, 1]")?;
    if p.input_angles_deg.is_empty() {
        return Err(SimError::EmptyScan("input angles"));
    }
    let mut m = MetricSet::default();
    let mut fidelities = Vec::new();
    let mut bell_sum = [0.0; 4];
    for &deg in &p.input_angles_deg {
        if !deg.is_finite() {
            return Err(SimError::Precondition(format!("input angle {deg} is not finite")));
        }
        let branches = teleport(&input_state(deg)?)?;
        let avg: f64 = branches.iter().map(|b| b.probability * b.fidelity).sum();
        for (k, b) in branches.iter().enumerate() {
            bell_sum[k] += b.probability;
            fidelities.push(b.fidelity);
        }
        m.set(format!("fidelity_{}deg", fmt_angle(deg)), avg);
    }
    let n = p.input_angles_deg.len() as f64;
    m.set("ideal_fidelity_mean", fidelities.iter().sum::<f64>() / fidelities.len() as f64);
    m.set("ideal_fidelity_min", fidelities.iter().copied().fold(f64::INFINITY, f64::min));
    for (k, outcome) in Bell::ALL.iter().enumerate() {
        m.set(format!("bell_probability_{}", outcome.name()), bell_sum[k] / n);
    }
    m.set("coincidence_efficiency", p.detector_efficiency.powi(2));
    m.set("realistic_fidelity", p.hom_visibility);
    m.input("hom_visibility", p.hom_visibility);
    m.input("detector_efficiency", p.detector_efficiency);
    if let Some(&first) = p.input_angles_deg.first() {
        m.input("input_angle_deg", first);
    }
    m.note("bell probabilities averaged over input angles");
    m.note("realistic fidelity taken equal to the HOM visibility of the Bell-state measurement");
    Ok(m)
}

pub(super) fn bind(b: &mut Binder) -> TeleportationParams {
    let mut p = TeleportationParams::default();
    b.bind("hom_visibility", "hom_visibility", |_| true, |v| v, &mut p.hom_visibility);
    b.detector_efficiency(&mut p.detector_efficiency);
    let mut angle = f64::NAN;
    b.bind("input_angle_deg", "angle_deg", |c| label_has(c, "encoder"), |v| v, &mut angle);
    if angle.is_finite() {
        p.input_angles_deg.retain(|&a| a != angle);
        p.input_angles_deg.insert(0, angle);
    }
    p
}
