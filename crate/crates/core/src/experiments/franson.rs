//! Energy-time entanglement through two unbalanced interferometers.
//!
//! Post-selected on the central coincidence peak the pair is
//! (|EE⟩ + |LL⟩)/√2, dephased to visibility V. Each interferometer projects
//! its time-bin qubit onto (|E⟩ + e^{iφ}|L⟩)/√2.

use qcore::linalg::{c, CVector};
use qcore::metrics::{chsh_value_with, equatorial_observable};
use qcore::{concurrence, partial_trace, ChshSettings, DensityMatrix, QuantumState, Structure};
use serde::{Deserialize, Serialize};

use super::metric_set::{contrast, linspace};
use super::{check_positive, check_range, Binder, MetricSet, SimError, SimResult, LIGHT_SPEED, PLANCK};
use crate::optical_model::ComponentKind;

/// Equatorial settings reaching 2√2·V for correlations V·cos(φ_S + φ_I).
pub const SUM_PHASE_SETTINGS: ChshSettings = ChshSettings {
    a: 0.0,
    a_prime: std::f64::consts::FRAC_PI_2,
    b: -std::f64::consts::FRAC_PI_4,
    b_prime: std::f64::consts::FRAC_PI_4,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FransonParams {
    pub visibility: f64,
    /// Interferometer imbalance Δt.
    pub delay_ps: f64,
    pub photon_coherence_ps: f64,
    pub pump_coherence_ps: f64,
    pub pump_power_mw: f64,
    pub pump_wavelength_nm: f64,
    /// Pairs per pump photon.
    pub pair_efficiency: f64,
    pub detector_efficiency: f64,
    pub phase_points: usize,
}

impl Default for FransonParams {
    fn default() -> Self {
        FransonParams {
            visibility: std::f64::consts::FRAC_1_SQRT_2,
            delay_ps: 100.0,
            photon_coherence_ps: 1.0,
            pump_coherence_ps: 1e9,
            pump_power_mw: 50.0,
            pump_wavelength_nm: 405.0,
            pair_efficiency: 1e-11,
            detector_efficiency: 0.5,
            phase_points: 37,
        }
    }
}

fn analyzer(phi: f64) -> qcore::linalg::CMatrix {
    let v = CVector::from_vec(vec![c(1.0, 0.0), c(0.0, phi).exp()]) / c(2f64.sqrt(), 0.0);
    qcore::linalg::projector(&v)
}

pub fn state(visibility: f64) -> SimResult<DensityMatrix> {
    let ee_ll = QuantumState::normalized(
        CVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]),
        Structure::Qubits(2),
    )?
    .density();
    let dephased = DensityMatrix::mixture(&[(0.5, &QuantumState::qubits(&[0, 0]).density()), (0.5, &QuantumState::qubits(&[1, 1]).density())])?;
    Ok(DensityMatrix::mixture(&[(visibility, &ee_ll), (1.0 - visibility, &dephased)])?)
}

pub fn simulate(p: &FransonParams) -> SimResult<MetricSet> {
    check_range("visibility", p.visibility, 0.0, 1.0, "[0, 1]")?;
    check_range("detector_efficiency", p.detector_efficiency, 0.0, 1.0, "[0, 1]")?;
    check_positive("delay_ps", p.delay_ps)?;
    check_positive("photon_coherence_ps", p.photon_coherence_ps)?;
    check_positive("pump_coherence_ps", p.pump_coherence_ps)?;
    if p.delay_ps <= p.photon_coherence_ps {
        return Err(SimError::Precondition(format!(
            "Franson condition: interferometer delay {} ps must exceed the single-photon coherence time {} ps",
            p.delay_ps, p.photon_coherence_ps
        )));
    }
    if p.delay_ps >= p.pump_coherence_ps {
        return Err(SimError::Precondition(format!(
            "Franson condition: interferometer delay {} ps must be shorter than the pump coherence time {} ps",
            p.delay_ps, p.pump_coherence_ps
        )));
    }
    if p.phase_points == 0 {
        return Err(SimError::EmptyScan("phase"));
    }
    let rho = state(p.visibility)?;
    let signal = partial_trace(&rho, &[0])?;
    let phases = linspace(0.0, 2.0 * std::f64::consts::PI, p.phase_points);

    let singles: Vec<f64> = phases
        .iter()
        .map(|&phi| signal.expectation(&analyzer(phi)))
        .collect::<Result<_, _>>()?;
    let mut grid = Vec::with_capacity(phases.len() * phases.len());
    for &ps in &phases {
        for &pi in &phases {
            grid.push(rho.expectation(&qcore::linalg::kron(&analyzer(ps), &analyzer(pi)))?);
        }
    }
    let vs_signal: Vec<f64> = phases
        .iter()
        .map(|&ps| rho.expectation(&qcore::linalg::kron(&analyzer(ps), &analyzer(0.0))))
        .collect::<Result<_, _>>()?;
    let pair_rate = p.pump_power_mw * 1e-3 * p.pump_wavelength_nm * 1e-9 / (PLANCK * LIGHT_SPEED) * p.pair_efficiency;

    let mut m = MetricSet::default();
    m.set("single_visibility", contrast(&singles));
    m.set("coincidence_visibility", contrast(&grid));
    m.set("chsh", chsh_value_with(&rho, &SUM_PHASE_SETTINGS, equatorial_observable)?);
    m.set("concurrence", concurrence(&rho)?);
    m.set("pair_rate", pair_rate);
    m.set("coincidence_rate", pair_rate * p.detector_efficiency.powi(2) / 4.0);
    m.series("single_vs_phase", "phase_rad", phases.clone(), singles);
    m.series("coincidence_vs_signal_phase", "phase_rad", phases, vs_signal);
    m.input("visibility", p.visibility);
    m.input("delay_ps", p.delay_ps);
    m.input("photon_coherence_ps", p.photon_coherence_ps);
    m.input("pump_coherence_ps", p.pump_coherence_ps);
    m.input("pump_power_mw", p.pump_power_mw);
    m.input("pump_wavelength_nm", p.pump_wavelength_nm);
    m.input("detector_efficiency", p.detector_efficiency);
    m.note("coincidence series at idler phase 0; the full grid depends only on the phase sum");
    Ok(m)
}

pub(super) fn bind(b: &mut Binder) -> FransonParams {
    let mut p = FransonParams::default();
    b.bind("delay_ps", "path_difference_mm", |_| true, |mm| mm * 1e-3 / LIGHT_SPEED * 1e12, &mut p.delay_ps);
    b.bind("photon_coherence_ps", "coherence_time_ps", |c| c.kind == ComponentKind::Crystal, |v| v, &mut p.photon_coherence_ps);
    b.bind("pump_coherence_ps", "linewidth_hz", |c| c.kind == ComponentKind::Source, |hz| 1e12 / hz, &mut p.pump_coherence_ps);
    b.bind("pump_power_mw", "power_mW", |c| c.kind == ComponentKind::Source, |v| v, &mut p.pump_power_mw);
    b.bind("pump_wavelength_nm", "wavelength_nm", |c| c.kind == ComponentKind::Source, |v| v, &mut p.pump_wavelength_nm);
    b.detector_efficiency(&mut p.detector_efficiency);
    p
}
