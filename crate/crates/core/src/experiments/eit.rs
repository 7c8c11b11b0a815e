//! Electromagnetically induced transparency in a Λ system.
//!
//! Levels |1⟩, |2⟩ (ground) and |3⟩ (excited) are indices 0, 1, 2. The probe
//! drives 1↔3 with Rabi frequency Ω_p and detuning δ_p, the coupling drives
//! 2↔3 with Ω_c and δ_c. In the rotating frame
//! H = −δ_p|3⟩⟨3| − (δ_p − δ_c)|2⟩⟨2| + Ω_p/2 (|3⟩⟨1| + h.c.) + Ω_c/2 (|3⟩⟨2| + h.c.).
//! |3⟩ decays to each ground state at Γ/2, and the ground coherence dephases
//! through the jump √(2γ)|2⟩⟨2|. All rates share one frequency unit (MHz).

use qcore::linalg::{c, CMatrix, CVector};
use qcore::lindblad::residual_norm;
use qcore::{lindblad_steady_state, CollapseOperator, DensityMatrix, QuantumState, Structure};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::metric_set::linspace;
use super::{check_positive, check_range, label_has, Binder, MetricSet, SimError, SimResult};
use crate::optical_model::ComponentKind;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EitParams {
    pub omega_p_mhz: f64,
    pub omega_c_mhz: f64,
    pub gamma_mhz: f64,
    pub gamma_deph_mhz: f64,
    pub delta_c_mhz: f64,
    pub atomic_density_per_cm3: f64,
    pub cell_length_mm: f64,
    pub wavelength_nm: f64,
    /// Resonant cross-section; 3λ²/2π when absent.
    pub cross_section_cm2: Option<f64>,
    pub scan_half_width_mhz: f64,
    pub scan_points: usize,
    pub detector_efficiency: f64,
}

impl Default for EitParams {
    fn default() -> Self {
        EitParams {
            omega_p_mhz: 26.5,
            omega_c_mhz: 265.0,
            gamma_mhz: 6.0,
            gamma_deph_mhz: 0.1,
            delta_c_mhz: 0.0,
            atomic_density_per_cm3: 16030.0,
            cell_length_mm: 75.0,
            wavelength_nm: 795.0,
            cross_section_cm2: None,
            scan_half_width_mhz: 200.0,
            scan_points: 401,
            detector_efficiency: 0.8,
        }
    }
}

impl EitParams {
    pub fn cross_section(&self) -> f64 {
        self.cross_section_cm2.unwrap_or_else(|| {
            let lambda_cm = self.wavelength_nm * 1e-7;
            3.0 * lambda_cm * lambda_cm / (2.0 * std::f64::consts::PI)
        })
    }

    /// n σ₀ L, the optical depth of a weak probe on a bare two-level line.
    pub fn od_resonant(&self) -> f64 {
        self.atomic_density_per_cm3 * self.cross_section() * self.cell_length_mm * 0.1
    }
}

fn ket_bra(i: usize, j: usize) -> CMatrix {
    let mut m = CMatrix::zeros(3, 3);
    m[(i, j)] = c(1.0, 0.0);
    m
}

pub fn hamiltonian(p: &EitParams, delta_p: f64) -> CMatrix {
    let mut h = ket_bra(2, 2) * c(-delta_p, 0.0) + ket_bra(1, 1) * c(-(delta_p - p.delta_c_mhz), 0.0);
    h += (ket_bra(2, 0) + ket_bra(0, 2)) * c(p.omega_p_mhz / 2.0, 0.0);
    h += (ket_bra(2, 1) + ket_bra(1, 2)) * c(p.omega_c_mhz / 2.0, 0.0);
    h
}

pub fn collapse_operators(p: &EitParams) -> Vec<CollapseOperator> {
    vec![
        CollapseOperator::new(ket_bra(0, 2), p.gamma_mhz / 2.0),
        CollapseOperator::new(ket_bra(1, 2), p.gamma_mhz / 2.0),
        CollapseOperator::new(ket_bra(1, 1), 2.0 * p.gamma_deph_mhz),
    ]
}

/// (Ω_c|1⟩ − Ω_p|2⟩)/√(Ω_c² + Ω_p²), decoupled from the excited state.
pub fn dark_state(p: &EitParams) -> SimResult<QuantumState> {
    Ok(QuantumState::normalized(
        CVector::from_vec(vec![c(p.omega_c_mhz, 0.0), c(-p.omega_p_mhz, 0.0), c(0.0, 0.0)]),
        Structure::Qudits(vec![3]),
    )?)
}

pub struct SteadyPoint {
    pub rho: DensityMatrix,
    pub residual: f64,
}

pub fn steady_state(p: &EitParams, delta_p: f64) -> SimResult<SteadyPoint> {
    let h = hamiltonian(p, delta_p);
    let ops = collapse_operators(p);
    let raw = lindblad_steady_state(&h, &ops)?;
    let rho = DensityMatrix::new(raw.matrix().clone(), Structure::Qudits(vec![3]))?;
    let residual = residual_norm(&h, &ops, &rho);
    Ok(SteadyPoint { rho, residual })
}

/// Probe optical depth from the steady-state coherence ρ₃₁.
pub fn optical_depth(p: &EitParams, rho: &DensityMatrix) -> f64 {
    -p.od_resonant() * (p.gamma_mhz / p.omega_p_mhz) * rho.matrix()[(2, 0)].im
}

pub fn simulate(p: &EitParams) -> SimResult<MetricSet> {
    check_positive("gamma_mhz", p.gamma_mhz)?;
    check_positive("omega_p_mhz", p.omega_p_mhz)?;
    check_range("omega_c_mhz", p.omega_c_mhz, 0.0, f64::MAX, "[0, inf)")?;
    check_range("gamma_deph_mhz", p.gamma_deph_mhz, 0.0, f64::MAX, "[0, inf)")?;
    check_range("atomic_density_per_cm3", p.atomic_density_per_cm3, 0.0, f64::MAX, "[0, inf)")?;
    check_range("cell_length_mm", p.cell_length_mm, 0.0, f64::MAX, "[0, inf)")?;
    check_positive("wavelength_nm", p.wavelength_nm)?;
    check_range("detector_efficiency", p.detector_efficiency, 0.0, 1.0, "[0, 1]")?;
    if p.scan_points == 0 {
        return Err(SimError::EmptyScan("probe detuning"));
    }
    let detunings = if p.scan_points == 1 {
        vec![0.0]
    } else {
        linspace(-p.scan_half_width_mhz, p.scan_half_width_mhz, p.scan_points)
    };
    let scan: Vec<SteadyPoint> = detunings
        .par_iter()
        .map(|&d| steady_state(p, d))
        .collect::<SimResult<_>>()?;
    let transmission: Vec<f64> = scan.iter().map(|s| (-optical_depth(p, &s.rho)).exp()).collect();
    let max_residual = scan.iter().map(|s| s.residual).fold(0.0, f64::max);

    let resonance = steady_state(p, p.delta_c_mhz)?;
    let od_on = optical_depth(p, &resonance.rho);
    let t_on = (-od_on).exp();
    // reference: the same probe on the bare, power-broadened two-level line
    let s = 2.0 * p.omega_p_mhz.powi(2) / p.gamma_mhz.powi(2);
    let t_off = (-p.od_resonant() / (1.0 + s)).exp();

    let mut m = MetricSet::default();
    m.set("dark_state_fidelity", resonance.rho.fidelity_with(&dark_state(p)?)?);
    m.set("rho12_abs", resonance.rho.matrix()[(0, 1)].norm());
    m.set("excited_population", resonance.rho.matrix()[(2, 2)].re);
    m.set("trace", resonance.rho.populations().iter().sum::<f64>());
    m.set("od_resonant", p.od_resonant());
    m.set("od_line_center", od_on);
    m.set("transmission_on", t_on);
    m.set("transmission_off", t_off);
    m.set("transparency_contrast", (t_on - t_off) / t_off);
    m.set("max_residual", max_residual.max(resonance.residual));
    m.set("detected_transmission_on", p.detector_efficiency * t_on);
    m.series("transmission_vs_detuning", "probe_detuning_mhz", detunings, transmission);
    m.input("omega_p_mhz", p.omega_p_mhz);
    m.input("omega_c_mhz", p.omega_c_mhz);
    m.input("gamma_mhz", p.gamma_mhz);
    m.input("gamma_deph_mhz", p.gamma_deph_mhz);
    m.input("atomic_density_per_cm3", p.atomic_density_per_cm3);
    m.input("cell_length_mm", p.cell_length_mm);
    m.input("wavelength_nm", p.wavelength_nm);
    m.input("detector_efficiency", p.detector_efficiency);
    m.note("transmission_off uses the coupling-free two-level line with the same probe saturation");
    Ok(m)
}

pub(super) fn bind(b: &mut Binder) -> EitParams {
    let mut p = EitParams::default();
    b.bind("omega_p_mhz", "rabi_frequency_mhz", |c| label_has(c, "probe"), |v| v, &mut p.omega_p_mhz);
    b.bind("omega_c_mhz", "rabi_frequency_mhz", |c| label_has(c, "coupling"), |v| v, &mut p.omega_c_mhz);
    b.bind("wavelength_nm", "wavelength_nm", |c| c.kind == ComponentKind::Source && label_has(c, "probe"), |v| v, &mut p.wavelength_nm);
    b.bind("atomic_density_per_cm3", "atomic_density_per_cm3", |_| true, |v| v, &mut p.atomic_density_per_cm3);
    b.bind("cell_length_mm", "length_mm", |c| label_has(c, "cell"), |v| v, &mut p.cell_length_mm);
    b.detector_efficiency(&mut p.detector_efficiency);
    p
}
