//! Single-photon sum-frequency conversion with a strong undepleted pump.
//!
//! Replacing the pump operator by its amplitude α leaves the beam-splitter
//! coupling H = κ(a†_SFG a_s + a_s† a_SFG) with κ = g|α|. Mode 0 is the
//! signal, mode 1 the converted output.

use qcore::linalg::expm_i_hermitian;
use qcore::{g2_zero, partial_trace, FockBasis};
use serde::{Deserialize, Serialize};

use super::metric_set::linspace;
use super::{check_positive, check_range, label_has, Binder, MetricSet, SimError, SimResult};
use crate::optical_model::ComponentKind;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConversionParams {
    pub coupling_g: f64,
    pub pump_amplitude: f64,
    pub interaction_time: f64,
    /// Per-mode photon cutoff.
    pub cutoff: usize,
    pub signal_wavelength_nm: f64,
    pub pump_wavelength_nm: f64,
    /// Efficiencies after the crystal: coupling, fiber, detector.
    pub efficiencies: Vec<f64>,
    pub time_points: usize,
}

impl Default for ConversionParams {
    fn default() -> Self {
        ConversionParams {
            coupling_g: 0.3,
            pump_amplitude: 10.0,
            interaction_time: 1.0,
            cutoff: 2,
            signal_wavelength_nm: 1550.0,
            pump_wavelength_nm: 980.0,
            efficiencies: vec![0.85, 0.75, 0.75],
            time_points: 101,
        }
    }
}

/// 1/λ_out = 1/λ_s + 1/λ_p.
pub fn output_wavelength(signal_nm: f64, pump_nm: f64) -> f64 {
    1.0 / (1.0 / signal_nm + 1.0 / pump_nm)
}

pub struct Evolved {
    pub conversion: f64,
    pub g2: f64,
    pub total_photons: f64,
}

pub fn evolve(p: &ConversionParams, t: f64) -> SimResult<Evolved> {
    let basis = FockBasis::cutoff(2, p.cutoff);
    let kappa = p.coupling_g * p.pump_amplitude.abs();
    let h = (basis.hop(1, 0)? + basis.hop(0, 1)?) * qcore::linalg::c(kappa, 0.0);
    let u = expm_i_hermitian(&h, -t);
    let rho = basis.state(&[1, 0])?.evolve(&u)?.density();
    let n_s = rho.expectation(&basis.number_operator(0)?)?;
    let n_out = rho.expectation(&basis.number_operator(1)?)?;
    let sfg = partial_trace(&rho, &[1])?;
    Ok(Evolved {
        conversion: n_out,
        g2: g2_zero(&sfg, 0)?,
        total_photons: n_s + n_out,
    })
}

pub fn simulate(p: &ConversionParams) -> SimResult<MetricSet> {
    check_range("coupling_g", p.coupling_g, 0.0, f64::MAX, "[0, inf)")?;
    check_range("interaction_time", p.interaction_time, 0.0, f64::MAX, "[0, inf)")?;
    check_range("pump_amplitude", p.pump_amplitude, f64::MIN, f64::MAX, "finite")?;
    check_positive("signal_wavelength_nm", p.signal_wavelength_nm)?;
    check_positive("pump_wavelength_nm", p.pump_wavelength_nm)?;
    for &e in &p.efficiencies {
        check_range("efficiencies", e, 0.0, 1.0, "[0, 1]")?;
    }
    if p.cutoff < 2 {
        return Err(SimError::Precondition(format!("cutoff must be at least 2, got {}", p.cutoff)));
    }
    if p.time_points < 2 {
        return Err(SimError::EmptyScan("interaction time"));
    }
    let kappa = p.coupling_g * p.pump_amplitude.abs();
    let at_t = evolve(p, p.interaction_time)?;
    let chain: f64 = p.efficiencies.iter().product();

    let t_end = if kappa > 0.0 { std::f64::consts::PI / kappa } else { 1.0 };
    let times = linspace(0.0, t_end, p.time_points);
    let curve: Vec<f64> = times.iter().map(|&t| evolve(p, t).map(|e| e.conversion)).collect::<SimResult<_>>()?;

    let mut m = MetricSet::default();
    m.set("output_wavelength_nm", output_wavelength(p.signal_wavelength_nm, p.pump_wavelength_nm));
    m.set("conversion_efficiency", at_t.conversion);
    m.set("conversion_analytic", (kappa * p.interaction_time).sin().powi(2));
    m.set("total_efficiency", at_t.conversion * chain);
    m.set("g2_zero", at_t.g2);
    m.set("photon_conservation_residual", at_t.total_photons - 1.0);
    m.set("coupling_kappa", kappa);
    m.series("conversion_vs_time", "interaction_time", times, curve);
    m.input("coupling_g", p.coupling_g);
    m.input("pump_amplitude", p.pump_amplitude);
    m.input("interaction_time", p.interaction_time);
    m.input("signal_wavelength_nm", p.signal_wavelength_nm);
    m.input("pump_wavelength_nm", p.pump_wavelength_nm);
    for (k, &e) in p.efficiencies.iter().enumerate() {
        m.input(format!("efficiency_{k}"), e);
    }
    m.note("undepleted pump; single signal photon input");
    Ok(m)
}

pub(super) fn bind(b: &mut Binder) -> ConversionParams {
    let mut p = ConversionParams::default();
    let is_pump = |c: &crate::optical_model::Component| c.kind == ComponentKind::Source && label_has(c, "pump");
    b.bind("signal_wavelength_nm", "wavelength_nm", |c| c.kind == ComponentKind::Source && !label_has(c, "pump"), |v| v, &mut p.signal_wavelength_nm);
    b.bind("pump_wavelength_nm", "wavelength_nm", is_pump, |v| v, &mut p.pump_wavelength_nm);
    let chain: Vec<(String, f64)> = b
        .setup()
        .components
        .iter()
        .filter(|c| c.kind == ComponentKind::PassiveOptics || c.kind == ComponentKind::Detector)
        .filter_map(|c| c.param("efficiency").map(|e| (c.id.clone(), e)))
        .collect();
    if !chain.is_empty() {
        p.efficiencies = chain.iter().map(|x| x.1).collect();
        for (k, (id, e)) in chain.iter().enumerate() {
            b.push(&format!("efficiency_{k}"), *e, id);
        }
    }
    p
}
