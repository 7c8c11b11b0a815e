//! Single-photon amplitudes through two beam splitters with a phase in the
//! upper arm.
//!
//! Mode 0 is the upper arm. With the splitter convention of `qcore`, φ = 0
//! sends everything to output mode 1, which is detector 1.

use qcore::linalg::{c, CVector};
use qcore::Element;
use serde::{Deserialize, Serialize};

use super::metric_set::{contrast, linspace};
use super::{check_range, label_has, Binder, MetricSet, SimError, SimResult};
use crate::optical_model::ComponentKind;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MachZehnderParams {
    pub power_mw: f64,
    pub bs1_transmittance: f64,
    pub bs2_transmittance: f64,
    /// Power transmission of the upper and lower arms.
    pub upper_arm_transmission: f64,
    pub lower_arm_transmission: f64,
    pub detector_efficiency: f64,
    pub phase_points: usize,
    pub phase_start_rad: f64,
    pub phase_end_rad: f64,
}

impl Default for MachZehnderParams {
    fn default() -> Self {
        MachZehnderParams {
            power_mw: 5.0,
            bs1_transmittance: 0.5,
            bs2_transmittance: 0.5,
            upper_arm_transmission: 1.0,
            lower_arm_transmission: 1.0,
            detector_efficiency: 0.85,
            phase_points: 200,
            phase_start_rad: 0.0,
            phase_end_rad: 2.0 * std::f64::consts::PI,
        }
    }
}

/// Output probabilities (detector 1, detector 2) at phase φ.
pub fn output_probabilities(p: &MachZehnderParams, phi: f64) -> (f64, f64) {
    let bs1 = Element::splitter_with_transmittance(p.bs1_transmittance, (0, 1)).mode_matrix(2);
    let bs2 = Element::splitter_with_transmittance(p.bs2_transmittance, (0, 1)).mode_matrix(2);
    let input = CVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)]);
    let mut a = bs1 * input;
    a[0] *= c(0.0, phi).exp() * p.upper_arm_transmission.sqrt();
    a[1] *= p.lower_arm_transmission.sqrt();
    let out = bs2 * a;
    (out[1].norm_sqr(), out[0].norm_sqr())
}

pub fn simulate(p: &MachZehnderParams) -> SimResult<MetricSet> {
    for (name, v) in [
        ("bs1_transmittance", p.bs1_transmittance),
        ("bs2_transmittance", p.bs2_transmittance),
        ("upper_arm_transmission", p.upper_arm_transmission),
        ("lower_arm_transmission", p.lower_arm_transmission),
        ("detector_efficiency", p.detector_efficiency),
    ] {
        check_range(name, v, 0.0, 1.0, "[0, 1]")?;
    }
    check_range("power_mw", p.power_mw, 0.0, f64::MAX, "[0, inf)")?;
    if p.phase_points == 0 {
        return Err(SimError::EmptyScan("phase"));
    }
    let phases = linspace(p.phase_start_rad, p.phase_end_rad, p.phase_points);
    let scale = p.power_mw * p.detector_efficiency;
    let (i1, i2): (Vec<f64>, Vec<f64>) = phases
        .iter()
        .map(|&phi| {
            let (a, b) = output_probabilities(p, phi);
            (scale * a, scale * b)
        })
        .unzip();
    let sums: Vec<f64> = i1.iter().zip(&i2).map(|(a, b)| a + b).collect();
    let mean = sums.iter().sum::<f64>() / sums.len() as f64;
    let deviation = sums.iter().map(|s| (s - mean).abs()).fold(0.0, f64::max);

    let mut m = MetricSet::default();
    m.set("visibility_d1", contrast(&i1));
    m.set("visibility_d2", contrast(&i2));
    m.set("intensity_sum_deviation", deviation);
    m.set("mean_total_intensity_mw", mean);
    m.series("intensity_d1", "phase_rad", phases.clone(), i1);
    m.series("intensity_d2", "phase_rad", phases, i2);
    m.input("power_mw", p.power_mw);
    m.input("bs1_transmittance", p.bs1_transmittance);
    m.input("bs2_transmittance", p.bs2_transmittance);
    m.input("detector_efficiency", p.detector_efficiency);
    m.note("intensities in mW at the detectors; detector 1 is bright at zero phase");
    Ok(m)
}

pub(super) fn bind(b: &mut Binder) -> MachZehnderParams {
    let mut p = MachZehnderParams::default();
    b.bind("power_mw", "power_mW", |c| c.kind == ComponentKind::Source, |v| v, &mut p.power_mw);
    let splitters: Vec<(String, f64)> = b
        .setup()
        .components
        .iter()
        .filter(|c| label_has(c, "bs") || label_has(c, "splitter"))
        .filter_map(|c| c.param("transmittivity").map(|t| (c.id.clone(), t)))
        .collect();
    if let Some((id, t)) = splitters.first() {
        p.bs1_transmittance = *t;
        b.push("bs1_transmittance", *t, id);
    }
    if let Some((id, t)) = splitters.get(1) {
        p.bs2_transmittance = *t;
        b.push("bs2_transmittance", *t, id);
    }
    b.detector_efficiency(&mut p.detector_efficiency);
    p
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_phase_goes_to_detector_one() {
        let (d1, d2) = output_probabilities(&MachZehnderParams::default(), 0.0);
        assert!((d1 - 1.0).abs() < 1e-15 && d2 < 1e-15);
    }
}
