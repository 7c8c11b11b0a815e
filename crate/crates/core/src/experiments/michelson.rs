//! Two-beam interference with one arm scanned by a piezo mirror.

use serde::{Deserialize, Serialize};

use super::metric_set::contrast;
use super::{check_positive, check_range, label_has, Binder, MetricSet, SimError, SimResult, LIGHT_SPEED, PLANCK};
use crate::optical_model::ComponentKind;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MichelsonParams {
    pub wavelength_nm: f64,
    pub power_mw: f64,
    pub reflectivity_m1: f64,
    pub reflectivity_m2: f64,
    pub bs_transmittance: f64,
    /// Scan length in fringe periods, sampled uniformly per period.
    pub fringes: usize,
    pub points_per_fringe: usize,
}

impl Default for MichelsonParams {
    fn default() -> Self {
        MichelsonParams {
            wavelength_nm: 632.8,
            power_mw: 5.0,
            reflectivity_m1: 0.99,
            reflectivity_m2: 0.99,
            bs_transmittance: 0.5,
            fringes: 8,
            points_per_fringe: 80,
        }
    }
}

/// Output power (mW) at mirror displacement `d_nm`:
/// P·R·T·(R1 + R2 + 2√(R1R2)·cos(4πd/λ)).
pub fn intensity(p: &MichelsonParams, d_nm: f64) -> f64 {
    let t = p.bs_transmittance;
    let (r1, r2) = (p.reflectivity_m1, p.reflectivity_m2);
    let phase = 4.0 * std::f64::consts::PI * d_nm / p.wavelength_nm;
    p.power_mw * t * (1.0 - t) * (r1 + r2 + 2.0 * (r1 * r2).sqrt() * phase.cos())
}

/// Photons per second in a beam of `power_mw` at `wavelength_nm`.
pub fn photon_flux(power_mw: f64, wavelength_nm: f64) -> f64 {
    power_mw * 1e-3 * wavelength_nm * 1e-9 / (PLANCK * LIGHT_SPEED)
}

/// Peak positions refined by a parabola through each local maximum and its
/// neighbours.
fn peak_positions(x: &[f64], y: &[f64]) -> Vec<f64> {
    let mut peaks = Vec::new();
    for k in 1..y.len().saturating_sub(1) {
        if y[k] > y[k - 1] && y[k] >= y[k + 1] {
            let denom = y[k - 1] - 2.0 * y[k] + y[k + 1];
            let shift = if denom == 0.0 { 0.0 } else { 0.5 * (y[k - 1] - y[k + 1]) / denom };
            peaks.push(x[k] + shift * (x[k + 1] - x[k]));
        }
    }
    peaks
}

pub fn simulate(p: &MichelsonParams) -> SimResult<MetricSet> {
    check_positive("wavelength_nm", p.wavelength_nm)?;
    check_range("power_mw", p.power_mw, 0.0, f64::MAX, "[0, inf)")?;
    for (name, v) in [
        ("reflectivity_m1", p.reflectivity_m1),
        ("reflectivity_m2", p.reflectivity_m2),
        ("bs_transmittance", p.bs_transmittance),
    ] {
        check_range(name, v, 0.0, 1.0, "[0, 1]")?;
    }
    if p.fringes == 0 || p.points_per_fringe < 3 {
        return Err(SimError::EmptyScan("displacement"));
    }
    let n = p.fringes * p.points_per_fringe;
    let step = 0.5 * p.wavelength_nm / p.points_per_fringe as f64;
    let d: Vec<f64> = (0..=n).map(|k| k as f64 * step).collect();
    let i: Vec<f64> = d.iter().map(|&x| intensity(p, x)).collect();

    let peaks = peak_positions(&d, &i);
    let period = if peaks.len() >= 2 {
        (peaks[peaks.len() - 1] - peaks[0]) / (peaks.len() - 1) as f64
    } else {
        0.0
    };
    let measured = contrast(&i);

    let mut m = MetricSet::default();
    m.set("fringe_period_nm", period);
    m.set("contrast", measured);
    m.set("visibility", measured);
    m.set("photon_flux", photon_flux(p.power_mw, p.wavelength_nm));
    m.set("max_intensity_mw", i.iter().copied().fold(f64::NEG_INFINITY, f64::max));
    m.series("intensity_vs_displacement", "displacement_nm", d, i);
    m.input("wavelength_nm", p.wavelength_nm);
    m.input("power_mw", p.power_mw);
    m.input("reflectivity_m1", p.reflectivity_m1);
    m.input("reflectivity_m2", p.reflectivity_m2);
    m.input("bs_transmittance", p.bs_transmittance);
    m.note("fringe period measured from interpolated peak positions of the scan");
    Ok(m)
}

pub(super) fn bind(b: &mut Binder) -> MichelsonParams {
    let mut p = MichelsonParams::default();
    b.bind("wavelength_nm", "wavelength_nm", |c| c.kind == ComponentKind::Source, |v| v, &mut p.wavelength_nm);
    b.bind("power_mw", "power_mW", |c| c.kind == ComponentKind::Source, |v| v, &mut p.power_mw);
    b.bind("bs_transmittance", "transmittivity", |c| label_has(c, "splitter"), |v| v, &mut p.bs_transmittance);
    let mirrors: Vec<(String, f64)> = b
        .setup()
        .components
        .iter()
        .filter(|c| label_has(c, "mirror"))
        .filter_map(|c| c.param("reflectivity").map(|r| (c.id.clone(), r)))
        .collect();
    if let Some((id, r)) = mirrors.first() {
        p.reflectivity_m1 = *r;
        b.push("reflectivity_m1", *r, id);
    }
    if let Some((id, r)) = mirrors.get(1) {
        p.reflectivity_m2 = *r;
        b.push("reflectivity_m2", *r, id);
    }
    p
}
