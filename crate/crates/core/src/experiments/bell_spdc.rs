//! Polarization-entangled pairs (|HV⟩ + |VH⟩)/√2 analysed by two polarizers.

use qcore::linalg::{c, CVector};
use qcore::metrics::{polarizer_observable, Bell};
use qcore::{chsh_value, partial_trace, state_metrics, ChshSettings, DensityMatrix, Structure};
use serde::{Deserialize, Serialize};

use super::metric_set::{contrast, linspace};
use super::{check_range, Binder, MetricSet, SimResult};

/// CHSH settings for |Ψ+⟩ with the polarizer observable cos2θ Z + sin2θ X.
pub const PSI_PLUS_SETTINGS: ChshSettings = ChshSettings {
    a: std::f64::consts::FRAC_PI_4,
    a_prime: 0.0,
    b: -5.0 * std::f64::consts::PI / 8.0,
    b_prime: -7.0 * std::f64::consts::PI / 8.0,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BellParams {
    /// Fraction of the ideal state in a white-noise mixture.
    pub state_visibility: f64,
    pub detector_efficiency: f64,
    /// Alice's fixed polarizer settings; one series per angle.
    pub alice_angles_deg: Vec<f64>,
    pub bob_points: usize,
}

impl Default for BellParams {
    fn default() -> Self {
        BellParams {
            state_visibility: 1.0,
            detector_efficiency: 0.65,
            alice_angles_deg: vec![0.0, 45.0, 90.0, 135.0],
            bob_points: 37,
        }
    }
}

fn projector(theta: f64) -> qcore::linalg::CMatrix {
    let v = CVector::from_vec(vec![c(theta.cos(), 0.0), c(theta.sin(), 0.0)]);
    qcore::linalg::projector(&v)
}

/// Probability that both photons pass polarizers at `a` and `b` (radians).
pub fn coincidence_probability(rho: &DensityMatrix, a: f64, b: f64) -> SimResult<f64> {
    let op = qcore::linalg::kron(&projector(a), &projector(b));
    Ok(rho.expectation(&op)?)
}

pub fn state(p: &BellParams) -> SimResult<DensityMatrix> {
    let pure = Bell::PsiPlus.state().density();
    let noise = DensityMatrix::maximally_mixed(Structure::Qubits(2));
    Ok(DensityMatrix::mixture(&[(p.state_visibility, &pure), (1.0 - p.state_visibility, &noise)])?)
}

pub fn simulate(p: &BellParams) -> SimResult<MetricSet> {
    check_range("state_visibility", p.state_visibility, 0.0, 1.0, "[0, 1]")?;
    check_range("detector_efficiency", p.detector_efficiency, 0.0, 1.0, "[0, 1]")?;
    let rho = state(p)?;
    let target = Bell::PsiPlus.state();
    let sm = state_metrics(&rho, Some(&target))?;
    let reduced = partial_trace(&rho, &[0])?;

    let mut m = MetricSet::default();
    m.set("fidelity", sm.fidelity.unwrap_or(0.0));
    m.set("purity", sm.purity);
    m.set("entanglement_entropy", reduced.entropy());
    m.set("concurrence", sm.concurrence.unwrap_or(0.0));
    m.set("chsh", chsh_value(&rho, &PSI_PLUS_SETTINGS)?);
    m.set("coincidence_efficiency", p.detector_efficiency.powi(2));
    m.set("coincidence_both_zero", coincidence_probability(&rho, 0.0, 0.0)?);

    let bob = linspace(0.0, 180.0, p.bob_points.max(2));
    let mut diag_visibility = None;
    for &a in &p.alice_angles_deg {
        let values: Vec<f64> = bob
            .iter()
            .map(|&b| coincidence_probability(&rho, a.to_radians(), b.to_radians()))
            .collect::<SimResult<_>>()?;
        if diag_visibility.is_none() && (a.rem_euclid(90.0) - 45.0).abs() < 1e-9 {
            diag_visibility = Some(contrast(&values));
        }
        m.series(format!("coincidence_alice_{}", fmt_angle(a)), "bob_angle_deg", bob.clone(), values);
    }
    let visibility = match diag_visibility {
        Some(v) => v,
        None => {
            let values: Vec<f64> = bob
                .iter()
                .map(|&b| coincidence_probability(&rho, std::f64::consts::FRAC_PI_4, b.to_radians()))
                .collect::<SimResult<_>>()?;
            contrast(&values)
        }
    };
    m.set("visibility", visibility);
    m.set("correlation_zz", rho.expectation(&qcore::linalg::kron(&polarizer_observable(0.0), &polarizer_observable(0.0)))?);
    m.input("state_visibility", p.state_visibility);
    m.input("detector_efficiency", p.detector_efficiency);
    m.note("visibility measured in the diagonal basis (Alice at 45 degrees)");
    Ok(m)
}

pub(crate) fn fmt_angle(deg: f64) -> String {
    if deg.fract() == 0.0 {
        format!("{}", deg as i64)
    } else {
        format!("{deg}").replace('.', "p")
    }
}

pub(super) fn bind(b: &mut Binder) -> BellParams {
    let mut p = BellParams::default();
    b.detector_efficiency(&mut p.detector_efficiency);
    p
}
