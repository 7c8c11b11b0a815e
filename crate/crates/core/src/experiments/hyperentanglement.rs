//! Pairs entangled in polarization and orbital angular momentum at once,
//! each degree of freedom a qubit in |Φ+⟩.
//!
//! Qubit order is (A_pol, B_pol, A_oam, B_oam).

use qcore::metrics::Bell;
use qcore::{chsh_value, concurrence, partial_trace, state_metrics, ChshSettings, DensityMatrix, Structure};
use serde::{Deserialize, Serialize};

use super::{check_range, Binder, MetricSet, SimResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HyperParams {
    pub visibility_pol: f64,
    pub visibility_oam: f64,
    pub detector_efficiency: f64,
}

impl Default for HyperParams {
    fn default() -> Self {
        HyperParams {
            visibility_pol: 1.0,
            visibility_oam: 1.0,
            detector_efficiency: 0.7,
        }
    }
}

fn werner(v: f64) -> SimResult<DensityMatrix> {
    Ok(DensityMatrix::mixture(&[
        (v, &Bell::PhiPlus.state().density()),
        (1.0 - v, &DensityMatrix::maximally_mixed(Structure::Qubits(2))),
    ])?)
}

/// Number of non-zero eigenvalues of the reduced state of photon A.
pub fn schmidt_rank(rho: &DensityMatrix) -> SimResult<usize> {
    let reduced = partial_trace(rho, &[0, 2])?;
    Ok(qcore::linalg::eigvalsh(reduced.matrix()).into_iter().filter(|&x| x > 1e-9).count())
}

pub fn simulate(p: &HyperParams) -> SimResult<MetricSet> {
    check_range("visibility_pol", p.visibility_pol, 0.0, 1.0, "[0, 1]")?;
    check_range("visibility_oam", p.visibility_oam, 0.0, 1.0, "[0, 1]")?;
    check_range("detector_efficiency", p.detector_efficiency, 0.0, 1.0, "[0, 1]")?;
    let pol = werner(p.visibility_pol)?;
    let oam = werner(p.visibility_oam)?;
    let joint = pol.tensor(&oam);
    let target = Bell::PhiPlus.state();

    let mut m = MetricSet::default();
    for (name, rho) in [("pol", &pol), ("oam", &oam)] {
        let sm = state_metrics(rho, Some(&target))?;
        m.set(format!("fidelity_{name}"), sm.fidelity.unwrap_or(0.0));
        m.set(format!("concurrence_{name}"), concurrence(rho)?);
        m.set(format!("chsh_{name}"), chsh_value(rho, &ChshSettings::PHI_PLUS_OPTIMAL)?);
    }
    m.set("schmidt_number", schmidt_rank(&joint)? as f64);
    m.set("marginal_purity_a", partial_trace(&joint, &[0, 2])?.purity());
    m.set("purity", joint.purity());
    for (k, prob) in joint.populations().iter().enumerate() {
        m.set(format!("p_fourfold_{:04b}", k), *prob);
    }
    m.set("fourfold_efficiency", p.detector_efficiency.powi(4));
    m.input("visibility_pol", p.visibility_pol);
    m.input("visibility_oam", p.visibility_oam);
    m.input("detector_efficiency", p.detector_efficiency);
    m.note("fourfold outcome bits ordered (A_pol, B_pol, A_oam, B_oam)");
    Ok(m)
}

pub(super) fn bind(b: &mut Binder) -> HyperParams {
    let mut p = HyperParams::default();
    b.detector_efficiency(&mut p.detector_efficiency);
    p
}
