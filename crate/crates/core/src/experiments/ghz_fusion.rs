//! Three-photon GHZ state (|VVH⟩ + |HHV⟩)/√2 from fusing two pairs on a
//! polarizing beam splitter.
//!
//! Imperfect two-photon interference leaves the coherence between the two
//! terms at p = V_HOM · overlap, giving
//! ρ = p|GHZ⟩⟨GHZ| + (1 − p)(|VVH⟩⟨VVH| + |HHV⟩⟨HHV|)/2 and F = (1 + p)/2.

use qcore::linalg::{c, kron_all, CMatrix};
use qcore::metrics::cat_state;
use qcore::{ghz_witness, optimize_mermin, state_metrics, DensityMatrix, QuantumState};
use serde::{Deserialize, Serialize};

use super::{check_range, label_has, Binder, MetricSet, SimResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GhzParams {
    pub hom_visibility: f64,
    pub mode_overlap: f64,
    /// Heralded fusion success per attempt; scales the GHZ rate only.
    pub fusion_success_probability: f64,
    pub detector_efficiency: f64,
}

impl Default for GhzParams {
    fn default() -> Self {
        GhzParams {
            hom_visibility: 0.95,
            mode_overlap: 0.90,
            fusion_success_probability: 0.428,
            detector_efficiency: 0.7,
        }
    }
}

pub fn target() -> QuantumState {
    cat_state(&[1, 1, 0], &[0, 0, 1])
}

pub fn state(coherence: f64) -> SimResult<DensityMatrix> {
    let pure = target().density();
    let dephased = DensityMatrix::mixture(&[
        (0.5, &QuantumState::qubits(&[1, 1, 0]).density()),
        (0.5, &QuantumState::qubits(&[0, 0, 1]).density()),
    ])?;
    Ok(DensityMatrix::mixture(&[(coherence, &pure), (1.0 - coherence, &dephased)])?)
}

fn hadamard() -> CMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    CMatrix::from_row_slice(2, 2, &[c(h, 0.0), c(h, 0.0), c(h, 0.0), c(-h, 0.0)])
}

fn bits(k: usize) -> String {
    format!("{:03b}", k)
}

/// Outcome probabilities in the computational (Z) and diagonal (X) bases,
/// indexed by the three-bit outcome.
pub fn zzz_xxx(rho: &DensityMatrix) -> SimResult<(Vec<f64>, Vec<f64>)> {
    let h = hadamard();
    let rotated = rho.evolve(&kron_all(&[h.clone(), h.clone(), h]))?;
    Ok((rho.populations(), rotated.populations()))
}

pub fn simulate(p: &GhzParams) -> SimResult<MetricSet> {
    for (name, v) in [
        ("hom_visibility", p.hom_visibility),
        ("mode_overlap", p.mode_overlap),
        ("fusion_success_probability", p.fusion_success_probability),
        ("detector_efficiency", p.detector_efficiency),
    ] {
        check_range(name, v, 0.0, 1.0, "[0, 1]")?;
    }
    let coherence = p.hom_visibility * p.mode_overlap;
    let rho = state(coherence)?;
    let sm = state_metrics(&rho, Some(&target()))?;
    let (zzz, xxx) = zzz_xxx(&rho)?;
    let (mermin, _) = optimize_mermin(&rho)?;

    let mut m = MetricSet::default();
    m.set("fidelity", sm.fidelity.unwrap_or(0.0));
    m.set("purity", sm.purity);
    m.set("witness", ghz_witness(&rho, &target())?);
    m.set("mermin", mermin.abs());
    m.set("coherence", coherence);
    for k in 0..8 {
        m.set(format!("p_zzz_{}", bits(k)), zzz[k]);
        m.set(format!("p_xxx_{}", bits(k)), xxx[k]);
    }
    m.set("threefold_efficiency", p.detector_efficiency.powi(3));
    m.set("ghz_rate_fraction", p.fusion_success_probability * p.detector_efficiency.powi(3));
    m.input("hom_visibility", p.hom_visibility);
    m.input("mode_overlap", p.mode_overlap);
    m.input("fusion_success_probability", p.fusion_success_probability);
    m.input("detector_efficiency", p.detector_efficiency);
    m.note("bit order: photon 1 most significant; H = 0, V = 1");
    m.note("mermin maximized over equatorial settings");
    Ok(m)
}

pub(super) fn bind(b: &mut Binder) -> GhzParams {
    let mut p = GhzParams::default();
    b.bind("hom_visibility", "hom_visibility", |c| label_has(c, "fusion"), |v| v, &mut p.hom_visibility);
    b.bind("mode_overlap", "mode_overlap", |c| label_has(c, "fusion"), |v| v, &mut p.mode_overlap);
    b.detector_efficiency(&mut p.detector_efficiency);
    p
}
