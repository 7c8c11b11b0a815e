//! Fidelity, entropy, entanglement monotones, Bell-type correlators and
//! photon statistics.

use std::f64::consts::{FRAC_PI_4, FRAC_PI_8, PI};

use crate::fock::FockBasis;
use crate::linalg::{self, c, CMatrix};
use crate::state::{partial_trace, DensityMatrix, QuantumState, Structure};
use crate::{QError, QResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Bell {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl Bell {
    pub const ALL: [Bell; 4] = [Bell::PhiPlus, Bell::PhiMinus, Bell::PsiPlus, Bell::PsiMinus];

    pub fn state(self) -> QuantumState {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let z = c(0.0, 0.0);
        let amps = match self {
            Bell::PhiPlus => [c(h, 0.0), z, z, c(h, 0.0)],
            Bell::PhiMinus => [c(h, 0.0), z, z, c(-h, 0.0)],
            Bell::PsiPlus => [z, c(h, 0.0), c(h, 0.0), z],
            Bell::PsiMinus => [z, c(h, 0.0), c(-h, 0.0), z],
        };
        QuantumState::from_slice(&amps, Structure::Qubits(2)).expect("normalized")
    }

    pub fn name(self) -> &'static str {
        match self {
            Bell::PhiPlus => "phi_plus",
            Bell::PhiMinus => "phi_minus",
            Bell::PsiPlus => "psi_plus",
            Bell::PsiMinus => "psi_minus",
        }
    }
}

/// (|a⟩ + |b⟩)/√2 for two qubit bit strings of equal length.
pub fn cat_state(a: &[u8], b: &[u8]) -> QuantumState {
    assert_eq!(a.len(), b.len(), "bit strings must have equal length");
    let sa = QuantumState::qubits(a);
    let sb = QuantumState::qubits(b);
    QuantumState::normalized(sa.amplitudes() + sb.amplitudes(), Structure::Qubits(a.len()))
        .expect("distinct basis states")
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateMetrics {
    pub fidelity: Option<f64>,
    pub purity: f64,
    pub von_neumann_entropy: f64,
    pub concurrence: Option<f64>,
}

pub fn state_metrics(rho: &DensityMatrix, reference: Option<&QuantumState>) -> QResult<StateMetrics> {
    let fidelity = reference.map(|psi| rho.fidelity_with(psi)).transpose()?;
    let concurrence = if rho.dim() == 4 && rho.structure() == &Structure::Qubits(2) {
        Some(concurrence(rho)?)
    } else {
        None
    };
    Ok(StateMetrics {
        fidelity,
        purity: rho.purity().min(1.0),
        von_neumann_entropy: rho.entropy(),
        concurrence,
    })
}

/// Wootters concurrence of a two-qubit state.
pub fn concurrence(rho: &DensityMatrix) -> QResult<f64> {
    if rho.dim() != 4 {
        return Err(QError::DimensionMismatch {
            expected: 4,
            got: rho.dim(),
        });
    }
    let yy = linalg::kron(&linalg::pauli_y(), &linalg::pauli_y());
    let m = rho.matrix();
    let tilde = &yy * m.conjugate() * &yy;
    let s = linalg::sqrtm_psd(m);
    let mut lambdas: Vec<f64> = linalg::eigvalsh(&(&s * tilde * &s))
        .into_iter()
        .map(|x| x.max(0.0).sqrt())
        .collect();
    lambdas.sort_by(|a, b| b.total_cmp(a));
    Ok((lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).clamp(0.0, 1.0))
}

/// Linear polarizer at angle θ as a ±1 observable: cos2θ Z + sin2θ X.
pub fn polarizer_observable(theta: f64) -> CMatrix {
    let (s, co) = (2.0 * theta).sin_cos();
    linalg::pauli_z() * c(co, 0.0) + linalg::pauli_x() * c(s, 0.0)
}

/// Equatorial observable cos φ X + sin φ Y (phase-sensitive analyzers).
pub fn equatorial_observable(phi: f64) -> CMatrix {
    let (s, co) = phi.sin_cos();
    linalg::pauli_x() * c(co, 0.0) + linalg::pauli_y() * c(s, 0.0)
}

/// ⟨O₁ ⊗ O₂ ⊗ …⟩.
pub fn correlation(rho: &DensityMatrix, ops: &[CMatrix]) -> QResult<f64> {
    rho.expectation(&linalg::kron_all(ops))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChshSettings {
    pub a: f64,
    pub a_prime: f64,
    pub b: f64,
    pub b_prime: f64,
}

impl ChshSettings {
    /// Polarizer angles reaching 2√2 on |Φ+⟩.
    pub const PHI_PLUS_OPTIMAL: ChshSettings = ChshSettings {
        a: FRAC_PI_4,
        a_prime: 0.0,
        b: FRAC_PI_8,
        b_prime: 3.0 * FRAC_PI_8,
    };
}

/// S = E(a,b) + E(a,b′) + E(a′,b) − E(a′,b′) with polarizer observables.
pub fn chsh_value(rho: &DensityMatrix, s: &ChshSettings) -> QResult<f64> {
    chsh_value_with(rho, s, polarizer_observable)
}

pub fn chsh_value_with(
    rho: &DensityMatrix,
    s: &ChshSettings,
    observable: impl Fn(f64) -> CMatrix,
) -> QResult<f64> {
    if rho.dim() != 4 {
        return Err(QError::DimensionMismatch {
            expected: 4,
            got: rho.dim(),
        });
    }
    let e = |x: f64, y: f64| correlation(rho, &[observable(x), observable(y)]);
    Ok(e(s.a, s.b)? + e(s.a, s.b_prime)? + e(s.a_prime, s.b)? - e(s.a_prime, s.b_prime)?)
}

/// Equatorial analyzer phases for the three parties, index 0 ↦ setting 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MerminSettings {
    pub a: [f64; 2],
    pub b: [f64; 2],
    pub c: [f64; 2],
}

fn check_three_qubits(rho: &DensityMatrix) -> QResult<()> {
    if rho.dim() != 8 {
        return Err(QError::DimensionMismatch {
            expected: 8,
            got: rho.dim(),
        });
    }
    Ok(())
}

/// M = ⟨A₁B₁C₁⟩ − ⟨A₁B₂C₂⟩ − ⟨A₂B₁C₂⟩ − ⟨A₂B₂C₁⟩.
pub fn mermin_value(rho: &DensityMatrix, s: &MerminSettings) -> QResult<f64> {
    check_three_qubits(rho)?;
    let e = |x: f64, y: f64, z: f64| {
        correlation(
            rho,
            &[equatorial_observable(x), equatorial_observable(y), equatorial_observable(z)],
        )
    };
    Ok(e(s.a[0], s.b[0], s.c[0])?
        - e(s.a[0], s.b[1], s.c[1])?
        - e(s.a[1], s.b[0], s.c[1])?
        - e(s.a[1], s.b[1], s.c[0])?)
}

/// Maximizes |M| over equatorial settings: exhaustive search over multiples
/// of π/8, then coordinate refinement. Returns the signed value.
pub fn optimize_mermin(rho: &DensityMatrix) -> QResult<(f64, MerminSettings)> {
    check_three_qubits(rho)?;
    const K: usize = 16;
    let angles: Vec<f64> = (0..K).map(|k| k as f64 * 2.0 * PI / K as f64).collect();
    let obs: Vec<CMatrix> = angles.iter().map(|&p| equatorial_observable(p)).collect();

    let mut table = vec![0.0; K * K * K];
    for i in 0..K {
        for j in 0..K {
            let ij = linalg::kron(&obs[i], &obs[j]);
            for k in 0..K {
                table[(i * K + j) * K + k] = rho.expectation(&linalg::kron(&ij, &obs[k]))?;
            }
        }
    }
    let e = |i: usize, j: usize, k: usize| table[(i * K + j) * K + k];

    let mut best = (f64::NEG_INFINITY, [0usize; 6]);
    for a1 in 0..K {
        for a2 in 0..K {
            for b1 in 0..K {
                for b2 in 0..K {
                    for c1 in 0..K {
                        let p = e(a1, b1, c1) - e(a2, b2, c1);
                        for c2 in 0..K {
                            let m = p - e(a1, b2, c2) - e(a2, b1, c2);
                            if m.abs() > best.0 {
                                best = (m.abs(), [a1, a2, b1, b2, c1, c2]);
                            }
                        }
                    }
                }
            }
        }
    }

    let mut x: [f64; 6] = best.1.map(|k| angles[k]);
    let to_settings = |x: &[f64; 6]| MerminSettings {
        a: [x[0], x[1]],
        b: [x[2], x[3]],
        c: [x[4], x[5]],
    };
    let mut value = mermin_value(rho, &to_settings(&x))?;
    let mut step = PI / K as f64;
    while step > 1e-9 {
        let mut improved = false;
        for d in 0..6 {
            for sign in [1.0, -1.0] {
                let mut y = x;
                y[d] += sign * step;
                let v = mermin_value(rho, &to_settings(&y))?;
                if v.abs() > value.abs() + 1e-15 {
                    x = y;
                    value = v;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    Ok((value, to_settings(&x)))
}

/// Fidelity-based witness ½ − ⟨ψ|ρ|ψ⟩; negative certifies genuine
/// multipartite entanglement for GHZ-class targets.
pub fn ghz_witness(rho: &DensityMatrix, target: &QuantumState) -> QResult<f64> {
    Ok(0.5 - rho.fidelity_with(target)?)
}

/// g²(0) = ⟨a†a†aa⟩ / ⟨a†a⟩², taken as 0 for vacuum.
pub fn g2_zero(rho: &DensityMatrix, mode: usize) -> QResult<f64> {
    let basis = FockBasis::for_structure(rho.structure())?;
    if mode >= basis.modes() {
        return Err(QError::ModeOutOfRange {
            index: mode,
            modes: basis.modes(),
        });
    }
    let (mut n1, mut n2) = (0.0, 0.0);
    for (p, cfg) in rho.populations().iter().zip(basis.configs()) {
        let n = cfg[mode] as f64;
        n1 += p * n;
        n2 += p * n * (n - 1.0);
    }
    if n1.abs() < 1e-300 {
        return Ok(0.0);
    }
    Ok(n2 / (n1 * n1))
}

/// Number of non-negligible Schmidt coefficients across the cut `keep | rest`.
pub fn schmidt_number(psi: &QuantumState, keep: &[usize]) -> QResult<usize> {
    let reduced = partial_trace(&psi.density(), keep)?;
    Ok(linalg::eigvalsh(reduced.matrix())
        .into_iter()
        .filter(|&x| x > 1e-9)
        .count())
}

pub fn entanglement_entropy(psi: &QuantumState, keep: &[usize]) -> QResult<f64> {
    Ok(partial_trace(&psi.density(), keep)?.entropy())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bell_metrics() {
        let rho = Bell::PhiPlus.state().density();
        let m = state_metrics(&rho, Some(&Bell::PhiPlus.state())).unwrap();
        assert!((m.fidelity.unwrap() - 1.0).abs() < 1e-12);
        assert!((m.purity - 1.0).abs() < 1e-12);
        assert!(m.von_neumann_entropy.abs() < 1e-9);
        assert!((m.concurrence.unwrap() - 1.0).abs() < 1e-9);
        let s = chsh_value(&rho, &ChshSettings::PHI_PLUS_OPTIMAL).unwrap();
        assert!((s - 2.0 * 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn product_state_has_no_concurrence() {
        let rho = QuantumState::qubits(&[0, 0]).density();
        assert!(concurrence(&rho).unwrap() < 1e-9);
        assert!(concurrence(&QuantumState::qubits(&[0]).density()).is_err());
    }

    #[test]
    fn mixed_qubit_entropy() {
        let rho = DensityMatrix::maximally_mixed(Structure::Qubits(1));
        assert!((rho.entropy() - 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn ideal_ghz_mermin_is_four() {
        let rho = cat_state(&[1, 1, 0], &[0, 0, 1]).density();
        let (m, _) = optimize_mermin(&rho).unwrap();
        assert!((m.abs() - 4.0).abs() < 1e-6);
    }

    #[test]
    fn witness_is_half_minus_fidelity() {
        let ghz = cat_state(&[1, 1, 0], &[0, 0, 1]);
        assert!((ghz_witness(&ghz.density(), &ghz).unwrap() + 0.5).abs() < 1e-12);
    }

    #[test]
    fn g2_of_single_photon_is_zero() {
        let rho = crate::fock::number_state(1, 3).unwrap().density();
        assert_eq!(g2_zero(&rho, 0).unwrap(), 0.0);
        let vac = crate::fock::number_state(0, 3).unwrap().density();
        assert_eq!(g2_zero(&vac, 0).unwrap(), 0.0);
        assert!(g2_zero(&QuantumState::qubits(&[0]).density(), 0).is_err());
    }
}
