//! Fock bases and the bosonic operators built on them.

use std::collections::HashMap;

use crate::linalg::{self, c, CMatrix, CVector, C64};
use crate::state::{DensityMatrix, QuantumState, Structure};
use crate::{QError, QResult};

/// Number of ways to place `n` indistinguishable photons in `m` modes.
pub fn multiset_count(m: usize, n: usize) -> usize {
    if m == 0 {
        return usize::from(n == 0);
    }
    // C(n + m - 1, m - 1), built incrementally so each step stays integral
    let k = m - 1;
    (1..=k).fold(1usize, |acc, i| acc * (n + i) / i)
}

/// All occupation tuples of `m` modes with `n` photons in total, in
/// lexicographically descending order.
pub fn fock_enumerate(m: usize, n: usize) -> Vec<Vec<usize>> {
    fn rec(m: usize, n: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if m == 1 {
            prefix.push(n);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for first in (0..=n).rev() {
            prefix.push(first);
            rec(m - 1, n - first, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::with_capacity(multiset_count(m, n));
    if m == 0 {
        if n == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    rec(m, n, &mut Vec::with_capacity(m), &mut out);
    out
}

#[derive(Debug, Clone)]
pub struct FockBasis {
    structure: Structure,
    configs: Vec<Vec<usize>>,
    index: HashMap<Vec<usize>, usize>,
}

impl FockBasis {
    pub fn block(modes: usize, photons: usize) -> Self {
        Self::from_configs(
            Structure::FockBlock { modes, photons },
            fock_enumerate(modes, photons),
        )
    }

    /// Truncated basis in tensor-product order (mode 0 most significant).
    pub fn cutoff(modes: usize, cutoff: usize) -> Self {
        let d = cutoff + 1;
        let total = d.pow(modes as u32);
        let configs = (0..total)
            .map(|mut i| {
                let mut cfg = vec![0; modes];
                for slot in cfg.iter_mut().rev() {
                    *slot = i % d;
                    i /= d;
                }
                cfg
            })
            .collect();
        Self::from_configs(Structure::FockCutoff { modes, cutoff }, configs)
    }

    pub fn for_structure(structure: &Structure) -> QResult<Self> {
        match *structure {
            Structure::FockBlock { modes, photons } => Ok(Self::block(modes, photons)),
            Structure::FockCutoff { modes, cutoff } => Ok(Self::cutoff(modes, cutoff)),
            _ => Err(QError::NotFock),
        }
    }

    fn from_configs(structure: Structure, configs: Vec<Vec<usize>>) -> Self {
        let index = configs
            .iter()
            .enumerate()
            .map(|(i, c)| (c.clone(), i))
            .collect();
        FockBasis {
            structure,
            configs,
            index,
        }
    }

    pub fn structure(&self) -> &Structure {
        &self.structure
    }

    pub fn modes(&self) -> usize {
        match self.structure {
            Structure::FockBlock { modes, .. } | Structure::FockCutoff { modes, .. } => modes,
            _ => unreachable!("fock basis always carries a fock structure"),
        }
    }

    pub fn len(&self) -> usize {
        self.configs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.configs.is_empty()
    }

    pub fn configs(&self) -> &[Vec<usize>] {
        &self.configs
    }

    pub fn index_of(&self, config: &[usize]) -> Option<usize> {
        self.index.get(config).copied()
    }

    pub fn state(&self, config: &[usize]) -> QResult<QuantumState> {
        let idx = self
            .index_of(config)
            .ok_or(QError::DimensionMismatch {
                expected: self.modes(),
                got: config.len(),
            })?;
        QuantumState::basis(self.structure.clone(), idx)
    }

    fn check_mode(&self, mode: usize) -> QResult<()> {
        let modes = self.modes();
        if mode < modes {
            Ok(())
        } else {
            Err(QError::ModeOutOfRange { index: mode, modes })
        }
    }

    /// Occupation of `mode` as a diagonal matrix.
    pub fn number_operator(&self, mode: usize) -> QResult<CMatrix> {
        self.check_mode(mode)?;
        let diag = CVector::from_iterator(
            self.len(),
            self.configs.iter().map(|cfg| c(cfg[mode] as f64, 0.0)),
        );
        Ok(CMatrix::from_diagonal(&diag))
    }

    /// a_i† a_j restricted to this basis.
    pub fn hop(&self, i: usize, j: usize) -> QResult<CMatrix> {
        self.check_mode(i)?;
        self.check_mode(j)?;
        let n = self.len();
        let mut m = CMatrix::zeros(n, n);
        for (col, cfg) in self.configs.iter().enumerate() {
            if cfg[j] == 0 {
                continue;
            }
            let mut out = cfg.clone();
            let amp = if i == j {
                cfg[j] as f64
            } else {
                out[j] -= 1;
                out[i] += 1;
                ((cfg[i] + 1) as f64 * cfg[j] as f64).sqrt()
            };
            if let Some(row) = self.index_of(&out) {
                m[(row, col)] += c(amp, 0.0);
            }
        }
        Ok(m)
    }

    /// Annihilation operator of `mode`; only closed on a truncated basis.
    pub fn annihilation(&self, mode: usize) -> QResult<CMatrix> {
        if !matches!(self.structure, Structure::FockCutoff { .. }) {
            return Err(QError::NotFock);
        }
        self.check_mode(mode)?;
        let n = self.len();
        let mut m = CMatrix::zeros(n, n);
        for (col, cfg) in self.configs.iter().enumerate() {
            if cfg[mode] == 0 {
                continue;
            }
            let mut out = cfg.clone();
            out[mode] -= 1;
            let row = self.index_of(&out).expect("lowering stays in the cutoff basis");
            m[(row, col)] = c((cfg[mode] as f64).sqrt(), 0.0);
        }
        Ok(m)
    }
}

/// exp(iθ(a_i†a_j + a_i a_j†)) on the given basis. On a single photon this
/// is the mode matrix [[cos θ, i sin θ], [i sin θ, cos θ]].
pub fn beam_splitter_unitary(theta: f64, modes: (usize, usize), basis: &FockBasis) -> QResult<CMatrix> {
    let (i, j) = modes;
    basis.check_mode(i)?;
    basis.check_mode(j)?;
    if i == j {
        return Err(QError::SameMode(i));
    }
    let t = basis.hop(i, j)?;
    let h = &t + t.adjoint();
    Ok(linalg::expm_i_hermitian(&h, theta))
}

/// exp(iφ n̂_mode).
pub fn phase_shifter_unitary(phi: f64, mode: usize, basis: &FockBasis) -> QResult<CMatrix> {
    basis.check_mode(mode)?;
    let diag = CVector::from_iterator(
        basis.len(),
        basis
            .configs()
            .iter()
            .map(|cfg| C64::from_polar(1.0, phi * cfg[mode] as f64)),
    );
    Ok(CMatrix::from_diagonal(&diag))
}

/// Single-mode number state |n⟩ truncated at `cutoff`.
pub fn number_state(n: usize, cutoff: usize) -> QResult<QuantumState> {
    QuantumState::basis(Structure::FockCutoff { modes: 1, cutoff }, n)
}

/// Coherent state |α⟩ truncated at `cutoff` and renormalized.
pub fn coherent_state(alpha: C64, cutoff: usize) -> QResult<QuantumState> {
    let mut amp = Vec::with_capacity(cutoff + 1);
    let mut term = c((-0.5 * alpha.norm_sqr()).exp(), 0.0);
    for n in 0..=cutoff {
        if n > 0 {
            term *= alpha / (n as f64).sqrt();
        }
        amp.push(term);
    }
    QuantumState::from_slice(&amp, Structure::FockCutoff { modes: 1, cutoff })
}

/// Thermal state with mean photon number `nbar`, truncated and renormalized.
pub fn thermal_state(nbar: f64, cutoff: usize) -> QResult<DensityMatrix> {
    let ratio = nbar / (1.0 + nbar);
    let weights: Vec<f64> = (0..=cutoff).map(|n| ratio.powi(n as i32)).collect();
    let total: f64 = weights.iter().sum();
    let diag = CVector::from_iterator(cutoff + 1, weights.iter().map(|w| c(w / total, 0.0)));
    DensityMatrix::new(
        CMatrix::from_diagonal(&diag),
        Structure::FockCutoff { modes: 1, cutoff },
    )
}
