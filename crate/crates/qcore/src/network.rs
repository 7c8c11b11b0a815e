//! Layered linear-optical networks, in both the m×m mode picture and the
//! multi-photon Fock picture.

use crate::fock::{self, fock_enumerate, FockBasis};
use crate::linalg::{self, c, CMatrix, C64};
use crate::permanent::permanent;
use crate::{QError, QResult};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Element {
    BeamSplitter { theta: f64, modes: (usize, usize) },
    PhaseShifter { phi: f64, mode: usize },
}

impl Element {
    /// Beam splitter with intensity transmittance `t` (t = cos²θ).
    pub fn splitter_with_transmittance(t: f64, modes: (usize, usize)) -> Element {
        Element::BeamSplitter {
            theta: t.clamp(0.0, 1.0).sqrt().acos(),
            modes,
        }
    }

    fn touched(&self) -> Vec<usize> {
        match *self {
            Element::BeamSplitter { modes: (i, j), .. } => vec![i, j],
            Element::PhaseShifter { mode, .. } => vec![mode],
        }
    }

    fn check(&self, modes: usize) -> QResult<()> {
        let angle = match *self {
            Element::BeamSplitter { theta, modes: (i, j) } => {
                if i == j {
                    return Err(QError::SameMode(i));
                }
                theta
            }
            Element::PhaseShifter { phi, .. } => phi,
        };
        if !angle.is_finite() {
            return Err(QError::NonFinite("network angle"));
        }
        for k in self.touched() {
            if k >= modes {
                return Err(QError::ModeOutOfRange { index: k, modes });
            }
        }
        Ok(())
    }

    pub fn mode_matrix(&self, modes: usize) -> CMatrix {
        let mut m = linalg::identity(modes);
        match *self {
            Element::BeamSplitter { theta, modes: (i, j) } => {
                let (s, co) = theta.sin_cos();
                m[(i, i)] = c(co, 0.0);
                m[(j, j)] = c(co, 0.0);
                m[(i, j)] = c(0.0, s);
                m[(j, i)] = c(0.0, s);
            }
            Element::PhaseShifter { phi, mode } => {
                m[(mode, mode)] = C64::from_polar(1.0, phi);
            }
        }
        m
    }

    pub fn fock_matrix(&self, basis: &FockBasis) -> QResult<CMatrix> {
        match *self {
            Element::BeamSplitter { theta, modes } => fock::beam_splitter_unitary(theta, modes, basis),
            Element::PhaseShifter { phi, mode } => fock::phase_shifter_unitary(phi, mode, basis),
        }
    }
}

/// Elements in one layer act on disjoint modes; layers apply in order.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    modes: usize,
    layers: Vec<Vec<Element>>,
}

impl Network {
    pub fn new(modes: usize, layers: Vec<Vec<Element>>) -> QResult<Self> {
        if modes == 0 {
            return Err(QError::MalformedNetwork("network needs at least one mode".into()));
        }
        for (li, layer) in layers.iter().enumerate() {
            let mut used = vec![false; modes];
            for el in layer {
                el.check(modes)?;
                for k in el.touched() {
                    if used[k] {
                        return Err(QError::MalformedNetwork(format!(
                            "mode {k} used twice in layer {li}"
                        )));
                    }
                    used[k] = true;
                }
            }
        }
        Ok(Network { modes, layers })
    }

    pub fn empty(modes: usize) -> QResult<Self> {
        Self::new(modes, Vec::new())
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn layers(&self) -> &[Vec<Element>] {
        &self.layers
    }

    fn elements(&self) -> impl Iterator<Item = &Element> {
        self.layers.iter().flatten()
    }

    /// Mode transfer matrix M with a_k† → Σ_j M[j][k] a_j†.
    pub fn mode_unitary(&self) -> CMatrix {
        self.elements()
            .fold(linalg::identity(self.modes), |acc, el| el.mode_matrix(self.modes) * acc)
    }

    /// Operator on the `photons`-photon block.
    pub fn fock_unitary(&self, photons: usize) -> QResult<(FockBasis, CMatrix)> {
        let basis = FockBasis::block(self.modes, photons);
        let mut u = linalg::identity(basis.len());
        for el in self.elements() {
            u = el.fock_matrix(&basis)? * u;
        }
        Ok((basis, u))
    }

    /// Output probabilities by direct evolution of the input Fock state, in
    /// `fock_enumerate` order.
    pub fn evolution_distribution(&self, input: &[usize]) -> QResult<Vec<(Vec<usize>, f64)>> {
        self.check_input(input)?;
        let photons = input.iter().sum();
        let (basis, u) = self.fock_unitary(photons)?;
        let out = basis.state(input)?.evolve(&u)?;
        Ok(basis
            .configs()
            .iter()
            .cloned()
            .zip(out.probabilities())
            .collect())
    }

    /// Output probabilities from permanents of mode-matrix submatrices.
    pub fn permanent_distribution(&self, input: &[usize]) -> QResult<Vec<(Vec<usize>, f64)>> {
        self.check_input(input)?;
        let m = self.mode_unitary();
        let photons = input.iter().sum();
        fock_enumerate(self.modes, photons)
            .into_iter()
            .map(|out| {
                let amp = transition_amplitude(&m, input, &out)?;
                Ok((out, amp.norm_sqr()))
            })
            .collect()
    }

    fn check_input(&self, input: &[usize]) -> QResult<()> {
        if input.len() != self.modes {
            return Err(QError::DimensionMismatch {
                expected: self.modes,
                got: input.len(),
            });
        }
        Ok(())
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

fn repeat_indices(config: &[usize]) -> Vec<usize> {
    config
        .iter()
        .enumerate()
        .flat_map(|(k, &n)| std::iter::repeat_n(k, n))
        .collect()
}

/// ⟨output| U |input⟩ = Per(M[output rows, input cols]) / √(Π s! Π t!).
pub fn transition_amplitude(m: &CMatrix, input: &[usize], output: &[usize]) -> QResult<C64> {
    let cols = repeat_indices(input);
    let rows = repeat_indices(output);
    if rows.len() != cols.len() {
        return Ok(c(0.0, 0.0));
    }
    let sub = CMatrix::from_fn(rows.len(), cols.len(), |r, k| m[(rows[r], cols[k])]);
    let norm: f64 = input
        .iter()
        .chain(output)
        .map(|&n| factorial(n))
        .product::<f64>()
        .sqrt();
    Ok(permanent(&sub)? / norm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    #[test]
    fn empty_network_is_identity() {
        let n = Network::empty(3).unwrap();
        assert_eq!(n.mode_unitary(), linalg::identity(3));
        let (b, u) = n.fock_unitary(2).unwrap();
        assert!(linalg::max_abs_diff(&u, &linalg::identity(b.len())) < 1e-12);
    }

    #[test]
    fn hom_bunching() {
        let n = Network::new(
            2,
            vec![vec![Element::BeamSplitter {
                theta: FRAC_PI_4,
                modes: (0, 1),
            }]],
        )
        .unwrap();
        for dist in [
            n.evolution_distribution(&[1, 1]).unwrap(),
            n.permanent_distribution(&[1, 1]).unwrap(),
        ] {
            let p: Vec<f64> = dist.iter().map(|(_, p)| *p).collect();
            assert!((p[0] - 0.5).abs() < 1e-12);
            assert!(p[1].abs() < 1e-12);
            assert!((p[2] - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn malformed_layers_are_rejected() {
        let bs = |i, j| Element::BeamSplitter {
            theta: 0.3,
            modes: (i, j),
        };
        assert!(matches!(
            Network::new(3, vec![vec![bs(0, 1), bs(1, 2)]]),
            Err(QError::MalformedNetwork(_))
        ));
        assert!(Network::new(2, vec![vec![bs(0, 2)]]).is_err());
        assert!(Network::new(0, vec![]).is_err());
    }

    #[test]
    fn transmittance_round_trip() {
        if let Element::BeamSplitter { theta, .. } = Element::splitter_with_transmittance(0.33, (0, 1)) {
            assert!((theta.cos().powi(2) - 0.33).abs() < 1e-12);
        } else {
            unreachable!()
        }
    }
}
