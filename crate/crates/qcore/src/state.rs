//! State vectors, density matrices and their register metadata.

use std::fmt;

use crate::fock::multiset_count;
use crate::linalg::{self, c, CMatrix, CVector, C64};
use crate::{QError, QResult, STRUCTURAL_TOL};

/// Register layout of a Hilbert space.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Structure {
    Qubits(usize),
    Qudits(Vec<usize>),
    /// `modes` bosonic modes holding exactly `photons` photons in total.
    FockBlock { modes: usize, photons: usize },
    /// `modes` bosonic modes, each truncated at `cutoff` photons.
    FockCutoff { modes: usize, cutoff: usize },
}

impl Structure {
    pub fn dim(&self) -> usize {
        match self {
            Structure::Qubits(n) => 1usize << n,
            Structure::Qudits(d) => d.iter().product(),
            Structure::FockBlock { modes, photons } => multiset_count(*modes, *photons),
            Structure::FockCutoff { modes, cutoff } => (cutoff + 1).pow(*modes as u32),
        }
    }

    /// Local dimensions of the tensor factors. A number-conserving Fock block
    /// is a single opaque factor.
    pub fn subsystem_dims(&self) -> Vec<usize> {
        match self {
            Structure::Qubits(n) => vec![2; *n],
            Structure::Qudits(d) => d.clone(),
            Structure::FockBlock { .. } => vec![self.dim()],
            Structure::FockCutoff { modes, cutoff } => vec![cutoff + 1; *modes],
        }
    }

    pub fn is_fock(&self) -> bool {
        matches!(self, Structure::FockBlock { .. } | Structure::FockCutoff { .. })
    }

    fn combine(&self, other: &Structure) -> Structure {
        match (self, other) {
            (Structure::Qubits(a), Structure::Qubits(b)) => Structure::Qubits(a + b),
            (
                Structure::FockCutoff { modes: a, cutoff: ca },
                Structure::FockCutoff { modes: b, cutoff: cb },
            ) if ca == cb => Structure::FockCutoff {
                modes: a + b,
                cutoff: *ca,
            },
            _ => {
                let mut d = self.subsystem_dims();
                d.extend(other.subsystem_dims());
                Structure::Qudits(d)
            }
        }
    }

    fn keep(&self, kept_dims: Vec<usize>) -> Structure {
        match self {
            Structure::Qubits(_) => Structure::Qubits(kept_dims.len()),
            Structure::FockCutoff { cutoff, .. } => Structure::FockCutoff {
                modes: kept_dims.len(),
                cutoff: *cutoff,
            },
            _ => Structure::Qudits(kept_dims),
        }
    }
}

impl fmt::Display for Structure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Structure::Qubits(n) => write!(f, "{n} qubits"),
            Structure::Qudits(d) => write!(f, "qudits {d:?}"),
            Structure::FockBlock { modes, photons } => {
                write!(f, "{modes} modes with {photons} photons")
            }
            Structure::FockCutoff { modes, cutoff } => {
                write!(f, "{modes} modes with cutoff {cutoff}")
            }
        }
    }
}

fn check_dim(structure: &Structure, got: usize) -> QResult<()> {
    let expected = structure.dim();
    if expected == got {
        Ok(())
    } else {
        Err(QError::DimensionMismatch { expected, got })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    amplitudes: CVector,
    structure: Structure,
}

impl QuantumState {
    pub fn new(amplitudes: CVector, structure: Structure) -> QResult<Self> {
        check_dim(&structure, amplitudes.len())?;
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(QError::NonFinite("state amplitudes"));
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > STRUCTURAL_TOL {
            return Err(QError::NotNormalized(norm));
        }
        Ok(QuantumState {
            amplitudes,
            structure,
        })
    }

    /// Scales the amplitudes to unit norm.
    pub fn normalized(amplitudes: CVector, structure: Structure) -> QResult<Self> {
        let norm = amplitudes.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(QError::NotNormalized(norm));
        }
        Self::new(amplitudes / c(norm, 0.0), structure)
    }

    pub fn from_slice(amplitudes: &[C64], structure: Structure) -> QResult<Self> {
        Self::normalized(CVector::from_column_slice(amplitudes), structure)
    }

    pub fn basis(structure: Structure, index: usize) -> QResult<Self> {
        let dim = structure.dim();
        if index >= dim {
            return Err(QError::DimensionMismatch {
                expected: dim,
                got: index + 1,
            });
        }
        let mut v = CVector::zeros(dim);
        v[index] = linalg::ONE;
        Self::new(v, structure)
    }

    /// Computational basis state of `bits.len()` qubits; `bits[0]` is the
    /// most significant.
    pub fn qubits(bits: &[u8]) -> Self {
        let index = bits.iter().fold(0usize, |acc, &b| (acc << 1) | (b & 1) as usize);
        Self::basis(Structure::Qubits(bits.len()), index).expect("index fits")
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn structure(&self) -> &Structure {
        &self.structure
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|z| z.norm_sqr()).collect()
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &QuantumState) -> QResult<C64> {
        check_dim(&self.structure, other.dim())?;
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    /// Applies a unitary and renormalizes away rounding drift.
    pub fn evolve(&self, u: &CMatrix) -> QResult<Self> {
        check_dim(&self.structure, u.ncols())?;
        check_dim(&self.structure, u.nrows())?;
        Self::normalized(u * &self.amplitudes, self.structure.clone())
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix {
            matrix: linalg::projector(&self.amplitudes),
            structure: self.structure.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
    structure: Structure,
}

impl DensityMatrix {
    pub fn new(matrix: CMatrix, structure: Structure) -> QResult<Self> {
        let n = linalg::ensure_square(&matrix)?;
        check_dim(&structure, n)?;
        if matrix.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(QError::NonFinite("density matrix"));
        }
        if !linalg::is_hermitian(&matrix, STRUCTURAL_TOL) {
            return Err(QError::InvalidDensityMatrix("not Hermitian".into()));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > STRUCTURAL_TOL || tr.im.abs() > STRUCTURAL_TOL {
            return Err(QError::InvalidDensityMatrix(format!("trace {tr}")));
        }
        let min_eig = linalg::eigvalsh(&matrix)
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        if min_eig < -STRUCTURAL_TOL {
            return Err(QError::InvalidDensityMatrix(format!(
                "negative eigenvalue {min_eig:e}"
            )));
        }
        Ok(DensityMatrix { matrix, structure })
    }

    /// Convex combination of density matrices sharing one structure.
    pub fn mixture(parts: &[(f64, &DensityMatrix)]) -> QResult<Self> {
        let first = parts
            .first()
            .ok_or_else(|| QError::InvalidDensityMatrix("empty mixture".into()))?;
        let structure = first.1.structure.clone();
        let n = structure.dim();
        let mut m = CMatrix::zeros(n, n);
        for (w, rho) in parts {
            check_dim(&structure, rho.dim())?;
            m += &rho.matrix * c(*w, 0.0);
        }
        Self::new(m, structure)
    }

    pub fn maximally_mixed(structure: Structure) -> Self {
        let n = structure.dim();
        DensityMatrix {
            matrix: linalg::identity(n) / c(n as f64, 0.0),
            structure,
        }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn structure(&self) -> &Structure {
        &self.structure
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn populations(&self) -> Vec<f64> {
        self.matrix.diagonal().iter().map(|z| z.re).collect()
    }

    pub fn purity(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Von Neumann entropy in nats, with 0·ln 0 = 0.
    pub fn entropy(&self) -> f64 {
        let s: f64 = linalg::eigvalsh(&self.matrix)
            .into_iter()
            .filter(|&p| p > 1e-15)
            .map(|p| -p * p.ln())
            .sum();
        s.max(0.0)
    }

    /// Re Tr(ρ O).
    pub fn expectation(&self, op: &CMatrix) -> QResult<f64> {
        check_dim(&self.structure, op.nrows())?;
        check_dim(&self.structure, op.ncols())?;
        Ok((&self.matrix * op).trace().re)
    }

    /// ⟨ψ|ρ|ψ⟩ clipped to [0, 1].
    pub fn fidelity_with(&self, psi: &QuantumState) -> QResult<f64> {
        check_dim(&self.structure, psi.dim())?;
        let a = psi.amplitudes();
        let f = a.dotc(&(&self.matrix * a)).re;
        Ok(f.clamp(0.0, 1.0))
    }

    /// U ρ U†.
    pub fn evolve(&self, u: &CMatrix) -> QResult<Self> {
        check_dim(&self.structure, u.ncols())?;
        check_dim(&self.structure, u.nrows())?;
        let m = u * &self.matrix * u.adjoint();
        Ok(DensityMatrix {
            matrix: linalg::hermitize(&m),
            structure: self.structure.clone(),
        })
    }

    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        DensityMatrix {
            matrix: self.matrix.kronecker(&other.matrix),
            structure: self.structure.combine(&other.structure),
        }
    }
}

pub fn tensor(a: &QuantumState, b: &QuantumState) -> QuantumState {
    QuantumState {
        amplitudes: a.amplitudes.kronecker(&b.amplitudes),
        structure: a.structure.combine(&b.structure),
    }
}

/// Traces out every subsystem not listed in `keep`. Kept subsystems appear in
/// ascending index order.
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> QResult<DensityMatrix> {
    let dims = rho.structure.subsystem_dims();
    let count = dims.len();
    let mut keep: Vec<usize> = keep.to_vec();
    keep.sort_unstable();
    keep.dedup();
    if let Some(&bad) = keep.iter().find(|&&k| k >= count) {
        return Err(QError::SubsystemOutOfRange { index: bad, count });
    }
    let traced: Vec<usize> = (0..count).filter(|k| !keep.contains(k)).collect();
    let kept_dims: Vec<usize> = keep.iter().map(|&k| dims[k]).collect();
    let traced_dims: Vec<usize> = traced.iter().map(|&k| dims[k]).collect();
    let dk: usize = kept_dims.iter().product();
    let dt: usize = traced_dims.iter().product();

    // strides of each subsystem in the full index
    let mut stride = vec![1usize; count];
    for k in (0..count.saturating_sub(1)).rev() {
        stride[k] = stride[k + 1] * dims[k + 1];
    }
    let offsets = |sel: &[usize], sel_dims: &[usize], mut idx: usize| -> usize {
        let mut off = 0;
        for p in (0..sel.len()).rev() {
            off += (idx % sel_dims[p]) * stride[sel[p]];
            idx /= sel_dims[p];
        }
        off
    };
    let kept_off: Vec<usize> = (0..dk).map(|i| offsets(&keep, &kept_dims, i)).collect();
    let traced_off: Vec<usize> = (0..dt).map(|t| offsets(&traced, &traced_dims, t)).collect();

    let m = &rho.matrix;
    let out = CMatrix::from_fn(dk, dk, |i, j| {
        traced_off
            .iter()
            .map(|&t| m[(kept_off[i] + t, kept_off[j] + t)])
            .sum::<C64>()
    });
    Ok(DensityMatrix {
        matrix: linalg::hermitize(&out),
        structure: rho.structure.keep(kept_dims),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tensor_of_basis_states() {
        let s = tensor(&QuantumState::qubits(&[0]), &QuantumState::qubits(&[1]));
        assert_eq!(s, QuantumState::qubits(&[0, 1]));
    }

    #[test]
    fn bell_reduces_to_maximally_mixed() {
        let h = 1.0 / 2f64.sqrt();
        let phi = QuantumState::from_slice(
            &[c(h, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(h, 0.0)],
            Structure::Qubits(2),
        )
        .unwrap();
        let r = partial_trace(&phi.density(), &[0]).unwrap();
        let want = DensityMatrix::maximally_mixed(Structure::Qubits(1));
        assert!(linalg::max_abs_diff(r.matrix(), want.matrix()) < 1e-12);
        assert_eq!(r.structure(), &Structure::Qubits(1));
    }

    #[test]
    fn partial_trace_picks_right_factor() {
        // |0> (x) |+> (x) |1>, keep the middle and last
        let plus = QuantumState::from_slice(&[c(1.0, 0.0), c(1.0, 0.0)], Structure::Qubits(1))
            .unwrap();
        let s = tensor(
            &tensor(&QuantumState::qubits(&[0]), &plus),
            &QuantumState::qubits(&[1]),
        );
        let r = partial_trace(&s.density(), &[2, 1]).unwrap();
        let want = tensor(&plus, &QuantumState::qubits(&[1])).density();
        assert!(linalg::max_abs_diff(r.matrix(), want.matrix()) < 1e-12);
    }

    #[test]
    fn rejects_bad_density_matrices() {
        let m = linalg::from_real_rows(&[&[0.5, 0.0], &[0.0, 0.6]]);
        assert!(DensityMatrix::new(m, Structure::Qubits(1)).is_err());
        let m = linalg::from_real_rows(&[&[1.5, 0.0], &[0.0, -0.5]]);
        assert!(DensityMatrix::new(m, Structure::Qubits(1)).is_err());
        let m = linalg::from_real_rows(&[&[1.0]]);
        assert!(matches!(
            DensityMatrix::new(m, Structure::Qubits(1)),
            Err(QError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn unnormalized_state_is_rejected() {
        let v = CVector::from_column_slice(&[c(1.0, 0.0), c(1.0, 0.0)]);
        assert!(matches!(
            QuantumState::new(v, Structure::Qubits(1)),
            Err(QError::NotNormalized(_))
        ));
    }
}
