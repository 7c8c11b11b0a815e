//! Markovian master equation: Liouvillian assembly and steady states.

use crate::linalg::{self, c, CMatrix, CVector, C64};
use crate::state::{DensityMatrix, Structure};
use crate::{QError, QResult};

pub const MAX_DIM: usize = 64;
/// Second-smallest singular value below this means a degenerate null space.
pub const DEGENERACY_TOL: f64 = 1e-8;

/// Jump operator `operator` applied at `rate`; the dissipator uses
/// √rate · operator.
#[derive(Debug, Clone, PartialEq)]
pub struct CollapseOperator {
    pub operator: CMatrix,
    pub rate: f64,
}

impl CollapseOperator {
    pub fn new(operator: CMatrix, rate: f64) -> Self {
        CollapseOperator { operator, rate }
    }

    fn scaled(&self) -> CMatrix {
        &self.operator * c(self.rate.max(0.0).sqrt(), 0.0)
    }
}

fn check(h: &CMatrix, collapses: &[CollapseOperator]) -> QResult<usize> {
    let d = linalg::ensure_square(h)?;
    if d > MAX_DIM {
        return Err(QError::TooLarge { n: d, limit: MAX_DIM });
    }
    if collapses.is_empty() {
        return Err(QError::NoDissipation);
    }
    for op in collapses {
        let n = linalg::ensure_square(&op.operator)?;
        if n != d {
            return Err(QError::DimensionMismatch { expected: d, got: n });
        }
        if !op.rate.is_finite() {
            return Err(QError::NonFinite("collapse rate"));
        }
    }
    if h.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(QError::NonFinite("Hamiltonian"));
    }
    Ok(d)
}

/// dρ/dt = −i[H, ρ] + Σ (LρL† − ½{L†L, ρ}).
pub fn lindblad_rhs(h: &CMatrix, collapses: &[CollapseOperator], rho: &CMatrix) -> CMatrix {
    let mut out = (h * rho - rho * h) * c(0.0, -1.0);
    for op in collapses {
        let l = op.scaled();
        let ld = l.adjoint();
        let ldl = &ld * &l;
        out += &l * rho * &ld - (&ldl * rho + rho * &ldl) * c(0.5, 0.0);
    }
    out
}

/// Superoperator acting on column-stacked density matrices.
pub fn liouvillian(h: &CMatrix, collapses: &[CollapseOperator]) -> QResult<CMatrix> {
    let d = check(h, collapses)?;
    let id = linalg::identity(d);
    let mut sup = (id.kronecker(h) - h.transpose().kronecker(&id)) * c(0.0, -1.0);
    for op in collapses {
        let l = op.scaled();
        let ldl = l.adjoint() * &l;
        sup += l.conjugate().kronecker(&l)
            - id.kronecker(&ldl) * c(0.5, 0.0)
            - ldl.transpose().kronecker(&id) * c(0.5, 0.0);
    }
    Ok(sup)
}

/// Frobenius norm of L(ρ).
pub fn residual_norm(h: &CMatrix, collapses: &[CollapseOperator], rho: &DensityMatrix) -> f64 {
    linalg::fro_norm(&lindblad_rhs(h, collapses, rho.matrix()))
}

/// Unique ρ with L(ρ) = 0, from the right singular vector of the smallest
/// singular value of the Liouvillian.
pub fn lindblad_steady_state(h: &CMatrix, collapses: &[CollapseOperator]) -> QResult<DensityMatrix> {
    let d = check(h, collapses)?;
    let sup = liouvillian(h, collapses)?;
    let svd = sup.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let sv = &svd.singular_values;

    let mut order: Vec<usize> = (0..sv.len()).collect();
    order.sort_by(|&a, &b| sv[a].total_cmp(&sv[b]));
    if d > 1 && sv[order[1]] < DEGENERACY_TOL {
        let multiplicity = order.iter().take_while(|&&k| sv[k] < DEGENERACY_TOL).count();
        return Err(QError::DegenerateSteadyState {
            multiplicity,
            second_smallest: sv[order[1]],
        });
    }

    let row = order[0];
    let v = CVector::from_iterator(d * d, v_t.row(row).iter().map(|z| z.conj()));
    let mut rho = CMatrix::from_fn(d, d, |r, col| v[col * d + r]);
    let tr: C64 = rho.trace();
    if tr.norm() < 1e-300 {
        return Err(QError::InvalidDensityMatrix("null vector is traceless".into()));
    }
    rho /= tr;
    let rho = linalg::hermitize(&rho);
    DensityMatrix::new(rho, Structure::Qudits(vec![d]))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sigma_minus() -> CMatrix {
        // |g><e| with g = 0, e = 1
        linalg::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]])
    }

    #[test]
    fn decay_only_goes_to_ground() {
        let h = CMatrix::zeros(2, 2);
        let rho = lindblad_steady_state(&h, &[CollapseOperator::new(sigma_minus(), 1.0)]).unwrap();
        assert!((rho.populations()[0] - 1.0).abs() < 1e-12);
        assert!(residual_norm(&h, &[CollapseOperator::new(sigma_minus(), 1.0)], &rho) < 1e-12);
    }

    #[test]
    fn superoperator_matches_direct_rhs() {
        let h = linalg::from_real_rows(&[&[0.3, 0.7], &[0.7, -0.2]]);
        let ops = [CollapseOperator::new(sigma_minus(), 0.8)];
        let rho = linalg::from_real_rows(&[&[0.6, 0.1], &[0.1, 0.4]]);
        let sup = liouvillian(&h, &ops).unwrap();
        let vec = CVector::from_iterator(4, (0..4).map(|k| rho[(k % 2, k / 2)]));
        let out = sup * vec;
        let direct = lindblad_rhs(&h, &ops, &rho);
        for k in 0..4 {
            assert!((out[k] - direct[(k % 2, k / 2)]).norm() < 1e-12);
        }
    }

    #[test]
    fn pure_dephasing_is_degenerate() {
        let h = CMatrix::zeros(2, 2);
        let ops = [CollapseOperator::new(linalg::pauli_z(), 1.0)];
        assert!(matches!(
            lindblad_steady_state(&h, &ops),
            Err(QError::DegenerateSteadyState { .. })
        ));
    }

    #[test]
    fn needs_dissipation() {
        assert_eq!(
            lindblad_steady_state(&CMatrix::zeros(2, 2), &[]),
            Err(QError::NoDissipation)
        );
    }
}
