//! Library results checked against independent brute-force or closed-form
//! computations.

use approx::assert_abs_diff_eq;
use nalgebra::DMatrix;
use qcore::fock::{coherent_state, thermal_state};
use qcore::lindblad::{lindblad_rhs, residual_norm};
use qcore::linalg::{self, c, CMatrix, C64};
use qcore::metrics::cat_state;
use qcore::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_matrix(rng: &mut ChaCha8Rng, n: usize, m: usize) -> CMatrix {
    CMatrix::from_fn(n, m, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
}

fn naive_permanent(a: &CMatrix) -> C64 {
    fn rec(a: &CMatrix, row: usize, used: &mut Vec<bool>) -> C64 {
        let n = a.nrows();
        if row == n {
            return c(1.0, 0.0);
        }
        let mut total = c(0.0, 0.0);
        for col in 0..n {
            if !used[col] {
                used[col] = true;
                total += a[(row, col)] * rec(a, row + 1, used);
                used[col] = false;
            }
        }
        total
    }
    rec(a, 0, &mut vec![false; a.nrows()])
}

#[test]
fn permanent_matches_sum_over_permutations() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in 1..=6 {
        for _ in 0..20 {
            let a = random_matrix(&mut rng, n, n);
            let fast = permanent(&a).unwrap();
            let slow = naive_permanent(&a);
            assert!((fast - slow).norm() < 1e-12 * (1.0 + slow.norm()), "n = {n}");
        }
    }
}

#[test]
fn werner_state_concurrence() {
    // p|Φ+⟩⟨Φ+| + (1−p) I/4
    let phi = metrics::Bell::PhiPlus.state().density();
    let mixed = DensityMatrix::maximally_mixed(Structure::Qubits(2));
    for p in [0.0, 0.2, 1.0 / 3.0, 0.5, 0.8, 1.0] {
        let rho = DensityMatrix::mixture(&[(p, &phi), (1.0 - p, &mixed)]).unwrap();
        let want = f64::max(0.0, (3.0 * p - 1.0) / 2.0);
        assert_abs_diff_eq!(concurrence(&rho).unwrap(), want, epsilon = 1e-9);

        // PPT criterion: entangled iff the partial transpose has a negative eigenvalue
        let m = rho.matrix();
        let pt = CMatrix::from_fn(4, 4, |r, col| {
            let (a, b) = (r / 2, r % 2);
            let (a2, b2) = (col / 2, col % 2);
            m[(a * 2 + b2, a2 * 2 + b)]
        });
        let min_eig = linalg::eigvalsh(&pt).into_iter().fold(f64::INFINITY, f64::min);
        assert_eq!(min_eig < -1e-12, want > 1e-12, "p = {p}");
    }
}

#[test]
fn thermal_and_coherent_photon_statistics() {
    let thermal = thermal_state(1.0, 40).unwrap();
    assert_abs_diff_eq!(g2_zero(&thermal, 0).unwrap(), 2.0, epsilon = 1e-9);
    let coherent = coherent_state(c(1.2, 0.4), 40).unwrap().density();
    assert_abs_diff_eq!(g2_zero(&coherent, 0).unwrap(), 1.0, epsilon = 1e-9);
}

#[test]
fn ghz_witness_at_reported_fidelity() {
    let ghz = cat_state(&[1, 1, 0], &[0, 0, 1]);
    // fidelity 0.873 mixed with white noise of the right weight
    let f = 0.873;
    let p = (8.0 * f - 1.0) / 7.0;
    let rho = DensityMatrix::mixture(&[
        (p, &ghz.density()),
        (1.0 - p, &DensityMatrix::maximally_mixed(Structure::Qubits(3))),
    ])
    .unwrap();
    assert_abs_diff_eq!(ghz_witness(&rho, &ghz).unwrap(), -0.373, epsilon = 1e-9);
}

fn rk4(h: &CMatrix, ops: &[CollapseOperator], rho0: &CMatrix, t: f64, dt: f64) -> CMatrix {
    let mut rho = rho0.clone();
    let steps = (t / dt).round() as usize;
    let half = c(0.5 * dt, 0.0);
    let full = c(dt, 0.0);
    for _ in 0..steps {
        let k1 = lindblad_rhs(h, ops, &rho);
        let k2 = lindblad_rhs(h, ops, &(&rho + &k1 * half));
        let k3 = lindblad_rhs(h, ops, &(&rho + &k2 * half));
        let k4 = lindblad_rhs(h, ops, &(&rho + &k3 * full));
        rho += (k1 + k2 * c(2.0, 0.0) + k3 * c(2.0, 0.0) + k4) * c(dt / 6.0, 0.0);
    }
    rho
}

#[test]
fn driven_two_level_atom_against_time_integration() {
    let (omega, gamma) = (1.3, 1.0);
    let h = linalg::pauli_x() * c(omega / 2.0, 0.0);
    // basis (g, e); σ− = |g⟩⟨e|
    let lower = linalg::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
    let ops = [CollapseOperator::new(lower, gamma)];
    let ss = lindblad_steady_state(&h, &ops).unwrap();
    let excited = omega * omega / (2.0 * omega * omega + gamma * gamma);
    assert_abs_diff_eq!(ss.populations()[1], excited, epsilon = 1e-9);
    assert!(residual_norm(&h, &ops, &ss) < 1e-9);

    let ground = QuantumState::qubits(&[0]).density();
    let late = rk4(&h, &ops, ground.matrix(), 60.0 / gamma, 0.005);
    assert!(linalg::trace_distance(&late, ss.matrix()) < 1e-6);
}

#[test]
fn random_lindblad_systems_against_time_integration() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for d in [2usize, 3, 4] {
        for _ in 0..4 {
            let a = random_matrix(&mut rng, d, d);
            let h = linalg::hermitize(&a);
            let ops: Vec<CollapseOperator> = (0..2)
                .map(|_| CollapseOperator::new(random_matrix(&mut rng, d, d), rng.random_range(0.5..1.5)))
                .collect();
            let ss = lindblad_steady_state(&h, &ops).unwrap();
            assert!(residual_norm(&h, &ops, &ss) < 1e-9);
            assert!(linalg::is_hermitian(ss.matrix(), 1e-12));
            let start = DensityMatrix::maximally_mixed(Structure::Qudits(vec![d]));
            let late = rk4(&h, &ops, start.matrix(), 60.0, 0.002);
            assert!(linalg::trace_distance(&late, ss.matrix()) < 1e-6, "d = {d}");
        }
    }
}

#[test]
fn ideal_phi_plus_chsh_and_product_bound() {
    let s = chsh_value(&metrics::Bell::PhiPlus.state().density(), &ChshSettings::PHI_PLUS_OPTIMAL).unwrap();
    assert_abs_diff_eq!(s, 2.0 * 2f64.sqrt(), epsilon = 1e-12);

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..200 {
        let psi = |rng: &mut ChaCha8Rng| {
            QuantumState::normalized(
                DMatrix::from_fn(2, 1, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                    .column(0)
                    .into_owned(),
                Structure::Qubits(1),
            )
            .unwrap()
        };
        let prod = tensor(&psi(&mut rng), &psi(&mut rng)).density();
        let settings = ChshSettings {
            a: rng.random_range(0.0..3.2),
            a_prime: rng.random_range(0.0..3.2),
            b: rng.random_range(0.0..3.2),
            b_prime: rng.random_range(0.0..3.2),
        };
        assert!(chsh_value(&prod, &settings).unwrap().abs() <= 2.0 + 1e-12);
    }
}
