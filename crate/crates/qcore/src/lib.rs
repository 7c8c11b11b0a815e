//! Small dense numerics for quantum optics: states and density matrices,
//! Fock-space linear optics, permanents, entanglement metrics and Lindblad
//! steady states.
//!
//! Subsystem ordering is big-endian everywhere: subsystem 0 is the most
//! significant digit of a basis index, matching `kron(a, b)`.

mod error;
pub mod fock;
pub mod lindblad;
pub mod linalg;
pub mod metrics;
pub mod network;
pub mod permanent;
pub mod state;

pub use error::{QError, QResult};
pub use fock::{fock_enumerate, FockBasis};
pub use lindblad::{lindblad_steady_state, CollapseOperator};
pub use linalg::{CMatrix, CVector, C64};
pub use metrics::{
    chsh_value, concurrence, g2_zero, ghz_witness, mermin_value, optimize_mermin, state_metrics,
    Bell, ChshSettings, MerminSettings, StateMetrics,
};
pub use network::{Element, Network};
pub use permanent::permanent;
pub use state::{partial_trace, tensor, DensityMatrix, QuantumState, Structure};

/// Tolerance for structural invariants (norms, Hermiticity, unitarity).
pub const STRUCTURAL_TOL: f64 = 1e-9;
