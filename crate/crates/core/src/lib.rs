//! Uncontrolled phase kickback and phase estimation.
//!
//! The crate replaces controlled applications of an expensive unitary `U`
//! with a controlled state preparation `W` around an uncontrolled `U`, given
//! a reference eigenstate `|φ⟩` of `U` with known eigenphase and a circuit
//! `W` with `W|φ⟩ = |ψ⟩`. Everything is checked on an exact dense
//! statevector simulator.
//!
//! Modules:
//!
//! * [`sim`]: statevector simulation, marginals, purity, sampling.
//! * [`circuit`]: circuits, gate counting, controlled compilation, QFT.
//! * [`kickback`]: single-ancilla standard and uncontrolled kickback.
//! * [`qpe`]: m-bit uncontrolled and standard phase estimation.
//! * [`resources`]: closed-form two-qubit gate costs.
//! * [`heisenberg`]: ground-energy estimation for the Heisenberg chain.
//! * [`shor`]: order finding with an uncontrolled first phase bit.
//!
//! Conventions: qubit 0 is the least significant bit of a basis index, and
//! eigenphases are fractions of a turn in `[0, 1)` with `U|ψ⟩ = e^{2πiθ}|ψ⟩`.

pub mod circuit;
pub mod error;
pub mod heisenberg;
pub mod kickback;
pub mod linalg;
pub mod qpe;
pub mod resources;
pub mod shor;
pub mod sim;

pub use circuit::{Circuit, Control, GateCountReport, GateKind, GateOp, UnitaryMatrix};
pub use error::{Error, Result};
pub use sim::StateVector;

/// Largest register the simulator accepts (dense vector of 4M amplitudes).
pub const MAX_QUBITS: usize = 22;

/// Tolerance for the eigenstate checks performed when specs are built.
pub const EIGENSTATE_TOLERANCE: f64 = 1e-8;

/// Reduces a phase to `[0, 1)`.
pub fn wrap_phase(phase: f64) -> f64 {
    let p = phase.rem_euclid(1.0);
    if p >= 1.0 {
        0.0
    } else {
        p
    }
}
