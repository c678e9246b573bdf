use num_complex::Complex64;

use super::{Circuit, GateOp, UnitaryMatrix};
use crate::error::{Error, Result};
use crate::linalg::{Matrix, ONE};
use crate::sim::StateVector;

const BASIS_TOLERANCE: f64 = 1e-12;

/// Unitary whose first column is `target`: `Q|0…0⟩ = target`.
///
/// Householder completion: with `g = t₀/|t₀|` (or 1 when `t₀ = 0`) and
/// `u = e₀ − g*·t`, `Q = g·(I − 2uu†/‖u‖²)`.
pub fn householder_prep(target: &StateVector) -> Result<UnitaryMatrix> {
    let t = target.amplitudes();
    let dim = t.len();
    let g = if t[0].norm() > 0.0 { t[0] / t[0].norm() } else { ONE };
    let mut u: Vec<Complex64> = t.iter().map(|z| -g.conj() * z).collect();
    u[0] += ONE;
    let u_norm_sqr: f64 = u.iter().map(|z| z.norm_sqr()).sum();
    let mut q = Matrix::identity(dim, dim);
    if u_norm_sqr > 1e-30 {
        for r in 0..dim {
            for c in 0..dim {
                q[(r, c)] -= 2.0 * u[r] * u[c].conj() / u_norm_sqr;
            }
        }
    }
    q *= g;
    UnitaryMatrix::new("prep", q)
}

/// Circuit mapping `|0…0⟩` to `target`.
///
/// Computational basis targets become X gates on the qubits set in the
/// index (an empty circuit for `|0…0⟩`); anything else becomes a single
/// dense gate from [`householder_prep`].
pub fn state_prep(target: &StateVector) -> Result<Circuit> {
    let norm = target.norm();
    if (norm - 1.0).abs() > crate::sim::NORM_TOLERANCE {
        return Err(Error::NotNormalized { norm });
    }
    let n = target.num_qubits();
    let mut circuit = Circuit::new(n).with_label("W");
    if let Some(index) = basis_index(target) {
        for q in (0..n).filter(|q| index >> q & 1 == 1) {
            circuit.push(GateOp::x(q))?;
        }
        return Ok(circuit);
    }
    let gate = householder_prep(target)?;
    circuit.push(GateOp::unitary(gate, (0..n).collect())?)?;
    Ok(circuit)
}

/// Circuit `W` with `W|from⟩ = to`: `state_prep(from)†` then `state_prep(to)`.
pub fn state_transfer(from: &StateVector, to: &StateVector) -> Result<Circuit> {
    if from.num_qubits() != to.num_qubits() {
        return Err(Error::DimensionMismatch { left: from.num_qubits(), right: to.num_qubits() });
    }
    let w = state_prep(from)?.invert().then(&state_prep(to)?)?;
    Ok(w.with_label("W"))
}

/// Index `k` when `target = |k⟩` exactly (phase 1).
fn basis_index(target: &StateVector) -> Option<usize> {
    let a = target.amplitudes();
    let k = a.iter().position(|z| (z - ONE).norm() < BASIS_TOLERANCE)?;
    a.iter().enumerate().all(|(i, z)| i == k || z.norm() < BASIS_TOLERANCE).then_some(k)
}
