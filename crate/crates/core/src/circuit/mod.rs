//! Circuit data model and transformations.
//!
//! Qubit 0 is the least significant bit of a basis index everywhere in this
//! crate. A circuit over three qubits acting on basis index `5 = 0b101`
//! therefore sees qubits 0 and 2 in |1⟩ and qubit 1 in |0⟩.

mod compile;
mod gate;
mod json;
mod prep;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::MAX_QUBITS;

pub use compile::compile_controlled;
pub use gate::{Control, GateKind, GateOp, UnitaryMatrix, UNITARITY_TOLERANCE};
pub use prep::{householder_prep, state_prep, state_transfer};

/// Single- and two-qubit gate tallies.
///
/// Arity counts targets plus controls. Gates of arity three or more are not
/// costed and land in `rejected`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateCountReport {
    pub n1: u64,
    pub n2: u64,
    pub rejected: u64,
}

impl GateCountReport {
    /// `true` when every gate was costed.
    pub fn is_costable(&self) -> bool {
        self.rejected == 0
    }

    pub fn total(&self) -> u64 {
        self.n1 + self.n2 + self.rejected
    }

    fn scaled(self, k: u64) -> Self {
        GateCountReport { n1: self.n1 * k, n2: self.n2 * k, rejected: self.rejected * k }
    }
}

impl std::ops::Add for GateCountReport {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        GateCountReport { n1: self.n1 + o.n1, n2: self.n2 + o.n2, rejected: self.rejected + o.rejected }
    }
}

/// An ordered gate sequence over a fixed register.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    num_qubits: usize,
    ops: Vec<GateOp>,
    label: String,
}

impl Circuit {
    pub fn new(num_qubits: usize) -> Self {
        Circuit { num_qubits, ops: Vec::new(), label: String::new() }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn from_ops(num_qubits: usize, ops: impl IntoIterator<Item = GateOp>) -> Result<Self> {
        let mut c = Circuit::new(num_qubits);
        for op in ops {
            c.push(op)?;
        }
        Ok(c)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn ops(&self) -> &[GateOp] {
        &self.ops
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn push(&mut self, op: GateOp) -> Result<()> {
        op.check_range(self.num_qubits)?;
        self.ops.push(op);
        Ok(())
    }

    /// Appends `other`, whose qubit `i` maps to qubit `i` of `self`.
    pub fn append(&mut self, other: &Circuit) -> Result<()> {
        if other.num_qubits > self.num_qubits {
            return Err(Error::DimensionMismatch { left: self.num_qubits, right: other.num_qubits });
        }
        self.ops.extend(other.ops.iter().cloned());
        Ok(())
    }

    /// Appends `other` with its qubit `i` relabelled to `map[i]`.
    pub fn append_mapped(&mut self, other: &Circuit, map: &[usize]) -> Result<()> {
        if map.len() != other.num_qubits {
            return Err(Error::DimensionMismatch { left: map.len(), right: other.num_qubits });
        }
        for op in &other.ops {
            self.push(op.remapped(map)?)?;
        }
        Ok(())
    }

    /// Same gates on a larger register.
    pub fn widened(&self, num_qubits: usize) -> Result<Circuit> {
        if num_qubits < self.num_qubits {
            return Err(Error::DimensionMismatch { left: num_qubits, right: self.num_qubits });
        }
        Ok(Circuit { num_qubits, ops: self.ops.clone(), label: self.label.clone() })
    }

    /// `self` followed by `other`.
    pub fn then(&self, other: &Circuit) -> Result<Circuit> {
        if other.num_qubits != self.num_qubits {
            return Err(Error::DimensionMismatch { left: self.num_qubits, right: other.num_qubits });
        }
        let mut out = self.clone();
        out.ops.extend(other.ops.iter().cloned());
        Ok(out)
    }

    /// The circuit repeated `k` times. `k = 0` is rejected; ask for an empty
    /// circuit explicitly if the identity is wanted.
    pub fn power(&self, k: u64) -> Result<Circuit> {
        if k == 0 {
            return Err(Error::InvalidArgument("circuit power must be at least 1".into()));
        }
        let k_usize = usize::try_from(k).map_err(|_| Error::Overflow("circuit power"))?;
        let total = self.ops.len().checked_mul(k_usize).ok_or(Error::Overflow("circuit power"))?;
        let mut ops = Vec::with_capacity(total);
        for _ in 0..k {
            ops.extend(self.ops.iter().cloned());
        }
        let label = if self.label.is_empty() { String::new() } else { format!("({})^{k}", self.label) };
        Ok(Circuit { num_qubits: self.num_qubits, ops, label })
    }

    /// Reversed order with every gate conjugate-transposed.
    pub fn invert(&self) -> Circuit {
        let label = if self.label.is_empty() { String::new() } else { format!("({})†", self.label) };
        Circuit {
            num_qubits: self.num_qubits,
            ops: self.ops.iter().rev().map(GateOp::adjoint).collect(),
            label,
        }
    }

    /// Exact controlled version: every gate gains the extra control.
    ///
    /// This is the semantic (projector) form used by the simulator; see
    /// [`compile_controlled`] for the gate-level decomposition.
    pub fn controlled(&self, qubit: usize, polarity: bool) -> Result<Circuit> {
        if qubit >= self.num_qubits {
            return Err(Error::QubitOutOfRange { qubit, num_qubits: self.num_qubits });
        }
        let ops = self
            .ops
            .iter()
            .map(|op| op.clone().with_control(qubit, polarity))
            .collect::<Result<Vec<_>>>()?;
        Ok(Circuit { num_qubits: self.num_qubits, ops, label: self.label.clone() })
    }

    pub fn count_gates(&self) -> GateCountReport {
        self.ops.iter().fold(GateCountReport::default(), |mut acc, op| {
            match op.arity() {
                0 => {}
                1 => acc.n1 += 1,
                2 => acc.n2 += 1,
                _ => acc.rejected += 1,
            }
            acc
        })
    }
}

/// Gate tallies of `circuit`.
pub fn count_gates(circuit: &Circuit) -> GateCountReport {
    circuit.count_gates()
}

/// Tallies of `power(circuit, k)` without materializing it.
pub fn count_gates_of_power(circuit: &Circuit, k: u64) -> GateCountReport {
    circuit.count_gates().scaled(k)
}

/// Forward quantum Fourier transform on `m` qubits:
/// `|j⟩ ↦ 2^{-m/2} Σ_k e^{2πi jk/2^m} |k⟩` under the LSB-first convention.
///
/// Built as Hadamards and controlled phases from the top qubit down, then a
/// swap layer reversing qubit order, so the circuit equals the DFT matrix
/// exactly rather than up to a bit reversal.
pub fn qft(m: usize) -> Result<Circuit> {
    if m == 0 || m > MAX_QUBITS {
        return Err(Error::InvalidArgument(format!("qft size {m} outside 1..={MAX_QUBITS}")));
    }
    let mut c = Circuit::new(m).with_label(format!("QFT_{m}"));
    for q in (0..m).rev() {
        c.push(GateOp::h(q))?;
        for p in (0..q).rev() {
            let angle = std::f64::consts::PI / (1u64 << (q - p)) as f64;
            c.push(GateOp::cphase(p, q, angle))?;
        }
    }
    for q in 0..m / 2 {
        c.push(GateOp::swap(q, m - 1 - q)?)?;
    }
    Ok(c)
}

/// Inverse quantum Fourier transform on `m` qubits.
///
/// Applied to the product state whose qubit `l` is `|0⟩ + e^{2πi·j·2^l/2^m}|1⟩`
/// it returns the basis state `|j⟩`. Worked 3-bit example: for `j = 5`
/// (binary fraction 0.101), qubit 0 carries phase 5/8, qubit 1 carries
/// 10/8 ≡ 1/4, qubit 2 carries 20/8 ≡ 1/2, and the output index is
/// `5 = 0b101`: qubit 0 holds the last binary digit of the fraction and
/// qubit `m-1` the first.
pub fn inverse_qft(m: usize) -> Result<Circuit> {
    Ok(qft(m)?.invert().with_label(format!("QFT†_{m}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_by_arity() {
        let c = Circuit::from_ops(3, [GateOp::h(0), GateOp::x(1)]).unwrap();
        assert_eq!(c.count_gates(), GateCountReport { n1: 2, n2: 0, rejected: 0 });
        let c = Circuit::from_ops(3, [GateOp::h(0), GateOp::cx(0, 1), GateOp::cx(1, 2)]).unwrap();
        assert_eq!(c.count_gates(), GateCountReport { n1: 1, n2: 2, rejected: 0 });
        let toffoli = GateOp::cx(0, 1).with_control(2, true).unwrap();
        let c = Circuit::from_ops(3, [toffoli, GateOp::swap(0, 2).unwrap()]).unwrap();
        let r = c.count_gates();
        assert_eq!(r, GateCountReport { n1: 0, n2: 1, rejected: 1 });
        assert!(!r.is_costable());
        assert_eq!(r.total(), 2);
    }

    #[test]
    fn push_checks_range() {
        let mut c = Circuit::new(2);
        assert_eq!(c.push(GateOp::x(2)), Err(Error::QubitOutOfRange { qubit: 2, num_qubits: 2 }));
    }

    #[test]
    fn power_and_invert_structure() {
        let c = Circuit::from_ops(2, [GateOp::h(0), GateOp::phase(1, 0.3)]).unwrap();
        assert_eq!(c.power(1).unwrap().ops(), c.ops());
        assert!(c.power(0).is_err());
        assert_eq!(c.power(3).unwrap().count_gates(), count_gates_of_power(&c, 3));
        let inv = c.invert();
        assert_eq!(inv.ops()[0], GateOp::phase(1, -0.3));
        assert_eq!(inv.ops()[1], GateOp::h(0));
        assert_eq!(Circuit::from_ops(1, [GateOp::h(0)]).unwrap().invert().ops(), &[GateOp::h(0)]);
    }

    #[test]
    fn qft_one_bit_is_hadamard() {
        assert_eq!(inverse_qft(1).unwrap().ops(), &[GateOp::h(0)]);
        assert!(inverse_qft(0).is_err());
        assert!(inverse_qft(MAX_QUBITS + 1).is_err());
        assert!(inverse_qft(MAX_QUBITS).is_ok());
    }

    #[test]
    fn controlled_adds_control_everywhere() {
        let c = Circuit::from_ops(3, [GateOp::h(0), GateOp::cx(0, 1)]).unwrap();
        let cc = c.controlled(2, false).unwrap();
        assert!(cc.ops().iter().all(|op| op.controls().contains(&Control::zero(2))));
        assert!(c.controlled(1, true).is_err());
        assert!(c.controlled(3, true).is_err());
    }
}
