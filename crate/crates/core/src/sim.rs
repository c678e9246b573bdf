//! Exact dense statevector simulation.
//!
//! Amplitude index convention: qubit 0 is the least significant bit. Controls
//! are applied as subspace projectors, never by decomposition.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::circuit::{Circuit, GateKind, GateOp};
use crate::error::{Error, Result};
use crate::linalg::{Matrix, ONE, ZERO};
use crate::MAX_QUBITS;

/// Tolerance on `‖ψ‖ − 1` when admitting explicit amplitudes.
pub const NORM_TOLERANCE: f64 = 1e-10;

/// Largest register for which [`circuit_unitary`] will build a dense matrix.
pub const MAX_UNITARY_QUBITS: usize = 12;

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
}

fn check_register(num_qubits: usize) -> Result<()> {
    if num_qubits == 0 {
        return Err(Error::InvalidArgument("a register needs at least one qubit".into()));
    }
    if num_qubits > MAX_QUBITS {
        return Err(Error::TooManyQubits { requested: num_qubits, cap: MAX_QUBITS });
    }
    Ok(())
}

impl StateVector {
    /// Computational basis state `|index⟩`.
    pub fn basis(num_qubits: usize, index: usize) -> Result<Self> {
        check_register(num_qubits)?;
        let dim = 1usize << num_qubits;
        if index >= dim {
            return Err(Error::BasisIndexOutOfRange { index, num_qubits });
        }
        let mut amplitudes = vec![ZERO; dim];
        amplitudes[index] = ONE;
        Ok(StateVector { num_qubits, amplitudes })
    }

    /// `|0…0⟩`.
    pub fn zero(num_qubits: usize) -> Result<Self> {
        Self::basis(num_qubits, 0)
    }

    /// Wraps explicit amplitudes. The norm must be within
    /// [`NORM_TOLERANCE`] of one; the stored vector is renormalized.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::InvalidLength { len });
        }
        let num_qubits = len.trailing_zeros() as usize;
        check_register(num_qubits)?;
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidArgument("non-finite amplitude".into()));
        }
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized { norm });
        }
        let amplitudes = amplitudes.into_iter().map(|z| z / norm).collect();
        Ok(StateVector { num_qubits, amplitudes })
    }

    /// Normalizes arbitrary nonzero amplitudes.
    pub fn normalized(amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalized { norm });
        }
        Self::from_amplitudes(amplitudes.into_iter().map(|z| z / norm).collect())
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amplitudes[index]
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `self ⊗ low`: `low` occupies the low-index qubits.
    pub fn tensor(&self, low: &StateVector) -> Result<StateVector> {
        let num_qubits = self.num_qubits + low.num_qubits;
        check_register(num_qubits)?;
        let mut amplitudes = Vec::with_capacity(1 << num_qubits);
        for hi in &self.amplitudes {
            amplitudes.extend(low.amplitudes.iter().map(|lo| hi * lo));
        }
        Ok(StateVector { num_qubits, amplitudes })
    }

    /// Applies `gate` in place.
    pub fn apply(&mut self, gate: &GateOp) -> Result<()> {
        apply_op(&mut self.amplitudes, self.num_qubits, gate)
    }

    /// Applies every gate of `circuit` in order, in place.
    pub fn apply_circuit(&mut self, circuit: &Circuit) -> Result<()> {
        if circuit.num_qubits() != self.num_qubits {
            return Err(Error::DimensionMismatch { left: self.num_qubits, right: circuit.num_qubits() });
        }
        for op in circuit.ops() {
            apply_op(&mut self.amplitudes, self.num_qubits, op)?;
        }
        Ok(())
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.num_qubits != other.num_qubits {
            return Err(Error::DimensionMismatch { left: self.num_qubits, right: other.num_qubits });
        }
        Ok(self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum())
    }

    /// `|⟨self|other⟩|²`, insensitive to global phase.
    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr().min(1.0))
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|z| z.norm_sqr()).collect()
    }

    /// Outcome distribution of measuring `subset`; outcome bit `k` is the
    /// value of qubit `subset[k]`.
    pub fn marginal_probabilities(&self, subset: &[usize]) -> Result<Vec<f64>> {
        self.check_subset(subset)?;
        let mut table = vec![0.0; 1 << subset.len()];
        for (i, z) in self.amplitudes.iter().enumerate() {
            table[extract_bits(i, subset)] += z.norm_sqr();
        }
        Ok(table)
    }

    /// `Tr(ρ²)` of the reduced state on `subset`.
    pub fn reduced_purity(&self, subset: &[usize]) -> Result<f64> {
        self.check_subset(subset)?;
        if subset.len() == self.num_qubits {
            return Err(Error::InvalidSubset("subset must be a strict subset of the register".into()));
        }
        let rest = self.complement(subset);
        // Pure global state: both sides have equal purity; trace out the larger one.
        let keep: &[usize] = if subset.len() <= rest.len() { subset } else { &rest };
        let gram = self.reduced_density(keep)?;
        Ok(gram.iter().map(|z| z.norm_sqr()).sum::<f64>().min(1.0))
    }

    /// Reduced density matrix on `subset` (row index bit `k` is `subset[k]`).
    pub fn reduced_density(&self, subset: &[usize]) -> Result<Matrix> {
        self.check_subset(subset)?;
        let rest = self.complement(subset);
        let keep_offsets = deposit_table(subset);
        let rest_offsets = deposit_table(&rest);
        let d = keep_offsets.len();
        let mut rho = Matrix::zeros(d, d);
        for &r in &rest_offsets {
            for (i, &oi) in keep_offsets.iter().enumerate() {
                let ai = self.amplitudes[oi | r];
                if ai == ZERO {
                    continue;
                }
                for (j, &oj) in keep_offsets.iter().enumerate() {
                    rho[(i, j)] += ai * self.amplitudes[oj | r].conj();
                }
            }
        }
        Ok(rho)
    }

    /// `⟨t|ρ_subset|t⟩` for a pure `target` on the subset.
    pub fn reduced_fidelity(&self, subset: &[usize], target: &StateVector) -> Result<f64> {
        self.check_subset(subset)?;
        if target.num_qubits != subset.len() {
            return Err(Error::DimensionMismatch { left: subset.len(), right: target.num_qubits });
        }
        let rest = self.complement(subset);
        let keep_offsets = deposit_table(subset);
        let rest_offsets = deposit_table(&rest);
        let total: f64 = rest_offsets
            .iter()
            .map(|&r| {
                keep_offsets
                    .iter()
                    .zip(&target.amplitudes)
                    .map(|(&o, t)| t.conj() * self.amplitudes[o | r])
                    .sum::<Complex64>()
                    .norm_sqr()
            })
            .sum();
        Ok(total.min(1.0))
    }

    /// `(⟨t|_subset ⊗ I)|self⟩` as amplitudes over the remaining qubits in
    /// ascending order. Unnormalized; its squared norm is the reduced fidelity.
    pub fn partial_inner(&self, subset: &[usize], target: &StateVector) -> Result<Vec<Complex64>> {
        self.check_subset(subset)?;
        if target.num_qubits != subset.len() {
            return Err(Error::DimensionMismatch { left: subset.len(), right: target.num_qubits });
        }
        let rest = self.complement(subset);
        let keep_offsets = deposit_table(subset);
        Ok(deposit_table(&rest)
            .iter()
            .map(|&r| keep_offsets.iter().zip(&target.amplitudes).map(|(&o, t)| t.conj() * self.amplitudes[o | r]).sum())
            .collect())
    }

    /// Finite-shot measurement of `subset`, deterministic in `seed`.
    pub fn sample(&self, subset: &[usize], shots: u64, seed: u64) -> Result<BTreeMap<usize, u64>> {
        if shots == 0 {
            return Err(Error::ZeroShots);
        }
        let probs = self.marginal_probabilities(subset)?;
        sample_distribution(&probs, shots, seed)
    }

    fn check_subset(&self, subset: &[usize]) -> Result<()> {
        if subset.is_empty() {
            return Err(Error::InvalidSubset("subset is empty".into()));
        }
        for (i, &q) in subset.iter().enumerate() {
            if q >= self.num_qubits {
                return Err(Error::QubitOutOfRange { qubit: q, num_qubits: self.num_qubits });
            }
            if subset[..i].contains(&q) {
                return Err(Error::InvalidSubset(format!("qubit {q} listed twice")));
            }
        }
        Ok(())
    }

    fn complement(&self, subset: &[usize]) -> Vec<usize> {
        (0..self.num_qubits).filter(|q| !subset.contains(q)).collect()
    }
}

/// Draws `shots` outcomes from an explicit distribution.
pub fn sample_distribution(probs: &[f64], shots: u64, seed: u64) -> Result<BTreeMap<usize, u64>> {
    if shots == 0 {
        return Err(Error::ZeroShots);
    }
    let dist = WeightedIndex::new(probs)
        .map_err(|e| Error::InvalidArgument(format!("bad outcome distribution: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = BTreeMap::new();
    for _ in 0..shots {
        *counts.entry(dist.sample(&mut rng)).or_insert(0) += 1;
    }
    Ok(counts)
}

fn extract_bits(index: usize, qubits: &[usize]) -> usize {
    qubits.iter().enumerate().fold(0, |acc, (k, &q)| acc | (((index >> q) & 1) << k))
}

/// `table[j]` = full-register offset with bit `k` of `j` placed at `qubits[k]`.
fn deposit_table(qubits: &[usize]) -> Vec<usize> {
    (0..1usize << qubits.len())
        .map(|j| qubits.iter().enumerate().fold(0, |acc, (k, &q)| acc | (((j >> k) & 1) << q)))
        .collect()
}

fn apply_op(amps: &mut [Complex64], num_qubits: usize, op: &GateOp) -> Result<()> {
    op.check_range(num_qubits)?;
    let (ctrl_mask, ctrl_value) = op.controls().iter().fold((0usize, 0usize), |(m, v), c| {
        (m | 1 << c.qubit, if c.polarity { v | 1 << c.qubit } else { v })
    });
    if let Some(m) = op.kind().matrix2() {
        let bit = 1usize << op.targets()[0];
        for i in 0..amps.len() {
            if i & bit != 0 || i & ctrl_mask != ctrl_value {
                continue;
            }
            let (a0, a1) = (amps[i], amps[i | bit]);
            amps[i] = m[0][0] * a0 + m[0][1] * a1;
            amps[i | bit] = m[1][0] * a0 + m[1][1] * a1;
        }
        return Ok(());
    }

    let owned;
    let matrix: &Matrix = match op.kind() {
        GateKind::Unitary(u) => u.matrix(),
        other => {
            owned = other.matrix();
            &owned
        }
    };
    let offsets = deposit_table(op.targets());
    let target_mask = offsets[offsets.len() - 1];
    let d = offsets.len();
    let mut gathered = vec![ZERO; d];
    for i in 0..amps.len() {
        if i & target_mask != 0 || i & ctrl_mask != ctrl_value {
            continue;
        }
        for (g, &o) in gathered.iter_mut().zip(&offsets) {
            *g = amps[i | o];
        }
        for (r, &o) in offsets.iter().enumerate() {
            let mut acc = ZERO;
            for (c, g) in gathered.iter().enumerate() {
                acc += matrix[(r, c)] * g;
            }
            amps[i | o] = acc;
        }
    }
    Ok(())
}

/// `|index⟩` on `num_qubits` qubits.
pub fn new_basis_state(num_qubits: usize, index: usize) -> Result<StateVector> {
    StateVector::basis(num_qubits, index)
}

/// Returns `gate · state`.
pub fn apply_gate(mut state: StateVector, gate: &GateOp) -> Result<StateVector> {
    state.apply(gate)?;
    Ok(state)
}

/// Returns `circuit · state`.
pub fn apply_circuit(mut state: StateVector, circuit: &Circuit) -> Result<StateVector> {
    state.apply_circuit(circuit)?;
    Ok(state)
}

pub fn fidelity_up_to_global_phase(a: &StateVector, b: &StateVector) -> Result<f64> {
    a.fidelity(b)
}

pub fn reduced_purity(state: &StateVector, subset: &[usize]) -> Result<f64> {
    state.reduced_purity(subset)
}

pub fn marginal_probabilities(state: &StateVector, subset: &[usize]) -> Result<Vec<f64>> {
    state.marginal_probabilities(subset)
}

pub fn sample(state: &StateVector, subset: &[usize], shots: u64, seed: u64) -> Result<BTreeMap<usize, u64>> {
    state.sample(subset, shots, seed)
}

/// Dense matrix of `circuit`, built column by column from basis states.
pub fn circuit_unitary(circuit: &Circuit) -> Result<Matrix> {
    let n = circuit.num_qubits();
    if n > MAX_UNITARY_QUBITS {
        return Err(Error::TooManyQubits { requested: n, cap: MAX_UNITARY_QUBITS });
    }
    let dim = 1usize << n;
    let mut m = Matrix::zeros(dim, dim);
    for col in 0..dim {
        let mut s = StateVector::basis(n, col)?;
        s.apply_circuit(circuit)?;
        for (row, z) in s.amplitudes.iter().enumerate() {
            m[(row, col)] = *z;
        }
    }
    Ok(m)
}

/// Total variation distance between two distributions of equal length.
pub fn total_variation(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::InvalidArgument(format!("distribution lengths {} and {} differ", p.len(), q.len())));
    }
    Ok(0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>())
}
