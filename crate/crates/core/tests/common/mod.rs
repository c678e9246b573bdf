//! Test-only oracles built from explicit Kronecker products and entry
//! formulas, independent of the simulator's in-place kernels.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use phasekick::{Circuit, GateOp, StateVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type M = DMatrix<Complex64>;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn cis(a: f64) -> Complex64 {
    Complex64::from_polar(1.0, a)
}

/// Kronecker product with `a` on the high-index qubits.
pub fn kron(a: &M, b: &M) -> M {
    a.kronecker(b)
}

/// `⊗_q factors[q]` with qubit 0 least significant.
pub fn kron_qubits(factors: &[M]) -> M {
    factors.iter().rev().fold(M::identity(1, 1), |acc, f| kron(&acc, f))
}

fn projector(bit: bool) -> M {
    let mut p = M::zeros(2, 2);
    let i = bit as usize;
    p[(i, i)] = c(1.0, 0.0);
    p
}

/// Full `2^n` matrix of one gate: `I − Π + Π·embed(U)`.
pub fn gate_matrix(op: &GateOp, n: usize) -> M {
    let dim = 1usize << n;
    let local = op.kind().matrix();
    let targets = op.targets();
    let bits = |x: usize| targets.iter().enumerate().fold(0, |acc, (k, &q)| acc | ((x >> q) & 1) << k);
    let tmask: usize = targets.iter().map(|q| 1 << q).sum();
    let mut embed = M::zeros(dim, dim);
    for r in 0..dim {
        for col in 0..dim {
            if r & !tmask == col & !tmask {
                embed[(r, col)] = local[(bits(r), bits(col))];
            }
        }
    }
    let mut factors = vec![M::identity(2, 2); n];
    for ctl in op.controls() {
        factors[ctl.qubit] = projector(ctl.polarity);
    }
    let proj = kron_qubits(&factors);
    M::identity(dim, dim) - &proj + &proj * embed
}

pub fn circuit_matrix(circuit: &Circuit) -> M {
    let n = circuit.num_qubits();
    circuit.ops().iter().fold(M::identity(1 << n, 1 << n), |acc, op| gate_matrix(op, n) * acc)
}

pub fn apply_matrix(m: &M, s: &StateVector) -> StateVector {
    let v = m * DVector::from_column_slice(s.amplitudes());
    StateVector::from_amplitudes(v.iter().copied().collect()).unwrap()
}

pub fn max_entry_diff(a: &M, b: &M) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_amp_diff(a: &StateVector, b: &StateVector) -> f64 {
    a.amplitudes().iter().zip(b.amplitudes()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// `|⟨a|b⟩|²` computed directly.
pub fn overlap(a: &StateVector, b: &StateVector) -> f64 {
    a.amplitudes().iter().zip(b.amplitudes()).map(|(x, y)| x.conj() * y).sum::<Complex64>().norm_sqr()
}

pub fn random_state(n: usize, rng: &mut ChaCha8Rng) -> StateVector {
    let amps: Vec<Complex64> = (0..1usize << n).map(|_| c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)).collect();
    StateVector::normalized(amps).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Inverse DFT matrix `ω^{-jk}/√N`.
pub fn inverse_dft(m: usize) -> M {
    let n = 1usize << m;
    M::from_fn(n, n, |j, k| {
        cis(-2.0 * std::f64::consts::PI * (j * k) as f64 / n as f64) / (n as f64).sqrt()
    })
}

/// Random circuit of single-qubit primitives and singly-controlled
/// single-qubit gates (the compile-able gate set), avoiding `skip`.
pub fn random_compilable(n: usize, n1: usize, n2: usize, skip: Option<usize>, rng: &mut ChaCha8Rng) -> Circuit {
    let qubits: Vec<usize> = (0..n).filter(|&q| Some(q) != skip).collect();
    let mut ops = Vec::new();
    let one_qubit = |q: usize, rng: &mut ChaCha8Rng| -> GateOp {
        let a = rng.gen_range(-3.0..3.0);
        match rng.gen_range(0..8) {
            0 => GateOp::h(q),
            1 => GateOp::x(q),
            2 => GateOp::y(q),
            3 => GateOp::t(q),
            4 => GateOp::rx(q, a),
            5 => GateOp::ry(q, a),
            6 => GateOp::rz(q, a),
            _ => GateOp::phase(q, a),
        }
    };
    for _ in 0..n1 {
        let q = qubits[rng.gen_range(0..qubits.len())];
        ops.push((rng.gen::<f64>(), one_qubit(q, rng)));
    }
    for _ in 0..n2 {
        let a = qubits[rng.gen_range(0..qubits.len())];
        let mut b = qubits[rng.gen_range(0..qubits.len())];
        while b == a {
            b = qubits[rng.gen_range(0..qubits.len())];
        }
        let polarity = rng.gen_bool(0.8);
        let op = one_qubit(b, rng).with_control(a, polarity).unwrap();
        ops.push((rng.gen::<f64>(), op));
    }
    ops.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    Circuit::from_ops(n, ops.into_iter().map(|(_, op)| op)).unwrap()
}
