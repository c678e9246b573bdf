//! Order finding with an uncontrolled first phase bit.
//!
//! `M_a|x⟩ = |a·x mod N⟩` for `x < N` and `|x⟩` otherwise. The register
//! state `|0…0⟩` is a fixed point (`φ = 0`) and `W = X` on qubit 0 maps it
//! to `|1⟩`, so the block carrying `M_a^{2^0}` can use the uncontrolled
//! gadget. The remaining blocks keep their controlled powers
//! `M_{a^{2^k} mod N}`.
//!
//! Layout matches [`crate::qpe`]: system qubits `0..n_sys`, ancilla for
//! power `2^k` at `n_sys + k`, inverse QFT on the ancillas.

use std::collections::BTreeMap;

use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::circuit::{inverse_qft, Circuit, GateKind, GateOp, UnitaryMatrix};
use crate::error::{Error, Result};
use crate::linalg::{cis, Matrix, ONE};
use crate::sim::StateVector;
use crate::MAX_QUBITS;

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn lcm(a: u64, b: u64) -> Option<u64> {
    (a / gcd(a, b)).checked_mul(b)
}

pub fn mod_pow(base: u64, mut exp: u64, modulus: u64) -> u64 {
    let m = modulus as u128;
    let mut b = base as u128 % m;
    let mut acc = 1u128 % m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        exp >>= 1;
    }
    acc as u64
}

/// `⌈log₂ N⌉`.
pub fn system_qubits(modulus: u64) -> usize {
    (64 - (modulus - 1).leading_zeros()) as usize
}

fn check_coprime(a: u64, modulus: u64) -> Result<()> {
    let g = gcd(a, modulus);
    if g != 1 {
        return Err(Error::NotCoprime { a, modulus, gcd: g });
    }
    Ok(())
}

fn check_modulus(modulus: u64) -> Result<()> {
    if modulus < 2 {
        return Err(Error::InvalidArgument(format!("modulus must be at least 2, got {modulus}")));
    }
    if system_qubits(modulus) > MAX_QUBITS {
        return Err(Error::TooManyQubits { requested: system_qubits(modulus), cap: MAX_QUBITS });
    }
    Ok(())
}

/// Dense permutation gate `M_a` on qubits `0..⌈log₂N⌉`, labelled `label`.
fn mult_gate(a: u64, modulus: u64, label: String) -> Result<GateOp> {
    check_modulus(modulus)?;
    check_coprime(a, modulus)?;
    let n = system_qubits(modulus);
    let dim = 1usize << n;
    let mut m = Matrix::zeros(dim, dim);
    for x in 0..dim {
        let y = if (x as u64) < modulus { ((a as u128 * x as u128) % modulus as u128) as usize } else { x };
        m[(y, x)] = ONE;
    }
    GateOp::unitary(UnitaryMatrix::new(label, m)?, (0..n).collect())
}

pub fn modular_mult_unitary(a: u64, modulus: u64) -> Result<GateOp> {
    mult_gate(a, modulus, format!("M_{a}"))
}

/// Smallest `r ≥ 1` with `a^r ≡ 1 (mod N)`, by brute force.
pub fn classical_order(a: u64, modulus: u64) -> Result<u64> {
    check_modulus(modulus)?;
    check_coprime(a, modulus)?;
    let mut x = a % modulus;
    let mut r = 1;
    while x != 1 % modulus {
        x = ((x as u128 * a as u128) % modulus as u128) as u64;
        r += 1;
    }
    Ok(r)
}

/// `|ψ_j⟩ = r^{-1/2} Σ_k e^{−2πijk/r} |a^k mod N⟩`, eigenvalue `e^{2πij/r}`.
pub fn eigenvector_psi(j: u64, a: u64, modulus: u64) -> Result<StateVector> {
    let r = classical_order(a, modulus)?;
    if j >= r {
        return Err(Error::InvalidArgument(format!("eigenvector index {j} must be below the order {r}")));
    }
    let mut amps = vec![crate::linalg::ZERO; 1 << system_qubits(modulus)];
    let norm = (r as f64).sqrt();
    for k in 0..r {
        let x = mod_pow(a, k, modulus) as usize;
        let angle = -2.0 * std::f64::consts::PI * ((j * k) % r) as f64 / r as f64;
        amps[x] += cis(angle) / norm;
    }
    StateVector::from_amplitudes(amps)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct OrderFindingSpec {
    pub modulus: u64,
    pub a: u64,
    pub m: usize,
    pub seed: u64,
}

impl OrderFindingSpec {
    /// Requires `N ≥ 3`, `1 ≤ a < N`, `gcd(a, N) = 1` and a register that
    /// fits the simulator. `a = 1` is accepted (order 1).
    pub fn new(modulus: u64, a: u64, m: usize, seed: u64) -> Result<Self> {
        if modulus < 3 {
            return Err(Error::InvalidArgument(format!("modulus must be at least 3, got {modulus}")));
        }
        if a == 0 || a >= modulus {
            return Err(Error::InvalidArgument(format!("base must satisfy 1 <= a < N, got a = {a}")));
        }
        check_modulus(modulus)?;
        check_coprime(a, modulus)?;
        if m == 0 {
            return Err(Error::InvalidArgument("at least one phase bit is required".into()));
        }
        let requested = system_qubits(modulus) + m;
        if requested > MAX_QUBITS {
            return Err(Error::TooManyQubits { requested, cap: MAX_QUBITS });
        }
        Ok(OrderFindingSpec { modulus, a, m, seed })
    }

    pub fn system_qubits(&self) -> usize {
        system_qubits(self.modulus)
    }

    pub fn num_qubits(&self) -> usize {
        self.system_qubits() + self.m
    }

    pub fn ancillas(&self) -> Vec<usize> {
        let n = self.system_qubits();
        (n..n + self.m).collect()
    }

    /// `M_{a^{2^k} mod N}`, labelled as the power of `M_a`.
    fn power_gate(&self, k: usize) -> Result<GateOp> {
        let base = mod_pow(self.a, 1u64.checked_shl(k as u32).ok_or(Error::Overflow("power exponent"))?, self.modulus);
        mult_gate(base, self.modulus, format!("M_{}^{}", self.a, 1u64 << k))
    }
}

fn finish(spec: &OrderFindingSpec, mut c: Circuit) -> Result<Circuit> {
    c.append_mapped(&inverse_qft(spec.m)?, &spec.ancillas())?;
    Ok(c)
}

/// Hybrid circuit: the `2^0` block is `1-c-X · M_a · open-c-X` on qubit 0,
/// the others are controlled powers. Starts from `|0…0⟩`.
pub fn build_hybrid_order_circuit(spec: &OrderFindingSpec) -> Result<Circuit> {
    let n = spec.system_qubits();
    let mut c = Circuit::new(spec.num_qubits()).with_label("hybrid order finding");
    for k in 0..spec.m {
        let a = n + k;
        c.push(GateOp::h(a))?;
        if k == 0 {
            c.push(GateOp::x(0).with_control(a, true)?)?;
            c.push(modular_mult_unitary(spec.a, spec.modulus)?)?;
            c.push(GateOp::x(0).with_control(a, false)?)?;
        } else {
            c.push(spec.power_gate(k)?.with_control(a, true)?)?;
        }
    }
    finish(spec, c)
}

/// Fully controlled order finding. Starts from `|1⟩` on the system.
pub fn build_controlled_order_circuit(spec: &OrderFindingSpec) -> Result<Circuit> {
    let n = spec.system_qubits();
    let mut c = Circuit::new(spec.num_qubits()).with_label("controlled order finding");
    for k in 0..spec.m {
        c.push(GateOp::h(n + k))?;
        c.push(spec.power_gate(k)?.with_control(n + k, true)?)?;
    }
    finish(spec, c)
}

/// Final joint states `(hybrid from |0…0⟩, controlled from |1⟩)`.
pub fn final_states(spec: &OrderFindingSpec) -> Result<(StateVector, StateVector)> {
    let anc = StateVector::zero(spec.m)?;
    let mut hybrid = anc.tensor(&StateVector::zero(spec.system_qubits())?)?;
    hybrid.apply_circuit(&build_hybrid_order_circuit(spec)?)?;
    let mut controlled = anc.tensor(&StateVector::basis(spec.system_qubits(), 1)?)?;
    controlled.apply_circuit(&build_controlled_order_circuit(spec)?)?;
    Ok((hybrid, controlled))
}

/// Outcome distribution of the hybrid circuit.
pub fn outcome_distribution(spec: &OrderFindingSpec) -> Result<Vec<f64>> {
    final_states(spec).and_then(|(h, _)| h.marginal_probabilities(&spec.ancillas()))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct BlockCounts {
    /// Modular-multiplication gates applied without controls.
    pub uncontrolled: usize,
    /// Modular-multiplication gates with a control.
    pub controlled: usize,
}

/// Counts the dense `M_…` gates of a circuit by whether they carry controls.
pub fn block_counts(circuit: &Circuit) -> BlockCounts {
    circuit.ops().iter().fold(BlockCounts::default(), |mut acc, op| {
        if let GateKind::Unitary(g) = op.kind() {
            if g.label().starts_with("M_") {
                if op.controls().is_empty() {
                    acc.uncontrolled += 1;
                } else {
                    acc.controlled += 1;
                }
            }
        }
        acc
    })
}

/// Continued-fraction post-processing of outcome `y` of an `m`-bit register:
/// the first convergent `p/q` with `q ≤ N` and `|y/2^m − p/q| ≤ 1/2^{m+1}`.
pub fn recover_order(y: u64, m: usize, modulus: u64) -> Option<u64> {
    if y == 0 || m >= 64 {
        return None;
    }
    let den = 1u128 << m;
    let y = y as u128;
    if y >= den {
        return None;
    }
    let (mut h_prev, mut h) = (0u128, 1u128);
    let (mut k_prev, mut k) = (1u128, 0u128);
    let (mut num, mut rest) = (y, den);
    while rest != 0 {
        let term = num / rest;
        (h_prev, h) = (h, term * h + h_prev);
        (k_prev, k) = (k, term * k + k_prev);
        (num, rest) = (rest, num % rest);
        if k > modulus as u128 {
            return None;
        }
        if (y * k).abs_diff(h * den) * 2 <= k {
            return Some(k as u64);
        }
    }
    None
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrderResult {
    pub order: Option<u64>,
    pub runs_used: usize,
    pub outcome_histogram: BTreeMap<usize, u64>,
    pub candidates: Vec<u64>,
    pub controlled_block_count: usize,
    pub uncontrolled_block_count: usize,
}

/// Reduces `l` (with `a^l ≡ 1`) to the least such exponent.
fn minimal_order(a: u64, modulus: u64, mut l: u64) -> u64 {
    let mut p = 2;
    let mut rest = l;
    while p * p <= rest {
        if rest.is_multiple_of(p) {
            while rest.is_multiple_of(p) {
                rest /= p;
            }
            while l.is_multiple_of(p) && mod_pow(a, l / p, modulus) == 1 {
                l /= p;
            }
        }
        p += 1;
    }
    if rest > 1 && l.is_multiple_of(rest) && mod_pow(a, l / rest, modulus) == 1 {
        l /= rest;
    }
    l
}

/// Samples one outcome per run (run `i` draws from stream `i` of a ChaCha
/// generator keyed by `spec.seed`), recovers candidates, and stops once the
/// lcm of the candidates `L` satisfies `a^L ≡ 1 (mod N)`.
pub fn find_order(spec: &OrderFindingSpec, runs: usize) -> Result<OrderResult> {
    if runs == 0 {
        return Err(Error::InvalidArgument("at least one run is required".into()));
    }
    let circuit = build_hybrid_order_circuit(spec)?;
    let blocks = block_counts(&circuit);
    let probs = outcome_distribution(spec)?;
    let dist = WeightedIndex::new(&probs).map_err(|e| Error::InvalidArgument(format!("bad distribution: {e}")))?;
    let mut result = OrderResult {
        order: None,
        runs_used: 0,
        outcome_histogram: BTreeMap::new(),
        candidates: Vec::new(),
        controlled_block_count: blocks.controlled,
        uncontrolled_block_count: blocks.uncontrolled,
    };
    let mut l = 1u64;
    for run in 0..runs {
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        rng.set_stream(run as u64);
        let y = dist.sample(&mut rng);
        *result.outcome_histogram.entry(y).or_default() += 1;
        result.runs_used = run + 1;
        if let Some(q) = recover_order(y as u64, spec.m, spec.modulus) {
            result.candidates.push(q);
            l = lcm(l, q).ok_or(Error::Overflow("candidate lcm"))?;
        }
        if mod_pow(spec.a, l, spec.modulus) == 1 {
            result.order = Some(minimal_order(spec.a, spec.modulus, l));
            break;
        }
    }
    Ok(result)
}
