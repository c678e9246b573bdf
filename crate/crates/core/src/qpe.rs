//! m-bit phase estimation, uncontrolled and standard.
//!
//! Layout: system qubits `0..n`, then one ancilla per bit. The ancilla at
//! qubit `n + k` carries the block with `U^{2^k}`, so after the blocks it
//! holds `|0⟩ + e^{2πi·2^k(θ−φ)}|1⟩` and the inverse QFT on the ancillas
//! leaves the outcome `y = Σ_k bit_k·2^k ≈ (θ − φ)·2^m`.
//!
//! Blocks run in time order `t = 0..m`, with exponent `e(t)` (default
//! `e(t) = t`). Each uncontrolled block is
//! `H(a) · 1-c-W · U^{2^e(t)} · reset`, where the reset is 1-c-W† for
//! intermediate blocks and, for the last block, open-c-W unless
//! [`FinalBlock::ControlledWDagger`] is requested.
//!
//! Each uncontrolled block also multiplies the state by `e^{2πi·2^k φ}`, so
//! the pre-QFT ancilla state carries an overall `e^{2πi(2^m−1)φ}`.

use serde::Serialize;

use crate::circuit::{inverse_qft, state_transfer, Circuit, GateKind, GateOp, UnitaryMatrix};
use crate::linalg::Matrix;
use crate::error::{Error, Result};
use crate::kickback::{eigen_residual, SystemSpec};
use crate::sim::{total_variation, StateVector};
use crate::{wrap_phase, EIGENSTATE_TOLERANCE, MAX_QUBITS};

/// Tolerance for treating `(θ − φ)·2^m` as an integer.
const GRID_TOLERANCE: f64 = 1e-9;

/// Purity below `1 − PURITY_TOLERANCE` counts as residual entanglement.
const PURITY_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FinalBlock {
    /// System ends in `|ψ⟩`.
    #[default]
    OpenControlledW,
    /// System ends in `|φ⟩`.
    ControlledWDagger,
}

/// How intermediate blocks return the system to `|φ⟩`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Reset {
    /// A single 1-controlled-W†.
    #[default]
    ControlledWDagger,
    /// Open-controlled-W followed by an uncontrolled W†. Same action, one
    /// more gate; it passes through the intermediate states one would write
    /// down by hand.
    OpenControlledWThenWDagger,
}

#[derive(Clone, Debug)]
pub struct QpeSpec {
    pub m: usize,
    pub system: SystemSpec,
    pub final_block: FinalBlock,
    pub reset: Reset,
    power_order: Vec<usize>,
}

impl QpeSpec {
    pub fn new(m: usize, system: SystemSpec) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidArgument("at least one phase bit is required".into()));
        }
        let requested = system.num_qubits() + m;
        if requested > MAX_QUBITS {
            return Err(Error::TooManyQubits { requested, cap: MAX_QUBITS });
        }
        if m >= 64 {
            return Err(Error::Overflow("U power 2^m"));
        }
        Ok(QpeSpec {
            m,
            system,
            final_block: FinalBlock::default(),
            reset: Reset::default(),
            power_order: (0..m).collect(),
        })
    }

    pub fn with_final_block(mut self, final_block: FinalBlock) -> Self {
        self.final_block = final_block;
        self
    }

    pub fn with_reset(mut self, reset: Reset) -> Self {
        self.reset = reset;
        self
    }

    /// Exponent order: block `t` in time applies `U^{2^order[t]}`.
    pub fn with_power_order(mut self, order: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; self.m];
        if order.len() != self.m || !order.iter().all(|&e| e < self.m && !std::mem::replace(&mut seen[e], true)) {
            return Err(Error::InvalidArgument(format!("power order {order:?} is not a permutation of 0..{}", self.m)));
        }
        self.power_order = order;
        Ok(self)
    }

    pub fn power_order(&self) -> &[usize] {
        &self.power_order
    }

    pub fn num_qubits(&self) -> usize {
        self.system.num_qubits() + self.m
    }

    /// Ancilla qubit indices, least significant bit first.
    pub fn ancillas(&self) -> Vec<usize> {
        let n = self.system.num_qubits();
        (n..n + self.m).collect()
    }

    /// `|0…0⟩_a ⊗ |φ⟩_s`.
    pub fn initial_state(&self) -> Result<StateVector> {
        StateVector::zero(self.m)?.tensor(self.system.reference())
    }
}

/// One named segment of a circuit.
#[derive(Clone, Debug)]
pub struct Stage {
    pub label: String,
    pub circuit: Circuit,
}

fn stage(label: impl Into<String>, circuit: Circuit) -> Stage {
    Stage { label: label.into(), circuit }
}

fn single(total: usize, op: GateOp) -> Result<Circuit> {
    Circuit::from_ops(total, [op])
}

/// `u^e`. A circuit that is a single uncontrolled dense gate is raised to
/// the power as a matrix (by squaring) and stays one gate; anything else is
/// repeated `e` times.
pub fn unitary_power(u: &Circuit, e: u64) -> Result<Circuit> {
    if let [op] = u.ops() {
        if let (GateKind::Unitary(g), []) = (op.kind(), op.controls()) {
            if e == 0 {
                return Err(Error::InvalidArgument("circuit power must be at least 1".into()));
            }
            let mut base = g.matrix().clone();
            let mut acc: Option<Matrix> = None;
            let mut k = e;
            while k > 0 {
                if k & 1 == 1 {
                    acc = Some(match acc {
                        Some(a) => &base * a,
                        None => base.clone(),
                    });
                }
                k >>= 1;
                if k > 0 {
                    base = &base * &base;
                }
            }
            let label = if e == 1 { g.label().to_string() } else { format!("{}^{e}", g.label()) };
            let gate = UnitaryMatrix::new(label, acc.expect("e >= 1"))?;
            return Circuit::from_ops(u.num_qubits(), [GateOp::unitary(gate, op.targets().to_vec())?]);
        }
    }
    u.power(e)
}

/// The uncontrolled blocks, one stage per gate group, without the inverse QFT.
pub fn uncontrolled_qpe_stages(spec: &QpeSpec) -> Result<Vec<Stage>> {
    let n = spec.system.num_qubits();
    let total = spec.num_qubits();
    let w = spec.system.w().widened(total)?;
    let w_dag = w.invert();
    let u = spec.system.u().widened(total)?;
    let mut stages = Vec::new();
    for (t, &k) in spec.power_order.iter().enumerate() {
        let a = n + k;
        let last = t + 1 == spec.m;
        stages.push(stage(format!("H(a{k})"), single(total, GateOp::h(a))?));
        stages.push(stage(format!("1-c-W(a{k})"), w.controlled(a, true)?));
        stages.push(stage(format!("U^{}", 1u64 << k), unitary_power(&u, 1 << k)?));
        match (last, spec.final_block, spec.reset) {
            (true, FinalBlock::OpenControlledW, _) => {
                stages.push(stage(format!("0-c-W(a{k})"), w.controlled(a, false)?));
            }
            (true, FinalBlock::ControlledWDagger, _) | (false, _, Reset::ControlledWDagger) => {
                stages.push(stage(format!("1-c-W†(a{k})"), w_dag.controlled(a, true)?));
            }
            (false, _, Reset::OpenControlledWThenWDagger) => {
                stages.push(stage(format!("0-c-W(a{k})"), w.controlled(a, false)?));
                stages.push(stage("W†", w_dag.clone()));
            }
        }
    }
    Ok(stages)
}

fn qft_on_ancillas(spec: &QpeSpec) -> Result<Circuit> {
    let mut c = Circuit::new(spec.num_qubits());
    c.append_mapped(&inverse_qft(spec.m)?, &spec.ancillas())?;
    Ok(c)
}

fn concat(total: usize, stages: &[Stage], label: &str) -> Result<Circuit> {
    let mut c = Circuit::new(total).with_label(label);
    for s in stages {
        c.append(&s.circuit)?;
    }
    Ok(c)
}

/// Full uncontrolled QPE circuit including the inverse QFT.
pub fn build_uncontrolled_qpe(spec: &QpeSpec) -> Result<Circuit> {
    let mut c = concat(spec.num_qubits(), &uncontrolled_qpe_stages(spec)?, "uncontrolled QPE")?;
    c.append(&qft_on_ancillas(spec)?)?;
    Ok(c)
}

/// Standard QPE without the inverse QFT.
///
/// The controlled powers are referenced to `φ`: each ancilla also gets a
/// phase gate `P(−2π·2^k φ)`, i.e. it controls `e^{−2πi·2^k φ}U^{2^k}`.
/// That makes both builders estimate `θ − φ`; with `φ = 0` the extra gates
/// are omitted.
pub fn standard_qpe_stages(spec: &QpeSpec) -> Result<Vec<Stage>> {
    let n = spec.system.num_qubits();
    let total = spec.num_qubits();
    let u = spec.system.u().widened(total)?;
    let phi = spec.system.reference_phase();
    let mut stages = vec![stage("W", spec.system.w().widened(total)?)];
    for &k in &spec.power_order {
        let a = n + k;
        stages.push(stage(format!("H(a{k})"), single(total, GateOp::h(a))?));
        stages.push(stage(format!("c-U^{}(a{k})", 1u64 << k), unitary_power(&u, 1 << k)?.controlled(a, true)?));
        let correction = wrap_phase((1u64 << k) as f64 * phi);
        if correction != 0.0 {
            let angle = -2.0 * std::f64::consts::PI * correction;
            stages.push(stage(format!("P(a{k})"), single(total, GateOp::phase(a, angle))?));
        }
    }
    Ok(stages)
}

pub fn build_standard_qpe(spec: &QpeSpec) -> Result<Circuit> {
    let mut c = concat(spec.num_qubits(), &standard_qpe_stages(spec)?, "standard QPE")?;
    c.append(&qft_on_ancillas(spec)?)?;
    Ok(c)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Builder {
    #[default]
    Uncontrolled,
    Standard,
}

/// Final joint state of the chosen builder from [`QpeSpec::initial_state`].
pub fn final_state(spec: &QpeSpec, builder: Builder) -> Result<StateVector> {
    let circuit = match builder {
        Builder::Uncontrolled => build_uncontrolled_qpe(spec)?,
        Builder::Standard => build_standard_qpe(spec)?,
    };
    let mut state = spec.initial_state()?;
    state.apply_circuit(&circuit)?;
    Ok(state)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PhaseEstimate {
    pub m: usize,
    pub distribution: Vec<f64>,
    pub map_outcome: usize,
    pub map_fraction: f64,
    /// Mass on the outcome(s) nearest `(θ − φ)·2^m`; `None` when `W|φ⟩` is
    /// not an eigenstate of `U`.
    pub success_probability: Option<f64>,
}

impl PhaseEstimate {
    pub fn from_distribution(m: usize, distribution: Vec<f64>, phase_difference: Option<f64>) -> Self {
        let map_outcome = argmax(&distribution);
        let success_probability = phase_difference.map(|d| {
            nearest_outcomes(d, m).iter().map(|&y| distribution[y]).sum()
        });
        PhaseEstimate {
            m,
            map_fraction: map_outcome as f64 / (1u64 << m) as f64,
            map_outcome,
            distribution,
            success_probability,
        }
    }
}

/// Index of the largest entry; ties go to the lowest index.
pub fn argmax(values: &[f64]) -> usize {
    values.iter().enumerate().fold(0, |best, (i, &v)| if v > values[best] { i } else { best })
}

/// Outcomes nearest `phase·2^m`: the grid point itself when representable,
/// else the two bracketing points (mod `2^m`).
pub fn nearest_outcomes(phase: f64, m: usize) -> Vec<usize> {
    let size = 1usize << m;
    let x = wrap_phase(phase) * size as f64;
    let r = x.round();
    if (x - r).abs() <= GRID_TOLERANCE {
        return vec![r as usize % size];
    }
    let lo = x.floor() as usize % size;
    vec![lo, (lo + 1) % size]
}

pub fn estimate_phase_with(spec: &QpeSpec, builder: Builder) -> Result<PhaseEstimate> {
    let state = final_state(spec, builder)?;
    let distribution = state.marginal_probabilities(&spec.ancillas())?;
    Ok(PhaseEstimate::from_distribution(spec.m, distribution, spec.system.phase_difference()))
}

/// Exact readout of the uncontrolled builder.
pub fn estimate_phase(spec: &QpeSpec) -> Result<PhaseEstimate> {
    estimate_phase_with(spec, Builder::Uncontrolled)
}

/// Total variation distance between the two builders' outcome distributions.
pub fn builder_distance(spec: &QpeSpec) -> Result<f64> {
    let a = estimate_phase_with(spec, Builder::Uncontrolled)?;
    let b = estimate_phase_with(spec, Builder::Standard)?;
    total_variation(&a.distribution, &b.distribution)
}

/// Ancilla register just before the inverse QFT, ancilla `k` at qubit `k`.
///
/// The system is projected onto the state the final block leaves it in
/// (`|ψ⟩` or `|φ⟩`), which fixes the global phase: the result is
/// `e^{2πi(2^m−1)φ} ⊗_k (|0⟩ + e^{2πi·2^k(θ−φ)}|1⟩)/√2`.
pub fn pre_qft_ancilla_state(spec: &QpeSpec) -> Result<StateVector> {
    let mut state = spec.initial_state()?;
    for s in uncontrolled_qpe_stages(spec)? {
        state.apply_circuit(&s.circuit)?;
    }
    let system: Vec<usize> = (0..spec.system.num_qubits()).collect();
    let purity = state.reduced_purity(&spec.ancillas())?;
    if purity < 1.0 - PURITY_TOLERANCE {
        return Err(Error::ResidualEntanglement { purity });
    }
    let end = match spec.final_block {
        FinalBlock::OpenControlledW => spec.system.target(),
        FinalBlock::ControlledWDagger => spec.system.reference(),
    };
    let amplitudes = state.partial_inner(&system, end)?;
    let norm_sqr: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
    if norm_sqr < 1.0 - PURITY_TOLERANCE {
        return Err(Error::ResidualEntanglement { purity: norm_sqr });
    }
    StateVector::from_amplitudes(amplitudes)
}

/// One row of [`eigenstate_error_sweep`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub delta: f64,
    pub success_probability: f64,
    pub standard_success_probability: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepTable {
    /// Outcome of the ideal (`δ = 0`) readout whose probability is tracked.
    pub ideal_outcome: usize,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    /// CSV with columns `delta, success_probability` (uncontrolled builder).
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::InvalidArgument(format!("csv: {e}"));
        w.write_record(["delta", "success_probability"]).map_err(io)?;
        for r in &self.rows {
            w.write_record([r.delta.to_string(), r.success_probability.to_string()]).map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::InvalidArgument(format!("csv: {e}")))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("sweep tables always serialize")
    }
}

/// Readout degradation when `W` prepares `(|ψ⟩ + δ|ψ⊥⟩)/√(1+δ²)` instead
/// of `|ψ⟩`.
///
/// `perp` must be an eigenstate of `U` orthogonal to `|ψ⟩`. For each `δ` the
/// preparation is replaced by a state-transfer circuit `W̃` with that action
/// on `|φ⟩`, and the probability of the ideal outcome is reported for both
/// builders.
pub fn eigenstate_error_sweep(spec: &QpeSpec, perp: &StateVector, deltas: &[f64]) -> Result<SweepTable> {
    let psi = spec.system.target();
    let overlap = psi.inner(perp)?.norm();
    if overlap > EIGENSTATE_TOLERANCE {
        return Err(Error::NotOrthogonal { overlap });
    }
    let mut out = perp.clone();
    out.apply_circuit(spec.system.u())?;
    let perp_phase = wrap_phase(perp.inner(&out)?.arg() / (2.0 * std::f64::consts::PI));
    let residual = eigen_residual(spec.system.u(), perp, perp_phase)?;
    if residual > EIGENSTATE_TOLERANCE {
        return Err(Error::NotEigenstate { residual });
    }
    let ideal_outcome = estimate_phase(spec)?.map_outcome;
    let rows = deltas
        .iter()
        .map(|&delta| {
            let mixed: Vec<_> = psi.amplitudes().iter().zip(perp.amplitudes()).map(|(a, b)| a + delta * b).collect();
            let target = StateVector::normalized(mixed)?;
            let w = state_transfer(spec.system.reference(), &target)?;
            let perturbed = QpeSpec { system: spec.system.with_w(w)?, ..spec.clone() };
            let unc = estimate_phase_with(&perturbed, Builder::Uncontrolled)?;
            let std = estimate_phase_with(&perturbed, Builder::Standard)?;
            Ok(SweepRow {
                delta,
                success_probability: unc.distribution[ideal_outcome],
                standard_success_probability: std.distribution[ideal_outcome],
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepTable { ideal_outcome, rows })
}
