//! Single-ancilla phase kickback, standard and uncontrolled.
//!
//! Layout: system qubits `0..n`, ancilla at qubit `n`.
//!
//! The uncontrolled gadget is
//!
//! ```text
//! a: H ─●─────────○─ H
//! s: ───W──── U ──W───
//! ```
//!
//! Starting from `|0⟩_a|φ⟩_s`, the `|1⟩_a` branch is moved to `|ψ⟩ = W|φ⟩`
//! before `U` and the `|0⟩_a` branch after it, so the ancilla ends with
//! relative phase `θ − φ` and `P(0) = cos²(π(θ − φ))`.

use num_complex::Complex64;
use serde::Serialize;

use crate::circuit::{Circuit, GateOp, UnitaryMatrix};
use crate::error::{Error, Result};
use crate::linalg::{cis, Matrix};
use crate::sim::StateVector;
use crate::{wrap_phase, EIGENSTATE_TOLERANCE, MAX_QUBITS};

/// `W`, `U` and the reference eigenpair `(|φ⟩, φ)` on an `n`-qubit system.
#[derive(Clone, Debug)]
pub struct SystemSpec {
    w: Circuit,
    u: Circuit,
    reference: StateVector,
    reference_phase: f64,
    target: StateVector,
    target_phase: Option<f64>,
}

impl SystemSpec {
    /// Checks that `|φ⟩` is an eigenstate of `U` with phase `φ` to within
    /// [`EIGENSTATE_TOLERANCE`].
    pub fn new(w: Circuit, u: Circuit, reference: StateVector, reference_phase: f64) -> Result<Self> {
        let spec = Self::new_unchecked(w, u, reference, reference_phase)?;
        let residual = eigen_residual(&spec.u, &spec.reference, spec.reference_phase)?;
        if residual > EIGENSTATE_TOLERANCE {
            return Err(Error::NotEigenstate { residual });
        }
        Ok(spec)
    }

    /// Same as [`SystemSpec::new`] without the eigenstate check; for
    /// negative tests that need a broken reference.
    pub fn new_unchecked(w: Circuit, u: Circuit, reference: StateVector, reference_phase: f64) -> Result<Self> {
        let n = reference.num_qubits();
        for c in [&w, &u] {
            if c.num_qubits() != n {
                return Err(Error::DimensionMismatch { left: n, right: c.num_qubits() });
            }
        }
        if !reference_phase.is_finite() {
            return Err(Error::InvalidArgument("reference phase must be finite".into()));
        }
        let mut target = reference.clone();
        target.apply_circuit(&w)?;
        let target_phase = eigenphase(&u, &target)?;
        Ok(SystemSpec { w, u, reference, reference_phase: wrap_phase(reference_phase), target, target_phase })
    }

    /// Diagonal `U = Σ_k e^{2πi·phases[k]}|k⟩⟨k|` with `|φ⟩ = |reference⟩`,
    /// `|ψ⟩ = |target⟩` and `W` the X gates between the two indices.
    pub fn diagonal(phases: &[f64], reference: usize, target: usize) -> Result<Self> {
        let dim = phases.len();
        if dim < 2 || !dim.is_power_of_two() {
            return Err(Error::InvalidLength { len: dim });
        }
        let n = dim.trailing_zeros() as usize;
        if target >= dim {
            return Err(Error::BasisIndexOutOfRange { index: target, num_qubits: n });
        }
        let reference_state = StateVector::basis(n, reference)?;
        let diff = reference ^ target;
        let w = Circuit::from_ops(n, (0..n).filter(|q| diff >> q & 1 == 1).map(GateOp::x))?.with_label("W");
        let u = diagonal_unitary(phases)?;
        Self::new(w, u, reference_state, phases[reference])
    }

    /// `W` built by state preparation so that `W|φ⟩ = target`.
    pub fn with_target(u: Circuit, reference: StateVector, reference_phase: f64, target: &StateVector) -> Result<Self> {
        let w = crate::circuit::state_transfer(&reference, target)?;
        Self::new(w, u, reference, reference_phase)
    }

    /// Same `U` and reference, different `W`.
    pub fn with_w(&self, w: Circuit) -> Result<Self> {
        Self::new_unchecked(w, self.u.clone(), self.reference.clone(), self.reference_phase)
    }

    pub fn num_qubits(&self) -> usize {
        self.reference.num_qubits()
    }

    pub fn w(&self) -> &Circuit {
        &self.w
    }

    pub fn u(&self) -> &Circuit {
        &self.u
    }

    pub fn reference(&self) -> &StateVector {
        &self.reference
    }

    pub fn reference_phase(&self) -> f64 {
        self.reference_phase
    }

    /// `|ψ⟩ = W|φ⟩`.
    pub fn target(&self) -> &StateVector {
        &self.target
    }

    /// `θ` when `|ψ⟩` is an eigenstate of `U` within tolerance.
    pub fn target_phase(&self) -> Option<f64> {
        self.target_phase
    }

    /// `(θ − φ) mod 1`, when `θ` is defined.
    pub fn phase_difference(&self) -> Option<f64> {
        self.target_phase.map(|t| wrap_phase(t - self.reference_phase))
    }
}

/// Dense diagonal gate `diag(e^{2πi·phases[k]})` as a one-gate circuit.
pub fn diagonal_unitary(phases: &[f64]) -> Result<Circuit> {
    let dim = phases.len();
    if dim < 2 || !dim.is_power_of_two() {
        return Err(Error::InvalidLength { len: dim });
    }
    let n = dim.trailing_zeros() as usize;
    let diag: Vec<Complex64> = phases.iter().map(|p| cis(2.0 * std::f64::consts::PI * p)).collect();
    let gate = UnitaryMatrix::new("U", Matrix::from_diagonal(&nalgebra::DVector::from_vec(diag)))?;
    let mut u = Circuit::new(n).with_label("U");
    u.push(GateOp::unitary(gate, (0..n).collect())?)?;
    Ok(u)
}

/// `‖U|s⟩ − e^{2πiφ}|s⟩‖`.
pub fn eigen_residual(u: &Circuit, state: &StateVector, phase: f64) -> Result<f64> {
    let mut out = state.clone();
    out.apply_circuit(u)?;
    let z = cis(2.0 * std::f64::consts::PI * phase);
    Ok(out.amplitudes().iter().zip(state.amplitudes()).map(|(a, b)| (a - z * b).norm_sqr()).sum::<f64>().sqrt())
}

/// Eigenphase of `state` under `u`, or `None` if it is not an eigenstate.
fn eigenphase(u: &Circuit, state: &StateVector) -> Result<Option<f64>> {
    let mut out = state.clone();
    out.apply_circuit(u)?;
    let z = state.inner(&out)?;
    let phase = wrap_phase(z.arg() / (2.0 * std::f64::consts::PI));
    let residual = eigen_residual(u, state, phase)?;
    Ok((residual <= EIGENSTATE_TOLERANCE).then_some(phase))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Standard,
    Uncontrolled,
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "standard" => Ok(Variant::Standard),
            "uncontrolled" => Ok(Variant::Uncontrolled),
            other => Err(Error::Parse(format!("unknown variant {other:?}"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct KickbackSpec {
    pub system: SystemSpec,
    pub variant: Variant,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct KickbackReport {
    pub ancilla_p0: f64,
    pub system_purity: f64,
    pub final_system_fidelity_with_psi: f64,
}

fn check_budget(n: usize) -> Result<()> {
    if n + 1 > MAX_QUBITS {
        return Err(Error::TooManyQubits { requested: n + 1, cap: MAX_QUBITS });
    }
    Ok(())
}

/// `H(a) · W · controlled-U · H(a)`, ancilla at the highest index.
pub fn build_standard_kickback(system: &SystemSpec) -> Result<Circuit> {
    let n = system.num_qubits();
    check_budget(n)?;
    let mut c = Circuit::new(n + 1).with_label("standard kickback");
    c.push(GateOp::h(n))?;
    c.append(system.w())?;
    c.append(&system.u().widened(n + 1)?.controlled(n, true)?)?;
    c.push(GateOp::h(n))?;
    Ok(c)
}

/// `H(a) · 1-c-W · U · open-c-W · H(a)`, ancilla at the highest index.
pub fn build_uncontrolled_kickback(system: &SystemSpec) -> Result<Circuit> {
    let n = system.num_qubits();
    check_budget(n)?;
    let w = system.w().widened(n + 1)?;
    let mut c = Circuit::new(n + 1).with_label("uncontrolled kickback");
    c.push(GateOp::h(n))?;
    c.append(&w.controlled(n, true)?)?;
    c.append(system.u())?;
    c.append(&w.controlled(n, false)?)?;
    c.push(GateOp::h(n))?;
    Ok(c)
}

pub fn build_kickback(spec: &KickbackSpec) -> Result<Circuit> {
    match spec.variant {
        Variant::Standard => build_standard_kickback(&spec.system),
        Variant::Uncontrolled => build_uncontrolled_kickback(&spec.system),
    }
}

/// `|0⟩_a ⊗ |φ⟩_s`.
pub fn initial_state(system: &SystemSpec) -> Result<StateVector> {
    StateVector::zero(1)?.tensor(system.reference())
}

/// Final joint state of the chosen variant.
pub fn final_state(spec: &KickbackSpec) -> Result<StateVector> {
    let mut state = initial_state(&spec.system)?;
    state.apply_circuit(&build_kickback(spec)?)?;
    Ok(state)
}

pub fn run_kickback(spec: &KickbackSpec) -> Result<KickbackReport> {
    let n = spec.system.num_qubits();
    let state = final_state(spec)?;
    let system: Vec<usize> = (0..n).collect();
    Ok(KickbackReport {
        ancilla_p0: state.marginal_probabilities(&[n])?[0],
        system_purity: state.reduced_purity(&system)?,
        final_system_fidelity_with_psi: state.reduced_fidelity(&system, spec.system.target())?,
    })
}

/// Single-qubit system with `U = diag(e^{2πiφ}, e^{2πiθ})`, `|φ⟩ = |0⟩`
/// and `W = X`.
pub fn single_qubit_system(theta: f64, phi: f64) -> Result<SystemSpec> {
    SystemSpec::diagonal(&[phi, theta], 0, 1)
}
