//! Ground-state energy of the open Heisenberg chain
//! `H = J Σ_i (X_i X_{i+1} + Y_i Y_{i+1} + Z_i Z_{i+1})` by uncontrolled QPE.
//!
//! `|0…0⟩` is an eigenstate with energy `J(N−1)`, so it serves as the
//! reference with phase `φ = (−J(N−1)t/2π) mod 1` under `U = e^{−iHt}`.
//! An energy `E` maps to the phase `θ = (−Et/2π) mod 1`; decoding unwraps
//! `θ` into `(−1/2, 1/2]`, which is unambiguous while `max|E|·t < π`.

use std::f64::consts::PI;

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::circuit::{state_prep, Circuit, GateOp, UnitaryMatrix};
use crate::error::{Error, Result};
use crate::kickback::SystemSpec;
use crate::linalg::{hermiticity_deviation, operator_norm, Matrix};
use crate::qpe::{estimate_phase_with, Builder, PhaseEstimate, QpeSpec};
use crate::resources::{resource_report, ResourceReport};
use crate::sim::{circuit_unitary, total_variation, StateVector};
use crate::wrap_phase;

pub const MIN_SITES: usize = 2;
pub const MAX_SITES: usize = 10;

const HERMITIAN_TOLERANCE: f64 = 1e-10;

fn check_sites(n: usize) -> Result<()> {
    if !(MIN_SITES..=MAX_SITES).contains(&n) {
        return Err(Error::InvalidArgument(format!("chain length {n} outside {MIN_SITES}..={MAX_SITES}")));
    }
    Ok(())
}

/// Dense `2^N` Hamiltonian.
///
/// Per bond, `ZZ` contributes `±J` on the diagonal and `XX + YY` swaps
/// antiparallel neighbours with amplitude `2J`.
pub fn build_hamiltonian(n: usize, j: f64) -> Result<Matrix> {
    check_sites(n)?;
    let dim = 1usize << n;
    let mut h = Matrix::zeros(dim, dim);
    for x in 0..dim {
        for i in 0..n - 1 {
            let mask = 0b11 << i;
            if (x >> i & 1) == (x >> (i + 1) & 1) {
                h[(x, x)] += j;
            } else {
                h[(x, x)] -= j;
                h[(x ^ mask, x)] += 2.0 * j;
            }
        }
    }
    Ok(h)
}

/// Eigenphase of `|0…0⟩` under `e^{−iHt}`.
pub fn reference_phase(n: usize, j: f64, t: f64) -> f64 {
    wrap_phase(-j * (n as f64 - 1.0) * t / (2.0 * PI))
}

/// Eigenvalues (ascending) and eigenvectors (columns) of a Hermitian matrix.
pub fn diagonalize(h: &Matrix) -> Result<(Vec<f64>, Matrix)> {
    let deviation = hermiticity_deviation(h);
    if deviation > HERMITIAN_TOLERANCE {
        return Err(Error::NotHermitian { deviation });
    }
    let eig = h.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = Matrix::from_fn(h.nrows(), h.ncols(), |r, c| eig.eigenvectors[(r, order[c])]);
    Ok((values, vectors))
}

/// `e^{−iHt}` as a dense gate on qubits `0..N`.
pub fn exact_evolution_gate(h: &Matrix, t: f64) -> Result<GateOp> {
    let (values, v) = diagonalize(h)?;
    let phases = DVector::from_iterator(values.len(), values.iter().map(|e| Complex64::from_polar(1.0, -e * t)));
    let u = &v * Matrix::from_diagonal(&phases) * v.adjoint();
    let n = h.nrows().trailing_zeros() as usize;
    GateOp::unitary(UnitaryMatrix::new("U", u)?, (0..n).collect())
}

/// `exp(−iα(XX + YY + ZZ))` on qubits `a, b`, exact including global phase:
/// `CX(b→a) · Rz(2α)_a · C-Rx(4α)(a→b) · CX(b→a)`.
pub fn bond_gate(a: usize, b: usize, alpha: f64) -> Result<Circuit> {
    let n = a.max(b) + 1;
    Circuit::from_ops(
        n,
        [GateOp::cx(b, a), GateOp::rz(a, 2.0 * alpha), GateOp::rx(b, 4.0 * alpha).with_control(a, true)?, GateOp::cx(b, a)],
    )
}

/// First-order product formula: `steps` repetitions of the bond gates
/// `(0,1), (1,2), …` with `α = J·t/steps`.
pub fn trotter_evolution(n: usize, j: f64, t: f64, steps: u32) -> Result<Circuit> {
    check_sites(n)?;
    if steps == 0 {
        return Err(Error::InvalidArgument("at least one Trotter step is required".into()));
    }
    let alpha = j * t / steps as f64;
    let mut step = Circuit::new(n);
    for i in 0..n - 1 {
        step.append_mapped(&bond_gate(0, 1, alpha)?, &[i, i + 1])?;
    }
    Ok(step.power(steps as u64)?.with_label("U"))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TrotterError {
    pub steps: u32,
    /// `‖U_trotter − e^{−iHt}‖` in operator norm.
    pub error: f64,
    /// `error·steps/t²`.
    pub constant: f64,
}

pub fn trotter_error(n: usize, j: f64, t: f64, steps: u32) -> Result<TrotterError> {
    let exact = exact_evolution_gate(&build_hamiltonian(n, j)?, t)?.kind().matrix();
    let approx = circuit_unitary(&trotter_evolution(n, j, t, steps)?)?;
    let error = operator_norm(&(approx - exact));
    let constant = if t == 0.0 { 0.0 } else { error * steps as f64 / (t * t) };
    Ok(TrotterError { steps, error, constant })
}

/// Lowest eigenvalue and one of its eigenvectors.
pub fn exact_ground_state(n: usize, j: f64) -> Result<(f64, StateVector)> {
    let (values, v) = diagonalize(&build_hamiltonian(n, j)?)?;
    let state = StateVector::normalized(v.column(0).iter().copied().collect())?;
    Ok((values[0], state))
}

/// `π / (2·3|J|(N−1))`, half the largest wrap-free time for the bound
/// `‖H‖ ≤ 3|J|(N−1)`.
pub fn default_time(n: usize, j: f64) -> f64 {
    PI / (2.0 * 3.0 * j.abs() * (n as f64 - 1.0))
}

/// Basis state from a bitstring written qubit 0 first: `"0101"` sets
/// qubits 1 and 3.
pub fn basis_candidate(bits: &str) -> Result<StateVector> {
    let n = bits.len();
    let mut index = 0usize;
    for (q, ch) in bits.chars().enumerate() {
        match ch {
            '0' => {}
            '1' => index |= 1 << q,
            _ => return Err(Error::Parse(format!("bitstring {bits:?} may only contain 0 and 1"))),
        }
    }
    StateVector::basis(n, index)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum Evolution {
    Exact,
    Trotter { steps: u32 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Candidate {
    /// Ground state from exact diagonalization.
    Exact,
    /// Computational basis state, qubit 0 first.
    Basis(String),
}

impl std::str::FromStr for Candidate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Candidate::Exact),
            _ => match s.strip_prefix("basis:") {
                Some(bits) => Ok(Candidate::Basis(bits.to_string())),
                None => Err(Error::Parse(format!("candidate must be \"exact\" or \"basis:<bits>\", got {s:?}"))),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HeisenbergSpec {
    pub n: usize,
    pub j: f64,
    pub t: f64,
    pub m: usize,
    pub evolution: Evolution,
    pub candidate: Candidate,
}

impl HeisenbergSpec {
    /// Exact evolution, exact candidate and the default time.
    pub fn new(n: usize, j: f64, m: usize) -> Self {
        HeisenbergSpec { n, j, t: default_time(n, j), m, evolution: Evolution::Exact, candidate: Candidate::Exact }
    }
}

/// Experiment descriptor as read from JSON:
/// `{"N": 3, "J": 1.0, "t": 0.2, "m": 8, "evolution": "trotter", "steps": 64, "candidate": "basis:010"}`.
/// `t`, `steps` and `candidate` are optional.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Descriptor {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "J")]
    pub j: f64,
    #[serde(default)]
    pub t: Option<f64>,
    pub m: usize,
    #[serde(default = "default_evolution")]
    pub evolution: String,
    #[serde(default)]
    pub steps: Option<u32>,
    #[serde(default = "default_candidate")]
    pub candidate: String,
}

fn default_evolution() -> String {
    "exact".into()
}

fn default_candidate() -> String {
    "exact".into()
}

impl TryFrom<Descriptor> for HeisenbergSpec {
    type Error = Error;

    fn try_from(d: Descriptor) -> Result<Self> {
        let evolution = match (d.evolution.as_str(), d.steps) {
            ("exact", None) => Evolution::Exact,
            ("exact", Some(_)) => return Err(Error::InvalidArgument("steps only applies to trotter evolution".into())),
            ("trotter", steps) => Evolution::Trotter { steps: steps.unwrap_or(64) },
            (other, _) => return Err(Error::Parse(format!("evolution must be \"exact\" or \"trotter\", got {other:?}"))),
        };
        Ok(HeisenbergSpec {
            n: d.n,
            j: d.j,
            t: d.t.unwrap_or_else(|| default_time(d.n, d.j)),
            m: d.m,
            evolution,
            candidate: d.candidate.parse()?,
        })
    }
}

impl HeisenbergSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let d: Descriptor = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        d.try_into()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnergyReport {
    pub energy: f64,
    pub exact_ground_energy: f64,
    /// Energy resolution `2π/(t·2^m)`.
    pub grid_step: f64,
    pub t: f64,
    pub reference_phase: f64,
    pub phase_estimate: PhaseEstimate,
    /// Total variation distance to standard QPE with the same `U`.
    pub standard_distance: f64,
    pub resources: ResourceReport,
    pub trotter: Option<TrotterError>,
}

/// Energy from a phase: `θ` unwrapped to `(−1/2, 1/2]`, then `E = −2πθ/t`.
pub fn phase_to_energy(theta: f64, t: f64) -> f64 {
    let mut th = wrap_phase(theta);
    if th > 0.5 {
        th -= 1.0;
    }
    -2.0 * PI * th / t
}

pub fn energy_to_phase(energy: f64, t: f64) -> f64 {
    wrap_phase(-energy * t / (2.0 * PI))
}

/// The `SystemSpec` the estimator runs: `W` prepares the candidate from
/// `|0…0⟩`, `U` per the evolution mode. Also checks the time window.
pub fn system_spec(spec: &HeisenbergSpec) -> Result<SystemSpec> {
    check_sites(spec.n)?;
    if !(spec.t.is_finite() && spec.t > 0.0) {
        return Err(Error::InvalidArgument(format!("evolution time must be positive, got {}", spec.t)));
    }
    let h = build_hamiltonian(spec.n, spec.j)?;
    let (values, _) = diagonalize(&h)?;
    let max_abs = values.iter().fold(0.0f64, |acc, e| acc.max(e.abs()));
    if max_abs * spec.t >= PI {
        return Err(Error::PhaseWrap);
    }
    let u = match spec.evolution {
        Evolution::Exact => Circuit::from_ops(spec.n, [exact_evolution_gate(&h, spec.t)?])?.with_label("U"),
        Evolution::Trotter { steps } => trotter_evolution(spec.n, spec.j, spec.t, steps)?,
    };
    let candidate = match &spec.candidate {
        Candidate::Exact => exact_ground_state(spec.n, spec.j)?.1,
        Candidate::Basis(bits) => {
            let s = basis_candidate(bits)?;
            if s.num_qubits() != spec.n {
                return Err(Error::DimensionMismatch { left: spec.n, right: s.num_qubits() });
            }
            s
        }
    };
    let w = state_prep(&candidate)?;
    SystemSpec::new(w, u, StateVector::zero(spec.n)?, reference_phase(spec.n, spec.j, spec.t))
}

pub fn estimate_ground_energy(spec: &HeisenbergSpec) -> Result<EnergyReport> {
    let system = system_spec(spec)?;
    let (exact_ground_energy, _) = exact_ground_state(spec.n, spec.j)?;
    let resources = resource_report(system.u(), system.w(), spec.m as u32)?;
    let qpe = QpeSpec::new(spec.m, system)?;
    let estimate = estimate_phase_with(&qpe, Builder::Uncontrolled)?;
    let standard = estimate_phase_with(&qpe, Builder::Standard)?;
    let phi = qpe.system.reference_phase();
    let energy = phase_to_energy(estimate.map_fraction + phi, spec.t);
    let trotter = match spec.evolution {
        Evolution::Exact => None,
        Evolution::Trotter { steps } => Some(trotter_error(spec.n, spec.j, spec.t, steps)?),
    };
    Ok(EnergyReport {
        energy,
        exact_ground_energy,
        grid_step: 2.0 * PI / (spec.t * (1u64 << spec.m) as f64),
        t: spec.t,
        reference_phase: phi,
        standard_distance: total_variation(&estimate.distribution, &standard.distribution)?,
        phase_estimate: estimate,
        resources,
        trotter,
    })
}
