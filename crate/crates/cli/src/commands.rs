use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::Args;
use phasekick::heisenberg::{estimate_ground_energy, Descriptor, HeisenbergSpec};
use phasekick::kickback::{run_kickback, single_qubit_system, KickbackSpec, SystemSpec, Variant};
use phasekick::qpe::{builder_distance, eigenstate_error_sweep, estimate_phase, QpeSpec};
use phasekick::resources::{cost_table, cost_table_csv, CostProfile};
use phasekick::shor::{classical_order, find_order, system_qubits, OrderFindingSpec};
use phasekick::{wrap_phase, Circuit, Error, StateVector, MAX_QUBITS};
use serde::Serialize;
use serde_json::{json, Value};

pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::ResidualEntanglement { .. }
            | Error::NotUnitary { .. }
            | Error::NotHermitian { .. }
            | Error::NotNormalized { .. } => 1,
            _ => 2,
        };
        Failure { code, message: e.to_string() }
    }
}

pub struct Output {
    pub parameters: Value,
    pub results: Value,
    pub text: String,
    /// Printed instead of `text` when set (e.g. `resources --csv`).
    pub stdout_csv: Option<String>,
    /// Extra files for `PHASEKICK_OUT_DIR`.
    pub files: Vec<(String, String)>,
    pub declared_failure: bool,
}

fn to_value(v: &impl Serialize) -> Result<Value, Failure> {
    serde_json::to_value(v).map_err(|e| Failure::usage(format!("cannot encode output: {e}")))
}

impl Output {
    fn new(parameters: &impl Serialize, results: &impl Serialize, text: String) -> Result<Self, Failure> {
        Ok(Output {
            parameters: to_value(parameters)?,
            results: to_value(results)?,
            text,
            stdout_csv: None,
            files: Vec::new(),
            declared_failure: false,
        })
    }
}

fn phase_arg(name: &str, v: f64) -> Result<f64, Failure> {
    if (0.0..1.0).contains(&v) {
        Ok(v)
    } else {
        Err(Failure::usage(format!("--{name} must lie in [0, 1), got {v}")))
    }
}

#[derive(Args, Debug, Serialize)]
pub struct KickbackArgs {
    /// Eigenphase of the target eigenstate, in turns.
    #[arg(long)]
    pub theta: f64,
    /// Eigenphase of the reference eigenstate, in turns.
    #[arg(long, default_value_t = 0.0)]
    pub phi: f64,
    /// standard | uncontrolled
    #[arg(long, default_value = "uncontrolled")]
    pub variant: String,
}

pub fn kickback(a: &KickbackArgs) -> Result<Output, Failure> {
    let (theta, phi) = (phase_arg("theta", a.theta)?, phase_arg("phi", a.phi)?);
    let variant: Variant = a.variant.parse()?;
    let system = single_qubit_system(theta, phi)?;
    let rep = run_kickback(&KickbackSpec { system, variant })?;
    // the standard circuit has no reference correction
    let kicked = if variant == Variant::Standard { theta } else { theta - phi };
    let predicted = (PI * kicked).cos().powi(2);
    let error = (rep.ancilla_p0 - predicted).abs();
    let text = format!(
        "variant: {}\nP(0): {:.12}\npredicted cos²: {:.12}\n|measured − predicted|: {:.3e}\nsystem purity: {:.12}\nfidelity with ψ: {:.12}",
        a.variant, rep.ancilla_p0, predicted, error, rep.system_purity, rep.final_system_fidelity_with_psi
    );
    let results = json!({
        "variant": variant,
        "ancilla_p0": rep.ancilla_p0,
        "predicted_p0": predicted,
        "abs_error": error,
        "system_purity": rep.system_purity,
        "final_system_fidelity_with_psi": rep.final_system_fidelity_with_psi,
    });
    Output::new(a, &results, text)
}

#[derive(Args, Debug, Serialize)]
pub struct QpeArgs {
    /// Number of phase bits m.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=12))]
    pub bits: u8,
    #[arg(long)]
    pub theta: f64,
    #[arg(long, default_value_t = 0.0)]
    pub phi: f64,
    /// Prepare (|ψ⟩ + δ|ψ⊥⟩)/√(1+δ²) instead of |ψ⟩.
    #[arg(long)]
    pub delta: Option<f64>,
    /// Also run standard QPE and report the total variation distance.
    #[arg(long)]
    pub compare_standard: bool,
}

pub fn qpe(a: &QpeArgs) -> Result<Output, Failure> {
    let (theta, phi) = (phase_arg("theta", a.theta)?, phase_arg("phi", a.phi)?);
    let m = a.bits as usize;
    let spec = QpeSpec::new(m, single_qubit_system(theta, phi)?)?;
    let est = estimate_phase(&spec)?;
    let mut text = format!("MAP outcome: {} (fraction {})\n", est.map_outcome, est.map_fraction);
    if let Some(p) = est.success_probability {
        writeln!(text, "success probability: {p:.12}").unwrap();
    }
    for (y, p) in est.distribution.iter().enumerate().filter(|(_, p)| **p > 1e-6).take(16) {
        writeln!(text, "  P({y}) = {p:.9}").unwrap();
    }
    let mut results = json!({
        "distribution": est.distribution,
        "map_outcome": est.map_outcome,
        "map_fraction": est.map_fraction,
        "success_probability": est.success_probability,
    });
    if a.compare_standard {
        let tvd = builder_distance(&spec)?;
        writeln!(text, "TVD to standard QPE: {tvd:.3e}").unwrap();
        results["standard_distance"] = json!(tvd);
    }
    let mut files = Vec::new();
    if let Some(delta) = a.delta {
        if !delta.is_finite() {
            return Err(Failure::usage("--delta must be finite"));
        }
        // two-qubit diagonal U: |φ⟩ = |0⟩, |ψ⟩ = |1⟩, |ψ⊥⟩ = |2⟩ half a turn away
        let phases = [phi, theta, wrap_phase(theta + 0.5), wrap_phase(phi + 0.25)];
        let noisy = QpeSpec::new(m, SystemSpec::diagonal(&phases, 0, 1)?)?;
        let table = eigenstate_error_sweep(&noisy, &StateVector::basis(2, 2)?, &[delta])?;
        let row = table.rows[0];
        writeln!(
            text,
            "δ = {delta}: success {:.12} (standard {:.12}) for outcome {}",
            row.success_probability, row.standard_success_probability, table.ideal_outcome
        )
        .unwrap();
        results["approximate_eigenstate"] = json!({
            "delta": delta,
            "ideal_outcome": table.ideal_outcome,
            "success_probability": row.success_probability,
            "standard_success_probability": row.standard_success_probability,
        });
        files.push(("qpe_sweep.csv".to_string(), table.to_csv()?));
    }
    let mut out = Output::new(a, &results, text)?;
    out.files = files;
    Ok(out)
}

#[derive(Args, Debug, Serialize)]
pub struct ResourcesArgs {
    /// Inclusive range of m, as `A-B` or a single value.
    #[arg(long, default_value = "1-10")]
    pub m_range: String,
    #[arg(long, default_value_t = 1)]
    pub n1u: u64,
    #[arg(long, default_value_t = 0)]
    pub n2u: u64,
    #[arg(long, default_value_t = 1)]
    pub n1w: u64,
    #[arg(long, default_value_t = 0)]
    pub n2w: u64,
    /// Take U's gate counts from a circuit JSON file.
    #[arg(long)]
    pub u_circuit: Option<PathBuf>,
    /// Take W's gate counts from a circuit JSON file.
    #[arg(long)]
    pub w_circuit: Option<PathBuf>,
    /// Print the table as CSV.
    #[arg(long)]
    pub csv: bool,
}

fn parse_range(s: &str) -> Result<(u32, u32), Failure> {
    let bad = || Failure::usage(format!("--m-range must be `A-B` or `A`, got {s:?}"));
    let (lo, hi) = match s.split_once('-') {
        Some((lo, hi)) => (lo.trim().parse().map_err(|_| bad())?, hi.trim().parse().map_err(|_| bad())?),
        None => {
            let v = s.trim().parse().map_err(|_| bad())?;
            (v, v)
        }
    };
    if lo == 0 || lo > hi {
        return Err(bad());
    }
    Ok((lo, hi))
}

fn load_circuit(path: &PathBuf) -> Result<Circuit, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    Ok(Circuit::from_json(&text)?)
}

pub fn resources(a: &ResourcesArgs) -> Result<Output, Failure> {
    let (lo, hi) = parse_range(&a.m_range)?;
    let mut base = CostProfile { m: lo, n1_u: a.n1u, n2_u: a.n2u, n1_w: a.n1w, n2_w: a.n2w };
    if let Some(p) = &a.u_circuit {
        let c = load_circuit(p)?;
        let counted = CostProfile::from_circuits(&c, &Circuit::new(c.num_qubits()), lo)?;
        (base.n1_u, base.n2_u) = (counted.n1_u, counted.n2_u);
    }
    if let Some(p) = &a.w_circuit {
        let c = load_circuit(p)?;
        let counted = CostProfile::from_circuits(&Circuit::new(c.num_qubits()), &c, lo)?;
        (base.n1_w, base.n2_w) = (counted.n1_w, counted.n2_w);
    }
    let rows = cost_table(&base, lo..=hi)?;
    let csv = cost_table_csv(&rows)?;
    let mut text = format!("{:>4} {:>22} {:>22} {:>14} {:>14}\n", "m", "standard", "uncontrolled", "ratio", "limit ratio");
    for r in &rows {
        writeln!(
            text,
            "{:>4} {:>22} {:>22} {:>14.6} {:>14}",
            r.m,
            r.cost_standard,
            r.cost_uncontrolled,
            r.ratio_value,
            r.asymptotic_ratio.as_deref().unwrap_or("-")
        )
        .unwrap();
    }
    let profile = json!({ "n1_u": base.n1_u, "n2_u": base.n2_u, "n1_w": base.n1_w, "n2_w": base.n2_w });
    let results = json!({ "profile": profile, "rows": to_value(&rows)? });
    let mut out = Output::new(a, &results, text)?;
    if a.csv {
        out.stdout_csv = Some(csv.clone());
    }
    out.files.push(("resources.csv".to_string(), csv));
    Ok(out)
}

#[derive(Args, Debug, Serialize)]
pub struct HeisenbergArgs {
    /// JSON descriptor, e.g. {"N": 3, "J": 1.0, "m": 8, "evolution": "trotter", "steps": 64}.
    /// Overrides the individual flags.
    #[arg(long)]
    pub descriptor: Option<PathBuf>,
    /// Number of sites.
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    /// Coupling J.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub j: f64,
    /// Evolution time (default: half the wrap-free window).
    #[arg(long)]
    pub t: Option<f64>,
    /// Number of phase bits.
    #[arg(long, default_value_t = 8)]
    pub m: usize,
    /// exact | trotter
    #[arg(long, default_value = "exact")]
    pub evolution: String,
    /// Trotter steps (trotter only; default 64).
    #[arg(long)]
    pub steps: Option<u32>,
    /// exact | basis:<bits>
    #[arg(long, default_value = "exact")]
    pub candidate: String,
}

pub fn heisenberg(a: &HeisenbergArgs) -> Result<Output, Failure> {
    let spec = match &a.descriptor {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
            HeisenbergSpec::from_json(&text)?
        }
        None => HeisenbergSpec::try_from(Descriptor {
            n: a.n,
            j: a.j,
            t: a.t,
            m: a.m,
            evolution: a.evolution.clone(),
            steps: a.steps,
            candidate: a.candidate.clone(),
        })?,
    };
    if spec.n + spec.m > MAX_QUBITS {
        return Err(Error::TooManyQubits { requested: spec.n + spec.m, cap: MAX_QUBITS }.into());
    }
    let rep = estimate_ground_energy(&spec)?;
    let error = (rep.energy - rep.exact_ground_energy).abs();
    let within = error <= rep.grid_step;
    let mut text = format!(
        "estimated energy: {:.9}\nexact ground energy: {:.9}\ngrid step: {:.9}\nwithin one step: {within}\nTVD to standard QPE: {:.3e}\n",
        rep.energy, rep.exact_ground_energy, rep.grid_step, rep.standard_distance
    );
    if let Some(tr) = rep.trotter {
        writeln!(text, "Trotter error ({} steps): {:.3e}", tr.steps, tr.error).unwrap();
    }
    let mut results = to_value(&rep)?;
    results["abs_error"] = json!(error);
    results["within_grid_step"] = json!(within);
    let mut out = Output::new(&json!({ "spec": spec, "descriptor": a.descriptor }), &results, text)?;
    out.declared_failure = !within;
    Ok(out)
}

#[derive(Args, Debug, Serialize)]
pub struct ShorArgs {
    /// Modulus N.
    #[arg(long)]
    pub n: u64,
    /// Base a, coprime to N.
    #[arg(long)]
    pub a: u64,
    /// Phase bits (default 2·⌈log₂ N⌉).
    #[arg(long)]
    pub m: Option<usize>,
    /// Maximum number of sampled runs.
    #[arg(long, default_value_t = 16)]
    pub runs: usize,
}

pub fn shor(a: &ShorArgs, seed: u64) -> Result<Output, Failure> {
    if a.n < 2 {
        return Err(Failure::usage("--n must be at least 2"));
    }
    let m = a.m.unwrap_or(2 * system_qubits(a.n));
    let spec = OrderFindingSpec::new(a.n, a.a, m, seed)?;
    let result = find_order(&spec, a.runs)?;
    let classical = classical_order(a.a, a.n)?;
    let ok = result.order == Some(classical);
    let text = format!(
        "order: {}\nclassical order: {classical}\nruns used: {}\ncandidates: {:?}\nblocks: {} uncontrolled, {} controlled",
        result.order.map_or("not found".into(), |r| r.to_string()),
        result.runs_used,
        result.candidates,
        result.uncontrolled_block_count,
        result.controlled_block_count,
    );
    let mut results = to_value(&result)?;
    results["classical_order"] = json!(classical);
    let mut out = Output::new(&json!({ "n": a.n, "a": a.a, "m": m, "runs": a.runs }), &results, text)?;
    out.declared_failure = !ok;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_range("1-10").ok(), Some((1, 10)));
        assert_eq!(parse_range("4").ok(), Some((4, 4)));
        for bad in ["0-3", "5-2", "x", "1-", ""] {
            assert_eq!(parse_range(bad).err().map(|f| f.code), Some(2), "{bad}");
        }
    }

    #[test]
    fn phases_must_be_in_unit_interval() {
        assert!(phase_arg("theta", 0.0).is_ok());
        assert!(phase_arg("theta", 1.0).is_err());
        assert!(phase_arg("theta", f64::NAN).is_err());
    }

    #[test]
    fn error_codes() {
        assert_eq!(Failure::from(Error::PhaseWrap).code, 2);
        assert_eq!(Failure::from(Error::ResidualEntanglement { purity: 0.5 }).code, 1);
    }
}
