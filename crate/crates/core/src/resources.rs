//! Two-qubit gate costs of standard and uncontrolled phase estimation.
//!
//! Under the fixed decomposition of [`compile_controlled`] a controlled
//! single-qubit gate costs 2 two-qubit gates and a controlled two-qubit gate
//! costs 6, so
//!
//! ```text
//! standard     = (2^m − 1)·(2·n1_U + 6·n2_U)
//! uncontrolled = m·(4·n1_W + 12·n2_W) + (2^m − 1)·n2_U
//! ```
//!
//! The uncontrolled count charges two controlled copies of `W` per block
//! (a controlled `W†` costs the same as a controlled `W`) plus the plain
//! two-qubit gates of the `U` powers. All arithmetic is exact.
//!
//! When `n2_U = 0` the costs are often quoted in their large-`m` forms
//! `2^m·2·n1_U` and `m·4·n1_W`, whose ratio is `2^m/(2m)` for
//! `n1_U = n1_W`. [`asymptotic_ratio`] evaluates that form;
//! [`reduction_ratio`] is the exact quotient, `(2^m − 1)/(2m)` in the same
//! setting.

use num_rational::Ratio;
use serde::Serialize;

use crate::circuit::{compile_controlled, Circuit, GateCountReport, GateKind};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CostProfile {
    pub m: u32,
    pub n1_u: u64,
    pub n2_u: u64,
    pub n1_w: u64,
    pub n2_w: u64,
}

impl CostProfile {
    /// Profile from the gate counts of actual `U` and `W` circuits. Fails
    /// when either contains gates the cost model does not cover: three or
    /// more qubits, or dense multi-qubit blocks that would need expanding.
    pub fn from_circuits(u: &Circuit, w: &Circuit, m: u32) -> Result<Self> {
        let (cu, cw) = (u.count_gates(), w.count_gates());
        for (name, c) in [("U", cu), ("W", cw)] {
            if !c.is_costable() {
                return Err(Error::Unsupported(format!(
                    "{name} has {} gate(s) acting on three or more qubits",
                    c.rejected
                )));
            }
        }
        for (name, c) in [("U", u), ("W", w)] {
            if c.ops().iter().any(|op| matches!(op.kind(), GateKind::Unitary(g) if g.arity() > 1)) {
                return Err(Error::Unsupported(format!("{name} contains a dense multi-qubit block")));
            }
        }
        Ok(CostProfile { m, n1_u: cu.n1, n2_u: cu.n2, n1_w: cw.n1, n2_w: cw.n2 })
    }

    fn check(&self) -> Result<()> {
        if self.m == 0 {
            return Err(Error::InvalidArgument("m must be at least 1".into()));
        }
        Ok(())
    }
}

fn overflow() -> Error {
    Error::Overflow("gate count")
}

/// `2^m − 1`.
fn powers_sum(m: u32) -> Result<u128> {
    1u128.checked_shl(m).filter(|_| m < 128).map(|p| p - 1).ok_or_else(overflow)
}

fn lin(a: u128, x: u64, b: u128, y: u64) -> Result<u128> {
    let ax = a.checked_mul(x as u128).ok_or_else(overflow)?;
    let by = b.checked_mul(y as u128).ok_or_else(overflow)?;
    ax.checked_add(by).ok_or_else(overflow)
}

pub fn standard_qpe_cost(p: &CostProfile) -> Result<u128> {
    p.check()?;
    powers_sum(p.m)?.checked_mul(lin(2, p.n1_u, 6, p.n2_u)?).ok_or_else(overflow)
}

pub fn uncontrolled_qpe_cost(p: &CostProfile) -> Result<u128> {
    p.check()?;
    let blocks = (p.m as u128).checked_mul(lin(4, p.n1_w, 12, p.n2_w)?).ok_or_else(overflow)?;
    let powers = powers_sum(p.m)?.checked_mul(p.n2_u as u128).ok_or_else(overflow)?;
    blocks.checked_add(powers).ok_or_else(overflow)
}

/// `standard / uncontrolled`, reduced.
pub fn reduction_ratio(p: &CostProfile) -> Result<Ratio<u128>> {
    let den = uncontrolled_qpe_cost(p)?;
    if den == 0 {
        return Err(Error::InvalidArgument("uncontrolled cost is zero; ratio undefined".into()));
    }
    Ok(Ratio::new(standard_qpe_cost(p)?, den))
}

/// `(2^m·2·n1_U) / (m·4·n1_W)`: the ratio of the `n2 → 0` cost forms.
pub fn asymptotic_ratio(p: &CostProfile) -> Result<Ratio<u128>> {
    p.check()?;
    let den = (p.m as u128).checked_mul(4 * p.n1_w as u128).ok_or_else(overflow)?;
    if den == 0 {
        return Err(Error::InvalidArgument("n1_W is zero; ratio undefined".into()));
    }
    let pow = 1u128.checked_shl(p.m).filter(|_| p.m < 128).ok_or_else(overflow)?;
    let num = pow.checked_mul(2 * p.n1_u as u128).ok_or_else(overflow)?;
    Ok(Ratio::new(num, den))
}

pub fn ratio_to_f64(r: &Ratio<u128>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CostRow {
    pub m: u32,
    pub cost_standard: u128,
    pub cost_uncontrolled: u128,
    /// Exact ratio as `numer/denom` (or an integer).
    pub ratio: String,
    pub ratio_value: f64,
    pub asymptotic_ratio: Option<String>,
}

/// Costs for each `m` in `ms`, other fields taken from `base`.
pub fn cost_table(base: &CostProfile, ms: impl IntoIterator<Item = u32>) -> Result<Vec<CostRow>> {
    ms.into_iter()
        .map(|m| {
            let p = CostProfile { m, ..*base };
            let r = reduction_ratio(&p)?;
            Ok(CostRow {
                m,
                cost_standard: standard_qpe_cost(&p)?,
                cost_uncontrolled: uncontrolled_qpe_cost(&p)?,
                ratio: r.to_string(),
                ratio_value: ratio_to_f64(&r),
                asymptotic_ratio: asymptotic_ratio(&p).ok().map(|a| a.to_string()),
            })
        })
        .collect()
}

/// CSV with columns `m, cost_standard, cost_uncontrolled, ratio,
/// asymptotic_ratio` (the last is empty when undefined).
pub fn cost_table_csv(rows: &[CostRow]) -> Result<String> {
    let io = |e: csv::Error| Error::InvalidArgument(format!("csv: {e}"));
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["m", "cost_standard", "cost_uncontrolled", "ratio", "asymptotic_ratio"]).map_err(io)?;
    for r in rows {
        let fields = [
            r.m.to_string(),
            r.cost_standard.to_string(),
            r.cost_uncontrolled.to_string(),
            r.ratio.clone(),
            r.asymptotic_ratio.clone().unwrap_or_default(),
        ];
        w.write_record(fields).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::InvalidArgument(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// The controlled-`U^{2^k}` chain of standard QPE, compiled gate by gate.
/// System on qubits `0..n`, ancilla `k` at `n + k`.
pub fn compiled_standard_chain(u: &Circuit, m: usize) -> Result<Circuit> {
    let n = u.num_qubits();
    let total = n + m;
    let wide = u.widened(total)?;
    let mut out = Circuit::new(total).with_label("compiled controlled-U chain");
    for k in 0..m {
        out.append(&compile_controlled(&wide.power(1 << k)?, n + k, true)?)?;
    }
    Ok(out)
}

/// Uncontrolled QPE blocks with the controlled `W` gates compiled; `U`
/// powers are left as they are.
pub fn compiled_uncontrolled_chain(u: &Circuit, w: &Circuit, m: usize) -> Result<Circuit> {
    let n = u.num_qubits();
    let total = n + m;
    let (u, w) = (u.widened(total)?, w.widened(total)?);
    let w_dag = w.invert();
    let mut out = Circuit::new(total).with_label("compiled uncontrolled blocks");
    for k in 0..m {
        let a = n + k;
        out.append(&compile_controlled(&w, a, true)?)?;
        out.append(&u.power(1 << k)?)?;
        if k + 1 < m {
            out.append(&compile_controlled(&w_dag, a, true)?)?;
        } else {
            out.append(&compile_controlled(&w, a, false)?)?;
        }
    }
    Ok(out)
}

/// Gate counts and model costs for a concrete `(U, W, m)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResourceReport {
    pub u_counts: GateCountReport,
    pub w_counts: GateCountReport,
    /// `None` when `U` or `W` contains dense blocks the model cannot cost.
    pub profile: Option<CostProfile>,
    pub cost_standard: Option<u128>,
    pub cost_uncontrolled: Option<u128>,
    pub ratio: Option<String>,
}

pub fn resource_report(u: &Circuit, w: &Circuit, m: u32) -> Result<ResourceReport> {
    let profile = CostProfile::from_circuits(u, w, m).ok();
    let (cost_standard, cost_uncontrolled, ratio) = match &profile {
        Some(p) => (
            Some(standard_qpe_cost(p)?),
            Some(uncontrolled_qpe_cost(p)?),
            reduction_ratio(p).ok().map(|r| r.to_string()),
        ),
        None => (None, None, None),
    };
    Ok(ResourceReport { u_counts: u.count_gates(), w_counts: w.count_gates(), profile, cost_standard, cost_uncontrolled, ratio })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::GateOp;

    fn p(m: u32, n1_u: u64, n2_u: u64, n1_w: u64, n2_w: u64) -> CostProfile {
        CostProfile { m, n1_u, n2_u, n1_w, n2_w }
    }

    #[test]
    fn formula_values() {
        assert_eq!(standard_qpe_cost(&p(1, 1, 0, 0, 0)).unwrap(), 2);
        assert_eq!(standard_qpe_cost(&p(3, 10, 4, 0, 0)).unwrap(), 308);
        assert_eq!(uncontrolled_qpe_cost(&p(1, 0, 0, 1, 0)).unwrap(), 4);
        assert_eq!(uncontrolled_qpe_cost(&p(3, 0, 4, 2, 0)).unwrap(), 52);
    }

    #[test]
    fn ratios() {
        assert_eq!(asymptotic_ratio(&p(10, 1, 0, 1, 0)).unwrap(), Ratio::new(256, 5));
        assert_eq!(asymptotic_ratio(&p(1, 1, 0, 1, 0)).unwrap(), Ratio::from_integer(1));
        assert_eq!(ratio_to_f64(&asymptotic_ratio(&p(20, 1, 0, 1, 0)).unwrap()), 26214.4);
        assert_eq!(reduction_ratio(&p(10, 1, 0, 1, 0)).unwrap(), Ratio::new(1023, 20));
        assert_eq!(reduction_ratio(&p(1, 1, 0, 1, 0)).unwrap(), Ratio::new(1, 2));
        assert!(reduction_ratio(&p(3, 1, 0, 0, 0)).is_err());
        assert!(asymptotic_ratio(&p(3, 1, 0, 0, 0)).is_err());
    }

    #[test]
    fn overflow_is_an_error() {
        assert!(matches!(standard_qpe_cost(&p(128, 1, 0, 0, 0)), Err(Error::Overflow(_))));
        assert!(matches!(standard_qpe_cost(&p(127, u64::MAX, 0, 0, 0)), Err(Error::Overflow(_))));
        assert!(standard_qpe_cost(&p(0, 1, 0, 0, 0)).is_err());
    }

    #[test]
    fn csv_layout() {
        let rows = cost_table(&p(1, 1, 0, 1, 0), [1, 10]).unwrap();
        assert_eq!(cost_table_csv(&rows).unwrap(), "m,cost_standard,cost_uncontrolled,ratio,asymptotic_ratio\n1,2,4,1/2,1\n10,2046,40,1023/20,256/5\n");
    }

    #[test]
    fn dense_gates_are_not_costed() {
        let u = Circuit::from_ops(2, [GateOp::cx(0, 1)]).unwrap();
        let w = crate::circuit::state_prep(
            &crate::StateVector::normalized(vec![1.0.into(), 1.0.into(), 1.0.into(), 0.0.into()]).unwrap(),
        )
        .unwrap();
        let r = resource_report(&u, &w, 3).unwrap();
        assert!(r.profile.is_none());
        assert!(r.cost_standard.is_none());
        assert_eq!(r.w_counts.n2, 1);
    }
}
