//! Gate-level controlled compilation.
//!
//! Decomposition rule, fixed so that two-qubit counts are exact:
//!
//! * a single-qubit gate `U` becomes a controlled-`U` with exactly 2 CNOTs;
//! * a two-qubit gate of the form "one control, one single-qubit target"
//!   becomes a doubly-controlled `U` with exactly 6 CNOTs (the Toffoli
//!   skeleton).
//!
//! Both use the same construction: diagonalize `U = B·diag(d0, d1)·B†` on
//! the target, then realize the resulting diagonal controlled operator as a
//! phase polynomial over the parities of the involved qubits. The CNOT
//! skeletons below visit every non-empty parity exactly once, and a phase
//! gate on the wire currently holding a parity imprints that parity's
//! weight. Open controls are conjugated with X.

use super::{Circuit, Control, GateOp, UnitaryMatrix};
use crate::error::{Error, Result};
use crate::linalg::{eig_normal_2x2, Matrix};

const SKIP_ANGLE: f64 = 1e-15;

/// Compiles `circuit` into one- and two-qubit gates implementing its
/// `polarity`-controlled version on `control`.
///
/// `control` must be inside the register but unused by `circuit`. The
/// returned circuit's two-qubit count is exactly `2·n1 + 6·n2` of the input.
/// Two-qubit gates must be singly-controlled single-qubit gates (CX, CZ,
/// controlled phase, controlled rotations, ...); swaps, dense two-qubit
/// blocks and gates of arity three or more are rejected.
pub fn compile_controlled(circuit: &Circuit, control: usize, polarity: bool) -> Result<Circuit> {
    let n = circuit.num_qubits();
    if control >= n {
        return Err(Error::QubitOutOfRange { qubit: control, num_qubits: n });
    }
    if let Some(op) = circuit.ops().iter().find(|op| op.touches(control)) {
        return Err(Error::InvalidArgument(format!(
            "control qubit {control} already used by {} gate",
            op.kind().name()
        )));
    }
    let mut out = Circuit::new(n).with_label(format!("c-{}", circuit.label()));
    for op in circuit.ops() {
        compile_op(&mut out, op, control, polarity)?;
    }
    Ok(out)
}

fn compile_op(out: &mut Circuit, op: &GateOp, control: usize, polarity: bool) -> Result<()> {
    let Some(m) = op.kind().matrix2() else {
        return Err(Error::Unsupported(format!(
            "cannot compile a controlled {} gate; expand it into single-qubit and singly-controlled gates first",
            op.kind().name()
        )));
    };
    let target = op.targets()[0];
    let inner: Option<Control> = match op.controls() {
        [] => None,
        [c] => Some(*c),
        _ => {
            return Err(Error::Unsupported(
                "gates of arity three or more are not costed; decompose them first".into(),
            ))
        }
    };

    let u = Matrix::from_row_slice(2, 2, &[m[0][0], m[0][1], m[1][0], m[1][1]]);
    let (basis, d0, d1) = eig_normal_2x2(&u);
    let (a, b) = (d0.arg(), d1.arg());
    let basis_is_identity = (basis.clone() - Matrix::identity(2, 2)).iter().all(|z| z.norm() < 1e-15);

    let mut flips = Vec::new();
    if !polarity {
        flips.push(control);
    }
    if let Some(c) = inner {
        if !c.polarity {
            flips.push(c.qubit);
        }
    }
    for &q in &flips {
        out.push(GateOp::x(q))?;
    }
    if !basis_is_identity {
        let rot = UnitaryMatrix::new("basis†", basis.adjoint())?;
        out.push(GateOp::unitary(rot, vec![target])?)?;
    }
    match inner {
        None => {
            // f(xc, xt) = xc·(a(1−xt) + b·xt)
            let w = walsh_weights(2, |x| if x & 1 == 1 { if x & 2 == 2 { b } else { a } } else { 0.0 });
            two_var_skeleton(out, control, target, &w)?;
        }
        Some(c) => {
            // f(xc, xb, xt) = xc·xb·(a(1−xt) + b·xt)
            let w = walsh_weights(3, |x| if x & 3 == 3 { if x & 4 == 4 { b } else { a } } else { 0.0 });
            three_var_skeleton(out, control, c.qubit, target, &w)?;
        }
    }
    if !basis_is_identity {
        let rot = UnitaryMatrix::new("basis", basis)?;
        out.push(GateOp::unitary(rot, vec![target])?)?;
    }
    for &q in flips.iter().rev() {
        out.push(GateOp::x(q))?;
    }
    Ok(())
}

/// Parity weights `w[S]` with `f(x) = Σ_{S≠∅} w[S]·parity(S & x)`, valid
/// when `f(0) = 0`. Variable `i` is bit `i` of `x`.
fn walsh_weights(vars: u32, f: impl Fn(usize) -> f64) -> Vec<f64> {
    let size = 1usize << vars;
    let values: Vec<f64> = (0..size).map(&f).collect();
    (0..size)
        .map(|s| {
            if s == 0 {
                return 0.0;
            }
            let hat: f64 = values
                .iter()
                .enumerate()
                .map(|(x, v)| if (s & x).count_ones() % 2 == 0 { *v } else { -*v })
                .sum::<f64>()
                / size as f64;
            -2.0 * hat
        })
        .collect()
}

fn phase(out: &mut Circuit, qubit: usize, angle: f64) -> Result<()> {
    if angle.abs() > SKIP_ANGLE {
        out.push(GateOp::phase(qubit, angle))?;
    }
    Ok(())
}

/// Variables: bit0 = c, bit1 = t. Two CNOTs.
fn two_var_skeleton(out: &mut Circuit, c: usize, t: usize, w: &[f64]) -> Result<()> {
    phase(out, c, w[0b01])?;
    phase(out, t, w[0b10])?;
    out.push(GateOp::cx(c, t))?;
    phase(out, t, w[0b11])?;
    out.push(GateOp::cx(c, t))?;
    Ok(())
}

/// Variables: bit0 = a, bit1 = b, bit2 = t. Six CNOTs.
fn three_var_skeleton(out: &mut Circuit, a: usize, b: usize, t: usize, w: &[f64]) -> Result<()> {
    out.push(GateOp::cx(b, t))?;
    phase(out, t, w[0b110])?;
    out.push(GateOp::cx(a, t))?;
    phase(out, t, w[0b111])?;
    out.push(GateOp::cx(b, t))?;
    phase(out, t, w[0b101])?;
    out.push(GateOp::cx(a, t))?;
    phase(out, t, w[0b100])?;
    phase(out, b, w[0b010])?;
    out.push(GateOp::cx(a, b))?;
    phase(out, b, w[0b011])?;
    phase(out, a, w[0b001])?;
    out.push(GateOp::cx(a, b))?;
    Ok(())
}
