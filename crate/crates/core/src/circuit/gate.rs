use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{cis, unitarity_deviation, Matrix, ONE, ZERO};

/// Tolerance used when admitting a dense matrix as a gate.
pub const UNITARITY_TOLERANCE: f64 = 1e-10;

/// A validated dense unitary on `arity` qubits.
///
/// Local index convention: bit `j` of a row/column index refers to the
/// gate's `targets[j]`, so `targets[0]` is the least significant.
#[derive(Clone, PartialEq)]
pub struct UnitaryMatrix {
    label: String,
    arity: usize,
    matrix: Arc<Matrix>,
}

impl UnitaryMatrix {
    pub fn new(label: impl Into<String>, matrix: Matrix) -> Result<Self> {
        let dim = matrix.nrows();
        if !matrix.is_square() || dim < 2 || !dim.is_power_of_two() {
            return Err(Error::InvalidArgument(format!(
                "dense gate must be square with power-of-two dimension, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if matrix.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidArgument("dense gate has non-finite entries".into()));
        }
        let deviation = unitarity_deviation(&matrix);
        if deviation > UNITARITY_TOLERANCE {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(UnitaryMatrix {
            label: label.into(),
            arity: dim.trailing_zeros() as usize,
            matrix: Arc::new(matrix),
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn adjoint(&self) -> Self {
        let label = match self.label.strip_suffix('†') {
            Some(base) => base.to_string(),
            None => format!("{}†", self.label),
        };
        UnitaryMatrix {
            label,
            arity: self.arity,
            matrix: Arc::new(self.matrix.adjoint()),
        }
    }
}

impl fmt::Debug for UnitaryMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Unitary({:?}, {} qubits)", self.label, self.arity)
    }
}

/// Gate primitives. Angles are in radians.
#[derive(Clone, Debug, PartialEq)]
pub enum GateKind {
    H,
    X,
    Y,
    Z,
    S,
    Sdg,
    T,
    Tdg,
    /// `diag(1, e^{iλ})`
    Phase(f64),
    Rx(f64),
    Ry(f64),
    Rz(f64),
    Swap,
    Unitary(UnitaryMatrix),
}

impl GateKind {
    pub fn arity(&self) -> usize {
        match self {
            GateKind::Swap => 2,
            GateKind::Unitary(u) => u.arity(),
            _ => 1,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            GateKind::H => "h",
            GateKind::X => "x",
            GateKind::Y => "y",
            GateKind::Z => "z",
            GateKind::S => "s",
            GateKind::Sdg => "sdg",
            GateKind::T => "t",
            GateKind::Tdg => "tdg",
            GateKind::Phase(_) => "phase",
            GateKind::Rx(_) => "rx",
            GateKind::Ry(_) => "ry",
            GateKind::Rz(_) => "rz",
            GateKind::Swap => "swap",
            GateKind::Unitary(_) => "unitary",
        }
    }

    pub fn params(&self) -> Vec<f64> {
        match *self {
            GateKind::Phase(a) | GateKind::Rx(a) | GateKind::Ry(a) | GateKind::Rz(a) => vec![a],
            _ => Vec::new(),
        }
    }

    pub fn adjoint(&self) -> GateKind {
        match self {
            GateKind::S => GateKind::Sdg,
            GateKind::Sdg => GateKind::S,
            GateKind::T => GateKind::Tdg,
            GateKind::Tdg => GateKind::T,
            GateKind::Phase(a) => GateKind::Phase(-a),
            GateKind::Rx(a) => GateKind::Rx(-a),
            GateKind::Ry(a) => GateKind::Ry(-a),
            GateKind::Rz(a) => GateKind::Rz(-a),
            GateKind::Unitary(u) => GateKind::Unitary(u.adjoint()),
            other => other.clone(),
        }
    }

    /// 2x2 matrix of a single-qubit primitive, row-major.
    pub(crate) fn matrix2(&self) -> Option<[[Complex64; 2]; 2]> {
        let r = |x: f64| Complex64::new(x, 0.0);
        let i = |x: f64| Complex64::new(0.0, x);
        let m = match *self {
            GateKind::H => [[r(FRAC_1_SQRT_2), r(FRAC_1_SQRT_2)], [r(FRAC_1_SQRT_2), r(-FRAC_1_SQRT_2)]],
            GateKind::X => [[ZERO, ONE], [ONE, ZERO]],
            GateKind::Y => [[ZERO, i(-1.0)], [i(1.0), ZERO]],
            GateKind::Z => [[ONE, ZERO], [ZERO, r(-1.0)]],
            GateKind::S => [[ONE, ZERO], [ZERO, i(1.0)]],
            GateKind::Sdg => [[ONE, ZERO], [ZERO, i(-1.0)]],
            GateKind::T => [[ONE, ZERO], [ZERO, cis(std::f64::consts::FRAC_PI_4)]],
            GateKind::Tdg => [[ONE, ZERO], [ZERO, cis(-std::f64::consts::FRAC_PI_4)]],
            GateKind::Phase(a) => [[ONE, ZERO], [ZERO, cis(a)]],
            GateKind::Rx(a) => {
                let (s, c) = (a / 2.0).sin_cos();
                [[r(c), i(-s)], [i(-s), r(c)]]
            }
            GateKind::Ry(a) => {
                let (s, c) = (a / 2.0).sin_cos();
                [[r(c), r(-s)], [r(s), r(c)]]
            }
            GateKind::Rz(a) => [[cis(-a / 2.0), ZERO], [ZERO, cis(a / 2.0)]],
            GateKind::Unitary(ref u) if u.arity() == 1 => {
                let m = u.matrix();
                [[m[(0, 0)], m[(0, 1)]], [m[(1, 0)], m[(1, 1)]]]
            }
            _ => return None,
        };
        Some(m)
    }

    /// Dense matrix on the gate's targets (controls excluded).
    pub fn matrix(&self) -> Matrix {
        if let Some(m) = self.matrix2() {
            return Matrix::from_row_slice(2, 2, &[m[0][0], m[0][1], m[1][0], m[1][1]]);
        }
        match self {
            GateKind::Swap => {
                let mut m = Matrix::zeros(4, 4);
                m[(0, 0)] = ONE;
                m[(1, 2)] = ONE;
                m[(2, 1)] = ONE;
                m[(3, 3)] = ONE;
                m
            }
            GateKind::Unitary(u) => u.matrix().clone(),
            _ => unreachable!("single-qubit kinds handled above"),
        }
    }
}

/// A control qubit; `polarity == true` acts on the |1⟩ subspace,
/// `false` on |0⟩ (open control).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Control {
    pub qubit: usize,
    pub polarity: bool,
}

impl Control {
    pub fn one(qubit: usize) -> Self {
        Control { qubit, polarity: true }
    }

    pub fn zero(qubit: usize) -> Self {
        Control { qubit, polarity: false }
    }
}

/// One gate instance: a primitive or dense unitary on `targets`, guarded
/// by `controls`.
#[derive(Clone, Debug, PartialEq)]
pub struct GateOp {
    kind: GateKind,
    targets: Vec<usize>,
    controls: Vec<Control>,
}

impl GateOp {
    pub fn new(kind: GateKind, targets: Vec<usize>, controls: Vec<Control>) -> Result<Self> {
        if targets.len() != kind.arity() {
            return Err(Error::InvalidArgument(format!(
                "{} gate expects {} target(s), got {}",
                kind.name(),
                kind.arity(),
                targets.len()
            )));
        }
        for (i, &q) in targets.iter().enumerate() {
            if targets[..i].contains(&q) {
                return Err(Error::DuplicateQubit(q));
            }
        }
        for (i, c) in controls.iter().enumerate() {
            if targets.contains(&c.qubit) {
                return Err(Error::OverlappingQubits(c.qubit));
            }
            if controls[..i].iter().any(|o| o.qubit == c.qubit) {
                return Err(Error::DuplicateQubit(c.qubit));
            }
        }
        Ok(GateOp { kind, targets, controls })
    }

    fn single(kind: GateKind, qubit: usize) -> Self {
        GateOp { kind, targets: vec![qubit], controls: Vec::new() }
    }

    pub fn h(q: usize) -> Self {
        Self::single(GateKind::H, q)
    }
    pub fn x(q: usize) -> Self {
        Self::single(GateKind::X, q)
    }
    pub fn y(q: usize) -> Self {
        Self::single(GateKind::Y, q)
    }
    pub fn z(q: usize) -> Self {
        Self::single(GateKind::Z, q)
    }
    pub fn s(q: usize) -> Self {
        Self::single(GateKind::S, q)
    }
    pub fn t(q: usize) -> Self {
        Self::single(GateKind::T, q)
    }
    pub fn phase(q: usize, angle: f64) -> Self {
        Self::single(GateKind::Phase(angle), q)
    }
    pub fn rx(q: usize, angle: f64) -> Self {
        Self::single(GateKind::Rx(angle), q)
    }
    pub fn ry(q: usize, angle: f64) -> Self {
        Self::single(GateKind::Ry(angle), q)
    }
    pub fn rz(q: usize, angle: f64) -> Self {
        Self::single(GateKind::Rz(angle), q)
    }

    /// CNOT. Panics if `control == target`.
    pub fn cx(control: usize, target: usize) -> Self {
        assert_ne!(control, target, "cx control and target must differ");
        GateOp { kind: GateKind::X, targets: vec![target], controls: vec![Control::one(control)] }
    }

    /// Controlled-Z. Panics if `control == target`.
    pub fn cz(control: usize, target: usize) -> Self {
        assert_ne!(control, target, "cz control and target must differ");
        GateOp { kind: GateKind::Z, targets: vec![target], controls: vec![Control::one(control)] }
    }

    /// Controlled phase `diag(1,1,1,e^{iλ})`. Panics if `control == target`.
    pub fn cphase(control: usize, target: usize, angle: f64) -> Self {
        assert_ne!(control, target, "cphase control and target must differ");
        GateOp {
            kind: GateKind::Phase(angle),
            targets: vec![target],
            controls: vec![Control::one(control)],
        }
    }

    pub fn swap(a: usize, b: usize) -> Result<Self> {
        Self::new(GateKind::Swap, vec![a, b], Vec::new())
    }

    pub fn unitary(matrix: UnitaryMatrix, targets: Vec<usize>) -> Result<Self> {
        Self::new(GateKind::Unitary(matrix), targets, Vec::new())
    }

    /// Adds one more control.
    pub fn with_control(mut self, qubit: usize, polarity: bool) -> Result<Self> {
        if self.targets.contains(&qubit) {
            return Err(Error::OverlappingQubits(qubit));
        }
        if self.controls.iter().any(|c| c.qubit == qubit) {
            return Err(Error::DuplicateQubit(qubit));
        }
        self.controls.push(Control { qubit, polarity });
        Ok(self)
    }

    pub fn kind(&self) -> &GateKind {
        &self.kind
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    pub fn controls(&self) -> &[Control] {
        &self.controls
    }

    /// Total number of qubits touched (targets plus controls).
    pub fn arity(&self) -> usize {
        self.targets.len() + self.controls.len()
    }

    pub fn qubits(&self) -> impl Iterator<Item = usize> + '_ {
        self.targets.iter().copied().chain(self.controls.iter().map(|c| c.qubit))
    }

    pub fn touches(&self, qubit: usize) -> bool {
        self.qubits().any(|q| q == qubit)
    }

    pub fn adjoint(&self) -> GateOp {
        GateOp {
            kind: self.kind.adjoint(),
            targets: self.targets.clone(),
            controls: self.controls.clone(),
        }
    }

    /// Relabels every qubit through `map` (`map[old] = new`).
    pub fn remapped(&self, map: &[usize]) -> Result<GateOp> {
        let lookup = |q: usize| {
            map.get(q).copied().ok_or(Error::QubitOutOfRange { qubit: q, num_qubits: map.len() })
        };
        let targets = self.targets.iter().map(|&q| lookup(q)).collect::<Result<Vec<_>>>()?;
        let controls = self
            .controls
            .iter()
            .map(|c| Ok(Control { qubit: lookup(c.qubit)?, polarity: c.polarity }))
            .collect::<Result<Vec<_>>>()?;
        GateOp::new(self.kind.clone(), targets, controls)
    }

    pub(crate) fn check_range(&self, num_qubits: usize) -> Result<()> {
        match self.qubits().find(|&q| q >= num_qubits) {
            Some(qubit) => Err(Error::QubitOutOfRange { qubit, num_qubits }),
            None => Ok(()),
        }
    }
}
