//! JSON document form of a [`Circuit`]:
//!
//! ```json
//! {"num_qubits": 2, "label": "",
//!  "ops": [{"kind": "x", "params": [], "targets": [1], "controls": [[0, 1]]},
//!          {"kind": "unitary", "params": [], "targets": [0], "controls": [],
//!           "label": "W", "matrix": [[0.0, 0.0], [1.0, 0.0], [1.0, 0.0], [0.0, 0.0]]}]}
//! ```
//!
//! Dense matrices are row-major `[re, im]` pairs.

use serde::{Deserialize, Serialize};

use super::{Circuit, Control, GateKind, GateOp, UnitaryMatrix};
use crate::error::{Error, Result};
use crate::linalg::Matrix;

#[derive(Serialize, Deserialize)]
struct CircuitDoc {
    num_qubits: usize,
    #[serde(default)]
    label: String,
    ops: Vec<OpDoc>,
}

#[derive(Serialize, Deserialize)]
struct OpDoc {
    kind: String,
    #[serde(default)]
    params: Vec<f64>,
    targets: Vec<usize>,
    #[serde(default)]
    controls: Vec<(usize, u8)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    matrix: Option<Vec<[f64; 2]>>,
}

impl From<&GateOp> for OpDoc {
    fn from(op: &GateOp) -> Self {
        let (label, matrix) = match op.kind() {
            GateKind::Unitary(u) => {
                let m = u.matrix();
                let mut rows = Vec::with_capacity(m.len());
                for r in 0..m.nrows() {
                    for c in 0..m.ncols() {
                        rows.push([m[(r, c)].re, m[(r, c)].im]);
                    }
                }
                (Some(u.label().to_string()), Some(rows))
            }
            _ => (None, None),
        };
        OpDoc {
            kind: op.kind().name().to_string(),
            params: op.kind().params(),
            targets: op.targets().to_vec(),
            controls: op.controls().iter().map(|c| (c.qubit, c.polarity as u8)).collect(),
            label,
            matrix,
        }
    }
}

impl TryFrom<OpDoc> for GateOp {
    type Error = Error;

    fn try_from(doc: OpDoc) -> Result<GateOp> {
        let angle = || -> Result<f64> {
            match doc.params.as_slice() {
                [a] if a.is_finite() => Ok(*a),
                _ => Err(Error::Parse(format!("{} expects exactly one finite parameter", doc.kind))),
            }
        };
        let kind = match doc.kind.as_str() {
            "h" => GateKind::H,
            "x" => GateKind::X,
            "y" => GateKind::Y,
            "z" => GateKind::Z,
            "s" => GateKind::S,
            "sdg" => GateKind::Sdg,
            "t" => GateKind::T,
            "tdg" => GateKind::Tdg,
            "phase" => GateKind::Phase(angle()?),
            "rx" => GateKind::Rx(angle()?),
            "ry" => GateKind::Ry(angle()?),
            "rz" => GateKind::Rz(angle()?),
            "swap" => GateKind::Swap,
            "unitary" => {
                let entries = doc.matrix.as_ref().ok_or_else(|| Error::Parse("unitary without matrix".into()))?;
                let dim = (entries.len() as f64).sqrt().round() as usize;
                if dim * dim != entries.len() {
                    return Err(Error::Parse(format!("matrix with {} entries is not square", entries.len())));
                }
                let data: Vec<_> = entries.iter().map(|[re, im]| num_complex::Complex64::new(*re, *im)).collect();
                let m = Matrix::from_row_slice(dim, dim, &data);
                GateKind::Unitary(UnitaryMatrix::new(doc.label.clone().unwrap_or_default(), m)?)
            }
            other => return Err(Error::Parse(format!("unknown gate kind {other:?}"))),
        };
        let controls = doc
            .controls
            .iter()
            .map(|&(qubit, p)| match p {
                0 | 1 => Ok(Control { qubit, polarity: p == 1 }),
                _ => Err(Error::Parse(format!("control polarity must be 0 or 1, got {p}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        GateOp::new(kind, doc.targets, controls)
    }
}

impl Circuit {
    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_doc()).expect("circuit documents always serialize")
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(&self.to_doc()).expect("circuit documents always serialize")
    }

    pub fn from_json(text: &str) -> Result<Circuit> {
        let doc: CircuitDoc = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let mut c = Circuit::new(doc.num_qubits).with_label(doc.label);
        for op in doc.ops {
            c.push(GateOp::try_from(op)?)?;
        }
        Ok(c)
    }

    fn to_doc(&self) -> CircuitDoc {
        CircuitDoc {
            num_qubits: self.num_qubits(),
            label: self.label().to_string(),
            ops: self.ops().iter().map(OpDoc::from).collect(),
        }
    }
}

impl Serialize for Circuit {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_doc().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Circuit {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let doc = CircuitDoc::deserialize(d)?;
        let mut c = Circuit::new(doc.num_qubits).with_label(doc.label);
        for op in doc.ops {
            c.push(GateOp::try_from(op).map_err(serde::de::Error::custom)?).map_err(serde::de::Error::custom)?;
        }
        Ok(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn document_shape() {
        let c = Circuit::from_ops(2, [GateOp::x(1).with_control(0, false).unwrap(), GateOp::phase(0, 0.25)])
            .unwrap();
        let v: serde_json::Value = serde_json::from_str(&c.to_json()).unwrap();
        assert_eq!(v["num_qubits"], 2);
        assert_eq!(v["ops"][0]["kind"], "x");
        assert_eq!(v["ops"][0]["controls"], serde_json::json!([[0, 0]]));
        assert_eq!(v["ops"][1]["params"], serde_json::json!([0.25]));
    }

    #[test]
    fn rejects_malformed() {
        assert!(Circuit::from_json(r#"{"num_qubits":1,"ops":[{"kind":"foo","targets":[0]}]}"#).is_err());
        assert!(Circuit::from_json(r#"{"num_qubits":1,"ops":[{"kind":"rx","targets":[0]}]}"#).is_err());
        assert!(Circuit::from_json(r#"{"num_qubits":1,"ops":[{"kind":"x","targets":[1]}]}"#).is_err());
        assert!(Circuit::from_json(
            r#"{"num_qubits":2,"ops":[{"kind":"x","targets":[1],"controls":[[0,2]]}]}"#
        )
        .is_err());
        let non_unitary = r#"{"num_qubits":1,"ops":[{"kind":"unitary","targets":[0],
            "matrix":[[1,0],[1,0],[0,0],[1,0]]}]}"#;
        assert!(matches!(Circuit::from_json(non_unitary), Err(Error::NotUnitary { .. })));
    }
}
