//! Gate vocabulary and the composite carry/sum units of the ripple adder.

use std::f64::consts::FRAC_1_SQRT_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::statevec::{dyadic_phase, Amplitude};

/// A single gate acting on named qubit indices.
///
/// `ControlledRk` applies `e(±1/2^k)` to the `|11⟩` component of its two
/// qubits; `Rk` applies the same phase to `|1⟩` of its target. The `inverted`
/// flag selects the negative angle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "GateRecord", into = "GateRecord")]
pub enum GateOp {
    Hadamard {
        target: usize,
    },
    ControlledRk {
        control: usize,
        target: usize,
        k: u32,
        inverted: bool,
    },
    Rk {
        target: usize,
        k: u32,
        inverted: bool,
    },
    Cnot {
        control: usize,
        target: usize,
    },
    Toffoli {
        control1: usize,
        control2: usize,
        target: usize,
    },
}

impl GateOp {
    pub fn h(target: usize) -> Self {
        GateOp::Hadamard { target }
    }

    pub fn crk(control: usize, target: usize, k: u32) -> Self {
        GateOp::ControlledRk {
            control,
            target,
            k,
            inverted: false,
        }
    }

    pub fn rk(target: usize, k: u32) -> Self {
        GateOp::Rk {
            target,
            k,
            inverted: false,
        }
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        GateOp::Cnot { control, target }
    }

    pub fn toffoli(control1: usize, control2: usize, target: usize) -> Self {
        GateOp::Toffoli {
            control1,
            control2,
            target,
        }
    }

    /// Stable kind tag, also used as the JSON `kind` field.
    pub fn kind(&self) -> &'static str {
        match self {
            GateOp::Hadamard { .. } => "hadamard",
            GateOp::ControlledRk { .. } => "controlled_rk",
            GateOp::Rk { .. } => "rk",
            GateOp::Cnot { .. } => "cnot",
            GateOp::Toffoli { .. } => "toffoli",
        }
    }

    /// Qubits in local order: controls first, target last.
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            GateOp::Hadamard { target } | GateOp::Rk { target, .. } => vec![target],
            GateOp::ControlledRk {
                control, target, ..
            }
            | GateOp::Cnot { control, target } => {
                vec![control, target]
            }
            GateOp::Toffoli {
                control1,
                control2,
                target,
            } => vec![control1, control2, target],
        }
    }

    pub fn arity(&self) -> usize {
        match self {
            GateOp::Hadamard { .. } | GateOp::Rk { .. } => 1,
            GateOp::ControlledRk { .. } | GateOp::Cnot { .. } => 2,
            GateOp::Toffoli { .. } => 3,
        }
    }

    /// Rotation order `k` for `Rk` and `ControlledRk`.
    pub fn rotation_order(&self) -> Option<u32> {
        match *self {
            GateOp::Rk { k, .. } | GateOp::ControlledRk { k, .. } => Some(k),
            _ => None,
        }
    }

    /// The phase a rotation gate applies to its `|1…1⟩` component.
    pub fn rotation_phase(&self) -> Option<Amplitude> {
        match *self {
            GateOp::Rk { k, inverted, .. } | GateOp::ControlledRk { k, inverted, .. } => {
                let p = dyadic_phase(1, k);
                Some(if inverted { p.conj() } else { p })
            }
            _ => None,
        }
    }

    /// Diagonal in the computational basis, hence commutes with every other
    /// diagonal gate.
    pub fn is_diagonal(&self) -> bool {
        matches!(self, GateOp::Rk { .. } | GateOp::ControlledRk { .. })
    }

    pub fn inverse(&self) -> Self {
        match *self {
            GateOp::ControlledRk {
                control,
                target,
                k,
                inverted,
            } => GateOp::ControlledRk {
                control,
                target,
                k,
                inverted: !inverted,
            },
            GateOp::Rk {
                target,
                k,
                inverted,
            } => GateOp::Rk {
                target,
                k,
                inverted: !inverted,
            },
            other => other,
        }
    }

    /// Same gate with every qubit index shifted by `offset`.
    pub fn shifted(&self, offset: usize) -> Self {
        let mut op = *self;
        match &mut op {
            GateOp::Hadamard { target } | GateOp::Rk { target, .. } => *target += offset,
            GateOp::ControlledRk {
                control, target, ..
            }
            | GateOp::Cnot { control, target } => {
                *control += offset;
                *target += offset;
            }
            GateOp::Toffoli {
                control1,
                control2,
                target,
            } => {
                *control1 += offset;
                *control2 += offset;
                *target += offset;
            }
        }
        op
    }

    /// Checks `k ≥ 1`, pairwise-distinct qubits, and every index `< num_qubits`.
    pub fn validate(&self, num_qubits: usize) -> Result<()> {
        if let Some(k) = self.rotation_order() {
            if k == 0 {
                return Err(Error::InvalidRotationOrder(k));
            }
        }
        check_qubits(&self.qubits(), num_qubits)
    }
}

fn check_qubits(qubits: &[usize], num_qubits: usize) -> Result<()> {
    let distinct = qubits
        .iter()
        .enumerate()
        .all(|(i, q)| !qubits[..i].contains(q));
    if !distinct || qubits.iter().any(|&q| q >= num_qubits) {
        return Err(Error::QubitIndexError {
            qubits: qubits.to_vec(),
            num_qubits,
        });
    }
    Ok(())
}

/// JSON wire form of a gate.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GateRecord {
    kind: String,
    qubits: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    k: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    inverted: Option<bool>,
}

impl From<GateOp> for GateRecord {
    fn from(op: GateOp) -> Self {
        GateRecord {
            kind: op.kind().to_string(),
            qubits: op.qubits(),
            k: op.rotation_order(),
            inverted: match op {
                GateOp::Rk { inverted, .. } | GateOp::ControlledRk { inverted, .. } => {
                    Some(inverted)
                }
                _ => None,
            },
        }
    }
}

impl TryFrom<GateRecord> for GateOp {
    type Error = String;

    fn try_from(r: GateRecord) -> std::result::Result<Self, String> {
        let rotation = matches!(r.kind.as_str(), "rk" | "controlled_rk");
        if !rotation && (r.k.is_some() || r.inverted.is_some()) {
            return Err(format!("gate kind `{}` takes no `k` or `inverted`", r.kind));
        }
        let k = || {
            r.k.ok_or_else(|| format!("gate kind `{}` requires `k`", r.kind))
        };
        let inverted = r.inverted.unwrap_or(false);
        let arity = |m: usize| {
            if r.qubits.len() == m {
                Ok(())
            } else {
                Err(format!(
                    "gate kind `{}` takes {m} qubits, got {}",
                    r.kind,
                    r.qubits.len()
                ))
            }
        };
        let q = &r.qubits;
        let op = match r.kind.as_str() {
            "hadamard" => {
                arity(1)?;
                GateOp::h(q[0])
            }
            "controlled_rk" => {
                arity(2)?;
                GateOp::ControlledRk {
                    control: q[0],
                    target: q[1],
                    k: k()?,
                    inverted,
                }
            }
            "rk" => {
                arity(1)?;
                GateOp::Rk {
                    target: q[0],
                    k: k()?,
                    inverted,
                }
            }
            "cnot" => {
                arity(2)?;
                GateOp::cnot(q[0], q[1])
            }
            "toffoli" => {
                arity(3)?;
                GateOp::toffoli(q[0], q[1], q[2])
            }
            other => return Err(format!("unknown gate kind `{other}`")),
        };
        // Range is checked by the owning circuit; here only local structure.
        op.validate(usize::MAX).map_err(|e| e.to_string())?;
        Ok(op)
    }
}

/// Dense unitary in a gate's local qubit order: the first entry of
/// [`GateOp::qubits`] is the most significant bit of the local index.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix {
    dim: usize,
    entries: Vec<Amplitude>,
}

impl UnitaryMatrix {
    pub fn identity(dim: usize) -> Self {
        let mut entries = vec![Amplitude::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = Amplitude::new(1.0, 0.0);
        }
        Self { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Amplitude {
        self.entries[row * self.dim + col]
    }

    fn set(&mut self, row: usize, col: usize, v: Amplitude) {
        self.entries[row * self.dim + col] = v;
    }

    /// Largest entrywise deviation of `U·U†` from the identity.
    pub fn unitarity_error(&self) -> f64 {
        let d = self.dim;
        let mut worst: f64 = 0.0;
        for r in 0..d {
            for c in 0..d {
                let v: Amplitude = (0..d).map(|j| self.get(r, j) * self.get(c, j).conj()).sum();
                let expect = if r == c { 1.0 } else { 0.0 };
                worst = worst.max((v - expect).norm());
            }
        }
        worst
    }
}

/// The literal matrix of `op` in its local qubit ordering.
pub fn gate_matrix(op: &GateOp) -> UnitaryMatrix {
    let dim = 1 << op.arity();
    let mut m = UnitaryMatrix::identity(dim);
    match op {
        GateOp::Hadamard { .. } => {
            let s = Amplitude::new(FRAC_1_SQRT_2, 0.0);
            m.set(0, 0, s);
            m.set(0, 1, s);
            m.set(1, 0, s);
            m.set(1, 1, -s);
        }
        GateOp::Rk { .. } | GateOp::ControlledRk { .. } => {
            let p = op.rotation_phase().expect("rotation gate");
            m.set(dim - 1, dim - 1, p);
        }
        GateOp::Cnot { .. } | GateOp::Toffoli { .. } => {
            let (a, b) = (dim - 2, dim - 1);
            let zero = Amplitude::new(0.0, 0.0);
            let one = Amplitude::new(1.0, 0.0);
            m.set(a, a, zero);
            m.set(b, b, zero);
            m.set(a, b, one);
            m.set(b, a, one);
        }
    }
    m
}

/// The carry unit: with `c_out` initially 0 it receives the carry of
/// `a + b + c_in`, and `b` is left holding `a ⊕ b`.
///
/// The reversed form is the same three gates in opposite order; each gate is
/// self-inverse, so it undoes the forward unit.
pub fn carry_ops(
    c_in: usize,
    a: usize,
    b: usize,
    c_out: usize,
    reversed: bool,
) -> Result<Vec<GateOp>> {
    check_qubits(&[c_in, a, b, c_out], usize::MAX)?;
    let mut ops = vec![
        GateOp::toffoli(a, b, c_out),
        GateOp::cnot(a, b),
        GateOp::toffoli(c_in, b, c_out),
    ];
    if reversed {
        ops.reverse();
    }
    Ok(ops)
}

/// The sum unit: `b ← a ⊕ b ⊕ c`.
pub fn sum_ops(c: usize, a: usize, b: usize) -> Result<Vec<GateOp>> {
    check_qubits(&[c, a, b], usize::MAX)?;
    Ok(vec![GateOp::cnot(a, b), GateOp::cnot(c, b)])
}
