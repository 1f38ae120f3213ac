//! Flat gate-list circuits with execution, inversion and gate tallies.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gates::GateOp;
use crate::statevec::StateVector;

const INVERSE_SUFFIX: &str = "_inverse";

/// A named contiguous range of qubits, little-endian within the range.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Register {
    pub name: String,
    pub start: usize,
    pub len: usize,
}

impl Register {
    pub fn new(name: impl Into<String>, start: usize, len: usize) -> Self {
        Self {
            name: name.into(),
            start,
            len,
        }
    }

    pub fn qubit(&self, i: usize) -> usize {
        debug_assert!(i < self.len);
        self.start + i
    }

    /// Reads this register's value out of a full basis index.
    pub fn extract(&self, basis: u64) -> u64 {
        (basis >> self.start) & mask(self.len)
    }

    /// Places `value` into this register's bit positions.
    pub fn encode(&self, value: u64) -> Result<u64> {
        if value & !mask(self.len) != 0 {
            return Err(Error::ValueOutOfRange {
                value,
                bits: self.len,
            });
        }
        Ok(value << self.start)
    }
}

fn mask(bits: usize) -> u64 {
    if bits >= 64 {
        u64::MAX
    } else {
        (1u64 << bits) - 1
    }
}

/// Disjoint registers that together cover every qubit of a circuit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RegisterLayout {
    registers: Vec<Register>,
}

impl RegisterLayout {
    pub fn new(registers: Vec<Register>, num_qubits: usize) -> Result<Self> {
        let layout = Self { registers };
        layout.validate(num_qubits)?;
        Ok(layout)
    }

    pub fn validate(&self, num_qubits: usize) -> Result<()> {
        let mut covered = vec![false; num_qubits];
        for r in &self.registers {
            if r.len == 0 {
                return Err(Error::InvalidLayout(format!(
                    "register `{}` is empty",
                    r.name
                )));
            }
            for q in r.start..r.start + r.len {
                match covered.get_mut(q) {
                    Some(seen) if !*seen => *seen = true,
                    Some(_) => {
                        return Err(Error::InvalidLayout(format!(
                            "qubit {q} assigned twice (register `{}`)",
                            r.name
                        )))
                    }
                    None => {
                        return Err(Error::InvalidLayout(format!(
                            "register `{}` extends past {num_qubits} qubits",
                            r.name
                        )))
                    }
                }
            }
        }
        if let Some(q) = covered.iter().position(|c| !c) {
            return Err(Error::InvalidLayout(format!(
                "qubit {q} is not in any register"
            )));
        }
        Ok(())
    }

    pub fn registers(&self) -> &[Register] {
        &self.registers
    }

    pub fn get(&self, name: &str) -> Option<&Register> {
        self.registers.iter().find(|r| r.name == name)
    }
}

/// Per-kind gate tallies. `rotations` counts both controlled and
/// unconditional `R_k`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateCounts {
    pub hadamards: usize,
    pub rotations: usize,
    pub cnots: usize,
    pub toffolis: usize,
    pub total: usize,
    pub qubits: usize,
}

impl GateCounts {
    pub fn tally(qubits: usize, ops: &[GateOp]) -> Self {
        let mut c = GateCounts {
            qubits,
            ..Default::default()
        };
        for op in ops {
            match op {
                GateOp::Hadamard { .. } => c.hadamards += 1,
                GateOp::Rk { .. } | GateOp::ControlledRk { .. } => c.rotations += 1,
                GateOp::Cnot { .. } => c.cnots += 1,
                GateOp::Toffoli { .. } => c.toffolis += 1,
            }
        }
        c.total = ops.len();
        c
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CircuitRecord", into = "CircuitRecord")]
pub struct Circuit {
    num_qubits: usize,
    label: String,
    ops: Vec<GateOp>,
    layout: Option<RegisterLayout>,
}

impl Circuit {
    pub fn new(num_qubits: usize, label: impl Into<String>) -> Self {
        Self {
            num_qubits,
            label: label.into(),
            ops: Vec::new(),
            layout: None,
        }
    }

    pub fn with_layout(mut self, layout: RegisterLayout) -> Result<Self> {
        layout.validate(self.num_qubits)?;
        self.layout = Some(layout);
        Ok(self)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn set_label(&mut self, label: impl Into<String>) {
        self.label = label.into();
    }

    pub fn ops(&self) -> &[GateOp] {
        &self.ops
    }

    pub fn layout(&self) -> Option<&RegisterLayout> {
        self.layout.as_ref()
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn push(&mut self, op: GateOp) -> Result<()> {
        op.validate(self.num_qubits)?;
        self.ops.push(op);
        Ok(())
    }

    pub fn extend<I: IntoIterator<Item = GateOp>>(&mut self, ops: I) -> Result<()> {
        ops.into_iter().try_for_each(|op| self.push(op))
    }

    /// Appends `other`'s gates with its qubit 0 mapped to `offset`.
    pub fn append_shifted(&mut self, other: &Circuit, offset: usize) -> Result<()> {
        self.extend(other.ops.iter().map(|op| op.shifted(offset)))
    }

    /// Replaces the gate list, keeping qubit count, label and layout.
    pub fn with_ops(&self, ops: Vec<GateOp>) -> Result<Self> {
        let mut c = Circuit {
            ops: Vec::with_capacity(ops.len()),
            ..self.clone()
        };
        c.extend(ops)?;
        Ok(c)
    }

    pub fn run_in_place(&self, state: &mut StateVector) -> Result<()> {
        if state.num_qubits() != self.num_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.num_qubits,
                found: state.num_qubits(),
            });
        }
        self.ops.iter().try_for_each(|op| state.apply(op))
    }

    /// Applies the gates in list order to a copy of `state`.
    pub fn run(&self, state: &StateVector) -> Result<StateVector> {
        let mut out = state.clone();
        self.run_in_place(&mut out)?;
        Ok(out)
    }

    /// Reverses the gate list and inverts each gate.
    pub fn inverse(&self) -> Circuit {
        let label = match self.label.strip_suffix(INVERSE_SUFFIX) {
            Some(base) => base.to_string(),
            None => format!("{}{INVERSE_SUFFIX}", self.label),
        };
        Circuit {
            num_qubits: self.num_qubits,
            label,
            ops: self.ops.iter().rev().map(GateOp::inverse).collect(),
            layout: self.layout.clone(),
        }
    }

    pub fn counts(&self) -> GateCounts {
        GateCounts::tally(self.num_qubits, &self.ops)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("circuit serialization is infallible")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::InvalidCircuit(e.to_string()))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CircuitRecord {
    num_qubits: usize,
    label: String,
    ops: Vec<GateOp>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    layout: Option<RegisterLayout>,
}

impl From<Circuit> for CircuitRecord {
    fn from(c: Circuit) -> Self {
        CircuitRecord {
            num_qubits: c.num_qubits,
            label: c.label,
            ops: c.ops,
            layout: c.layout,
        }
    }
}

impl TryFrom<CircuitRecord> for Circuit {
    type Error = Error;

    fn try_from(r: CircuitRecord) -> Result<Self> {
        let mut c = Circuit::new(r.num_qubits, r.label);
        c.extend(r.ops)?;
        match r.layout {
            Some(layout) => c.with_layout(layout),
            None => Ok(c),
        }
    }
}
