//! Packs circuits into time slices of gates with disjoint qubit supports.
//!
//! Order-preserving packing puts each gate in the earliest slice after every
//! earlier gate sharing one of its qubits. When all gates are diagonal they
//! commute, so the list is first regrouped by rotation order `k` (all `R_1`,
//! then all `R_2`, …) and then packed the same way.

use std::collections::HashMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::fourier::Cutoff;
use crate::gates::GateOp;
use crate::statevec::{max_qubits, StateVector, STATE_TOL};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Schedule {
    pub source: String,
    pub slices: Vec<Vec<GateOp>>,
}

impl Schedule {
    pub fn new(source: impl Into<String>, slices: Vec<Vec<GateOp>>) -> Self {
        Self {
            source: source.into(),
            slices,
        }
    }

    pub fn depth(&self) -> usize {
        self.slices.len()
    }

    pub fn gate_count(&self) -> usize {
        self.slices.iter().map(Vec::len).sum()
    }

    /// Largest number of gates in any one slice.
    pub fn width(&self) -> usize {
        self.slices.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn flatten(&self) -> Vec<GateOp> {
        self.slices.iter().flatten().copied().collect()
    }
}

pub fn depth(s: &Schedule) -> usize {
    s.depth()
}

/// Schedules `c` into time slices. With `commuting` set every gate must be
/// diagonal; the gates are regrouped by rotation order before packing.
pub fn schedule(c: &Circuit, commuting: bool) -> Result<Schedule> {
    let ops = c.ops();
    let mut order: Vec<usize> = (0..ops.len()).collect();
    if commuting {
        if let Some(index) = ops.iter().position(|op| !op.is_diagonal()) {
            return Err(Error::NonCommutingGates {
                index,
                kind: ops[index].kind(),
            });
        }
        order.sort_by_key(|&i| (ops[i].rotation_order(), i));
    }

    let mut next_free = vec![0usize; c.num_qubits()];
    let mut slices: Vec<Vec<usize>> = Vec::new();
    for i in order {
        let qubits = ops[i].qubits();
        let slot = qubits.iter().map(|&q| next_free[q]).max().unwrap_or(0);
        if slot == slices.len() {
            slices.push(Vec::new());
        }
        slices[slot].push(i);
        for q in qubits {
            next_free[q] = slot + 1;
        }
    }

    Ok(Schedule {
        source: c.label().to_string(),
        slices: slices
            .into_iter()
            .map(|mut slice| {
                slice.sort_unstable();
                slice.into_iter().map(|i| ops[i]).collect()
            })
            .collect(),
    })
}

/// Outcome of [`verify_schedule`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScheduleCheck {
    pub valid: bool,
    pub diagnostics: Vec<String>,
    /// Largest amplitude difference between the scheduled and the original
    /// execution, when simulation was possible.
    pub max_deviation: Option<f64>,
}

impl ScheduleCheck {
    pub fn is_valid(&self) -> bool {
        self.valid
    }
}

/// Checks that `s` is a sound schedule of `c`: disjoint slices, the same
/// multiset of gates, and the same action on a seeded random state.
pub fn verify_schedule(s: &Schedule, c: &Circuit) -> ScheduleCheck {
    let mut diagnostics = Vec::new();
    let n = c.num_qubits();

    for (t, slice) in s.slices.iter().enumerate() {
        let mut used = HashMap::new();
        for (g, op) in slice.iter().enumerate() {
            for q in op.qubits() {
                if q >= n {
                    diagnostics.push(format!(
                        "slice {t}: gate {g} touches qubit {q} outside {n} qubits"
                    ));
                } else if let Some(prev) = used.insert(q, g) {
                    diagnostics.push(format!("slice {t}: gates {prev} and {g} share qubit {q}"));
                }
            }
        }
    }

    let mut balance: HashMap<GateOp, i64> = HashMap::new();
    for op in c.ops() {
        *balance.entry(*op).or_default() += 1;
    }
    for op in s.slices.iter().flatten() {
        *balance.entry(*op).or_default() -= 1;
    }
    let mut mismatched: Vec<_> = balance.into_iter().filter(|(_, d)| *d != 0).collect();
    mismatched.sort_by_key(|(op, _)| format!("{op:?}"));
    for (op, d) in mismatched {
        diagnostics.push(if d > 0 {
            format!("{d} × {op:?} missing from schedule")
        } else {
            format!("{} × {op:?} not in circuit", -d)
        });
    }

    let mut max_deviation = None;
    if diagnostics.is_empty() && n <= max_qubits() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed ^ c.len() as u64);
        match simulate_pair(s, c, &mut rng) {
            Ok(dev) => {
                if dev >= STATE_TOL {
                    diagnostics.push(format!("scheduled execution deviates by {dev:e}"));
                }
                max_deviation = Some(dev);
            }
            Err(e) => diagnostics.push(format!("simulation failed: {e}")),
        }
    }

    ScheduleCheck {
        valid: diagnostics.is_empty(),
        diagnostics,
        max_deviation,
    }
}

fn simulate_pair(s: &Schedule, c: &Circuit, rng: &mut ChaCha8Rng) -> Result<f64> {
    let start = StateVector::random(c.num_qubits(), rng)?;
    let expected = c.run(&start)?;
    let mut got = start;
    // Gates within a slice are applied back to front; disjointness makes
    // the order irrelevant.
    for slice in &s.slices {
        for op in slice.iter().rev() {
            got.apply(op)?;
        }
    }
    expected.max_deviation(&got)
}

/// Commuting depth of the Fourier adders without building them: one slice per
/// retained rotation order. For the constant adder this is the worst case
/// over `b` (all bits set).
pub fn adder_depth_formula(n: usize, cutoff: Cutoff) -> usize {
    match cutoff {
        Cutoff::None => n,
        Cutoff::MaxK(m) => n.min(m as usize),
    }
}

/// Order-preserving depth of [`crate::fourier::build_qft`]: the Hadamard on
/// each wire waits for the last rotation onto the wire above it, giving
/// `2n - 1` slices whenever any rotation survives the cutoff.
pub fn qft_depth_formula(n: usize, cutoff: Cutoff) -> usize {
    match cutoff {
        Cutoff::MaxK(1) => n.min(1),
        _ => (2 * n).saturating_sub(1),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adder::{build_constant_adder, build_two_register_adder};
    use crate::fourier::build_qft;

    #[test]
    fn adder_depths() {
        let c = build_constant_adder(15, 4, Cutoff::None).unwrap();
        let s = schedule(&c, true).unwrap();
        assert_eq!(depth(&s), 4);
        assert!(verify_schedule(&s, &c).is_valid());

        let c = build_two_register_adder(8, Cutoff::max_k(3));
        let s = schedule(&c, true).unwrap();
        assert!(depth(&s) <= 3);
        assert!(verify_schedule(&s, &c).is_valid());
    }

    #[test]
    fn single_gate_and_empty() {
        let mut c = Circuit::new(2, "one");
        assert_eq!(depth(&schedule(&c, false).unwrap()), 0);
        c.push(GateOp::h(0)).unwrap();
        assert_eq!(depth(&schedule(&c, false).unwrap()), 1);
        assert_eq!(depth(&Schedule::new("empty", vec![])), 0);
    }

    #[test]
    fn sequential_qft() {
        let c = build_qft(3, Cutoff::None);
        let s = schedule(&c, false).unwrap();
        assert_eq!(depth(&s), 5);
        assert!(verify_schedule(&s, &c).is_valid());
        assert!(matches!(
            schedule(&c, true),
            Err(Error::NonCommutingGates {
                index: 0,
                kind: "hadamard"
            })
        ));
    }

    #[test]
    fn detects_bad_schedules() {
        let mut c = Circuit::new(2, "pair");
        c.extend([GateOp::h(0), GateOp::crk(0, 1, 2)]).unwrap();
        let clash = Schedule::new("pair", vec![vec![GateOp::h(0), GateOp::crk(0, 1, 2)]]);
        let check = verify_schedule(&clash, &c);
        assert!(!check.is_valid());
        assert!(check.diagnostics[0].contains("share qubit 0"));

        let missing = Schedule::new("pair", vec![vec![GateOp::h(0)]]);
        assert!(!verify_schedule(&missing, &c).is_valid());

        // Disjoint and conserving, but the Hadamard was moved past the rotation.
        let reordered = Schedule::new("pair", vec![vec![GateOp::crk(0, 1, 2)], vec![GateOp::h(0)]]);
        let check = verify_schedule(&reordered, &c);
        assert!(!check.is_valid());
        assert!(check.max_deviation.unwrap() > 1e-3);
    }

    #[test]
    fn slices_are_ordered_by_gate_index() {
        let mut c = Circuit::new(4, "ties");
        c.extend([
            GateOp::rk(3, 2),
            GateOp::rk(0, 1),
            GateOp::rk(1, 2),
            GateOp::rk(2, 1),
        ])
        .unwrap();
        let s = schedule(&c, true).unwrap();
        assert_eq!(s.slices, vec![c.ops().to_vec()]);
    }

    #[test]
    fn depth_formula_matches_scheduler() {
        for n in 1..=12 {
            for cutoff in [
                Cutoff::None,
                Cutoff::max_k(1),
                Cutoff::max_k(3),
                Cutoff::auto(n),
            ] {
                let all_ones = (1u64 << n) - 1;
                let c = build_constant_adder(all_ones, n, cutoff).unwrap();
                assert_eq!(
                    schedule(&c, true).unwrap().depth(),
                    adder_depth_formula(n, cutoff)
                );
                let c = build_two_register_adder(n, cutoff);
                assert_eq!(
                    schedule(&c, true).unwrap().depth(),
                    adder_depth_formula(n, cutoff)
                );
            }
        }
    }

    #[test]
    fn qft_depth_formula_matches_scheduler() {
        for n in 1..=40 {
            for cutoff in [
                Cutoff::None,
                Cutoff::max_k(1),
                Cutoff::max_k(2),
                Cutoff::auto(n),
            ] {
                let d = schedule(&build_qft(n, cutoff), false).unwrap().depth();
                assert_eq!(d, qft_depth_formula(n, cutoff), "n={n} {cutoff}");
            }
        }
    }

    #[test]
    fn json_shape() {
        let s = Schedule::new("x", vec![vec![GateOp::rk(0, 1)]]);
        let v = serde_json::to_value(&s).unwrap();
        assert_eq!(
            v,
            serde_json::json!({"source": "x", "slices": [[{"kind": "rk", "qubits": [0], "k": 1, "inverted": false}]]})
        );
    }
}
