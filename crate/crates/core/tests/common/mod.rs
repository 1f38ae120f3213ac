#![allow(dead_code)]

use qadd::{Circuit, GateOp};
use rand::seq::index::sample;
use rand::Rng;

/// A random gate on `n` qubits. Kinds needing more qubits than available are
/// skipped.
pub fn random_gate<R: Rng>(rng: &mut R, n: usize, diagonal_only: bool) -> GateOp {
    loop {
        let kind = if diagonal_only {
            rng.random_range(0..2)
        } else {
            rng.random_range(0..5)
        };
        let arity = [1, 2, 1, 2, 3][kind];
        if arity > n {
            continue;
        }
        let q = sample(rng, n, arity).into_vec();
        let k = rng.random_range(1..=6);
        let inverted = rng.random_bool(0.3);
        return match kind {
            0 => GateOp::Rk {
                target: q[0],
                k,
                inverted,
            },
            1 => GateOp::ControlledRk {
                control: q[0],
                target: q[1],
                k,
                inverted,
            },
            2 => GateOp::h(q[0]),
            3 => GateOp::cnot(q[0], q[1]),
            _ => GateOp::toffoli(q[0], q[1], q[2]),
        };
    }
}

pub fn random_circuit<R: Rng>(rng: &mut R, n: usize, len: usize, diagonal_only: bool) -> Circuit {
    let mut c = Circuit::new(n, "random");
    for _ in 0..len {
        c.push(random_gate(rng, n, diagonal_only)).unwrap();
    }
    c
}
