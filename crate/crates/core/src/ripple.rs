//! Reversible ripple-carry adder built from carry and sum units.
//!
//! Layout on `3n + 1` qubits, each register little-endian:
//!
//! | register | qubits        | role                                 |
//! |----------|---------------|--------------------------------------|
//! | `carry`  | `0..n`        | carry ancillas, start and end at 0   |
//! | `a`      | `n..2n`       | first addend, left unchanged         |
//! | `b`      | `2n..3n`      | second addend, overwritten by `a+b`  |
//! | `high`   | `3n`          | bit `n` of the sum                   |
//!
//! The sum therefore occupies the contiguous bits `2n..=3n` of the output.

use crate::circuit::{Circuit, GateCounts, Register, RegisterLayout};
use crate::error::{Error, Result};
use crate::gates::{carry_ops, sum_ops, GateOp};
use crate::statevec::{max_qubits, StateVector, STATE_TOL};

pub fn ripple_qubits(n: usize) -> usize {
    3 * n + 1
}

pub fn ripple_layout(n: usize) -> Result<RegisterLayout> {
    RegisterLayout::new(
        vec![
            Register::new("carry", 0, n),
            Register::new("a", n, n),
            Register::new("b", 2 * n, n),
            Register::new("high", 3 * n, 1),
        ],
        ripple_qubits(n),
    )
}

fn check_width(n: usize) -> Result<()> {
    let limit = max_qubits();
    if n == 0 || ripple_qubits(n) > limit {
        return Err(Error::RegisterTooLarge {
            requested: ripple_qubits(n),
            limit,
        });
    }
    Ok(())
}

/// Builds the `n`-bit adder: a forward carry chain, a CNOT and sum on the top
/// bit, then reversed carries interleaved with sums walking back down.
pub fn build_ripple_adder(n: usize) -> Result<Circuit> {
    check_width(n)?;
    let carry = |i: usize| i;
    let a = |i: usize| n + i;
    let b = |i: usize| 2 * n + i;
    let carry_out = |i: usize| if i + 1 < n { carry(i + 1) } else { 3 * n };

    let mut c = Circuit::new(ripple_qubits(n), format!("ripple_adder_{n}"))
        .with_layout(ripple_layout(n)?)?;
    for i in 0..n {
        c.extend(carry_ops(carry(i), a(i), b(i), carry_out(i), false)?)?;
    }
    let top = n - 1;
    c.push(GateOp::cnot(a(top), b(top)))?;
    c.extend(sum_ops(carry(top), a(top), b(top))?)?;
    for i in (0..top).rev() {
        c.extend(carry_ops(carry(i), a(i), b(i), carry(i + 1), true)?)?;
        c.extend(sum_ops(carry(i), a(i), b(i))?)?;
    }
    Ok(c)
}

/// Gate tallies of [`build_ripple_adder`] without building it.
pub fn ripple_counts(n: usize) -> GateCounts {
    let (toffolis, cnots) = if n == 0 { (0, 0) } else { (4 * n - 2, 4 * n) };
    GateCounts {
        hadamards: 0,
        rotations: 0,
        cnots,
        toffolis,
        total: toffolis + cnots,
        qubits: ripple_qubits(n),
    }
}

/// Adds `a + b` on the simulator and returns the full `(n+1)`-bit sum.
///
/// Fails with [`Error::AncillaNotRestored`] if the carries do not come back
/// to zero or the `a` register was disturbed.
pub fn ripple_add(a: u64, b: u64, n: usize) -> Result<u64> {
    check_width(n)?;
    let circuit = build_ripple_adder(n)?;
    let layout = circuit.layout().expect("ripple adder carries a layout");
    let reg = |name| layout.get(name).expect("ripple register");
    let input = reg("a").encode(a)? | reg("b").encode(b)?;

    let out = circuit.run(&StateVector::basis_state(circuit.num_qubits(), input)?)?;
    let clean = out.register_probability(0, n, 0)?;
    if clean < 1.0 - STATE_TOL {
        return Err(Error::AncillaNotRestored { probability: clean });
    }
    let v = out.readout(STATE_TOL)?;
    if reg("a").extract(v) != a {
        return Err(Error::AncillaNotRestored { probability: clean });
    }
    Ok(reg("b").extract(v) | (reg("high").extract(v) << n))
}
