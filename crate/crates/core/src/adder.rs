//! Fourier-basis addition.
//!
//! Once a register holds `F(a)`, wire `j` carries the phase `a/2^j`. Adding
//! `b` only needs that phase advanced by `(b mod 2^j)/2^j`, which is a sum of
//! `R_k` rotations, one per set bit `b_i` with `i ≤ j` and `k = j - i + 1`.
//! Every rotation is diagonal, so the whole adder commutes gate by gate.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Register, RegisterLayout};
use crate::error::{Error, Result};
use crate::fourier::{build_inverse_qft, build_qft, Cutoff};
use crate::gates::GateOp;
use crate::statevec::{check_register, StateVector};

/// Readout threshold for the end-to-end pipelines.
pub const READOUT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AddMode {
    /// `b` lives in its own quantum register and controls the rotations.
    TwoRegister,
    /// `b` is classical and only selects which rotations to emit.
    Constant,
}

impl AddMode {
    pub fn qubits(&self, n: usize) -> usize {
        match self {
            AddMode::TwoRegister => 2 * n,
            AddMode::Constant => n,
        }
    }
}

fn check_value(value: u64, n: usize) -> Result<()> {
    if n == 0 || (n < 64 && value >> n != 0) {
        return Err(Error::ValueOutOfRange { value, bits: n });
    }
    Ok(())
}

fn phi_layout(n: usize) -> RegisterLayout {
    RegisterLayout::new(vec![Register::new("phi", 0, n)], n).expect("single register layout")
}

fn two_register_layout(n: usize) -> RegisterLayout {
    RegisterLayout::new(
        vec![Register::new("b", 0, n), Register::new("phi", n, n)],
        2 * n,
    )
    .expect("two register layout")
}

/// Adds the classical constant `b` to a Fourier-transformed `n`-qubit register.
///
/// Gates are emitted wire by wire from the top, in increasing `k`.
pub fn build_constant_adder(b: u64, n: usize, cutoff: Cutoff) -> Result<Circuit> {
    check_value(b, n)?;
    let mut c = Circuit::new(n, format!("constant_adder_{n}_b{b}")).with_layout(phi_layout(n))?;
    for j in (1..=n).rev() {
        for k in 1..=j {
            let i = j - k + 1;
            if (b >> (i - 1)) & 1 == 1 && cutoff.allows(k as u32) {
                c.push(GateOp::rk(j - 1, k as u32))?;
            }
        }
    }
    Ok(c)
}

/// Like [`build_constant_adder`], but each wire's total phase `(b mod 2^j)/2^j`
/// is rewritten in non-adjacent form, so runs of set bits collapse into one
/// forward and one inverted rotation.
pub fn build_constant_adder_fused(b: u64, n: usize, cutoff: Cutoff) -> Result<Circuit> {
    check_value(b, n)?;
    let mut c =
        Circuit::new(n, format!("constant_adder_fused_{n}_b{b}")).with_layout(phi_layout(n))?;
    for j in (1..=n).rev() {
        let residue = if j >= 64 { b } else { b & ((1u64 << j) - 1) };
        // (k, inverted) in decreasing bit position, i.e. increasing k.
        let mut digits = non_adjacent_form(residue)
            .into_iter()
            .filter(|&(p, _)| p < j)
            .map(|(p, neg)| ((j - p) as u32, neg))
            .collect::<Vec<_>>();
        digits.sort_unstable();
        for (k, inverted) in digits {
            if cutoff.allows(k) {
                c.push(GateOp::Rk {
                    target: j - 1,
                    k,
                    inverted,
                })?;
            }
        }
    }
    Ok(c)
}

/// Nonzero signed digits `(position, negative)` with `x = Σ ±2^position`.
fn non_adjacent_form(x: u64) -> Vec<(usize, bool)> {
    let mut out = Vec::new();
    // The carry can push one digit past bit 63.
    let mut x = u128::from(x);
    let mut pos = 0;
    while x != 0 {
        if x & 1 == 1 {
            let neg = x & 3 == 3;
            out.push((pos, neg));
            if neg {
                x += 1;
            } else {
                x -= 1;
            }
        }
        x >>= 1;
        pos += 1;
    }
    out
}

/// Adds a quantum register `b` (qubits `0..n`) into a Fourier-transformed
/// register (qubits `n..2n`): wire `φ_j` receives `R_k` controlled by
/// `b_{j-k+1}` for `k = 1..j`.
pub fn build_two_register_adder(n: usize, cutoff: Cutoff) -> Circuit {
    let mut c = Circuit::new(2 * n, format!("two_register_adder_{n}"))
        .with_layout(two_register_layout(n))
        .expect("layout covers 2n qubits");
    for j in (1..=n).rev() {
        for k in 1..=j {
            if cutoff.allows(k as u32) {
                let control = j - k;
                c.push(GateOp::crk(control, n + j - 1, k as u32))
                    .expect("adder gates are in range");
            }
        }
    }
    c
}

/// The full add circuit: QFT, adder, inverse QFT, all at the same cutoff.
/// For [`AddMode::Constant`] the value `b` is baked in; for
/// [`AddMode::TwoRegister`] it is ignored and read from qubits `0..n`.
pub fn build_add_pipeline(n: usize, mode: AddMode, b: u64, cutoff: Cutoff) -> Result<Circuit> {
    check_value(b, n)?;
    let qft = build_qft(n, cutoff);
    let iqft = build_inverse_qft(n, cutoff);
    match mode {
        AddMode::Constant => {
            let mut c = Circuit::new(n, format!("fourier_add_constant_{n}_b{b}"))
                .with_layout(phi_layout(n))?;
            c.append_shifted(&qft, 0)?;
            c.append_shifted(&build_constant_adder(b, n, cutoff)?, 0)?;
            c.append_shifted(&iqft, 0)?;
            Ok(c)
        }
        AddMode::TwoRegister => {
            let mut c = Circuit::new(2 * n, format!("fourier_add_tworegister_{n}"))
                .with_layout(two_register_layout(n))?;
            c.append_shifted(&qft, n)?;
            c.append_shifted(&build_two_register_adder(n, cutoff), 0)?;
            c.append_shifted(&iqft, n)?;
            Ok(c)
        }
    }
}

/// Result of one simulated Fourier addition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AddOutcome {
    /// Readout of the sum register, `None` if it is not a basis state within
    /// [`READOUT_TOL`].
    pub sum: Option<u64>,
    /// Probability of reading the correct sum `(a+b) mod 2^n`.
    pub success_probability: f64,
    /// Readout of the `b` register in two-register mode.
    pub b_register: Option<u64>,
    pub qubits: usize,
}

/// Runs the add pipeline on `|a⟩` (and `|b⟩`) and returns the final state.
pub fn fourier_add_final_state(
    a: u64,
    b: u64,
    n: usize,
    mode: AddMode,
    cutoff: Cutoff,
) -> Result<StateVector> {
    check_value(a, n)?;
    check_value(b, n)?;
    check_register(mode.qubits(n))?;
    let circuit = build_add_pipeline(n, mode, b, cutoff)?;
    let input = match mode {
        AddMode::Constant => a,
        AddMode::TwoRegister => b | (a << n),
    };
    circuit.run(&StateVector::basis_state(circuit.num_qubits(), input)?)
}

pub fn fourier_add_outcome(
    a: u64,
    b: u64,
    n: usize,
    mode: AddMode,
    cutoff: Cutoff,
) -> Result<AddOutcome> {
    let state = fourier_add_final_state(a, b, n, mode, cutoff)?;
    let expected = a.wrapping_add(b) & ((1u64 << n) - 1);
    let (offset, b_reg) = match mode {
        AddMode::Constant => (0, None),
        AddMode::TwoRegister => (n, Some(Register::new("b", 0, n))),
    };
    let readout = state.readout(READOUT_TOL).ok();
    Ok(AddOutcome {
        sum: readout.map(|v| (v >> offset) & ((1u64 << n) - 1)),
        success_probability: state.register_probability(offset, n, expected)?,
        b_register: b_reg.and_then(|r| readout.map(|v| r.extract(v))),
        qubits: state.num_qubits(),
    })
}

/// Fourier-basis `(a + b) mod 2^n`.
///
/// With a cutoff the output may be a superposition, reported as
/// [`Error::NotABasisState`].
pub fn fourier_add(a: u64, b: u64, n: usize, mode: AddMode, cutoff: Cutoff) -> Result<u64> {
    let state = fourier_add_final_state(a, b, n, mode, cutoff)?;
    let v = state.readout(READOUT_TOL)?;
    Ok(match mode {
        AddMode::Constant => v,
        AddMode::TwoRegister => v >> n,
    })
}

/// Mean probability of reading the correct sum over the given `(a, b)` pairs.
/// Pairs are evaluated in parallel; the reduction runs in input order so the
/// result does not depend on the thread count.
pub fn mean_success_probability(
    n: usize,
    mode: AddMode,
    cutoff: Cutoff,
    pairs: &[(u64, u64)],
) -> Result<f64> {
    let probabilities = pairs
        .par_iter()
        .map(|&(a, b)| fourier_add_outcome(a, b, n, mode, cutoff).map(|o| o.success_probability))
        .collect::<Result<Vec<f64>>>()?;
    Ok(probabilities.iter().sum::<f64>() / pairs.len().max(1) as f64)
}

/// [`mean_success_probability`] over every `(a, b)` pair of width `n`.
pub fn success_probability_sweep(n: usize, mode: AddMode, cutoff: Cutoff) -> Result<f64> {
    check_register(mode.qubits(n))?;
    let pairs: Vec<(u64, u64)> = (0..1u64 << n)
        .flat_map(|a| (0..1u64 << n).map(move |b| (a, b)))
        .collect();
    mean_success_probability(n, mode, cutoff, &pairs)
}

/// Adds the classical `b` to an arbitrary state: QFT, constant adder, inverse
/// QFT. With no cutoff, `|v⟩` maps to `|(v + b) mod 2^n⟩` branch by branch.
pub fn fourier_add_state(state: &StateVector, b: u64, cutoff: Cutoff) -> Result<StateVector> {
    let n = state.num_qubits();
    build_add_pipeline(n, AddMode::Constant, b, cutoff)?.run(state)
}
