//! Exact and approximate quantum Fourier transform circuits.
//!
//! Wire `j` (qubit `j-1`) starts out holding bit `a_j` of the input and ends
//! holding `φ_j(a) = (|0⟩ + e(a/2^j)|1⟩)/√2`. No bit-reversal swaps are
//! emitted, so the Fourier-basis adders consume this layout directly.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::circuit::{Circuit, GateCounts};
use crate::error::{Error, Result};
use crate::gates::GateOp;
use crate::statevec::{check_register, dyadic_phase, Amplitude, StateVector};

/// Largest rotation order `k` kept in a circuit. `None` keeps every rotation.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub enum Cutoff {
    #[default]
    None,
    MaxK(u32),
}

impl Cutoff {
    pub fn max_k(k: u32) -> Self {
        Cutoff::MaxK(k.max(1))
    }

    /// `max(1, round(log2 n))`.
    pub fn auto(n: usize) -> Self {
        let m = (n.max(1) as f64).log2().round() as u32;
        Cutoff::MaxK(m.max(1))
    }

    pub fn allows(&self, k: u32) -> bool {
        match *self {
            Cutoff::None => true,
            Cutoff::MaxK(m) => k <= m,
        }
    }

    pub fn value(&self) -> Option<u32> {
        match *self {
            Cutoff::None => None,
            Cutoff::MaxK(m) => Some(m),
        }
    }

    pub fn is_exact(&self) -> bool {
        *self == Cutoff::None
    }
}

impl fmt::Display for Cutoff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cutoff::None => f.write_str("none"),
            Cutoff::MaxK(m) => write!(f, "{m}"),
        }
    }
}

impl Serialize for Cutoff {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.value().serialize(s)
    }
}

fn qft_label(prefix: &str, n: usize, cutoff: Cutoff) -> String {
    match cutoff {
        Cutoff::None => format!("{prefix}_{n}"),
        Cutoff::MaxK(m) => format!("{prefix}_{n}_k{m}"),
    }
}

/// The QFT on `n` qubits, dropping rotations with `k` above the cutoff.
///
/// Wires are processed from the most significant down: a Hadamard on wire
/// `j`, then `R_2 … R_j` controlled by wires `j-1 … 1`.
pub fn build_qft(n: usize, cutoff: Cutoff) -> Circuit {
    let prefix = if cutoff.is_exact() { "qft" } else { "aqft" };
    let mut c = Circuit::new(n, qft_label(prefix, n, cutoff));
    for j in (1..=n).rev() {
        let target = j - 1;
        c.push(GateOp::h(target)).expect("qft gates are in range");
        for m in (1..j).rev() {
            let k = (j - m + 1) as u32;
            if cutoff.allows(k) {
                c.push(GateOp::crk(m - 1, target, k))
                    .expect("qft gates are in range");
            }
        }
    }
    c
}

pub fn build_inverse_qft(n: usize, cutoff: Cutoff) -> Circuit {
    build_qft(n, cutoff).inverse()
}

/// Closed-form tallies of [`build_qft`].
///
/// `hadamards + rotations` for the full transform is `n(n+1)/2`; with cutoff
/// `m`, `rotations` alone is `(2n - m)(m - 1)/2` once `m ≤ n`.
pub fn qft_counts(n: usize, cutoff: Cutoff) -> GateCounts {
    let full = n * n.saturating_sub(1) / 2;
    let rotations = match cutoff {
        Cutoff::None => full,
        Cutoff::MaxK(m) => {
            let t = (m as usize).saturating_sub(1);
            if t >= n.saturating_sub(1) {
                full
            } else {
                t * (t + 1) / 2 + (n - 1 - t) * t
            }
        }
    };
    GateCounts {
        hadamards: n,
        rotations,
        cnots: 0,
        toffolis: 0,
        total: n + rotations,
        qubits: n,
    }
}

/// `⊗_j φ_j(a)` built directly, with wire `j` holding `φ_j(a)`.
pub fn phi_product_state(a: u64, n: usize) -> Result<StateVector> {
    check_register(n)?;
    if a >> n != 0 {
        return Err(Error::ValueOutOfRange { value: a, bits: n });
    }
    let norm = 1.0 / ((1u64 << n) as f64).sqrt();
    let amps = (0..1u64 << n)
        .map(|v| {
            // Σ_j v_j · a / 2^j, as a numerator over 2^n.
            let numerator = (1..=n)
                .filter(|j| (v >> (j - 1)) & 1 == 1)
                .fold(0u64, |acc, j| acc.wrapping_add(a << (n - j)));
            dyadic_phase(numerator, n as u32) * norm
        })
        .collect::<Vec<Amplitude>>();
    StateVector::from_amplitudes(amps)
}
