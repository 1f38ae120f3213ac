//! Dense state-vector simulation of an n-qubit register.

use std::f64::consts::{FRAC_1_SQRT_2, TAU};

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::gates::GateOp;

pub type Amplitude = Complex64;

/// Hard ceiling on register size (16M amplitudes).
pub const MAX_QUBITS: usize = 24;

/// Environment variable that lowers [`MAX_QUBITS`]; larger values are ignored.
pub const MAX_QUBITS_ENV: &str = "QADD_MAX_QUBITS";

/// Default tolerance for state comparisons.
pub const STATE_TOL: f64 = 1e-10;

/// Effective register limit after applying `QADD_MAX_QUBITS`.
pub fn max_qubits() -> usize {
    std::env::var(MAX_QUBITS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .map_or(MAX_QUBITS, |v| v.min(MAX_QUBITS))
}

pub(crate) fn check_register(n: usize) -> Result<()> {
    let limit = max_qubits();
    if n == 0 || n > limit {
        return Err(Error::RegisterTooLarge {
            requested: n,
            limit,
        });
    }
    Ok(())
}

/// `e(t) = exp(2πit)`.
pub fn phase(t: f64) -> Amplitude {
    let (s, c) = (TAU * t).sin_cos();
    Amplitude::new(c, s)
}

/// `e(numerator / 2^k)`, exact at multiples of a quarter turn.
pub fn dyadic_phase(numerator: u64, k: u32) -> Amplitude {
    if k == 0 {
        return Amplitude::new(1.0, 0.0);
    }
    if k >= 64 {
        return phase(numerator as f64 * 2f64.powi(-(k as i32)));
    }
    let numerator = numerator & ((1u64 << k) - 1);
    if numerator == 0 {
        return Amplitude::new(1.0, 0.0);
    }
    if k <= 2 || numerator.trailing_zeros() >= k - 2 {
        let quarter = if k >= 2 {
            numerator >> (k - 2)
        } else {
            numerator << 1
        };
        return match quarter & 3 {
            0 => Amplitude::new(1.0, 0.0),
            1 => Amplitude::new(0.0, 1.0),
            2 => Amplitude::new(-1.0, 0.0),
            _ => Amplitude::new(0.0, -1.0),
        };
    }
    phase(numerator as f64 / 2f64.powi(k as i32))
}

/// Calls `f` on every basis index whose bits at `positions` equal those of
/// `fixed`. `positions` must be sorted ascending.
#[inline]
fn for_each_index(num_qubits: usize, positions: &[usize], fixed: usize, mut f: impl FnMut(usize)) {
    let free = num_qubits - positions.len();
    for r in 0..(1usize << free) {
        let mut idx = r;
        for &p in positions {
            let low = idx & ((1usize << p) - 1);
            idx = low | ((idx >> p) << (p + 1));
        }
        f(idx | fixed);
    }
}

fn sorted<const N: usize>(mut qs: [usize; N]) -> [usize; N] {
    qs.sort_unstable();
    qs
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amps: Vec<Amplitude>,
}

impl StateVector {
    /// The computational basis state `|value⟩` on `n` qubits.
    pub fn basis_state(n: usize, value: u64) -> Result<Self> {
        check_register(n)?;
        if value >> n != 0 {
            return Err(Error::ValueOutOfRange { value, bits: n });
        }
        let mut amps = vec![Amplitude::new(0.0, 0.0); 1 << n];
        amps[value as usize] = Amplitude::new(1.0, 0.0);
        Ok(Self {
            num_qubits: n,
            amps,
        })
    }

    /// Equal superposition of all `2^n` basis states.
    pub fn uniform(n: usize) -> Result<Self> {
        check_register(n)?;
        let a = 1.0 / ((1u64 << n) as f64).sqrt();
        Ok(Self {
            num_qubits: n,
            amps: vec![Amplitude::new(a, 0.0); 1 << n],
        })
    }

    /// Wraps explicit amplitudes. The length must be a power of two and the
    /// vector must be normalized within [`STATE_TOL`].
    pub fn from_amplitudes(amps: Vec<Amplitude>) -> Result<Self> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::InvalidCircuit(format!(
                "amplitude count {len} is not a power of two"
            )));
        }
        let n = len.trailing_zeros() as usize;
        check_register(n)?;
        let state = Self {
            num_qubits: n,
            amps,
        };
        let norm = state.norm_sqr();
        if !norm.is_finite() || (norm - 1.0).abs() > STATE_TOL {
            return Err(Error::InvalidCircuit(format!(
                "amplitudes are not normalized (norm² = {norm})"
            )));
        }
        Ok(state)
    }

    /// A normalized state with uniformly random amplitude components.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self> {
        check_register(n)?;
        let mut amps: Vec<Amplitude> = (0..1usize << n)
            .map(|_| Amplitude::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        amps.iter_mut().for_each(|a| *a /= norm);
        Ok(Self {
            num_qubits: n,
            amps,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Amplitude] {
        &self.amps
    }

    pub fn amplitude(&self, value: u64) -> Result<Amplitude> {
        self.check_value(value)?;
        Ok(self.amps[value as usize])
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    fn check_value(&self, value: u64) -> Result<()> {
        if value >> self.num_qubits != 0 {
            return Err(Error::ValueOutOfRange {
                value,
                bits: self.num_qubits,
            });
        }
        Ok(())
    }

    /// Applies one gate in place.
    pub fn apply(&mut self, op: &GateOp) -> Result<()> {
        op.validate(self.num_qubits)?;
        let n = self.num_qubits;
        let amps = &mut self.amps;
        match *op {
            GateOp::Hadamard { target } => {
                let t = 1usize << target;
                for_each_index(n, &[target], 0, |i| {
                    let (a, b) = (amps[i], amps[i | t]);
                    amps[i] = (a + b) * FRAC_1_SQRT_2;
                    amps[i | t] = (a - b) * FRAC_1_SQRT_2;
                });
            }
            GateOp::ControlledRk {
                control, target, ..
            } => {
                let factor = op.rotation_phase().expect("rotation gate");
                let fixed = (1usize << control) | (1usize << target);
                for_each_index(n, &sorted([control, target]), fixed, |i| amps[i] *= factor);
            }
            GateOp::Rk { target, .. } => {
                let factor = op.rotation_phase().expect("rotation gate");
                for_each_index(n, &[target], 1usize << target, |i| amps[i] *= factor);
            }
            GateOp::Cnot { control, target } => {
                let t = 1usize << target;
                for_each_index(n, &sorted([control, target]), 1usize << control, |i| {
                    amps.swap(i, i | t)
                });
            }
            GateOp::Toffoli {
                control1,
                control2,
                target,
            } => {
                let t = 1usize << target;
                let fixed = (1usize << control1) | (1usize << control2);
                for_each_index(n, &sorted([control1, control2, target]), fixed, |i| {
                    amps.swap(i, i | t)
                });
            }
        }
        Ok(())
    }

    /// Returns a new state with `op` applied.
    pub fn applied(&self, op: &GateOp) -> Result<Self> {
        let mut out = self.clone();
        out.apply(op)?;
        Ok(out)
    }

    /// `⟨self|other⟩ = Σ conj(self[v])·other[v]`.
    pub fn inner_product(&self, other: &StateVector) -> Result<Amplitude> {
        if self.num_qubits != other.num_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.num_qubits,
                found: other.num_qubits,
            });
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(x, y)| x.conj() * y)
            .sum())
    }

    /// `|⟨self|other⟩|`; 1 means equal up to global phase.
    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner_product(other)?.norm())
    }

    /// Largest entrywise amplitude difference.
    pub fn max_deviation(&self, other: &StateVector) -> Result<f64> {
        if self.num_qubits != other.num_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.num_qubits,
                found: other.num_qubits,
            });
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max))
    }

    pub fn probability(&self, value: u64) -> Result<f64> {
        self.check_value(value)?;
        Ok(self.amps[value as usize].norm_sqr())
    }

    /// Marginal probability that the `width` qubits starting at `offset`
    /// read `value`.
    pub fn register_probability(&self, offset: usize, width: usize, value: u64) -> Result<f64> {
        if offset + width > self.num_qubits || width == 0 {
            return Err(Error::QubitIndexError {
                qubits: (offset..offset + width).collect(),
                num_qubits: self.num_qubits,
            });
        }
        if width < 64 && value >> width != 0 {
            return Err(Error::ValueOutOfRange { value, bits: width });
        }
        let mask = (1usize << width) - 1;
        Ok(self
            .amps
            .iter()
            .enumerate()
            .filter(|(i, _)| (i >> offset) & mask == value as usize)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    /// Deterministic readout: the basis value holding probability at least
    /// `1 - tol`.
    pub fn readout(&self, tol: f64) -> Result<u64> {
        let (best, p) = self
            .amps
            .iter()
            .enumerate()
            .map(|(i, a)| (i, a.norm_sqr()))
            .fold(
                (0, f64::NEG_INFINITY),
                |acc, x| if x.1 > acc.1 { x } else { acc },
            );
        if p >= 1.0 - tol {
            Ok(best as u64)
        } else {
            Err(Error::NotABasisState {
                tol,
                max_probability: p,
            })
        }
    }
}
