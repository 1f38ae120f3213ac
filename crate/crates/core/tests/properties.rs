mod common;

use common::random_circuit;
use proptest::prelude::*;
use qadd::adder::{build_constant_adder, build_two_register_adder, fourier_add_state};
use qadd::gates::gate_matrix;
use qadd::scheduler::{schedule, verify_schedule};
use qadd::statevec::STATE_TOL;
use qadd::{Amplitude, Circuit, Cutoff, GateOp, StateVector};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Full-register matrix element ⟨out|U|in⟩ built from the local gate matrix:
/// zero unless all untouched qubits agree.
fn embedded_element(op: &GateOp, out: usize, inp: usize) -> Amplitude {
    let qubits = op.qubits();
    let support: usize = qubits.iter().map(|q| 1 << q).sum();
    if out & !support != inp & !support {
        return Amplitude::new(0.0, 0.0);
    }
    let local = |v: usize| {
        qubits
            .iter()
            .enumerate()
            .map(|(i, &q)| ((v >> q) & 1) << (qubits.len() - 1 - i))
            .sum::<usize>()
    };
    gate_matrix(op).get(local(out), local(inp))
}

#[test]
fn apply_matches_explicit_matrices() {
    let mut ops = Vec::new();
    for n in 1..=3usize {
        for a in 0..n {
            ops.push((n, GateOp::h(a)));
            for k in 1..=4 {
                ops.push((n, GateOp::rk(a, k)));
                ops.push((n, GateOp::rk(a, k).inverse()));
            }
            for b in (0..n).filter(|&b| b != a) {
                ops.push((n, GateOp::cnot(a, b)));
                for k in 1..=4 {
                    ops.push((n, GateOp::crk(a, b, k)));
                    ops.push((n, GateOp::crk(a, b, k).inverse()));
                }
                for c in (0..n).filter(|&c| c != a && c != b) {
                    ops.push((n, GateOp::toffoli(a, b, c)));
                }
            }
        }
    }
    for (n, op) in ops {
        for inp in 0..1usize << n {
            let out = StateVector::basis_state(n, inp as u64)
                .unwrap()
                .applied(&op)
                .unwrap();
            for (v, amp) in out.amplitudes().iter().enumerate() {
                let d = amp - embedded_element(&op, v, inp);
                assert!(d.norm() < 1e-12, "{op:?} n={n} in={inp} out={v}");
            }
        }
    }
}

#[test]
fn inverse_is_identity_on_basis_states() {
    let mut r = rng(11);
    for n in 1..=6 {
        let c = random_circuit(&mut r, n, 40, false);
        let round_trip = {
            let mut both = c.clone();
            both.append_shifted(&c.inverse(), 0).unwrap();
            both
        };
        for v in 0..1u64 << n {
            let s = StateVector::basis_state(n, v).unwrap();
            let back = round_trip.run(&s).unwrap();
            assert!(back.max_deviation(&s).unwrap() < STATE_TOL);
        }
    }
}

#[test]
fn adder_gates_commute() {
    let mut r = rng(6);
    let n = 6;
    for _ in 0..10 {
        let b = rand::Rng::random_range(&mut r, 0..1u64 << n);
        let c = build_constant_adder(b, n, Cutoff::None).unwrap();
        let s = StateVector::random(n, &mut r).unwrap();
        let reference = c.run(&s).unwrap();
        for _ in 0..20 {
            let mut ops = c.ops().to_vec();
            ops.shuffle(&mut r);
            let out = c.with_ops(ops).unwrap().run(&s).unwrap();
            assert!(out.max_deviation(&reference).unwrap() < STATE_TOL);
        }
    }
}

#[test]
fn adder_depth_bounds() {
    for n in 2..=10usize {
        let m = (n as f64).log2().round() as usize;
        let all_ones = (1u64 << n) - 1;
        for cutoff in [Cutoff::None, Cutoff::max_k(m as u32)] {
            let bound = if cutoff.is_exact() { n + 1 } else { m };
            for c in [
                build_constant_adder(all_ones, n, cutoff).unwrap(),
                build_two_register_adder(n, cutoff),
            ] {
                let s = schedule(&c, true).unwrap();
                assert!(s.depth() <= bound, "{} depth {}", c.label(), s.depth());
                assert!(verify_schedule(&s, &c).is_valid());
                for slice in &s.slices {
                    let two_qubit = slice.iter().filter(|op| op.arity() == 2).count();
                    assert!(two_qubit <= c.num_qubits() / 2);
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn norm_is_preserved(seed in any::<u64>(), n in 1usize..=8, len in 0usize..=50) {
        let mut r = rng(seed);
        let c = random_circuit(&mut r, n, len, false);
        let out = c.run(&StateVector::random(n, &mut r).unwrap()).unwrap();
        prop_assert!((out.norm_sqr() - 1.0).abs() < STATE_TOL);
        prop_assert!(out.amplitudes().iter().all(|a| a.re.is_finite() && a.im.is_finite()));
    }

    #[test]
    fn circuit_then_inverse_restores_state(seed in any::<u64>(), n in 1usize..=8) {
        let mut r = rng(seed);
        let c = random_circuit(&mut r, n, 50, false);
        let s = StateVector::random(n, &mut r).unwrap();
        let back = c.inverse().run(&c.run(&s).unwrap()).unwrap();
        prop_assert!(back.max_deviation(&s).unwrap() < STATE_TOL);
        prop_assert_eq!(c.inverse().inverse(), c);
    }

    #[test]
    fn run_is_linear(seed in any::<u64>(), n in 1usize..=6, alpha in 0.0f64..std::f64::consts::TAU) {
        let mut r = rng(seed);
        let c = random_circuit(&mut r, n, 30, false);
        let (s1, s2) = (StateVector::random(n, &mut r).unwrap(), StateVector::random(n, &mut r).unwrap());
        let (x, y) = (Amplitude::from_polar(0.6, alpha), Amplitude::new(0.0, 0.8));
        let mix = |u: &StateVector, v: &StateVector| -> Vec<Amplitude> {
            u.amplitudes().iter().zip(v.amplitudes()).map(|(p, q)| x * p + y * q).collect()
        };
        let combo = mix(&s1, &s2);
        let norm = combo.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        let combo = StateVector::from_amplitudes(combo.into_iter().map(|a| a / norm).collect()).unwrap();
        let lhs = c.run(&combo).unwrap();
        let rhs = mix(&c.run(&s1).unwrap(), &c.run(&s2).unwrap());
        for (l, r) in lhs.amplitudes().iter().zip(rhs) {
            prop_assert!((l - r / norm).norm() < STATE_TOL);
        }
    }

    #[test]
    fn schedules_are_sound(seed in any::<u64>(), n in 1usize..=8, len in 0usize..=40) {
        let mut r = rng(seed);
        let c = random_circuit(&mut r, n, len, false);
        let s = schedule(&c, false).unwrap();
        let check = verify_schedule(&s, &c);
        prop_assert!(check.is_valid(), "{:?}", check.diagnostics);
        prop_assert_eq!(s.gate_count(), c.len());

        let d = random_circuit(&mut r, n, len, true);
        let s = schedule(&d, true).unwrap();
        let check = verify_schedule(&s, &d);
        prop_assert!(check.is_valid(), "{:?}", check.diagnostics);
        let mut flat = s.flatten();
        let mut orig = d.ops().to_vec();
        flat.sort_by_key(|op| format!("{op:?}"));
        orig.sort_by_key(|op| format!("{op:?}"));
        prop_assert_eq!(flat, orig);
    }

    #[test]
    fn circuit_json_round_trips(seed in any::<u64>(), n in 1usize..=8, len in 0usize..=30) {
        let mut r = rng(seed);
        let c = random_circuit(&mut r, n, len, false);
        prop_assert_eq!(Circuit::from_json(&c.to_json()).unwrap(), c);
    }

    #[test]
    fn constant_additions_compose(seed in any::<u64>(), n in 1usize..=6) {
        let mut r = rng(seed);
        let s = StateVector::random(n, &mut r).unwrap();
        let b1 = rand::Rng::random_range(&mut r, 0..1u64 << n);
        let b2 = rand::Rng::random_range(&mut r, 0..1u64 << n);
        let twice = fourier_add_state(&fourier_add_state(&s, b1, Cutoff::None).unwrap(), b2, Cutoff::None).unwrap();
        let once = fourier_add_state(&s, (b1 + b2) % (1 << n), Cutoff::None).unwrap();
        prop_assert!(twice.max_deviation(&once).unwrap() < STATE_TOL);

        // |v⟩ picks up the amplitude of |v - b⟩
        for v in 0..1u64 << n {
            let src = (v + (1 << n) - b1) % (1 << n);
            let a = fourier_add_state(&s, b1, Cutoff::None).unwrap().amplitude(v).unwrap();
            prop_assert!((a - s.amplitude(src).unwrap()).norm() < STATE_TOL);
        }
    }
}
