use std::process::Command;

use serde_json::Value;

fn qadd(args: &[&str]) -> (i32, Value) {
    qadd_env(args, None)
}

fn qadd_env(args: &[&str], max_qubits: Option<&str>) -> (i32, Value) {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_qadd"));
    cmd.args(args);
    if let Some(m) = max_qubits {
        cmd.env("QADD_MAX_QUBITS", m);
    }
    let out = cmd.output().unwrap();
    let stdout = String::from_utf8(out.stdout).unwrap();
    (
        out.status.code().unwrap(),
        serde_json::from_str(&stdout).unwrap_or(Value::String(stdout)),
    )
}

#[test]
fn add_commands() {
    let (code, v) = qadd(&[
        "add", "--n", "4", "--a", "9", "--b", "7", "--mode", "constant",
    ]);
    assert_eq!(code, 0);
    assert_eq!(
        (v["sum"].as_u64(), v["qubits"].as_u64()),
        (Some(0), Some(4))
    );

    let (_, v) = qadd(&[
        "add",
        "--n",
        "3",
        "--a",
        "3",
        "--b",
        "5",
        "--mode",
        "ripple",
        "--emit-circuit",
    ]);
    assert_eq!(
        (v["sum"].as_u64(), v["qubits"].as_u64()),
        (Some(8), Some(10))
    );
    assert_eq!(v["circuit"]["num_qubits"], 10);

    let (_, v) = qadd(&[
        "add",
        "--n",
        "4",
        "--a",
        "1",
        "--b",
        "0",
        "--mode",
        "tworegister",
    ]);
    assert_eq!(
        (v["sum"].as_u64(), v["qubits"].as_u64()),
        (Some(1), Some(8))
    );
}

#[test]
fn verify_commands() {
    let (code, v) = qadd(&["verify", "--n", "3", "--mode", "constant"]);
    assert_eq!(code, 0);
    assert_eq!(
        (v["cases"].as_u64(), v["failures"].as_u64()),
        (Some(64), Some(0))
    );

    let (code, v) = qadd(&["verify", "--n", "1..5", "--mode", "tworegister"]);
    assert_eq!(code, 0);
    assert_eq!(v["failures"], 0);
    assert_eq!(v["cases"], 4 + 16 + 64 + 256 + 1024);

    let args = [
        "verify",
        "--n",
        "8",
        "--cutoff",
        "3",
        "--samples",
        "200",
        "--seed",
        "1",
    ];
    let (code, v) = qadd(&args);
    assert_eq!(code, 1);
    let p = v["mean_success_probability"].as_f64().unwrap();
    assert!(p > 0.0 && p < 1.0);
    assert_eq!(v["cases"], 200);
    // Fixed seed reproduces the report byte for byte.
    let a = Command::new(env!("CARGO_BIN_EXE_qadd"))
        .args(args)
        .output()
        .unwrap();
    let b = Command::new(env!("CARGO_BIN_EXE_qadd"))
        .args(args)
        .output()
        .unwrap();
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn stats_commands() {
    let (_, v) = qadd(&["stats", "--n", "8"]);
    assert_eq!(v["qft_total"], 36);
    let (_, v) = qadd(&["stats", "--n", "8", "--cutoff", "3"]);
    assert_eq!(v["aqft_rotations"], 13);
    assert_eq!(v["adder_depth"], 3);
}

#[test]
fn schedule_and_dump_emit_json() {
    let (code, v) = qadd(&[
        "schedule",
        "--builder",
        "two-register-adder",
        "--n",
        "8",
        "--cutoff",
        "3",
        "--commuting",
    ]);
    assert_eq!(code, 0);
    let s: qadd::Schedule = serde_json::from_value(v).unwrap();
    assert_eq!(s.depth(), 3);

    let (code, v) = qadd(&[
        "dump",
        "--builder",
        "add-pipeline",
        "--n",
        "3",
        "--mode",
        "tworegister",
    ]);
    assert_eq!(code, 0);
    let c: qadd::Circuit = serde_json::from_value(v).unwrap();
    assert_eq!(c.num_qubits(), 6);
}

#[test]
fn exit_codes_and_error_objects() {
    let (code, v) = qadd(&["add", "--n", "2", "--a", "9", "--b", "0"]);
    assert_eq!(code, 2);
    assert_eq!(v["error"], "ValueOutOfRange");
    let (code, v) = qadd(&["frobnicate"]);
    assert_eq!(code, 2);
    assert!(v["error"].is_string());
}

#[test]
fn max_qubits_env_only_lowers_the_limit() {
    let (code, v) = qadd_env(
        &[
            "add", "--n", "3", "--a", "1", "--b", "1", "--mode", "ripple",
        ],
        Some("8"),
    );
    assert_eq!(code, 2);
    assert_eq!(v["error"], "RegisterTooLarge");
    let (code, _) = qadd_env(
        &[
            "add", "--n", "3", "--a", "1", "--b", "1", "--mode", "ripple",
        ],
        Some("10"),
    );
    assert_eq!(code, 0);
    let (code, v) = qadd_env(
        &[
            "add",
            "--n",
            "13",
            "--a",
            "1",
            "--b",
            "1",
            "--mode",
            "tworegister",
        ],
        Some("100"),
    );
    assert_eq!(code, 2);
    assert_eq!(v["error"], "RegisterTooLarge");
}
