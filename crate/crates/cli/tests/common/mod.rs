#![allow(dead_code)]

use std::process::Command;

use serde_json::Value;

pub struct Run {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Run {
    pub fn json(&self) -> Value {
        serde_json::from_str(&self.stdout)
            .unwrap_or_else(|e| panic!("bad JSON ({e}):\n{}", self.stdout))
    }
}

pub fn zdf(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_zdf"))
        .args(args)
        .output()
        .expect("spawn zdf");
    Run {
        code: out.status.code().expect("exited normally"),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

pub fn u64s(v: &Value) -> Vec<u64> {
    v.as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_u64().unwrap())
        .collect()
}

/// `(n, m, S)` as measured in a verification report.
pub fn measured(report: &Value) -> (u64, u64, Vec<u64>) {
    (
        report["measured_n"].as_u64().unwrap(),
        report["measured_m"].as_u64().unwrap(),
        u64s(&report["measured_s"]),
    )
}
