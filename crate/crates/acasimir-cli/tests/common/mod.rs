#![allow(dead_code)]

use std::path::Path;
use std::process::{Command, Output};

/// Run the CLI binary with `args` and capture everything.
pub fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_acasimir"))
        .args(args)
        .output()
        .expect("the binary should spawn")
}

pub fn stdout_of(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

pub fn stderr_of(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

pub fn exit_code(output: &Output) -> i32 {
    output.status.code().expect("no signal termination")
}

/// Data rows of a CSV (header and `#` comment lines dropped), split on commas.
/// Only valid for outputs whose fields contain no quoted commas.
pub fn data_rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .skip(1)
        .filter(|line| !line.starts_with('#') && !line.is_empty())
        .map(|line| line.split(',').map(str::to_string).collect())
        .collect()
}

/// The stand-in noise band used by the shipped example configs.
pub const BAND_BLOCK: &str = "[band]\nomega_lo_rad_per_s = 31415.926535897932\nomega_hi_rad_per_s = 94247.7796076938\nspectral_intensity = 1\nsound_speed_m_per_s = 343\n";

/// Write `sections` after the stand-in band block into `dir/name` and return
/// the path as a string.
pub fn write_config(dir: &Path, name: &str, sections: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, format!("{BAND_BLOCK}{sections}")).expect("config should write");
    path.display().to_string()
}
