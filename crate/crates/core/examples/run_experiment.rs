//! Run a named experiment from code and print its verdicts.
//!
//! `cargo run --release --example run_experiment -- configs/coercivity.json`

use std::path::PathBuf;

use semiclass_lab::harness::{load_config, run_batch};

fn main() -> semiclass_lab::Result<()> {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs/gamma_identity.json"));
    let cfgs = load_config(&path)?;
    let out = std::env::temp_dir().join("semiclass_example_out");
    for result in run_batch(&cfgs, Some(&out), 1)? {
        let report = result?;
        println!("{} ({:.2} s)", report.name.as_str(), report.runtime_seconds);
        for c in &report.criteria {
            println!("  {:<5} {:<28} {:.4e} vs {:.4e}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.measured, c.threshold);
        }
    }
    println!("tables under {}", out.display());
    Ok(())
}
