//! Runs a bundled experiment config and writes CSV, JSON and SVG reports.
//!
//!     cargo run --release --example run_config -- [config] [out-dir]

use std::path::PathBuf;

use entrobound::harness::{render_report, ReportFormat};
use entrobound::{run_experiment, ExperimentConfig};

fn main() -> entrobound::Result<()> {
    let mut args = std::env::args().skip(1);
    let config = args.next().map(PathBuf::from).unwrap_or_else(|| {
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs/maxent-equality.cfg")
    });
    let out = args.next().map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("entrobound-example"));

    let report = run_experiment(&ExperimentConfig::load(&config)?)?;
    for row in &report.rows {
        println!(
            "{:<24} p={:<4} {:<24} bound {:.4}  empirical {:.4}  {}",
            row.scenario,
            row.report.p.to_string(),
            row.report.entropy_source.to_string(),
            row.report.bound_value,
            row.report.empirical_lp.unwrap_or(f64::NAN),
            if row.violated { "VIOLATED" } else { "ok" }
        );
    }
    for path in render_report(&report, &ReportFormat::ALL, &out)? {
        println!("wrote {}", path.display());
    }
    Ok(())
}
