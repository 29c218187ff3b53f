//! Run the full verification suite from a JSON config, or on the
//! Weierstrass triplet of the unit square when no path is given:
//!
//! `cargo run --release --example verification_suite -- examples/configs/trivial_2pi.json`

use std::path::Path;

use landau_automorphic::config::{Overrides, RunConfig};
use landau_automorphic::error::Result;
use landau_automorphic::verify::run_suite;

fn main() -> Result<()> {
    let cfg = match std::env::args().nth(1) {
        Some(path) => RunConfig::from_path(Path::new(&path), &Overrides::default())?,
        None => RunConfig::weierstrass_square(),
    };
    let data = cfg.automorphic_data()?;
    let reports = run_suite(&data, &cfg.suite_settings())?;
    for r in &reports {
        let worst = r.residuals.iter().map(|x| format!("{}={:.2e}", x.name, x.value)).collect::<Vec<_>>().join(", ");
        println!("{} {:<36} {worst}", if r.passed { "ok  " } else { "FAIL" }, r.name);
    }
    let failed = reports.iter().filter(|r| !r.passed).count();
    println!("{} checks, {failed} failed", reports.len());
    Ok(())
}
