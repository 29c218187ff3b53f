//! Drive the `landau` command line in-process: load a config with flag
//! overrides, then run `check` and `dimension --format csv` on it.

use landau_automorphic::cli::execute;
use landau_automorphic::config::{parse_nu_expr, Overrides, RunConfig};
use landau_automorphic::error::Result;

fn main() -> Result<()> {
    let text = r#"{"nu": {"pi_multiple": 1.0}, "lattice": "square", "character": "weierstrass", "grid": 64}"#;
    let overrides = Overrides { nu: Some(parse_nu_expr("2pi")?), ..Overrides::default() };
    let cfg = RunConfig::from_json_str(text, &overrides)?;
    println!("nu = {} (from the flag), grid = {} (from the file)", cfg.nu_value(), cfg.grid);
    // Weierstrass at 2π violates the quantization condition
    println!("rdq valid: {}\n", cfg.automorphic_data()?.rdq_valid());

    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = execute(["landau", "dimension", "--l", "0..2", "--format", "csv"], &mut out, &mut err);
    println!("landau dimension --l 0..2 --format csv  (exit {code})");
    print!("{}", String::from_utf8_lossy(&out));

    let mut out = Vec::new();
    let code = execute(["landau", "check", "--nu", "pi/2"], &mut out, &mut err);
    println!("\nlandau check --nu pi/2  (exit {code})");
    let v: serde_json::Value = serde_json::from_slice(&out)?;
    println!("{}", serde_json::to_string_pretty(&v["result"])?);
    Ok(())
}
