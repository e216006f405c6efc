//! Loads a system file and prints its analysis.
//!
//! Run with `cargo run --example load_system -- crates/core/systems/fig1.toml`.

use posswitch::spectral::{analyze, AnalyzeOptions};
use posswitch::system::parse_system;

fn main() -> posswitch::Result<()> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/systems/fig1.toml").to_string());
    let system = parse_system(&path)?;
    println!("{path}: {}", system.expr());
    for (name, set) in system.sets() {
        println!("  {name}: {} set of {} {:?} matrices", set.variant_name(), set.cardinality(), set.dims());
    }
    let set = system.evaluate(1_000_000)?;
    let report = analyze(&set, &AnalyzeOptions { oracle_depth: Some(3), ..Default::default() })?;
    println!("{}", serde_json::to_string_pretty(&report).expect("serializable"));
    println!("canonical form:\n{}", system.to_toml_string());
    Ok(())
}
