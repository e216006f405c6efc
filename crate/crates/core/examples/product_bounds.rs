//! Brute-force joint spectral radius bounds next to the member extrema.
//!
//! Run with `cargo run --example product_bounds`.

use posswitch::oracle::{finrel_scan, FinrelOptions};
use posswitch::spectral::{product_bounds, rho_extrema};
use posswitch::{MatrixSet, Mode, NormKind};

fn main() -> posswitch::Result<()> {
    let set = MatrixSet::iru(
        vec![
            vec![vec![0.4, 0.3, 0.2], vec![0.2, 0.5, 0.3]],
            vec![vec![0.1, 0.6, 0.2], vec![0.3, 0.3, 0.3], vec![0.5, 0.1, 0.2]],
            vec![vec![0.2, 0.2, 0.5], vec![0.4, 0.2, 0.1]],
        ],
        Mode::Positive,
    )?;
    let e = rho_extrema(&set, 1_000_000)?;
    println!("members: rho_min = {:.10}, rho_max = {:.10}", e.rho_min, e.rho_max);
    for depth in 1..=5 {
        let b = product_bounds(&set, depth, NormKind::Inf, 10_000_000)?;
        println!(
            "depth {depth}: {:>6} products, jsr in [{:.10}, {:.10}], lsr <= {:.10}",
            b.products, b.jsr_lower, b.jsr_upper, b.lsr_upper
        );
    }

    let scan = finrel_scan(&set, &FinrelOptions { max_depth: 6, ..Default::default() })?;
    for d in &scan.depths {
        println!(
            "length {}: {} sequences in {} rotation classes, {} exact evaluations",
            d.depth, d.sequences, d.cyclic_classes, d.exact_evaluations
        );
    }
    println!("extremal members bound every product: {}", scan.holds);
    Ok(())
}
