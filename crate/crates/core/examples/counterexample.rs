//! Two matrices that are each stable-looking at rate 4 but switch at rate 5.
//!
//! Run with `cargo run --example counterexample`.

use posswitch::hourglass::{check_hourglass, HourglassOptions};
use posswitch::spectral::{product_bounds, spectral_radius};
use posswitch::{Matrix, MatrixSet, Mode, NormKind};

fn main() -> posswitch::Result<()> {
    let a = 2.0;
    let a1 = Matrix::from_rows(&[[a, a * a], [1.0, a]])?;
    let a2 = Matrix::from_rows(&[[a, 1.0], [a * a, a]])?;
    println!("rho(A1)    = {}", spectral_radius(&a1)?.value);
    println!("rho(A2)    = {}", spectral_radius(&a2)?.value);
    println!("rho(A1 A2) = {}", spectral_radius(&a1.mul(&a2))?.value);

    let set = MatrixSet::explicit(vec![a1, a2], Mode::Positive)?;
    for depth in 1..=4 {
        let b = product_bounds(&set, depth, NormKind::Inf, 1_000)?;
        println!(
            "depth {depth}: {:.6} <= jsr <= {:.6} (witness {:?})",
            b.jsr_lower, b.jsr_upper, b.jsr_lower_witness
        );
    }

    let verdict = check_hourglass(&set, &HourglassOptions { forced: vec![vec![1.0, 1.0]], ..Default::default() })?;
    println!("hourglass: {:?}", verdict.status);
    if let Some(w) = verdict.witness {
        println!("  violated {:?} at x = {:?} for member {}", w.axiom, w.x, w.member);
    }
    Ok(())
}
