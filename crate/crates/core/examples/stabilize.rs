//! Drives a composed system to zero along its slowest-growing trajectory.
//!
//! Run with `cargo run --example stabilize`.

use posswitch::spectral::rho_extrema;
use posswitch::{mink_add, mink_mul, stabilizing_sequence, MatrixSet, Mode};

fn main() -> posswitch::Result<()> {
    let a = MatrixSet::iru(vec![vec![vec![0.6, 0.3], vec![0.2, 0.9]], vec![vec![0.4, 0.4]]], Mode::Positive)?;
    let b = MatrixSet::iru(vec![vec![vec![0.5, 0.1]], vec![vec![0.1, 0.5], vec![0.3, 0.6]]], Mode::Positive)?;
    let composed = mink_add(&mink_mul(&a, &b)?, &b)?;

    // rescale so the slowest member decays at rate one half
    let rho_min = rho_extrema(&composed, 1_000_000)?.rho_min;
    let set = composed.scaled(0.5 / rho_min)?;

    let report = stabilizing_sequence(&set, &[1.0, 1.0], 30)?;
    println!("rho_min          = {:.6}", report.rho_min.unwrap());
    println!("empirical decay  = {:.6}", report.decay_rate);
    println!("stabilizable     = {:?}", report.stabilizable);
    let l1 = &report.trajectory.objectives[0].values;
    for k in (0..=30).step_by(5) {
        println!("  |x_{k:<2}|_1 = {:.3e}", l1[k]);
    }
    Ok(())
}
