//! Extremal spectral radii of an IRU set, by enumeration and by row-wise
//! policy iteration.
//!
//! Run with `cargo run --example iru_extrema`.

use posswitch::spectral::{analyze, iru_greedy_extremum, rho_extrema, AnalyzeOptions};
use posswitch::{Direction, MatrixSet, Mode};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> posswitch::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let dim = 4;
    let row_sets = (0..dim)
        .map(|_| (0..5).map(|_| (0..dim).map(|_| rng.gen_range(0.01..0.5)).collect()).collect())
        .collect();
    let set = MatrixSet::iru(row_sets, Mode::Positive)?;
    println!("{} members", set.cardinality());

    let exact = rho_extrema(&set, 1_000_000)?;
    let hi = iru_greedy_extremum(&set, Direction::Max)?;
    let lo = iru_greedy_extremum(&set, Direction::Min)?;
    println!("rho_max: enumeration {:.12} greedy {:.12} ({} selections)", exact.rho_max, hi.value, hi.selections);
    println!("rho_min: enumeration {:.12} greedy {:.12} ({} selections)", exact.rho_min, lo.value, lo.selections);
    println!("argmax rows {:?}, argmin rows {:?}", hi.rows, lo.rows);

    let report = analyze(&set, &AnalyzeOptions::default())?;
    println!("stable: {}, stabilizable: {}", report.stable, report.stabilizable);
    Ok(())
}
