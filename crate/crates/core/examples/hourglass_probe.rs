//! Dominant members and the hourglass axioms on random samples.
//!
//! Run with `cargo run --example hourglass_probe`.

use posswitch::hourglass::{check_hourglass, dominant_max, dominant_min, HourglassOptions};
use posswitch::{Matrix, MatrixSet, Mode};

fn main() -> posswitch::Result<()> {
    let iru = MatrixSet::iru(
        vec![vec![vec![1.0, 2.0], vec![2.0, 1.0]], vec![vec![1.0, 1.0], vec![3.0, 0.0]]],
        Mode::Nonnegative,
    )?;
    let x = [1.0, 2.0];
    let hi = dominant_max(&iru, &x)?;
    let lo = dominant_min(&iru, &x)?;
    println!("x = {x:?}: max member {:?} -> {:?}, min member {:?} -> {:?}", hi.member, hi.image, lo.member, lo.image);

    let pair = MatrixSet::explicit(
        vec![Matrix::from_rows(&[[2.0, 4.0], [1.0, 2.0]])?, Matrix::from_rows(&[[2.0, 1.0], [4.0, 2.0]])?],
        Mode::Positive,
    )?;
    for (name, set) in [("iru", &iru), ("pair", &pair)] {
        let v = check_hourglass(set, &HourglassOptions { samples: 500, seed: 1, ..Default::default() })?;
        println!("{name}: {:?} after {} samples, witness {:?}", v.status, v.samples_tested, v.witness);
    }
    match dominant_max(&pair, &[1.0, 1.0]) {
        Err(e) => println!("pair at (1, 1): {e}"),
        Ok(c) => println!("pair at (1, 1): member {:?}", c.member),
    }
    Ok(())
}
