//! Greedy extremal trajectory checked against brute force.
//!
//! Run with `cargo run --example extremal_trajectory`.

use posswitch::oracle::{exhaustive_extremum, DEFAULT_BUDGET};
use posswitch::{greedy_trajectory, Direction, MatrixSet, Mode, MonotoneObjective};

fn main() -> posswitch::Result<()> {
    let set = MatrixSet::iru(
        vec![vec![vec![1.0, 2.0], vec![2.0, 1.0]], vec![vec![1.0, 1.0], vec![3.0, 0.0]]],
        Mode::Nonnegative,
    )?;
    let x0 = [1.0, 2.0];
    let steps = 6;
    for direction in [Direction::Max, Direction::Min] {
        let mut traj = greedy_trajectory(&set, &x0, steps, direction)?;
        println!("{direction}: chosen {:?}", traj.chosen);
        for nu in MonotoneObjective::NORMS {
            let greedy = *traj.evaluate(&nu)?.values.last().unwrap();
            let brute = exhaustive_extremum(&set, &x0, steps, &nu, direction, DEFAULT_BUDGET)?;
            println!(
                "  {:<4} greedy {:>12.4} exhaustive {:>12.4} over {} sequences",
                nu.name(),
                greedy,
                brute.best_value,
                brute.sequences_examined
            );
        }
    }
    Ok(())
}
