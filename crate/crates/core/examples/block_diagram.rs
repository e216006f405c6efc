//! Series-parallel block diagram compiled to a Minkowski polynomial.
//!
//! Run with `cargo run --example block_diagram`.

use std::collections::BTreeMap;

use posswitch::spectral::{analyze, AnalyzeOptions};
use posswitch::{compile_graph, eval_poly, BlockGraph, Matrix, MatrixSet, Mode, SpGraph};

fn main() -> posswitch::Result<()> {
    let mut blocks = BTreeMap::new();
    blocks.insert(
        "A1".to_string(),
        MatrixSet::iru(vec![vec![vec![0.2, 0.1], vec![0.1, 0.3]], vec![vec![0.1, 0.1]]], Mode::Positive)?,
    );
    blocks.insert(
        "A2".to_string(),
        MatrixSet::ordered(
            vec![
                Matrix::from_rows(&[[0.05, 0.05], [0.02, 0.05]])?,
                Matrix::from_rows(&[[0.1, 0.1], [0.05, 0.2]])?,
            ],
            Mode::Positive,
        )?,
    );
    blocks.insert(
        "A3".to_string(),
        MatrixSet::explicit(vec![Matrix::from_rows(&[[1.0, 0.5], [0.5, 1.0]])?], Mode::Positive)?,
    );
    blocks.insert(
        "A4".to_string(),
        MatrixSet::iru(vec![vec![vec![0.1, 0.1]], vec![vec![0.2, 0.1], vec![0.1, 0.3]]], Mode::Positive)?,
    );

    // A1 and A2 in parallel, then A3; A4 bypasses both.
    let edge = |n: &str| SpGraph::Edge(n.to_string());
    let root = SpGraph::Parallel(vec![
        SpGraph::Series(vec![SpGraph::Parallel(vec![edge("A1"), edge("A2")]), edge("A3")]),
        edge("A4"),
    ]);
    let graph = BlockGraph { blocks, root };
    let expr = compile_graph(&graph)?;
    println!("transition set: {expr}");

    let set = eval_poly(&expr, &graph.blocks, 1_000_000)?;
    println!("{} distinct matrices", set.cardinality());
    let report = analyze(&set, &AnalyzeOptions::default())?;
    println!(
        "rho_max = {:.6}, rho_min = {:.6}, stable = {}, basis = {:?}",
        report.rho_max, report.rho_min, report.stable, report.verdict_basis
    );
    Ok(())
}
