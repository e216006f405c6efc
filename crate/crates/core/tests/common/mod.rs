//! Random instance generators shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use posswitch::{eval_poly, CompositionExpr, Matrix, MatrixSet, Mode};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

pub fn positive_row(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(0.05..1.0)).collect()
}

pub fn positive_vector(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| 10f64.powf(rng.gen_range(-1.0..1.0))).collect()
}

/// Positive IRU set with `sizes[i]` candidate rows for row `i`.
pub fn iru_with_sizes(rng: &mut ChaCha8Rng, cols: usize, sizes: &[usize]) -> MatrixSet {
    let rows = sizes.iter().map(|&k| (0..k).map(|_| positive_row(rng, cols)).collect()).collect();
    MatrixSet::iru(rows, Mode::Positive).unwrap()
}

/// Square positive IRU set with row-set sizes drawn from `sizes`.
pub fn random_iru(rng: &mut ChaCha8Rng, n: usize, sizes: std::ops::RangeInclusive<usize>) -> MatrixSet {
    let s: Vec<usize> = (0..n).map(|_| rng.gen_range(sizes.clone())).collect();
    iru_with_sizes(rng, n, &s)
}

/// Strictly increasing positive chain built from cumulative increments.
pub fn random_chain(rng: &mut ChaCha8Rng, rows: usize, cols: usize, len: usize) -> MatrixSet {
    let mut cur: Vec<Vec<f64>> = (0..rows).map(|_| positive_row(rng, cols)).collect();
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push(Matrix::from_rows(&cur).unwrap());
        for row in cur.iter_mut() {
            for v in row.iter_mut() {
                *v += rng.gen_range(0.01..0.5);
            }
        }
    }
    MatrixSet::ordered(out, Mode::Positive).unwrap()
}

pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matrix {
    let data: Vec<Vec<f64>> = (0..rows).map(|_| positive_row(rng, cols)).collect();
    Matrix::from_rows(&data).unwrap()
}

/// Small IRU or ordered block with at most `max_members` members.
pub fn small_block(rng: &mut ChaCha8Rng, n: usize, max_members: usize) -> MatrixSet {
    if rng.gen_bool(0.5) {
        loop {
            let sizes: Vec<usize> = (0..n).map(|_| rng.gen_range(1..=2)).collect();
            if sizes.iter().product::<usize>() <= max_members {
                return iru_with_sizes(rng, n, &sizes);
            }
        }
    } else {
        let len = rng.gen_range(1..=max_members.min(3));
        random_chain(rng, n, n, len)
    }
}

pub fn fig1_expr() -> CompositionExpr {
    CompositionExpr::block("A3")
        .mul(CompositionExpr::block("A1").add(CompositionExpr::block("A2")))
        .add(CompositionExpr::block("A4"))
}

/// Blocks for `A3(A1 + A2) + A4`, each with at most three members.
pub fn fig1_env(rng: &mut ChaCha8Rng, n: usize) -> BTreeMap<String, MatrixSet> {
    ["A1", "A2", "A3", "A4"].iter().map(|name| (name.to_string(), small_block(rng, n, 3))).collect()
}

pub fn random_fig1(rng: &mut ChaCha8Rng, n: usize) -> MatrixSet {
    eval_poly(&fig1_expr(), &fig1_env(rng, n), 1_000_000).unwrap()
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}
