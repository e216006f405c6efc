//! Brute-force reference computations.
//!
//! Everything here enumerates switching sequences depth-first with no
//! pruning, so the results are trivially correct and serve as the yardstick
//! for the constructive routines. A sequence `(i_1, ..., i_n)` denotes the
//! product `A_{i_n} ... A_{i_1}`: the newest matrix multiplies on the left.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::matset::{Cardinality, MatrixSet};
use crate::spectral::{rho_extrema, spectral_radius};
use crate::trajectory::MonotoneObjective;
use crate::Direction;

/// Default cap on the number of enumerated sequences.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

fn square_members(set: &MatrixSet, steps: usize, budget: u64) -> Result<Vec<Matrix>> {
    if !set.is_square() {
        let (rows, cols) = set.dims();
        return Err(Error::NotSquare { rows, cols });
    }
    if steps == 0 {
        return Err(Error::InvalidArgument("sequence length must be at least 1".into()));
    }
    let k = set.cardinality();
    let required = match k {
        Cardinality::Exact(k) => Cardinality::pow(k, steps),
        Cardinality::Overflow => Cardinality::Overflow,
    };
    if !required.within(budget) {
        return Err(Error::BudgetExceeded { required, budget });
    }
    Ok(set.members(budget)?.into_owned())
}

#[derive(Debug, Clone, Serialize)]
pub struct ExhaustiveResult {
    pub best_value: f64,
    /// Member indices in enumeration order, first applied first.
    pub best_sequence: Vec<usize>,
    pub sequences_examined: u64,
}

/// Extremum of `obj(A_{i_n} ... A_{i_1} x0)` over all `K^n` sequences.
/// Among exact ties the lexicographically smallest sequence is kept.
pub fn exhaustive_extremum(
    set: &MatrixSet,
    x0: &[f64],
    steps: usize,
    obj: &MonotoneObjective,
    direction: Direction,
    budget: u64,
) -> Result<ExhaustiveResult> {
    let members = square_members(set, steps, budget)?;
    check_start(set, x0, obj)?;
    let mut best = ExhaustiveResult {
        best_value: match direction {
            Direction::Max => f64::NEG_INFINITY,
            Direction::Min => f64::INFINITY,
        },
        best_sequence: Vec::new(),
        sequences_examined: 0,
    };
    for_each_leaf(&members, x0, steps, |seq, x| {
        let v = obj.eval_unchecked(x);
        let better = match direction {
            Direction::Max => v > best.best_value,
            Direction::Min => v < best.best_value,
        };
        if better {
            best.best_value = v;
            best.best_sequence.clear();
            best.best_sequence.extend_from_slice(seq);
        }
        best.sequences_examined += 1;
    });
    Ok(best)
}

/// Every sequence whose objective is within `rel_tol` of the extremum, in
/// lexicographic order.
pub fn exhaustive_optimal_sequences(
    set: &MatrixSet,
    x0: &[f64],
    steps: usize,
    obj: &MonotoneObjective,
    direction: Direction,
    budget: u64,
    rel_tol: f64,
) -> Result<Vec<Vec<usize>>> {
    let best = exhaustive_extremum(set, x0, steps, obj, direction, budget)?.best_value;
    let members = square_members(set, steps, budget)?;
    let slack = rel_tol * best.abs();
    let mut out = Vec::new();
    for_each_leaf(&members, x0, steps, |seq, x| {
        if (obj.eval_unchecked(x) - best).abs() <= slack {
            out.push(seq.to_vec());
        }
    });
    Ok(out)
}

/// States `x_0, ..., x_n` visited by a sequence of member indices.
pub fn sequence_images(set: &MatrixSet, x0: &[f64], sequence: &[usize]) -> Result<Vec<Vec<f64>>> {
    let members = square_members(set, 1, u64::MAX)?;
    if x0.len() != set.dims().1 {
        return Err(Error::DimMismatch { context: "initial state".into(), left: set.dims(), right: (x0.len(), 1) });
    }
    let mut states = vec![x0.to_vec()];
    for &i in sequence {
        let a = members
            .get(i)
            .ok_or_else(|| Error::InvalidArgument(format!("member index {i} out of range")))?;
        let next = a.mul_vec(states.last().expect("non-empty"));
        states.push(next);
    }
    Ok(states)
}

fn check_start(set: &MatrixSet, x0: &[f64], obj: &MonotoneObjective) -> Result<()> {
    if x0.len() != set.dims().1 {
        return Err(Error::DimMismatch { context: "initial state".into(), left: set.dims(), right: (x0.len(), 1) });
    }
    if let Some(index) = x0.iter().position(|v| !(*v >= 0.0)) {
        return Err(Error::NegativeInput { index, value: x0[index] });
    }
    obj.validate(x0.len())
}

/// Depth-first walk keeping one partial state per level.
fn for_each_leaf<F: FnMut(&[usize], &[f64])>(members: &[Matrix], x0: &[f64], steps: usize, mut visit: F) {
    let n = x0.len();
    let mut states = vec![vec![0.0; n]; steps + 1];
    states[0].copy_from_slice(x0);
    let mut seq = vec![0usize; steps];
    let mut depth = 0;
    loop {
        let (done, rest) = states.split_at_mut(depth + 1);
        members[seq[depth]].mul_vec_into(&done[depth], &mut rest[0]);
        if depth + 1 == steps {
            visit(&seq, &states[steps]);
            // advance the odometer, last position fastest
            loop {
                seq[depth] += 1;
                if seq[depth] < members.len() {
                    break;
                }
                seq[depth] = 0;
                if depth == 0 {
                    return;
                }
                depth -= 1;
            }
        } else {
            depth += 1;
        }
    }
}

/// Lazily yields every product `A_{i_n} ... A_{i_1}` with its sequence, in
/// lexicographic order of `(i_1, ..., i_n)`.
pub fn exhaustive_products(set: &MatrixSet, steps: usize, budget: u64) -> Result<ProductIter> {
    let members = square_members(set, steps, budget)?;
    let dim = set.dims().0;
    Ok(ProductIter {
        prefix: vec![Matrix::identity(dim); steps],
        seq: vec![0; steps],
        valid: 0,
        done: false,
        members,
    })
}

pub struct ProductIter {
    members: Vec<Matrix>,
    prefix: Vec<Matrix>,
    seq: Vec<usize>,
    /// Number of leading prefix products that match `seq`.
    valid: usize,
    done: bool,
}

impl Iterator for ProductIter {
    type Item = (Matrix, Vec<usize>);

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let steps = self.seq.len();
        for k in self.valid..steps {
            let a = &self.members[self.seq[k]];
            self.prefix[k] = if k == 0 { a.clone() } else { a.mul(&self.prefix[k - 1]) };
        }
        let item = (self.prefix[steps - 1].clone(), self.seq.clone());
        let mut k = steps;
        loop {
            if k == 0 {
                self.done = true;
                break;
            }
            k -= 1;
            self.seq[k] += 1;
            if self.seq[k] < self.members.len() {
                self.valid = k;
                break;
            }
            self.seq[k] = 0;
        }
        Some(item)
    }
}

#[derive(Debug, Clone)]
pub struct FinrelOptions {
    pub max_depth: usize,
    /// Absolute slack on `rho(P)^(1/n)` against the member extrema.
    pub tol: f64,
    /// Accept a product as soon as the Perron vectors of the extremal
    /// members certify its bounds; otherwise compute every spectral radius.
    pub use_certificate: bool,
    pub limit: u64,
}

impl Default for FinrelOptions {
    fn default() -> Self {
        FinrelOptions { max_depth: 6, tol: 1e-8, use_certificate: true, limit: crate::matset::DEFAULT_LIMIT }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DepthSummary {
    pub depth: usize,
    /// Products of this length, `K^n`.
    pub sequences: u64,
    /// One product per rotation class; the spectral radius is invariant
    /// under cyclic shifts, so these cover every sequence.
    pub cyclic_classes: u64,
    /// Classes whose bounds needed an explicit spectral radius.
    pub exact_evaluations: u64,
    /// Largest and smallest `rho(P)^(1/n)` seen, or certified bounds on them.
    pub max_root: f64,
    pub min_root: f64,
    pub upper_violations: u64,
    pub lower_violations: u64,
    /// `rho(W^n)^(1/n)` for the extremal members.
    pub max_witness_root: f64,
    pub min_witness_root: f64,
    pub attained: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct FinrelScan {
    pub rho_max: f64,
    pub rho_min: f64,
    pub depths: Vec<DepthSummary>,
    /// Example sequence above `rho_max` (or below `rho_min`), if any.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_violation: Option<Vec<usize>>,
    pub holds: bool,
}

/// Checks that no product of length `1..=max_depth` grows faster than the
/// fastest member or slower than the slowest one, and that the extremal
/// members attain both bounds.
///
/// Products are scanned one rotation class at a time (prenecklaces in
/// lexicographic order). For a positive vector `v`,
/// `min_i (Pv)_i / v_i <= rho(P) <= max_i (Pv)_i / v_i`, so with `v` the
/// Perron vector of the extremal member the bounds usually follow from
/// propagating two vectors along the search. Any class the vectors cannot
/// settle falls back to an explicit spectral radius.
pub fn finrel_scan(set: &MatrixSet, opts: &FinrelOptions) -> Result<FinrelScan> {
    let extrema = rho_extrema(set, opts.limit)?;
    let members = set.members(opts.limit)?.into_owned();
    let k = members.len();
    let max_w = set.member(&extrema.rho_max_witness).expect("witness is a member");
    let min_w = set.member(&extrema.rho_min_witness).expect("witness is a member");
    let positive = |v: &[f64]| v.iter().all(|x| *x > 0.0 && x.is_finite());
    let (upper_vec, lower_vec) = if opts.use_certificate {
        let up = spectral_radius(&max_w)?.witness;
        let lo = spectral_radius(&min_w)?.witness;
        (positive(&up).then_some(up), positive(&lo).then_some(lo))
    } else {
        (None, None)
    };
    let recip = |v: &Option<Vec<f64>>| v.as_ref().map(|v| v.iter().map(|x| 1.0 / x).collect::<Vec<_>>());
    let (upper_inv, lower_inv) = (recip(&upper_vec), recip(&lower_vec));

    let mut scan = FinrelScan {
        rho_max: extrema.rho_max,
        rho_min: extrema.rho_min,
        depths: Vec::new(),
        first_violation: None,
        holds: true,
    };
    for depth in 1..=opts.max_depth {
        let mut summary = DepthSummary {
            depth,
            sequences: Cardinality::pow(k as u64, depth).exact().unwrap_or(u64::MAX),
            cyclic_classes: 0,
            exact_evaluations: 0,
            max_root: f64::NEG_INFINITY,
            min_root: f64::INFINITY,
            upper_violations: 0,
            lower_violations: 0,
            max_witness_root: spectral_radius(&max_w.pow(depth as u32))?.value.powf(1.0 / depth as f64),
            min_witness_root: spectral_radius(&min_w.pow(depth as u32))?.value.powf(1.0 / depth as f64),
            attained: false,
        };
        summary.attained = (summary.max_witness_root - extrema.rho_max).abs() <= opts.tol
            && (summary.min_witness_root - extrema.rho_min).abs() <= opts.tol;
        let n = depth as i32;
        let mut walker = NecklaceWalk {
            members: &members,
            depth,
            upper: upper_inv.as_deref(),
            lower: lower_inv.as_deref(),
            hi_limit: (extrema.rho_max + opts.tol).powi(n),
            lo_limit: (extrema.rho_min - opts.tol).max(0.0).powi(n),
            max_rho: f64::NEG_INFINITY,
            min_rho: f64::INFINITY,
            seq: vec![0; depth + 1],
            up_states: vec![upper_vec.clone().unwrap_or_default(); depth + 1],
            lo_states: vec![lower_vec.clone().unwrap_or_default(); depth + 1],
            summary: &mut summary,
            first_violation: &mut scan.first_violation,
        };
        walker.generate(1, 1)?;
        let (max_rho, min_rho) = (walker.max_rho, walker.min_rho);
        summary.max_root = max_rho.powf(1.0 / depth as f64);
        summary.min_root = min_rho.powf(1.0 / depth as f64);
        scan.holds &= summary.upper_violations == 0 && summary.lower_violations == 0 && summary.attained;
        scan.depths.push(summary);
    }
    Ok(scan)
}

struct NecklaceWalk<'a> {
    members: &'a [Matrix],
    depth: usize,
    /// Reciprocals of the certificate vectors.
    upper: Option<&'a [f64]>,
    lower: Option<&'a [f64]>,
    /// Bounds on `rho(P)` itself: `(rho_max + tol)^n` and `(rho_min - tol)^n`.
    hi_limit: f64,
    lo_limit: f64,
    max_rho: f64,
    min_rho: f64,
    /// 1-based positions; `seq[0]` is unused.
    seq: Vec<usize>,
    up_states: Vec<Vec<f64>>,
    lo_states: Vec<Vec<f64>>,
    summary: &'a mut DepthSummary,
    first_violation: &'a mut Option<Vec<usize>>,
}

impl NecklaceWalk<'_> {
    /// Fredricksen-Kessler-Maiorana recursion; position `t` is next, `p` is
    /// the current period.
    fn generate(&mut self, t: usize, p: usize) -> Result<()> {
        if t > self.depth {
            if self.depth.is_multiple_of(p) {
                self.visit()?;
            }
            return Ok(());
        }
        let start = if t == 1 { 0 } else { self.seq[t - p] };
        for j in start..self.members.len() {
            self.seq[t] = j;
            self.propagate(t);
            let period = if t > 1 && j == self.seq[t - p] { p } else { t };
            self.generate(t + 1, period)?;
        }
        Ok(())
    }

    fn propagate(&mut self, t: usize) {
        let a = &self.members[self.seq[t]];
        if self.upper.is_some() {
            let (done, rest) = self.up_states.split_at_mut(t);
            a.mul_vec_into(&done[t - 1], &mut rest[0]);
        }
        if self.lower.is_some() {
            let (done, rest) = self.lo_states.split_at_mut(t);
            a.mul_vec_into(&done[t - 1], &mut rest[0]);
        }
    }

    fn visit(&mut self) -> Result<()> {
        self.summary.cyclic_classes += 1;
        // Collatz-Wielandt bounds on rho(P) from the propagated vectors
        let upper = self
            .upper
            .map(|r| self.up_states[self.depth].iter().zip(r).fold(0.0f64, |m, (a, b)| m.max(a * b)))
            .filter(|b| *b <= self.hi_limit);
        let lower = self
            .lower
            .map(|r| self.lo_states[self.depth].iter().zip(r).fold(f64::INFINITY, |m, (a, b)| m.min(a * b)))
            .filter(|b| *b >= self.lo_limit);
        let (hi, lo) = match (upper, lower) {
            (Some(hi), Some(lo)) => (hi, lo),
            (hi, lo) => {
                self.summary.exact_evaluations += 1;
                let product = self.seq[2..]
                    .iter()
                    .fold(self.members[self.seq[1]].clone(), |acc, &i| self.members[i].mul(&acc));
                let rho = spectral_radius(&product)?.value;
                (hi.unwrap_or(rho), lo.unwrap_or(rho))
            }
        };
        self.max_rho = self.max_rho.max(hi);
        self.min_rho = self.min_rho.min(lo);
        let over = hi > self.hi_limit;
        let under = lo < self.lo_limit;
        self.summary.upper_violations += over as u64;
        self.summary.lower_violations += under as u64;
        if (over || under) && self.first_violation.is_none() {
            *self.first_violation = Some(self.seq[1..].to_vec());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matset::Mode;

    fn m(rows: &[[f64; 2]]) -> Matrix {
        Matrix::from_rows(rows).unwrap()
    }

    fn pair() -> MatrixSet {
        MatrixSet::explicit(vec![m(&[[2.0, 4.0], [1.0, 2.0]]), m(&[[2.0, 1.0], [4.0, 2.0]])], Mode::Positive).unwrap()
    }

    #[test]
    fn product_order_and_count() {
        let s = pair();
        let all: Vec<_> = exhaustive_products(&s, 2, 100).unwrap().collect();
        let seqs: Vec<_> = all.iter().map(|(_, q)| q.clone()).collect();
        assert_eq!(seqs, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
        // (i_1, i_2) = (1, 0) means A_0 applied after A_1, i.e. A_0 A_1
        assert_eq!(all[2].0, m(&[[20.0, 10.0], [10.0, 5.0]]));
        assert_eq!(all[1].0, m(&[[5.0, 10.0], [10.0, 20.0]]));

        let three = MatrixSet::explicit(vec![m(&[[1.0, 0.0], [0.0, 1.0]]); 3], Mode::Nonnegative).unwrap();
        assert_eq!(exhaustive_products(&three, 4, 100).unwrap().count(), 81);
        assert!(matches!(exhaustive_products(&three, 5, 100), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn products_match_step_by_step_propagation() {
        let s = MatrixSet::explicit(
            vec![m(&[[1.0, 2.0], [0.5, 1.0]]), m(&[[0.3, 1.0], [2.0, 0.1]]), m(&[[1.5, 0.0], [0.2, 0.7]])],
            Mode::Nonnegative,
        )
        .unwrap();
        let x0 = [0.7, 1.3];
        for (p, seq) in exhaustive_products(&s, 3, 100).unwrap() {
            let states = sequence_images(&s, &x0, &seq).unwrap();
            let direct = p.mul_vec(&x0);
            for (a, b) in direct.iter().zip(&states[3]) {
                assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
            }
        }
    }

    #[test]
    fn extremum_by_hand() {
        let s = pair();
        let x0 = [1.0, 1.0];
        let r = exhaustive_extremum(&s, &x0, 3, &MonotoneObjective::L1, Direction::Max, 100).unwrap();
        assert_eq!(r.sequences_examined, 8);
        let mut best = f64::NEG_INFINITY;
        for (p, _) in exhaustive_products(&s, 3, 100).unwrap() {
            best = best.max(p.mul_vec(&x0).iter().sum());
        }
        assert_eq!(r.best_value, best);

        let single = MatrixSet::explicit(vec![m(&[[0.5, 0.5], [0.1, 0.2]])], Mode::Positive).unwrap();
        let r = exhaustive_extremum(&single, &x0, 4, &MonotoneObjective::L2, Direction::Min, 100).unwrap();
        let direct = m(&[[0.5, 0.5], [0.1, 0.2]]).pow(4).mul_vec(&x0);
        assert_eq!(r.best_value, MonotoneObjective::L2.eval_unchecked(&direct));
        assert_eq!(r.best_sequence, vec![0; 4]);
    }

    #[test]
    fn ties_keep_smallest_sequence() {
        let a = m(&[[1.0, 1.0], [1.0, 1.0]]);
        let s = MatrixSet::explicit(vec![a.clone(), a], Mode::Positive).unwrap();
        let r = exhaustive_extremum(&s, &[1.0, 2.0], 3, &MonotoneObjective::L1, Direction::Max, 100).unwrap();
        assert_eq!(r.best_sequence, vec![0, 0, 0]);
        let all = exhaustive_optimal_sequences(&s, &[1.0, 2.0], 3, &MonotoneObjective::L1, Direction::Max, 100, 1e-12)
            .unwrap();
        assert_eq!(all.len(), 8);
    }

    #[test]
    fn necklace_scan_covers_every_product() {
        let s = MatrixSet::iru(
            vec![
                vec![vec![1.0, 2.0, 0.5], vec![0.2, 1.0, 1.0]],
                vec![vec![0.3, 0.3, 0.3], vec![1.0, 0.1, 2.0], vec![0.5, 0.5, 0.5]],
                vec![vec![2.0, 0.1, 0.1], vec![0.4, 0.9, 1.1]],
            ],
            Mode::Positive,
        )
        .unwrap();
        let exact = finrel_scan(&s, &FinrelOptions { max_depth: 3, use_certificate: false, ..Default::default() }).unwrap();
        let fast = finrel_scan(&s, &FinrelOptions { max_depth: 3, ..Default::default() }).unwrap();
        assert!(exact.holds && fast.holds);
        for (depth, (e, f)) in exact.depths.iter().zip(&fast.depths).enumerate() {
            // brute force over all sequences
            let mut hi = f64::NEG_INFINITY;
            let mut lo = f64::INFINITY;
            for (p, _) in exhaustive_products(&s, depth + 1, DEFAULT_BUDGET).unwrap() {
                let r = spectral_radius(&p).unwrap().value.powf(1.0 / (depth + 1) as f64);
                hi = hi.max(r);
                lo = lo.min(r);
            }
            assert!((e.max_root - hi).abs() < 1e-10 && (e.min_root - lo).abs() < 1e-10);
            assert_eq!(e.cyclic_classes, f.cyclic_classes);
            assert_eq!(f.exact_evaluations, 0);
        }
        // necklaces of length 3 over 12 letters: (12^3 + 2*12) / 3
        assert_eq!(exact.depths[2].cyclic_classes, (12 * 12 * 12 + 2 * 12) / 3);
    }

    #[test]
    fn scan_flags_non_h_pair() {
        let scan = finrel_scan(&pair(), &FinrelOptions { max_depth: 2, ..Default::default() }).unwrap();
        assert!(!scan.holds);
        assert!(scan.depths[1].upper_violations > 0);
        assert!((scan.depths[1].max_root - 5.0).abs() < 1e-9);
        assert!(scan.first_violation.is_some());
    }
}
