//! Spectral radii of single matrices and extremal spectral radii of sets.
//!
//! For a set that belongs to the H-family (IRU sets, linearly ordered
//! chains and Minkowski polynomials of them) the joint spectral radius equals
//! the largest member spectral radius and the lower spectral radius equals
//! the smallest one, so both stability and stabilizability reduce to finding
//! extremal members. For any other set the extrema are still reported, but
//! only as a bracket-free heuristic.

use nalgebra::{DMatrix, Schur};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hourglass::{check_hourglass, Axiom, HourglassOptions, HourglassStatus};
use crate::matrix::{Matrix, NormKind};
use crate::matset::{Cardinality, MatrixSet, MemberId, SetKind, DEFAULT_LIMIT};
use crate::oracle::{exhaustive_products, DEFAULT_BUDGET};
use crate::Direction;

/// Iteration budget for the shifted power method.
pub const POWER_BUDGET: usize = 100_000;
/// Relative width of the Collatz-Wielandt bracket accepted as converged.
pub const POWER_TOL: f64 = 1e-12;
/// Selections allowed before the IRU greedy search gives up.
pub const GREEDY_BUDGET: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpectralMethod {
    PowerIteration,
    DenseEigensolver,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectralResult {
    pub value: f64,
    /// Dominant eigenvector estimate, scaled to unit max-norm.
    pub witness: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub method: SpectralMethod,
}

fn check_square(a: &Matrix) -> Result<()> {
    if !a.is_square() {
        return Err(Error::NotSquare { rows: a.rows(), cols: a.cols() });
    }
    if let Some(k) = a.as_slice().iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            at: crate::error::EntryLocation { member: 0, row: k / a.cols(), col: k % a.cols() },
        });
    }
    Ok(())
}

/// Spectral radius of a square matrix.
///
/// Non-negative matrices go through power iteration on `A + sI`
/// (`s` = max row sum), which is primitive whenever `A` is irreducible. The
/// iteration stops once the Collatz-Wielandt bracket
/// `min_i (Ax)_i/x_i <= rho(A) <= max_i (Ax)_i/x_i` is narrower than
/// [`POWER_TOL`] relative. If the bracket stalls the matrix is split into
/// strongly connected components: `rho(A)` is the largest spectral radius of
/// an irreducible diagonal block, and components without a cycle contribute
/// zero. Blocks that still resist, and matrices with negative entries, use a
/// dense Schur decomposition. `witness` is an eigenvector estimate only when
/// `converged` is set.
pub fn spectral_radius(a: &Matrix) -> Result<SpectralResult> {
    check_square(a)?;
    if a.as_slice().iter().all(|&v| v >= 0.0) {
        let power = power_iteration(a, POWER_BUDGET);
        if power.converged {
            return Ok(power);
        }
        let components = cyclic_components(a);
        if components.len() == 1 && components[0].len() == a.rows() {
            return Ok(SpectralResult { value: schur_radius(a)?, method: SpectralMethod::DenseEigensolver, ..power });
        }
        let mut value = 0.0f64;
        let mut method = SpectralMethod::PowerIteration;
        for block in components {
            let sub = principal_submatrix(a, &block);
            let r = power_iteration(&sub, POWER_BUDGET);
            value = value.max(if r.converged {
                r.value
            } else {
                method = SpectralMethod::DenseEigensolver;
                schur_radius(&sub)?
            });
        }
        return Ok(SpectralResult { value, method, ..power });
    }
    Ok(SpectralResult {
        value: schur_radius(a)?,
        witness: vec![1.0; a.rows()],
        iterations: 0,
        converged: false,
        method: SpectralMethod::DenseEigensolver,
    })
}

/// Strongly connected components of the graph `i -> j` iff `a_ij != 0`
/// that contain a cycle (size above one, or a non-zero diagonal entry).
fn cyclic_components(a: &Matrix) -> Vec<Vec<usize>> {
    struct Tarjan<'a> {
        a: &'a Matrix,
        index: Vec<usize>,
        low: Vec<usize>,
        on_stack: Vec<bool>,
        stack: Vec<usize>,
        next: usize,
        out: Vec<Vec<usize>>,
    }
    impl Tarjan<'_> {
        fn visit(&mut self, v: usize) {
            self.index[v] = self.next;
            self.low[v] = self.next;
            self.next += 1;
            self.stack.push(v);
            self.on_stack[v] = true;
            for w in 0..self.a.cols() {
                if self.a.get(v, w) == 0.0 {
                    continue;
                }
                if self.index[w] == usize::MAX {
                    self.visit(w);
                    self.low[v] = self.low[v].min(self.low[w]);
                } else if self.on_stack[w] {
                    self.low[v] = self.low[v].min(self.index[w]);
                }
            }
            if self.low[v] == self.index[v] {
                let mut comp = Vec::new();
                loop {
                    let w = self.stack.pop().expect("v is on the stack");
                    self.on_stack[w] = false;
                    comp.push(w);
                    if w == v {
                        break;
                    }
                }
                if comp.len() > 1 || self.a.get(v, v) != 0.0 {
                    comp.sort_unstable();
                    self.out.push(comp);
                }
            }
        }
    }
    let n = a.rows();
    let mut t = Tarjan {
        a,
        index: vec![usize::MAX; n],
        low: vec![0; n],
        on_stack: vec![false; n],
        stack: Vec::new(),
        next: 0,
        out: Vec::new(),
    };
    for v in 0..n {
        if t.index[v] == usize::MAX {
            t.visit(v);
        }
    }
    t.out
}

fn principal_submatrix(a: &Matrix, idx: &[usize]) -> Matrix {
    let data = idx.iter().flat_map(|&i| idx.iter().map(move |&j| a.get(i, j))).collect();
    Matrix::from_raw(idx.len(), idx.len(), data)
}

/// Shifted power iteration for a square non-negative matrix. `converged` is
/// false when the bracket did not close within `budget` iterations or
/// stopped shrinking.
pub fn power_iteration(a: &Matrix, budget: usize) -> SpectralResult {
    let n = a.rows();
    let shift = a.norm(NormKind::Inf);
    let mut x = vec![1.0; n];
    let mut ax = vec![0.0; n];
    if shift == 0.0 {
        return SpectralResult {
            value: 0.0,
            witness: x,
            iterations: 0,
            converged: true,
            method: SpectralMethod::PowerIteration,
        };
    }
    let mut checkpoint_width = f64::INFINITY;
    for it in 1..=budget {
        a.mul_vec_into(&x, &mut ax);
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for (yi, xi) in ax.iter().zip(&x) {
            let r = yi / xi;
            lo = lo.min(r);
            hi = hi.max(r);
        }
        let width = hi - lo;
        if width <= POWER_TOL * hi {
            return SpectralResult {
                value: 0.5 * (lo + hi),
                witness: x,
                iterations: it,
                converged: true,
                method: SpectralMethod::PowerIteration,
            };
        }
        // x <- (A + sI) x, renormalized to unit max-norm
        let mut peak = 0.0f64;
        for (xi, yi) in x.iter_mut().zip(&ax) {
            *xi = yi + shift * *xi;
            peak = peak.max(*xi);
        }
        let mut degenerate = false;
        for xi in x.iter_mut() {
            *xi /= peak;
            degenerate |= *xi < 1e-280;
        }
        if degenerate {
            return unconverged(x, it);
        }
        if it % 256 == 0 {
            if width > 0.5 * checkpoint_width {
                return unconverged(x, it);
            }
            checkpoint_width = width;
        }
    }
    unconverged(x, budget)
}

fn unconverged(witness: Vec<f64>, iterations: usize) -> SpectralResult {
    SpectralResult {
        value: f64::NAN,
        witness,
        iterations,
        converged: false,
        method: SpectralMethod::PowerIteration,
    }
}

/// Largest eigenvalue modulus from a real Schur decomposition. Reducible
/// non-negative matrices are decomposed into irreducible diagonal blocks
/// first: a defective eigenvalue perturbs by about `eps^(1/k)` for a Jordan
/// block of size `k`, while each block's Perron root is simple.
pub fn dense_spectral_radius(a: &Matrix) -> Result<f64> {
    check_square(a)?;
    if !a.as_slice().iter().all(|&v| v >= 0.0) {
        return schur_radius(a);
    }
    cyclic_components(a)
        .iter()
        .map(|block| schur_radius(&principal_submatrix(a, block)))
        .try_fold(0.0f64, |acc, r| Ok(acc.max(r?)))
}

fn schur_radius(a: &Matrix) -> Result<f64> {
    let n = a.rows();
    let m = DMatrix::from_row_slice(n, n, a.as_slice());
    let schur = Schur::try_new(m, f64::EPSILON, 1000 * n.max(1)).ok_or(Error::NoConvergence(1000 * n))?;
    Ok(schur
        .complex_eigenvalues()
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max))
}

#[derive(Debug, Clone, Serialize)]
pub struct RhoExtrema {
    pub rho_min: f64,
    pub rho_min_witness: MemberId,
    pub rho_max: f64,
    pub rho_max_witness: MemberId,
    pub members: u64,
}

/// Relative gap below which two spectral radii count as tied.
const TIE_TOL: f64 = 1e-12;

fn witness_id(set: &MatrixSet, index: usize) -> MemberId {
    match set.iru_choice(index as u64) {
        Some(rows) => MemberId::Rows(rows),
        None => MemberId::Index(index),
    }
}

/// Exact extremal spectral radii by enumerating every member. Ties go to
/// the smallest enumeration index.
pub fn rho_extrema(set: &MatrixSet, limit: u64) -> Result<RhoExtrema> {
    if !set.is_square() {
        let (rows, cols) = set.dims();
        return Err(Error::NotSquare { rows, cols });
    }
    let members = set.members(limit)?;
    let mut best_min = (f64::INFINITY, 0);
    let mut best_max = (f64::NEG_INFINITY, 0);
    for (k, m) in members.iter().enumerate() {
        let rho = spectral_radius(m)?.value;
        if rho < best_min.0 * (1.0 - TIE_TOL) || best_min.0.is_infinite() {
            best_min = (rho, k);
        }
        if rho > best_max.0 * (1.0 + TIE_TOL) || best_max.0.is_infinite() {
            best_max = (rho, k);
        }
    }
    Ok(RhoExtrema {
        rho_min: best_min.0,
        rho_min_witness: witness_id(set, best_min.1),
        rho_max: best_max.0,
        rho_max_witness: witness_id(set, best_max.1),
        members: members.len() as u64,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct GreedyExtremum {
    pub value: f64,
    pub rows: Vec<usize>,
    /// Number of row selections evaluated, including the final fixed point.
    pub selections: usize,
}

/// Extremal spectral radius of a positive IRU set by row-wise policy
/// iteration: take the Perron vector `v` of the current selection, replace
/// every row by the candidate with the largest (smallest) `<row, v>`, and
/// stop at a fixed point. At the fixed point `A v >= A' v` (resp. `<=`) for
/// every member `A'`, which bounds every member's spectral radius.
pub fn iru_greedy_extremum(set: &MatrixSet, direction: Direction) -> Result<GreedyExtremum> {
    let SetKind::Iru(row_sets) = set.kind() else {
        return Err(Error::InvalidArgument("greedy extremum needs an IRU set".into()));
    };
    if !set.is_square() {
        let (rows, cols) = set.dims();
        return Err(Error::NotSquare { rows, cols });
    }
    let mut choice = vec![0usize; row_sets.len()];
    for selections in 1..=GREEDY_BUDGET {
        let current = set.member(&MemberId::Rows(choice.clone())).expect("valid choice");
        let sr = spectral_radius(&current)?;
        let v = &sr.witness;
        let mut changed = false;
        for (c, rows) in choice.iter_mut().zip(row_sets) {
            let current_dot = crate::matrix::dot(&rows[*c], v);
            let mut best = (current_dot, *c);
            for (j, row) in rows.iter().enumerate() {
                let d = crate::matrix::dot(row, v);
                let better = match direction {
                    Direction::Max => d > best.0 && d > current_dot * (1.0 + TIE_TOL),
                    Direction::Min => d < best.0 && d < current_dot * (1.0 - TIE_TOL),
                };
                if better {
                    best = (d, j);
                }
            }
            if best.1 != *c {
                *c = best.1;
                changed = true;
            }
        }
        if !changed {
            return Ok(GreedyExtremum { value: sr.value, rows: choice, selections });
        }
    }
    Err(Error::NoConvergence(GREEDY_BUDGET))
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub depth: usize,
    pub norm: NormKind,
    pub products: u64,
    /// max over length-`depth` products of `rho(P)^(1/depth)`.
    pub jsr_lower: f64,
    pub jsr_lower_witness: Vec<usize>,
    /// max over length-`depth` products of `||P||^(1/depth)`.
    pub jsr_upper: f64,
    /// min over length-`depth` products of `rho(P)^(1/depth)`.
    pub lsr_upper: f64,
    pub lsr_upper_witness: Vec<usize>,
}

/// Brute-force joint / lower spectral radius bounds from every product of
/// exactly `depth` members.
pub fn product_bounds(set: &MatrixSet, depth: usize, norm: NormKind, budget: u64) -> Result<BoundReport> {
    if !set.is_square() {
        let (rows, cols) = set.dims();
        return Err(Error::NotSquare { rows, cols });
    }
    if depth == 0 {
        return Err(Error::InvalidArgument("product depth must be at least 1".into()));
    }
    let inv = 1.0 / depth as f64;
    let mut report = BoundReport {
        depth,
        norm,
        products: 0,
        jsr_lower: f64::NEG_INFINITY,
        jsr_lower_witness: Vec::new(),
        jsr_upper: 0.0,
        lsr_upper: f64::INFINITY,
        lsr_upper_witness: Vec::new(),
    };
    for (product, seq) in exhaustive_products(set, depth, budget)? {
        let rho = spectral_radius(&product)?.value.powf(inv);
        if rho > report.jsr_lower {
            report.jsr_lower = rho;
            report.jsr_lower_witness = seq.clone();
        }
        if rho < report.lsr_upper {
            report.lsr_upper = rho;
            report.lsr_upper_witness = seq;
        }
        report.jsr_upper = report.jsr_upper.max(product.norm(norm).powf(inv));
        report.products += 1;
    }
    // rho(P) <= ||P|| for all three norms; absorb rounding at equality.
    report.jsr_upper = report.jsr_upper.max(report.jsr_lower);
    Ok(report)
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum HsetStatus {
    /// IRU set, ordered chain, singleton, or a Minkowski polynomial of these.
    VerifiedFamily,
    /// No hourglass violation found among the sampled vectors.
    SampledPass { samples: usize },
    Falsified { x: Vec<f64>, member: usize, axiom: Axiom },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerdictBasis {
    /// Joint and lower spectral radii equal the member extrema.
    Finrel,
    /// Only member extrema are known; the verdicts are necessary conditions
    /// for stability and sufficient for instability.
    ExtremaOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExtremaMethod {
    Enumeration,
    IruGreedy,
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalysisReport {
    pub dims: (usize, usize),
    pub mode: crate::matset::Mode,
    pub cardinality: Cardinality,
    pub rho_max: f64,
    pub rho_max_witness: MemberId,
    pub rho_min: f64,
    pub rho_min_witness: MemberId,
    pub method: ExtremaMethod,
    /// Largest disagreement between greedy and enumerated extrema, when both ran.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub greedy_oracle_gap: Option<f64>,
    pub stable: bool,
    pub stabilizable: bool,
    pub hset_status: HsetStatus,
    pub verdict_basis: VerdictBasis,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_bounds: Option<BoundReport>,
}

#[derive(Debug, Clone)]
pub struct AnalyzeOptions {
    pub limit: u64,
    /// Use the IRU greedy search instead of enumeration where applicable.
    pub use_greedy: bool,
    pub oracle_depth: Option<usize>,
    pub norm: NormKind,
    pub samples: usize,
    pub seed: u64,
    pub budget: u64,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        Self {
            limit: DEFAULT_LIMIT,
            use_greedy: false,
            oracle_depth: None,
            norm: NormKind::Inf,
            samples: 1000,
            seed: 0,
            budget: DEFAULT_BUDGET,
        }
    }
}

/// Decides stability (`rho_max < 1`) and stabilizability (`rho_min < 1`).
pub fn analyze(set: &MatrixSet, opts: &AnalyzeOptions) -> Result<AnalysisReport> {
    if !set.is_square() {
        let (rows, cols) = set.dims();
        return Err(Error::NotSquare { rows, cols });
    }
    let is_iru = matches!(set.kind(), SetKind::Iru(_)) && set.mode() == crate::matset::Mode::Positive;
    let enumerable = set.cardinality().within(opts.limit);
    let greedy = if is_iru && (opts.use_greedy || !enumerable) {
        match (
            iru_greedy_extremum(set, Direction::Max),
            iru_greedy_extremum(set, Direction::Min),
        ) {
            (Ok(hi), Ok(lo)) => Some((hi, lo)),
            (Err(Error::NoConvergence(_)), _) | (_, Err(Error::NoConvergence(_))) => None,
            (Err(e), _) | (_, Err(e)) => return Err(e),
        }
    } else {
        None
    };

    let (extrema, method, gap) = match greedy {
        Some((hi, lo)) => {
            let gap = if enumerable && opts.oracle_depth.is_some() {
                let exact = rho_extrema(set, opts.limit)?;
                Some((exact.rho_max - hi.value).abs().max((exact.rho_min - lo.value).abs()))
            } else {
                None
            };
            let extrema = RhoExtrema {
                rho_min: lo.value,
                rho_min_witness: MemberId::Rows(lo.rows),
                rho_max: hi.value,
                rho_max_witness: MemberId::Rows(hi.rows),
                members: set.cardinality().exact().unwrap_or(u64::MAX),
            };
            (extrema, ExtremaMethod::IruGreedy, gap)
        }
        None => (rho_extrema(set, opts.limit)?, ExtremaMethod::Enumeration, None),
    };

    let hset_status = if set.is_h_family() {
        HsetStatus::VerifiedFamily
    } else {
        let ones = vec![1.0; set.dims().1];
        let verdict = check_hourglass(
            set,
            &HourglassOptions {
                samples: opts.samples,
                seed: opts.seed,
                forced: vec![ones],
                limit: opts.limit,
            },
        )?;
        match (verdict.status, verdict.witness) {
            (HourglassStatus::Fail, Some(w)) => HsetStatus::Falsified { x: w.x, member: w.member, axiom: w.axiom },
            _ => HsetStatus::SampledPass { samples: verdict.samples_tested },
        }
    };
    let verdict_basis = match hset_status {
        HsetStatus::VerifiedFamily => VerdictBasis::Finrel,
        _ => VerdictBasis::ExtremaOnly,
    };
    let oracle_bounds = match opts.oracle_depth {
        Some(depth) => Some(product_bounds(set, depth, opts.norm, opts.budget)?),
        None => None,
    };
    Ok(AnalysisReport {
        dims: set.dims(),
        mode: set.mode(),
        cardinality: set.cardinality(),
        stable: extrema.rho_max < 1.0,
        stabilizable: extrema.rho_min < 1.0,
        rho_max: extrema.rho_max,
        rho_max_witness: extrema.rho_max_witness,
        rho_min: extrema.rho_min,
        rho_min_witness: extrema.rho_min_witness,
        method,
        greedy_oracle_gap: gap,
        hset_status,
        verdict_basis,
        oracle_bounds,
    })
}
