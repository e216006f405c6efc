//! Dominant-member selection and sampled checks of the hourglass alternative.
//!
//! For `x > 0` a dominant maximizer is a member `A*` with `A x <= A* x` for
//! every member `A`. IRU sets and ordered chains always have one and it is
//! found without enumeration; for explicit sets the only possible candidate
//! is the maximizer of `sum_i (A x)_i`, which is then verified against every
//! member.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{dot, Matrix};
use crate::matset::{MatrixSet, MemberId, SetKind, DEFAULT_LIMIT};
use crate::Direction;

/// Relative tolerance of all vector comparisons in this module.
pub const DOMINANCE_TOL: f64 = 1e-9;

#[inline]
fn approx_le(a: f64, b: f64) -> bool {
    a <= b + DOMINANCE_TOL * a.abs().max(b.abs())
}

#[inline]
fn strictly_less(a: f64, b: f64) -> bool {
    !approx_le(b, a)
}

fn vec_le(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(&x, &y)| approx_le(x, y))
}

fn vec_differs_below(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).any(|(&x, &y)| strictly_less(x, y))
}

/// Slack of the dominance inequality. Positive entries mean strict
/// dominance; all entries are `>= -tol` for a valid certificate.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Margins {
    /// `[member][coordinate]`, for explicit sets and chains.
    PerMember(Vec<Vec<f64>>),
    /// `[row set][candidate row]` dot-product slack, for IRU sets. Member
    /// margins are sums of these row slacks coordinate by coordinate.
    PerRow(Vec<Vec<f64>>),
}

impl Margins {
    pub fn min(&self) -> f64 {
        let (Margins::PerMember(v) | Margins::PerRow(v)) = self;
        v.iter().flatten().copied().fold(f64::INFINITY, f64::min)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DominanceCertificate {
    pub member: MemberId,
    pub x: Vec<f64>,
    pub direction: Direction,
    pub image: Vec<f64>,
    pub margins: Margins,
}

pub(crate) fn check_positive(x: &[f64]) -> Result<()> {
    match x.iter().position(|&v| !(v > 0.0 && v.is_finite())) {
        Some(index) => Err(Error::NonPositiveVector { index, value: x[index] }),
        None => Ok(()),
    }
}

pub fn dominant_max(set: &MatrixSet, x: &[f64]) -> Result<DominanceCertificate> {
    dominant(set, x, Direction::Max)
}

pub fn dominant_min(set: &MatrixSet, x: &[f64]) -> Result<DominanceCertificate> {
    dominant(set, x, Direction::Min)
}

/// Member whose image of `x` dominates (max) or is dominated by (min) every
/// other image. Ties resolve to the lowest index.
pub fn dominant(set: &MatrixSet, x: &[f64], direction: Direction) -> Result<DominanceCertificate> {
    check_positive(x)?;
    if x.len() != set.dims().1 {
        return Err(Error::DimMismatch {
            context: "vector length".into(),
            left: set.dims(),
            right: (x.len(), 1),
        });
    }
    match set.kind() {
        SetKind::Iru(row_sets) => Ok(dominant_iru(row_sets, x, direction)),
        SetKind::Ordered(chain) => {
            let pick = match direction {
                Direction::Max => chain.len() - 1,
                Direction::Min => 0,
            };
            Ok(certify(chain, pick, x, direction))
        }
        SetKind::Explicit(members) => {
            let images: Vec<Vec<f64>> = members.iter().map(|m| m.mul_vec(x)).collect();
            let mut pick = 0;
            let mut best = images[0].iter().sum::<f64>();
            for (k, img) in images.iter().enumerate().skip(1) {
                let s = img.iter().sum::<f64>();
                let better = match direction {
                    Direction::Max => s > best,
                    Direction::Min => s < best,
                };
                if better {
                    pick = k;
                    best = s;
                }
            }
            let cert = certify(members, pick, x, direction);
            if let Margins::PerMember(rows) = &cert.margins {
                for (k, slack) in rows.iter().enumerate() {
                    let dominated = match direction {
                        Direction::Max => vec_le(&images[k], &images[pick]),
                        Direction::Min => vec_le(&images[pick], &images[k]),
                    };
                    if !dominated {
                        debug_assert!(slack.iter().any(|&s| s < 0.0));
                        return Err(Error::NoDominantMatrix {
                            x: x.to_vec(),
                            candidate: pick,
                            offender: k,
                            step: None,
                        });
                    }
                }
            }
            Ok(cert)
        }
    }
}

fn certify(members: &[Matrix], pick: usize, x: &[f64], direction: Direction) -> DominanceCertificate {
    let image = members[pick].mul_vec(x);
    let margins = members
        .iter()
        .map(|m| {
            m.mul_vec(x)
                .iter()
                .zip(&image)
                .map(|(a, best)| match direction {
                    Direction::Max => best - a,
                    Direction::Min => a - best,
                })
                .collect()
        })
        .collect();
    DominanceCertificate {
        member: MemberId::Index(pick),
        x: x.to_vec(),
        direction,
        image,
        margins: Margins::PerMember(margins),
    }
}

fn dominant_iru(row_sets: &[Vec<Vec<f64>>], x: &[f64], direction: Direction) -> DominanceCertificate {
    let mut choice = Vec::with_capacity(row_sets.len());
    let mut image = Vec::with_capacity(row_sets.len());
    let mut margins = Vec::with_capacity(row_sets.len());
    for rows in row_sets {
        let dots: Vec<f64> = rows.iter().map(|r| dot(r, x)).collect();
        let mut pick = 0;
        for (j, &d) in dots.iter().enumerate().skip(1) {
            let better = match direction {
                Direction::Max => d > dots[pick],
                Direction::Min => d < dots[pick],
            };
            if better {
                pick = j;
            }
        }
        let best = dots[pick];
        margins.push(
            dots.iter()
                .map(|d| match direction {
                    Direction::Max => best - d,
                    Direction::Min => d - best,
                })
                .collect(),
        );
        choice.push(pick);
        image.push(best);
    }
    DominanceCertificate {
        member: MemberId::Rows(choice),
        x: x.to_vec(),
        direction,
        image,
        margins: Margins::PerRow(margins),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Axiom {
    H1,
    H2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum HourglassStatus {
    /// No violation among the tested vectors. Evidence, not a proof.
    Pass,
    Fail,
}

#[derive(Debug, Clone, Serialize)]
pub struct HourglassWitness {
    pub x: Vec<f64>,
    /// Enumeration index of the member whose image breaks the axiom.
    pub member: usize,
    pub axiom: Axiom,
}

#[derive(Debug, Clone, Serialize)]
pub struct HourglassVerdict {
    pub status: HourglassStatus,
    pub samples_tested: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<HourglassWitness>,
}

#[derive(Debug, Clone)]
pub struct HourglassOptions {
    /// Number of random vectors, drawn after the forced ones.
    pub samples: usize,
    pub seed: u64,
    /// Vectors tested first, in order.
    pub forced: Vec<Vec<f64>>,
    pub limit: u64,
}

impl Default for HourglassOptions {
    fn default() -> Self {
        Self { samples: 1000, seed: 0, forced: Vec::new(), limit: DEFAULT_LIMIT }
    }
}

/// Vectors with coordinates drawn log-uniformly from `[1e-2, 1e2]`.
pub fn sample_vectors(dim: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| (0..dim).map(|_| 10f64.powf(rng.gen_range(-2.0..=2.0))).collect())
        .collect()
}

/// Searches for a vector `x > 0` and member `B` violating H1 or H2:
///
/// * H1: every image `A x` is `>= B x`, or some image is `<= B x` and differs
///   from it;
/// * H2: the mirror statement.
pub fn check_hourglass(set: &MatrixSet, opts: &HourglassOptions) -> Result<HourglassVerdict> {
    let members = set.members(opts.limit)?;
    let dim = set.dims().1;
    for x in &opts.forced {
        check_positive(x)?;
        if x.len() != dim {
            return Err(Error::DimMismatch {
                context: "forced hourglass sample".into(),
                left: set.dims(),
                right: (x.len(), 1),
            });
        }
    }
    let random = sample_vectors(dim, opts.samples, opts.seed);
    let mut tested = 0;
    for x in opts.forced.iter().chain(&random) {
        tested += 1;
        let images: Vec<Vec<f64>> = members.iter().map(|m| m.mul_vec(x)).collect();
        if let Some((member, axiom)) = find_violation(&images) {
            return Ok(HourglassVerdict {
                status: HourglassStatus::Fail,
                samples_tested: tested,
                witness: Some(HourglassWitness { x: x.clone(), member, axiom }),
            });
        }
    }
    Ok(HourglassVerdict { status: HourglassStatus::Pass, samples_tested: tested, witness: None })
}

fn find_violation(images: &[Vec<f64>]) -> Option<(usize, Axiom)> {
    for (k, pivot) in images.iter().enumerate() {
        let all_above = images.iter().all(|img| vec_le(pivot, img));
        let some_below = images
            .iter()
            .any(|img| vec_le(img, pivot) && vec_differs_below(img, pivot));
        if !(all_above || some_below) {
            return Some((k, Axiom::H1));
        }
        let all_below = images.iter().all(|img| vec_le(img, pivot));
        let some_above = images
            .iter()
            .any(|img| vec_le(pivot, img) && vec_differs_below(pivot, img));
        if !(all_below || some_above) {
            return Some((k, Axiom::H2));
        }
    }
    None
}
