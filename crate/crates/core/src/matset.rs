//! Matrix sets: explicit lists, sets with independent row uncertainty (IRU)
//! and element-wise linearly ordered chains.
//!
//! Every constructor validates the sign mode of the whole set, so no
//! [`MatrixSet`] ever holds an entry that violates its [`Mode`].

use std::borrow::Cow;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{EntryLocation, Error, Result};
use crate::matrix::Matrix;

/// Default cap on the number of matrices materialized by enumeration.
pub const DEFAULT_LIMIT: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Every entry strictly positive.
    Positive,
    /// Every entry non-negative.
    #[serde(alias = "non-negative")]
    Nonnegative,
}

impl Mode {
    #[inline]
    pub fn admits(self, v: f64) -> bool {
        match self {
            Mode::Positive => v > 0.0,
            Mode::Nonnegative => v >= 0.0,
        }
    }

    /// Mode of a sum or product of members drawn from sets in modes `self`
    /// and `other`.
    pub fn combine(self, other: Mode) -> Mode {
        if self == Mode::Positive && other == Mode::Positive {
            Mode::Positive
        } else {
            Mode::Nonnegative
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Positive => "positive",
            Mode::Nonnegative => "non-negative",
        })
    }
}

/// Number of members of a set, saturating into `Overflow` past `u64`.
/// Serializes as a plain integer, or the string `">2^64"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cardinality {
    Exact(u64),
    Overflow,
}

impl Cardinality {
    pub fn product<I: IntoIterator<Item = u64>>(factors: I) -> Self {
        factors
            .into_iter()
            .try_fold(1u64, |acc, k| acc.checked_mul(k))
            .map_or(Cardinality::Overflow, Cardinality::Exact)
    }

    pub fn pow(base: u64, exp: usize) -> Self {
        Self::product(std::iter::repeat_n(base, exp))
    }

    pub fn within(self, limit: u64) -> bool {
        matches!(self, Cardinality::Exact(k) if k <= limit)
    }

    pub fn exact(self) -> Option<u64> {
        match self {
            Cardinality::Exact(k) => Some(k),
            Cardinality::Overflow => None,
        }
    }
}

impl Serialize for Cardinality {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Cardinality::Exact(k) => s.serialize_u64(*k),
            Cardinality::Overflow => s.serialize_str(">2^64"),
        }
    }
}

impl fmt::Display for Cardinality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cardinality::Exact(k) => write!(f, "{k}"),
            Cardinality::Overflow => f.write_str(">2^64"),
        }
    }
}

/// Identifies a member of a set. IRU members selected without enumeration
/// carry their row choices; everything else uses the enumeration index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MemberId {
    Index(usize),
    Rows(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum SetKind {
    Explicit(Vec<Matrix>),
    /// One row set per matrix row; each row set is a non-empty list of rows.
    Iru(Vec<Vec<Vec<f64>>>),
    /// Chain `A_1 <= A_2 <= ... <= A_n`, strict in positive mode.
    Ordered(Vec<Matrix>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatrixSet {
    kind: SetKind,
    mode: Mode,
    dims: (usize, usize),
    h_family: bool,
}

fn check_mode(m: &Matrix, member: usize, mode: Mode) -> Result<()> {
    for i in 0..m.rows() {
        for (j, &v) in m.row(i).iter().enumerate() {
            if !mode.admits(v) {
                return Err(Error::ModeViolation {
                    mode,
                    at: EntryLocation { member, row: i, col: j },
                    value: v,
                });
            }
        }
    }
    Ok(())
}

fn check_uniform_dims(matrices: &[Matrix]) -> Result<(usize, usize)> {
    let first = matrices.first().ok_or(Error::EmptySet)?;
    let dims = first.dims();
    for (k, m) in matrices.iter().enumerate().skip(1) {
        if m.dims() != dims {
            return Err(Error::DimMismatch {
                context: format!("member {k}"),
                left: dims,
                right: m.dims(),
            });
        }
    }
    Ok(dims)
}

impl MatrixSet {
    pub fn explicit(matrices: Vec<Matrix>, mode: Mode) -> Result<Self> {
        let dims = check_uniform_dims(&matrices)?;
        for (k, m) in matrices.iter().enumerate() {
            check_mode(m, k, mode)?;
        }
        // A singleton is a chain of length one.
        let h_family = matrices.len() == 1;
        Ok(Self {
            kind: SetKind::Explicit(matrices),
            mode,
            dims,
            h_family,
        })
    }

    pub fn iru(row_sets: Vec<Vec<Vec<f64>>>, mode: Mode) -> Result<Self> {
        if row_sets.is_empty() {
            return Err(Error::EmptySet);
        }
        let mut width = None;
        for (s, set) in row_sets.iter().enumerate() {
            if set.is_empty() {
                return Err(Error::EmptyRowSet(s));
            }
            for (r, row) in set.iter().enumerate() {
                let expected = *width.get_or_insert(row.len());
                if row.len() != expected || row.is_empty() {
                    return Err(Error::RaggedRows {
                        row_set: s,
                        row: r,
                        len: row.len(),
                        expected: expected.max(1),
                    });
                }
                for (j, &v) in row.iter().enumerate() {
                    let at = EntryLocation { member: s, row: r, col: j };
                    if !v.is_finite() {
                        return Err(Error::NonFinite { at });
                    }
                    if !mode.admits(v) {
                        return Err(Error::ModeViolation { mode, at, value: v });
                    }
                }
            }
        }
        let dims = (row_sets.len(), width.unwrap_or(0));
        Ok(Self {
            kind: SetKind::Iru(row_sets),
            mode,
            dims,
            h_family: true,
        })
    }

    pub fn ordered(matrices: Vec<Matrix>, mode: Mode) -> Result<Self> {
        let dims = check_uniform_dims(&matrices)?;
        for (k, m) in matrices.iter().enumerate() {
            check_mode(m, k, mode)?;
        }
        for (k, pair) in matrices.windows(2).enumerate() {
            let (lo, hi) = (&pair[0], &pair[1]);
            for i in 0..dims.0 {
                for j in 0..dims.1 {
                    let (a, b) = (lo.get(i, j), hi.get(i, j));
                    let ok = match mode {
                        Mode::Positive => a < b,
                        Mode::Nonnegative => a <= b,
                    };
                    if !ok {
                        return Err(Error::ChainViolation {
                            lower: k,
                            upper: k + 1,
                            row: i,
                            col: j,
                        });
                    }
                }
            }
        }
        Ok(Self {
            kind: SetKind::Ordered(matrices),
            mode,
            dims,
            h_family: true,
        })
    }

    /// Explicit set produced by Minkowski operations on members of H-family
    /// operands; keeps the family flag of its inputs.
    pub(crate) fn composed(matrices: Vec<Matrix>, mode: Mode, h_family: bool) -> Self {
        let dims = matrices[0].dims();
        Self {
            kind: SetKind::Explicit(matrices),
            mode,
            dims,
            h_family,
        }
    }

    pub(crate) fn with_kind(&self, kind: SetKind) -> Self {
        Self {
            kind,
            mode: self.mode,
            dims: self.dims,
            h_family: self.h_family,
        }
    }

    pub fn kind(&self) -> &SetKind {
        &self.kind
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn dims(&self) -> (usize, usize) {
        self.dims
    }

    pub fn is_square(&self) -> bool {
        self.dims.0 == self.dims.1
    }

    /// True when the set is an IRU set, an ordered chain, a singleton, or a
    /// Minkowski polynomial of such sets. For these the extremal spectral
    /// radii decide stability and stabilizability.
    pub fn is_h_family(&self) -> bool {
        self.h_family
    }

    pub fn variant_name(&self) -> &'static str {
        match self.kind {
            SetKind::Explicit(_) => "explicit",
            SetKind::Iru(_) => "iru",
            SetKind::Ordered(_) => "ordered",
        }
    }

    pub fn cardinality(&self) -> Cardinality {
        match &self.kind {
            SetKind::Explicit(ms) | SetKind::Ordered(ms) => Cardinality::Exact(ms.len() as u64),
            SetKind::Iru(sets) => Cardinality::product(sets.iter().map(|s| s.len() as u64)),
        }
    }

    fn ensure_within(&self, limit: u64) -> Result<usize> {
        let cardinality = self.cardinality();
        match cardinality {
            Cardinality::Exact(k) if k <= limit => Ok(k as usize),
            _ => Err(Error::CardinalityOverflow { cardinality, limit }),
        }
    }

    /// All members. IRU sets are expanded in lexicographic row-choice order
    /// (the first row varies slowest).
    pub fn enumerate(&self, limit: u64) -> Result<Vec<Matrix>> {
        Ok(self.members(limit)?.into_owned())
    }

    pub(crate) fn members(&self, limit: u64) -> Result<Cow<'_, [Matrix]>> {
        let count = self.ensure_within(limit)?;
        match &self.kind {
            SetKind::Explicit(ms) | SetKind::Ordered(ms) => Ok(Cow::Borrowed(ms)),
            SetKind::Iru(sets) => {
                let mut out = Vec::with_capacity(count);
                let mut choice = vec![0usize; sets.len()];
                loop {
                    out.push(self.iru_member(sets, &choice));
                    // odometer, last row fastest
                    let mut i = sets.len();
                    loop {
                        if i == 0 {
                            return Ok(Cow::Owned(out));
                        }
                        i -= 1;
                        choice[i] += 1;
                        if choice[i] < sets[i].len() {
                            break;
                        }
                        choice[i] = 0;
                    }
                }
            }
        }
    }

    fn iru_member(&self, sets: &[Vec<Vec<f64>>], choice: &[usize]) -> Matrix {
        let data = sets
            .iter()
            .zip(choice)
            .flat_map(|(s, &c)| s[c].iter().copied())
            .collect();
        Matrix::from_raw(self.dims.0, self.dims.1, data)
    }

    /// Row choices of the IRU member at enumeration position `index`.
    pub fn iru_choice(&self, mut index: u64) -> Option<Vec<usize>> {
        let SetKind::Iru(sets) = &self.kind else {
            return None;
        };
        let mut choice = vec![0; sets.len()];
        for (c, s) in choice.iter_mut().zip(sets).rev() {
            *c = (index % s.len() as u64) as usize;
            index /= s.len() as u64;
        }
        (index == 0).then_some(choice)
    }

    /// Enumeration position of a member id, if it fits in `u64`.
    pub fn member_index(&self, id: &MemberId) -> Option<u64> {
        match (id, &self.kind) {
            (MemberId::Index(i), _) => Some(*i as u64),
            (MemberId::Rows(choice), SetKind::Iru(sets)) => {
                choice.iter().zip(sets).try_fold(0u64, |acc, (&c, s)| {
                    acc.checked_mul(s.len() as u64)?.checked_add(c as u64)
                })
            }
            _ => None,
        }
    }

    /// Materializes a single member without enumerating the set.
    pub fn member(&self, id: &MemberId) -> Option<Matrix> {
        match (&self.kind, id) {
            (SetKind::Explicit(ms) | SetKind::Ordered(ms), MemberId::Index(i)) => ms.get(*i).cloned(),
            (SetKind::Iru(sets), MemberId::Rows(choice)) => {
                if choice.len() != sets.len() || choice.iter().zip(sets).any(|(&c, s)| c >= s.len()) {
                    return None;
                }
                Some(self.iru_member(sets, choice))
            }
            (SetKind::Iru(_), MemberId::Index(i)) => {
                let choice = self.iru_choice(*i as u64)?;
                self.member(&MemberId::Rows(choice))
            }
            _ => None,
        }
    }

    /// Multiplies every entry by `t`, keeping the representation.
    pub fn scaled(&self, t: f64) -> Result<Self> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::NonPositiveScalar(t));
        }
        let kind = match &self.kind {
            SetKind::Explicit(ms) => SetKind::Explicit(ms.iter().map(|m| m.scale(t)).collect()),
            SetKind::Ordered(ms) => SetKind::Ordered(ms.iter().map(|m| m.scale(t)).collect()),
            SetKind::Iru(sets) => SetKind::Iru(
                sets.iter()
                    .map(|s| s.iter().map(|r| r.iter().map(|v| v * t).collect()).collect())
                    .collect(),
            ),
        };
        // Underflow to zero would break positivity.
        let out = self.with_kind(kind);
        if out.mode == Mode::Positive {
            out.validate_mode()?;
        }
        Ok(out)
    }

    fn validate_mode(&self) -> Result<()> {
        match &self.kind {
            SetKind::Explicit(ms) | SetKind::Ordered(ms) => {
                for (k, m) in ms.iter().enumerate() {
                    check_mode(m, k, self.mode)?;
                }
            }
            SetKind::Iru(sets) => {
                for (s, set) in sets.iter().enumerate() {
                    for (r, row) in set.iter().enumerate() {
                        if let Some((j, &v)) = row.iter().enumerate().find(|(_, v)| !self.mode.admits(**v)) {
                            return Err(Error::ModeViolation {
                                mode: self.mode,
                                at: EntryLocation { member: s, row: r, col: j },
                                value: v,
                            });
                        }
                    }
                }
            }
        }
        Ok(())
    }
}
