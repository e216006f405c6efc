//! Minkowski arithmetic on matrix sets and compilation of series-parallel
//! block diagrams into Minkowski polynomial expressions.
//!
//! Expressions are evaluated exactly as written. Minkowski products do not
//! distribute over Minkowski sums (`A(B + C)` is generally smaller than
//! `AB + AC`), so no rewriting is ever applied.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::matset::{Cardinality, MatrixSet, DEFAULT_LIMIT};

fn pairwise<F>(s: &MatrixSet, t: &MatrixSet, limit: u64, op: F) -> Result<MatrixSet>
where
    F: Fn(&Matrix, &Matrix) -> Matrix,
{
    let left = s.members(limit)?;
    let right = t.members(limit)?;
    let pairs = Cardinality::product([left.len() as u64, right.len() as u64]);
    if !pairs.within(limit) {
        return Err(Error::CardinalityOverflow { cardinality: pairs, limit });
    }
    let mut seen = HashSet::with_capacity(left.len() * right.len());
    let mut out = Vec::new();
    for a in left.iter() {
        for b in right.iter() {
            let m = op(a, b);
            if seen.insert(m.bit_key()) {
                out.push(m);
            }
        }
    }
    Ok(MatrixSet::composed(
        out,
        s.mode().combine(t.mode()),
        s.is_h_family() && t.is_h_family(),
    ))
}

/// `S + T = {A + B : A in S, B in T}` with exact duplicates removed.
pub fn mink_add(s: &MatrixSet, t: &MatrixSet) -> Result<MatrixSet> {
    mink_add_limited(s, t, DEFAULT_LIMIT)
}

pub fn mink_add_limited(s: &MatrixSet, t: &MatrixSet, limit: u64) -> Result<MatrixSet> {
    if s.dims() != t.dims() {
        return Err(Error::DimMismatch {
            context: "Minkowski sum".into(),
            left: s.dims(),
            right: t.dims(),
        });
    }
    pairwise(s, t, limit, Matrix::add)
}

/// `S T = {A B : A in S, B in T}` with exact duplicates removed.
pub fn mink_mul(s: &MatrixSet, t: &MatrixSet) -> Result<MatrixSet> {
    mink_mul_limited(s, t, DEFAULT_LIMIT)
}

pub fn mink_mul_limited(s: &MatrixSet, t: &MatrixSet, limit: u64) -> Result<MatrixSet> {
    if s.dims().1 != t.dims().0 {
        return Err(Error::DimMismatch {
            context: "Minkowski product".into(),
            left: s.dims(),
            right: t.dims(),
        });
    }
    pairwise(s, t, limit, Matrix::mul)
}

/// `t S`, keeping the representation of `S`.
pub fn scale(t: f64, s: &MatrixSet) -> Result<MatrixSet> {
    s.scaled(t)
}

/// Minkowski polynomial over named block sets.
#[derive(Debug, Clone, PartialEq)]
pub enum CompositionExpr {
    Ref(String),
    Add(Box<CompositionExpr>, Box<CompositionExpr>),
    Mul(Box<CompositionExpr>, Box<CompositionExpr>),
    Scale(f64, Box<CompositionExpr>),
}

impl CompositionExpr {
    pub fn block(name: impl Into<String>) -> Self {
        CompositionExpr::Ref(name.into())
    }

    pub fn add(self, rhs: CompositionExpr) -> Self {
        CompositionExpr::Add(Box::new(self), Box::new(rhs))
    }

    pub fn mul(self, rhs: CompositionExpr) -> Self {
        CompositionExpr::Mul(Box::new(self), Box::new(rhs))
    }

    pub fn scaled(self, t: f64) -> Self {
        CompositionExpr::Scale(t, Box::new(self))
    }

    /// Names of referenced blocks, in first-appearance order.
    pub fn refs(&self) -> Vec<&str> {
        fn walk<'a>(e: &'a CompositionExpr, out: &mut Vec<&'a str>) {
            match e {
                CompositionExpr::Ref(n) => {
                    if !out.contains(&n.as_str()) {
                        out.push(n);
                    }
                }
                CompositionExpr::Add(l, r) | CompositionExpr::Mul(l, r) => {
                    walk(l, out);
                    walk(r, out);
                }
                CompositionExpr::Scale(_, c) => walk(c, out),
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out
    }

    /// Dimensions of the value, checking every sum and product is admissible.
    pub fn dims<F>(&self, lookup: &F) -> Result<(usize, usize)>
    where
        F: Fn(&str) -> Option<(usize, usize)>,
    {
        match self {
            CompositionExpr::Ref(n) => lookup(n).ok_or_else(|| Error::UnboundRef(n.clone())),
            CompositionExpr::Add(l, r) => {
                let (dl, dr) = (l.dims(lookup)?, r.dims(lookup)?);
                if dl != dr {
                    return Err(Error::DimMismatch {
                        context: format!("sum of `{l}` and `{r}`"),
                        left: dl,
                        right: dr,
                    });
                }
                Ok(dl)
            }
            CompositionExpr::Mul(l, r) => {
                let (dl, dr) = (l.dims(lookup)?, r.dims(lookup)?);
                if dl.1 != dr.0 {
                    return Err(Error::DimMismatch {
                        context: format!("product of `{l}` and `{r}`"),
                        left: dl,
                        right: dr,
                    });
                }
                Ok((dl.0, dr.1))
            }
            CompositionExpr::Scale(t, c) => {
                if !(*t > 0.0 && t.is_finite()) {
                    return Err(Error::NonPositiveScalar(*t));
                }
                c.dims(lookup)
            }
        }
    }

    fn fmt_factor(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CompositionExpr::Add(..) => write!(f, "({self})"),
            _ => write!(f, "{self}"),
        }
    }
}

impl fmt::Display for CompositionExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CompositionExpr::Ref(n) => f.write_str(n),
            CompositionExpr::Add(l, r) => match **r {
                CompositionExpr::Add(..) => write!(f, "{l} + ({r})"),
                _ => write!(f, "{l} + {r}"),
            },
            CompositionExpr::Mul(l, r) => {
                l.fmt_factor(f)?;
                match **r {
                    CompositionExpr::Mul(..) => write!(f, "({r})"),
                    _ => r.fmt_factor(f),
                }
            }
            CompositionExpr::Scale(t, c) => {
                write!(f, "{t}*")?;
                c.fmt_factor(f)
            }
        }
    }
}

/// Evaluates a Minkowski polynomial bottom-up against bound block sets.
/// Block references keep their representation; every sum or product is
/// materialized as an explicit set.
pub fn eval_poly(
    expr: &CompositionExpr,
    env: &BTreeMap<String, MatrixSet>,
    limit: u64,
) -> Result<MatrixSet> {
    expr.dims(&|n: &str| env.get(n).map(MatrixSet::dims))?;
    eval_checked(expr, env, limit)
}

fn eval_checked(
    expr: &CompositionExpr,
    env: &BTreeMap<String, MatrixSet>,
    limit: u64,
) -> Result<MatrixSet> {
    match expr {
        CompositionExpr::Ref(n) => env.get(n).cloned().ok_or_else(|| Error::UnboundRef(n.clone())),
        CompositionExpr::Add(l, r) => {
            mink_add_limited(&eval_checked(l, env, limit)?, &eval_checked(r, env, limit)?, limit)
        }
        CompositionExpr::Mul(l, r) => {
            mink_mul_limited(&eval_checked(l, env, limit)?, &eval_checked(r, env, limit)?, limit)
        }
        CompositionExpr::Scale(t, c) => eval_checked(c, env, limit)?.scaled(*t),
    }
}

/// Series-parallel block diagram. Each edge carries a block.
#[derive(Debug, Clone, PartialEq)]
pub enum SpGraph {
    Edge(String),
    /// Parts listed in signal order: the signal passes through the first
    /// part, then the second, and so on.
    Series(Vec<SpGraph>),
    Parallel(Vec<SpGraph>),
}

#[derive(Debug, Clone)]
pub struct BlockGraph {
    pub blocks: BTreeMap<String, MatrixSet>,
    pub root: SpGraph,
}

/// Compiles a block diagram to its transition-set expression. Parallel parts
/// become nested sums; in a series the downstream block multiplies from the
/// left, so `B1 -> B2 -> B3` becomes `B3 (B2 B1)`.
pub fn compile_graph(graph: &BlockGraph) -> Result<CompositionExpr> {
    compile(&graph.root, &|n: &str| graph.blocks.get(n).map(MatrixSet::dims))
}

pub fn compile<F>(graph: &SpGraph, lookup: &F) -> Result<CompositionExpr>
where
    F: Fn(&str) -> Option<(usize, usize)>,
{
    let expr = match graph {
        SpGraph::Edge(name) => {
            lookup(name).ok_or_else(|| Error::UnboundRef(name.clone()))?;
            CompositionExpr::block(name.as_str())
        }
        SpGraph::Series(parts) => {
            let mut parts = parts.iter();
            let first = parts
                .next()
                .ok_or_else(|| Error::MalformedGraph("empty series connection".into()))?;
            let mut acc = compile(first, lookup)?;
            let mut acc_dims = acc.dims(lookup)?;
            for part in parts {
                let next = compile(part, lookup)?;
                let next_dims = next.dims(lookup)?;
                if next_dims.1 != acc_dims.0 {
                    return Err(Error::DimMismatch {
                        context: format!("series connection of `{acc}` into `{next}`"),
                        left: acc_dims,
                        right: next_dims,
                    });
                }
                acc_dims = (next_dims.0, acc_dims.1);
                acc = next.mul(acc);
            }
            acc
        }
        SpGraph::Parallel(parts) => {
            let mut parts = parts.iter();
            let first = parts
                .next()
                .ok_or_else(|| Error::MalformedGraph("empty parallel connection".into()))?;
            let mut acc = compile(first, lookup)?;
            let acc_dims = acc.dims(lookup)?;
            for part in parts {
                let next = compile(part, lookup)?;
                let next_dims = next.dims(lookup)?;
                if next_dims != acc_dims {
                    return Err(Error::DimMismatch {
                        context: format!("parallel connection of `{acc}` and `{next}`"),
                        left: acc_dims,
                        right: next_dims,
                    });
                }
                acc = acc.add(next);
            }
            acc
        }
    };
    Ok(expr)
}
