//! System description files.
//!
//! A system is a TOML document with a format version, named blocks and
//! either an algebraic composition or a series-parallel graph:
//!
//! ```toml
//! version = 1
//!
//! [blocks.A1]
//! kind = "iru"              # explicit | iru | ordered
//! mode = "positive"         # positive | nonnegative, default positive
//! rows = [[[1.0, 2.0], [2.0, 1.0]], [[0.5, 0.5]]]
//!
//! [blocks.A2]
//! kind = "explicit"
//! matrices = [[[1.0, 0.0], [0.0, 1.0]]]
//!
//! [composition]
//! op = "add"                # add | mul | scale | ref
//! args = ["A1", { op = "scale", by = 0.5, args = ["A2"] }]
//! ```
//!
//! A bare string is shorthand for `{ op = "ref", name = "..." }`. `add` and
//! `mul` take two or more arguments and nest to the left. Instead of
//! `[composition]` a `[graph]` table may describe the block diagram with
//! `series = [...]`, `parallel = [...]` or `edge = "NAME"` nodes, where a
//! bare string again names an edge. A file with a single block may omit
//! both.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::algebra::{compile, eval_poly, CompositionExpr, SpGraph};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::matset::{MatrixSet, Mode};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BlockKind {
    Explicit,
    Iru,
    Ordered,
}

fn default_mode() -> Mode {
    Mode::Positive
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockSpec {
    pub kind: BlockKind,
    #[serde(default = "default_mode")]
    pub mode: Mode,
    /// Members of an explicit set or an ordered chain.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrices: Option<Vec<Vec<Vec<f64>>>>,
    /// Candidate rows per matrix row, for IRU sets.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rows: Option<Vec<Vec<Vec<f64>>>>,
}

impl BlockSpec {
    pub fn build(&self) -> Result<MatrixSet> {
        let matrices = |field: &Option<Vec<Vec<Vec<f64>>>>| -> Result<Vec<Matrix>> {
            field
                .as_ref()
                .ok_or_else(|| Error::InvalidArgument("missing `matrices`".into()))?
                .iter()
                .map(|m| Matrix::from_rows(m))
                .collect()
        };
        match self.kind {
            BlockKind::Explicit | BlockKind::Ordered if self.rows.is_some() => {
                Err(Error::InvalidArgument("`rows` only applies to iru blocks".into()))
            }
            BlockKind::Iru if self.matrices.is_some() => {
                Err(Error::InvalidArgument("iru blocks take `rows`, not `matrices`".into()))
            }
            BlockKind::Explicit => MatrixSet::explicit(matrices(&self.matrices)?, self.mode),
            BlockKind::Ordered => MatrixSet::ordered(matrices(&self.matrices)?, self.mode),
            BlockKind::Iru => MatrixSet::iru(
                self.rows.clone().ok_or_else(|| Error::InvalidArgument("missing `rows`".into()))?,
                self.mode,
            ),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Op {
    Ref,
    Add,
    Mul,
    Scale,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum ExprSpec {
    Ref(String),
    Node(ExprNode),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExprNode {
    op: Op,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    by: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    args: Vec<ExprSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum GraphSpec {
    Edge(String),
    Node(GraphNode),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphNode {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    edge: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    series: Option<Vec<GraphSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    parallel: Option<Vec<GraphSpec>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSystem {
    version: toml::Spanned<u32>,
    #[serde(default)]
    blocks: BTreeMap<String, toml::Spanned<BlockSpec>>,
    composition: Option<toml::Spanned<ExprSpec>>,
    graph: Option<toml::Spanned<GraphSpec>>,
}

#[derive(Serialize)]
struct CanonicalSystem<'a> {
    version: u32,
    blocks: &'a BTreeMap<String, BlockSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    composition: Option<ExprSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    graph: Option<GraphSpec>,
}

/// How the blocks are connected.
#[derive(Debug, Clone, PartialEq)]
pub enum Structure {
    Composition(CompositionExpr),
    Graph(SpGraph),
}

/// A validated system file.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemDescription {
    pub blocks: BTreeMap<String, BlockSpec>,
    pub structure: Structure,
    sets: BTreeMap<String, MatrixSet>,
    expr: CompositionExpr,
}

impl SystemDescription {
    pub fn sets(&self) -> &BTreeMap<String, MatrixSet> {
        &self.sets
    }

    /// The transition-set expression; graphs are compiled.
    pub fn expr(&self) -> &CompositionExpr {
        &self.expr
    }

    /// Evaluates the composition into a single matrix set.
    pub fn evaluate(&self, limit: u64) -> Result<MatrixSet> {
        eval_poly(&self.expr, &self.sets, limit)
    }

    /// Canonical TOML: blocks sorted by name, binary operator nodes, bare
    /// strings for references and edges.
    pub fn to_toml_string(&self) -> String {
        let (composition, graph) = match &self.structure {
            Structure::Composition(e) => (Some(expr_to_spec(e)), None),
            Structure::Graph(g) => (None, Some(graph_to_spec(g))),
        };
        let doc = CanonicalSystem { version: FORMAT_VERSION, blocks: &self.blocks, composition, graph };
        toml::to_string(&doc).expect("system descriptions always serialize")
    }
}

pub fn parse_system(path: impl AsRef<Path>) -> Result<SystemDescription> {
    let src = std::fs::read_to_string(path)?;
    parse_system_str(&src)
}

pub fn parse_system_str(src: &str) -> Result<SystemDescription> {
    let raw: RawSystem = toml::from_str(src).map_err(|e| {
        let (line, column) = e.span().map_or((1, 1), |s| line_col(src, s.start));
        Error::Parse { line, column, message: e.message().trim().to_string() }
    })?;
    if *raw.version.get_ref() != FORMAT_VERSION {
        let (line, column) = line_col(src, raw.version.span().start);
        return Err(Error::Parse {
            line,
            column,
            message: format!("unsupported format version {} (expected {FORMAT_VERSION})", raw.version.get_ref()),
        });
    }
    if raw.blocks.is_empty() {
        return Err(Error::Parse { line: 1, column: 1, message: "no blocks declared".into() });
    }

    let mut blocks = BTreeMap::new();
    let mut sets = BTreeMap::new();
    for (name, spec) in raw.blocks {
        let (line, _) = line_col(src, spec.span().start);
        let spec = spec.into_inner();
        let set = spec
            .build()
            .map_err(|e| Error::Validation { block: name.clone(), reason: format!("{e} (line {line})") })?;
        sets.insert(name.clone(), set);
        blocks.insert(name, spec);
    }

    let at = |span: std::ops::Range<usize>| line_col(src, span.start).0;
    let (structure, line) = match (raw.composition, raw.graph) {
        (Some(_), Some(_)) => {
            return Err(Error::Validation {
                block: "composition".into(),
                reason: "give either a composition or a graph, not both".into(),
            })
        }
        (Some(c), None) => {
            let line = at(c.span());
            (Structure::Composition(spec_to_expr(c.get_ref()).map_err(|r| structural(line, r))?), line)
        }
        (None, Some(g)) => {
            let line = at(g.span());
            (Structure::Graph(spec_to_graph(g.get_ref()).map_err(|r| structural(line, r))?), line)
        }
        (None, None) if blocks.len() == 1 => {
            let name = blocks.keys().next().expect("one block").clone();
            (Structure::Composition(CompositionExpr::block(name)), 1)
        }
        (None, None) => {
            return Err(Error::Validation {
                block: "composition".into(),
                reason: "several blocks but no composition or graph".into(),
            })
        }
    };

    let lookup = |n: &str| sets.get(n).map(MatrixSet::dims);
    let expr = match &structure {
        Structure::Composition(e) => e.dims(&lookup).map(|_| e.clone()),
        Structure::Graph(g) => compile(g, &lookup),
    }
    .map_err(|e| match e {
        Error::UnboundRef(name) => Error::Validation {
            block: name,
            reason: format!("referenced on line {line} but not declared"),
        },
        Error::DimMismatch { context, left, right } => Error::Validation {
            block: context,
            reason: format!("dimensions {left:?} and {right:?} do not connect (line {line})"),
        },
        other => structural(line, other.to_string()),
    })?;
    Ok(SystemDescription { blocks, structure, sets, expr })
}

fn structural(line: usize, reason: String) -> Error {
    Error::Validation { block: "composition".into(), reason: format!("{reason} (line {line})") }
}

/// 1-based line and column of a byte offset.
fn line_col(src: &str, offset: usize) -> (usize, usize) {
    let before = &src[..offset.min(src.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

fn spec_to_expr(spec: &ExprSpec) -> std::result::Result<CompositionExpr, String> {
    let node = match spec {
        ExprSpec::Ref(name) => return Ok(CompositionExpr::block(name.as_str())),
        ExprSpec::Node(node) => node,
    };
    let stray = |field: &str| Err(format!("`{field}` is not allowed on a `{:?}` node", node.op).to_lowercase());
    match node.op {
        Op::Ref => {
            if node.by.is_some() {
                return stray("by");
            }
            if !node.args.is_empty() {
                return stray("args");
            }
            node.name.as_deref().map(CompositionExpr::block).ok_or_else(|| "ref needs a `name`".into())
        }
        Op::Add | Op::Mul => {
            if node.by.is_some() {
                return stray("by");
            }
            if node.name.is_some() {
                return stray("name");
            }
            if node.args.len() < 2 {
                return Err(format!("`{:?}` needs at least two args", node.op).to_lowercase());
            }
            let mut args = node.args.iter().map(spec_to_expr);
            let first = args.next().expect("two args")?;
            args.try_fold(first, |acc, next| {
                let next = next?;
                Ok(if node.op == Op::Add { acc.add(next) } else { acc.mul(next) })
            })
        }
        Op::Scale => {
            if node.name.is_some() {
                return stray("name");
            }
            let by = node.by.ok_or("scale needs a `by` factor")?;
            match node.args.as_slice() {
                [arg] => Ok(spec_to_expr(arg)?.scaled(by)),
                _ => Err("scale takes exactly one arg".into()),
            }
        }
    }
}

fn expr_to_spec(expr: &CompositionExpr) -> ExprSpec {
    let node = |op, args, by| ExprSpec::Node(ExprNode { op, name: None, by, args });
    match expr {
        CompositionExpr::Ref(name) => ExprSpec::Ref(name.clone()),
        CompositionExpr::Add(l, r) => node(Op::Add, vec![expr_to_spec(l), expr_to_spec(r)], None),
        CompositionExpr::Mul(l, r) => node(Op::Mul, vec![expr_to_spec(l), expr_to_spec(r)], None),
        CompositionExpr::Scale(t, e) => node(Op::Scale, vec![expr_to_spec(e)], Some(*t)),
    }
}

fn spec_to_graph(spec: &GraphSpec) -> std::result::Result<SpGraph, String> {
    match spec {
        GraphSpec::Edge(name) => Ok(SpGraph::Edge(name.clone())),
        GraphSpec::Node(GraphNode { edge: Some(e), series: None, parallel: None }) => Ok(SpGraph::Edge(e.clone())),
        GraphSpec::Node(GraphNode { edge: None, series: Some(parts), parallel: None }) => {
            Ok(SpGraph::Series(parts.iter().map(spec_to_graph).collect::<std::result::Result<_, _>>()?))
        }
        GraphSpec::Node(GraphNode { edge: None, series: None, parallel: Some(parts) }) => {
            Ok(SpGraph::Parallel(parts.iter().map(spec_to_graph).collect::<std::result::Result<_, _>>()?))
        }
        GraphSpec::Node(_) => Err("graph nodes need exactly one of `edge`, `series`, `parallel`".into()),
    }
}

fn graph_to_spec(graph: &SpGraph) -> GraphSpec {
    let node = |series, parallel| GraphSpec::Node(GraphNode { edge: None, series, parallel });
    match graph {
        SpGraph::Edge(name) => GraphSpec::Edge(name.clone()),
        SpGraph::Series(parts) => node(Some(parts.iter().map(graph_to_spec).collect()), None),
        SpGraph::Parallel(parts) => node(None, Some(parts.iter().map(graph_to_spec).collect())),
    }
}
