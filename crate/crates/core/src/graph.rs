//! Compatibility graphs whose cliques are exactly the DNA codes, plus DIMACS
//! interchange.
//!
//! Vertices are admissible words in canonical order; two vertices are joined
//! when the pair may coexist in a code. For [`GraphKind::GcRc`] that means
//! both `hamming(σ, τ) ≥ d` and `hamming(σ, RC(τ)) ≥ d`, and vertices must
//! themselves satisfy `hamming(σ, RC(σ)) ≥ d`. [`GraphKind::GcOnly`] keeps
//! only the plain distance condition.

use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::code::CodeParams;
use crate::error::{Error, Result};
use crate::seq::{constant_gc_count, enumerate_constant_gc, Sequence};

pub const DEFAULT_MAX_VERTICES: u64 = 50_000;

/// Word-level helpers for bitsets stored as `[u64]`.
pub(crate) mod bits {
    #[inline]
    pub fn words_for(n: usize) -> usize {
        n.div_ceil(64)
    }

    #[inline]
    pub fn contains(set: &[u64], i: usize) -> bool {
        set[i / 64] >> (i % 64) & 1 == 1
    }

    #[inline]
    pub fn insert(set: &mut [u64], i: usize) {
        set[i / 64] |= 1 << (i % 64);
    }

    #[inline]
    pub fn remove(set: &mut [u64], i: usize) {
        set[i / 64] &= !(1 << (i % 64));
    }

    #[inline]
    pub fn count(set: &[u64]) -> usize {
        set.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Clears every bit at index `<= i`.
    pub fn clear_through(set: &mut [u64], i: usize) {
        let w = i / 64;
        set[..w].fill(0);
        let b = i % 64;
        set[w] &= if b == 63 { 0 } else { !0u64 << (b + 1) };
    }

    pub fn iter(set: &[u64]) -> impl Iterator<Item = usize> + '_ {
        set.iter().enumerate().flat_map(|(wi, &word)| {
            let mut w = word;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let t = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + t)
            })
        })
    }
}

/// Undirected simple graph on `0..n` with a packed adjacency bit-matrix.
#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    stride: usize,
    adj: Vec<u64>,
    edges: u64,
}

impl Graph {
    pub fn new(n: usize) -> Self {
        let stride = bits::words_for(n);
        Graph {
            n,
            stride,
            adj: vec![0; n * stride],
            edges: 0,
        }
    }

    /// Builds a graph from a symmetric, irreflexive predicate evaluated on
    /// every ordered pair (rows in parallel).
    pub fn from_predicate<F>(n: usize, edge: F) -> Self
    where
        F: Fn(usize, usize) -> bool + Sync,
    {
        let stride = bits::words_for(n);
        let mut adj = vec![0u64; n * stride];
        if stride > 0 {
            adj.par_chunks_mut(stride).enumerate().for_each(|(i, row)| {
                for j in (0..n).filter(|&j| j != i) {
                    if edge(i, j) {
                        bits::insert(row, j);
                    }
                }
            });
        }
        let degree_sum: u64 = adj.par_iter().map(|w| w.count_ones() as u64).sum();
        Graph {
            n,
            stride,
            adj,
            edges: degree_sum / 2,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> u64 {
        self.edges
    }

    /// Adds `{i, j}`; returns whether it was new. Self-loops are rejected.
    pub fn add_edge(&mut self, i: usize, j: usize) -> bool {
        assert!(i < self.n && j < self.n, "vertex out of range");
        assert_ne!(i, j, "self-loop");
        if self.has_edge(i, j) {
            return false;
        }
        bits::insert(&mut self.adj[i * self.stride..(i + 1) * self.stride], j);
        bits::insert(&mut self.adj[j * self.stride..(j + 1) * self.stride], i);
        self.edges += 1;
        true
    }

    #[inline]
    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        bits::contains(self.row(i), j)
    }

    /// Neighbourhood of `i` as a bitset over `0..n`.
    #[inline]
    pub fn row(&self, i: usize) -> &[u64] {
        &self.adj[i * self.stride..(i + 1) * self.stride]
    }

    pub fn degree(&self, i: usize) -> usize {
        bits::count(self.row(i))
    }

    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        bits::iter(self.row(i))
    }

    /// Edges `(i, j)` with `i < j`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |i| self.neighbors(i).filter(move |&j| j > i).map(move |j| (i, j)))
    }

    pub fn is_clique(&self, vertices: &[usize]) -> bool {
        vertices.iter().all(|&v| v < self.n)
            && vertices
                .iter()
                .enumerate()
                .all(|(k, &a)| vertices[k + 1..].iter().all(|&b| a != b && self.has_edge(a, b)))
    }

    pub fn stats(&self) -> GraphStats {
        GraphStats::new(self.n as u64, self.edges)
    }

    /// Writes DIMACS: the `p edge` line, optional `c vertex <i> <label>`
    /// comments (1-based), then one `e i j` line per edge with `i < j`.
    pub fn write_dimacs<W: Write>(&self, labels: Option<&[Sequence]>, mut out: W) -> Result<()> {
        writeln!(out, "p edge {} {}", self.n, self.edges)?;
        if let Some(labels) = labels {
            for (i, s) in labels.iter().enumerate() {
                writeln!(out, "c vertex {} {}", i + 1, s)?;
            }
        }
        for (i, j) in self.edges() {
            writeln!(out, "e {} {}", i + 1, j + 1)?;
        }
        Ok(())
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("vertices", &self.n)
            .field("edges", &self.edges)
            .finish()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GraphStats {
    #[serde(rename = "vertices")]
    pub vertex_count: u64,
    #[serde(rename = "edges")]
    pub edge_count: u64,
    /// `e / C(v, 2)`; 0 when `v ≤ 1`.
    pub density: f64,
}

impl GraphStats {
    pub fn new(v: u64, e: u64) -> Self {
        let pairs = v * v.saturating_sub(1) / 2;
        let density = if pairs == 0 { 0.0 } else { e as f64 / pairs as f64 };
        GraphStats {
            vertex_count: v,
            edge_count: e,
            density,
        }
    }

    /// Density is only a convention for graphs with fewer than two vertices.
    pub fn is_degenerate(&self) -> bool {
        self.vertex_count <= 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GraphKind {
    /// Distance and reverse-complement constraints (strong codes).
    GcRc,
    /// Distance constraint only (weak codes).
    #[serde(rename = "gc")]
    GcOnly,
}

impl fmt::Display for GraphKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GraphKind::GcRc => "gcrc",
            GraphKind::GcOnly => "gc",
        })
    }
}

impl FromStr for GraphKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gcrc" => Ok(GraphKind::GcRc),
            "gc" => Ok(GraphKind::GcOnly),
            other => Err(Error::InvalidParams(format!("unknown graph kind {other:?}"))),
        }
    }
}

/// Compatibility graph for `(n, d, w)` with its vertex labels.
#[derive(Debug, Clone)]
pub struct ConflictGraph {
    pub kind: GraphKind,
    pub params: CodeParams,
    vertices: Vec<Sequence>,
    graph: Graph,
}

impl ConflictGraph {
    pub fn build(kind: GraphKind, params: CodeParams) -> Result<Self> {
        Self::build_with_limit(kind, params, DEFAULT_MAX_VERTICES)
    }

    /// Fails with [`Error::TooLarge`] if the candidate vertex set (all words
    /// of weight `w`) or the final vertex set exceeds `max_vertices`.
    pub fn build_with_limit(kind: GraphKind, params: CodeParams, max_vertices: u64) -> Result<Self> {
        let CodeParams { n, d, w } = params;
        let candidates = constant_gc_count(n, w);
        if candidates > max_vertices {
            return Err(Error::TooLarge {
                vertices: candidates,
                limit: max_vertices,
            });
        }
        let vertices: Vec<Sequence> = match kind {
            GraphKind::GcRc => enumerate_constant_gc(n, w)?
                .filter(|s| s.self_complement_distance() >= d)
                .collect(),
            GraphKind::GcOnly => enumerate_constant_gc(n, w)?.collect(),
        };
        let graph = match kind {
            GraphKind::GcRc => {
                let rcs: Vec<Sequence> = vertices.iter().map(Sequence::reverse_complement).collect();
                Graph::from_predicate(vertices.len(), |i, j| {
                    vertices[i].hamming_unchecked(&vertices[j]) >= d && vertices[i].hamming_unchecked(&rcs[j]) >= d
                })
            }
            GraphKind::GcOnly => {
                Graph::from_predicate(vertices.len(), |i, j| vertices[i].hamming_unchecked(&vertices[j]) >= d)
            }
        };
        Ok(ConflictGraph {
            kind,
            params,
            vertices,
            graph,
        })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn vertices(&self) -> &[Sequence] {
        &self.vertices
    }

    pub fn stats(&self) -> GraphStats {
        self.graph.stats()
    }

    pub fn stats_record(&self) -> StatsRecord {
        let s = self.stats();
        StatsRecord {
            kind: self.kind,
            n: self.params.n,
            d: self.params.d,
            w: self.params.w,
            vertices: s.vertex_count,
            edges: s.edge_count,
            density: s.density,
        }
    }

    pub fn write_dimacs<W: Write>(&self, out: W) -> Result<()> {
        self.graph.write_dimacs(Some(&self.vertices), out)
    }
}

/// JSON form of graph statistics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StatsRecord {
    pub kind: GraphKind,
    pub n: usize,
    pub d: usize,
    pub w: usize,
    pub vertices: u64,
    pub edges: u64,
    pub density: f64,
}

/// A graph read back from DIMACS, with any vertex labels found in
/// `c vertex` comments.
#[derive(Debug, Clone)]
pub struct DimacsGraph {
    pub graph: Graph,
    pub labels: Vec<Option<Sequence>>,
}

impl DimacsGraph {
    /// All labels, if every vertex has one.
    pub fn full_labels(&self) -> Option<Vec<Sequence>> {
        self.labels.iter().copied().collect()
    }
}

pub fn read_dimacs<R: BufRead>(reader: R) -> Result<DimacsGraph> {
    let perr = |line: usize, message: String| Error::Parse { line, message };
    let mut graph: Option<(Graph, u64)> = None;
    let mut labels: Vec<Option<Sequence>> = Vec::new();
    let mut pending_labels: Vec<(usize, usize, Sequence)> = Vec::new();
    let mut last_line = 0;
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        last_line = lineno;
        let line = line?;
        let mut tok = line.split_whitespace();
        let Some(tag) = tok.next() else { continue };
        match tag {
            "c" => {
                if tok.next() == Some("vertex") {
                    let i: usize = tok
                        .next()
                        .and_then(|t| t.parse().ok())
                        .ok_or_else(|| perr(lineno, "bad vertex comment".into()))?;
                    let label = tok.next().ok_or_else(|| perr(lineno, "missing vertex label".into()))?;
                    let s = Sequence::parse(label).map_err(|e| perr(lineno, e.to_string()))?;
                    pending_labels.push((lineno, i, s));
                }
            }
            "p" => {
                if graph.is_some() {
                    return Err(perr(lineno, "duplicate problem line".into()));
                }
                let format = tok.next();
                if !matches!(format, Some("edge") | Some("col")) {
                    return Err(perr(lineno, format!("unsupported problem format {format:?}")));
                }
                let mut num = || -> Result<u64> {
                    tok.next()
                        .and_then(|t| t.parse().ok())
                        .ok_or_else(|| perr(lineno, "expected `p edge <vertices> <edges>`".into()))
                };
                let v = num()?;
                let e = num()?;
                graph = Some((Graph::new(v as usize), e));
                labels = vec![None; v as usize];
            }
            "e" => {
                let (g, _) = graph.as_mut().ok_or(Error::MissingHeader)?;
                let mut num = || -> Result<usize> {
                    tok.next()
                        .and_then(|t| t.parse().ok())
                        .ok_or_else(|| perr(lineno, "expected `e <i> <j>`".into()))
                };
                let (i, j) = (num()?, num()?);
                let n = g.vertex_count();
                if i == 0 || j == 0 || i > n || j > n {
                    return Err(perr(lineno, format!("edge ({i}, {j}) out of range 1..={n}")));
                }
                if i == j {
                    return Err(perr(lineno, format!("self-loop on {i}")));
                }
                g.add_edge(i - 1, j - 1);
            }
            other => return Err(perr(lineno, format!("unknown line type {other:?}"))),
        }
    }
    let (graph, declared) = graph.ok_or(Error::MissingHeader)?;
    for (lineno, i, s) in pending_labels {
        if i == 0 || i > labels.len() {
            return Err(perr(lineno, format!("vertex label index {i} out of range")));
        }
        labels[i - 1] = Some(s);
    }
    if graph.edge_count() != declared {
        return Err(perr(
            last_line,
            format!("header declares {declared} edges, found {}", graph.edge_count()),
        ));
    }
    Ok(DimacsGraph { graph, labels })
}
