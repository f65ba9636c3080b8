//! Recorded reference values and the bounds-table harness.
//!
//! The harness fills the table of `A(n, d, ⌊n/2⌋)` for `4 ≤ n ≤ max_n` and
//! `3 ≤ d ≤ n`, using an exact clique search where the graph fits the budget
//! and local search otherwise, then checks every cell against the recorded
//! values.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::clique::{self, Budget};
use crate::code::CodeParams;
use crate::error::{Error, Result};
use crate::graph::{ConflictGraph, GraphKind, DEFAULT_MAX_VERTICES};
use crate::seq::constant_gc_count;
use crate::sls::{self, RunRecord, SlsParams};

/// Environment variable naming a budget preset or a node count.
pub const BUDGET_ENV: &str = "DNACODEX_BUDGET";

/// How a recorded value was established.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Mark {
    /// Lower bound only.
    Bound,
    /// Exact value known beforehand.
    Exact,
    /// New lower bound found by local search.
    NewBound,
    /// Exact value established by clique search.
    CliqueExact,
}

impl Mark {
    pub fn is_exact(self) -> bool {
        matches!(self, Mark::Exact | Mark::CliqueExact)
    }
}

/// One cell of the recorded table: `A(n, d, ⌊n/2⌋) ≥ value`, or `=` when exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RecordedBound {
    pub n: usize,
    pub d: usize,
    pub value: u64,
    pub mark: Mark,
}

const fn rec(n: usize, d: usize, value: u64, mark: Mark) -> RecordedBound {
    RecordedBound { n, d, value, mark }
}

use Mark::{Bound as B, CliqueExact as Q, Exact as E, NewBound as N};

/// Known values of `A(n, d, ⌊n/2⌋)` for `4 ≤ n ≤ 14`, `3 ≤ d ≤ n`.
#[rustfmt::skip]
pub const RECORDED: &[RecordedBound] = &[
    rec(4, 3, 6, E), rec(4, 4, 2, E),
    rec(5, 3, 15, Q), rec(5, 4, 3, Q), rec(5, 5, 1, E),
    rec(6, 3, 44, N), rec(6, 4, 16, Q), rec(6, 5, 4, E), rec(6, 6, 2, E),
    rec(7, 3, 135, N), rec(7, 4, 36, N), rec(7, 5, 11, Q), rec(7, 6, 2, Q), rec(7, 7, 1, E),
    rec(8, 3, 528, B), rec(8, 4, 128, B), rec(8, 5, 28, N), rec(8, 6, 12, B), rec(8, 7, 2, E), rec(8, 8, 2, E),
    rec(9, 3, 1354, B), rec(9, 4, 275, N), rec(9, 5, 67, N), rec(9, 6, 20, N), rec(9, 7, 8, B), rec(9, 8, 2, E),
    rec(9, 9, 1, E),
    rec(10, 3, 4542, B), rec(10, 4, 855, N), rec(10, 5, 175, N), rec(10, 6, 54, B), rec(10, 7, 16, N),
    rec(10, 8, 8, E), rec(10, 9, 2, E), rec(10, 10, 2, E),
    rec(11, 3, 14405, B), rec(11, 4, 2457, B), rec(11, 5, 477, N), rec(11, 6, 117, N), rec(11, 7, 36, N),
    rec(11, 8, 13, N), rec(11, 9, 5, E), rec(11, 10, 2, E), rec(11, 11, 1, E),
    rec(12, 3, 58976, B), rec(12, 4, 14624, B), rec(12, 5, 1369, B), rec(12, 6, 924, B), rec(12, 7, 83, N),
    rec(12, 8, 28, N), rec(12, 9, 11, B), rec(12, 10, 4, E), rec(12, 11, 2, E), rec(12, 12, 2, E),
    rec(13, 3, 167263, B), rec(13, 4, 27376, B), rec(13, 5, 3954, B), rec(13, 6, 924, B), rec(13, 7, 205, N),
    rec(13, 8, 61, N), rec(13, 9, 22, N), rec(13, 10, 9, B), rec(13, 11, 4, E), rec(13, 12, 2, E),
    rec(13, 13, 1, E),
    rec(14, 3, 430080, B), rec(14, 4, 192192, B), rec(14, 5, 11878, B), rec(14, 6, 2963, B), rec(14, 7, 749, B),
    rec(14, 8, 180, B), rec(14, 9, 46, B), rec(14, 10, 16, N), rec(14, 11, 7, B), rec(14, 12, 4, E),
    rec(14, 13, 2, E), rec(14, 14, 2, E),
];

pub fn recorded(n: usize, d: usize) -> Option<RecordedBound> {
    RECORDED.iter().copied().find(|r| r.n == n && r.d == d)
}

/// Published statistics of one conflict graph.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GraphRecord {
    pub kind: GraphKind,
    pub n: usize,
    pub d: usize,
    pub w: usize,
    pub vertices: u64,
    pub edges: u64,
    pub density: f64,
    pub max_clique: usize,
    pub max_cliques: u64,
}

const fn graph_rec(
    kind: GraphKind,
    (n, d, w): (usize, usize, usize),
    vertices: u64,
    edges: u64,
    density: f64,
    max_clique: usize,
    max_cliques: u64,
) -> GraphRecord {
    GraphRecord {
        kind,
        n,
        d,
        w,
        vertices,
        edges,
        density,
        max_clique,
        max_cliques,
    }
}

/// Published graph statistics, densities rounded to five places.
#[rustfmt::skip]
pub const GRAPHS: &[GraphRecord] = &[
    graph_rec(GraphKind::GcRc, (5, 3, 2), 304, 34_848, 0.75664, 15, 8_388_608),
    graph_rec(GraphKind::GcRc, (5, 4, 2), 208, 6_208, 0.28837, 3, 16_384),
    graph_rec(GraphKind::GcRc, (6, 4, 3), 864, 223_176, 0.59862, 16, 58_720_256),
    graph_rec(GraphKind::GcRc, (7, 5, 3), 3_904, 3_945_728, 0.51790, 11, 446_693_376),
    graph_rec(GraphKind::GcRc, (7, 6, 3), 2_224, 241_664, 0.09776, 2, 241_664),
    graph_rec(GraphKind::GcOnly, (5, 3, 2), 320, 44_800, 0.87774, 30, 12_288),
    graph_rec(GraphKind::GcOnly, (6, 5, 3), 1_280, 437_120, 0.53401, 8, 248_709_120),
];

/// Limits for one table cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TableBudget {
    /// Clique search node limit per cell.
    pub nodes: u64,
    /// Largest candidate count for which a graph is built.
    pub max_vertices: u64,
    /// Stagnation bound for local search.
    pub max_stagnation: u64,
    /// Independent local-search runs per cell.
    pub runs: usize,
}

impl TableBudget {
    pub const TINY: TableBudget = TableBudget {
        nodes: 100_000,
        max_vertices: 5_000,
        max_stagnation: 1_000,
        runs: 2,
    };

    pub const DEFAULT: TableBudget = TableBudget {
        nodes: 20_000_000,
        max_vertices: DEFAULT_MAX_VERTICES,
        max_stagnation: 100_000,
        runs: 4,
    };

    pub const LARGE: TableBudget = TableBudget {
        nodes: 2_000_000_000,
        max_vertices: DEFAULT_MAX_VERTICES,
        max_stagnation: 1_000_000,
        runs: 8,
    };

    /// Reads [`BUDGET_ENV`], falling back to the default preset when unset.
    pub fn from_env() -> Result<TableBudget> {
        match std::env::var(BUDGET_ENV) {
            Ok(v) => v.parse(),
            Err(_) => Ok(TableBudget::DEFAULT),
        }
    }
}

impl Default for TableBudget {
    fn default() -> Self {
        TableBudget::DEFAULT
    }
}

/// `tiny`, `default`, `large`, or a node count applied to the default preset.
impl FromStr for TableBudget {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tiny" => Ok(TableBudget::TINY),
            "default" => Ok(TableBudget::DEFAULT),
            "large" => Ok(TableBudget::LARGE),
            _ => s
                .parse::<u64>()
                .ok()
                .filter(|&n| n > 0)
                .map(|nodes| TableBudget {
                    nodes,
                    ..TableBudget::DEFAULT
                })
                .ok_or_else(|| Error::InvalidParams(format!("unknown budget {s:?}: expected tiny, default, large or a node count"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Sls,
    Both,
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Mode::Exact),
            "sls" => Ok(Mode::Sls),
            "both" => Ok(Mode::Both),
            _ => Err(Error::InvalidParams(format!("unknown mode {s:?}: expected exact, sls or both"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Status {
    Exact,
    LowerBound,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Source {
    #[serde(rename = "SLS")]
    Sls,
    Clique,
    Recorded,
}

/// One computed cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableEntry {
    pub n: usize,
    pub d: usize,
    pub w: usize,
    pub value: u64,
    pub status: Status,
    pub source: Source,
    pub recorded: Option<RecordedBound>,
    /// Clique witness (for clique-derived values), as sequences.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<String>>,
    /// Local-search run that achieved the value.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub run: Option<RunRecord>,
    /// Clique search effort, when one ran.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nodes_explored: Option<u64>,
}

impl TableEntry {
    /// Disagreement with the recorded value, if any: an exact value must
    /// equal a recorded exact value and reach every recorded lower bound; a
    /// lower bound must not exceed a recorded exact value.
    pub fn contradiction(&self) -> Option<String> {
        let r = self.recorded?;
        let cell = format!("({}, {})", self.n, self.d);
        match self.status {
            Status::Exact if r.mark.is_exact() && self.value != r.value => {
                Some(format!("{cell}: computed exact value {} but recorded exact value {}", self.value, r.value))
            }
            Status::Exact if self.value < r.value => {
                Some(format!("{cell}: computed exact value {} below recorded lower bound {}", self.value, r.value))
            }
            Status::LowerBound if r.mark.is_exact() && self.value > r.value => {
                Some(format!("{cell}: lower bound {} exceeds recorded exact value {}", self.value, r.value))
            }
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableReport {
    pub max_n: usize,
    pub mode: Mode,
    pub budget: TableBudget,
    pub entries: Vec<TableEntry>,
    pub contradictions: Vec<String>,
}

impl TableReport {
    /// Markdown grid: rows `n`, columns `d`. Exact values end in `.`, and
    /// values matching a recorded exact value are not otherwise marked.
    pub fn to_markdown(&self) -> String {
        let max_d = self.entries.iter().map(|e| e.d).max().unwrap_or(3);
        let mut out = String::from("| n \\ d |");
        for d in 3..=max_d {
            let _ = write!(out, " {d} |");
        }
        out.push_str("\n|---|");
        for _ in 3..=max_d {
            out.push_str("---|");
        }
        out.push('\n');
        for n in 4..=self.max_n {
            let _ = write!(out, "| {n} |");
            for d in 3..=max_d {
                match self.entries.iter().find(|e| e.n == n && e.d == d) {
                    Some(e) => {
                        let dot = if e.status == Status::Exact { "." } else { "" };
                        let _ = write!(out, " {}{dot} |", e.value);
                    }
                    None => out.push_str("  |"),
                }
            }
            out.push('\n');
        }
        out.push_str("\nExact values end in `.`; others are lower bounds.\n");
        for c in &self.contradictions {
            let _ = writeln!(out, "\nCONTRADICTION {c}");
        }
        out
    }
}

impl fmt::Display for TableReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_markdown())
    }
}

fn clique_cell(params: CodeParams, budget: &TableBudget) -> Option<TableEntry> {
    let CodeParams { n, d, w } = params;
    if constant_gc_count(n, w) > budget.max_vertices {
        return None;
    }
    let g = ConflictGraph::build_with_limit(GraphKind::GcRc, params, budget.max_vertices).ok()?;
    let r = clique::max_clique_symmetric(&g, Budget::nodes(budget.nodes));
    let witness = r.vertices.iter().map(|&v| g.vertices()[v].to_string()).collect();
    Some(TableEntry {
        n,
        d,
        w,
        value: r.size as u64,
        status: if r.complete { Status::Exact } else { Status::LowerBound },
        source: Source::Clique,
        recorded: recorded(n, d),
        witness: Some(witness),
        run: None,
        nodes_explored: Some(r.nodes_explored),
    })
}

fn sls_cell(params: CodeParams, budget: &TableBudget) -> Result<TableEntry> {
    let CodeParams { n, d, w } = params;
    let rec = recorded(n, d);
    let p = SlsParams::new(params)
        .with_target(rec.map(|r| r.value as usize))
        .with_max_stagnation(budget.max_stagnation);
    let best = sls::run_multi(&p, budget.runs)?;
    Ok(TableEntry {
        n,
        d,
        w,
        value: best.code.len() as u64,
        status: Status::LowerBound,
        source: Source::Sls,
        recorded: rec,
        witness: None,
        run: Some(best.record(&p)),
        nodes_explored: None,
    })
}

fn cell(n: usize, d: usize, mode: Mode, budget: &TableBudget) -> Result<TableEntry> {
    let params = CodeParams::new(n, d, n / 2)?;
    if mode != Mode::Sls {
        if let Some(exact) = clique_cell(params, budget) {
            if exact.status == Status::Exact {
                return Ok(exact);
            }
            let heuristic = sls_cell(params, budget)?;
            return Ok(if exact.value >= heuristic.value { exact } else { heuristic });
        }
    }
    sls_cell(params, budget)
}

/// Fills the table for `4 ≤ n ≤ max_n`, `3 ≤ d ≤ n`, `w = ⌊n/2⌋`. Cells run
/// in parallel and are reported in `(n, d)` order. In `Both` mode a local
/// search also runs next to every solved clique and must not beat it.
pub fn compute(max_n: usize, mode: Mode, budget: TableBudget) -> Result<TableReport> {
    if !(4..=crate::seq::MAX_LEN).contains(&max_n) {
        return Err(Error::InvalidParams(format!("max-n must be between 4 and {}", crate::seq::MAX_LEN)));
    }
    let cells: Vec<(usize, usize)> = (4..=max_n).flat_map(|n| (3..=n).map(move |d| (n, d))).collect();
    let results: Vec<Result<(TableEntry, Option<String>)>> = cells
        .par_iter()
        .map(|&(n, d)| {
            let entry = cell(n, d, mode, &budget)?;
            let mut extra = None;
            if mode == Mode::Both && entry.source == Source::Clique && entry.status == Status::Exact {
                let s = sls_cell(CodeParams::new(n, d, n / 2)?, &budget)?;
                if s.value > entry.value {
                    extra = Some(format!("({n}, {d}): local search found {} above clique optimum {}", s.value, entry.value));
                }
            }
            Ok((entry, extra))
        })
        .collect();
    let mut entries = Vec::with_capacity(results.len());
    let mut contradictions = Vec::new();
    for r in results {
        let (entry, extra) = r?;
        contradictions.extend(entry.contradiction());
        contradictions.extend(extra);
        entries.push(entry);
    }
    Ok(TableReport {
        max_n,
        mode,
        budget,
        entries,
        contradictions,
    })
}
