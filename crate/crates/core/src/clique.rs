//! Exact maximum-clique search and counting.
//!
//! The solver follows Östergård's scheme. Vertices are ordered, then
//! processed from the last to the first; after vertex `i` has been processed
//! `c[i]` holds the maximum clique size inside the suffix `{v_i, …, v_last}`.
//! A node whose candidates start at `v_j` is cut when `size + c[j]` cannot
//! beat the incumbent. Since `c[i] ≤ c[i + 1] + 1`, the search from `v_i`
//! stops as soon as it finds any improvement. Inside each suffix search the
//! candidates are greedily coloured and branched on in colour order, with
//! the colour count as a second bound.
//!
//! [`max_clique_symmetric`] adds orbit pruning for conflict graphs, whose
//! automorphisms are known from their construction.
//!
//! Counting reuses the suffix table (or a caller-supplied maximum) and adds a
//! greedy colouring bound at every node.

use std::time::{Duration, Instant};

use serde::Serialize;

use crate::code::CodeSet;
use crate::error::{Error, Result};
use crate::graph::{bits, ConflictGraph, Graph, GraphKind};
use crate::seq::Sequence;
use crate::symmetry;

pub const DEFAULT_NODE_BUDGET: u64 = 1_000_000_000;

/// Limits on a search. Exceeding either aborts the search explicitly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub max_nodes: Option<u64>,
    pub max_time: Option<Duration>,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_nodes: Some(DEFAULT_NODE_BUDGET),
            max_time: None,
        }
    }
}

impl Budget {
    pub fn unlimited() -> Self {
        Budget {
            max_nodes: None,
            max_time: None,
        }
    }

    pub fn nodes(max_nodes: u64) -> Self {
        Budget {
            max_nodes: Some(max_nodes),
            max_time: None,
        }
    }
}

struct Meter {
    budget: Budget,
    start: Instant,
    nodes: u64,
    aborted: bool,
}

impl Meter {
    fn new(budget: Budget) -> Self {
        Meter {
            budget,
            start: Instant::now(),
            nodes: 0,
            aborted: false,
        }
    }

    /// Counts one node; returns false once the budget is spent.
    #[inline]
    fn tick(&mut self) -> bool {
        self.nodes += 1;
        if self.budget.max_nodes.is_some_and(|m| self.nodes > m) {
            self.aborted = true;
        }
        if self.nodes & 0xFFFF == 0 && self.budget.max_time.is_some_and(|t| self.start.elapsed() > t) {
            self.aborted = true;
        }
        !self.aborted
    }
}

/// Vertex order for the search: descending degree, ties by index.
pub fn degree_order(g: &Graph) -> Vec<usize> {
    let mut order: Vec<usize> = (0..g.vertex_count()).collect();
    order.sort_by_key(|&v| std::cmp::Reverse(g.degree(v)));
    order
}

/// Adjacency relabelled so that position `k` is original vertex `order[k]`.
struct Permuted {
    n: usize,
    stride: usize,
    adj: Vec<u64>,
    order: Vec<usize>,
}

impl Permuted {
    fn new(g: &Graph, order: Vec<usize>) -> Self {
        let n = g.vertex_count();
        let stride = bits::words_for(n);
        let mut position = vec![0usize; n];
        for (k, &v) in order.iter().enumerate() {
            position[v] = k;
        }
        let mut adj = vec![0u64; n * stride];
        for (k, &v) in order.iter().enumerate() {
            let row = &mut adj[k * stride..(k + 1) * stride];
            for u in g.neighbors(v) {
                bits::insert(row, position[u]);
            }
        }
        Permuted { n, stride, adj, order }
    }

    #[inline]
    fn row(&self, k: usize) -> &[u64] {
        &self.adj[k * self.stride..(k + 1) * self.stride]
    }

    /// Neighbours of `k` that come after it.
    fn forward_row(&self, k: usize, out: &mut [u64]) {
        out.copy_from_slice(self.row(k));
        bits::clear_through(out, k);
    }
}

/// Per-depth candidate sets in one flat buffer.
struct Frames {
    stride: usize,
    data: Vec<u64>,
}

impl Frames {
    fn new(stride: usize) -> Self {
        Frames {
            stride,
            data: vec![0; stride * 2],
        }
    }

    fn ensure(&mut self, depth: usize) {
        let need = (depth + 2) * self.stride;
        if self.data.len() < need {
            self.data.resize(need, 0);
        }
    }

    #[inline]
    fn frame_mut(&mut self, depth: usize) -> &mut [u64] {
        &mut self.data[depth * self.stride..(depth + 1) * self.stride]
    }

    /// `frame[depth + 1] = frame[depth] ∩ row`.
    #[inline]
    fn push_intersection(&mut self, depth: usize, row: &[u64]) -> usize {
        self.ensure(depth + 1);
        let s = self.stride;
        let (lo, hi) = self.data.split_at_mut((depth + 1) * s);
        let cur = &lo[depth * s..];
        let next = &mut hi[..s];
        let mut count = 0;
        for k in 0..s {
            let w = cur[k] & row[k];
            next[k] = w;
            count += w.count_ones() as usize;
        }
        count
    }
}

/// Colour-class bounds for a candidate set.
///
/// The set is partitioned greedily into independent sets, each class built
/// by scanning from the highest vertex down. For the candidates in ascending
/// order, `bounds[k]` is the number of distinct classes among candidates
/// `k..`; a clique inside that suffix takes at most one vertex per class.
struct Colouring {
    scratch: Vec<u64>,
    uncoloured: Vec<u64>,
    class_of: Vec<u32>,
    seen: Vec<u32>,
    generation: u32,
    /// Members of the classes below the floor, one bitset per class.
    low: Vec<u64>,
}

impl Colouring {
    fn new(n: usize, stride: usize) -> Self {
        Colouring {
            scratch: vec![0; stride],
            uncoloured: vec![0; stride],
            class_of: vec![0; n],
            seen: vec![0; n + 1],
            generation: 0,
            low: Vec::new(),
        }
    }

    /// Greedy colouring in ascending vertex order. Appends the vertices of
    /// classes numbered `floor` and above (1-based) with their class number,
    /// in class order; lower classes can never lift a branch past the bound.
    /// A vertex about to land at or above the floor is first offered a place
    /// in a lower class by moving its single conflicting vertex elsewhere.
    /// Returns the number of classes.
    fn sort(&mut self, g: &Permuted, set: &[u64], floor: usize, vertices: &mut Vec<u32>, colours: &mut Vec<u32>) -> usize {
        vertices.clear();
        colours.clear();
        let stride = set.len();
        self.uncoloured.copy_from_slice(set);
        let mut class = 0u32;
        let mut left = bits::count(set);
        while left > 0 {
            class += 1;
            let recording = class as usize >= floor;
            let storing = !recording && floor != usize::MAX;
            if storing {
                let need = class as usize * stride;
                if self.low.len() < need {
                    self.low.resize(need, 0);
                }
                self.low[need - stride..need].fill(0);
            }
            self.scratch.copy_from_slice(&self.uncoloured);
            let mut wi = 0;
            while let Some(v) = next_bit(&self.scratch, &mut wi) {
                bits::remove(&mut self.scratch, v);
                bits::remove(&mut self.uncoloured, v);
                left -= 1;
                if recording && floor > 2 && self.renumber(g, v, floor - 1, stride) {
                    continue;
                }
                for (s, r) in self.scratch.iter_mut().zip(g.row(v)) {
                    *s &= !r;
                }
                if recording {
                    vertices.push(v as u32);
                    colours.push(class);
                } else if storing {
                    let k = class as usize - 1;
                    bits::insert(&mut self.low[k * stride..(k + 1) * stride], v);
                }
            }
        }
        class as usize
    }

    /// Tries to place `v` in one of the first `classes` classes: finds a class
    /// where `v` conflicts with exactly one vertex `u`, and a later low class
    /// with no neighbour of `u`, then moves `u` there and `v` into its spot.
    fn renumber(&mut self, g: &Permuted, v: usize, classes: usize, stride: usize) -> bool {
        let row = g.row(v);
        for k1 in 0..classes {
            let c1 = &self.low[k1 * stride..(k1 + 1) * stride];
            let mut hit = None;
            let mut many = false;
            for (i, (a, b)) in c1.iter().zip(row).enumerate() {
                let x = a & b;
                if x != 0 {
                    if hit.is_some() || x.count_ones() > 1 {
                        many = true;
                        break;
                    }
                    hit = Some(i * 64 + x.trailing_zeros() as usize);
                }
            }
            if many {
                continue;
            }
            let Some(u) = hit else {
                bits::insert(&mut self.low[k1 * stride..(k1 + 1) * stride], v);
                return true;
            };
            let urow = g.row(u);
            for k2 in k1 + 1..classes {
                let c2 = &self.low[k2 * stride..(k2 + 1) * stride];
                if c2.iter().zip(urow).all(|(a, b)| a & b == 0) {
                    bits::remove(&mut self.low[k1 * stride..(k1 + 1) * stride], u);
                    bits::insert(&mut self.low[k1 * stride..(k1 + 1) * stride], v);
                    bits::insert(&mut self.low[k2 * stride..(k2 + 1) * stride], u);
                    return true;
                }
            }
        }
        false
    }

    fn suffix_bounds(&mut self, g: &Permuted, set: &[u64], vertices: &mut Vec<u32>, bounds: &mut Vec<u32>) {
        self.uncoloured.copy_from_slice(set);
        let mut class = 0u32;
        while self.uncoloured.iter().any(|&w| w != 0) {
            self.scratch.copy_from_slice(&self.uncoloured);
            let mut wi = self.scratch.len();
            while let Some(v) = prev_bit(&self.scratch, &mut wi) {
                self.class_of[v] = class;
                bits::remove(&mut self.scratch, v);
                bits::remove(&mut self.uncoloured, v);
                for (s, r) in self.scratch.iter_mut().zip(g.row(v)) {
                    *s &= !r;
                }
            }
            class += 1;
        }

        vertices.clear();
        vertices.extend(bits::iter(set).map(|v| v as u32));
        bounds.clear();
        bounds.resize(vertices.len(), 0);
        self.generation = self.generation.wrapping_add(1);
        if self.generation == 0 {
            self.seen.fill(0);
            self.generation = 1;
        }
        let mut distinct = 0;
        for k in (0..vertices.len()).rev() {
            let c = self.class_of[vertices[k] as usize] as usize;
            if self.seen[c] != self.generation {
                self.seen[c] = self.generation;
                distinct += 1;
            }
            bounds[k] = distinct;
        }
    }
}

/// Lowest set bit at word index `>= *wi`, moving `wi` up.
#[inline]
fn next_bit(set: &[u64], wi: &mut usize) -> Option<usize> {
    while *wi < set.len() {
        let w = set[*wi];
        if w != 0 {
            return Some(*wi * 64 + w.trailing_zeros() as usize);
        }
        *wi += 1;
    }
    None
}

/// Highest set bit at word index `< *wi`, moving `wi` down.
#[inline]
fn prev_bit(set: &[u64], wi: &mut usize) -> Option<usize> {
    while *wi > 0 {
        let w = set[*wi - 1];
        if w != 0 {
            return Some((*wi - 1) * 64 + 63 - w.leading_zeros() as usize);
        }
        *wi -= 1;
    }
    None
}

/// Per-depth candidate lists and their bounds.
#[derive(Default)]
struct Lists {
    vertices: Vec<Vec<u32>>,
    bounds: Vec<Vec<u32>>,
}

impl Lists {
    fn take(&mut self, depth: usize) -> (Vec<u32>, Vec<u32>) {
        if self.vertices.len() <= depth {
            self.vertices.resize_with(depth + 1, Vec::new);
            self.bounds.resize_with(depth + 1, Vec::new);
        }
        (
            std::mem::take(&mut self.vertices[depth]),
            std::mem::take(&mut self.bounds[depth]),
        )
    }

    fn put(&mut self, depth: usize, lists: (Vec<u32>, Vec<u32>)) {
        self.vertices[depth] = lists.0;
        self.bounds[depth] = lists.1;
    }
}

/// Outcome of a maximum-clique search.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CliqueResult {
    pub size: usize,
    /// Original vertex indices, ascending.
    pub vertices: Vec<usize>,
    /// Labels of `vertices` when the graph carries them.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub sequences: Vec<Sequence>,
    pub nodes_explored: u64,
    /// False if the budget ran out; `size` is then only a lower bound.
    pub complete: bool,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl CliqueResult {
    /// Checks that `vertices` is a clique of `g` before wrapping it.
    pub fn new(g: &Graph, mut vertices: Vec<usize>, nodes_explored: u64, complete: bool, elapsed: Duration) -> Result<Self> {
        vertices.sort_unstable();
        vertices.dedup();
        for (k, &a) in vertices.iter().enumerate() {
            if a >= g.vertex_count() {
                return Err(Error::IndexOutOfRange {
                    index: a,
                    len: g.vertex_count(),
                });
            }
            if let Some(&b) = vertices[k + 1..].iter().find(|&&b| !g.has_edge(a, b)) {
                return Err(Error::NotAClique { a, b });
            }
        }
        Ok(CliqueResult {
            size: vertices.len(),
            vertices,
            sequences: Vec::new(),
            nodes_explored,
            complete,
            elapsed,
        })
    }

    pub fn with_labels(mut self, labels: &[Sequence]) -> Self {
        self.sequences = self.vertices.iter().map(|&v| labels[v]).collect();
        self
    }
}

struct MaxSearch<'a> {
    g: &'a Permuted,
    c: Vec<usize>,
    best: usize,
    best_clique: Vec<usize>,
    stack: Vec<usize>,
    found: bool,
    /// Stop a branch at the first improvement (valid for suffix searches).
    first_only: bool,
    frames: Frames,
    colouring: Colouring,
    lists: Lists,
    meter: Meter,
}

impl MaxSearch<'_> {
    fn new(g: &Permuted, c: Vec<usize>, first_only: bool, budget: Budget) -> MaxSearch<'_> {
        MaxSearch {
            g,
            c,
            best: 0,
            best_clique: Vec::new(),
            stack: Vec::new(),
            found: false,
            first_only,
            frames: Frames::new(g.stride),
            colouring: Colouring::new(g.n, g.stride),
            lists: Lists::default(),
            meter: Meter::new(budget),
        }
    }

    fn run(&mut self) {
        for i in (0..self.g.n).rev() {
            self.frames.ensure(0);
            let stride = self.g.stride;
            self.g.forward_row(i, &mut self.frames.data[..stride]);
            self.found = false;
            self.stack.clear();
            self.stack.push(i);
            self.expand(0, 1);
            self.c[i] = self.best;
            if self.meter.aborted {
                return;
            }
        }
    }

    fn expand(&mut self, depth: usize, size: usize) {
        if !self.meter.tick() {
            return;
        }
        let stride = self.g.stride;
        let frame = &self.frames.data[depth * stride..(depth + 1) * stride];
        let Some(first) = bits::iter(frame).next() else {
            if size > self.best {
                self.best = size;
                self.best_clique = self.stack.clone();
                self.found = true;
            }
            return;
        };
        if size + self.c[first] <= self.best {
            return;
        }
        let (mut vertices, mut colours) = self.lists.take(depth);
        let floor = (self.best + 1).saturating_sub(size);
        self.colouring.sort(self.g, frame, floor, &mut vertices, &mut colours);
        while let (Some(j), Some(colour)) = (vertices.pop(), colours.pop()) {
            if size + colour as usize <= self.best {
                break;
            }
            let j = j as usize;
            bits::remove(self.frames.frame_mut(depth), j);
            self.frames.push_intersection(depth, self.g.row(j));
            self.stack.push(j);
            self.expand(depth + 1, size + 1);
            self.stack.pop();
            if (self.found && self.first_only) || self.meter.aborted {
                break;
            }
        }
        self.lists.put(depth, (vertices, colours));
    }
}

/// Suffix table and witness from one Östergård pass.
struct Solved {
    g: Permuted,
    c: Vec<usize>,
    best: usize,
    witness: Vec<usize>,
    nodes: u64,
    complete: bool,
    elapsed: Duration,
}

fn solve(g: &Graph, budget: Budget) -> Solved {
    let permuted = Permuted::new(g, degree_order(g));
    let mut search = MaxSearch::new(&permuted, vec![0; g.vertex_count()], true, budget);
    search.run();
    let witness: Vec<usize> = search.best_clique.iter().map(|&k| permuted.order[k]).collect();
    let (c, best, nodes, complete, elapsed) = (
        search.c,
        search.best,
        search.meter.nodes,
        !search.meter.aborted,
        search.meter.start.elapsed(),
    );
    Solved {
        g: permuted,
        c,
        best,
        witness,
        nodes,
        complete,
        elapsed,
    }
}

/// Searches under `budget`. An aborted search returns its incumbent with
/// `complete == false`.
pub fn max_clique_with_budget(g: &Graph, budget: Budget) -> CliqueResult {
    let s = solve(g, budget);
    CliqueResult::new(g, s.witness, s.nodes, s.complete, s.elapsed).expect("solver produced a non-clique")
}

/// Maximum clique under the default budget; an exhausted budget is an error.
pub fn max_clique(g: &Graph) -> Result<CliqueResult> {
    let r = max_clique_with_budget(g, Budget::default());
    if !r.complete {
        return Err(Error::BudgetExceeded {
            nodes: r.nodes_explored,
            best_size: r.size,
        });
    }
    Ok(r)
}

impl MaxSearch<'_> {
    /// Plain branch and bound below the partial clique `stack` over `set`.
    fn search_from(&mut self, stack: &[usize], set: &[u64]) {
        self.frames.ensure(0);
        self.frames.frame_mut(0).copy_from_slice(set);
        self.stack.clear();
        self.stack.extend_from_slice(stack);
        self.found = false;
        self.expand(0, stack.len());
    }

    fn colour_count(&mut self, set: &[u64]) -> usize {
        let (mut vertices, mut colours) = self.lists.take(0);
        let classes = self.colouring.sort(self.g, set, usize::MAX, &mut vertices, &mut colours);
        self.lists.put(0, (vertices, colours));
        classes
    }

    /// Extends `stack` within `set`, where every permutation in `group` fixes
    /// `stack` pointwise and maps `set` onto itself. One representative per
    /// orbit is branched on; after that the whole orbit is dropped, because
    /// any clique meeting it is the image of one through the representative.
    fn branch_orbits(&mut self, stack: &mut Vec<usize>, set: Vec<u64>, group: Vec<Vec<u32>>) {
        if self.meter.aborted {
            return;
        }
        let orbits = orbits_within(&set, &group);
        if group.len() <= 1 || orbits.len() == bits::count(&set) {
            self.search_from(stack, &set);
            return;
        }
        let mut rest = set;
        for orbit in orbits {
            if stack.len() + self.colour_count(&rest) <= self.best || self.meter.aborted {
                break;
            }
            let u = orbit[0];
            let fixing: Vec<Vec<u32>> = group.iter().filter(|h| h[u] as usize == u).cloned().collect();
            let next: Vec<u64> = rest.iter().zip(self.g.row(u)).map(|(a, b)| a & b).collect();
            stack.push(u);
            self.branch_orbits(stack, next, fixing);
            stack.pop();
            for &v in &orbit {
                bits::remove(&mut rest, v);
            }
        }
    }
}

/// Orbits of `group` on the members of `set`, each sorted, ordered by
/// smallest member.
fn orbits_within(set: &[u64], group: &[Vec<u32>]) -> Vec<Vec<usize>> {
    let mut done = vec![0u64; set.len()];
    let mut orbits = Vec::new();
    for v in bits::iter(set) {
        if bits::contains(&done, v) {
            continue;
        }
        let mut orbit = vec![v];
        bits::insert(&mut done, v);
        for h in group {
            let u = h[v] as usize;
            if !bits::contains(&done, u) {
                bits::insert(&mut done, u);
                orbit.push(u);
            }
        }
        orbit.sort_unstable();
        orbits.push(orbit);
    }
    orbits
}

/// Maximum clique of a conflict graph, branching only on representatives of
/// the orbits of the graph's known automorphism group at each level. Much
/// faster than [`max_clique_with_budget`] on the symmetric instances; the
/// witness may differ but the size is the same.
pub fn max_clique_symmetric(g: &ConflictGraph, budget: Budget) -> CliqueResult {
    let graph = g.graph();
    let permuted = Permuted::new(graph, degree_order(graph));
    let n = permuted.n;
    let mut position = vec![0u32; n];
    for (k, &v) in permuted.order.iter().enumerate() {
        position[v] = k as u32;
    }
    let mut search = MaxSearch::new(&permuted, vec![n + 1; n], false, budget);
    let mut rest = vec![0u64; permuted.stride];
    for v in 0..n {
        bits::insert(&mut rest, v);
    }
    for orbit in symmetry::vertex_orbits(g) {
        if search.colour_count(&rest) <= search.best || search.meter.aborted {
            break;
        }
        let rep = orbit[0];
        let group: Vec<Vec<u32>> = symmetry::stabilizer(g, rep)
            .into_iter()
            .map(|h| {
                let mut moved = vec![0u32; n];
                for (v, &image) in h.iter().enumerate() {
                    moved[position[v] as usize] = position[image as usize];
                }
                moved
            })
            .collect();
        let r = position[rep] as usize;
        let next: Vec<u64> = rest.iter().zip(permuted.row(r)).map(|(a, b)| a & b).collect();
        search.branch_orbits(&mut vec![r], next, group);
        for &v in &orbit {
            bits::remove(&mut rest, position[v] as usize);
        }
    }
    let witness: Vec<usize> = search.best_clique.iter().map(|&k| permuted.order[k]).collect();
    CliqueResult::new(graph, witness, search.meter.nodes, !search.meter.aborted, search.meter.start.elapsed())
        .expect("solver produced a non-clique")
}

/// Outcome of a counting search.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountResult {
    pub max_size: usize,
    /// Distinct maximum cliques as vertex sets; partial when not exhausted.
    pub count: u64,
    pub exhausted: bool,
    pub nodes_explored: u64,
    #[serde(skip)]
    pub elapsed: Duration,
}

struct CountSearch<'a> {
    g: &'a Permuted,
    c: Option<&'a [usize]>,
    target: usize,
    count: u64,
    frames: Frames,
    colouring: Colouring,
    lists: Lists,
    meter: Meter,
}

impl CountSearch<'_> {
    fn run(&mut self) {
        let stride = self.g.stride;
        for i in 0..self.g.n {
            if self.c.is_some_and(|c| c[i] < self.target) {
                // c is non-increasing along the order
                break;
            }
            self.frames.ensure(0);
            self.g.forward_row(i, &mut self.frames.data[..stride]);
            let remaining = bits::count(&self.frames.data[..stride]);
            self.expand(0, 1, remaining);
            if self.meter.aborted {
                return;
            }
        }
    }

    fn expand(&mut self, depth: usize, size: usize, remaining: usize) {
        if !self.meter.tick() {
            return;
        }
        if size == self.target {
            self.count += 1;
            return;
        }
        let need = self.target - size;
        if remaining < need {
            return;
        }
        if need == 1 {
            self.count += remaining as u64;
            return;
        }
        let stride = self.g.stride;
        let (mut vertices, mut bounds) = self.lists.take(depth);
        self.colouring.suffix_bounds(
            self.g,
            &self.frames.data[depth * stride..(depth + 1) * stride],
            &mut vertices,
            &mut bounds,
        );
        for (&j, &bound) in vertices.iter().zip(&bounds) {
            let j = j as usize;
            if (bound as usize) < need || self.c.is_some_and(|c| size + c[j] < self.target) {
                break;
            }
            bits::remove(self.frames.frame_mut(depth), j);
            let next = self.frames.push_intersection(depth, self.g.row(j));
            self.expand(depth + 1, size + 1, next);
            if self.meter.aborted {
                break;
            }
        }
        self.lists.put(depth, (vertices, bounds));
    }
}

/// Counts the distinct maximum cliques of `g`.
///
/// With `known_max == None` a full maximum-clique search runs first and its
/// suffix table prunes the enumeration. A supplied `known_max` is trusted
/// and only the colouring bound prunes.
pub fn count_max_cliques(g: &Graph, known_max: Option<usize>, budget: Budget) -> CountResult {
    let start = Instant::now();
    let (permuted, c, target, solve_nodes) = match known_max {
        Some(k) => (Permuted::new(g, degree_order(g)), None, k, 0),
        None => {
            let s = solve(g, budget);
            if !s.complete {
                return CountResult {
                    max_size: s.best,
                    count: 0,
                    exhausted: false,
                    nodes_explored: s.nodes,
                    elapsed: start.elapsed(),
                };
            }
            (s.g, Some(s.c), s.best, s.nodes)
        }
    };
    if target == 0 {
        return CountResult {
            max_size: 0,
            count: u64::from(g.vertex_count() == 0),
            exhausted: true,
            nodes_explored: solve_nodes,
            elapsed: start.elapsed(),
        };
    }
    let remaining_budget = Budget {
        max_nodes: budget.max_nodes.map(|m| m.saturating_sub(solve_nodes)),
        max_time: budget.max_time.map(|t| t.saturating_sub(start.elapsed())),
    };
    let stride = permuted.stride;
    let mut search = CountSearch {
        g: &permuted,
        c: c.as_deref(),
        target,
        count: 0,
        frames: Frames::new(stride),
        colouring: Colouring::new(permuted.n, stride),
        lists: Lists::default(),
        meter: Meter::new(remaining_budget),
    };
    search.run();
    CountResult {
        max_size: target,
        count: search.count,
        exhausted: !search.meter.aborted,
        nodes_explored: solve_nodes + search.meter.nodes,
        elapsed: start.elapsed(),
    }
}

/// The code formed by the labels of a clique of `g`.
pub fn clique_to_code(g: &ConflictGraph, vertices: &[usize]) -> Result<CodeSet> {
    let labels = g.vertices();
    for &v in vertices {
        if v >= labels.len() {
            return Err(Error::IndexOutOfRange {
                index: v,
                len: labels.len(),
            });
        }
    }
    let code = CodeSet::from_members(g.params, vertices.iter().map(|&v| labels[v]))?;
    let report = match g.kind {
        GraphKind::GcRc => code.verify_strong(),
        GraphKind::GcOnly => code.verify_weak(),
    };
    if let Some(v) = report.violations.first() {
        return Err(Error::InvalidParams(format!("vertex set is not a code: {v}")));
    }
    Ok(code)
}
