//! Iterative-compression front end shared by every solver.
//!
//! Vertices are added in ascending id. Whenever the running solution plus the
//! new vertex (the set `W`) stops being compressible for free, each subset of
//! `W` is guessed as "stays deleted" and the rest of `W` is split into every
//! ordered partition, which a [`PartitionSolver`] then attacks.

use std::sync::Mutex;

use rayon::prelude::*;
use thiserror::Error;

use crate::digraph::Digraph;
use crate::patterns::{check_solution, find_forbidden_subgraph, ForbiddenFamily};
use crate::separators::SeparatorError;
use crate::vset::VertexSet;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolveError {
    #[error("search exceeded the node limit of {0}")]
    NodeLimit(u64),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
    #[error("unsupported family: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Separator(#[from] SeparatorError),
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    /// Hard cap on recursion nodes; exceeding it is an error, not a NO.
    pub node_limit: u64,
    /// Worker threads for the partition loop; 1 keeps everything sequential.
    pub threads: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            node_limit: 200_000_000,
            threads: 1,
        }
    }
}

/// Counters filled in by the solvers. Depths are counted in recursion levels.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SolveStats {
    pub nodes: u64,
    pub max_depth: usize,
    /// Branch-set recursions only: longest chain of measure-decreasing calls.
    pub max_measure_depth: usize,
    /// Largest measure-depth bound (k² + k) seen alongside it.
    pub measure_depth_bound: usize,
    pub max_width: usize,
    pub measure_checks: u64,
}

impl SolveStats {
    pub fn merge(&mut self, other: &SolveStats) {
        self.nodes += other.nodes;
        self.max_depth = self.max_depth.max(other.max_depth);
        self.max_measure_depth = self.max_measure_depth.max(other.max_measure_depth);
        self.measure_depth_bound = self.measure_depth_bound.max(other.measure_depth_bound);
        self.max_width = self.max_width.max(other.max_width);
        self.measure_checks += other.measure_checks;
    }

    pub(crate) fn tick(&mut self, limit: u64) -> Result<(), SolveError> {
        self.nodes += 1;
        if self.nodes > limit {
            return Err(SolveError::NodeLimit(limit));
        }
        Ok(())
    }

    pub(crate) fn reach_depth(&mut self, depth: usize) {
        self.max_depth = self.max_depth.max(depth);
    }
}

/// Solution plus the counters collected while finding it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveReport {
    pub solution: Option<VertexSet>,
    pub stats: SolveStats,
}

/// `(D, (S_1, …, S_q), W, k)`; `w` is the union of the parts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionedInstance {
    pub d: Digraph,
    pub fam: ForbiddenFamily,
    pub parts: Vec<VertexSet>,
    pub w: VertexSet,
    pub k: usize,
}

impl PartitionedInstance {
    pub fn new(d: Digraph, fam: ForbiddenFamily, parts: Vec<VertexSet>, k: usize) -> Self {
        let mut w = VertexSet::new();
        for p in &parts {
            w.union_with(p);
        }
        PartitionedInstance { d, fam, parts, w, k }
    }

    /// Parts are non-empty and disjoint, live in `d`, and `w` is a deletion set.
    pub fn validate(&self) -> Result<(), String> {
        let mut seen = VertexSet::new();
        for p in &self.parts {
            if p.is_empty() {
                return Err("empty part".into());
            }
            if !p.is_disjoint(&seen) {
                return Err(format!("part {p:?} overlaps an earlier part"));
            }
            if !p.is_subset(self.d.vertex_set()) {
                return Err(format!("part {p:?} is not inside the graph"));
            }
            seen.union_with(p);
        }
        if seen != self.w {
            return Err("w differs from the union of the parts".into());
        }
        if !check_solution(&self.d, &self.fam, &self.w) {
            return Err("w is not a deletion set".into());
        }
        Ok(())
    }

    /// `x` avoids W, is a deletion set and cuts every S_i → S_j path, i < j.
    pub fn is_solution(&self, x: &VertexSet) -> bool {
        x.is_disjoint(&self.w)
            && x.len() <= self.k
            && cuts_forward_paths(&self.d, &self.parts, x)
            && check_solution(&self.d, &self.fam, x)
    }
}

pub(crate) fn cuts_forward_paths(d: &Digraph, parts: &[VertexSet], x: &VertexSet) -> bool {
    let mut later = VertexSet::new();
    for p in parts.iter().skip(1) {
        later.union_with(p);
    }
    for (i, si) in parts.iter().enumerate() {
        if i + 1 == parts.len() {
            break;
        }
        if !d.reachable_from(si, x).is_disjoint(&later) {
            return false;
        }
        later.difference_with(&parts[i + 1]);
    }
    true
}

/// Ordered partitions of `w` with q parts, by increasing q and then by the
/// lexicographic order of the part-assignment vector over ascending members.
pub fn ordered_partitions(w: &VertexSet) -> Vec<Vec<VertexSet>> {
    let members = w.to_vec();
    let n = members.len();
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    for q in 1..=n {
        let mut assign = vec![0usize; n];
        loop {
            let mut parts = vec![VertexSet::new(); q];
            for (i, &a) in assign.iter().enumerate() {
                parts[a].insert(members[i]);
            }
            if parts.iter().all(|p| !p.is_empty()) {
                out.push(parts);
            }
            // odometer increment, last position fastest
            let mut pos = n;
            loop {
                if pos == 0 {
                    break;
                }
                pos -= 1;
                assign[pos] += 1;
                if assign[pos] < q {
                    break;
                }
                assign[pos] = 0;
                if pos == 0 {
                    pos = usize::MAX;
                    break;
                }
            }
            if pos == usize::MAX {
                break;
            }
        }
    }
    out
}

/// Greedy count of vertex-disjoint strongly connected subgraphs that each
/// contain a family member. Every deletion set must hit each of them.
/// Stops counting once `limit + 1` is reached.
pub fn packing_lower_bound(d: &Digraph, fam: &ForbiddenFamily, limit: usize) -> usize {
    let mut g = d.clone();
    let mut count = 0;
    while count <= limit {
        let Some(f) = find_forbidden_subgraph(&g, fam, None, true) else {
            break;
        };
        let img = &f.image;
        let mut used = f.vertices();
        for i in 0..img.len() {
            let (a, b) = (img[i], img[(i + 1) % img.len()]);
            if a != b {
                let path = g.shortest_path(a, b).expect("copy lies inside one strong component");
                used.extend(path);
            }
        }
        g = g.remove_vertices(&used);
        count += 1;
    }
    count
}

/// Attacks one ordered partition of the compression set.
pub trait PartitionSolver: Send + Sync {
    fn family(&self) -> &ForbiddenFamily;
    fn config(&self) -> &SolverConfig;
    fn stats(&mut self) -> &mut SolveStats;
    /// A fresh solver with the same settings and zeroed stats.
    fn fork(&self) -> Self
    where
        Self: Sized;
    /// Some valid solution of `pi`, or `None` when no nice solution exists.
    fn solve_partitioned(&mut self, pi: &PartitionedInstance) -> Result<Option<VertexSet>, SolveError>;

    /// Whether `d` already has no forbidden component.
    fn is_free(&self, d: &Digraph) -> bool {
        check_solution(d, self.family(), &VertexSet::new())
    }
}

/// A W-disjoint deletion set of size ≤ k, given that W is a deletion set.
pub fn disjoint_compression<P: PartitionSolver>(
    solver: &mut P,
    d: &Digraph,
    w: &VertexSet,
    k: usize,
) -> Result<Option<VertexSet>, SolveError> {
    if solver.is_free(d) {
        return Ok(Some(VertexSet::new()));
    }
    if k == 0 || packing_lower_bound(d, solver.family(), k) > k {
        return Ok(None);
    }
    let partitions = ordered_partitions(w);
    let fam = solver.family().clone();
    let make = |parts: &Vec<VertexSet>| PartitionedInstance::new(d.clone(), fam.clone(), parts.clone(), k);
    if solver.config().threads <= 1 {
        for parts in &partitions {
            if let Some(x) = solver.solve_partitioned(&make(parts))? {
                return Ok(Some(x));
            }
        }
        return Ok(None);
    }
    let merged = Mutex::new(SolveStats::default());
    let template = solver.fork();
    let found = partitions.par_iter().find_map_first(|parts| {
        let mut local = template.fork();
        let r = local.solve_partitioned(&make(parts));
        merged.lock().unwrap().merge(local.stats());
        match r {
            Ok(None) => None,
            other => Some(other),
        }
    });
    solver.stats().merge(&merged.into_inner().unwrap());
    found.unwrap_or(Ok(None))
}

/// Full iterative compression for budget `k`.
pub fn iterative_compression<P: PartitionSolver>(
    solver: &mut P,
    d: &Digraph,
    k: usize,
) -> Result<Option<VertexSet>, SolveError> {
    if solver.is_free(d) {
        return Ok(Some(VertexSet::new()));
    }
    if packing_lower_bound(d, solver.family(), k) > k {
        return Ok(None);
    }
    let mut present = VertexSet::new();
    let mut x = VertexSet::new();
    for v in d.vertices() {
        present.insert(v);
        if x.len() < k {
            x.insert(v);
            continue;
        }
        let g = d.restrict_to(&present);
        if solver.is_free(&g.remove_vertices(&x)) {
            continue;
        }
        if packing_lower_bound(&g, solver.family(), k) > k {
            return Ok(None);
        }
        match compress(solver, &g, &x.with(v), k)? {
            Some(next) => x = next,
            None => return Ok(None),
        }
    }
    Ok(Some(x))
}

/// Given a deletion set `w` of size k + 1, finds one of size ≤ k.
pub fn compress<P: PartitionSolver>(
    solver: &mut P,
    g: &Digraph,
    w: &VertexSet,
    k: usize,
) -> Result<Option<VertexSet>, SolveError> {
    let members = w.to_vec();
    let mut guesses: Vec<VertexSet> = (0u32..1 << members.len())
        .map(|mask| {
            (0..members.len())
                .filter(|&i| mask & (1 << i) != 0)
                .map(|i| members[i])
                .collect()
        })
        .filter(|kept: &VertexSet| kept.len() <= k)
        .collect();
    // Most deletions kept first: fewer undeletable vertices, fewer partitions.
    guesses.sort_by(|a, b| b.len().cmp(&a.len()).then(a.cmp_lex(b)));
    for kept in guesses {
        let rest_w = w.difference(&kept);
        let g2 = g.remove_vertices(&kept);
        if !solver.is_free(&g2.restrict_to(&rest_w)) {
            continue;
        }
        if let Some(z) = disjoint_compression(solver, &g2, &rest_w, k - kept.len())? {
            return Ok(Some(z.union(&kept)));
        }
    }
    Ok(None)
}

/// Runs `f` inside a dedicated pool when more than one thread is requested.
pub fn with_pool<R: Send>(threads: usize, f: impl FnOnce() -> R + Send) -> R {
    if threads <= 1 {
        return f();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}

/// Final guard on anything a solver hands back.
pub fn verify(d: &Digraph, fam: &ForbiddenFamily, k: usize, solution: &Option<VertexSet>) -> Result<(), SolveError> {
    match solution {
        Some(x) if x.len() > k || !x.is_subset(d.vertex_set()) || !check_solution(d, fam, x) => Err(
            SolveError::Invariant(format!("returned set {x:?} is not a deletion set of size ≤ {k}")),
        ),
        _ => Ok(()),
    }
}
