/*!
Directed vertex separators between terminal sets.

Minimum cuts are computed on the usual split network: every non-terminal
vertex `v` becomes an arc `v_in -> v_out` of capacity one, original arcs get
unbounded capacity and the terminal sets are glued to a super source and a
super sink. Augmenting paths are found by BFS, so computing λ costs
`O(λ · (n + m))`.

When λ = 0 the empty set is the only minimum separator; both the closest and
the furthest separator are then `∅` with reach equal to everything reachable
from `S`.
*/

use std::collections::{BTreeSet, VecDeque};

use thiserror::Error;

use crate::digraph::Digraph;
use crate::vset::VertexSet;

/// Size of a minimum separator, with `Infinite` when `S` has an arc into `T`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Lambda {
    Finite(usize),
    Infinite,
}

impl Lambda {
    pub fn finite(self) -> Option<usize> {
        match self {
            Lambda::Finite(x) => Some(x),
            Lambda::Infinite => None,
        }
    }

    pub fn exceeds(self, k: usize) -> bool {
        match self {
            Lambda::Finite(x) => x > k,
            Lambda::Infinite => true,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SeparatorError {
    #[error("terminal sets intersect")]
    OverlappingTerminals,
    #[error("terminal {0} is not a vertex of the graph")]
    MissingTerminal(usize),
    #[error("no separator exists: a source vertex has an arc into the sink set")]
    Infeasible,
    #[error("contract violation: {0}")]
    Contract(String),
}

/// A cut together with the set of vertices still reachable from the sources.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Separator {
    pub cut: VertexSet,
    pub reach: VertexSet,
}

impl Separator {
    pub fn size(&self) -> usize {
        self.cut.len()
    }

    /// `self` covers `other` when its reachable side contains the other's.
    pub fn covers(&self, other: &Separator) -> bool {
        self.reach.is_superset(&other.reach)
    }
}

pub fn covers(a: &Separator, b: &Separator) -> bool {
    a.covers(b)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TightCover {
    Successor(Separator),
    AtFurthest,
}

/// A host digraph with disjoint source and sink sets.
#[derive(Debug, Clone)]
pub struct TerminalPair<'g> {
    graph: &'g Digraph,
    source: VertexSet,
    sink: VertexSet,
}

impl<'g> TerminalPair<'g> {
    pub fn new(graph: &'g Digraph, source: VertexSet, sink: VertexSet) -> Result<Self, SeparatorError> {
        if !source.is_disjoint(&sink) {
            return Err(SeparatorError::OverlappingTerminals);
        }
        if let Some(v) = source.iter().chain(sink.iter()).find(|&v| !graph.has_vertex(v)) {
            return Err(SeparatorError::MissingTerminal(v));
        }
        Ok(TerminalPair { graph, source, sink })
    }

    pub fn graph(&self) -> &'g Digraph {
        self.graph
    }

    pub fn source(&self) -> &VertexSet {
        &self.source
    }

    pub fn sink(&self) -> &VertexSet {
        &self.sink
    }

    fn adjacent_terminals(&self) -> bool {
        self.source
            .iter()
            .any(|u| self.graph.out_neighbors(u).iter().any(|&v| self.sink.contains(v)))
    }

    pub fn lambda(&self) -> Lambda {
        if self.adjacent_terminals() {
            return Lambda::Infinite;
        }
        let mut net = SplitNetwork::build(self.graph, &self.source, &self.sink);
        Lambda::Finite(net.max_flow(usize::MAX))
    }

    /// `Some(λ)` when λ ≤ limit, `None` otherwise. Stops augmenting early.
    pub fn lambda_at_most(&self, limit: usize) -> Option<usize> {
        if self.adjacent_terminals() {
            return None;
        }
        let mut net = SplitNetwork::build(self.graph, &self.source, &self.sink);
        let f = net.max_flow(limit.saturating_add(1));
        (f <= limit).then_some(f)
    }

    /// Reach of `S` in D − cut.
    pub fn reach_of(&self, cut: &VertexSet) -> VertexSet {
        self.graph.reachable_from(&self.source, cut)
    }

    pub fn separator(&self, cut: VertexSet) -> Separator {
        let reach = self.reach_of(&cut);
        Separator { cut, reach }
    }

    pub fn is_separator(&self, cut: &VertexSet) -> bool {
        cut.is_disjoint(&self.source)
            && cut.is_disjoint(&self.sink)
            && self.reach_of(cut).is_disjoint(&self.sink)
    }

    /// The unique minimum separator covered by every other minimum separator.
    pub fn closest_min_separator(&self) -> Result<Separator, SeparatorError> {
        if self.adjacent_terminals() {
            return Err(SeparatorError::Infeasible);
        }
        let mut net = SplitNetwork::build(self.graph, &self.source, &self.sink);
        net.max_flow(usize::MAX);
        let cut = net.source_side_cut(self.graph, &self.source, &self.sink);
        Ok(self.separator(cut))
    }

    /// The unique minimum separator covering every other minimum separator.
    pub fn furthest_min_separator(&self) -> Result<Separator, SeparatorError> {
        if self.adjacent_terminals() {
            return Err(SeparatorError::Infeasible);
        }
        let rev = self.graph.reverse();
        let mut net = SplitNetwork::build(&rev, &self.sink, &self.source);
        net.max_flow(usize::MAX);
        let cut = net.source_side_cut(&rev, &self.sink, &self.source);
        Ok(self.separator(cut))
    }

    /// Checks the type invariants of a separator for this pair.
    pub fn validate(&self, sep: &Separator) -> Result<(), String> {
        if !sep.cut.is_disjoint(&self.source) || !sep.cut.is_disjoint(&self.sink) {
            return Err(format!("cut {:?} meets a terminal set", sep.cut));
        }
        let reach = self.reach_of(&sep.cut);
        if reach != sep.reach {
            return Err(format!("stored reach {:?} differs from {:?}", sep.reach, reach));
        }
        if !reach.is_disjoint(&self.sink) {
            return Err(format!("cut {:?} leaves a source-sink path", sep.cut));
        }
        Ok(())
    }

    fn require_minimum(&self, c: &Separator) -> Result<usize, SeparatorError> {
        self.validate(c).map_err(SeparatorError::Contract)?;
        let lambda = self.lambda().finite().ok_or(SeparatorError::Infeasible)?;
        if c.size() != lambda {
            return Err(SeparatorError::Contract(format!(
                "separator {:?} has size {} but λ = {lambda}",
                c.cut,
                c.size()
            )));
        }
        Ok(lambda)
    }

    /// A minimum separator tightly covering `c`, or `AtFurthest` when `c` is
    /// the furthest one. Ties are broken by the lexicographically smallest
    /// sorted cut.
    pub fn tight_cover_successor(&self, c: &Separator) -> Result<TightCover, SeparatorError> {
        let lambda = self.require_minimum(c)?;
        // Every strict cover of c reaches some v ∈ c; the closest minimum
        // separator of (R ∪ {v}, T) is the least such cover, so the tight
        // covers are the minimal elements among these candidates.
        let mut candidates: Vec<Separator> = Vec::new();
        for v in c.cut.iter() {
            let pushed = TerminalPair {
                graph: self.graph,
                source: c.reach.with(v),
                sink: self.sink.clone(),
            };
            if pushed.lambda_at_most(lambda) != Some(lambda) {
                continue;
            }
            let inner = pushed.closest_min_separator()?;
            let sep = self.separator(inner.cut);
            if !candidates.contains(&sep) {
                candidates.push(sep);
            }
        }
        let minimal: Vec<&Separator> = candidates
            .iter()
            .filter(|a| {
                !candidates
                    .iter()
                    .any(|b| b.reach != a.reach && a.reach.is_superset(&b.reach))
            })
            .collect();
        Ok(match minimal.into_iter().min_by(|a, b| a.cut.cmp_lex(&b.cut)) {
            Some(sep) => TightCover::Successor(sep.clone()),
            None => TightCover::AtFurthest,
        })
    }

    /// All important separators of size at most `k`, sorted by cut.
    pub fn important_separators(&self, k: usize) -> Vec<Separator> {
        let mut candidates = BTreeSet::new();
        enumerate_candidates(
            self.graph,
            self.source.clone(),
            &self.sink,
            k,
            VertexSet::new(),
            &mut candidates,
        );
        let mut out: Vec<Separator> = candidates
            .into_iter()
            .filter(|cut| self.is_important(cut))
            .map(|cut| self.separator(cut))
            .collect();
        out.sort_by(|a, b| a.size().cmp(&b.size()).then(a.cut.cmp_lex(&b.cut)));
        out
    }

    /// A separator is important iff it is the furthest minimum separator
    /// between its own reach and the sinks.
    pub fn is_important(&self, cut: &VertexSet) -> bool {
        if !self.is_separator(cut) {
            return false;
        }
        let reach = self.reach_of(cut);
        if self.graph.out_neighborhood(&reach) != *cut {
            return false;
        }
        let inner = TerminalPair {
            graph: self.graph,
            source: reach,
            sink: self.sink.clone(),
        };
        match inner.furthest_min_separator() {
            Ok(f) => f.cut == *cut,
            Err(_) => false,
        }
    }
}

/// Branching over the furthest minimum separator: its smallest vertex is
/// either cut (recurse on D − v with one less budget) or moved to the source
/// side. Leaves with λ = 0 yield the accumulated cut. Produces at most 4^k
/// candidates, a superset of the important separators.
fn enumerate_candidates(
    g: &Digraph,
    source: VertexSet,
    sink: &VertexSet,
    k: usize,
    taken: VertexSet,
    out: &mut BTreeSet<VertexSet>,
) {
    let tp = TerminalPair {
        graph: g,
        source,
        sink: sink.clone(),
    };
    let Some(lambda) = tp.lambda_at_most(k) else {
        return;
    };
    if lambda == 0 {
        out.insert(taken);
        return;
    }
    let far = tp.furthest_min_separator().expect("λ finite");
    let v = far.cut.first().expect("λ > 0");
    enumerate_candidates(&g.remove_vertex(v), far.reach.clone(), sink, k - 1, taken.with(v), out);
    enumerate_candidates(g, far.reach.with(v), sink, k, taken, out);
}

const INF: u32 = u32::MAX / 2;

struct Edge {
    to: usize,
    cap: u32,
}

/// Unit vertex-capacity network: node `2v` is `v_in`, `2v + 1` is `v_out`,
/// followed by a super source and a super sink.
struct SplitNetwork {
    edges: Vec<Edge>,
    adj: Vec<Vec<usize>>,
    source: usize,
    sink: usize,
}

impl SplitNetwork {
    fn build(g: &Digraph, s: &VertexSet, t: &VertexSet) -> Self {
        let n = g.id_bound();
        let mut net = SplitNetwork {
            edges: Vec::new(),
            adj: vec![Vec::new(); 2 * n + 2],
            source: 2 * n,
            sink: 2 * n + 1,
        };
        for v in g.vertices() {
            let terminal = s.contains(v) || t.contains(v);
            net.add(2 * v, 2 * v + 1, if terminal { INF } else { 1 });
            if s.contains(v) {
                net.add(net.source, 2 * v + 1, INF);
            }
            if t.contains(v) {
                net.add(2 * v, net.sink, INF);
            }
            for &w in g.out_neighbors(v) {
                net.add(2 * v + 1, 2 * w, INF);
            }
        }
        net
    }

    fn add(&mut self, from: usize, to: usize, cap: u32) {
        self.adj[from].push(self.edges.len());
        self.edges.push(Edge { to, cap });
        self.adj[to].push(self.edges.len());
        self.edges.push(Edge { to: from, cap: 0 });
    }

    /// Augments until no path remains or `limit` units have been pushed.
    /// Every augmenting path crosses a unit vertex arc, so each adds one.
    fn max_flow(&mut self, limit: usize) -> usize {
        let mut flow = 0;
        let mut parent = vec![usize::MAX; self.adj.len()];
        while flow < limit {
            parent.iter_mut().for_each(|p| *p = usize::MAX);
            let mut queue = VecDeque::from([self.source]);
            let mut found = false;
            'bfs: while let Some(u) = queue.pop_front() {
                for &e in &self.adj[u] {
                    let to = self.edges[e].to;
                    if self.edges[e].cap > 0 && parent[to] == usize::MAX && to != self.source {
                        parent[to] = e;
                        if to == self.sink {
                            found = true;
                            break 'bfs;
                        }
                        queue.push_back(to);
                    }
                }
            }
            if !found {
                break;
            }
            let mut v = self.sink;
            while v != self.source {
                let e = parent[v];
                self.edges[e].cap -= 1;
                self.edges[e ^ 1].cap += 1;
                v = self.edges[e ^ 1].to;
            }
            flow += 1;
        }
        flow
    }

    /// After a maximum flow: vertices whose in-node is residual-reachable
    /// from the source but whose out-node is not.
    fn source_side_cut(&self, g: &Digraph, s: &VertexSet, t: &VertexSet) -> VertexSet {
        let mut seen = vec![false; self.adj.len()];
        let mut stack = vec![self.source];
        seen[self.source] = true;
        while let Some(u) = stack.pop() {
            for &e in &self.adj[u] {
                let to = self.edges[e].to;
                if self.edges[e].cap > 0 && !seen[to] {
                    seen[to] = true;
                    stack.push(to);
                }
            }
        }
        g.vertices()
            .filter(|&v| !s.contains(v) && !t.contains(v) && seen[2 * v] && !seen[2 * v + 1])
            .collect()
    }
}
