//! Simple digraphs over dense integer ids.
//!
//! A [`Digraph`] owns an id space `0..id_bound()` and a set of live vertices
//! inside it. Removing vertices keeps ids stable, so vertex sets computed on a
//! graph stay meaningful on every graph derived from it. [`Digraph::induced`]
//! produces a compacted copy together with the id mapping when a dense graph
//! is wanted instead.

use std::fmt::Write as _;

use thiserror::Error;

use crate::vset::VertexSet;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("self-loop on vertex {0}")]
    SelfLoop(usize),
    #[error("parallel arc {0} -> {1}")]
    ParallelArc(usize, usize),
    #[error("vertex {v} out of range for a graph on {n} vertices")]
    OutOfRange { v: usize, n: usize },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

#[derive(Clone, PartialEq, Eq)]
pub struct Digraph {
    out: Vec<Vec<usize>>,
    inn: Vec<Vec<usize>>,
    alive: VertexSet,
    arc_count: usize,
}

impl std::fmt::Debug for Digraph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Digraph")
            .field("vertices", &self.alive)
            .field("arcs", &self.arcs().collect::<Vec<_>>())
            .finish()
    }
}

impl Digraph {
    /// Builds a simple digraph on `0..n`. Self-loops, parallel arcs and
    /// out-of-range endpoints are rejected.
    pub fn new(n: usize, arcs: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut out = vec![Vec::new(); n];
        let mut inn = vec![Vec::new(); n];
        for &(u, v) in arcs {
            for x in [u, v] {
                if x >= n {
                    return Err(GraphError::OutOfRange { v: x, n });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            out[u].push(v);
            inn[v].push(u);
        }
        for (u, list) in out.iter_mut().enumerate() {
            list.sort_unstable();
            if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
                return Err(GraphError::ParallelArc(u, w[0]));
            }
        }
        for list in &mut inn {
            list.sort_unstable();
        }
        Ok(Digraph {
            out,
            inn,
            alive: VertexSet::full(n),
            arc_count: arcs.len(),
        })
    }

    pub fn empty(n: usize) -> Self {
        Digraph::new(n, &[]).expect("no arcs")
    }

    /// Size of the id space; live vertices are a subset of `0..id_bound()`.
    pub fn id_bound(&self) -> usize {
        self.out.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.alive.len()
    }

    pub fn arc_count(&self) -> usize {
        self.arc_count
    }

    pub fn vertex_set(&self) -> &VertexSet {
        &self.alive
    }

    pub fn vertices(&self) -> impl Iterator<Item = usize> + '_ {
        self.alive.iter()
    }

    pub fn has_vertex(&self, v: usize) -> bool {
        self.alive.contains(v)
    }

    /// Out-neighbours in ascending order.
    pub fn out_neighbors(&self, v: usize) -> &[usize] {
        &self.out[v]
    }

    /// In-neighbours in ascending order.
    pub fn in_neighbors(&self, v: usize) -> &[usize] {
        &self.inn[v]
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.out[v].len()
    }

    pub fn has_arc(&self, u: usize, v: usize) -> bool {
        u < self.out.len() && self.out[u].binary_search(&v).is_ok()
    }

    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.vertices()
            .flat_map(move |u| self.out[u].iter().map(move |&v| (u, v)))
    }

    /// N⁺(set) ∖ set.
    pub fn out_neighborhood(&self, set: &VertexSet) -> VertexSet {
        let mut r = VertexSet::new();
        for u in set.iter().filter(|&u| self.has_vertex(u)) {
            r.extend(self.out[u].iter().copied());
        }
        r.difference_with(set);
        r
    }

    /// N⁻(set) ∖ set.
    pub fn in_neighborhood(&self, set: &VertexSet) -> VertexSet {
        let mut r = VertexSet::new();
        for u in set.iter().filter(|&u| self.has_vertex(u)) {
            r.extend(self.inn[u].iter().copied());
        }
        r.difference_with(set);
        r
    }

    pub fn reverse(&self) -> Digraph {
        Digraph {
            out: self.inn.clone(),
            inn: self.out.clone(),
            alive: self.alive.clone(),
            arc_count: self.arc_count,
        }
    }

    /// D − x with ids preserved.
    pub fn remove_vertices(&self, x: &VertexSet) -> Digraph {
        if x.is_disjoint(&self.alive) {
            return self.clone();
        }
        let alive = self.alive.difference(x);
        let mut arc_count = 0;
        let mut out = vec![Vec::new(); self.id_bound()];
        let mut inn = vec![Vec::new(); self.id_bound()];
        for u in alive.iter() {
            out[u] = self.out[u].iter().copied().filter(|&v| !x.contains(v)).collect();
            inn[u] = self.inn[u].iter().copied().filter(|&v| !x.contains(v)).collect();
            arc_count += out[u].len();
        }
        Digraph {
            out,
            inn,
            alive,
            arc_count,
        }
    }

    pub fn remove_vertex(&self, v: usize) -> Digraph {
        self.remove_vertices(&VertexSet::singleton(v))
    }

    /// D[keep] with ids preserved.
    pub fn restrict_to(&self, keep: &VertexSet) -> Digraph {
        self.remove_vertices(&self.alive.difference(keep))
    }

    /// D[keep] renumbered densely; `mapping[i]` is the id in `self` of the new vertex `i`.
    pub fn induced(&self, keep: &VertexSet) -> (Digraph, Vec<usize>) {
        let mapping: Vec<usize> = keep.iter().filter(|&v| self.has_vertex(v)).collect();
        let mut index = vec![usize::MAX; self.id_bound()];
        for (i, &v) in mapping.iter().enumerate() {
            index[v] = i;
        }
        let arcs: Vec<(usize, usize)> = mapping
            .iter()
            .flat_map(|&u| {
                let index = &index;
                self.out[u]
                    .iter()
                    .filter(move |&&v| index[v] != usize::MAX)
                    .map(move |&v| (index[u], index[v]))
            })
            .collect();
        let g = Digraph::new(mapping.len(), &arcs).expect("induced subgraph of a simple digraph");
        (g, mapping)
    }

    /// Adds a fresh vertex with id `id_bound()` and an arc into it from every
    /// live vertex of `preds`. Returns the new graph and the new id.
    pub fn with_sink(&self, preds: &VertexSet) -> (Digraph, usize) {
        let t = self.id_bound();
        let mut g = self.clone();
        g.out.push(Vec::new());
        g.inn.push(Vec::new());
        g.alive.insert(t);
        for u in preds.iter().filter(|&u| self.has_vertex(u)) {
            g.out[u].push(t);
            g.inn[t].push(u);
            g.arc_count += 1;
        }
        (g, t)
    }

    /// Vertices reachable from `sources` in D − removed, sources included.
    pub fn reachable_from(&self, sources: &VertexSet, removed: &VertexSet) -> VertexSet {
        bfs(&self.out, &self.alive, sources, removed)
    }

    /// Vertices that can reach `targets` in D − removed, targets included.
    pub fn reaching(&self, targets: &VertexSet, removed: &VertexSet) -> VertexSet {
        bfs(&self.inn, &self.alive, targets, removed)
    }

    /// BFS distances from `source` (usize::MAX when unreachable), with
    /// predecessor links for path recovery.
    pub fn bfs_tree(&self, source: usize) -> (Vec<usize>, Vec<usize>) {
        let n = self.id_bound();
        let mut dist = vec![usize::MAX; n];
        let mut pred = vec![usize::MAX; n];
        let mut queue = std::collections::VecDeque::new();
        dist[source] = 0;
        queue.push_back(source);
        while let Some(u) = queue.pop_front() {
            for &v in &self.out[u] {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    pred[v] = u;
                    queue.push_back(v);
                }
            }
        }
        (dist, pred)
    }

    /// A shortest path from `a` to `b` as a vertex sequence, if one exists.
    pub fn shortest_path(&self, a: usize, b: usize) -> Option<Vec<usize>> {
        let (dist, pred) = self.bfs_tree(a);
        if dist[b] == usize::MAX {
            return None;
        }
        let mut path = vec![b];
        let mut cur = b;
        while cur != a {
            cur = pred[cur];
            path.push(cur);
        }
        path.reverse();
        Some(path)
    }

    pub fn scc_decompose(&self) -> SccDecomposition {
        tarjan(self)
    }

    pub fn is_strongly_connected(&self) -> bool {
        self.vertex_count() <= 1 || self.scc_decompose().components.len() == 1
    }

    /// Edge-list text: `p <n> <m>` followed by one `<u> <v>` line per arc.
    /// Only meaningful for graphs whose id space is fully live.
    pub fn to_edge_list(&self) -> String {
        let mut s = format!("p {} {}\n", self.id_bound(), self.arc_count);
        for (u, v) in self.arcs() {
            writeln!(s, "{u} {v}").unwrap();
        }
        s
    }
}

fn bfs(adj: &[Vec<usize>], alive: &VertexSet, sources: &VertexSet, removed: &VertexSet) -> VertexSet {
    let mut seen = VertexSet::new();
    let mut stack = Vec::new();
    for s in sources.iter() {
        if alive.contains(s) && !removed.contains(s) && seen.insert(s) {
            stack.push(s);
        }
    }
    while let Some(u) = stack.pop() {
        for &v in &adj[u] {
            if !removed.contains(v) && seen.insert(v) {
                stack.push(v);
            }
        }
    }
    seen
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SccDecomposition {
    /// Components in topological order: arcs only go from earlier to later components.
    pub components: Vec<Vec<usize>>,
    /// Component index per id; `usize::MAX` for ids that are not live.
    pub component_of: Vec<usize>,
}

impl SccDecomposition {
    pub fn same_component(&self, u: usize, v: usize) -> bool {
        self.component_of[u] == self.component_of[v] && self.component_of[u] != usize::MAX
    }
}

/// Iterative Tarjan. Tarjan emits components sinks-first; the list is
/// reversed at the end to get topological order.
fn tarjan(g: &Digraph) -> SccDecomposition {
    let n = g.id_bound();
    const UNSEEN: usize = usize::MAX;
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut components = Vec::new();
    let mut next = 0;
    // (vertex, position in its out-list)
    let mut call: Vec<(usize, usize)> = Vec::new();

    for root in g.vertices() {
        if index[root] != UNSEEN {
            continue;
        }
        call.push((root, 0));
        index[root] = next;
        low[root] = next;
        next += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&(u, pos)) = call.last() {
            if let Some(&v) = g.out[u].get(pos) {
                call.last_mut().unwrap().1 += 1;
                if index[v] == UNSEEN {
                    index[v] = next;
                    low[v] = next;
                    next += 1;
                    stack.push(v);
                    on_stack[v] = true;
                    call.push((v, 0));
                } else if on_stack[v] {
                    low[u] = low[u].min(index[v]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[u]);
            }
            if low[u] == index[u] {
                let mut comp = Vec::new();
                loop {
                    let w = stack.pop().unwrap();
                    on_stack[w] = false;
                    comp.push(w);
                    if w == u {
                        break;
                    }
                }
                comp.sort_unstable();
                components.push(comp);
            }
        }
    }
    components.reverse();
    let mut component_of = vec![usize::MAX; n];
    for (i, comp) in components.iter().enumerate() {
        for &v in comp {
            component_of[v] = i;
        }
    }
    SccDecomposition {
        components,
        component_of,
    }
}

/// Parses the edge-list format. `#` lines and blank lines are ignored.
pub fn parse_edge_list(text: &str) -> Result<Digraph, GraphError> {
    let perr = |line: usize, message: String| GraphError::Parse { line, message };
    let mut header: Option<(usize, usize)> = None;
    let mut arcs = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        match header {
            None => {
                if fields.len() != 3 || fields[0] != "p" {
                    return Err(perr(line_no, format!("expected `p <n> <m>`, found `{line}`")));
                }
                let n = fields[1]
                    .parse()
                    .map_err(|_| perr(line_no, format!("bad vertex count `{}`", fields[1])))?;
                let m = fields[2]
                    .parse()
                    .map_err(|_| perr(line_no, format!("bad arc count `{}`", fields[2])))?;
                header = Some((n, m));
            }
            Some((n, _)) => {
                if fields.len() != 2 {
                    return Err(perr(line_no, format!("expected `<u> <v>`, found `{line}`")));
                }
                let mut ends = [0usize; 2];
                for (slot, f) in ends.iter_mut().zip(&fields) {
                    *slot = f
                        .parse()
                        .map_err(|_| perr(line_no, format!("bad vertex id `{f}`")))?;
                    if *slot >= n {
                        return Err(perr(line_no, format!("vertex {slot} out of range 0..{n}")));
                    }
                }
                if ends[0] == ends[1] {
                    return Err(perr(line_no, format!("self-loop on vertex {}", ends[0])));
                }
                arcs.push((ends[0], ends[1]));
            }
        }
    }
    let (n, m) = header.ok_or_else(|| perr(0, "missing `p <n> <m>` header".into()))?;
    if arcs.len() != m {
        return Err(perr(0, format!("header announces {m} arcs, found {}", arcs.len())));
    }
    Digraph::new(n, &arcs).map_err(|e| perr(0, e.to_string()))
}
