//! Dedicated branching for two families where the generic recursion is
//! overkill: 1-out-regular components (every strong component has maximum
//! out-degree ≤ 1 inside it) and components of at most `s` vertices.
//!
//! Both plug into the shared compression front end. A partitioned call
//! returns any W-disjoint deletion set of size ≤ k, not necessarily one that
//! cuts the forward paths between parts.

use std::collections::{HashSet, VecDeque};

use crate::compression::{self, PartitionSolver, PartitionedInstance, SolveError, SolveReport, SolveStats, SolverConfig};
use crate::digraph::Digraph;
use crate::patterns::{check_solution, ForbiddenFamily};
use crate::separators::{Lambda, Separator, SeparatorError, TerminalPair};
use crate::vset::VertexSet;

/// `(τ, T, 𝓛)` for the 1-out-regular recursion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OneOutRegState {
    pub pi: PartitionedInstance,
    pub t_set: VertexSet,
    pub l_set: VertexSet,
}

/// `(τ, 𝓛)` for the bounded-size recursion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundedSizeState {
    pub pi: PartitionedInstance,
    pub l_set: VertexSet,
    pub s: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BranchableObject {
    /// `u1` in R_min(S_1, T) with out-neighbours `u2 < u3`.
    Triple { u1: usize, u2: usize, u3: usize },
    /// Every vertex of R_max(S_1, T) has out-degree ≤ 1.
    AllDeg1InRmax,
    /// A minimum separator whose reach has out-degrees ≤ 1, with `u1` in the
    /// cut and `u2, u3` out-neighbours of `u1` outside T.
    SeparatorWithTriple { sep: Separator, u1: usize, u2: usize, u3: usize },
}

type Memo = HashSet<(VertexSet, Vec<VertexSet>, VertexSet, VertexSet, usize)>;

fn sorted_out(d: &Digraph, v: usize) -> Vec<usize> {
    let mut out = d.out_neighbors(v).to_vec();
    out.sort_unstable();
    out
}

fn lambda(d: &Digraph, s: &VertexSet, t: &VertexSet) -> Result<Lambda, SolveError> {
    if s.is_empty() || t.is_empty() {
        return Ok(Lambda::Finite(0));
    }
    Ok(TerminalPair::new(d, s.clone(), t.clone())?.lambda())
}

/// Drops every vertex outside `keep` that cannot reach `targets`. Such a
/// vertex lies on no path counted by any λ of the state, and its strong
/// component holds no vertex of W, so it is never part of a bad component.
fn prune(d: &Digraph, keep: &VertexSet, targets: &VertexSet) -> Digraph {
    let alive = d.reaching(targets, &VertexSet::new()).union(keep);
    if alive.is_superset(d.vertex_set()) {
        return d.clone();
    }
    d.restrict_to(&alive.intersection(d.vertex_set()))
}

/// `(R ∖ S_1) ∩ N⁻(S_1)` for a region whose vertices all have out-degree ≤ 1.
pub fn close_set(d: &Digraph, s1: &VertexSet, r: &VertexSet) -> Result<VertexSet, SolveError> {
    if !s1.is_subset(r) || !r.is_subset(d.vertex_set()) {
        return Err(SeparatorError::Contract("S_1 must lie in R and R in the graph".into()).into());
    }
    if let Some(v) = r.iter().find(|&v| d.out_degree(v) > 1) {
        return Err(SeparatorError::Contract(format!("vertex {v} of R has out-degree above 1")).into());
    }
    Ok(d.in_neighborhood(s1).intersection(&r.difference(s1)))
}

/// ∂(v): follow the unique out-arc chain from `v` through `R ∖ S_1`. A chain
/// that steps into S_1 gives its last vertex (a member of close(S_1, R)), one
/// that leaves R gives the vertex outside; dead ends and cycles give ∅.
pub fn boundary(d: &Digraph, s1: &VertexSet, r: &VertexSet, v: usize) -> VertexSet {
    let mut seen = VertexSet::singleton(v);
    let mut w = v;
    loop {
        let Some(&next) = d.out_neighbors(w).first() else {
            return VertexSet::new();
        };
        if s1.contains(next) {
            return VertexSet::singleton(w);
        }
        if !r.contains(next) {
            return VertexSet::singleton(next);
        }
        if !seen.insert(next) {
            return VertexSet::new();
        }
        w = next;
    }
}

/// One of the three branchable outcomes for `(S_1, T)`; needs λ(S_1, T) finite.
pub fn find_branchable_triple(state: &OneOutRegState) -> Result<BranchableObject, SolveError> {
    let d = &state.pi.d;
    let s1 = &state.pi.parts[0];
    let tp = TerminalPair::new(d, s1.clone(), state.t_set.clone())?;
    let cmin = tp.closest_min_separator()?;
    let cmax = tp.furthest_min_separator()?;
    if let Some(u1) = cmin.reach.iter().find(|&u| d.out_degree(u) >= 2) {
        let out = sorted_out(d, u1);
        return Ok(BranchableObject::Triple { u1, u2: out[0], u3: out[1] });
    }
    if cmax.reach.iter().all(|u| d.out_degree(u) <= 1) {
        return Ok(BranchableObject::AllDeg1InRmax);
    }
    // Push the cut forward one out-degree-1 vertex at a time.
    let Separator { mut cut, mut reach } = cmin;
    loop {
        let Some(u) = cut.iter().find(|&u| cmax.reach.contains(u)) else {
            return Err(SolveError::Invariant("greedy separator reached C_max without a degree-2 vertex".into()));
        };
        let out = sorted_out(d, u);
        match out.len() {
            0 => return Err(SolveError::Invariant(format!("cut vertex {u} has no out-neighbour"))),
            1 => {
                let next = out[0];
                if cut.contains(next) || reach.contains(next) {
                    return Err(SolveError::Invariant(format!("shifting {u} to {next} does not keep a minimum cut")));
                }
                cut.remove(u);
                cut.insert(next);
                reach.insert(u);
            }
            _ => {
                return Ok(BranchableObject::SeparatorWithTriple {
                    sep: Separator { cut, reach },
                    u1: u,
                    u2: out[0],
                    u3: out[1],
                })
            }
        }
    }
}

fn check_decrease(stats: &mut SolveStats, parent: Option<i64>, mu: i64, what: &str) -> Result<(), SolveError> {
    let Some(p) = parent else {
        return Ok(());
    };
    stats.measure_checks += 1;
    if mu < p {
        Ok(())
    } else {
        Err(SolveError::Invariant(format!("{what} measure went from {p} to {mu}")))
    }
}

fn checked_solution(pi: &PartitionedInstance, x: Option<VertexSet>) -> Result<Option<VertexSet>, SolveError> {
    if let Some(x) = &x {
        if x.len() > pi.k || !x.is_disjoint(&pi.w) || !check_solution(&pi.d, &pi.fam, x) {
            return Err(SolveError::Invariant(format!("{x:?} is not a W-disjoint deletion set of size ≤ {}", pi.k)));
        }
    }
    Ok(x)
}

enum Child {
    Delete(usize, OneOutRegState),
    Keep(OneOutRegState),
}

pub struct OneOutRegularSolver {
    fam: ForbiddenFamily,
    config: SolverConfig,
    stats: SolveStats,
}

impl OneOutRegularSolver {
    pub fn new(config: SolverConfig) -> Self {
        OneOutRegularSolver {
            fam: ForbiddenFamily::out_degree(1),
            config,
            stats: SolveStats::default(),
        }
    }

    pub fn into_stats(self) -> SolveStats {
        self.stats
    }

    fn run(
        &mut self,
        st: OneOutRegState,
        parent: Option<i64>,
        depth: usize,
        k0: usize,
        memo: &mut Memo,
    ) -> Result<Option<VertexSet>, SolveError> {
        self.stats.tick(self.config.node_limit)?;
        self.stats.reach_depth(depth);
        let OneOutRegState { mut pi, t_set, mut l_set } = st;
        let s1 = pi.parts[0].clone();
        let targets = t_set.union(&s1);
        if !s1.is_disjoint(&t_set) || !l_set.is_disjoint(&targets) {
            return Err(SolveError::Invariant("S_1, T and 𝓛 must be pairwise disjoint".into()));
        }
        pi.d = prune(&pi.d, &pi.w.union(&t_set).union(&l_set), &targets);
        if !self.is_free(&pi.d.restrict_to(&pi.w)) {
            return Ok(None);
        }
        let k = pi.k;
        let lam1 = match lambda(&pi.d, &s1, &t_set)? {
            Lambda::Finite(x) if x <= k => x,
            _ => return Ok(None),
        };
        let mut lam2 = 0;
        if !l_set.is_empty() {
            match lambda(&pi.d, &l_set, &targets)? {
                Lambda::Finite(0) => {
                    l_set = VertexSet::new();
                    pi.d = prune(&pi.d, &pi.w.union(&t_set), &targets);
                }
                Lambda::Finite(x) if x <= k => lam2 = x,
                _ => return Ok(None),
            }
        }
        let mu = 3 * k as i64 - lam1 as i64 - lam2 as i64;
        check_decrease(&mut self.stats, parent, mu, "3k − λ(S_1,T) − λ(𝓛,T∪S_1)")?;
        self.stats.measure_depth_bound = self.stats.measure_depth_bound.max(3 * k0);
        if self.is_free(&pi.d) {
            return Ok(Some(VertexSet::new()));
        }
        if k == 0 {
            return Ok(None);
        }
        if s1.len() > 3 * k0 + 3 {
            return Err(SolveError::Invariant(format!("|S_1| = {} exceeds 3k + 3 for k = {k0}", s1.len())));
        }
        let key = (pi.d.vertex_set().clone(), pi.parts.clone(), t_set.clone(), l_set.clone(), k);
        if memo.contains(&key) {
            return Ok(None);
        }
        let st = OneOutRegState { pi, t_set, l_set };
        let children = match self.children(&st)? {
            Ok(children) => children,
            Err(split_at) => {
                let r = self.split(&st, &split_at, depth, k0, memo)?;
                if r.is_none() {
                    memo.insert(key);
                }
                return Ok(r);
            }
        };
        for child in children {
            let r = match child {
                Child::Delete(v, c) => self.run(c, Some(mu), depth + 1, k0, memo)?.map(|x| x.with(v)),
                Child::Keep(c) => self.run(c, Some(mu), depth + 1, k0, memo)?,
            };
            if r.is_some() {
                return Ok(r);
            }
        }
        memo.insert(key);
        Ok(None)
    }

    /// Branches of the current node, or `Err(reach(S_1))` when S_1 reaches
    /// no vertex of a non-empty T and the instance splits.
    fn children(&self, st: &OneOutRegState) -> Result<Result<Vec<Child>, VertexSet>, SolveError> {
        let d = &st.pi.d;
        let s1 = &st.pi.parts[0];
        let t = &st.t_set;
        let targets = t.union(s1);
        let deletable = |v: usize| !targets.contains(v) && !st.pi.w.contains(v);
        let mut out = Vec::new();
        if !st.l_set.is_empty() {
            let c = first_of_cmax(d, &st.l_set, &targets)?;
            out.push(Child::Delete(c, delete(st, c)));
            out.push(Child::Keep(OneOutRegState {
                l_set: st.l_set.with(c),
                ..st.clone()
            }));
            return Ok(Ok(out));
        }
        if t.is_empty() {
            let Some([u1, u2, u3]) = component_triple(d, s1) else {
                return Ok(Ok(out));
            };
            let triple = [u1, u2, u3];
            let fresh: Vec<usize> = triple.into_iter().filter(|&u| !s1.contains(u)).collect();
            for &u in &fresh {
                out.push(Child::Delete(u, delete(st, u)));
            }
            for &u in &fresh {
                out.push(Child::Keep(OneOutRegState {
                    t_set: VertexSet::singleton(u),
                    ..st.clone()
                }));
            }
            for &u in &fresh {
                out.push(Child::Keep(OneOutRegState {
                    l_set: VertexSet::singleton(u),
                    ..st.clone()
                }));
            }
            return Ok(Ok(out));
        }
        let reach = d.reachable_from(s1, &VertexSet::new());
        if reach.is_disjoint(t) {
            return Ok(Err(reach));
        }
        let with_l = |u: usize| {
            Child::Keep(OneOutRegState {
                l_set: VertexSet::singleton(u),
                ..st.clone()
            })
        };
        match find_branchable_triple(st)? {
            BranchableObject::Triple { u1, u2, u3 } => {
                for u in [u1, u2, u3].into_iter().filter(|&u| deletable(u)) {
                    out.push(Child::Delete(u, delete(st, u)));
                }
                if !s1.contains(u1) {
                    out.push(Child::Keep(OneOutRegState {
                        t_set: t.with(u1),
                        ..st.clone()
                    }));
                }
                for u in [u1, u2, u3].into_iter().filter(|&u| !targets.contains(u)) {
                    out.push(with_l(u));
                }
            }
            BranchableObject::AllDeg1InRmax => {
                let tp = TerminalPair::new(d, s1.clone(), t.clone())?;
                let cmax = tp.furthest_min_separator()?;
                for c in close_set(d, s1, &cmax.reach)?.iter() {
                    out.push(Child::Delete(c, delete(st, c)));
                }
                let c = cmax
                    .cut
                    .first()
                    .ok_or_else(|| SolveError::Invariant("empty C_max with λ > 0".into()))?;
                out.push(Child::Delete(c, delete(st, c)));
                out.push(with_l(c));
                let mut promoted = st.clone();
                promoted.pi.parts[0].insert(c);
                promoted.pi.w.insert(c);
                out.push(Child::Keep(promoted));
            }
            BranchableObject::SeparatorWithTriple { sep, u1, u2, u3 } => {
                for c in close_set(d, s1, &sep.reach)?.iter() {
                    out.push(Child::Delete(c, delete(st, c)));
                }
                for u in [u1, u2, u3].into_iter().filter(|&u| deletable(u)) {
                    out.push(Child::Delete(u, delete(st, u)));
                }
                for u in [u1, u2, u3].into_iter().filter(|&u| !targets.contains(u)) {
                    out.push(with_l(u));
                }
            }
        }
        Ok(Ok(out))
    }

    /// S_1 reaches nothing of T: solve D[R_1] with part S_1 under ascending
    /// budgets, then the rest with the remaining parts.
    fn split(
        &mut self,
        st: &OneOutRegState,
        r1: &VertexSet,
        depth: usize,
        k0: usize,
        memo: &mut Memo,
    ) -> Result<Option<VertexSet>, SolveError> {
        let pi = &st.pi;
        let s1 = pi.parts[0].clone();
        let d1 = pi.d.restrict_to(r1);
        let d2 = pi.d.remove_vertices(r1);
        let rest: Vec<VertexSet> = pi.parts[1..].to_vec();
        for k1 in 0..=pi.k {
            let sub = OneOutRegState {
                pi: PartitionedInstance::new(d1.clone(), self.fam.clone(), vec![s1.clone()], k1),
                t_set: VertexSet::new(),
                l_set: VertexSet::new(),
            };
            let Some(x1) = self.run(sub, None, depth + 1, k0, memo)? else {
                continue;
            };
            if rest.is_empty() {
                return Ok(self.is_free(&d2).then_some(x1));
            }
            let t_set = pi.w.difference(&s1).difference(&rest[0]);
            let sub = OneOutRegState {
                pi: PartitionedInstance::new(d2, self.fam.clone(), rest, pi.k - x1.len()),
                t_set,
                l_set: VertexSet::new(),
            };
            return Ok(self.run(sub, None, depth + 1, k0, memo)?.map(|x2| x2.union(&x1)));
        }
        Ok(None)
    }
}

fn delete(st: &OneOutRegState, v: usize) -> OneOutRegState {
    let mut c = st.clone();
    c.pi.d = c.pi.d.remove_vertex(v);
    c.pi.k -= 1;
    c.t_set.remove(v);
    c.l_set.remove(v);
    c
}

fn first_of_cmax(d: &Digraph, s: &VertexSet, t: &VertexSet) -> Result<usize, SolveError> {
    TerminalPair::new(d, s.clone(), t.clone())?
        .furthest_min_separator()?
        .cut
        .first()
        .ok_or_else(|| SolveError::Invariant("empty C_max with λ > 0".into()))
}

/// Smallest `(u1, u2, u3)` with `u2 < u3` out-neighbours of `u1` in its own
/// strong component, not all three inside `s1`.
fn component_triple(d: &Digraph, s1: &VertexSet) -> Option<[usize; 3]> {
    let scc = d.scc_decompose();
    for u1 in d.vertices() {
        let inner: Vec<usize> = sorted_out(d, u1)
            .into_iter()
            .filter(|&v| scc.same_component(u1, v))
            .collect();
        for (i, &u2) in inner.iter().enumerate() {
            for &u3 in &inner[i + 1..] {
                if ![u1, u2, u3].iter().all(|&u| s1.contains(u)) {
                    return Some([u1, u2, u3]);
                }
            }
        }
    }
    None
}

impl PartitionSolver for OneOutRegularSolver {
    fn family(&self) -> &ForbiddenFamily {
        &self.fam
    }

    fn config(&self) -> &SolverConfig {
        &self.config
    }

    fn stats(&mut self) -> &mut SolveStats {
        &mut self.stats
    }

    fn fork(&self) -> Self {
        OneOutRegularSolver::new(self.config.clone())
    }

    fn solve_partitioned(&mut self, pi: &PartitionedInstance) -> Result<Option<VertexSet>, SolveError> {
        let t_set = pi.w.difference(&pi.parts[0]);
        let st = OneOutRegState {
            pi: pi.clone(),
            t_set,
            l_set: VertexSet::new(),
        };
        let x = self.run(st, None, 0, pi.k, &mut Memo::new())?;
        checked_solution(pi, x)
    }
}

/// Deletion set of size ≤ k leaving every strong component with maximum
/// out-degree ≤ 1, or `None`.
pub fn solve_one_out_regular(d: &Digraph, k: usize) -> Result<Option<VertexSet>, SolveError> {
    Ok(solve_one_out_regular_with(d, k, &SolverConfig::default())?.solution)
}

pub fn solve_one_out_regular_with(d: &Digraph, k: usize, config: &SolverConfig) -> Result<SolveReport, SolveError> {
    let mut solver = OneOutRegularSolver::new(config.clone());
    let solution = compression::with_pool(config.threads, || compression::iterative_compression(&mut solver, d, k))?;
    compression::verify(d, &solver.fam, k, &solution)?;
    Ok(SolveReport {
        solution,
        stats: solver.stats,
    })
}

pub struct BoundedSizeSolver {
    s: usize,
    fam: ForbiddenFamily,
    config: SolverConfig,
    stats: SolveStats,
}

impl BoundedSizeSolver {
    pub fn new(s: usize, config: SolverConfig) -> Result<Self, SolveError> {
        let fam = ForbiddenFamily::bounded_size(s).map_err(|e| SolveError::Unsupported(e.to_string()))?;
        Ok(BoundedSizeSolver {
            s,
            fam,
            config,
            stats: SolveStats::default(),
        })
    }

    pub fn into_stats(self) -> SolveStats {
        self.stats
    }

    fn run(
        &mut self,
        st: BoundedSizeState,
        parent: Option<i64>,
        depth: usize,
        k0: usize,
        memo: &mut Memo,
    ) -> Result<Option<VertexSet>, SolveError> {
        self.stats.tick(self.config.node_limit)?;
        self.stats.reach_depth(depth);
        let BoundedSizeState { mut pi, mut l_set, s } = st;
        if !l_set.is_disjoint(&pi.w) {
            return Err(SolveError::Invariant("𝓛 must avoid W".into()));
        }
        pi.d = prune(&pi.d, &pi.w.union(&l_set), &pi.w);
        if !self.is_free(&pi.d.restrict_to(&pi.w)) {
            return Ok(None);
        }
        let k = pi.k;
        let mut lam = 0;
        if !l_set.is_empty() {
            match lambda(&pi.d, &l_set, &pi.w)? {
                Lambda::Finite(0) => {
                    l_set = VertexSet::new();
                    pi.d = prune(&pi.d, &pi.w, &pi.w);
                }
                Lambda::Finite(x) if x <= k => lam = x,
                _ => return Ok(None),
            }
        }
        let mu = 2 * k as i64 - lam as i64;
        check_decrease(&mut self.stats, parent, mu, "2k − λ(𝓛,W)")?;
        self.stats.measure_depth_bound = self.stats.measure_depth_bound.max(2 * k0);
        if self.is_free(&pi.d) {
            return Ok(Some(VertexSet::new()));
        }
        if k == 0 {
            return Ok(None);
        }
        let key = (pi.d.vertex_set().clone(), pi.parts.clone(), VertexSet::new(), l_set.clone(), k);
        if memo.contains(&key) {
            return Ok(None);
        }
        let st = BoundedSizeState { pi, l_set, s };
        let r = self.branch(&st, mu, depth, k0, memo)?;
        if r.is_none() {
            memo.insert(key);
        }
        Ok(r)
    }

    fn branch(
        &mut self,
        st: &BoundedSizeState,
        mu: i64,
        depth: usize,
        k0: usize,
        memo: &mut Memo,
    ) -> Result<Option<VertexSet>, SolveError> {
        let d = &st.pi.d;
        let w = &st.pi.w;
        let s1 = &st.pi.parts[0];
        let mut deletions = Vec::new();
        let mut additions = Vec::new();
        if !st.l_set.is_empty() {
            let c = first_of_cmax(d, &st.l_set, w)?;
            deletions.push(c);
            additions.push(st.l_set.with(c));
        } else if let Some(tree) = s1.iter().find_map(|c| arborescence(d, c, st.s + 1)) {
            let outside: Vec<usize> = tree.into_iter().filter(|&v| !w.contains(v)).collect();
            deletions.extend(outside.iter().copied());
            additions.extend(outside.iter().map(|&v| VertexSet::singleton(v)));
        } else {
            // No vertex of S_1 reaches s + 1 vertices, so D[reach(S_1)] is
            // already fine and only the forward paths out of S_1 matter.
            let r1 = d.reachable_from(s1, &VertexSet::new());
            let others = w.difference(s1);
            if r1.is_disjoint(&others) {
                let rest: Vec<VertexSet> = st.pi.parts[1..].to_vec();
                let d2 = d.remove_vertices(&r1);
                if rest.is_empty() {
                    return Ok(self.is_free(&d2).then(VertexSet::new));
                }
                let sub = BoundedSizeState {
                    pi: PartitionedInstance::new(d2, self.fam.clone(), rest, st.pi.k),
                    l_set: VertexSet::new(),
                    s: st.s,
                };
                return self.run(sub, None, depth + 1, k0, memo);
            }
            deletions.extend(shortest_interior(d, s1, &others));
        }
        for v in deletions {
            let mut c = st.clone();
            c.pi.d = c.pi.d.remove_vertex(v);
            c.pi.k -= 1;
            c.l_set.remove(v);
            if let Some(x) = self.run(c, Some(mu), depth + 1, k0, memo)? {
                return Ok(Some(x.with(v)));
            }
        }
        for l_set in additions {
            let c = BoundedSizeState { l_set, ..st.clone() };
            if let Some(x) = self.run(c, Some(mu), depth + 1, k0, memo)? {
                return Ok(Some(x));
            }
        }
        Ok(None)
    }
}

/// The first `size` vertices discovered by BFS from `root`, if it reaches that many.
fn arborescence(d: &Digraph, root: usize, size: usize) -> Option<Vec<usize>> {
    let mut order = vec![root];
    let mut seen = VertexSet::singleton(root);
    let mut i = 0;
    while i < order.len() && order.len() < size {
        for v in sorted_out(d, order[i]) {
            if order.len() < size && seen.insert(v) {
                order.push(v);
            }
        }
        i += 1;
    }
    (order.len() >= size).then_some(order)
}

/// Interior vertices of a shortest path from `from` to `to`; empty when an
/// arc joins them directly or no path exists.
fn shortest_interior(d: &Digraph, from: &VertexSet, to: &VertexSet) -> Vec<usize> {
    let n = d.id_bound();
    let mut pred = vec![usize::MAX; n];
    let mut queue: VecDeque<usize> = from.iter().collect();
    let mut seen = from.clone();
    while let Some(u) = queue.pop_front() {
        for v in sorted_out(d, u) {
            if !seen.insert(v) {
                continue;
            }
            pred[v] = u;
            if to.contains(v) {
                let mut path = Vec::new();
                let mut cur = u;
                while !from.contains(cur) {
                    path.push(cur);
                    cur = pred[cur];
                }
                path.reverse();
                return path;
            }
            queue.push_back(v);
        }
    }
    Vec::new()
}

impl PartitionSolver for BoundedSizeSolver {
    fn family(&self) -> &ForbiddenFamily {
        &self.fam
    }

    fn config(&self) -> &SolverConfig {
        &self.config
    }

    fn stats(&mut self) -> &mut SolveStats {
        &mut self.stats
    }

    fn fork(&self) -> Self {
        BoundedSizeSolver {
            s: self.s,
            fam: self.fam.clone(),
            config: self.config.clone(),
            stats: SolveStats::default(),
        }
    }

    fn solve_partitioned(&mut self, pi: &PartitionedInstance) -> Result<Option<VertexSet>, SolveError> {
        let st = BoundedSizeState {
            pi: pi.clone(),
            l_set: VertexSet::new(),
            s: self.s,
        };
        let x = self.run(st, None, 0, pi.k, &mut Memo::new())?;
        checked_solution(pi, x)
    }
}

/// Deletion set of size ≤ k leaving strong components of at most `s` vertices.
pub fn solve_bounded_size(d: &Digraph, s: usize, k: usize) -> Result<Option<VertexSet>, SolveError> {
    Ok(solve_bounded_size_with(d, s, k, &SolverConfig::default())?.solution)
}

pub fn solve_bounded_size_with(d: &Digraph, s: usize, k: usize, config: &SolverConfig) -> Result<SolveReport, SolveError> {
    let mut solver = BoundedSizeSolver::new(s, config.clone())?;
    let solution = compression::with_pool(config.threads, || compression::iterative_compression(&mut solver, d, k))?;
    compression::verify(d, &solver.fam, k, &solution)?;
    Ok(SolveReport {
        solution,
        stats: solver.stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::brute_force_solve;

    fn g(n: usize, arcs: &[(usize, usize)]) -> Digraph {
        Digraph::new(n, arcs).unwrap()
    }

    fn set(v: &[usize]) -> VertexSet {
        v.iter().copied().collect()
    }

    #[test]
    fn chorded_cycle_needs_one() {
        let d = g(4, &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)]);
        let x = solve_one_out_regular(&d, 1).unwrap().unwrap();
        assert_eq!(x.len(), 1);
        assert!(check_solution(&d, &ForbiddenFamily::out_degree(1), &x));
        assert_eq!(solve_one_out_regular(&d, 0).unwrap(), None);
    }

    #[test]
    fn plain_cycle_is_already_fine() {
        let d = g(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]);
        assert_eq!(solve_one_out_regular(&d, 0).unwrap(), Some(VertexSet::new()));
    }

    #[test]
    fn two_chorded_cycles_need_two() {
        let d = g(
            8,
            &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 2), (4, 5), (5, 6), (6, 7), (7, 4), (4, 6)],
        );
        assert_eq!(solve_one_out_regular(&d, 1).unwrap(), None);
        assert_eq!(solve_one_out_regular(&d, 2).unwrap().unwrap().len(), 2);
    }

    #[test]
    fn triangle_bounded_size() {
        let d = g(3, &[(0, 1), (1, 2), (2, 0)]);
        assert_eq!(solve_bounded_size(&d, 2, 1).unwrap().unwrap().len(), 1);
        assert_eq!(solve_bounded_size(&d, 3, 0).unwrap(), Some(VertexSet::new()));
        assert_eq!(solve_bounded_size(&d, 2, 0).unwrap(), None);
    }

    #[test]
    fn close_set_examples() {
        // s ← a ← b, all out-degree 1
        let d = g(3, &[(1, 0), (2, 1)]);
        assert_eq!(close_set(&d, &set(&[0]), &set(&[0])).unwrap(), VertexSet::new());
        assert_eq!(close_set(&d, &set(&[0]), &set(&[0, 1, 2])).unwrap(), set(&[1]));
        assert!(close_set(&d, &set(&[0]), &set(&[1, 2])).is_err());
        let d = g(3, &[(0, 1), (1, 2), (2, 0)]);
        assert_eq!(close_set(&d, &set(&[0]), &set(&[0, 1, 2])).unwrap(), set(&[2]));
        // two loops through two S_1 vertices
        let d = g(6, &[(0, 2), (2, 3), (3, 0), (1, 4), (4, 5), (5, 1)]);
        let c = close_set(&d, &set(&[0, 1]), &set(&[0, 1, 2, 3, 4, 5])).unwrap();
        assert_eq!(c, set(&[3, 5]));
        let d = g(3, &[(0, 1), (0, 2)]);
        assert!(close_set(&d, &set(&[0]), &set(&[0, 1, 2])).is_err());
    }

    #[test]
    fn boundary_examples() {
        // s → a → b → c with R = {s, a, b}: the chain from a exits at c
        let d = g(4, &[(0, 1), (1, 2), (2, 3)]);
        assert_eq!(boundary(&d, &set(&[0]), &set(&[0, 1, 2]), 1), set(&[3]));
        // dead end inside R
        let d = g(3, &[(0, 1), (1, 2)]);
        assert_eq!(boundary(&d, &set(&[0]), &set(&[0, 1, 2]), 1), VertexSet::new());
        // chain closes back onto v
        let d = g(3, &[(0, 1), (1, 2), (2, 1)]);
        assert_eq!(boundary(&d, &set(&[0]), &set(&[0, 1, 2]), 1), VertexSet::new());
        // chain runs into S_1: the close vertex in front of it
        let d = g(3, &[(0, 1), (1, 2), (2, 0)]);
        assert_eq!(boundary(&d, &set(&[0]), &set(&[0, 1, 2]), 1), set(&[2]));
        assert_eq!(boundary(&d, &set(&[0]), &set(&[0, 1, 2]), 2), set(&[2]));
        // chain falls into a cycle that avoids v
        let d = g(4, &[(0, 1), (1, 2), (2, 3), (3, 2)]);
        assert_eq!(boundary(&d, &set(&[0]), &set(&[0, 1, 2, 3]), 1), VertexSet::new());
    }

    fn state(d: Digraph, s1: &[usize], t: &[usize]) -> OneOutRegState {
        let parts = vec![set(s1)];
        OneOutRegState {
            pi: PartitionedInstance::new(d, ForbiddenFamily::out_degree(1), parts, 3),
            t_set: set(t),
            l_set: VertexSet::new(),
        }
    }

    #[test]
    fn branchable_outcomes() {
        // chain 0 → 1 → 2 → 3, T = {3}
        let st = state(g(4, &[(0, 1), (1, 2), (2, 3)]), &[0], &[3]);
        assert_eq!(find_branchable_triple(&st).unwrap(), BranchableObject::AllDeg1InRmax);
        // 0 has two out-neighbours and sits in R_min
        let st = state(g(4, &[(0, 1), (0, 2), (1, 3), (2, 3)]), &[0], &[3]);
        assert_eq!(
            find_branchable_triple(&st).unwrap(),
            BranchableObject::Triple { u1: 0, u2: 1, u3: 2 }
        );
        // 0 → 1 → 2 → {3, 4} → 5 → 6, T = {6}: C_min = {1}, C_max = {5}
        let d = g(7, &[(0, 1), (1, 2), (2, 3), (2, 4), (3, 5), (4, 5), (5, 6)]);
        let st = state(d.clone(), &[0], &[6]);
        match find_branchable_triple(&st).unwrap() {
            BranchableObject::SeparatorWithTriple { sep, u1, u2, u3 } => {
                assert_eq!((u1, u2, u3), (2, 3, 4));
                assert_eq!(sep.cut, set(&[2]));
                let tp = TerminalPair::new(&d, set(&[0]), set(&[6])).unwrap();
                assert!(tp.is_separator(&sep.cut));
                assert_eq!(tp.lambda(), Lambda::Finite(sep.cut.len()));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn small_cases_match_oracle() {
        let one = ForbiddenFamily::out_degree(1);
        for seed in 0..150 {
            let d = crate::gen::gnp(6, 0.35, seed);
            for k in 0..=2 {
                let want = brute_force_solve(&d, &one, k, &VertexSet::new()).unwrap().is_some();
                assert_eq!(solve_one_out_regular(&d, k).unwrap().is_some(), want, "seed {seed} k {k}");
                for s in 1..=3 {
                    let fam = ForbiddenFamily::bounded_size(s).unwrap();
                    let want = brute_force_solve(&d, &fam, k, &VertexSet::new()).unwrap().is_some();
                    assert_eq!(solve_bounded_size(&d, s, k).unwrap().is_some(), want, "seed {seed} s {s} k {k}");
                }
            }
        }
    }
}
