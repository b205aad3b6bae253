//! Rooted-family solver: iterative compression, then per ordered partition a
//! depth-first branching on branch sets.
//!
//! A branch set is a vertex set disjoint from W that meets some solution
//! whenever a nice solution exists. For q = 1 it comes from a witness inside
//! one strong component plus the pushing sets of its vertices; for q > 1 it
//! comes from [`find_branch_set`] on an auxiliary instance.

use std::collections::HashSet;

pub use crate::compression::SolveReport;
use crate::compression::{
    self, cuts_forward_paths, packing_lower_bound, PartitionSolver, PartitionedInstance, SolveError, SolveStats,
    SolverConfig,
};
use crate::digraph::Digraph;
use crate::patterns::{check_solution, find_forbidden_subgraph, Embedding, FamilyKind, ForbiddenFamily};
use crate::separators::{Separator, SeparatorError, TerminalPair, TightCover};
use crate::vset::VertexSet;

/// What the partition loop would branch on next.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BranchStep {
    /// The empty set already solves the instance.
    Solved,
    /// No nice solution exists.
    Infeasible,
    Branch(VertexSet),
}

/// `(D^aux, S, W, k, S, T^aux, Q, N_Q)`. `t_set` holds T without the sentinel;
/// the sentinel is materialised by [`AuxiliaryInstance::d_aux`].
///
/// Children that restart with Q = ∅ keep the parent's augmented graph, so the
/// sentinel is fed by `fed ∪ n_q`, where `fed` collects every N_Q guessed on
/// the way down. All sentinels are sinks inside T, so one suffices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuxiliaryInstance {
    pub base: PartitionedInstance,
    pub s_set: VertexSet,
    pub t_set: VertexSet,
    pub q_set: VertexSet,
    pub n_q: VertexSet,
    pub fed: VertexSet,
}

impl AuxiliaryInstance {
    /// `(S_1, W ∖ S_1, ∅, ∅)`.
    pub fn initial(base: PartitionedInstance) -> Self {
        let s = base.parts[0].clone();
        let t = base.w.difference(&s);
        AuxiliaryInstance {
            base,
            s_set: s,
            t_set: t,
            q_set: VertexSet::new(),
            n_q: VertexSet::new(),
            fed: VertexSet::new(),
        }
    }

    /// The graph with sentinel `t_aux` fed by N_Q, and the sentinel's id.
    pub fn d_aux(&self) -> (Digraph, usize) {
        self.base.d.with_sink(&self.fed.union(&self.n_q))
    }

    pub fn check_invariants(&self) -> Result<(), String> {
        let node = Node::of(self);
        node.check(&self.base)
    }
}

#[derive(Debug, Clone)]
struct Node {
    s: VertexSet,
    t: VertexSet,
    q: VertexSet,
    nq: VertexSet,
    fed: VertexSet,
}

impl Node {
    fn of(ai: &AuxiliaryInstance) -> Self {
        Node {
            s: ai.s_set.clone(),
            t: ai.t_set.clone(),
            q: ai.q_set.clone(),
            nq: ai.n_q.clone(),
            fed: ai.fed.clone(),
        }
    }

    fn d_aux(&self, pi: &PartitionedInstance) -> (Digraph, usize) {
        pi.d.with_sink(&self.fed.union(&self.nq))
    }

    /// Fresh start with Q = ∅ on the current augmented graph.
    fn restart(&self, s: VertexSet, t: VertexSet) -> Node {
        Node {
            s,
            t,
            q: VertexSet::new(),
            nq: VertexSet::new(),
            fed: self.fed.union(&self.nq),
        }
    }

    fn check(&self, pi: &PartitionedInstance) -> Result<(), String> {
        let s1 = &pi.parts[0];
        let rest_w = pi.w.difference(s1);
        if !s1.is_subset(&self.s) || !self.s.is_disjoint(&rest_w) || !rest_w.is_subset(&self.t) {
            return Err(format!("terminal sets S={:?} T={:?} do not frame W", self.s, self.t));
        }
        let (daux, sink) = self.d_aux(pi);
        let nplus = daux.out_neighborhood(&self.q);
        if nplus.contains(sink) {
            return Err("Q has an arc into the sentinel".into());
        }
        if self.q.is_empty() {
            if !self.nq.is_empty() {
                return Err("N_Q without Q".into());
            }
            return Ok(());
        }
        if !self.s.is_subset(&self.q) || !self.q.is_disjoint(&self.t) {
            return Err(format!("Q={:?} does not sit between S and T", self.q));
        }
        if find_forbidden_subgraph(&pi.d, &pi.fam, Some(&self.q), true).is_some() {
            return Err(format!("Q={:?} is not root-free", self.q));
        }
        let tp = TerminalPair::new(&daux, self.s.clone(), self.t.with(sink)).map_err(|e| e.to_string())?;
        if !tp.is_separator(&nplus) || tp.lambda().finite() != Some(nplus.len()) {
            return Err(format!("N+(Q)={nplus:?} is not a minimum separator"));
        }
        if !self.nq.is_subset(&nplus) {
            return Err("N_Q escapes N+(Q)".into());
        }
        Ok(())
    }
}

/// How a child's measure must relate to its parent's.
#[derive(Debug, Clone, Copy)]
enum Edge {
    Root,
    NoIncrease,
    Drop(i64),
}

fn measure(k: usize, lambda: usize, nq: usize) -> i64 {
    let (k, l) = (k as i64, lambda as i64);
    k * k + k - l * l - nq as i64
}

/// Rooted-family branching solver.
#[derive(Debug, Clone)]
pub struct RootedSolver {
    fam: ForbiddenFamily,
    config: SolverConfig,
    stats: SolveStats,
}

impl RootedSolver {
    pub fn new(fam: ForbiddenFamily, config: SolverConfig) -> Result<Self, SolveError> {
        if fam.kind() != FamilyKind::AllRooted && !fam.is_rooted() {
            return Err(SolveError::Unsupported("every member must be rooted".into()));
        }
        Ok(RootedSolver {
            fam,
            config,
            stats: SolveStats::default(),
        })
    }

    pub fn into_stats(self) -> SolveStats {
        self.stats
    }

    fn solve_pc(
        &mut self,
        d: &Digraph,
        parts: &[VertexSet],
        w: &VertexSet,
        k: usize,
        depth: usize,
        failed: &mut HashSet<(VertexSet, Vec<VertexSet>, usize)>,
    ) -> Result<Option<VertexSet>, SolveError> {
        self.stats.tick(self.config.node_limit)?;
        self.stats.reach_depth(depth);
        let empty = VertexSet::new();
        if cuts_forward_paths(d, parts, &empty) && check_solution(d, &self.fam, &empty) {
            return Ok(Some(empty));
        }
        if k == 0 {
            return Ok(None);
        }
        let key = (d.vertex_set().clone(), parts.to_vec(), k);
        if failed.contains(&key) {
            return Ok(None);
        }
        if packing_lower_bound(d, &self.fam, k) > k {
            failed.insert(key);
            return Ok(None);
        }
        let found = match self.step(d, parts, w, k)? {
            Step::Split(r1) => self.solve_split(d, parts, w, k, &r1, depth, failed)?,
            Step::Infeasible => None,
            Step::Branch(z) => {
                let mut found = None;
                for v in z.iter() {
                    if let Some(x) = self.solve_pc(&d.remove_vertex(v), parts, w, k - 1, depth + 1, failed)? {
                        found = Some(x.with(v));
                        break;
                    }
                }
                found
            }
        };
        if found.is_none() {
            failed.insert(key);
        }
        Ok(found)
    }

    /// S_1 reaches nothing else of W: the reach closure R_1 of S_1 separates
    /// cleanly, so the two sides are solved one after the other.
    #[allow(clippy::too_many_arguments)]
    fn solve_split(
        &mut self,
        d: &Digraph,
        parts: &[VertexSet],
        w: &VertexSet,
        k: usize,
        r1: &VertexSet,
        depth: usize,
        failed: &mut HashSet<(VertexSet, Vec<VertexSet>, usize)>,
    ) -> Result<Option<VertexSet>, SolveError> {
        let d1 = d.restrict_to(r1);
        let d2 = d.remove_vertices(r1);
        let s1 = &parts[0];
        for k1 in 0..=k {
            if let Some(x1) = self.solve_pc(&d1, &parts[..1], s1, k1, depth + 1, failed)? {
                let rest = self.solve_pc(&d2, &parts[1..], &w.difference(s1), k - x1.len(), depth + 1, failed)?;
                return Ok(rest.map(|x2| x2.union(&x1)));
            }
        }
        Ok(None)
    }

    fn step(&mut self, d: &Digraph, parts: &[VertexSet], w: &VertexSet, k: usize) -> Result<Step, SolveError> {
        let s1 = &parts[0];
        if parts.len() == 1 {
            let z = base_branch_set(d, &self.fam, w, k)?;
            return Ok(match z {
                Some(z) => Step::Branch(z),
                None => Step::Infeasible,
            });
        }
        let r1 = d.reachable_from(s1, &VertexSet::new());
        if r1.is_disjoint(&w.difference(s1)) {
            return Ok(Step::Split(r1));
        }
        let pi = PartitionedInstance {
            d: d.clone(),
            fam: self.fam.clone(),
            parts: parts.to_vec(),
            w: w.clone(),
            k,
        };
        let start = Node {
            s: s1.clone(),
            t: w.difference(s1),
            q: VertexSet::new(),
            nq: VertexSet::new(),
            fed: VertexSet::new(),
        };
        Ok(match self.fbs(&pi, start, Edge::Root, None, 0, 0)? {
            Some(z) => Step::Branch(z.difference(w)),
            None => Step::Infeasible,
        })
    }

    /// One recursion node of the branch-set search. `parent` carries the
    /// parent's measure; `mdepth` counts measure-decreasing edges so far.
    fn fbs(
        &mut self,
        pi: &PartitionedInstance,
        node: Node,
        edge: Edge,
        parent: Option<i64>,
        mdepth: usize,
        depth: usize,
    ) -> Result<Option<VertexSet>, SolveError> {
        self.stats.tick(self.config.node_limit)?;
        self.stats.reach_depth(depth);
        let k = pi.k;
        if !node.s.is_disjoint(&node.t) {
            return Ok(None);
        }
        if cfg!(debug_assertions) {
            node.check(pi).map_err(SolveError::Invariant)?;
        }
        let (daux, sink) = node.d_aux(pi);
        let tp = TerminalPair::new(&daux, node.s.clone(), node.t.with(sink))?;
        let Some(lambda) = tp.lambda_at_most(k) else {
            return Ok(None);
        };
        let mu = measure(k, lambda, node.nq.len());
        self.check_measure(edge, parent, mu, mdepth, k)?;
        if k == 0 {
            return Ok(check_solution(&pi.d, &pi.fam, &VertexSet::new()).then(VertexSet::new));
        }
        let nplus = daux.out_neighborhood(&node.q);
        if mu <= 0 || node.nq.len() == lambda {
            return Ok(Some(nplus));
        }

        let mut z = VertexSet::new();
        let mut children: Vec<(Node, Edge)> = Vec::new();
        if node.q.is_empty() {
            let cmin = tp.closest_min_separator()?;
            match rooted_witness(pi, &cmin.reach) {
                None => children.push((
                    Node {
                        q: cmin.reach,
                        ..node.clone()
                    },
                    Edge::NoIncrease,
                )),
                Some((f, r)) => {
                    children.push((
                        node.restart(node.s.clone(), node.t.with(r)),
                        Edge::NoIncrease,
                    ));
                    z.union_with(&witness_pushing_set(pi, &f)?);
                }
            }
        } else {
            let current = Separator {
                cut: nplus.clone(),
                reach: node.q.clone(),
            };
            let open = nplus.difference(&node.nq);
            match tp.tight_cover_successor(&current)? {
                TightCover::AtFurthest => {
                    z.union_with(&nplus);
                    for v in open.iter() {
                        children.push((
                            node.restart(node.s.with(v), node.t.clone()),
                            Edge::Drop(lambda as i64 + 1),
                        ));
                    }
                }
                TightCover::Successor(next) => match rooted_witness(pi, &next.reach) {
                    None => children.push((
                        Node {
                            q: next.reach,
                            ..node.clone()
                        },
                        Edge::NoIncrease,
                    )),
                    Some((f, r)) => {
                        children.push((
                            node.restart(node.s.union(&open), node.t.with(r)),
                            Edge::Drop(lambda as i64 + 1),
                        ));
                        for v in open.iter() {
                            children.push((
                                Node {
                                    nq: node.nq.with(v),
                                    ..node.clone()
                                },
                                Edge::Drop(1),
                            ));
                        }
                        z.union_with(&witness_pushing_set(pi, &f)?);
                    }
                },
            }
        }

        if children.len() > k + 1 {
            return Err(SolveError::Invariant(format!(
                "branching width {} exceeds k + 1 = {}",
                children.len(),
                k + 1
            )));
        }
        self.stats.max_width = self.stats.max_width.max(children.len());
        for (child, e) in children {
            let md = match e {
                Edge::Drop(_) => mdepth + 1,
                _ => mdepth,
            };
            if let Some(part) = self.fbs(pi, child, e, Some(mu), md, depth + 1)? {
                z.union_with(&part);
            }
        }
        Ok(Some(z))
    }

    fn check_measure(&mut self, edge: Edge, parent: Option<i64>, mu: i64, mdepth: usize, k: usize) -> Result<(), SolveError> {
        let bound = k * k + k;
        self.stats.measure_depth_bound = self.stats.measure_depth_bound.max(bound);
        self.stats.max_measure_depth = self.stats.max_measure_depth.max(mdepth);
        if mdepth > bound {
            return Err(SolveError::Invariant(format!(
                "measure depth {mdepth} exceeds k² + k = {bound}"
            )));
        }
        let Some(p) = parent else {
            return Ok(());
        };
        self.stats.measure_checks += 1;
        let ok = match edge {
            Edge::Root => true,
            Edge::NoIncrease => mu <= p,
            Edge::Drop(by) => mu <= p - by,
        };
        if ok {
            Ok(())
        } else {
            Err(SolveError::Invariant(format!(
                "measure went from {p} to {mu} across a {edge:?} edge"
            )))
        }
    }
}

enum Step {
    Split(VertexSet),
    Infeasible,
    Branch(VertexSet),
}

/// A copy inside one strong component with some root image in `region`,
/// plus the smallest such root image. Copies that straddle components are
/// skipped: a vertex of such a copy may have no path to W at all, and then
/// its pushing set is empty and carries no information.
fn rooted_witness(pi: &PartitionedInstance, region: &VertexSet) -> Option<(Embedding, usize)> {
    let f = find_forbidden_subgraph(&pi.d, &pi.fam, Some(region), true)?;
    let r = f.root_images().filter(|&r| region.contains(r)).min()?;
    Some((f, r))
}

/// V(F) together with the pushing sets of its vertices.
fn witness_pushing_set(pi: &PartitionedInstance, f: &Embedding) -> Result<VertexSet, SolveError> {
    let mut z = f.vertices();
    for u in f.vertices().iter() {
        z.union_with(&pushing_routine_2(pi, u)?);
    }
    Ok(z)
}

/// For q = 1: V(F) of a copy inside one strong component plus the pushing
/// sets of its vertices, minus W. `None` if no copy exists.
fn base_branch_set(d: &Digraph, fam: &ForbiddenFamily, w: &VertexSet, k: usize) -> Result<Option<VertexSet>, SolveError> {
    let Some(f) = find_forbidden_subgraph(d, fam, None, true) else {
        return Ok(None);
    };
    let pi = PartitionedInstance {
        d: d.clone(),
        fam: fam.clone(),
        parts: vec![w.clone()],
        w: w.clone(),
        k,
    };
    Ok(Some(witness_pushing_set(&pi, &f)?.difference(w)))
}

/// Union of all important {u}-W separators of size ≤ k, in D and in the
/// reverse graph. Empty when `u ∈ W`.
pub fn pushing_routine_2(pi: &PartitionedInstance, u: usize) -> Result<VertexSet, SolveError> {
    let mut z = VertexSet::new();
    if pi.w.contains(u) {
        return Ok(z);
    }
    let src = VertexSet::singleton(u);
    let forward = !pi.d.reachable_from(&src, &VertexSet::new()).is_disjoint(&pi.w);
    let backward = !pi.d.reaching(&src, &VertexSet::new()).is_disjoint(&pi.w);
    if !forward && !backward {
        return Err(SeparatorError::Contract(format!("vertex {u} is not connected to W in either direction")).into());
    }
    if forward {
        let tp = TerminalPair::new(&pi.d, src.clone(), pi.w.clone())?;
        for sep in tp.important_separators(pi.k) {
            z.union_with(&sep.cut);
        }
    }
    if backward {
        let rev = pi.d.reverse();
        let tp = TerminalPair::new(&rev, src, pi.w.clone())?;
        for sep in tp.important_separators(pi.k) {
            z.union_with(&sep.cut);
        }
    }
    Ok(z)
}

impl PartitionSolver for RootedSolver {
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
        RootedSolver {
            fam: self.fam.clone(),
            config: self.config.clone(),
            stats: SolveStats::default(),
        }
    }

    fn solve_partitioned(&mut self, pi: &PartitionedInstance) -> Result<Option<VertexSet>, SolveError> {
        let mut failed = HashSet::new();
        let x = self.solve_pc(&pi.d, &pi.parts, &pi.w, pi.k, 0, &mut failed)?;
        if let Some(x) = &x {
            if !pi.is_solution(x) {
                return Err(SolveError::Invariant(format!("{x:?} is not a solution of the partitioned instance")));
            }
        }
        Ok(x)
    }
}

/// Deletion set of size ≤ k for a rooted family, or `None`.
pub fn solve(d: &Digraph, fam: &ForbiddenFamily, k: usize) -> Result<Option<VertexSet>, SolveError> {
    Ok(solve_with(d, fam, k, &SolverConfig::default())?.solution)
}

pub fn solve_with(d: &Digraph, fam: &ForbiddenFamily, k: usize, config: &SolverConfig) -> Result<SolveReport, SolveError> {
    let mut solver = RootedSolver::new(fam.clone(), config.clone())?;
    let solution = compression::with_pool(config.threads, || compression::iterative_compression(&mut solver, d, k))?;
    compression::verify(d, fam, k, &solution)?;
    Ok(SolveReport {
        solution,
        stats: solver.stats,
    })
}

/// A deletion set of size ≤ k disjoint from `w`, given that `w` is one.
pub fn solve_disjoint_compression(
    d: &Digraph,
    fam: &ForbiddenFamily,
    w: &VertexSet,
    k: usize,
) -> Result<Option<VertexSet>, SolveError> {
    let mut solver = RootedSolver::new(fam.clone(), SolverConfig::default())?;
    compression::disjoint_compression(&mut solver, d, w, k)
}

pub fn solve_partitioned(pi: &PartitionedInstance) -> Result<Option<VertexSet>, SolveError> {
    RootedSolver::new(pi.fam.clone(), SolverConfig::default())?.solve_partitioned(pi)
}

/// The q = 1 case: branch on a witness and its pushing sets.
pub fn base_case_q1(pi: &PartitionedInstance) -> Result<Option<VertexSet>, SolveError> {
    if pi.parts.len() != 1 {
        return Err(SolveError::Invariant(format!("base case needs one part, got {}", pi.parts.len())));
    }
    solve_partitioned(pi)
}

/// Runs the branch-set recursion on an auxiliary instance. `None` means the
/// auxiliary instance provably has no solution.
pub fn find_branch_set(ai: &AuxiliaryInstance) -> Result<Option<VertexSet>, SolveError> {
    find_branch_set_with_stats(ai).map(|(z, _)| z)
}

pub fn find_branch_set_with_stats(ai: &AuxiliaryInstance) -> Result<(Option<VertexSet>, SolveStats), SolveError> {
    if ai.base.parts.len() < 2 {
        return Err(SolveError::Invariant("the branch-set recursion needs q > 1".into()));
    }
    let mut solver = RootedSolver::new(ai.base.fam.clone(), SolverConfig::default())?;
    let z = solver.fbs(&ai.base, Node::of(ai), Edge::Root, None, 0, 0)?;
    Ok((z.map(|z| z.difference(&ai.base.w)), solver.stats))
}

/// The set the partition loop branches on for `pi`, following the same
/// dispatch as [`solve_partitioned`]: base case for q = 1, a split when S_1
/// reaches no other part, the auxiliary recursion otherwise.
pub fn branch_set(pi: &PartitionedInstance) -> Result<BranchStep, SolveError> {
    let mut solver = RootedSolver::new(pi.fam.clone(), SolverConfig::default())?;
    solver.branch_step(&pi.d, &pi.parts, &pi.w, pi.k)
}

impl RootedSolver {
    fn branch_step(&mut self, d: &Digraph, parts: &[VertexSet], w: &VertexSet, k: usize) -> Result<BranchStep, SolveError> {
        let empty = VertexSet::new();
        if cuts_forward_paths(d, parts, &empty) && check_solution(d, &self.fam, &empty) {
            return Ok(BranchStep::Solved);
        }
        if k == 0 {
            return Ok(BranchStep::Infeasible);
        }
        match self.step(d, parts, w, k)? {
            Step::Infeasible => Ok(BranchStep::Infeasible),
            Step::Branch(z) => Ok(BranchStep::Branch(z)),
            Step::Split(r1) => {
                let d1 = d.restrict_to(&r1);
                match self.branch_step(&d1, &parts[..1], &parts[0], k)? {
                    BranchStep::Solved => {
                        self.branch_step(&d.remove_vertices(&r1), &parts[1..], &w.difference(&parts[0]), k)
                    }
                    other => Ok(other),
                }
            }
        }
    }
}
