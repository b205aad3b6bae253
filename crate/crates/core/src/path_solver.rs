//! Families that contain a directed path.
//!
//! A strong component contains a member H exactly when D contains a good path
//! completion of H: H plus paths between its vertices, at most one path per
//! ordered endpoint pair, whose union is strongly connected. Completions that
//! only need paths shorter than the path member P are bounded in size and get
//! hit by plain branching; after that, hitting completions of P alone is
//! enough, which is the rooted problem `{P}`.

use std::collections::HashSet;
use std::ops::ControlFlow;

use crate::compression::{SolveError, SolveReport, SolveStats, SolverConfig};
use crate::core_solver;
use crate::digraph::Digraph;
use crate::patterns::{check_solution, for_each_embedding, Embedding, ForbiddenFamily, Pattern};
use crate::vset::VertexSet;

/// `host = image(H) ∪ paths`, with host on the ids of the graph it was found in.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathCompletionWitness {
    pub host: Digraph,
    pub base_embedding: Embedding,
    /// Vertex sequences; endpoints lie in the image, ordered endpoint pairs are distinct.
    pub paths: Vec<Vec<usize>>,
}

impl PathCompletionWitness {
    pub fn vertices(&self) -> VertexSet {
        self.host.vertex_set().clone()
    }

    /// Strongly connected, every path starts and ends in the image at
    /// distinct endpoints, no endpoint pair repeats, and the union is exactly
    /// the host.
    pub fn is_good(&self) -> bool {
        let image = self.base_embedding.vertices();
        let mut pairs = HashSet::new();
        let mut arcs: HashSet<(usize, usize)> = self
            .base_embedding
            .pattern
            .graph()
            .arcs()
            .map(|(a, b)| (self.base_embedding.image[a], self.base_embedding.image[b]))
            .collect();
        let mut verts = image.clone();
        for path in &self.paths {
            let (Some(&u), Some(&v)) = (path.first(), path.last()) else {
                return false;
            };
            let distinct: VertexSet = path.iter().collect();
            if u == v || distinct.len() != path.len() || !image.contains(u) || !image.contains(v) || !pairs.insert((u, v)) {
                return false;
            }
            verts.union_with(&distinct);
            arcs.extend(path.windows(2).map(|w| (w[0], w[1])));
        }
        let host_arcs: HashSet<(usize, usize)> = self.host.arcs().collect();
        verts == *self.host.vertex_set() && arcs == host_arcs && self.host.is_strongly_connected()
    }
}

fn subgraph(id_bound: usize, verts: &VertexSet, arcs: &HashSet<(usize, usize)>) -> Digraph {
    let mut list: Vec<(usize, usize)> = arcs.iter().copied().collect();
    list.sort_unstable();
    Digraph::new(id_bound, &list).expect("arcs come from a simple digraph").restrict_to(verts)
}

fn explicit(fam: &ForbiddenFamily) -> Result<&[Pattern], SolveError> {
    fam.patterns()
        .ok_or_else(|| SolveError::Unsupported("the path pipeline needs explicit patterns".into()))
}

/// Shortest `u → v` path in `d` with at most `max_len` arcs.
fn short_path(d: &Digraph, u: usize, v: usize, max_len: usize) -> Option<Vec<usize>> {
    let path = d.shortest_path(u, v)?;
    (path.len() - 1 <= max_len).then_some(path)
}

/// Grows `image(H)` by short paths between image vertices that are not yet
/// connected, until strongly connected. Each added pair was unreachable
/// before, so endpoint pairs never repeat.
fn greedy_completion(d: &Digraph, emb: &Embedding, max_len: usize) -> Option<PathCompletionWitness> {
    let image = emb.vertices();
    let mut verts = image.clone();
    let mut arcs: HashSet<(usize, usize)> = emb
        .pattern
        .graph()
        .arcs()
        .map(|(a, b)| (emb.image[a], emb.image[b]))
        .collect();
    let mut paths = Vec::new();
    loop {
        let host = subgraph(d.id_bound(), &verts, &arcs);
        if host.is_strongly_connected() {
            return Some(PathCompletionWitness {
                host,
                base_embedding: emb.clone(),
                paths,
            });
        }
        let next = image.iter().find_map(|u| {
            let reach = host.reachable_from(&VertexSet::singleton(u), &VertexSet::new());
            image
                .iter()
                .filter(|&v| v != u && !reach.contains(v))
                .find_map(|v| short_path(d, u, v, max_len))
        })?;
        verts.extend(next.iter().copied());
        arcs.extend(next.windows(2).map(|w| (w[0], w[1])));
        paths.push(next);
    }
}

/// A good completion of some member inside `d` whose paths all have at most
/// `max_len` arcs; `None` for `max_len` means unbounded.
pub fn completion_search(d: &Digraph, fam: &ForbiddenFamily, max_len: Option<usize>) -> Option<PathCompletionWitness> {
    let patterns = fam.patterns()?;
    let limit = max_len.unwrap_or(usize::MAX);
    patterns.iter().find_map(|p| {
        let mut found = None;
        let _ = for_each_embedding(d, p, None, true, |img| {
            let emb = Embedding {
                pattern: p.clone(),
                image: img.to_vec(),
            };
            match greedy_completion(d, &emb, limit) {
                Some(w) => {
                    found = Some(w);
                    ControlFlow::Break(())
                }
                None => ControlFlow::Continue(()),
            }
        });
        found
    })
}

/// A copy of a member of 𝓗⁻ₚ in `d`: a good completion whose paths have at
/// most p − 1 arcs.
pub fn hminus_witness_search(d: &Digraph, fam: &ForbiddenFamily, p: usize) -> Option<PathCompletionWitness> {
    completion_search(d, fam, Some(p.saturating_sub(1)))
}

/// Largest vertex count a 𝓗⁻ₚ member can have.
pub fn hminus_size_bound(h: usize, p: usize) -> usize {
    h + p.saturating_sub(1) * h * h
}

/// Whether `candidate` is exactly some member plus a good collection of paths.
pub fn gpc_membership(candidate: &Digraph, fam: &ForbiddenFamily) -> Option<PathCompletionWitness> {
    if candidate.vertex_count() == 0 || !candidate.is_strongly_connected() {
        return None;
    }
    let patterns = fam.patterns()?;
    patterns.iter().find_map(|p| {
        let mut found = None;
        let _ = for_each_embedding(candidate, p, None, false, |img| {
            let emb = Embedding {
                pattern: p.clone(),
                image: img.to_vec(),
            };
            match decompose(candidate, &emb) {
                Some(paths) => {
                    found = Some(PathCompletionWitness {
                        host: candidate.clone(),
                        base_embedding: emb,
                        paths,
                    });
                    ControlFlow::Break(())
                }
                None => ControlFlow::Continue(()),
            }
        });
        found
    })
}

/// Paths of `candidate` between distinct image vertices covering every arc
/// outside the embedded copy, one per endpoint pair.
fn decompose(candidate: &Digraph, emb: &Embedding) -> Option<Vec<Vec<usize>>> {
    let image = emb.vertices();
    let base: HashSet<(usize, usize)> = emb
        .pattern
        .graph()
        .arcs()
        .map(|(a, b)| (emb.image[a], emb.image[b]))
        .collect();
    let mut uncovered: Vec<(usize, usize)> = candidate.arcs().filter(|a| !base.contains(a)).collect();
    uncovered.sort_unstable();
    let loose = candidate.vertex_set().difference(&image);
    if uncovered.is_empty() {
        return loose.is_empty().then(Vec::new);
    }
    let mut all = Vec::new();
    for u in image.iter() {
        simple_paths(candidate, &image, vec![u], &mut VertexSet::singleton(u), &mut all);
    }
    let mut chosen = Vec::new();
    cover(&all, &uncovered, &mut HashSet::new(), &mut chosen).then_some(chosen)
}

fn simple_paths(d: &Digraph, image: &VertexSet, path: Vec<usize>, on: &mut VertexSet, out: &mut Vec<Vec<usize>>) {
    let last = *path.last().unwrap();
    if path.len() > 1 && image.contains(last) {
        out.push(path.clone());
    }
    for &v in d.out_neighbors(last) {
        if on.insert(v) {
            let mut next = path.clone();
            next.push(v);
            simple_paths(d, image, next, on, out);
            on.remove(v);
        }
    }
}

fn cover(
    all: &[Vec<usize>],
    uncovered: &[(usize, usize)],
    used: &mut HashSet<(usize, usize)>,
    chosen: &mut Vec<Vec<usize>>,
) -> bool {
    let Some(&arc) = uncovered.first() else {
        return true;
    };
    for path in all {
        let pair = (path[0], *path.last().unwrap());
        if used.contains(&pair) || !path.windows(2).any(|w| (w[0], w[1]) == arc) {
            continue;
        }
        let rest: Vec<(usize, usize)> = uncovered
            .iter()
            .copied()
            .filter(|&(a, b)| !path.windows(2).any(|w| (w[0], w[1]) == (a, b)))
            .collect();
        used.insert(pair);
        chosen.push(path.clone());
        if cover(all, &rest, used, chosen) {
            return true;
        }
        chosen.pop();
        used.remove(&pair);
    }
    false
}

/// One leaf of the 𝓗⁻ₚ branching: `graph = D − deleted`, free of 𝓗⁻ₚ copies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HminusLeaf {
    pub graph: Digraph,
    pub budget: usize,
    pub deleted: VertexSet,
}

/// Branches on the vertices of 𝓗⁻ₚ copies until none is left. `None` when
/// every branch runs out of budget with a copy still present.
pub fn make_hminus_free(d: &Digraph, fam: &ForbiddenFamily, k: usize) -> Result<Option<Vec<HminusLeaf>>, SolveError> {
    explicit(fam)?;
    let p = fam
        .shortest_path_member()
        .ok_or_else(|| SolveError::Unsupported("family has no directed-path member".into()))?;
    let mut leaves = Vec::new();
    let mut seen = HashSet::new();
    expand(d, fam, p, k, VertexSet::new(), &mut seen, &mut leaves);
    Ok((!leaves.is_empty()).then_some(leaves))
}

fn expand(
    d: &Digraph,
    fam: &ForbiddenFamily,
    p: usize,
    k: usize,
    deleted: VertexSet,
    seen: &mut HashSet<VertexSet>,
    leaves: &mut Vec<HminusLeaf>,
) {
    if !seen.insert(deleted.clone()) {
        return;
    }
    let Some(w) = hminus_witness_search(d, fam, p) else {
        leaves.push(HminusLeaf {
            graph: d.clone(),
            budget: k,
            deleted,
        });
        return;
    };
    if k == 0 {
        return;
    }
    for v in w.vertices().iter() {
        expand(&d.remove_vertex(v), fam, p, k - 1, deleted.with(v), seen, leaves);
    }
}

/// Deletion set of size ≤ k for a family with a directed-path member, or `None`.
pub fn solve_path_scc(d: &Digraph, fam: &ForbiddenFamily, k: usize) -> Result<Option<VertexSet>, SolveError> {
    Ok(solve_path_scc_with(d, fam, k, &SolverConfig::default())?.solution)
}

pub fn solve_path_scc_with(d: &Digraph, fam: &ForbiddenFamily, k: usize, config: &SolverConfig) -> Result<SolveReport, SolveError> {
    let p = fam
        .shortest_path_member()
        .ok_or_else(|| SolveError::Unsupported("family has no directed-path member".into()))?;
    let path_fam = ForbiddenFamily::path(p);
    let mut stats = SolveStats::default();
    let Some(leaves) = make_hminus_free(d, fam, k)? else {
        return Ok(SolveReport { solution: None, stats });
    };
    for leaf in leaves {
        let report = core_solver::solve_with(&leaf.graph, &path_fam, leaf.budget, config)?;
        stats.merge(&report.stats);
        if let Some(x) = report.solution {
            let x = x.union(&leaf.deleted);
            if x.len() > k || !check_solution(d, fam, &x) {
                return Err(SolveError::Invariant(format!("{x:?} fails the original family")));
            }
            return Ok(SolveReport {
                solution: Some(x),
                stats,
            });
        }
    }
    Ok(SolveReport { solution: None, stats })
}
