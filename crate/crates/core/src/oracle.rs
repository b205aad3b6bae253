//! Exhaustive reference implementations.
//!
//! Everything here enumerates subsets or tuples directly from the definitions
//! and shares no search code with the solvers (only the graph container and
//! plain reachability). Size guards turn accidental exponential blow-ups into
//! errors.

use thiserror::Error;

use crate::compression::PartitionedInstance;
use crate::digraph::Digraph;
use crate::patterns::{ForbiddenFamily, Pattern};
use crate::vset::VertexSet;

/// Upper bound on the number of candidate sets any oracle call may enumerate.
pub const ENUMERATION_LIMIT: u128 = 10_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("instance too large for exhaustive search: {candidates} candidate sets exceed {limit}")]
    TooLarge { candidates: u128, limit: u128 },
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

fn guard(n: usize, k: usize) -> Result<(), OracleError> {
    let candidates: u128 = (0..=k.min(n)).map(|i| binomial(n, i)).sum();
    if candidates > ENUMERATION_LIMIT {
        return Err(OracleError::TooLarge {
            candidates,
            limit: ENUMERATION_LIMIT,
        });
    }
    Ok(())
}

/// Subsets of `pool` of size at most `k`, by size and then lexicographically.
fn subsets_up_to(pool: &[usize], k: usize, mut f: impl FnMut(&VertexSet) -> bool) {
    fn rec(pool: &[usize], start: usize, left: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&VertexSet) -> bool) -> bool {
        if left == 0 {
            return f(&cur.iter().collect());
        }
        for i in start..pool.len() {
            if pool.len() - i < left {
                break;
            }
            cur.push(pool[i]);
            let stop = rec(pool, i + 1, left - 1, cur, f);
            cur.pop();
            if stop {
                return true;
            }
        }
        false
    }
    for size in 0..=k.min(pool.len()) {
        if rec(pool, 0, size, &mut Vec::new(), &mut f) {
            return;
        }
    }
}

/// Mutual-reachability relation of `d` as a matrix over the id space.
fn strong_relation(d: &Digraph) -> Vec<Vec<bool>> {
    let n = d.id_bound();
    let mut reach = vec![vec![false; n]; n];
    for v in d.vertices() {
        for u in d.reachable_from(&VertexSet::singleton(v), &VertexSet::new()).iter() {
            reach[v][u] = true;
        }
    }
    let mut strong = vec![vec![false; n]; n];
    for u in 0..n {
        for v in 0..n {
            strong[u][v] = reach[u][v] && reach[v][u];
        }
    }
    strong
}

/// Every injective tuple of host vertices preserving the pattern's arcs.
fn all_embeddings(d: &Digraph, p: &Pattern, mut f: impl FnMut(&[usize]) -> bool) {
    fn rec(d: &Digraph, p: &Pattern, img: &mut Vec<usize>, f: &mut dyn FnMut(&[usize]) -> bool) -> bool {
        let h = p.graph().id_bound();
        if img.len() == h {
            let ok = p.graph().arcs().all(|(a, b)| d.has_arc(img[a], img[b]));
            return ok && f(img);
        }
        for v in d.vertices() {
            if img.contains(&v) {
                continue;
            }
            img.push(v);
            let stop = rec(d, p, img, f);
            img.pop();
            if stop {
                return true;
            }
        }
        false
    }
    rec(d, p, &mut Vec::new(), &mut f);
}

/// Copies of family members as (vertex set, root image) pairs. For the
/// bounded-size family these are all (s+1)-sets with a vertex reaching the
/// rest inside the set, which is exactly where an arborescence fits.
fn all_copies(d: &Digraph, fam: &ForbiddenFamily) -> Vec<(Vec<usize>, Option<usize>)> {
    let mut out = Vec::new();
    match fam.patterns() {
        Some(patterns) => {
            for p in patterns {
                all_embeddings(d, p, |img| {
                    out.push((img.to_vec(), p.canonical_root().map(|r| img[r])));
                    false
                });
            }
        }
        None => {
            let size = fam.component_bound().unwrap() + 1;
            let pool: Vec<usize> = d.vertices().collect();
            subsets_up_to(&pool, size, |u| {
                if u.len() == size {
                    let sub = d.restrict_to(u);
                    for r in u.iter() {
                        if sub.reachable_from(&VertexSet::singleton(r), &VertexSet::new()) == *u {
                            out.push((u.to_vec(), Some(r)));
                        }
                    }
                }
                false
            });
        }
    }
    out
}

/// Deletion-set test straight from the definition.
pub fn is_deletion_set(d: &Digraph, fam: &ForbiddenFamily, x: &VertexSet) -> bool {
    let rest = d.remove_vertices(x);
    let strong = strong_relation(&rest);
    if let Some(s) = fam.component_bound() {
        return rest
            .vertices()
            .all(|v| rest.vertices().filter(|&u| strong[v][u]).count() <= s);
    }
    let mut bad = false;
    for p in fam.patterns().unwrap() {
        all_embeddings(&rest, p, |img| {
            bad = img.iter().all(|&v| strong[img[0]][v]);
            bad
        });
        if bad {
            return false;
        }
    }
    true
}

/// Minimum deletion set of size ≤ k avoiding `forbidden`, first in
/// (size, lexicographic) order.
pub fn brute_force_solve(
    d: &Digraph,
    fam: &ForbiddenFamily,
    k: usize,
    forbidden: &VertexSet,
) -> Result<Option<VertexSet>, OracleError> {
    let pool: Vec<usize> = d.vertices().filter(|&v| !forbidden.contains(v)).collect();
    guard(pool.len(), k)?;
    let mut found = None;
    subsets_up_to(&pool, k, |x| {
        if is_deletion_set(d, fam, x) {
            found = Some(x.clone());
        }
        found.is_some()
    });
    Ok(found)
}

fn cuts_forward_paths(pi: &PartitionedInstance, x: &VertexSet) -> bool {
    pi.parts.iter().enumerate().all(|(i, si)| {
        let reach = pi.d.reachable_from(si, x);
        pi.parts[i + 1..].iter().all(|sj| reach.is_disjoint(sj))
    })
}

/// Every solution of the partitioned instance: W-disjoint deletion sets of
/// size ≤ k that cut all S_i → S_j paths for i < j.
pub fn brute_force_pc_solutions(pi: &PartitionedInstance) -> Result<Vec<VertexSet>, OracleError> {
    let pool: Vec<usize> = pi.d.vertices().filter(|&v| !pi.w.contains(v)).collect();
    guard(pool.len(), pi.k)?;
    let mut out = Vec::new();
    subsets_up_to(&pool, pi.k, |x| {
        if cuts_forward_paths(pi, x) && is_deletion_set(&pi.d, &pi.fam, x) {
            out.push(x.clone());
        }
        false
    });
    Ok(out)
}

/// Solutions that are also nice: for every copy F of a member and every
/// part S_i, F is hit, or its root is unreachable from S_i, or some vertex
/// of F cannot reach S_i (all in D − X).
pub fn brute_force_nice_solutions(pi: &PartitionedInstance) -> Result<Vec<VertexSet>, OracleError> {
    let copies = all_copies(&pi.d, &pi.fam);
    let sols = brute_force_pc_solutions(pi)?;
    Ok(sols
        .into_iter()
        .filter(|x| is_nice(pi, &copies, x))
        .collect())
}

fn is_nice(pi: &PartitionedInstance, copies: &[(Vec<usize>, Option<usize>)], x: &VertexSet) -> bool {
    pi.parts.iter().all(|si| {
        let from = pi.d.reachable_from(si, x);
        let to = pi.d.reaching(si, x);
        copies.iter().all(|(verts, root)| {
            let root = root.expect("nice solutions are defined for rooted families");
            verts.iter().any(|&v| x.contains(v))
                || !from.contains(root)
                || verts.iter().any(|&v| !to.contains(v))
        })
    })
}

/// Exhaustive separator facts for a terminal pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeparatorSuite {
    pub lambda: Option<usize>,
    pub all_min_separators: Vec<VertexSet>,
    pub closest: Option<VertexSet>,
    pub furthest: Option<VertexSet>,
    /// Important separators of size ≤ k.
    pub important_sets: Vec<VertexSet>,
    /// `coverage_matrix[i][j]`: minimum separator i covers minimum separator j.
    pub coverage_matrix: Vec<Vec<bool>>,
    /// Reach of each minimum separator.
    pub reaches: Vec<VertexSet>,
}

pub fn brute_force_separator_suite(
    d: &Digraph,
    s: &VertexSet,
    t: &VertexSet,
    k: usize,
) -> Result<SeparatorSuite, OracleError> {
    let pool: Vec<usize> = d.vertices().filter(|&v| !s.contains(v) && !t.contains(v)).collect();
    let total = 1u128 << pool.len().min(100);
    if total > ENUMERATION_LIMIT {
        return Err(OracleError::TooLarge {
            candidates: total,
            limit: ENUMERATION_LIMIT,
        });
    }
    let mut seps: Vec<(VertexSet, VertexSet)> = Vec::new();
    subsets_up_to(&pool, pool.len(), |c| {
        let reach = d.reachable_from(s, c);
        if reach.is_disjoint(t) {
            seps.push((c.clone(), reach));
        }
        false
    });
    let lambda = seps.iter().map(|(c, _)| c.len()).min();
    let mins: Vec<&(VertexSet, VertexSet)> = seps.iter().filter(|(c, _)| Some(c.len()) == lambda).collect();
    let coverage_matrix: Vec<Vec<bool>> = mins
        .iter()
        .map(|a| mins.iter().map(|b| a.1.is_superset(&b.1)).collect())
        .collect();
    let closest = (0..mins.len())
        .find(|&i| (0..mins.len()).all(|j| coverage_matrix[j][i]))
        .map(|i| mins[i].0.clone());
    let furthest = (0..mins.len())
        .find(|&i| (0..mins.len()).all(|j| coverage_matrix[i][j]))
        .map(|i| mins[i].0.clone());
    let important_sets = seps
        .iter()
        .filter(|(c, r)| {
            c.len() <= k
                && !seps
                    .iter()
                    .any(|(c2, r2)| c2 != c && c2.len() <= c.len() && r2.is_superset(r))
        })
        .map(|(c, _)| c.clone())
        .collect();
    Ok(SeparatorSuite {
        lambda,
        all_min_separators: mins.iter().map(|m| m.0.clone()).collect(),
        reaches: mins.iter().map(|m| m.1.clone()).collect(),
        closest,
        furthest,
        important_sets,
        coverage_matrix,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vset;

    fn g(n: usize, arcs: &[(usize, usize)]) -> Digraph {
        Digraph::new(n, arcs).unwrap()
    }

    fn triangle() -> Digraph {
        g(3, &[(0, 1), (1, 2), (2, 0)])
    }

    #[test]
    fn solve_examples() {
        let dfvs = ForbiddenFamily::dfvs();
        // pinned: smallest singleton in lexicographic order
        assert_eq!(brute_force_solve(&triangle(), &dfvs, 1, &vset![]).unwrap(), Some(vset![0]));
        assert_eq!(brute_force_solve(&triangle(), &dfvs, 1, &vset![0]).unwrap(), Some(vset![1]));
        let dag = g(3, &[(0, 1), (1, 2)]);
        assert_eq!(brute_force_solve(&dag, &dfvs, 0, &vset![]).unwrap(), Some(vset![]));
        let two = g(6, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]);
        assert_eq!(brute_force_solve(&two, &dfvs, 1, &vset![]).unwrap(), None);
        assert_eq!(brute_force_solve(&two, &dfvs, 2, &vset![]).unwrap(), Some(vset![0, 3]));
    }

    #[test]
    fn guard_trips() {
        let big = Digraph::empty(200);
        let err = brute_force_solve(&big, &ForbiddenFamily::dfvs(), 5, &vset![]).unwrap_err();
        assert!(matches!(err, OracleError::TooLarge { .. }));
        let wide = Digraph::empty(40);
        assert!(brute_force_separator_suite(&wide, &vset![0], &vset![1], 2).is_err());
    }

    #[test]
    fn separator_suite_examples() {
        let chain = g(4, &[(0, 1), (1, 2), (2, 3)]);
        let suite = brute_force_separator_suite(&chain, &vset![0], &vset![3], 2).unwrap();
        assert_eq!(suite.all_min_separators, vec![vset![1], vset![2]]);
        assert_eq!(suite.closest, Some(vset![1]));
        assert_eq!(suite.furthest, Some(vset![2]));
        let suite1 = brute_force_separator_suite(&chain, &vset![0], &vset![3], 1).unwrap();
        assert_eq!(suite1.important_sets, vec![vset![2]]);

        let direct = g(2, &[(0, 1)]);
        let suite = brute_force_separator_suite(&direct, &vset![0], &vset![1], 2).unwrap();
        assert!(suite.all_min_separators.is_empty() && suite.important_sets.is_empty());
        assert_eq!((suite.lambda, suite.closest, suite.furthest), (None, None, None));

        let diamond = g(4, &[(0, 1), (0, 2), (1, 3), (2, 3)]);
        let suite = brute_force_separator_suite(&diamond, &vset![0], &vset![3], 2).unwrap();
        assert_eq!(suite.all_min_separators, vec![vset![1, 2]]);
        assert_eq!(suite.closest, suite.furthest);
    }

    #[test]
    fn nice_examples() {
        let dfvs = ForbiddenFamily::dfvs();
        let dag = g(3, &[(0, 1), (1, 2)]);
        let pi = PartitionedInstance::new(dag, dfvs.clone(), vec![vset![0]], 1);
        let nice = brute_force_nice_solutions(&pi).unwrap();
        assert!(nice.contains(&vset![]));

        // W = whole triangle: every deletion set hits W.
        let pi = PartitionedInstance::new(triangle(), dfvs.clone(), vec![vset![0, 1, 2]], 1);
        assert!(brute_force_nice_solutions(&pi).unwrap().is_empty());

        // Cycle 0→1→2→3→0 with W = {0}: deleting 2 keeps {0} alone in its
        // component, so it is nice.
        let c4 = g(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]);
        let pi = PartitionedInstance::new(c4, dfvs, vec![vset![0]], 1);
        let nice = brute_force_nice_solutions(&pi).unwrap();
        assert_eq!(nice, vec![vset![1], vset![2], vset![3]]);
    }

    #[test]
    fn deletion_set_matches_production_checker() {
        use crate::patterns::check_solution;
        let fams = [
            ForbiddenFamily::dfvs(),
            ForbiddenFamily::out_degree(1),
            ForbiddenFamily::bounded_size(2).unwrap(),
        ];
        let d = g(5, &[(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 2), (1, 4)]);
        for fam in &fams {
            for mask in 0u32..32 {
                let x: VertexSet = (0..5).filter(|&v| mask & (1 << v) != 0).collect();
                assert_eq!(is_deletion_set(&d, fam, &x), check_solution(&d, fam, &x), "{x:?}");
            }
        }
    }
}
