use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hscc::fast_solvers::{boundary, close_set};
use hscc::oracle::{brute_force_nice_solutions, brute_force_separator_suite, brute_force_solve, is_deletion_set};
use hscc::path_solver::{completion_search, gpc_membership};
use hscc::{check_solution, core_solver, gen, Digraph, ForbiddenFamily, PartitionedInstance, Pattern, VertexSet};

fn digraph(max_n: usize) -> impl Strategy<Value = Digraph> {
    (1..=max_n).prop_flat_map(|n| {
        proptest::collection::vec((0..n, 0..n), 0..=n * 3).prop_map(move |arcs| {
            let arcs: Vec<(usize, usize)> = arcs.into_iter().filter(|(a, b)| a != b).collect();
            let mut arcs = arcs;
            arcs.sort_unstable();
            arcs.dedup();
            Digraph::new(n, &arcs).unwrap()
        })
    })
}

/// Every vertex has at most one out-arc.
fn functional_graph(max_n: usize) -> impl Strategy<Value = Digraph> {
    (2..=max_n).prop_flat_map(|n| {
        proptest::collection::vec(proptest::option::of(0..n), n).prop_map(move |succ| {
            let arcs: Vec<(usize, usize)> = succ
                .iter()
                .enumerate()
                .filter_map(|(u, s)| s.filter(|&v| v != u).map(|v| (u, v)))
                .collect();
            Digraph::new(n, &arcs).unwrap()
        })
    })
}

fn subset(d: &Digraph, mask: u32) -> VertexSet {
    d.vertices().filter(|&v| mask >> v & 1 == 1).collect()
}

fn explicit_families() -> Vec<ForbiddenFamily> {
    let triangle = Pattern::new(Digraph::new(3, &[(0, 1), (1, 2), (2, 0)]).unwrap());
    vec![
        ForbiddenFamily::path(1),
        ForbiddenFamily::path(2),
        ForbiddenFamily::out_degree(2),
        ForbiddenFamily::from_patterns(vec![triangle, Pattern::directed_path(3)]).unwrap(),
        ForbiddenFamily::from_patterns(vec![Pattern::out_star(2), Pattern::directed_path(2)]).unwrap(),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn scc_decomposition_matches_mutual_reachability(d in digraph(9)) {
        let scc = d.scc_decompose();
        let total: usize = scc.components.iter().map(Vec::len).sum();
        prop_assert_eq!(total, d.vertex_count());
        let none = VertexSet::new();
        for u in d.vertices() {
            let from_u = d.reachable_from(&VertexSet::singleton(u), &none);
            for v in d.vertices() {
                let mutual = from_u.contains(v) && d.reachable_from(&VertexSet::singleton(v), &none).contains(u);
                prop_assert_eq!(scc.same_component(u, v), mutual);
            }
        }
        for (a, b) in d.arcs() {
            prop_assert!(scc.component_of[a] <= scc.component_of[b]);
        }
    }

    #[test]
    fn solution_check_matches_definition(d in digraph(7), mask in any::<u32>(), which in 0usize..7) {
        let mut fams = explicit_families();
        fams.push(ForbiddenFamily::bounded_size(2).unwrap());
        fams.push(ForbiddenFamily::dfvs());
        let fam = &fams[which];
        let x = subset(&d, mask);
        prop_assert_eq!(check_solution(&d, fam, &x), is_deletion_set(&d, fam, &x));
    }

    /// A strong component holds a member exactly when a good completion exists.
    #[test]
    fn forbidden_component_iff_completion(d in digraph(7), which in 0usize..5) {
        let fam = &explicit_families()[which];
        let completion = completion_search(&d, fam, None);
        prop_assert_eq!(!check_solution(&d, fam, &VertexSet::new()), completion.is_some());
        if let Some(w) = completion {
            prop_assert!(w.is_good());
            prop_assert!(gpc_membership(&w.host, fam).is_some());
        }
    }

    #[test]
    fn dfvs_is_bounded_size_one(d in digraph(7), k in 0usize..3) {
        let dfvs = brute_force_solve(&d, &ForbiddenFamily::dfvs(), k, &VertexSet::new()).unwrap();
        let bs1 = brute_force_solve(&d, &ForbiddenFamily::bounded_size(1).unwrap(), k, &VertexSet::new()).unwrap();
        prop_assert_eq!(&dfvs, &bs1);
        let fast = core_solver::solve(&d, &ForbiddenFamily::dfvs(), k).unwrap();
        prop_assert_eq!(fast.is_some(), dfvs.is_some());
    }

    #[test]
    fn close_set_and_boundary(d in functional_graph(9), mask in 1u32..512) {
        let s1 = subset(&d, mask);
        prop_assume!(!s1.is_empty());
        let r = d.reachable_from(&s1, &VertexSet::new());
        let close = close_set(&d, &s1, &r).unwrap();
        prop_assert!(close.len() <= s1.len());
        let exits = d.out_neighborhood(&r);
        for v in r.difference(&s1).iter() {
            let b = boundary(&d, &s1, &r, v);
            prop_assert!(b.len() <= 1);
            prop_assert!(b.is_subset(&close.union(&exits)));
            // v reaches S_1 through R ∖ S_1 exactly when ∂(v) is a close vertex,
            // and then that vertex is the only close vertex on the way.
            let inner = d.restrict_to(&r.difference(&s1));
            let ahead = inner.reachable_from(&VertexSet::singleton(v), &VertexSet::new());
            let close_ahead = ahead.intersection(&close);
            if close_ahead.is_empty() {
                prop_assert!(b.is_disjoint(&close));
            } else {
                prop_assert_eq!(close_ahead.len(), 1);
                prop_assert_eq!(&b, &close_ahead);
            }
        }
    }
}

/// Replacing the part of a nice solution inside an out-degree-one region R by
/// its boundary keeps it a nice solution and an S_1 to T separator.
#[test]
fn boundary_replacement_keeps_nice_solutions() {
    let fam = ForbiddenFamily::out_degree(1);
    let mut checked = 0;
    for seed in 0..4000u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(4..=8);
        let d = gen::gnp(n, rng.gen_range(0.12..=0.3), seed);
        let k = rng.gen_range(1..=3);
        let Some(mut w) = brute_force_solve(&d, &fam, k + 1, &VertexSet::new()).unwrap() else {
            continue;
        };
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng);
        for v in order {
            if w.len() < k + 1 && rng.gen_bool(0.5) {
                w.insert(v);
            }
        }
        if w.len() < 2 {
            continue;
        }
        let s1: VertexSet = w.iter().take(rng.gen_range(1..w.len())).collect();
        let t = w.difference(&s1);
        let pi = PartitionedInstance::new(d.clone(), fam.clone(), vec![s1.clone(), t.clone()], k);
        let nice = brute_force_nice_solutions(&pi).unwrap();
        if nice.is_empty() {
            continue;
        }
        let suite = brute_force_separator_suite(&d, &s1, &t, 0).unwrap();
        for c in &suite.all_min_separators {
            let r = d.reachable_from(&s1, c);
            if r.iter().any(|v| d.out_degree(v) > 1) {
                continue;
            }
            for x in &nice {
                let x_c = x.intersection(&r);
                let mut x2 = x.difference(&x_c);
                for v in x_c.iter() {
                    x2.union_with(&boundary(&d, &s1, &r, v));
                }
                assert!(nice.contains(&x2), "seed {seed}: {x:?} became {x2:?} with C = {c:?}");
                assert!(d.reachable_from(&s1, &x2).is_disjoint(&t), "seed {seed}");
                checked += 1;
            }
        }
    }
    assert!(checked >= 50, "only {checked} cases met the premises");
}
