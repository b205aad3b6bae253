//! One PASS/FAIL line per acceptance criterion. Runs as a plain binary so the
//! output stays readable; exits non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hscc::core_solver::{self, BranchStep};
use hscc::fast_solvers::{solve_bounded_size_with, solve_one_out_regular_with};
use hscc::oracle::{brute_force_nice_solutions, brute_force_pc_solutions, brute_force_separator_suite, brute_force_solve};
use hscc::path_solver::{gpc_membership, hminus_size_bound, hminus_witness_search, solve_path_scc, solve_path_scc_with};
use hscc::{
    check_solution, gen, Digraph, ForbiddenFamily, Lambda, PartitionedInstance, SolveError, SolveStats, SolverConfig,
    TerminalPair, TightCover, VertexSet,
};

type Run<'a> = Box<dyn Fn() -> Result<hscc::core_solver::SolveReport, SolveError> + 'a>;
type Criterion<'a> = Box<dyn FnOnce(&mut MeasureLog) -> Outcome + 'a>;

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(failures: &[String], summary: String) -> Self {
        let detail = match failures.first() {
            None => summary,
            Some(f) => format!("{summary}; {} failure(s), first: {f}", failures.len()),
        };
        Outcome {
            pass: failures.is_empty(),
            detail,
        }
    }
}

/// The shared random instance set for the first two criteria.
struct Instance {
    seed: u64,
    d: Digraph,
    k: usize,
}

fn instance_set(count: u64) -> Vec<Instance> {
    (0..count)
        .map(|seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = rng.gen_range(3..=8);
            let p = rng.gen_range(0.1..=0.5);
            Instance {
                seed,
                d: gen::gnp(n, p, seed),
                k: (seed % 4) as usize,
            }
        })
        .collect()
}

fn families() -> Vec<(&'static str, ForbiddenFamily)> {
    vec![
        ("dfvs", ForbiddenFamily::dfvs()),
        ("out-degree:1", ForbiddenFamily::out_degree(1)),
        ("out-degree:2", ForbiddenFamily::out_degree(2)),
    ]
}

fn oracle(d: &Digraph, fam: &ForbiddenFamily, k: usize) -> bool {
    brute_force_solve(d, fam, k, &VertexSet::new())
        .expect("instances are small enough to enumerate")
        .is_some()
}

/// Collects solver stats for the measure criterion.
#[derive(Default)]
struct MeasureLog {
    core: Vec<SolveStats>,
    fast: Vec<(&'static str, usize, SolveStats)>,
    invariant_errors: Vec<String>,
}

fn check_answer(
    label: &str,
    inst: &Instance,
    fam: &ForbiddenFamily,
    want: bool,
    got: &Result<hscc::core_solver::SolveReport, SolveError>,
    failures: &mut Vec<String>,
    log: &mut MeasureLog,
) -> Option<SolveStats> {
    match got {
        Ok(r) => {
            if r.solution.is_some() != want {
                failures.push(format!("{label} seed {} k {}: got {:?}, oracle says {want}", inst.seed, inst.k, r.solution));
            } else if let Some(x) = &r.solution {
                if x.len() > inst.k || !check_solution(&inst.d, fam, x) {
                    failures.push(format!("{label} seed {}: {x:?} is not a deletion set", inst.seed));
                }
            }
            Some(r.stats.clone())
        }
        Err(e) => {
            if matches!(e, SolveError::Invariant(_)) {
                log.invariant_errors.push(format!("{label} seed {}: {e}", inst.seed));
            }
            failures.push(format!("{label} seed {}: {e}", inst.seed));
            None
        }
    }
}

fn criterion_1(set: &[Instance], log: &mut MeasureLog) -> Outcome {
    let config = SolverConfig::default();
    let mut failures = Vec::new();
    let mut runs = 0;
    for inst in set {
        for (name, fam) in families() {
            let want = oracle(&inst.d, &fam, inst.k);
            let got = core_solver::solve_with(&inst.d, &fam, inst.k, &config);
            if let Some(stats) = check_answer(name, inst, &fam, want, &got, &mut failures, log) {
                log.core.push(stats);
            }
            runs += 1;
        }
    }
    Outcome::new(&failures, format!("{runs} runs over {} digraphs", set.len()))
}

fn criterion_2(set: &[Instance], log: &mut MeasureLog) -> Outcome {
    let config = SolverConfig::default();
    let mut failures = Vec::new();
    let mut runs = 0;
    let od1 = ForbiddenFamily::out_degree(1);
    for inst in set {
        let want = oracle(&inst.d, &od1, inst.k);
        let got = solve_one_out_regular_with(&inst.d, inst.k, &config);
        if let Some(stats) = check_answer("one-out-regular", inst, &od1, want, &got, &mut failures, log) {
            log.fast.push(("one-out-regular", inst.k, stats));
        }
        runs += 1;
        for s in 1..=3 {
            let fam = ForbiddenFamily::bounded_size(s).expect("s ≥ 1");
            let want = oracle(&inst.d, &fam, inst.k);
            let got = solve_bounded_size_with(&inst.d, s, inst.k, &config);
            if let Some(stats) = check_answer("bounded-size", inst, &fam, want, &got, &mut failures, log) {
                log.fast.push(("bounded-size", inst.k, stats));
            }
            runs += 1;
            if s == 1 {
                let core = core_solver::solve(&inst.d, &ForbiddenFamily::dfvs(), inst.k);
                let same = matches!((&got, &core), (Ok(a), Ok(b)) if a.solution.is_some() == b.is_some());
                if !same {
                    failures.push(format!("seed {}: bounded-size(1) and rooted DFVS disagree", inst.seed));
                }
            }
        }
    }
    Outcome::new(&failures, format!("{runs} runs over {} digraphs", set.len()))
}

fn path_instances() -> Vec<Instance> {
    (0..240u64)
        .map(|seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(10_000 + seed);
            let n = rng.gen_range(3..=7);
            let p = rng.gen_range(0.1..=0.5);
            Instance {
                seed,
                d: gen::gnp(n, p, 10_000 + seed),
                k: rng.gen_range(0..=2),
            }
        })
        .collect()
}

fn criterion_3(set: &[Instance]) -> Outcome {
    let fam = ForbiddenFamily::path(2);
    let mut failures = Vec::new();
    let mut yes = 0;
    for inst in set {
        let want = oracle(&inst.d, &fam, inst.k);
        match solve_path_scc(&inst.d, &fam, inst.k) {
            Ok(got) if got.is_some() == want => {
                if let Some(x) = got {
                    yes += 1;
                    if x.len() > inst.k || !check_solution(&inst.d, &fam, &x) {
                        failures.push(format!("seed {}: {x:?} is not a deletion set", inst.seed));
                    }
                }
            }
            other => failures.push(format!("seed {} k {}: got {other:?}, oracle says {want}", inst.seed, inst.k)),
        }
    }
    Outcome::new(&failures, format!("{} instances, {yes} YES", set.len()))
}

fn criterion_4() -> Outcome {
    let mut failures = Vec::new();
    let (mut finite, mut pairs, mut important_total) = (0, 0, 0);
    for seed in 0..320u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(20_000 + seed);
        let n = rng.gen_range(4..=10);
        let d = gen::gnp(n, rng.gen_range(0.15..=0.45), 20_000 + seed);
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng);
        let s_size = rng.gen_range(1..=2);
        let t_size = rng.gen_range(1..=2);
        let s: VertexSet = order[..s_size].iter().collect();
        let t: VertexSet = order[s_size..s_size + t_size].iter().collect();
        let k = (seed % 5) as usize;
        let suite = brute_force_separator_suite(&d, &s, &t, k).expect("small pool");
        let tp = TerminalPair::new(&d, s.clone(), t.clone()).expect("disjoint terminals");
        let fail = |what: &str| format!("seed {seed}: {what}");

        let important: Vec<VertexSet> = tp.important_separators(k).into_iter().map(|sep| sep.cut).collect();
        let mut got_sorted = important.clone();
        got_sorted.sort();
        let mut want_sorted = suite.important_sets.clone();
        want_sorted.sort();
        if got_sorted != want_sorted {
            failures.push(fail(&format!("important {got_sorted:?} vs {want_sorted:?}")));
        }
        if important.len() > 4usize.pow(k as u32) {
            failures.push(fail(&format!("{} important separators exceed 4^{k}", important.len())));
        }
        important_total += important.len();

        match (tp.lambda(), suite.lambda) {
            (Lambda::Infinite, None) => continue,
            (Lambda::Finite(l), Some(m)) if l == m => {}
            (got, want) => {
                failures.push(fail(&format!("lambda {got:?} vs {want:?}")));
                continue;
            }
        }
        finite += 1;
        let lambda = suite.lambda.unwrap();
        let closest = tp.closest_min_separator().expect("finite lambda");
        let furthest = tp.furthest_min_separator().expect("finite lambda");
        if Some(&closest.cut) != suite.closest.as_ref() || Some(&furthest.cut) != suite.furthest.as_ref() {
            failures.push(fail("closest/furthest differ from the coverage extremes"));
        }

        for (i, ri) in suite.reaches.iter().enumerate() {
            for rj in &suite.reaches[i..] {
                pairs += 1;
                let union = d.out_neighborhood(&ri.union(rj));
                let inter = d.out_neighborhood(&ri.intersection(rj));
                if !tp.is_separator(&union) || !tp.is_separator(&inter) || union.len() + inter.len() > 2 * lambda {
                    failures.push(fail("submodularity of the reach neighbourhoods"));
                }
            }
        }

        let mut current = closest;
        let mut steps = 0;
        loop {
            match tp.tight_cover_successor(&current) {
                Ok(TightCover::AtFurthest) => break,
                Ok(TightCover::Successor(next)) => {
                    if !(next.reach.is_superset(&current.reach) && next.reach.len() > current.reach.len())
                        || next.cut.len() != lambda
                    {
                        failures.push(fail("tight-cover step does not strictly grow the reach"));
                        break;
                    }
                    current = next;
                    steps += 1;
                    if steps > n {
                        failures.push(fail("tight-cover chain does not terminate"));
                        break;
                    }
                }
                Err(e) => {
                    failures.push(fail(&format!("tight cover: {e}")));
                    break;
                }
            }
        }
        if current.cut != furthest.cut {
            failures.push(fail("tight-cover chain ends away from the furthest separator"));
        }
    }
    Outcome::new(
        &failures,
        format!("320 pairs, {finite} finite, {pairs} separator pairs, {important_total} important separators"),
    )
}

fn criterion_5() -> Outcome {
    let fams = families();
    let mut failures = Vec::new();
    let mut tested = 0;
    let mut seed = 0u64;
    while tested < 150 && seed < 20_000 {
        seed += 1;
        let mut rng = ChaCha8Rng::seed_from_u64(30_000 + seed);
        let n = rng.gen_range(3..=7);
        let d = gen::gnp(n, rng.gen_range(0.15..=0.5), 30_000 + seed);
        let fam = &fams[(seed % 3) as usize].1;
        let k = rng.gen_range(0..=3);
        // W: a deletion set of size ≤ k + 1, padded with random vertices.
        let Some(mut w) = brute_force_solve(&d, fam, k + 1, &VertexSet::new()).unwrap() else {
            continue;
        };
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng);
        for v in order {
            if w.len() < k + 1 && rng.gen_bool(0.5) {
                w.insert(v);
            }
        }
        if w.is_empty() {
            continue;
        }
        let q = rng.gen_range(1..=w.len().min(3));
        let mut parts = vec![VertexSet::new(); q];
        for (i, v) in w.iter().enumerate() {
            let j = if i < q { i } else { rng.gen_range(0..q) };
            parts[j].insert(v);
        }
        let pi = PartitionedInstance::new(d, fam.clone(), parts, k);
        let all = brute_force_pc_solutions(&pi).unwrap();
        if brute_force_nice_solutions(&pi).unwrap().is_empty() || all.contains(&VertexSet::new()) {
            continue;
        }
        tested += 1;
        match core_solver::branch_set(&pi) {
            Ok(BranchStep::Branch(z)) if !z.is_empty() && all.iter().any(|x| !x.is_disjoint(&z)) => {}
            other => failures.push(format!("seed {seed}: {other:?}")),
        }
    }
    if tested < 100 {
        failures.push(format!("only {tested} qualifying instances"));
    }
    Outcome::new(&failures, format!("{tested} partitioned instances"))
}

fn criterion_6(log: &MeasureLog) -> Outcome {
    let mut failures: Vec<String> = log.invariant_errors.clone();
    let mut core_checks = 0;
    for s in &log.core {
        core_checks += s.measure_checks;
        if s.max_measure_depth > s.measure_depth_bound {
            failures.push(format!("core depth {} over bound {}", s.max_measure_depth, s.measure_depth_bound));
        }
    }
    let mut fast_checks = 0;
    for (name, k, s) in &log.fast {
        fast_checks += s.measure_checks;
        let factor = if *name == "one-out-regular" { 3 } else { 2 };
        if s.max_measure_depth > factor * k || s.measure_depth_bound > factor * k {
            failures.push(format!("{name} k {k}: measure depth {} over {factor}k", s.max_measure_depth));
        }
    }
    if core_checks == 0 || fast_checks == 0 {
        failures.push("measure assertions never exercised".into());
    }
    Outcome::new(
        &failures,
        format!("{core_checks} core and {fast_checks} fast-solver measure checks"),
    )
}

/// Replays the 𝓗⁻ₚ branching and checks every witness it meets.
fn witness_walk(d: &Digraph, fam: &ForbiddenFamily, p: usize, k: usize, seen: &mut usize, failures: &mut Vec<String>) {
    let Some(w) = hminus_witness_search(d, fam, p) else {
        return;
    };
    *seen += 1;
    let size = w.vertices().len();
    if size > hminus_size_bound(fam.h(), p) || !w.is_good() || gpc_membership(&w.host, fam).is_none() {
        failures.push(format!("witness on {size} vertices fails the size or membership check"));
    }
    if k == 0 {
        return;
    }
    for v in w.vertices().iter() {
        witness_walk(&d.remove_vertex(v), fam, p, k - 1, seen, failures);
    }
}

fn criterion_7(set: &[Instance]) -> Outcome {
    let fam = ForbiddenFamily::path(2);
    let p = fam.shortest_path_member().expect("path family");
    let mut failures = Vec::new();
    let mut seen = 0;
    for inst in set {
        witness_walk(&inst.d, &fam, p, inst.k, &mut seen, &mut failures);
    }
    Outcome::new(
        &failures,
        format!("{seen} witnesses, bound {}", hminus_size_bound(fam.h(), p)),
    )
}

fn criterion_8() -> Outcome {
    let limit = Duration::from_secs(60);
    let config = SolverConfig::default();
    let mut failures = Vec::new();
    let mut slowest = Duration::ZERO;
    for seed in 0..2u64 {
        let d = gen::gnm(50, 150, seed);
        let k = 4;
        let runs: Vec<(&str, Run)> = vec![
            ("rooted dfvs", Box::new(|| core_solver::solve_with(&d, &ForbiddenFamily::dfvs(), k, &config))),
            ("rooted out-degree:2", Box::new(|| core_solver::solve_with(&d, &ForbiddenFamily::out_degree(2), k, &config))),
            ("one-out-regular", Box::new(|| solve_one_out_regular_with(&d, k, &config))),
            ("bounded-size:1", Box::new(|| solve_bounded_size_with(&d, 1, k, &config))),
            ("bounded-size:3", Box::new(|| solve_bounded_size_with(&d, 3, k, &config))),
            ("path:2", Box::new(|| solve_path_scc_with(&d, &ForbiddenFamily::path(2), k, &config))),
        ];
        for (name, run) in runs {
            let start = Instant::now();
            let result = run();
            let took = start.elapsed();
            slowest = slowest.max(took);
            if let Err(e) = result {
                failures.push(format!("{name} seed {seed}: {e}"));
            } else if took > limit {
                failures.push(format!("{name} seed {seed}: {took:?}"));
            }
        }
    }
    Outcome::new(&failures, format!("12 runs, slowest {:.2}s", slowest.as_secs_f64()))
}

fn main() -> ExitCode {
    let mut log = MeasureLog::default();
    let set = instance_set(600);
    let path_set = path_instances();
    let criteria: Vec<(&str, Criterion)> = vec![
        ("oracle equivalence, rooted solver", Box::new(|log| criterion_1(&set, log))),
        ("oracle equivalence, fast solvers", Box::new(|log| criterion_2(&set, log))),
        ("oracle equivalence, path solver", Box::new(|_| criterion_3(&path_set))),
        ("separator suite", Box::new(|_| criterion_4())),
        ("branch-set soundness", Box::new(|_| criterion_5())),
        ("measure monotonicity and depth bounds", Box::new(|log| criterion_6(log))),
        ("witness size bound", Box::new(|_| criterion_7(&path_set))),
        ("runtime smoke test", Box::new(|_| criterion_8())),
    ];
    let mut all_pass = true;
    for (i, (name, run)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = run(&mut log);
        all_pass &= outcome.pass;
        println!(
            "criterion {} {name}: {} ({}, {:.1}s)",
            i + 1,
            if outcome.pass { "PASS" } else { "FAIL" },
            outcome.detail,
            start.elapsed().as_secs_f64()
        );
    }
    if all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
