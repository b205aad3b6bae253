//! Seeded random digraphs. The same seed always yields the same graph.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::digraph::Digraph;

/// Every ordered pair (u, v), u ≠ v, becomes an arc with probability `p`.
pub fn gnp(n: usize, p: f64, seed: u64) -> Digraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut arcs = Vec::new();
    for u in 0..n {
        for v in 0..n {
            if u != v && rng.gen_bool(p.clamp(0.0, 1.0)) {
                arcs.push((u, v));
            }
        }
    }
    Digraph::new(n, &arcs).expect("generated arcs are simple")
}

/// Exactly `min(m, n(n−1))` distinct arcs chosen uniformly.
pub fn gnm(n: usize, m: usize, seed: u64) -> Digraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pairs = n * n.saturating_sub(1);
    let m = m.min(pairs);
    let mut arcs: Vec<(usize, usize)> = sample(&mut rng, pairs, m)
        .into_iter()
        .map(|i| {
            let (u, r) = (i / (n - 1), i % (n - 1));
            (u, if r >= u { r + 1 } else { r })
        })
        .collect();
    arcs.sort_unstable();
    Digraph::new(n, &arcs).expect("generated arcs are simple")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_per_seed() {
        assert_eq!(gnp(8, 0.3, 7), gnp(8, 0.3, 7));
        assert_eq!(gnm(20, 40, 3), gnm(20, 40, 3));
        assert_ne!(gnm(20, 40, 3), gnm(20, 40, 4));
    }

    #[test]
    fn arc_counts() {
        assert_eq!(gnm(50, 150, 1).arc_count(), 150);
        assert_eq!(gnm(3, 100, 1).arc_count(), 6);
        assert_eq!(gnp(6, 1.0, 0).arc_count(), 30);
        assert_eq!(gnp(6, 0.0, 0).arc_count(), 0);
    }
}
