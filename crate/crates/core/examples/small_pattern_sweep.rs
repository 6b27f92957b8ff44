//! Every pattern up to 4×4 (one per permutation class): counts the doubly
//! chordal ones and checks the exact estimator against IPF on random
//! tables. Set `QUASIMLE_SEED` to change the tables.

use quasimle::classify::{classify, Verdict};
use quasimle::enumerate::{all_patterns, seed_from_env};
use quasimle::mle::clique_formula_mle;
use quasimle::numeric::ipf_mle;
use quasimle::pattern::CountTable;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

fn main() {
    let patterns = all_patterns(4);
    let seed = seed_from_env();
    let worst = patterns
        .par_iter()
        .enumerate()
        .filter(|(_, s)| classify(s).verdict == Verdict::DoublyChordalBipartite)
        .map(|(k, s)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ k as u64);
            (0..5)
                .map(|_| {
                    let counts: Vec<i64> = (0..s.len()).map(|_| rng.gen_range(1..=50)).collect();
                    let u = CountTable::from_integers(s.clone(), &counts).unwrap();
                    let exact = clique_formula_mle(s, &u).unwrap().to_f64();
                    let fit = ipf_mle(s, &u, 1e-12, 100_000).unwrap();
                    exact.iter().zip(&fit.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
                })
                .fold(0.0, f64::max)
        })
        .collect::<Vec<f64>>();
    println!("patterns: {}", patterns.len());
    println!("doubly chordal bipartite: {}", worst.len());
    println!("worst gap: {:.3e}", worst.iter().cloned().fold(0.0, f64::max));
}
