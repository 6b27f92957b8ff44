//! Iterative proportional fitting against the exact estimator.

use quasimle::catalog;
use quasimle::mle::clique_formula_mle;
use quasimle::numeric::{ipf_mle, loglik};
use quasimle::pattern::CountTable;

fn main() {
    let s = catalog::tree_8x9();
    let counts: Vec<i64> = (0..s.len() as i64).map(|k| 1 + (7 * k + 3) % 11).collect();
    let u = CountTable::from_integers(s.clone(), &counts).unwrap();
    let exact = clique_formula_mle(&s, &u).unwrap().to_f64();
    let fit = ipf_mle(&s, &u, 1e-13, 100_000).unwrap();
    let gap = exact
        .iter()
        .zip(&fit.values)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    println!("ipf iterations: {}", fit.iterations);
    println!("max |exact - ipf|: {gap:.3e}");
    println!("log-likelihood exact {:.12}", loglik(&s, &u, &exact));
    println!("log-likelihood ipf   {:.12}", loglik(&s, &u, &fit.values));
}
