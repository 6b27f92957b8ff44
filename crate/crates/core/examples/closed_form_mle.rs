//! The exact estimator as a product of marginal and clique sums, checked
//! against the likelihood equations.

use quasimle::catalog;
use quasimle::mle::{birch_residuals, CliqueFormula};
use quasimle::pattern::CountTable;

fn main() {
    let s = catalog::corner_zero_3x3();
    let u = CountTable::from_integers(s.clone(), &[3, 1, 4, 1, 5, 9, 2, 6]).unwrap();
    let formula = CliqueFormula::new(&s).unwrap();
    let p = formula.evaluate(&u).unwrap();
    for (c, (f, v)) in s.cells().iter().zip(formula.formulas().iter().zip(p.values())) {
        println!("p{c} = {v:<10} = {}", f.simplified());
    }
    let report = birch_residuals(&s, &u, &p).unwrap();
    println!("margins match: {}", report.marginals_match());
    println!("2x2 minors vanish: {}", report.minors_vanish());
}
