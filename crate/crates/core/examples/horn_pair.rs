//! The Horn matrix and sign vector of a pattern, the estimator it
//! produces, and its restriction to a subtable.

use std::collections::BTreeSet;

use quasimle::catalog;
use quasimle::horn::{build_horn_pair, evaluate_horn, has_zero_column_sums, restrict_horn};
use quasimle::mle::clique_formula_mle;
use quasimle::pattern::CountTable;

fn main() {
    let s = catalog::corner_zero_3x3();
    let hp = build_horn_pair(&s).unwrap();
    print!("{}", hp.to_tsv());
    println!("columns sum to zero: {}", has_zero_column_sums(&hp));

    let u = CountTable::from_integers(s.clone(), &[3, 1, 4, 1, 5, 9, 2, 6]).unwrap();
    let psi = evaluate_horn(&hp, &u).unwrap();
    let direct = clique_formula_mle(&s, &u).unwrap();
    println!("horn map equals clique formula: {}", psi.values() == direct.values());

    let rows: BTreeSet<usize> = [1, 2].into();
    let cols: BTreeSet<usize> = [1, 2, 3].into();
    let sub = restrict_horn(&hp, &rows, &cols).unwrap();
    println!();
    print!("{}", sub.to_tsv());
}
