//! Exact critical-point polynomials for two patterns whose estimator is
//! not rational: a chordless cycle and the double square.

use quasimle::numeric::{
    cycle_critical_points, cycle_ml_polynomial, double_square_critical_points,
    double_square_critical_poly, select_positive,
};
use quasimle::pattern::{CountTable, Pattern};

fn main() {
    let u = CountTable::from_integers(Pattern::double_square(), &[1, 1, 1, 1, 2, 2, 2]).unwrap();
    let poly = double_square_critical_poly(&u).unwrap();
    println!("double square: {}", poly.display_in("β"));
    println!("  real roots {:?}", poly.real_roots());
    let points = double_square_critical_points(&u).unwrap();
    let mle = select_positive(&points).unwrap();
    println!("  positive point (α, β) = {:?}", mle.params);

    for k in 2..=6 {
        let s = Pattern::cycle(k).unwrap();
        let counts: Vec<i64> = (1..=s.len() as i64).collect();
        let u = CountTable::from_integers(s, &counts).unwrap();
        let poly = cycle_ml_polynomial(k, &u).unwrap();
        let points = cycle_critical_points(k, &u).unwrap();
        let alpha = select_positive(&points).unwrap().params[0];
        println!(
            "{}-cycle: degree {:?}, {} real roots, α = {alpha:.9}",
            2 * k,
            poly.degree(),
            poly.real_root_count()
        );
    }
}
