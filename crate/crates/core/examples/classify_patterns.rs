//! Classifies a few patterns and prints the obstruction found for those
//! without a closed-form estimator.

use quasimle::catalog;
use quasimle::classify::classify;
use quasimle::pattern::{parse_pattern, Pattern};

fn main() {
    let patterns = [
        ("corner zero", catalog::corner_zero_3x3()),
        ("tree", catalog::tree_8x9()),
        ("tree plus a column", catalog::tree_8x9_with_double_square()),
        ("double square", Pattern::double_square()),
        ("hexagon", Pattern::cycle(3).unwrap()),
        ("ferrers shape", parse_pattern("***\n**0\n*00\n").unwrap()),
    ];
    for (name, s) in &patterns {
        let result = classify(s);
        print!("{name:<20} {:?}", result.verdict);
        if let Some(w) = &result.witness {
            assert!(w.verify(s));
            print!("  ({w})");
        }
        println!();
    }
}
