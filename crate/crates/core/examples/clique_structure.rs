//! Maximal cliques, their pairwise intersections, and the clique poset of
//! one anchor column.

use quasimle::catalog;
use quasimle::cliques::{blocks_for_column, clique_poset, CliqueIndex};

fn main() {
    let s = catalog::tree_8x9();
    println!("{}", s.render());
    let index = CliqueIndex::new(&s);
    println!("Max(S), {} cliques:", index.max().len());
    for c in index.max() {
        println!("  {c}");
    }
    println!("Int(S), {} cliques:", index.int().len());
    for c in index.int() {
        println!("  {c}");
    }

    let anchor = 1;
    let dec = blocks_for_column(&s, anchor);
    println!("blocks of column {anchor}:");
    for (k, b) in dec.parts.iter().enumerate() {
        println!("  part {k}: columns {:?} rows {:?}", b.cols, b.rows);
    }

    let poset = clique_poset(&s, anchor).unwrap();
    println!("poset of column {anchor}:");
    for (k, c) in poset.elements.iter().enumerate() {
        println!("  D{k} = {c}  covered by {:?}", poset.parents(k));
    }
    println!("forest: {}", poset.is_forest());
}
