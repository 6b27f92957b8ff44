//! Proptest strategies shared by the unit tests.

use proptest::prelude::*;

use crate::pattern::{CountTable, Pattern};

/// Patterns up to `max_side × max_side`; every row and column keeps at
/// least one cell.
pub fn pattern(max_side: usize) -> impl Strategy<Value = Pattern> {
    (1..=max_side, 1..=max_side)
        .prop_flat_map(|(m, n)| (Just(m), Just(n), proptest::collection::vec(any::<bool>(), m * n)))
        .prop_map(|(m, n, bits)| {
            let mut cells: Vec<(usize, usize)> = (0..m * n)
                .filter(|&k| bits[k])
                .map(|k| (k / n + 1, k % n + 1))
                .collect();
            for i in 1..=m {
                if !cells.iter().any(|&(r, _)| r == i) {
                    cells.push((i, (i - 1) % n + 1));
                }
            }
            for j in 1..=n {
                if !cells.iter().any(|&(_, c)| c == j) {
                    cells.push(((j - 1) % m + 1, j));
                }
            }
            Pattern::new(m, n, cells).expect("no empty lines")
        })
}

/// A pattern with positive integer counts.
pub fn pattern_with_counts(max_side: usize) -> impl Strategy<Value = CountTable> {
    pattern(max_side).prop_flat_map(|s| {
        let len = s.len();
        proptest::collection::vec(1i64..40, len)
            .prop_map(move |v| CountTable::from_integers(s.clone(), &v).expect("positive"))
    })
}

/// A row and a column permutation for an `m × n` pattern, as targets of
/// each index.
pub fn permutations(m: usize, n: usize) -> impl Strategy<Value = (Vec<usize>, Vec<usize>)> {
    (
        Just((1..=m).collect::<Vec<_>>()).prop_shuffle(),
        Just((1..=n).collect::<Vec<_>>()).prop_shuffle(),
    )
}
