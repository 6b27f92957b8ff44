//! A handful of named patterns used throughout the tests and examples.

use crate::pattern::Pattern;

/// The 3×3 table with the single structural zero at `(3,3)`.
pub fn corner_zero_3x3() -> Pattern {
    Pattern::new(
        3,
        3,
        [(1, 1), (1, 2), (1, 3), (2, 1), (2, 2), (2, 3), (3, 1), (3, 2)],
    )
    .expect("valid pattern")
}

const TREE_8X9: [(usize, usize); 20] = [
    (1, 1),
    (1, 2),
    (2, 1),
    (2, 2),
    (2, 3),
    (2, 8),
    (3, 1),
    (3, 2),
    (3, 3),
    (3, 4),
    (4, 1),
    (4, 5),
    (5, 1),
    (5, 6),
    (5, 7),
    (6, 5),
    (7, 6),
    (8, 6),
    (8, 7),
    (8, 9),
];

/// An 8×9 doubly chordal bipartite pattern with 20 cells and 11 maximal
/// cliques:
///
/// ```text
/// **0000000
/// ***0000*0
/// ****00000
/// *000*0000
/// *0000**00
/// 0000*0000
/// 00000*000
/// 00000**0*
/// ```
pub fn tree_8x9() -> Pattern {
    Pattern::new(8, 9, TREE_8X9).expect("valid pattern")
}

/// [`tree_8x9`] with a tenth column supported on rows 2, 3 and 4. The new
/// column breaks laminarity at column 1 and creates an induced double
/// square on rows `{1,2,4}` × columns `{1,2,10}`.
pub fn tree_8x9_with_double_square() -> Pattern {
    let cells = TREE_8X9
        .iter()
        .copied()
        .chain([(2, 10), (3, 10), (4, 10)]);
    Pattern::new(8, 10, cells).expect("valid pattern")
}
