//! Maximal cliques, their maximal pairwise intersections, and the per-column
//! block structure that produces them.
//!
//! A clique is a rectangle `rows × cols` lying entirely inside the support.
//! For a fixed anchor column `j₀` with support rows `N`, the columns of the
//! pattern are grouped by their support restricted to `N`; each nonempty
//! group (a *block*) induces the largest clique that contains it and meets
//! column `j₀`. When the block row sets are laminar for every anchor (the
//! DS-free condition) the induced cliques over all anchors are exactly the
//! maximal cliques, and the cover pairs of the containment order on each
//! anchor's induced cliques give the maximal intersections that meet it.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::pattern::{Cell, Pattern};

/// A rectangle `rows × cols` contained in the support.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Clique {
    pub rows: BTreeSet<usize>,
    pub cols: BTreeSet<usize>,
}

impl Clique {
    pub fn new<R, C>(rows: R, cols: C) -> Self
    where
        R: IntoIterator<Item = usize>,
        C: IntoIterator<Item = usize>,
    {
        Clique {
            rows: rows.into_iter().collect(),
            cols: cols.into_iter().collect(),
        }
    }

    /// Cells in row-major order.
    pub fn cells(&self) -> Vec<Cell> {
        self.rows
            .iter()
            .flat_map(|&i| self.cols.iter().map(move |&j| Cell::new(i, j)))
            .collect()
    }

    pub fn size(&self) -> usize {
        self.rows.len() * self.cols.len()
    }

    pub fn contains(&self, c: Cell) -> bool {
        self.rows.contains(&c.row) && self.cols.contains(&c.col)
    }

    /// Containment of cell sets (both sides nonempty).
    pub fn is_subset(&self, other: &Clique) -> bool {
        self.rows.is_subset(&other.rows) && self.cols.is_subset(&other.cols)
    }

    pub fn intersection(&self, other: &Clique) -> Option<Clique> {
        let rows: BTreeSet<usize> = self.rows.intersection(&other.rows).copied().collect();
        let cols: BTreeSet<usize> = self.cols.intersection(&other.cols).copied().collect();
        (!rows.is_empty() && !cols.is_empty()).then_some(Clique { rows, cols })
    }

    /// Whether every cell of the rectangle lies in `s`.
    pub fn is_clique_in(&self, s: &Pattern) -> bool {
        !self.rows.is_empty()
            && !self.cols.is_empty()
            && self.cells().into_iter().all(|c| s.contains_cell(c))
    }
}

/// Cliques sort by their row-major cell lists.
impl Ord for Clique {
    fn cmp(&self, other: &Self) -> Ordering {
        self.cells().cmp(&other.cells())
    }
}

impl PartialOrd for Clique {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// `{11, 21, 31}`.
impl fmt::Display for Clique {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, c) in self.cells().iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str("}")
    }
}

/// One part of the block partition for an anchor column.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Block {
    /// Columns sharing the same support on the anchor's rows.
    pub cols: BTreeSet<usize>,
    /// That shared support; a subset of the anchor's rows, possibly empty.
    pub rows: BTreeSet<usize>,
}

impl Block {
    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn cells(&self) -> Vec<Cell> {
        self.rows
            .iter()
            .flat_map(|&i| self.cols.iter().map(move |&j| Cell::new(i, j)))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BlockDecomposition {
    pub anchor_col: usize,
    /// Support rows of the anchor column.
    pub anchor_rows: BTreeSet<usize>,
    /// Part 0 contains the anchor; the rest are ordered by smallest column.
    pub parts: Vec<Block>,
}

impl BlockDecomposition {
    /// Number of support rows of the anchor column.
    pub fn r(&self) -> usize {
        self.anchor_rows.len()
    }

    /// The anchor column's cells `N_{j₀}`.
    pub fn anchor_cells(&self) -> Vec<Cell> {
        self.anchor_rows
            .iter()
            .map(|&i| Cell::new(i, self.anchor_col))
            .collect()
    }

    /// Support rows of any row set restricted to the anchor's rows.
    pub fn restrict(&self, rows: &BTreeSet<usize>) -> BTreeSet<usize> {
        rows.intersection(&self.anchor_rows).copied().collect()
    }

    /// First pair of nonempty parts whose row sets overlap without nesting.
    pub fn laminarity_violation(&self) -> Option<(usize, usize)> {
        for a in 0..self.parts.len() {
            for b in a + 1..self.parts.len() {
                let (ra, rb) = (&self.parts[a].rows, &self.parts[b].rows);
                if ra.is_disjoint(rb) {
                    continue;
                }
                if !ra.is_subset(rb) && !rb.is_subset(ra) {
                    return Some((a, b));
                }
            }
        }
        None
    }
}

/// Groups columns by their support on the anchor column's rows.
pub fn blocks_for_column(s: &Pattern, anchor: usize) -> BlockDecomposition {
    let anchor_rows = s.col_support(anchor).clone();
    let mut by_key: BTreeMap<BTreeSet<usize>, BTreeSet<usize>> = BTreeMap::new();
    for j in 1..=s.n() {
        let key: BTreeSet<usize> = s.col_support(j).intersection(&anchor_rows).copied().collect();
        by_key.entry(key).or_default().insert(j);
    }
    let mut parts: Vec<Block> = by_key
        .into_iter()
        .map(|(rows, cols)| Block { cols, rows })
        .collect();
    parts.sort_by_key(|b| {
        let first = *b.cols.first().expect("parts are nonempty");
        (!b.cols.contains(&anchor), first)
    });
    BlockDecomposition {
        anchor_col: anchor,
        anchor_rows,
        parts,
    }
}

/// The largest clique containing block `part` that meets the anchor column:
/// the block's rows times every column whose support contains them.
pub fn induced_clique(s: &Pattern, dec: &BlockDecomposition, part: usize) -> Result<Clique> {
    let block = dec
        .parts
        .get(part)
        .ok_or_else(|| Error::InvalidSelection(format!("no block {part}")))?;
    if block.is_empty() {
        return Err(Error::EmptyBlock(part));
    }
    let cols = (1..=s.n()).filter(|&j| block.rows.is_subset(s.col_support(j)));
    Ok(Clique::new(block.rows.iter().copied(), cols))
}

/// Induced cliques of all nonempty blocks, tagged with their part index.
pub fn induced_cliques(s: &Pattern, dec: &BlockDecomposition) -> Vec<(usize, Clique)> {
    (0..dec.parts.len())
        .filter(|&p| !dec.parts[p].is_empty())
        .map(|p| (p, induced_clique(s, dec, p).expect("block is nonempty")))
        .collect()
}

/// The first anchor column whose block row sets are not laminar.
pub fn ds_free_violation(s: &Pattern) -> Option<(usize, usize, usize)> {
    (1..=s.n()).find_map(|j| {
        blocks_for_column(s, j)
            .laminarity_violation()
            .map(|(a, b)| (j, a, b))
    })
}

/// Laminarity of block row sets for every anchor column. Equivalent to the
/// absence of an induced double square.
pub fn is_ds_free(s: &Pattern) -> bool {
    ds_free_violation(s).is_none()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CliqueSource {
    /// Union of induced cliques over all anchor columns.
    Blocks,
    /// The closure enumeration, used when the pattern is not DS-free.
    BruteForce,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaxCliques {
    pub cliques: Vec<Clique>,
    pub source: CliqueSource,
}

/// `Max(S)`, sorted. Uses the block construction on DS-free patterns and
/// falls back to [`max_cliques_bruteforce`] otherwise.
pub fn max_cliques(s: &Pattern) -> MaxCliques {
    if !is_ds_free(s) {
        return MaxCliques {
            cliques: max_cliques_bruteforce(s),
            source: CliqueSource::BruteForce,
        };
    }
    let set: BTreeSet<Clique> = (1..=s.n())
        .flat_map(|j| induced_cliques(s, &blocks_for_column(s, j)))
        .map(|(_, c)| c)
        .collect();
    MaxCliques {
        cliques: set.into_iter().collect(),
        source: CliqueSource::Blocks,
    }
}

/// All maximal cliques of any pattern.
///
/// Every maximal row set is an intersection of column supports; this closes
/// the column supports under intersection and pairs each closed row set
/// with all columns containing it.
pub fn max_cliques_bruteforce(s: &Pattern) -> Vec<Clique> {
    let supports: Vec<&BTreeSet<usize>> = (1..=s.n()).map(|j| s.col_support(j)).collect();
    let mut closed: BTreeSet<BTreeSet<usize>> = supports.iter().map(|&r| r.clone()).collect();
    let mut frontier: Vec<BTreeSet<usize>> = closed.iter().cloned().collect();
    while let Some(rows) = frontier.pop() {
        for support in &supports {
            let meet: BTreeSet<usize> = rows.intersection(support).copied().collect();
            if !meet.is_empty() && closed.insert(meet.clone()) {
                frontier.push(meet);
            }
        }
    }
    let mut out: Vec<Clique> = closed
        .into_iter()
        .map(|rows| {
            let cols = (1..=s.n()).filter(|&j| rows.is_subset(s.col_support(j)));
            Clique::new(rows.iter().copied(), cols)
        })
        .collect();
    out.sort();
    out
}

/// Containment-maximal nonempty intersections of distinct pairs, sorted.
pub fn maximal_intersections(cliques: &[Clique]) -> Vec<Clique> {
    let mut all = BTreeSet::new();
    for a in 0..cliques.len() {
        for b in a + 1..cliques.len() {
            if let Some(c) = cliques[a].intersection(&cliques[b]) {
                all.insert(c);
            }
        }
    }
    let all: Vec<Clique> = all.into_iter().collect();
    all.iter()
        .filter(|c| !all.iter().any(|d| d != *c && c.is_subset(d)))
        .cloned()
        .collect()
}

/// `Int(S)`.
pub fn int_cliques(s: &Pattern) -> Vec<Clique> {
    maximal_intersections(&max_cliques(s).cliques)
}

/// `Max(ij)`: the maximal cliques containing `cell`.
pub fn max_of(s: &Pattern, cell: Cell) -> Result<Vec<Clique>> {
    if !s.contains_cell(cell) {
        return Err(Error::CellNotInSupport(cell));
    }
    Ok(max_cliques(s)
        .cliques
        .into_iter()
        .filter(|c| c.contains(cell))
        .collect())
}

/// `Int(ij)`: maximal pairwise intersections taken within `Max(ij)`.
pub fn int_of(s: &Pattern, cell: Cell) -> Result<Vec<Clique>> {
    Ok(maximal_intersections(&max_of(s, cell)?))
}

/// `Max(S)`, `Int(S)` and the per-cell sets, computed once per pattern.
#[derive(Debug, Clone)]
pub struct CliqueIndex {
    pattern: Pattern,
    max: MaxCliques,
    int: Vec<Clique>,
    max_of: Vec<Vec<Clique>>,
    int_of: Vec<Vec<Clique>>,
}

impl CliqueIndex {
    pub fn new(s: &Pattern) -> Self {
        let max = max_cliques(s);
        let int = maximal_intersections(&max.cliques);
        let max_of: Vec<Vec<Clique>> = s
            .cells()
            .iter()
            .map(|&c| max.cliques.iter().filter(|d| d.contains(c)).cloned().collect())
            .collect();
        let int_of = max_of.iter().map(|m| maximal_intersections(m)).collect();
        CliqueIndex {
            pattern: s.clone(),
            max,
            int,
            max_of,
            int_of,
        }
    }

    pub fn pattern(&self) -> &Pattern {
        &self.pattern
    }

    pub fn max(&self) -> &[Clique] {
        &self.max.cliques
    }

    pub fn source(&self) -> CliqueSource {
        self.max.source
    }

    pub fn int(&self) -> &[Clique] {
        &self.int
    }

    pub fn max_of(&self, cell: Cell) -> Result<&[Clique]> {
        let k = self
            .pattern
            .position(cell.row, cell.col)
            .ok_or(Error::CellNotInSupport(cell))?;
        Ok(&self.max_of[k])
    }

    pub fn int_of(&self, cell: Cell) -> Result<&[Clique]> {
        let k = self
            .pattern
            .position(cell.row, cell.col)
            .ok_or(Error::CellNotInSupport(cell))?;
        Ok(&self.int_of[k])
    }

    /// Cells where `Int(ij)` differs from `{C ∈ Int(S) : ij ∈ C}`, with the
    /// two sets. Empty on every doubly chordal bipartite pattern tested so far.
    pub fn int_divergence(&self) -> Vec<(Cell, Vec<Clique>, Vec<Clique>)> {
        self.pattern
            .cells()
            .iter()
            .zip(&self.int_of)
            .filter_map(|(&c, local)| {
                let global: Vec<Clique> =
                    self.int.iter().filter(|d| d.contains(c)).cloned().collect();
                (global != *local).then(|| (c, local.clone(), global))
            })
            .collect()
    }
}

/// Induced cliques of one anchor column ordered by containment of their
/// row sets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CliquePoset {
    pub anchor_col: usize,
    pub elements: Vec<Clique>,
    /// Block index each element was induced by.
    pub parts: Vec<usize>,
    /// `(lower, upper)` element indices of every cover relation.
    pub covers: Vec<(usize, usize)>,
}

impl CliquePoset {
    /// Strict order: the row set of `a` is a proper subset of that of `b`.
    pub fn less(&self, a: usize, b: usize) -> bool {
        let (ra, rb) = (&self.elements[a].rows, &self.elements[b].rows);
        ra.len() < rb.len() && ra.is_subset(rb)
    }

    /// Elements covering `a`.
    pub fn parents(&self, a: usize) -> Vec<usize> {
        self.covers
            .iter()
            .filter(|&&(lo, _)| lo == a)
            .map(|&(_, hi)| hi)
            .collect()
    }

    /// Elements covered by `a`.
    pub fn children(&self, a: usize) -> Vec<usize> {
        self.covers
            .iter()
            .filter(|&&(_, hi)| hi == a)
            .map(|&(lo, _)| lo)
            .collect()
    }

    /// Maximal elements.
    pub fn roots(&self) -> Vec<usize> {
        (0..self.elements.len())
            .filter(|&a| self.parents(a).is_empty())
            .collect()
    }

    /// Whether every element has at most one cover, i.e. the Hasse diagram
    /// is a forest.
    pub fn is_forest(&self) -> bool {
        (0..self.elements.len()).all(|a| self.parents(a).len() <= 1)
    }

    /// `D_α ∩ D_β` over all cover pairs, sorted and deduplicated.
    pub fn cover_intersections(&self) -> Vec<Clique> {
        let set: BTreeSet<Clique> = self
            .covers
            .iter()
            .filter_map(|&(lo, hi)| self.elements[lo].intersection(&self.elements[hi]))
            .collect();
        set.into_iter().collect()
    }
}

/// Builds the containment poset of the anchor column's induced cliques.
pub fn clique_poset(s: &Pattern, anchor: usize) -> Result<CliquePoset> {
    if let Some((column, _, _)) = ds_free_violation(s) {
        return Err(Error::NotDsFree { column });
    }
    let dec = blocks_for_column(s, anchor);
    let (parts, elements): (Vec<usize>, Vec<Clique>) = induced_cliques(s, &dec).into_iter().unzip();
    let mut poset = CliquePoset {
        anchor_col: anchor,
        elements,
        parts,
        covers: Vec::new(),
    };
    let k = poset.elements.len();
    for a in 0..k {
        for b in 0..k {
            if poset.less(a, b) && !(0..k).any(|c| poset.less(a, c) && poset.less(c, b)) {
                poset.covers.push((a, b));
            }
        }
    }
    Ok(poset)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    fn clique(cells: &[(usize, usize)]) -> Clique {
        let rows = cells.iter().map(|c| c.0);
        let cols = cells.iter().map(|c| c.1);
        let c = Clique::new(rows, cols);
        assert_eq!(c.size(), cells.len(), "{cells:?} is not a rectangle");
        c
    }

    /// Parses the `{11, 21, 31}` shorthand (single-digit indices).
    fn short(text: &str) -> Clique {
        let cells: Vec<(usize, usize)> = text
            .split(',')
            .map(|t| {
                let t = t.trim().as_bytes();
                ((t[0] - b'0') as usize, (t[1] - b'0') as usize)
            })
            .collect();
        clique(&cells)
    }

    fn tree_max() -> Vec<Clique> {
        let mut v: Vec<Clique> = [
            "11, 21, 31, 41, 51",
            "11, 12, 21, 22, 31, 32",
            "21, 22, 23, 31, 32, 33",
            "21, 22, 23, 28",
            "31, 32, 33, 34",
            "41, 45",
            "51, 56, 57",
            "45, 65",
            "56, 76, 86",
            "56, 57, 86, 87",
            "86, 87, 89",
        ]
        .iter()
        .map(|t| short(t))
        .collect();
        v.sort();
        v
    }

    fn tree_int() -> Vec<Clique> {
        let mut v: Vec<Clique> = [
            "11, 21, 31",
            "21, 22, 31, 32",
            "21, 22, 23",
            "31, 32, 33",
            "41",
            "51",
            "45",
            "56, 57",
            "56, 86",
            "86, 87",
        ]
        .iter()
        .map(|t| short(t))
        .collect();
        v.sort();
        v
    }

    #[test]
    fn blocks_of_tree_at_first_column() {
        let s = catalog::tree_8x9();
        let dec = blocks_for_column(&s, 1);
        assert_eq!(dec.r(), 5);
        let cols: Vec<Vec<usize>> = dec.parts.iter().map(|b| b.cols.iter().copied().collect()).collect();
        assert_eq!(
            cols,
            vec![vec![1], vec![2], vec![3], vec![4], vec![5], vec![6, 7], vec![8], vec![9]]
        );
        let cells = |p: usize| dec.parts[p].cells();
        assert_eq!(cells(0).len(), 5);
        assert_eq!(cells(1), short("12, 22, 32").cells());
        assert_eq!(cells(2), short("23, 33").cells());
        assert_eq!(cells(5), short("56, 57").cells());
        assert_eq!(cells(6), short("28").cells());
        assert!(dec.parts[7].is_empty());
        assert_eq!(dec.parts[1].rows, [1, 2, 3].into());
        assert_eq!(dec.parts[5].rows, [5].into());
    }

    #[test]
    fn blocks_of_full_and_corner_patterns() {
        let dec = blocks_for_column(&Pattern::full(3, 4), 2);
        assert_eq!(dec.parts.len(), 1);
        assert_eq!(dec.parts[0].cols, (1..=4).collect());

        // every column of the corner pattern agrees on rows {1,2}
        let dec = blocks_for_column(&catalog::corner_zero_3x3(), 3);
        assert_eq!(dec.anchor_rows, [1, 2].into());
        assert_eq!(dec.parts.len(), 1);
        assert_eq!(dec.parts[0].cols, [1, 2, 3].into());
        assert_eq!(dec.parts[0].rows, [1, 2].into());
    }

    #[test]
    fn induced_cliques_of_tree() {
        let s = catalog::tree_8x9();
        let dec = blocks_for_column(&s, 1);
        assert_eq!(induced_clique(&s, &dec, 1).unwrap(), short("11, 12, 21, 22, 31, 32"));
        assert_eq!(induced_clique(&s, &dec, 5).unwrap(), short("51, 56, 57"));
        assert_eq!(induced_clique(&s, &dec, 0).unwrap(), short("11, 21, 31, 41, 51"));
        assert_eq!(induced_clique(&s, &dec, 2).unwrap(), short("21, 22, 23, 31, 32, 33"));
        assert_eq!(induced_clique(&s, &dec, 3).unwrap(), short("31, 32, 33, 34"));
        assert_eq!(induced_clique(&s, &dec, 4).unwrap(), short("41, 45"));
        assert_eq!(induced_clique(&s, &dec, 6).unwrap(), short("21, 22, 23, 28"));
        assert!(matches!(induced_clique(&s, &dec, 7), Err(Error::EmptyBlock(7))));

        let full = Pattern::full(2, 3);
        let dec = blocks_for_column(&full, 1);
        assert_eq!(induced_clique(&full, &dec, 0).unwrap(), Clique::new(1..=2, 1..=3));
    }

    #[test]
    fn max_and_int_of_tree() {
        let s = catalog::tree_8x9();
        let max = max_cliques(&s);
        assert_eq!(max.source, CliqueSource::Blocks);
        assert_eq!(max.cliques, tree_max());
        assert_eq!(max_cliques_bruteforce(&s), tree_max());
        let int = int_cliques(&s);
        assert_eq!(int, tree_int());
        assert!(!int.contains(&short("31, 32")));
        assert!(int.iter().all(|c| c.is_clique_in(&s)));
    }

    #[test]
    fn max_cliques_small_patterns() {
        assert_eq!(max_cliques(&Pattern::full(3, 2)).cliques, vec![Clique::new(1..=3, 1..=2)]);
        assert!(int_cliques(&Pattern::full(3, 2)).is_empty());

        let corner = catalog::corner_zero_3x3();
        let mut expected = vec![Clique::new([1, 2], [1, 2, 3]), Clique::new([1, 2, 3], [1, 2])];
        expected.sort();
        assert_eq!(max_cliques(&corner).cliques, expected);
        assert_eq!(max_cliques_bruteforce(&corner), expected);
        assert_eq!(int_cliques(&corner), vec![Clique::new([1, 2], [1, 2])]);
    }

    #[test]
    fn double_square_falls_back_to_brute_force() {
        let ds = Pattern::double_square();
        let mut expected = vec![
            short("11, 12, 21, 22"),
            short("22, 23, 32, 33"),
            short("21, 22, 23"),
            short("12, 22, 32"),
        ];
        expected.sort();
        assert_eq!(max_cliques_bruteforce(&ds), expected);
        let max = max_cliques(&ds);
        assert_eq!(max.source, CliqueSource::BruteForce);
        assert_eq!(max.cliques, expected);
        assert!(!is_ds_free(&ds));
        assert!(!is_ds_free(&catalog::tree_8x9_with_double_square()));
    }

    #[test]
    fn per_cell_sets() {
        let s = catalog::tree_8x9();
        let max21 = max_of(&s, Cell::new(2, 1)).unwrap();
        assert_eq!(max21.len(), 4);
        let int21 = int_of(&s, Cell::new(2, 1)).unwrap();
        let mut expected = vec![short("11, 21, 31"), short("21, 22, 23"), short("21, 22, 31, 32")];
        expected.sort();
        assert_eq!(int21, expected);

        let corner = catalog::corner_zero_3x3();
        assert_eq!(max_of(&corner, Cell::new(1, 3)).unwrap(), vec![Clique::new([1, 2], [1, 2, 3])]);
        assert!(int_of(&corner, Cell::new(1, 3)).unwrap().is_empty());

        let full = Pattern::full(2, 2);
        assert_eq!(max_of(&full, Cell::new(2, 1)).unwrap().len(), 1);
        assert!(int_of(&full, Cell::new(2, 1)).unwrap().is_empty());

        assert!(matches!(
            max_of(&s, Cell::new(1, 9)),
            Err(Error::CellNotInSupport(_))
        ));

        let index = CliqueIndex::new(&s);
        assert!(index.int_divergence().is_empty());
        for &c in s.cells() {
            assert_eq!(index.max_of(c).unwrap().len(), index.int_of(c).unwrap().len() + 1);
        }
    }

    #[test]
    fn poset_of_tree_at_first_column() {
        let s = catalog::tree_8x9();
        let p = clique_poset(&s, 1).unwrap();
        assert_eq!(p.parts, vec![0, 1, 2, 3, 4, 5, 6]);
        let mut covers: Vec<(usize, usize)> = p
            .covers
            .iter()
            .map(|&(lo, hi)| (p.parts[lo], p.parts[hi]))
            .collect();
        covers.sort();
        // D1, D4, D5 under D0; D2 under D1; D3 and D6 under D2
        assert_eq!(covers, vec![(1, 0), (2, 1), (3, 2), (4, 0), (5, 0), (6, 2)]);
        assert!(p.is_forest());
        assert_eq!(p.roots(), vec![0]);
        assert_eq!(p.elements[0].rows, blocks_for_column(&s, 1).anchor_rows);

        let n1: Vec<Cell> = blocks_for_column(&s, 1).anchor_cells();
        let meeting: Vec<Clique> = int_cliques(&s)
            .into_iter()
            .filter(|c| n1.iter().any(|&x| c.contains(x)))
            .collect();
        assert_eq!(p.cover_intersections(), meeting);
    }

    #[test]
    fn poset_edge_cases() {
        let p = clique_poset(&Pattern::full(3, 3), 2).unwrap();
        assert_eq!(p.elements.len(), 1);
        assert!(p.covers.is_empty());
        assert!(matches!(
            clique_poset(&Pattern::double_square(), 1),
            Err(Error::NotDsFree { .. })
        ));
    }

    #[test]
    fn laminarity_violation_on_extended_tree() {
        let s = catalog::tree_8x9_with_double_square();
        let dec = blocks_for_column(&s, 1);
        let (a, b) = dec.laminarity_violation().unwrap();
        let rows = |p: usize| dec.parts[p].rows.clone();
        let mut pair = [rows(a), rows(b)];
        pair.sort();
        assert_eq!(pair, [BTreeSet::from([1, 2, 3]), BTreeSet::from([2, 3, 4])]);
    }
}

#[cfg(test)]
mod properties {
    use std::collections::BTreeSet;

    use proptest::prelude::*;

    use super::*;
    use crate::classify::classify;
    use crate::testgen;

    fn dcb_pattern() -> impl Strategy<Value = Pattern> {
        testgen::pattern(5).prop_filter("doubly chordal bipartite", |s| classify(s).is_doubly_chordal())
    }

    proptest! {
        #[test]
        fn blocks_agree_with_bruteforce(s in dcb_pattern()) {
            let fast: BTreeSet<Clique> = max_cliques(&s).cliques.into_iter().collect();
            let slow: BTreeSet<Clique> = max_cliques_bruteforce(&s).into_iter().collect();
            prop_assert_eq!(fast, slow);
        }

        #[test]
        fn posets_are_rooted_trees(s in dcb_pattern()) {
            let index = CliqueIndex::new(&s);
            for j in 1..=s.n() {
                prop_assert!(blocks_for_column(&s, j).laminarity_violation().is_none());
                let poset = clique_poset(&s, j).unwrap();
                prop_assert!(poset.is_forest());
                prop_assert_eq!(poset.roots().len(), 1);
                let anchor: Vec<Cell> = s.col_support(j).iter().map(|&i| Cell::new(i, j)).collect();
                let covers: BTreeSet<Clique> = poset.cover_intersections().into_iter().collect();
                let meeting: BTreeSet<Clique> = index
                    .int()
                    .iter()
                    .filter(|c| anchor.iter().any(|&x| c.contains(x)))
                    .cloned()
                    .collect();
                prop_assert_eq!(covers, meeting);
            }
        }

        #[test]
        fn per_cell_counts(s in dcb_pattern()) {
            let index = CliqueIndex::new(&s);
            for &c in s.cells() {
                prop_assert_eq!(index.max_of(c).unwrap().len(), index.int_of(c).unwrap().len() + 1);
                for k in index.int_of(c).unwrap() {
                    prop_assert!(k.is_clique_in(&s));
                }
            }
            prop_assert!(index.int_divergence().is_empty());
        }

        #[test]
        fn double_square_breaks_laminarity(s in testgen::pattern(5)) {
            let r = classify(&s);
            if r.verdict == crate::classify::Verdict::ChordalBipartiteOnly {
                prop_assert!(!is_ds_free(&s));
            }
        }
    }
}
