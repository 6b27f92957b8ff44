//! Support patterns, count tables, marginals and the design matrix.
//!
//! A [`Pattern`] is the set of cells of an `m × n` table that are not
//! structural zeros. Cells are 1-based and kept in row-major order; that
//! order fixes the column order of the design matrix, of Horn matrices and
//! of every serialized table.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::rational::{format_rational, parse_rational, Rational};

/// A 1-based `(row, column)` index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(from = "[usize; 2]", into = "[usize; 2]")]
pub struct Cell {
    pub row: usize,
    pub col: usize,
}

impl Cell {
    pub const fn new(row: usize, col: usize) -> Self {
        Cell { row, col }
    }
}

impl From<(usize, usize)> for Cell {
    fn from((row, col): (usize, usize)) -> Self {
        Cell { row, col }
    }
}

impl From<[usize; 2]> for Cell {
    fn from([row, col]: [usize; 2]) -> Self {
        Cell { row, col }
    }
}

impl From<Cell> for [usize; 2] {
    fn from(c: Cell) -> Self {
        [c.row, c.col]
    }
}

/// Prints `ij` when both indices are single digits, `(i,j)` otherwise.
impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.row < 10 && self.col < 10 {
            write!(f, "{}{}", self.row, self.col)
        } else {
            write!(f, "({},{})", self.row, self.col)
        }
    }
}

/// A structural-zero pattern `S ⊂ [m] × [n]` with no empty rows or columns.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Pattern {
    m: usize,
    n: usize,
    support: Vec<Cell>,
    // dense (m × n) lookup from cell to support position
    index: Vec<Option<usize>>,
    row_cols: Vec<BTreeSet<usize>>,
    col_rows: Vec<BTreeSet<usize>>,
}

impl Pattern {
    /// Builds a pattern from arbitrary cells; duplicates are merged and the
    /// support is sorted row-major.
    pub fn new<I, C>(m: usize, n: usize, cells: I) -> Result<Self>
    where
        I: IntoIterator<Item = C>,
        C: Into<Cell>,
    {
        if m == 0 || n == 0 {
            return Err(Error::EmptyInput);
        }
        let mut set = BTreeSet::new();
        for c in cells {
            let c: Cell = c.into();
            if c.row == 0 || c.row > m || c.col == 0 || c.col > n {
                return Err(Error::InvalidSelection(format!(
                    "cell ({},{}) outside a {}x{} table",
                    c.row, c.col, m, n
                )));
            }
            set.insert(c);
        }
        let support: Vec<Cell> = set.into_iter().collect();
        let mut index = vec![None; m * n];
        let mut row_cols = vec![BTreeSet::new(); m];
        let mut col_rows = vec![BTreeSet::new(); n];
        for (k, c) in support.iter().enumerate() {
            index[(c.row - 1) * n + (c.col - 1)] = Some(k);
            row_cols[c.row - 1].insert(c.col);
            col_rows[c.col - 1].insert(c.row);
        }
        if let Some(i) = row_cols.iter().position(BTreeSet::is_empty) {
            return Err(Error::EmptyRowOrColumn {
                axis: "row",
                index: i + 1,
            });
        }
        if let Some(j) = col_rows.iter().position(BTreeSet::is_empty) {
            return Err(Error::EmptyRowOrColumn {
                axis: "column",
                index: j + 1,
            });
        }
        Ok(Pattern {
            m,
            n,
            support,
            index,
            row_cols,
            col_rows,
        })
    }

    /// The full `m × n` table.
    pub fn full(m: usize, n: usize) -> Self {
        let cells = (1..=m).flat_map(|i| (1..=n).map(move |j| (i, j)));
        Pattern::new(m, n, cells).expect("full pattern is valid")
    }

    /// The single-cycle pattern `{(i,i)} ∪ {(i,i+1)} ∪ {(k,1)}` whose graph is
    /// a cycle of length `2k`. For `k = 2` this is the full 2×2 table.
    pub fn cycle(k: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidSelection(format!(
                "cycle half-length must be at least 2, got {k}"
            )));
        }
        let mut cells: Vec<(usize, usize)> = (1..=k).map(|i| (i, i)).collect();
        cells.extend((1..k).map(|i| (i, i + 1)));
        cells.push((k, 1));
        Pattern::new(k, k, cells)
    }

    /// `{11, 12, 21, 22, 23, 32, 33}`: two squares sharing an edge.
    pub fn double_square() -> Self {
        Pattern::new(
            3,
            3,
            [(1, 1), (1, 2), (2, 1), (2, 2), (2, 3), (3, 2), (3, 3)],
        )
        .expect("double square is valid")
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of support cells.
    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    /// Support cells in row-major order.
    pub fn cells(&self) -> &[Cell] {
        &self.support
    }

    pub fn contains(&self, row: usize, col: usize) -> bool {
        self.position(row, col).is_some()
    }

    pub fn contains_cell(&self, c: Cell) -> bool {
        self.contains(c.row, c.col)
    }

    /// Position of `(row, col)` in the row-major support order.
    pub fn position(&self, row: usize, col: usize) -> Option<usize> {
        if row == 0 || row > self.m || col == 0 || col > self.n {
            return None;
        }
        self.index[(row - 1) * self.n + (col - 1)]
    }

    /// Columns `j` with `(row, j) ∈ S`.
    pub fn row_support(&self, row: usize) -> &BTreeSet<usize> {
        &self.row_cols[row - 1]
    }

    /// Rows `i` with `(i, col) ∈ S`.
    pub fn col_support(&self, col: usize) -> &BTreeSet<usize> {
        &self.col_rows[col - 1]
    }

    /// Renders the grid with `*` for support cells and `0` for structural zeros.
    pub fn render(&self) -> String {
        let mut out = String::with_capacity(self.m * (self.n + 1));
        for i in 1..=self.m {
            for j in 1..=self.n {
                out.push(if self.contains(i, j) { '*' } else { '0' });
            }
            out.push('\n');
        }
        out
    }

    /// Relabels rows and columns: row `i` moves to `row_perm[i-1]`, column
    /// `j` to `col_perm[j-1]` (both permutations of `1..=m` / `1..=n`).
    pub fn permuted(&self, row_perm: &[usize], col_perm: &[usize]) -> Result<Self> {
        check_permutation(row_perm, self.m, "row")?;
        check_permutation(col_perm, self.n, "column")?;
        Pattern::new(
            self.m,
            self.n,
            self.support
                .iter()
                .map(|c| (row_perm[c.row - 1], col_perm[c.col - 1])),
        )
    }

    /// Whether the bipartite graph of the pattern is connected. Informational.
    pub fn is_connected(&self) -> bool {
        let total = self.m + self.n;
        let mut seen = vec![false; total];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            let neighbours: Vec<usize> = if v < self.m {
                self.row_cols[v].iter().map(|&j| self.m + j - 1).collect()
            } else {
                self.col_rows[v - self.m].iter().map(|&i| i - 1).collect()
            };
            for w in neighbours {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

fn check_permutation(perm: &[usize], len: usize, what: &str) -> Result<()> {
    let mut seen = vec![false; len];
    if perm.len() != len {
        return Err(Error::InvalidSelection(format!(
            "{what} permutation has length {}, expected {len}",
            perm.len()
        )));
    }
    for &p in perm {
        if p == 0 || p > len || seen[p - 1] {
            return Err(Error::InvalidSelection(format!(
                "{what} permutation is not a bijection of 1..={len}"
            )));
        }
        seen[p - 1] = true;
    }
    Ok(())
}

/// Parses a grid of `*` (support) and `0` / `.` (structural zero).
///
/// Spaces and tabs inside a line are ignored, as are blank lines before and
/// after the grid.
pub fn parse_pattern(text: &str) -> Result<Pattern> {
    let lines: Vec<&str> = text.lines().map(str::trim_end).collect();
    let first = lines.iter().position(|l| !l.trim().is_empty());
    let last = lines.iter().rposition(|l| !l.trim().is_empty());
    let (first, last) = match (first, last) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(Error::EmptyInput),
    };

    let mut cells = Vec::new();
    let mut width = None;
    for (row, line) in lines[first..=last].iter().enumerate() {
        let mut col = 0;
        for (position, ch) in line.chars().enumerate() {
            match ch {
                ' ' | '\t' => continue,
                '*' => {
                    col += 1;
                    cells.push((row + 1, col));
                }
                '0' | '.' => col += 1,
                _ => {
                    return Err(Error::InvalidCharacter {
                        line: first + row + 1,
                        position: position + 1,
                        ch,
                    })
                }
            }
        }
        match width {
            None => width = Some(col),
            Some(w) if w != col => {
                return Err(Error::RaggedGrid {
                    line: first + row + 1,
                    expected: w,
                    found: col,
                })
            }
            _ => {}
        }
    }
    let n = width.unwrap_or(0);
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    Pattern::new(last - first + 1, n, cells)
}

/// Nonnegative exact counts `u` indexed by the support of a pattern.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountTable {
    pattern: Pattern,
    values: Vec<Rational>,
}

impl CountTable {
    /// `values` are given in row-major support order.
    pub fn new(pattern: Pattern, values: Vec<Rational>) -> Result<Self> {
        if values.len() != pattern.len() {
            return Err(Error::InvalidCounts(format!(
                "expected {} values, got {}",
                pattern.len(),
                values.len()
            )));
        }
        if let Some(k) = values.iter().position(Signed::is_negative) {
            return Err(Error::InvalidCounts(format!(
                "negative count at cell {}",
                pattern.cells()[k]
            )));
        }
        Ok(CountTable { pattern, values })
    }

    pub fn from_integers(pattern: Pattern, values: &[i64]) -> Result<Self> {
        CountTable::new(pattern, values.iter().map(|&v| Rational::from_integer(v.into())).collect())
    }

    /// All-ones table.
    pub fn ones(pattern: Pattern) -> Self {
        let values = vec![Rational::from_integer(1.into()); pattern.len()];
        CountTable { pattern, values }
    }

    pub fn pattern(&self) -> &Pattern {
        &self.pattern
    }

    /// Values in row-major support order.
    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn get(&self, row: usize, col: usize) -> Option<&Rational> {
        self.pattern.position(row, col).map(|k| &self.values[k])
    }

    /// `u_{++}`.
    pub fn total(&self) -> Rational {
        self.values.iter().sum()
    }

    /// Sum of the counts over the given cells; cells outside the support
    /// contribute nothing.
    pub fn sum_over<'a, I>(&self, cells: I) -> Rational
    where
        I: IntoIterator<Item = &'a Cell>,
    {
        cells
            .into_iter()
            .filter_map(|c| self.get(c.row, c.col))
            .sum()
    }

    pub fn scaled(&self, factor: &Rational) -> Self {
        CountTable {
            pattern: self.pattern.clone(),
            values: self.values.iter().map(|v| v * factor).collect(),
        }
    }

    /// Applies the same relabeling as [`Pattern::permuted`] to the counts.
    pub fn permuted(&self, row_perm: &[usize], col_perm: &[usize]) -> Result<Self> {
        let pattern = self.pattern.permuted(row_perm, col_perm)?;
        let mut values = vec![Rational::zero(); pattern.len()];
        for (c, v) in self.pattern.cells().iter().zip(&self.values) {
            let k = pattern
                .position(row_perm[c.row - 1], col_perm[c.col - 1])
                .expect("permuted cell is in the permuted support");
            values[k] = v.clone();
        }
        Ok(CountTable { pattern, values })
    }

    pub fn is_positive(&self) -> bool {
        self.values.iter().all(Signed::is_positive)
    }
}

/// Parses an `m × n` CSV grid of counts against `pattern`.
///
/// Entries may be integers, fractions `a/b` or decimals. Structural-zero
/// positions may be empty or `0`; any other value there is ignored and
/// reported in the returned warnings.
pub fn parse_counts_csv(pattern: &Pattern, text: &str) -> Result<(CountTable, Vec<String>)> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .flexible(true)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut values = vec![Rational::zero(); pattern.len()];
    let mut warnings = Vec::new();
    let mut rows = 0;
    for (r, record) in reader.records().enumerate() {
        let record = record?;
        if record.iter().all(str::is_empty) {
            continue;
        }
        let i = r + 1;
        rows += 1;
        if i > pattern.m() {
            return Err(Error::InvalidCounts(format!(
                "expected {} rows, found more",
                pattern.m()
            )));
        }
        if record.len() != pattern.n() {
            return Err(Error::InvalidCounts(format!(
                "row {i} has {} entries, expected {}",
                record.len(),
                pattern.n()
            )));
        }
        for (c, field) in record.iter().enumerate() {
            let j = c + 1;
            let value = if field.is_empty() {
                Rational::zero()
            } else {
                parse_rational(field).ok_or_else(|| {
                    Error::InvalidCounts(format!("cannot parse {field:?} at ({i},{j})"))
                })?
            };
            match pattern.position(i, j) {
                Some(k) => {
                    if value.is_negative() {
                        return Err(Error::InvalidCounts(format!(
                            "negative count at ({i},{j})"
                        )));
                    }
                    values[k] = value;
                }
                None if !value.is_zero() => warnings.push(format!(
                    "ignoring nonzero entry {field} at structural zero ({i},{j})"
                )),
                None => {}
            }
        }
    }
    if rows != pattern.m() {
        return Err(Error::InvalidCounts(format!(
            "expected {} rows, found {rows}",
            pattern.m()
        )));
    }
    Ok((CountTable::new(pattern.clone(), values)?, warnings))
}

/// Exact row sums `u_{i+}`, column sums `u_{+j}` and total `u_{++}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Marginals {
    pub row_sums: Vec<Rational>,
    pub col_sums: Vec<Rational>,
    pub total: Rational,
}

pub fn marginals(u: &CountTable) -> Marginals {
    let s = u.pattern();
    let mut row_sums = vec![Rational::zero(); s.m()];
    let mut col_sums = vec![Rational::zero(); s.n()];
    for (c, v) in s.cells().iter().zip(u.values()) {
        row_sums[c.row - 1] += v;
        col_sums[c.col - 1] += v;
    }
    let total = u.total();
    Marginals {
        row_sums,
        col_sums,
        total,
    }
}

/// The `(m+n) × #S` 0/1 matrix `A(S)` of the log-linear model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DesignMatrix {
    pub entries: Vec<Vec<i64>>,
    pub columns: Vec<Cell>,
}

impl DesignMatrix {
    pub fn rows(&self) -> usize {
        self.entries.len()
    }

    /// `A · x` for a vector indexed like the columns.
    pub fn apply(&self, x: &[Rational]) -> Vec<Rational> {
        self.entries
            .iter()
            .map(|row| {
                row.iter()
                    .zip(x)
                    .filter(|(a, _)| **a != 0)
                    .map(|(a, v)| v * Rational::from_integer((*a).into()))
                    .sum()
            })
            .collect()
    }
}

pub fn design_matrix(s: &Pattern) -> DesignMatrix {
    let mut entries = vec![vec![0i64; s.len()]; s.m() + s.n()];
    for (k, c) in s.cells().iter().enumerate() {
        entries[c.row - 1][k] = 1;
        entries[s.m() + c.col - 1][k] = 1;
    }
    DesignMatrix {
        entries,
        columns: s.cells().to_vec(),
    }
}

/// Index translation for an induced subpattern: `rows[k]` is the original
/// index of new row `k + 1`, likewise for `cols`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubpatternMap {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

impl SubpatternMap {
    pub fn to_original(&self, c: Cell) -> Cell {
        Cell::new(self.rows[c.row - 1], self.cols[c.col - 1])
    }

    pub fn from_original(&self, c: Cell) -> Option<Cell> {
        let r = self.rows.iter().position(|&i| i == c.row)?;
        let k = self.cols.iter().position(|&j| j == c.col)?;
        Some(Cell::new(r + 1, k + 1))
    }
}

/// `S ∩ (rows × cols)`, reindexed to consecutive 1-based indices.
pub fn induced_subpattern(
    s: &Pattern,
    rows: &BTreeSet<usize>,
    cols: &BTreeSet<usize>,
) -> Result<(Pattern, SubpatternMap)> {
    if rows.is_empty() || cols.is_empty() {
        return Err(Error::InvalidSelection("empty row or column selection".into()));
    }
    if let Some(&i) = rows.iter().find(|&&i| i == 0 || i > s.m()) {
        return Err(Error::InvalidSelection(format!("row {i} out of range")));
    }
    if let Some(&j) = cols.iter().find(|&&j| j == 0 || j > s.n()) {
        return Err(Error::InvalidSelection(format!("column {j} out of range")));
    }
    let map = SubpatternMap {
        rows: rows.iter().copied().collect(),
        cols: cols.iter().copied().collect(),
    };
    let mut cells = Vec::new();
    for (a, &i) in map.rows.iter().enumerate() {
        for (b, &j) in map.cols.iter().enumerate() {
            if s.contains(i, j) {
                cells.push((a + 1, b + 1));
            }
        }
    }
    // report emptiness in original coordinates
    for (a, &i) in map.rows.iter().enumerate() {
        if !cells.iter().any(|&(r, _)| r == a + 1) {
            return Err(Error::EmptyRowOrColumn {
                axis: "row",
                index: i,
            });
        }
    }
    for (b, &j) in map.cols.iter().enumerate() {
        if !cells.iter().any(|&(_, c)| c == b + 1) {
            return Err(Error::EmptyRowOrColumn {
                axis: "column",
                index: j,
            });
        }
    }
    let sub = Pattern::new(map.rows.len(), map.cols.len(), cells)?;
    Ok((sub, map))
}

/// The counts of `u` on an induced subpattern.
pub fn restrict_counts(u: &CountTable, sub: &Pattern, map: &SubpatternMap) -> Result<CountTable> {
    let values = sub
        .cells()
        .iter()
        .map(|&c| {
            let o = map.to_original(c);
            u.get(o.row, o.col)
                .cloned()
                .ok_or(Error::CellNotInSupport(o))
        })
        .collect::<Result<Vec<_>>>()?;
    CountTable::new(sub.clone(), values)
}

/// `{"m":…, "n":…, "support":[[i,j],…], "counts":{"i,j": "…"}}`.
pub fn to_json(s: &Pattern, counts: Option<&CountTable>) -> serde_json::Value {
    let support: Vec<[usize; 2]> = s.cells().iter().map(|&c| c.into()).collect();
    let mut value = json!({ "m": s.m(), "n": s.n(), "support": support });
    if let Some(u) = counts {
        let map: BTreeMap<String, String> = u
            .pattern()
            .cells()
            .iter()
            .zip(u.values())
            .map(|(c, v)| (format!("{},{}", c.row, c.col), format_rational(v)))
            .collect();
        value["counts"] = json!(map);
    }
    value
}

#[derive(Deserialize)]
struct PatternJson {
    m: usize,
    n: usize,
    support: Vec<Cell>,
    #[serde(default)]
    counts: Option<BTreeMap<String, String>>,
}

/// Inverse of [`to_json`].
pub fn from_json(value: &serde_json::Value) -> Result<(Pattern, Option<CountTable>)> {
    let raw: PatternJson = serde_json::from_value(value.clone())?;
    let s = Pattern::new(raw.m, raw.n, raw.support)?;
    let counts = match raw.counts {
        None => None,
        Some(map) => {
            let mut values = vec![Rational::zero(); s.len()];
            for (key, v) in map {
                let (i, j) = key
                    .split_once(',')
                    .and_then(|(a, b)| Some((a.trim().parse().ok()?, b.trim().parse().ok()?)))
                    .ok_or_else(|| Error::InvalidCounts(format!("bad cell key {key:?}")))?;
                let k = s
                    .position(i, j)
                    .ok_or(Error::CellNotInSupport(Cell::new(i, j)))?;
                values[k] = parse_rational(&v)
                    .ok_or_else(|| Error::InvalidCounts(format!("cannot parse {v:?}")))?;
            }
            Some(CountTable::new(s.clone(), values)?)
        }
    };
    Ok((s, counts))
}
