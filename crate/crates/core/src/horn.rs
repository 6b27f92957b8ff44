//! Horn pairs `(B, h)` for doubly chordal bipartite patterns.
//!
//! The Horn map sends counts `u` to
//!
//! ```text
//! Ψ_k(u) = h_k ∏_i (Σ_j b_ij u_j)^{b_ik}
//! ```
//!
//! The rows of `B` are, in order: one per row marginal, one per column
//! marginal, a `+1` indicator per maximal intersection, a `−1` indicator per
//! maximal clique, and an all `−1` row for the grand total. With
//! `h_ij = (−1)^{#Max(ij)+1}` the map reproduces the clique formula.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::Zero;
use serde_json::{json, Value};

use crate::classify::classify;
use crate::cliques::{Clique, CliqueIndex};
use crate::error::{Error, Result};
use crate::mle::{CellFormula, Factor, FactorLabel, RationalTable};
use crate::pattern::{induced_subpattern, Cell, CountTable, Pattern, SubpatternMap};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum HornRowLabel {
    RowMarginal(usize),
    ColMarginal(usize),
    IntClique(Clique),
    MaxClique(Clique),
    GrandTotal,
}

impl HornRowLabel {
    pub fn kind(&self) -> &'static str {
        match self {
            HornRowLabel::RowMarginal(_) => "row_marginal",
            HornRowLabel::ColMarginal(_) => "col_marginal",
            HornRowLabel::IntClique(_) => "int_clique",
            HornRowLabel::MaxClique(_) => "max_clique",
            HornRowLabel::GrandTotal => "grand_total",
        }
    }

    fn factor_label(&self) -> FactorLabel {
        match self {
            HornRowLabel::RowMarginal(i) => FactorLabel::RowMarginal(*i),
            HornRowLabel::ColMarginal(j) => FactorLabel::ColMarginal(*j),
            HornRowLabel::IntClique(c) | HornRowLabel::MaxClique(c) => FactorLabel::Clique(c.clone()),
            HornRowLabel::GrandTotal => FactorLabel::Total,
        }
    }
}

impl fmt::Display for HornRowLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HornRowLabel::RowMarginal(i) => write!(f, "u{i}+"),
            HornRowLabel::ColMarginal(j) => write!(f, "u+{j}"),
            HornRowLabel::IntClique(c) => write!(f, "Int {c}"),
            HornRowLabel::MaxClique(c) => write!(f, "Max {c}"),
            HornRowLabel::GrandTotal => f.write_str("u++"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HornPair {
    labels: Vec<HornRowLabel>,
    matrix: Vec<Vec<i64>>,
    signs: Vec<i64>,
    pattern: Pattern,
    /// Maps the pair's pattern back to the pattern it was built from.
    origin: SubpatternMap,
    inert: Vec<bool>,
}

impl HornPair {
    pub fn labels(&self) -> &[HornRowLabel] {
        &self.labels
    }

    pub fn matrix(&self) -> &[Vec<i64>] {
        &self.matrix
    }

    pub fn signs(&self) -> &[i64] {
        &self.signs
    }

    /// The columns are indexed by this pattern's cells in row-major order.
    pub fn pattern(&self) -> &Pattern {
        &self.pattern
    }

    pub fn origin(&self) -> &SubpatternMap {
        &self.origin
    }

    /// Rows with no nonzero entry left after a restriction.
    pub fn inert(&self) -> &[bool] {
        &self.inert
    }

    /// Column labels in the coordinates of the original pattern.
    pub fn column_labels(&self) -> Vec<Cell> {
        self.pattern
            .cells()
            .iter()
            .map(|&c| self.origin.to_original(c))
            .collect()
    }

    pub fn column_sums(&self) -> Vec<i64> {
        (0..self.pattern.len())
            .map(|k| self.matrix.iter().map(|row| row[k]).sum())
            .collect()
    }

    /// Cells (in the pair's own coordinates) where row `r` is nonzero.
    fn row_cells(&self, r: usize) -> Vec<Cell> {
        self.pattern
            .cells()
            .iter()
            .zip(&self.matrix[r])
            .filter(|(_, &b)| b != 0)
            .map(|(&c, _)| c)
            .collect()
    }

    /// `Σ_j b_rj u_j`.
    fn linear_form(&self, r: usize, u: &CountTable) -> Rational {
        self.matrix[r]
            .iter()
            .zip(u.values())
            .filter(|(&b, _)| b != 0)
            .map(|(&b, v)| v * Rational::from_integer(b.into()))
            .sum()
    }

    /// Coordinate `k` of the map as a product of positive linear forms.
    /// Negative rows enter with their sign folded into `h_k`, so the result
    /// equals `Ψ_k` when [`Self::net_sign`] is `+1`.
    pub fn coordinate_formula(&self, k: usize) -> CellFormula {
        let mut numerator = Vec::new();
        let mut denominator = Vec::new();
        for (r, row) in self.matrix.iter().enumerate() {
            let b = row[k];
            if b == 0 {
                continue;
            }
            let factor = Factor {
                label: self.labels[r].factor_label(),
                cells: self.row_cells(r),
            };
            let target = if b > 0 { &mut numerator } else { &mut denominator };
            for _ in 0..b.unsigned_abs() {
                target.push(factor.clone());
            }
        }
        CellFormula {
            numerator,
            denominator,
        }
    }

    /// `h_k` times the signs of the linear forms raised to their exponents.
    pub fn net_sign(&self, k: usize) -> i64 {
        let mut sign = self.signs[k];
        for row in &self.matrix {
            let b = row[k];
            let row_negative = row.iter().any(|&x| x < 0);
            if row_negative && b % 2 != 0 {
                sign = -sign;
            }
        }
        sign
    }

    /// Tab separated: a header of column labels, one line per row of `B`
    /// with its label first, and a final `h` line.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("row");
        for c in self.column_labels() {
            out.push('\t');
            out.push_str(&c.to_string());
        }
        out.push('\n');
        for (r, row) in self.matrix.iter().enumerate() {
            out.push_str(&self.labels[r].to_string());
            if self.inert[r] {
                out.push_str(" (inert)");
            }
            for b in row {
                out.push('\t');
                out.push_str(&b.to_string());
            }
            out.push('\n');
        }
        out.push('h');
        for h in &self.signs {
            out.push('\t');
            out.push_str(&h.to_string());
        }
        out.push('\n');
        out
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .matrix
            .iter()
            .enumerate()
            .map(|(r, row)| {
                json!({
                    "label": self.labels[r].to_string(),
                    "kind": self.labels[r].kind(),
                    "entries": row,
                    "inert": self.inert[r],
                })
            })
            .collect();
        let columns: Vec<[usize; 2]> = self.column_labels().into_iter().map(Into::into).collect();
        json!({ "columns": columns, "rows": rows, "h": self.signs })
    }
}

/// Builds the Horn pair; refuses patterns that are not doubly chordal
/// bipartite.
pub fn build_horn_pair(s: &Pattern) -> Result<HornPair> {
    let verdict = classify(s);
    if !verdict.is_doubly_chordal() {
        return Err(Error::NotDoublyChordalBipartite(Box::new(verdict)));
    }
    Ok(build_from_index(&CliqueIndex::new(s)))
}

/// Builds the pair from a precomputed index without classifying.
pub fn build_from_index(index: &CliqueIndex) -> HornPair {
    let s = index.pattern();
    let cells = s.cells();
    let mut labels = Vec::new();
    let mut matrix = Vec::new();
    let mut push = |label: HornRowLabel, entry: &dyn Fn(Cell) -> i64| {
        labels.push(label);
        matrix.push(cells.iter().map(|&c| entry(c)).collect::<Vec<i64>>());
    };
    for i in 1..=s.m() {
        push(HornRowLabel::RowMarginal(i), &|c| (c.row == i) as i64);
    }
    for j in 1..=s.n() {
        push(HornRowLabel::ColMarginal(j), &|c| (c.col == j) as i64);
    }
    for c in index.int() {
        push(HornRowLabel::IntClique(c.clone()), &|x| c.contains(x) as i64);
    }
    for d in index.max() {
        push(HornRowLabel::MaxClique(d.clone()), &|x| -(d.contains(x) as i64));
    }
    push(HornRowLabel::GrandTotal, &|_| -1);

    let signs = cells
        .iter()
        .map(|&c| {
            let maxes = index.max_of(c).expect("cell in support").len();
            if maxes % 2 == 1 {
                1
            } else {
                -1
            }
        })
        .collect();
    let inert = vec![false; labels.len()];
    HornPair {
        labels,
        matrix,
        signs,
        pattern: s.clone(),
        origin: SubpatternMap {
            rows: (1..=s.m()).collect(),
            cols: (1..=s.n()).collect(),
        },
        inert,
    }
}

/// Evaluates `Ψ(u)` exactly.
pub fn evaluate_horn(hp: &HornPair, u: &CountTable) -> Result<RationalTable> {
    if u.pattern() != hp.pattern() {
        return Err(Error::InvalidCounts("count table is on a different pattern".into()));
    }
    let mut forms = Vec::with_capacity(hp.matrix.len());
    for r in 0..hp.matrix.len() {
        forms.push(hp.linear_form(r, u));
    }
    let mut values = Vec::with_capacity(hp.pattern.len());
    for k in 0..hp.pattern.len() {
        let mut v = Rational::from_integer(hp.signs[k].into());
        for (r, row) in hp.matrix.iter().enumerate() {
            let b = row[k];
            if b == 0 {
                continue;
            }
            if forms[r].is_zero() {
                return Err(Error::VanishingLinearForm {
                    label: hp.labels[r].to_string(),
                });
            }
            let power = num_traits::pow(forms[r].clone(), b.unsigned_abs() as usize);
            if b > 0 {
                v *= power;
            } else {
                v /= power;
            }
        }
        values.push(v);
    }
    RationalTable::new(hp.pattern.clone(), values)
}

/// Keeps the columns of `B` at the cells of the induced subpattern on
/// `rows × cols` (given in the pair's own coordinates). Row labels are kept;
/// rows left without a nonzero entry are flagged inert.
pub fn restrict_horn(hp: &HornPair, rows: &BTreeSet<usize>, cols: &BTreeSet<usize>) -> Result<HornPair> {
    let (sub, map) = induced_subpattern(&hp.pattern, rows, cols)?;
    let keep: Vec<usize> = sub
        .cells()
        .iter()
        .map(|&c| {
            let orig = map.to_original(c);
            hp.pattern.position(orig.row, orig.col).expect("retained cell")
        })
        .collect();
    let matrix: Vec<Vec<i64>> = hp
        .matrix
        .iter()
        .map(|row| keep.iter().map(|&k| row[k]).collect())
        .collect();
    let inert = matrix.iter().map(|row| row.iter().all(|&b| b == 0)).collect();
    let origin = SubpatternMap {
        rows: map.rows.iter().map(|&i| hp.origin.rows[i - 1]).collect(),
        cols: map.cols.iter().map(|&j| hp.origin.cols[j - 1]).collect(),
    };
    Ok(HornPair {
        labels: hp.labels.clone(),
        matrix,
        signs: keep.iter().map(|&k| hp.signs[k]).collect(),
        pattern: sub,
        origin,
        inert,
    })
}

/// Whether every column of `B` sums to zero.
pub fn has_zero_column_sums(hp: &HornPair) -> bool {
    hp.column_sums().iter().all(|&s| s == 0)
}

/// `Σ Ψ(u)`, which is 1 whenever the pair defines the estimator.
pub fn horn_total(hp: &HornPair, u: &CountTable) -> Result<Rational> {
    Ok(evaluate_horn(hp, u)?.values().iter().fold(Rational::zero(), |a, b| a + b))
}

/// `true` when every coordinate's net sign is `+1`.
pub fn is_sign_consistent(hp: &HornPair) -> bool {
    (0..hp.pattern.len()).all(|k| hp.net_sign(k) == 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::mle::clique_formula_mle;
    use crate::rational::ratio;

    fn set(v: &[usize]) -> BTreeSet<usize> {
        v.iter().copied().collect()
    }

    #[test]
    fn corner_pattern_pair() {
        let s = catalog::corner_zero_3x3();
        let hp = build_horn_pair(&s).unwrap();
        let expected: Vec<Vec<i64>> = vec![
            vec![1, 1, 1, 0, 0, 0, 0, 0],
            vec![0, 0, 0, 1, 1, 1, 0, 0],
            vec![0, 0, 0, 0, 0, 0, 1, 1],
            vec![1, 0, 0, 1, 0, 0, 1, 0],
            vec![0, 1, 0, 0, 1, 0, 0, 1],
            vec![0, 0, 1, 0, 0, 1, 0, 0],
            vec![1, 1, 0, 1, 1, 0, 0, 0],
            vec![-1, -1, -1, -1, -1, -1, 0, 0],
            vec![-1, -1, 0, -1, -1, 0, -1, -1],
            vec![-1; 8],
        ];
        let mut got = hp.matrix().to_vec();
        let mut want = expected;
        got.sort();
        want.sort();
        assert_eq!(got, want);
        assert_eq!(hp.signs(), &[-1, -1, 1, -1, -1, 1, 1, 1]);
        assert!(has_zero_column_sums(&hp));
        assert!(is_sign_consistent(&hp));

        let p = evaluate_horn(&hp, &CountTable::ones(s.clone())).unwrap();
        assert_eq!(p.get(1, 3), Some(&ratio(1, 8)));
        let k = s.position(1, 3).unwrap();
        assert_eq!(
            hp.coordinate_formula(k).to_string(),
            "(u11 + u12 + u13) (u13 + u23) / (u11 + u12 + u13 + u21 + u22 + u23) u++"
        );
    }

    #[test]
    fn full_2x2_pair() {
        let s = Pattern::full(2, 2);
        let hp = build_horn_pair(&s).unwrap();
        let kinds: Vec<&str> = hp.labels().iter().map(HornRowLabel::kind).collect();
        assert_eq!(
            kinds,
            ["row_marginal", "row_marginal", "col_marginal", "col_marginal", "max_clique", "grand_total"]
        );
        assert!(has_zero_column_sums(&hp));
        let u = CountTable::from_integers(s.clone(), &[1, 2, 3, 4]).unwrap();
        let p = evaluate_horn(&hp, &u).unwrap();
        assert_eq!(p.get(1, 2), Some(&ratio(3 * 6, 100)));
    }

    #[test]
    fn agrees_with_clique_formula_on_tree() {
        let s = catalog::tree_8x9();
        let hp = build_horn_pair(&s).unwrap();
        assert!(has_zero_column_sums(&hp));
        let u = CountTable::from_integers(s.clone(), &(1..=20).map(|x| x * 7 % 11 + 1).collect::<Vec<_>>()).unwrap();
        let p = clique_formula_mle(&s, &u).unwrap();
        assert_eq!(evaluate_horn(&hp, &u).unwrap().values(), p.values());
        let fixed = evaluate_horn(&hp, &p.as_counts().unwrap()).unwrap();
        assert_eq!(fixed.values(), p.values());
    }

    #[test]
    fn restriction_gives_independence() {
        let s = catalog::corner_zero_3x3();
        let hp = build_horn_pair(&s).unwrap();
        for (rows, cols) in [(set(&[1, 2]), set(&[1, 2, 3])), (set(&[1, 2, 3]), set(&[1, 2]))] {
            let r = restrict_horn(&hp, &rows, &cols).unwrap();
            let sub = r.pattern().clone();
            assert_eq!(sub, Pattern::full(rows.len(), cols.len()));
            let values: Vec<i64> = (1..=sub.len() as i64).collect();
            let u = CountTable::from_integers(sub.clone(), &values).unwrap();
            let p = evaluate_horn(&r, &u).unwrap();
            let q = clique_formula_mle(&sub, &u).unwrap();
            assert_eq!(p.values(), q.values());
        }
        let id = restrict_horn(&hp, &set(&[1, 2, 3]), &set(&[1, 2, 3])).unwrap();
        assert_eq!(id, hp);
    }

    #[test]
    fn restriction_flags_inert_rows() {
        let s = catalog::corner_zero_3x3();
        let hp = build_horn_pair(&s).unwrap();
        let r = restrict_horn(&hp, &set(&[1, 2]), &set(&[1, 2, 3])).unwrap();
        let inert: Vec<String> = r
            .labels()
            .iter()
            .zip(r.inert())
            .filter(|(_, &f)| f)
            .map(|(l, _)| l.to_string())
            .collect();
        assert_eq!(inert, ["u3+"]);
        assert_eq!(r.column_labels()[0], Cell::new(1, 1));
        assert!(matches!(
            restrict_horn(&hp, &set(&[3]), &set(&[3])),
            Err(Error::EmptyRowOrColumn { .. })
        ));
    }

    #[test]
    fn vanishing_form_is_named() {
        let s = catalog::corner_zero_3x3();
        let hp = build_horn_pair(&s).unwrap();
        let u = CountTable::from_integers(s.clone(), &[1, 1, 0, 1, 1, 0, 1, 1]).unwrap();
        match evaluate_horn(&hp, &u) {
            Err(Error::VanishingLinearForm { label }) => assert_eq!(label, "u+3"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn refuses_double_square() {
        assert!(matches!(
            build_horn_pair(&Pattern::double_square()),
            Err(Error::NotDoublyChordalBipartite(_))
        ));
    }

    #[test]
    fn serializations() {
        let hp = build_horn_pair(&Pattern::full(1, 2)).unwrap();
        let tsv = hp.to_tsv();
        assert!(tsv.starts_with("row\t11\t12\n"));
        assert!(tsv.ends_with("h\t1\t1\n"));
        let v = hp.to_json();
        assert_eq!(v["columns"][1], json!([1, 2]));
        assert_eq!(v["rows"][0]["kind"], "row_marginal");
    }
}
