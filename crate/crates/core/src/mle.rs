//! Closed-form maximum likelihood estimates for doubly chordal bipartite
//! patterns, and exact verification of the likelihood equations.
//!
//! For a doubly chordal bipartite support the estimate of cell `ij` is
//!
//! ```text
//!            u_{i+} u_{+j} ∏_{C ∈ Int(ij)} C⁺
//! p̂_ij = ──────────────────────────────────
//!            u_{++}  ∏_{D ∈ Max(ij)} D⁺
//! ```
//!
//! where `C⁺` is the sum of the counts over the cells of `C`. Everything
//! here is exact rational arithmetic.

use std::fmt;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::classify::classify;
use crate::cliques::{blocks_for_column, clique_poset, Clique, CliqueIndex};
use crate::error::{Error, Result};
use crate::pattern::{design_matrix, marginals, Cell, CountTable, Pattern};
use crate::rational::Rational;

/// What a linear form sums over.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub enum FactorLabel {
    RowMarginal(usize),
    ColMarginal(usize),
    Clique(Clique),
    Total,
}

impl fmt::Display for FactorLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FactorLabel::RowMarginal(i) => write!(f, "u{i}+"),
            FactorLabel::ColMarginal(j) => write!(f, "u+{j}"),
            FactorLabel::Clique(c) => write!(f, "{c}+"),
            FactorLabel::Total => f.write_str("u++"),
        }
    }
}

/// A labeled linear form: the sum of the counts over `cells`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Factor {
    pub label: FactorLabel,
    pub cells: Vec<Cell>,
}

impl Factor {
    pub fn row(s: &Pattern, i: usize) -> Self {
        Factor {
            label: FactorLabel::RowMarginal(i),
            cells: s.row_support(i).iter().map(|&j| Cell::new(i, j)).collect(),
        }
    }

    pub fn col(s: &Pattern, j: usize) -> Self {
        Factor {
            label: FactorLabel::ColMarginal(j),
            cells: s.col_support(j).iter().map(|&i| Cell::new(i, j)).collect(),
        }
    }

    pub fn clique(c: &Clique) -> Self {
        Factor {
            label: FactorLabel::Clique(c.clone()),
            cells: c.cells(),
        }
    }

    pub fn total(s: &Pattern) -> Self {
        Factor {
            label: FactorLabel::Total,
            cells: s.cells().to_vec(),
        }
    }

    pub fn evaluate(&self, u: &CountTable) -> Rational {
        u.sum_over(&self.cells)
    }
}

/// `(u11 + u12 + u13)`, or `u++` for the grand total.
impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.label == FactorLabel::Total {
            return f.write_str("u++");
        }
        if self.cells.len() == 1 {
            return write!(f, "u{}", self.cells[0]);
        }
        f.write_str("(")?;
        for (k, c) in self.cells.iter().enumerate() {
            if k > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "u{c}")?;
        }
        f.write_str(")")
    }
}

/// A product of linear forms over another, kept unsimplified.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CellFormula {
    pub numerator: Vec<Factor>,
    pub denominator: Vec<Factor>,
}

impl CellFormula {
    pub fn evaluate(&self, u: &CountTable) -> Result<Rational> {
        let mut den = Rational::one();
        for f in &self.denominator {
            let v = f.evaluate(u);
            if v.is_zero() {
                return Err(Error::ZeroDenominatorFactor {
                    label: f.label.to_string(),
                });
            }
            den *= v;
        }
        let num: Rational = self.numerator.iter().map(|f| f.evaluate(u)).product();
        Ok(num / den)
    }

    /// Cancels factors whose cell sets appear in both numerator and
    /// denominator (one occurrence each).
    pub fn simplified(&self) -> CellFormula {
        let mut numerator = Vec::new();
        let mut denominator = self.denominator.clone();
        for f in &self.numerator {
            match denominator.iter().position(|g| g.cells == f.cells) {
                Some(k) => {
                    denominator.remove(k);
                }
                None => numerator.push(f.clone()),
            }
        }
        CellFormula {
            numerator,
            denominator,
        }
    }

    /// Sorted cell sets of the numerator and denominator factors; two
    /// formulas with equal signatures are the same rational function.
    pub fn signature(&self) -> (Vec<Vec<Cell>>, Vec<Vec<Cell>>) {
        let sorted = |fs: &[Factor]| {
            let mut v: Vec<Vec<Cell>> = fs
                .iter()
                .map(|f| {
                    let mut c = f.cells.clone();
                    c.sort();
                    c
                })
                .collect();
            v.sort();
            v
        };
        (sorted(&self.numerator), sorted(&self.denominator))
    }
}

impl fmt::Display for CellFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let product = |fs: &[Factor]| {
            if fs.is_empty() {
                "1".to_string()
            } else {
                fs.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
            }
        };
        write!(f, "{} / {}", product(&self.numerator), product(&self.denominator))
    }
}

/// Exact values indexed by the support, with the factored formulas when
/// they came from the clique formula.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalTable {
    pattern: Pattern,
    values: Vec<Rational>,
    formulas: Option<Vec<CellFormula>>,
}

impl RationalTable {
    pub fn new(pattern: Pattern, values: Vec<Rational>) -> Result<Self> {
        if values.len() != pattern.len() {
            return Err(Error::InvalidCounts(format!(
                "expected {} values, got {}",
                pattern.len(),
                values.len()
            )));
        }
        Ok(RationalTable {
            pattern,
            values,
            formulas: None,
        })
    }

    /// `1/#S` on every cell.
    pub fn uniform(pattern: Pattern) -> Self {
        let v = Rational::new(1.into(), pattern.len().into());
        let values = vec![v; pattern.len()];
        RationalTable {
            pattern,
            values,
            formulas: None,
        }
    }

    pub fn pattern(&self) -> &Pattern {
        &self.pattern
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn get(&self, row: usize, col: usize) -> Option<&Rational> {
        self.pattern.position(row, col).map(|k| &self.values[k])
    }

    pub fn sum(&self) -> Rational {
        self.values.iter().sum()
    }

    pub fn formulas(&self) -> Option<&[CellFormula]> {
        self.formulas.as_deref()
    }

    pub fn formula(&self, cell: Cell) -> Option<&CellFormula> {
        let k = self.pattern.position(cell.row, cell.col)?;
        self.formulas.as_ref().map(|f| &f[k])
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.values.iter().map(crate::rational::to_f64).collect()
    }

    /// Reads the table as counts, e.g. to feed an estimate back in.
    pub fn as_counts(&self) -> Result<CountTable> {
        CountTable::new(self.pattern.clone(), self.values.clone())
    }
}

/// The factored estimate of one cell.
pub fn cell_formula(index: &CliqueIndex, cell: Cell) -> Result<CellFormula> {
    let s = index.pattern();
    let mut numerator = vec![Factor::row(s, cell.row), Factor::col(s, cell.col)];
    numerator.extend(index.int_of(cell)?.iter().map(Factor::clique));
    let mut denominator = vec![Factor::total(s)];
    denominator.extend(index.max_of(cell)?.iter().map(Factor::clique));
    Ok(CellFormula {
        numerator,
        denominator,
    })
}

/// The clique formula of one pattern, ready to evaluate at many count tables.
#[derive(Debug, Clone)]
pub struct CliqueFormula {
    index: CliqueIndex,
    formulas: Vec<CellFormula>,
}

impl CliqueFormula {
    /// Refuses patterns that are not doubly chordal bipartite; the error
    /// carries the classification witness.
    pub fn new(s: &Pattern) -> Result<Self> {
        let verdict = classify(s);
        if !verdict.is_doubly_chordal() {
            return Err(Error::NotDoublyChordalBipartite(Box::new(verdict)));
        }
        Ok(Self::unchecked(s))
    }

    /// Builds the formula without the classification gate. On other
    /// patterns the result is generally not the estimate.
    pub fn unchecked(s: &Pattern) -> Self {
        let index = CliqueIndex::new(s);
        let formulas = s
            .cells()
            .iter()
            .map(|&c| cell_formula(&index, c).expect("cell is in the support"))
            .collect();
        CliqueFormula { index, formulas }
    }

    pub fn index(&self) -> &CliqueIndex {
        &self.index
    }

    pub fn formulas(&self) -> &[CellFormula] {
        &self.formulas
    }

    pub fn evaluate(&self, u: &CountTable) -> Result<RationalTable> {
        let s = self.index.pattern();
        if u.pattern() != s {
            return Err(Error::InvalidCounts("count table is on a different pattern".into()));
        }
        // name the first vanishing clique sum before evaluating anything
        let total = u.total();
        if total.is_zero() {
            return Err(Error::ZeroDenominatorFactor {
                label: FactorLabel::Total.to_string(),
            });
        }
        let values = self
            .formulas
            .iter()
            .map(|f| f.evaluate(u))
            .collect::<Result<Vec<_>>>()?;
        Ok(RationalTable {
            pattern: s.clone(),
            values,
            formulas: Some(self.formulas.clone()),
        })
    }
}

/// The closed-form estimate for a doubly chordal bipartite pattern.
pub fn clique_formula_mle(s: &Pattern, u: &CountTable) -> Result<RationalTable> {
    CliqueFormula::new(s)?.evaluate(u)
}

/// One fully observed 2×2 minor `p_{i₁j₁}p_{i₂j₂} − p_{i₁j₂}p_{i₂j₁}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MinorResidual {
    pub rows: [usize; 2],
    pub cols: [usize; 2],
    #[serde(with = "crate::rational::as_string")]
    pub value: Rational,
}

/// Evaluates every 2×2 minor whose four cells lie in the support.
pub fn minor_residuals(s: &Pattern, p: &RationalTable) -> Vec<MinorResidual> {
    let at = |i: usize, j: usize| p.get(i, j).expect("cell in support");
    let mut out = Vec::new();
    for i1 in 1..=s.m() {
        for i2 in i1 + 1..=s.m() {
            let shared: Vec<usize> = s
                .row_support(i1)
                .intersection(s.row_support(i2))
                .copied()
                .collect();
            for (a, &j1) in shared.iter().enumerate() {
                for &j2 in &shared[a + 1..] {
                    let value = at(i1, j1) * at(i2, j2) - at(i1, j2) * at(i2, j1);
                    out.push(MinorResidual {
                        rows: [i1, i2],
                        cols: [j1, j2],
                        value,
                    });
                }
            }
        }
    }
    out
}

/// Exact residuals of the likelihood equations `A u / u₊₊ = A p`, `Σ p = 1`,
/// and of the model's defining 2×2 minors.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    #[serde(with = "crate::rational::as_strings")]
    pub row_residuals: Vec<Rational>,
    #[serde(with = "crate::rational::as_strings")]
    pub col_residuals: Vec<Rational>,
    #[serde(with = "crate::rational::as_string")]
    pub normalization_residual: Rational,
    pub minor_residuals: Vec<MinorResidual>,
}

impl VerificationReport {
    pub fn marginals_match(&self) -> bool {
        self.row_residuals
            .iter()
            .chain(&self.col_residuals)
            .all(Zero::is_zero)
    }

    pub fn minors_vanish(&self) -> bool {
        self.minor_residuals.iter().all(|r| r.value.is_zero())
    }

    /// All residuals are exactly zero.
    pub fn is_exact(&self) -> bool {
        self.marginals_match() && self.normalization_residual.is_zero() && self.minors_vanish()
    }
}

pub fn birch_residuals(s: &Pattern, u: &CountTable, p: &RationalTable) -> Result<VerificationReport> {
    if u.pattern() != s || p.pattern() != s {
        return Err(Error::InvalidCounts("tables are on a different pattern".into()));
    }
    let total = u.total();
    if total.is_zero() {
        return Err(Error::ZeroDenominatorFactor {
            label: FactorLabel::Total.to_string(),
        });
    }
    let a = design_matrix(s);
    let data = a.apply(u.values());
    let fitted = a.apply(p.values());
    let residuals: Vec<Rational> = data
        .iter()
        .zip(&fitted)
        .map(|(d, f)| d / &total - f)
        .collect();
    let (rows, cols) = residuals.split_at(s.m());
    Ok(VerificationReport {
        row_residuals: rows.to_vec(),
        col_residuals: cols.to_vec(),
        normalization_residual: p.sum() - Rational::one(),
        minor_residuals: minor_residuals(s, p),
    })
}

/// Both sides of the block-sum identity for one induced clique.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockSum {
    pub clique: Clique,
    pub lhs: Rational,
    pub rhs: Rational,
}

/// Checks, for every induced clique `D` of anchor column `j₀`, the identity
///
/// ```text
/// Σ_{i ∈ rows(D)} x_{ij₀} = u_{+j₀} · ∏ C⁺ · ∏ D'⁺ · ∏ E⁺
/// ```
///
/// where `x_{ij} = p̂_ij · u₊₊ ∏_{Max(S)} D⁺` is the cleared numerator, the
/// `C` range over maximal intersections meeting column `j₀` whose rows (on
/// the anchor) contain those of `D`, the `D'` over maximal cliques meeting
/// the column with rows inside those of `D`, and the `E` over maximal
/// cliques missing the anchor cells of `D`. Summing over the root clique
/// gives the column-marginal equation.
pub fn block_sum_identity(index: &CliqueIndex, u: &CountTable, anchor: usize) -> Result<Vec<BlockSum>> {
    let s = index.pattern();
    let poset = clique_poset(s, anchor)?;
    let dec = blocks_for_column(s, anchor);
    let n_cells = dec.anchor_cells();
    let mg = marginals(u);
    let sum = |c: &Clique| u.sum_over(&c.cells());
    let meets_anchor = |c: &Clique| n_cells.iter().any(|&x| c.contains(x));

    let x = |i: usize| -> Result<Rational> {
        let cell = Cell::new(i, anchor);
        let mut v = &mg.row_sums[i - 1] * &mg.col_sums[anchor - 1];
        for c in index.int_of(cell)? {
            v *= sum(c);
        }
        let own = index.max_of(cell)?;
        for d in index.max() {
            if !own.contains(d) {
                v *= sum(d);
            }
        }
        Ok(v)
    };

    let mut out = Vec::new();
    for d in &poset.elements {
        let d_rows = dec.restrict(&d.rows);
        let mut lhs = Rational::zero();
        for &i in &d_rows {
            lhs += x(i)?;
        }
        let mut rhs = mg.col_sums[anchor - 1].clone();
        for c in index.int() {
            if meets_anchor(c) && d_rows.is_subset(&dec.restrict(&c.rows)) {
                rhs *= sum(c);
            }
        }
        for e in index.max() {
            if meets_anchor(e) && dec.restrict(&e.rows).is_subset(&d_rows) {
                rhs *= sum(e);
            }
            let touches = d_rows.iter().any(|&i| e.contains(Cell::new(i, anchor)));
            if !touches {
                rhs *= sum(e);
            }
        }
        out.push(BlockSum {
            clique: d.clone(),
            lhs,
            rhs,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::rational::{int, ratio};

    fn corner_formula_13(s: &Pattern) -> CellFormula {
        let row1 = Factor::row(s, 1);
        let col3 = Factor::col(s, 3);
        let top = Factor::clique(&Clique::new([1, 2], [1, 2, 3]));
        CellFormula {
            numerator: vec![row1, col3],
            denominator: vec![Factor::total(s), top],
        }
    }

    #[test]
    fn corner_pattern_formula_for_13() {
        let s = catalog::corner_zero_3x3();
        let f = CliqueFormula::new(&s).unwrap();
        let got = &f.formulas()[s.position(1, 3).unwrap()];
        assert_eq!(got.signature(), corner_formula_13(&s).signature());
        assert_eq!(
            got.to_string(),
            "(u11 + u12 + u13) (u13 + u23) / u++ (u11 + u12 + u13 + u21 + u22 + u23)"
        );

        let p = f.evaluate(&CountTable::ones(s.clone())).unwrap();
        assert_eq!(p.get(1, 3), Some(&ratio(1, 8)));
        assert_eq!(p.sum(), int(1));
    }

    #[test]
    fn full_table_is_independence() {
        let s = Pattern::full(2, 2);
        let p = clique_formula_mle(&s, &CountTable::ones(s.clone())).unwrap();
        assert!(p.values().iter().all(|v| *v == ratio(1, 4)));

        let u = CountTable::from_integers(Pattern::full(2, 3), &[1, 2, 3, 4, 5, 6]).unwrap();
        let p = clique_formula_mle(u.pattern(), &u).unwrap();
        // u_{i+} u_{+j} / u_{++}^2
        assert_eq!(p.get(2, 3), Some(&ratio(15 * 9, 21 * 21)));
    }

    #[test]
    fn tree_numerator_for_21() {
        let s = catalog::tree_8x9();
        let f = CliqueFormula::new(&s).unwrap();
        let got = &f.formulas()[s.position(2, 1).unwrap()];
        let sets = |text: &[&str]| {
            let mut v: Vec<Vec<Cell>> = text
                .iter()
                .map(|t| {
                    let mut c: Vec<Cell> = t
                        .split(',')
                        .map(|x| {
                            let b = x.trim().as_bytes();
                            Cell::new((b[0] - b'0') as usize, (b[1] - b'0') as usize)
                        })
                        .collect();
                    c.sort();
                    c
                })
                .collect();
            v.sort();
            v
        };
        let (num, den) = got.signature();
        assert_eq!(
            num,
            sets(&[
                "21, 22, 23, 28",
                "11, 21, 31, 41, 51",
                "11, 21, 31",
                "21, 22, 23",
                "21, 22, 31, 32",
            ])
        );
        let mut expected_den = sets(&[
            "11, 21, 31, 41, 51",
            "11, 12, 21, 22, 31, 32",
            "21, 22, 23, 28",
            "21, 22, 23, 31, 32, 33",
        ]);
        expected_den.push(s.cells().to_vec());
        expected_den.sort();
        assert_eq!(den, expected_den);

        // single-row and single-column cliques cancel against the marginals
        let simplified = got.simplified();
        assert_eq!(simplified.numerator.len(), 3);
        assert_eq!(simplified.denominator.len(), 3);
    }

    #[test]
    fn refuses_non_dcb() {
        let s = Pattern::double_square();
        let u = CountTable::ones(s.clone());
        match clique_formula_mle(&s, &u) {
            Err(Error::NotDoublyChordalBipartite(r)) => assert!(r.witness.is_some()),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn vanishing_clique_sum_is_named() {
        let s = catalog::corner_zero_3x3();
        // zero out the top 2x3 clique
        let u = CountTable::from_integers(s.clone(), &[0, 0, 0, 0, 0, 0, 1, 1]).unwrap();
        match clique_formula_mle(&s, &u) {
            Err(Error::ZeroDenominatorFactor { label }) => assert!(label.contains("11, 12, 13")),
            other => panic!("unexpected {other:?}"),
        }
        let zero = CountTable::from_integers(s.clone(), &[0; 8]).unwrap();
        assert!(matches!(
            clique_formula_mle(&s, &zero),
            Err(Error::ZeroDenominatorFactor { .. })
        ));
    }

    #[test]
    fn birch_continuation_on_corner_pattern() {
        let s = catalog::corner_zero_3x3();
        let u = CountTable::from_integers(s.clone(), &[3, 1, 4, 1, 5, 9, 2, 6]).unwrap();
        let p = clique_formula_mle(&s, &u).unwrap();
        // last row of A: column 3 sum
        let col3 = p.get(1, 3).unwrap() + p.get(2, 3).unwrap();
        assert_eq!(col3, ratio(4 + 9, 31));
        let report = birch_residuals(&s, &u, &p).unwrap();
        assert!(report.is_exact());
    }

    #[test]
    fn uniform_table_fails_birch_on_skewed_counts() {
        let s = catalog::corner_zero_3x3();
        let u = CountTable::from_integers(s.clone(), &[1, 2, 3, 4, 5, 6, 7, 8]).unwrap();
        let report = birch_residuals(&s, &u, &RationalTable::uniform(s.clone())).unwrap();
        assert!(!report.marginals_match());
        assert!(report.normalization_residual.is_zero());
    }

    #[test]
    fn minors() {
        let s = catalog::tree_8x9();
        let u = CountTable::from_integers(s.clone(), &(1..=20).collect::<Vec<_>>()).unwrap();
        let p = clique_formula_mle(&s, &u).unwrap();
        let minors = minor_residuals(&s, &p);
        // rows {1,2,3} x cols {1,2} and rows {2,3} x cols {1,2,3} are fully observed
        assert_eq!(minors.len(), 6);
        assert!(minors.iter().any(|r| r.rows == [2, 3] && r.cols == [1, 2]));
        assert!(minors.iter().all(|r| r.value.is_zero()));

        let c3 = Pattern::cycle(3).unwrap();
        assert!(minor_residuals(&c3, &RationalTable::uniform(c3.clone())).is_empty());
    }

    #[test]
    fn block_sums_on_tree() {
        let s = catalog::tree_8x9();
        let u = CountTable::from_integers(s.clone(), &[2, 7, 1, 8, 2, 8, 1, 8, 2, 8, 4, 5, 9, 4, 5, 2, 3, 5, 3, 6]).unwrap();
        let index = CliqueIndex::new(&s);
        for j in 1..=s.n() {
            let checks = block_sum_identity(&index, &u, j).unwrap();
            assert!(!checks.is_empty());
            for c in checks {
                assert_eq!(c.lhs, c.rhs, "anchor {j}, clique {}", c.clique);
            }
        }
    }
}

#[cfg(test)]
mod properties {
    use proptest::prelude::*;

    use super::*;
    use crate::testgen;

    fn dcb_counts() -> impl Strategy<Value = CountTable> {
        testgen::pattern_with_counts(5).prop_filter("doubly chordal bipartite", |u| {
            classify(u.pattern()).is_doubly_chordal()
        })
    }

    proptest! {
        #[test]
        fn estimate_solves_the_likelihood_equations(u in dcb_counts()) {
            let s = u.pattern();
            let p = clique_formula_mle(s, &u).unwrap();
            prop_assert!(birch_residuals(s, &u, &p).unwrap().is_exact());
            prop_assert!(p.values().iter().all(|v| v > &Rational::zero()));
        }

        #[test]
        fn scaling_counts_leaves_estimate(u in dcb_counts(), c in 1i64..20, d in 1i64..20) {
            let s = u.pattern();
            let factor = crate::rational::ratio(c, d);
            let p = clique_formula_mle(s, &u).unwrap();
            let q = clique_formula_mle(s, &u.scaled(&factor)).unwrap();
            prop_assert_eq!(p.values(), q.values());
        }

        #[test]
        fn relabelling_commutes(
            (u, (rp, cp)) in dcb_counts()
                .prop_flat_map(|u| { let (m, n) = (u.pattern().m(), u.pattern().n()); (Just(u), testgen::permutations(m, n)) })
        ) {
            let p = clique_formula_mle(u.pattern(), &u).unwrap();
            let v = u.permuted(&rp, &cp).unwrap();
            let q = clique_formula_mle(v.pattern(), &v).unwrap();
            for (c, value) in u.pattern().cells().iter().zip(p.values()) {
                prop_assert_eq!(q.get(rp[c.row - 1], cp[c.col - 1]).unwrap(), value);
            }
        }

        #[test]
        fn block_sums_hold(u in dcb_counts()) {
            let index = CliqueIndex::new(u.pattern());
            for j in 1..=u.pattern().n() {
                for check in block_sum_identity(&index, &u, j).unwrap() {
                    prop_assert_eq!(&check.lhs, &check.rhs);
                }
            }
        }
    }
}
