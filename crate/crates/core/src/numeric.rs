//! Numeric cross-checks: iterative proportional fitting, the
//! log-likelihood, and the critical-equation polynomials that certify
//! ML-degree above one for cycles and the double square.

use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::pattern::{marginals, CountTable, Pattern};
use crate::rational::{int, to_f64, Rational};

/// An IPF estimate.
#[derive(Debug, Clone)]
pub struct NumericTable {
    pub values: Vec<f64>,
    pub iterations: usize,
    /// Largest absolute gap between the fitted and observed margins (both
    /// normalized to sum to one) at the last iterate.
    pub max_marginal_gap: f64,
}

/// Fits the quasi-independence model by alternately rescaling rows and
/// columns of a table supported on `s`, starting from the uniform table.
///
/// Stops once every normalized margin is within `tol` of the data's. Rows
/// or columns with zero count stay at zero. On running out of iterations
/// the last iterate is returned inside [`Error::NoConvergence`].
pub fn ipf_mle(s: &Pattern, u: &CountTable, tol: f64, max_iter: usize) -> Result<NumericTable> {
    if u.pattern() != s {
        return Err(Error::InvalidCounts("count table is on a different pattern".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidCounts(format!("tolerance must be positive, got {tol}")));
    }
    let mg = marginals(u);
    if mg.total.is_zero() {
        return Err(Error::InvalidCounts("all counts are zero".into()));
    }
    let total = to_f64(&mg.total);
    let row_target: Vec<f64> = mg.row_sums.iter().map(|r| to_f64(r) / total).collect();
    let col_target: Vec<f64> = mg.col_sums.iter().map(|c| to_f64(c) / total).collect();
    let cells = s.cells();
    let mut p = vec![1.0 / cells.len() as f64; cells.len()];

    let sums = |p: &[f64]| {
        let mut rows = vec![0.0; s.m()];
        let mut cols = vec![0.0; s.n()];
        for (c, v) in cells.iter().zip(p) {
            rows[c.row - 1] += v;
            cols[c.col - 1] += v;
        }
        (rows, cols)
    };
    let gap = |p: &[f64]| {
        let (rows, cols) = sums(p);
        rows.iter()
            .zip(&row_target)
            .chain(cols.iter().zip(&col_target))
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    };

    let mut current = gap(&p);
    let mut iterations = 0;
    while current >= tol {
        if iterations == max_iter {
            return Err(Error::NoConvergence(Box::new(NumericTable {
                values: p,
                iterations,
                max_marginal_gap: current,
            })));
        }
        let (rows, _) = sums(&p);
        for (c, v) in cells.iter().zip(p.iter_mut()) {
            let have = rows[c.row - 1];
            *v = if have > 0.0 { *v * row_target[c.row - 1] / have } else { 0.0 };
        }
        let (_, cols) = sums(&p);
        for (c, v) in cells.iter().zip(p.iter_mut()) {
            let have = cols[c.col - 1];
            *v = if have > 0.0 { *v * col_target[c.col - 1] / have } else { 0.0 };
        }
        iterations += 1;
        current = gap(&p);
    }
    Ok(NumericTable {
        values: p,
        iterations,
        max_marginal_gap: current,
    })
}

/// `Σ u_ij log p_ij`, with `p` indexed like the support.
pub fn loglik(s: &Pattern, u: &CountTable, p: &[f64]) -> f64 {
    debug_assert_eq!(s.len(), p.len());
    u.values()
        .iter()
        .zip(p)
        .map(|(c, q)| {
            let c = to_f64(c);
            if c == 0.0 {
                0.0
            } else {
                c * q.ln()
            }
        })
        .sum()
}

/// A univariate polynomial with exact rational coefficients, lowest degree
/// first. Trailing zero coefficients are dropped on construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polynomial {
    coefficients: Vec<Rational>,
}

impl Polynomial {
    pub fn new(mut coefficients: Vec<Rational>) -> Self {
        while coefficients.last().is_some_and(Zero::is_zero) {
            coefficients.pop();
        }
        Polynomial { coefficients }
    }

    pub fn from_integers(coefficients: &[i64]) -> Self {
        Self::new(coefficients.iter().map(|&c| int(c)).collect())
    }

    pub fn zero() -> Self {
        Polynomial { coefficients: Vec::new() }
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    /// `x + a`.
    pub fn linear(a: Rational) -> Self {
        Self::new(vec![a, Rational::one()])
    }

    pub fn coefficients(&self) -> &[Rational] {
        &self.coefficients
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coefficients.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.coefficients.last()
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coefficients
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coefficients
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + to_f64(c))
    }

    /// Divides by the leading coefficient.
    pub fn monic(&self) -> Self {
        match self.leading() {
            None => self.clone(),
            Some(lc) => Self::new(self.coefficients.iter().map(|c| c / lc).collect()),
        }
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coefficients
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * int(k as i64))
                .collect(),
        )
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coefficients.len().max(other.coefficients.len());
        let zero = Rational::zero();
        Self::new(
            (0..n)
                .map(|k| {
                    self.coefficients.get(k).unwrap_or(&zero) + other.coefficients.get(k).unwrap_or(&zero)
                })
                .collect(),
        )
    }

    pub fn neg(&self) -> Self {
        Self::new(self.coefficients.iter().map(|c| -c).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![Rational::zero(); self.coefficients.len() + other.coefficients.len() - 1];
        for (a, x) in self.coefficients.iter().enumerate() {
            for (b, y) in other.coefficients.iter().enumerate() {
                out[a + b] += x * y;
            }
        }
        Self::new(out)
    }

    /// Quotient and remainder. Panics on division by zero.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let lc = divisor.leading().expect("nonzero divisor").clone();
        let mut rem = self.coefficients.clone();
        let mut quot = vec![Rational::zero(); rem.len().saturating_sub(dd)];
        while rem.len() > dd && !rem.is_empty() {
            let shift = rem.len() - 1 - dd;
            let factor = rem.last().expect("nonempty") / &lc;
            for (k, c) in divisor.coefficients.iter().enumerate() {
                rem[shift + k] -= &factor * c;
            }
            quot[shift] = factor;
            rem.pop();
            while rem.last().is_some_and(Zero::is_zero) {
                rem.pop();
            }
        }
        (Self::new(quot), Self::new(rem))
    }

    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    /// The product of the distinct irreducible factors.
    pub fn square_free(&self) -> Self {
        if self.degree().unwrap_or(0) == 0 {
            return self.clone();
        }
        let g = self.gcd(&self.derivative());
        self.div_rem(&g).0
    }

    fn sturm_chain(&self) -> Vec<Self> {
        let mut chain = vec![self.clone(), self.derivative()];
        loop {
            let n = chain.len();
            if chain[n - 1].is_zero() {
                chain.pop();
                return chain;
            }
            let r = chain[n - 2].div_rem(&chain[n - 1]).1.neg();
            chain.push(r);
        }
    }

    fn sign_changes(chain: &[Self], x: &Rational) -> usize {
        let signs: Vec<bool> = chain
            .iter()
            .map(|p| p.eval(x))
            .filter(|v| !v.is_zero())
            .map(|v| v.is_positive())
            .collect();
        signs.windows(2).filter(|w| w[0] != w[1]).count()
    }

    /// Every coefficient bound: all real roots lie in `(-b, b)`.
    fn root_bound(&self) -> Rational {
        let lc = self.leading().expect("nonzero").abs();
        let m = self.coefficients[..self.coefficients.len() - 1]
            .iter()
            .map(|c| c.abs() / &lc)
            .fold(Rational::zero(), |a, b| if b > a { b } else { a });
        m + Rational::one()
    }

    /// Number of distinct real roots.
    pub fn real_root_count(&self) -> usize {
        if self.degree().unwrap_or(0) == 0 {
            return 0;
        }
        let sf = self.square_free();
        let chain = sf.sturm_chain();
        let b = sf.root_bound();
        Self::sign_changes(&chain, &-b.clone()) - Self::sign_changes(&chain, &b)
    }

    /// Distinct real roots in increasing order, each isolated by Sturm
    /// sequences and refined by bisection to an interval narrower than
    /// `2^-60` relative to the root bound.
    pub fn real_roots(&self) -> Vec<f64> {
        if self.degree().unwrap_or(0) == 0 {
            return Vec::new();
        }
        let sf = self.square_free();
        let chain = sf.sturm_chain();
        let b = sf.root_bound();
        let width = &b * Rational::new(1.into(), num_bigint::BigInt::from(1u64 << 60));
        let mut out = Vec::new();
        let mut stack = vec![(-b.clone(), b)];
        let two = int(2);
        while let Some((lo, hi)) = stack.pop() {
            let count = Self::sign_changes(&chain, &lo) - Self::sign_changes(&chain, &hi);
            if count == 0 {
                continue;
            }
            if count == 1 && &hi - &lo < width {
                out.push(to_f64(&((lo + hi) / &two)));
                continue;
            }
            let mid = (&lo + &hi) / &two;
            if sf.eval(&mid).is_zero() && count == 1 {
                out.push(to_f64(&mid));
                continue;
            }
            stack.push((lo, mid.clone()));
            stack.push((mid, hi));
        }
        out.sort_by(f64::total_cmp);
        out
    }

    /// Formats with the given variable name, highest degree first.
    pub fn display_in(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (k, c) in self.coefficients.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let negative = c.is_negative();
            if out.is_empty() {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            let a = c.abs();
            let coef = crate::rational::format_rational(&a);
            let monomial = match k {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{k}"),
            };
            if k == 0 {
                out.push_str(&coef);
            } else if a.is_one() {
                out.push_str(&monomial);
            } else if a.is_integer() {
                out.push_str(&format!("{coef}{monomial}"));
            } else {
                out.push_str(&format!("({coef}){monomial}"));
            }
        }
        out
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_in("x"))
    }
}

/// A real solution of a critical system and the table it determines.
#[derive(Debug, Clone, PartialEq)]
pub struct CriticalPoint {
    /// The unknowns, `[α]` for cycles and `[α, β]` for the double square.
    pub params: Vec<f64>,
    /// Probabilities indexed like the support; they sum to one.
    pub table: Vec<f64>,
}

impl CriticalPoint {
    pub fn is_positive(&self) -> bool {
        self.table.iter().all(|&p| p > 0.0)
    }
}

/// The positive critical point, if exactly one exists.
pub fn select_positive(points: &[CriticalPoint]) -> Option<&CriticalPoint> {
    let mut positive = points.iter().filter(|p| p.is_positive());
    let first = positive.next()?;
    positive.next().is_none().then_some(first)
}

fn check_cycle(k: usize, u: &CountTable) -> Result<Pattern> {
    let s = Pattern::cycle(k).map_err(|e| Error::WrongPattern(e.to_string()))?;
    if u.pattern() != &s {
        return Err(Error::WrongPattern(format!(
            "counts are not on the {k}-cycle pattern {}",
            s.render().trim_end().replace('\n', "/")
        )));
    }
    Ok(s)
}

/// `∏ (u_{i,i} + α) − ∏ (u_{i,i+1} − α)` with `u_{k,k+1} = u_{k,1}`, whose
/// roots parametrize the critical points on the cycle of length `2k`.
pub fn cycle_ml_polynomial(k: usize, u: &CountTable) -> Result<Polynomial> {
    check_cycle(k, u)?;
    let at = |i: usize, j: usize| u.get(i, j).expect("cycle cell").clone();
    let mut diagonal = Polynomial::constant(Rational::one());
    let mut offdiagonal = Polynomial::constant(Rational::one());
    for i in 1..=k {
        diagonal = diagonal.mul(&Polynomial::linear(at(i, i)));
        let next = if i == k { 1 } else { i + 1 };
        offdiagonal = offdiagonal.mul(&Polynomial::new(vec![at(i, next), -Rational::one()]));
    }
    Ok(diagonal.sub(&offdiagonal))
}

/// Back-substitutes every real root of the cycle polynomial:
/// `p_{i,i} = (u_{i,i} + α)/u₊₊` and `p_{i,i+1} = (u_{i,i+1} − α)/u₊₊`.
pub fn cycle_critical_points(k: usize, u: &CountTable) -> Result<Vec<CriticalPoint>> {
    let s = check_cycle(k, u)?;
    let poly = cycle_ml_polynomial(k, u)?;
    let total = to_f64(&u.total());
    let points = poly
        .real_roots()
        .into_iter()
        .map(|alpha| {
            let table = s
                .cells()
                .iter()
                .zip(u.values())
                .map(|(c, v)| {
                    let shift = if c.row == c.col { alpha } else { -alpha };
                    (to_f64(v) + shift) / total
                })
                .collect();
            CriticalPoint {
                params: vec![alpha],
                table,
            }
        })
        .collect();
    Ok(points)
}

/// Coefficients of the two bilinear critical equations on the double square
/// `{11, 12, 21, 22, 23, 32, 33}`:
///
/// ```text
/// αβ + c₁α + c₂β + c₃ = 0
/// αβ + d₁α + d₂β + d₃ = 0
/// ```
///
/// obtained from the 2×2 minors of the table
///
/// ```text
/// u11 + α   u12 − α       0
/// u21 − α   u22 + α + β   u23 − β
/// 0         u32 − β       u33 + β
/// ```
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DoubleSquareSystem {
    pub c: [Rational; 3],
    pub d: [Rational; 3],
}

pub fn double_square_system(u: &CountTable) -> Result<DoubleSquareSystem> {
    if u.pattern() != &Pattern::double_square() {
        return Err(Error::WrongPattern(
            "counts are not on the double square {11, 12, 21, 22, 23, 32, 33}".into(),
        ));
    }
    let at = |i: usize, j: usize| u.get(i, j).expect("double square cell").clone();
    let (u11, u12, u21, u22) = (at(1, 1), at(1, 2), at(2, 1), at(2, 2));
    let (u23, u32, u33) = (at(2, 3), at(3, 2), at(3, 3));
    let c = [
        &u11 + &u12 + &u21 + &u22,
        u11.clone(),
        &u11 * &u22 - &u12 * &u21,
    ];
    let d = [
        u33.clone(),
        &u22 + &u33 + &u23 + &u32,
        &u22 * &u33 - &u23 * &u32,
    ];
    Ok(DoubleSquareSystem { c, d })
}

/// The quadratic in β left after substituting `α = −(c₂β + c₃)/(β + c₁)`
/// into the second equation and multiplying through by `β + c₁`:
///
/// ```text
/// −(c₂β + c₃)(β + d₁) + (d₂β + d₃)(β + c₁)
/// ```
///
/// Fails when `c₃ = c₁c₂`, where the first equation factors as
/// `(α + c₂)(β + c₁) = 0` and the substitution loses solutions.
pub fn double_square_critical_poly(u: &CountTable) -> Result<Polynomial> {
    let DoubleSquareSystem { c, d } = double_square_system(u)?;
    if c[2] == &c[0] * &c[1] {
        return Err(Error::DegenerateElimination(
            "the first equation factors as (α + c₂)(β + c₁) = 0".into(),
        ));
    }
    let numerator = Polynomial::new(vec![c[2].clone(), c[1].clone()]);
    let second = Polynomial::new(vec![d[2].clone(), d[1].clone()]);
    let poly = numerator
        .mul(&Polynomial::linear(d[0].clone()))
        .neg()
        .add(&second.mul(&Polynomial::linear(c[0].clone())));
    if poly.is_zero() {
        return Err(Error::DegenerateElimination("the eliminated polynomial vanishes".into()));
    }
    Ok(poly)
}

/// Back-substitutes every real root β (with `β ≠ −c₁`) into α and the
/// table, normalized by `u₊₊`.
pub fn double_square_critical_points(u: &CountTable) -> Result<Vec<CriticalPoint>> {
    let DoubleSquareSystem { c, .. } = double_square_system(u)?;
    let poly = double_square_critical_poly(u)?;
    let (c1, c2, c3) = (to_f64(&c[0]), to_f64(&c[1]), to_f64(&c[2]));
    let v: Vec<f64> = u.values().iter().map(to_f64).collect();
    let total: f64 = v.iter().sum();
    let points = poly
        .real_roots()
        .into_iter()
        .filter(|beta| beta + c1 != 0.0)
        .map(|beta| {
            let alpha = -(c2 * beta + c3) / (beta + c1);
            // support order: 11, 12, 21, 22, 23, 32, 33
            let counts = [
                v[0] + alpha,
                v[1] - alpha,
                v[2] - alpha,
                v[3] + alpha + beta,
                v[4] - beta,
                v[5] - beta,
                v[6] + beta,
            ];
            CriticalPoint {
                params: vec![alpha, beta],
                table: counts.iter().map(|x| x / total).collect(),
            }
        })
        .collect();
    Ok(points)
}
