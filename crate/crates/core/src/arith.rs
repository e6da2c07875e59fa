//! Exact rational scalars, vectors and matrices.
//!
//! Everything downstream (probabilities, composition weights, effect
//! coordinates, LP tableaux) is carried in [`Rational`], an arbitrary
//! precision fraction kept in lowest terms with a positive denominator.

use std::fmt;
use std::ops::{Deref, Index};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Arbitrary-precision rational, normalized after every operation.
pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid rational literal {0:?}")]
    InvalidRational(String),
}

pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `"p"` or `"p/q"` (optionally signed numerator, `q > 0`).
pub fn parse_rational(text: &str) -> Result<Rational, ArithError> {
    let err = || ArithError::InvalidRational(text.to_string());
    let t = text.trim();
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (t, None),
    };
    let is_int = |s: &str, signed: bool| {
        let digits = if signed { s.strip_prefix('-').unwrap_or(s) } else { s };
        !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
    };
    if !is_int(num, true) {
        return Err(err());
    }
    let numer = BigInt::from_str(num).map_err(|_| err())?;
    let denom = match den {
        Some(d) if is_int(d, false) => BigInt::from_str(d).map_err(|_| err())?,
        Some(_) => return Err(err()),
        None => BigInt::one(),
    };
    if denom.is_zero() {
        return Err(err());
    }
    Ok(Rational::new(numer, denom))
}

/// Canonical text form: `"p"` for integers, `"p/q"` otherwise.
pub fn format_rational(r: &Rational) -> String {
    r.to_string()
}

/// Parses a comma separated list such as `"1/2,1/2,0"`.
pub fn parse_rational_list(text: &str) -> Result<RVector, ArithError> {
    text.split(',')
        .map(parse_rational)
        .collect::<Result<Vec<_>, _>>()
        .map(RVector::new)
}

/// Dense vector of rationals.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct RVector(Vec<Rational>);

impl RVector {
    pub fn new(entries: Vec<Rational>) -> Self {
        RVector(entries)
    }

    pub fn zeros(n: usize) -> Self {
        RVector(vec![Rational::zero(); n])
    }

    pub fn ones(n: usize) -> Self {
        RVector(vec![Rational::one(); n])
    }

    /// Standard basis vector with a one at 0-based position `index`.
    pub fn unit(n: usize, index: usize) -> Self {
        let mut v = Self::zeros(n);
        v.0[index] = Rational::one();
        v
    }

    pub fn from_ints(values: &[i64]) -> Self {
        values.iter().map(|&v| int(v)).collect()
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[Rational] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<Rational> {
        self.0
    }

    pub fn check_dim(&self, expected: usize) -> Result<(), ArithError> {
        if self.dim() == expected {
            Ok(())
        } else {
            Err(ArithError::DimensionMismatch { expected, found: self.dim() })
        }
    }

    /// Inner product; panics on length mismatch.
    pub fn dot(&self, other: &RVector) -> Rational {
        assert_eq!(self.dim(), other.dim(), "dot of vectors with different lengths");
        self.0
            .iter()
            .zip(&other.0)
            .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
    }

    pub fn sum(&self) -> Rational {
        self.0.iter().fold(Rational::zero(), |acc, x| acc + x)
    }

    pub fn scale(&self, factor: &Rational) -> RVector {
        self.0.iter().map(|x| x * factor).collect()
    }

    pub fn add(&self, other: &RVector) -> RVector {
        assert_eq!(self.dim(), other.dim());
        self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect()
    }

    pub fn sub(&self, other: &RVector) -> RVector {
        assert_eq!(self.dim(), other.dim());
        self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.0.iter().all(|x| !x.is_negative())
    }

    /// 0-based indices of nonzero entries.
    pub fn support(&self) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, x)| !x.is_zero())
            .map(|(i, _)| i)
            .collect()
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.0.iter().map(format_rational).collect()
    }
}

impl Deref for RVector {
    type Target = [Rational];
    fn deref(&self) -> &[Rational] {
        &self.0
    }
}

impl Index<usize> for RVector {
    type Output = Rational;
    fn index(&self, i: usize) -> &Rational {
        &self.0[i]
    }
}

impl FromIterator<Rational> for RVector {
    fn from_iter<I: IntoIterator<Item = Rational>>(iter: I) -> Self {
        RVector(iter.into_iter().collect())
    }
}

impl From<Vec<Rational>> for RVector {
    fn from(v: Vec<Rational>) -> Self {
        RVector(v)
    }
}

impl fmt::Display for RVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.to_strings().join(", "))
    }
}

/// Dense row-major rational matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RMatrix {
    rows: Vec<RVector>,
    ncols: usize,
}

/// Outcome of an exact linear solve `M x = b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LinearSolution {
    Unique(RVector),
    /// Consistent with a solution space of dimension `nullity > 0`.
    Underdetermined { particular: RVector, nullity: usize },
    Inconsistent,
}

impl RMatrix {
    pub fn new(rows: Vec<RVector>, ncols: usize) -> Result<Self, ArithError> {
        for r in &rows {
            r.check_dim(ncols)?;
        }
        Ok(RMatrix { rows, ncols })
    }

    pub fn from_rows(rows: Vec<RVector>) -> Result<Self, ArithError> {
        let ncols = rows.first().map_or(0, RVector::dim);
        Self::new(rows, ncols)
    }

    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        RMatrix { rows: vec![RVector::zeros(ncols); nrows], ncols }
    }

    pub fn identity(n: usize) -> Self {
        RMatrix { rows: (0..n).map(|i| RVector::unit(n, i)).collect(), ncols: n }
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rows(&self) -> &[RVector] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &RVector {
        &self.rows[i]
    }

    pub fn mul_vec(&self, x: &RVector) -> Result<RVector, ArithError> {
        x.check_dim(self.ncols)?;
        Ok(self.rows.iter().map(|r| r.dot(x)).collect())
    }

    /// Exact rank via fraction-free (Bareiss) elimination on an integer
    /// copy of the matrix.
    pub fn rank(&self) -> usize {
        let mut a: Vec<Vec<BigInt>> = self.rows.iter().map(integer_row).collect();
        let m = a.len();
        let n = self.ncols;
        let mut prev = BigInt::one();
        let mut r = 0;
        for c in 0..n {
            if r == m {
                break;
            }
            let Some(p) = (r..m).find(|&i| !a[i][c].is_zero()) else {
                continue;
            };
            a.swap(r, p);
            for i in r + 1..m {
                for j in c + 1..n {
                    let num = &a[r][c] * &a[i][j] - &a[i][c] * &a[r][j];
                    debug_assert!(num.is_multiple_of(&prev));
                    a[i][j] = num / &prev;
                }
                a[i][c] = BigInt::zero();
            }
            prev = a[r][c].clone();
            r += 1;
        }
        r
    }

    /// Solves `self · x = b` exactly by Gauss-Jordan elimination.
    pub fn solve(&self, b: &RVector) -> Result<LinearSolution, ArithError> {
        b.check_dim(self.nrows())?;
        let n = self.ncols;
        let mut aug: Vec<Vec<Rational>> = self
            .rows
            .iter()
            .zip(b.iter())
            .map(|(row, rhs)| row.iter().cloned().chain(std::iter::once(rhs.clone())).collect())
            .collect();
        let m = aug.len();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..n {
            if r == m {
                break;
            }
            let Some(p) = (r..m).find(|&i| !aug[i][c].is_zero()) else {
                continue;
            };
            aug.swap(r, p);
            let inv = aug[r][c].recip();
            for x in aug[r].iter_mut() {
                *x *= &inv;
            }
            let pivot_row = aug[r].clone();
            for (i, row) in aug.iter_mut().enumerate() {
                if i != r && !row[c].is_zero() {
                    let f = row[c].clone();
                    for (x, p) in row[c..=n].iter_mut().zip(&pivot_row[c..=n]) {
                        *x -= &f * p;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        if aug[r..].iter().any(|row| !row[n].is_zero()) {
            return Ok(LinearSolution::Inconsistent);
        }
        let mut x = RVector::zeros(n);
        for (row, &c) in pivots.iter().enumerate() {
            x.0[c] = aug[row][n].clone();
        }
        let nullity = n - pivots.len();
        Ok(if nullity == 0 {
            LinearSolution::Unique(x)
        } else {
            LinearSolution::Underdetermined { particular: x, nullity }
        })
    }
}

fn integer_row(row: &RVector) -> Vec<BigInt> {
    let lcm = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    row.iter().map(|x| x.numer() * (&lcm / x.denom())).collect()
}
