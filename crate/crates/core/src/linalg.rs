//! Exact integer and rational linear algebra.
//!
//! Everything here is arbitrary precision. Matrices are small (a few dozen
//! rows at most), so the algorithms favour clarity over asymptotics.

use std::fmt;
use std::ops::{Add, Index, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not unimodular (determinant {det})")]
    NotUnimodular { det: BigInt },
    #[error("cone generators are linearly dependent")]
    DependentGenerators,
}

/// Integer vector with arbitrary-precision entries.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct IntVec(Vec<BigInt>);

impl IntVec {
    pub fn new(entries: Vec<BigInt>) -> Self {
        IntVec(entries)
    }

    pub fn from_i64s(entries: &[i64]) -> Self {
        IntVec(entries.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn zeros(len: usize) -> Self {
        IntVec(vec![BigInt::zero(); len])
    }

    /// Standard basis vector `e_index` (0-based) of length `len`.
    pub fn unit(len: usize, index: usize) -> Self {
        let mut v = Self::zeros(len);
        v.0[index] = BigInt::one();
        v
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, BigInt> {
        self.0.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn dot(&self, other: &IntVec) -> BigInt {
        assert_eq!(self.len(), other.len(), "dot product of unequal lengths");
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn dot_rat(&self, other: &RatVec) -> BigRational {
        assert_eq!(self.len(), other.len(), "dot product of unequal lengths");
        self.0
            .iter()
            .zip(other.entries())
            .fold(BigRational::zero(), |acc, (a, b)| {
                acc + b * BigRational::from_integer(a.clone())
            })
    }

    pub fn scale(&self, k: &BigInt) -> IntVec {
        IntVec(self.0.iter().map(|x| x * k).collect())
    }

    /// gcd of the entries; zero for the zero vector.
    pub fn content(&self) -> BigInt {
        self.0.iter().fold(BigInt::zero(), |g, x| g.gcd(x))
    }

    pub fn is_primitive(&self) -> bool {
        self.content().is_one()
    }

    /// Divides out the content. The zero vector is returned unchanged.
    pub fn primitive(&self) -> IntVec {
        let g = self.content();
        if g.is_zero() {
            return self.clone();
        }
        IntVec(self.0.iter().map(|x| x / &g).collect())
    }

    pub fn to_rat(&self) -> RatVec {
        RatVec(
            self.0
                .iter()
                .map(|x| BigRational::from_integer(x.clone()))
                .collect(),
        )
    }

    /// `self` followed by `other`.
    pub fn concat(&self, other: &IntVec) -> IntVec {
        IntVec(self.0.iter().chain(&other.0).cloned().collect())
    }

    pub fn to_i64s(&self) -> Option<Vec<i64>> {
        use num_traits::ToPrimitive;
        self.0.iter().map(ToPrimitive::to_i64).collect()
    }
}

impl Index<usize> for IntVec {
    type Output = BigInt;
    fn index(&self, i: usize) -> &BigInt {
        &self.0[i]
    }
}

impl<'a> Add for &'a IntVec {
    type Output = IntVec;
    fn add(self, rhs: &'a IntVec) -> IntVec {
        assert_eq!(self.len(), rhs.len());
        IntVec(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl<'a> Sub for &'a IntVec {
    type Output = IntVec;
    fn sub(self, rhs: &'a IntVec) -> IntVec {
        assert_eq!(self.len(), rhs.len());
        IntVec(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &IntVec {
    type Output = IntVec;
    fn neg(self) -> IntVec {
        IntVec(self.0.iter().map(|a| -a).collect())
    }
}

impl FromIterator<BigInt> for IntVec {
    fn from_iter<T: IntoIterator<Item = BigInt>>(iter: T) -> Self {
        IntVec(iter.into_iter().collect())
    }
}

impl fmt::Display for IntVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, x) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

/// Vector of exact rationals. `BigRational` keeps every entry in lowest
/// terms with a positive denominator.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct RatVec(Vec<BigRational>);

impl RatVec {
    pub fn new(entries: Vec<BigRational>) -> Self {
        RatVec(entries)
    }

    pub fn from_i64s(entries: &[i64]) -> Self {
        IntVec::from_i64s(entries).to_rat()
    }

    pub fn zeros(len: usize) -> Self {
        RatVec(vec![BigRational::zero(); len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entries(&self) -> &[BigRational] {
        &self.0
    }

    pub fn into_entries(self) -> Vec<BigRational> {
        self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, BigRational> {
        self.0.iter()
    }

    /// Smallest positive integer multiple that is an integer vector, made primitive.
    pub fn primitive_integer(&self) -> IntVec {
        let lcm = self
            .0
            .iter()
            .fold(BigInt::one(), |l, x| l.lcm(x.denom()));
        let scaled: IntVec = self
            .0
            .iter()
            .map(|x| (x * BigRational::from_integer(lcm.clone())).to_integer())
            .collect();
        scaled.primitive()
    }
}

impl Index<usize> for RatVec {
    type Output = BigRational;
    fn index(&self, i: usize) -> &BigRational {
        &self.0[i]
    }
}

impl FromIterator<BigRational> for RatVec {
    fn from_iter<T: IntoIterator<Item = BigRational>>(iter: T) -> Self {
        RatVec(iter.into_iter().collect())
    }
}

/// Renders a rational as `num/den` in lowest terms (denominator always shown).
pub fn rat_string(x: &BigRational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Dense row-major integer matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<BigInt>) -> Result<Self, LinalgError> {
        if rows * cols != data.len() {
            return Err(LinalgError::DimensionMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        Ok(IntMatrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    /// Builds a matrix from small integer rows. Panics on ragged input.
    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        let data = rows.iter().flatten().map(|&x| BigInt::from(x)).collect();
        IntMatrix {
            rows: r,
            cols: c,
            data,
        }
    }

    pub fn from_int_rows(rows: &[IntVec]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, IntVec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        let data = rows.iter().flat_map(|v| v.iter().cloned()).collect();
        IntMatrix {
            rows: r,
            cols: c,
            data,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: BigInt) {
        self.data[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> IntVec {
        IntVec(self.data[i * self.cols..(i + 1) * self.cols].to_vec())
    }

    pub fn col(&self, j: usize) -> IntVec {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn row_vectors(&self) -> Vec<IntVec> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let x = self.get(i, j);
                    if i == j {
                        x.is_one()
                    } else {
                        x.is_zero()
                    }
                })
            })
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = IntMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mat_mul(&self, other: &IntMatrix) -> Result<IntMatrix, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::DimensionMismatch {
                expected: self.cols,
                found: other.rows,
            });
        }
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Row vector times matrix: `v · self`.
    pub fn left_mul(&self, v: &IntVec) -> Result<IntVec, LinalgError> {
        if v.len() != self.rows {
            return Err(LinalgError::DimensionMismatch {
                expected: self.rows,
                found: v.len(),
            });
        }
        Ok((0..self.cols)
            .map(|j| (0..self.rows).map(|i| &v[i] * self.get(i, j)).sum())
            .collect())
    }

    /// Matrix times column vector.
    pub fn apply(&self, v: &IntVec) -> Result<IntVec, LinalgError> {
        if v.len() != self.cols {
            return Err(LinalgError::DimensionMismatch {
                expected: self.cols,
                found: v.len(),
            });
        }
        Ok((0..self.rows).map(|i| self.row(i).dot(v)).collect())
    }

    /// Fraction-free Gauss-Jordan elimination on `[A | I]`.
    ///
    /// Returns `(det, adj)` with `adj = det · A⁻¹` (so `adj` is the adjugate).
    /// Every intermediate entry is a minor of the augmented matrix, so the
    /// Bareiss divisions are exact.
    fn bareiss_gauss_jordan(&self) -> Result<(BigInt, IntMatrix), LinalgError> {
        if self.rows != self.cols {
            return Err(LinalgError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let n = self.rows;
        let mut m: Vec<Vec<BigInt>> = (0..n)
            .map(|i| {
                let mut row = self.row(i).0;
                row.extend((0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }));
                row
            })
            .collect();
        let mut prev = BigInt::one();
        let mut sign = BigInt::one();
        for k in 0..n {
            let Some(p) = (k..n).find(|&r| !m[r][k].is_zero()) else {
                return Ok((BigInt::zero(), IntMatrix::zeros(n, n)));
            };
            if p != k {
                m.swap(p, k);
                sign = -sign;
            }
            let pivot_row = m[k].clone();
            let pivot = pivot_row[k].clone();
            for (i, row) in m.iter_mut().enumerate() {
                if i == k {
                    continue;
                }
                let factor = row[k].clone();
                for (x, p) in row.iter_mut().zip(&pivot_row) {
                    *x = (&pivot * &*x - &factor * p).div_floor(&prev);
                }
            }
            prev = pivot;
        }
        // Left block is now prev·I where prev = det(P A) = sign · det(A).
        let det = &prev * &sign;
        let mut adj = IntMatrix::zeros(n, n);
        for (i, row) in m.iter().enumerate() {
            for j in 0..n {
                // right block = prev · A⁻¹; adjugate = det · A⁻¹
                adj.set(i, j, &row[n + j] * &sign);
            }
        }
        Ok((det, adj))
    }

    pub fn determinant(&self) -> Result<BigInt, LinalgError> {
        self.bareiss_gauss_jordan().map(|(d, _)| d)
    }

    /// Inverse over the integers; fails unless `det = ±1`.
    pub fn int_inverse(&self) -> Result<IntMatrix, LinalgError> {
        let (det, adj) = self.bareiss_gauss_jordan()?;
        if !(det.is_one() || (-&det).is_one()) {
            return Err(LinalgError::NotUnimodular { det });
        }
        let data = adj.data.into_iter().map(|x| x * &det).collect();
        Ok(IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            writeln!(f, "{}", self.row(i))?;
        }
        Ok(())
    }
}

/// Reduced row echelon form over ℚ, in place. Returns the pivot columns.
pub fn rref(rows: &mut [Vec<BigRational>]) -> Vec<usize> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        let Some(p) = (r..nrows).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(p, r);
        let inv = rows[r][c].recip();
        for x in rows[r].iter_mut() {
            *x = &*x * &inv;
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let factor = row[c].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *x = &*x - &factor * p;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Exact rank of a rational matrix given by rows.
pub fn rank(rows: &[Vec<BigRational>]) -> usize {
    let mut work = rows.to_vec();
    rref(&mut work).len()
}

/// Exact rank of a list of integer vectors.
pub fn int_rank(vectors: &[IntVec]) -> usize {
    let rows: Vec<Vec<BigRational>> = vectors.iter().map(|v| v.to_rat().0).collect();
    rank(&rows)
}

/// Outcome of a simplicial cone-membership query.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConeMembership {
    /// Nonnegative coefficients `λ` with `Σ λ_i g_i = target`.
    Inside(RatVec),
    NotInCone,
}

impl ConeMembership {
    pub fn is_inside(&self) -> bool {
        matches!(self, ConeMembership::Inside(_))
    }

    pub fn coefficients(&self) -> Option<&RatVec> {
        match self {
            ConeMembership::Inside(c) => Some(c),
            ConeMembership::NotInCone => None,
        }
    }
}

/// Coordinates of `target` in the span of linearly independent `generators`,
/// or `None` when the target lies outside the span.
pub fn solve_linear(generators: &[IntVec], target: &RatVec) -> Result<Option<RatVec>, LinalgError> {
    let n = target.len();
    if let Some(g) = generators.iter().find(|g| g.len() != n) {
        return Err(LinalgError::DimensionMismatch {
            expected: n,
            found: g.len(),
        });
    }
    let k = generators.len();
    // n equations in k unknowns, augmented with the target column
    let mut rows: Vec<Vec<BigRational>> = (0..n)
        .map(|r| {
            let mut row: Vec<BigRational> = generators
                .iter()
                .map(|g| BigRational::from_integer(g[r].clone()))
                .collect();
            row.push(target[r].clone());
            row
        })
        .collect();
    let pivots = rref(&mut rows);
    let coeff_pivots = pivots.iter().filter(|&&c| c < k).count();
    if coeff_pivots < k {
        return Err(LinalgError::DependentGenerators);
    }
    if pivots.contains(&k) {
        // inconsistent: target outside the linear span
        return Ok(None);
    }
    Ok(Some((0..k).map(|c| rows[c][k].clone()).collect()))
}

/// Solves `Σ λ_i g_i = target` for linearly independent generators and
/// reports whether the unique solution is nonnegative.
pub fn solve_simplicial_membership(
    generators: &[IntVec],
    target: &RatVec,
) -> Result<ConeMembership, LinalgError> {
    match solve_linear(generators, target)? {
        Some(lambda) if !lambda.iter().any(Signed::is_negative) => {
            Ok(ConeMembership::Inside(lambda))
        }
        _ => Ok(ConeMembership::NotInCone),
    }
}
