//! Small exact integer matrices: products, characteristic polynomials, rank over
//! the rationals and over GF(2), and eventual rank.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::poly::PolynomialQ;

/// Square or rectangular matrix of arbitrary-precision integers, row major.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IntMatrix {
    rows: Vec<Vec<BigInt>>,
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, r) in self.rows.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            let cells: Vec<String> = r.iter().map(|c| c.to_string()).collect();
            write!(f, "[{}]", cells.join(","))?;
        }
        write!(f, "]")
    }
}

/// Field used for rank computations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RankField {
    Rationals,
    Gf2,
}

impl IntMatrix {
    pub fn from_rows(rows: Vec<Vec<BigInt>>) -> Self {
        let width = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == width), "ragged matrix");
        IntMatrix { rows }
    }

    pub fn from_i64(rows: &[Vec<i64>]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&c| BigInt::from(c)).collect())
                .collect(),
        )
    }

    pub fn zeros(n: usize, m: usize) -> Self {
        IntMatrix {
            rows: vec![vec![BigInt::zero(); m]; n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut out = Self::zeros(n, n);
        for i in 0..n {
            out.rows[i][i] = BigInt::one();
        }
        out
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }

    pub fn is_square(&self) -> bool {
        self.nrows() == self.ncols()
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.rows[i][j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.rows[i][j] = v;
    }

    pub fn rows(&self) -> &[Vec<BigInt>] {
        &self.rows
    }

    /// Rows as `i64`; panics if an entry does not fit.
    pub fn to_i64_rows(&self) -> Vec<Vec<i64>> {
        self.rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|c| i64::try_from(c).expect("matrix entry exceeds i64"))
                    .collect()
            })
            .collect()
    }

    pub fn transpose(&self) -> Self {
        let (n, m) = (self.nrows(), self.ncols());
        let mut out = Self::zeros(m, n);
        for i in 0..n {
            for j in 0..m {
                out.rows[j][i] = self.rows[i][j].clone();
            }
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.ncols(), other.nrows(), "dimension mismatch");
        let (n, k, m) = (self.nrows(), self.ncols(), other.ncols());
        let mut out = Self::zeros(n, m);
        for i in 0..n {
            for t in 0..k {
                let a = &self.rows[i][t];
                if a.is_zero() {
                    continue;
                }
                for j in 0..m {
                    out.rows[i][j] += a * &other.rows[t][j];
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (ro, rb) in out.rows.iter_mut().zip(&other.rows) {
            for (a, b) in ro.iter_mut().zip(rb) {
                *a += b;
            }
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (ro, rb) in out.rows.iter_mut().zip(&other.rows) {
            for (a, b) in ro.iter_mut().zip(rb) {
                *a -= b;
            }
        }
        out
    }

    pub fn neg(&self) -> Self {
        Self::zeros(self.nrows(), self.ncols()).sub(self)
    }

    pub fn pow(&self, mut e: usize) -> Self {
        assert!(self.is_square());
        let mut base = self.clone();
        let mut acc = Self::identity(self.nrows());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// `P^T M P` style relabeling: entry `(i, j)` of the result is entry
    /// `(perm[i], perm[j])` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let n = perm.len();
        let mut out = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                out.rows[i][j] = self.rows[perm[i]][perm[j]].clone();
            }
        }
        out
    }

    /// Sub-block with the given row and column ranges.
    pub fn block(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> Self {
        IntMatrix {
            rows: self.rows[rows]
                .iter()
                .map(|r| r[cols.clone()].to_vec())
                .collect(),
        }
    }

    /// Assemble `[[a, b], [c, d]]`.
    pub fn from_blocks(a: &Self, b: &Self, c: &Self, d: &Self) -> Self {
        let mut rows = Vec::with_capacity(a.nrows() + c.nrows());
        for (ra, rb) in a.rows.iter().zip(&b.rows) {
            rows.push(ra.iter().chain(rb).cloned().collect());
        }
        for (rc, rd) in c.rows.iter().zip(&d.rows) {
            rows.push(rc.iter().chain(rd).cloned().collect());
        }
        IntMatrix { rows }
    }

    /// Strictly positive entrywise.
    pub fn is_positive(&self) -> bool {
        self.rows.iter().flatten().all(|c| c.is_positive())
    }

    pub fn rank(&self, field: RankField) -> usize {
        match field {
            RankField::Rationals => rank_rational(self),
            RankField::Gf2 => rank_gf2(self),
        }
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> BigInt {
        assert!(self.is_square());
        let n = self.nrows();
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.rows.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                    Some(i) => {
                        a.swap(i, k);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                    a[i][j] = v;
                }
                a[i][k] = BigInt::zero();
            }
            prev = a[k][k].clone();
        }
        sign * &a[n - 1][n - 1]
    }

    /// Characteristic polynomial `det(xI - M)` (Faddeev-LeVerrier).
    pub fn charpoly(&self) -> PolynomialQ {
        assert!(self.is_square());
        let n = self.nrows();
        let m: Vec<Vec<BigRational>> = self
            .rows
            .iter()
            .map(|r| r.iter().cloned().map(BigRational::from_integer).collect())
            .collect();
        let mut coeffs = vec![BigRational::zero(); n + 1];
        coeffs[n] = BigRational::one();
        // running matrix M_k with M_0 = 0, c_n = 1
        let mut mk = vec![vec![BigRational::zero(); n]; n];
        for k in 1..=n {
            // M_k = M * M_{k-1} + c_{n-k+1} I
            let mut next = vec![vec![BigRational::zero(); n]; n];
            for i in 0..n {
                for t in 0..n {
                    if m[i][t].is_zero() {
                        continue;
                    }
                    for j in 0..n {
                        next[i][j] += &m[i][t] * &mk[t][j];
                    }
                }
                next[i][i] += &coeffs[n - k + 1];
            }
            mk = next;
            // c_{n-k} = -tr(M M_k) / k
            let mut tr = BigRational::zero();
            for i in 0..n {
                for t in 0..n {
                    tr += &m[i][t] * &mk[t][i];
                }
            }
            coeffs[n - k] = -tr / BigRational::from_integer(BigInt::from(k as i64));
        }
        PolynomialQ::new(coeffs)
    }
}

fn rank_rational(m: &IntMatrix) -> usize {
    let mut a = m.rows.clone();
    let (n, w) = (m.nrows(), m.ncols());
    let mut rank = 0;
    for col in 0..w {
        let Some(piv) = (rank..n).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        a.swap(piv, rank);
        for i in rank + 1..n {
            if a[i][col].is_zero() {
                continue;
            }
            let f = a[i][col].clone();
            let p = a[rank][col].clone();
            for j in col..w {
                let v = &a[i][j] * &p - &a[rank][j] * &f;
                a[i][j] = v;
            }
            // keep entries small
            let g = a[i]
                .iter()
                .fold(BigInt::zero(), |g, c| num_integer::Integer::gcd(&g, c));
            if !g.is_zero() && !g.is_one() {
                for c in a[i].iter_mut() {
                    *c /= &g;
                }
            }
        }
        rank += 1;
        if rank == n {
            break;
        }
    }
    rank
}

fn rank_gf2(m: &IntMatrix) -> usize {
    let two = BigInt::from(2);
    let mut a: Vec<Vec<bool>> = m
        .rows
        .iter()
        .map(|r| r.iter().map(|c| !(c % &two).is_zero()).collect())
        .collect();
    let (n, w) = (m.nrows(), m.ncols());
    let mut rank = 0;
    for col in 0..w {
        let Some(piv) = (rank..n).find(|&i| a[i][col]) else {
            continue;
        };
        a.swap(piv, rank);
        for i in 0..n {
            if i != rank && a[i][col] {
                for j in col..w {
                    let v = a[rank][j];
                    a[i][j] ^= v;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Rank of `M^m` for an `m x m` matrix, over the requested field.
pub fn eventual_rank(m: &IntMatrix, field: RankField) -> usize {
    assert!(m.is_square(), "eventual rank needs a square matrix");
    let n = m.nrows();
    if n == 0 {
        return 0;
    }
    match field {
        RankField::Rationals => m.pow(n).rank(field),
        RankField::Gf2 => reduce_mod2(m).pow_mod2(n).rank(field),
    }
}

fn reduce_mod2(m: &IntMatrix) -> IntMatrix {
    let two = BigInt::from(2);
    IntMatrix {
        rows: m
            .rows
            .iter()
            .map(|r| r.iter().map(|c| num_integer::Integer::mod_floor(c, &two)).collect())
            .collect(),
    }
}

impl IntMatrix {
    fn pow_mod2(&self, mut e: usize) -> IntMatrix {
        let mut base = self.clone();
        let mut acc = Self::identity(self.nrows());
        while e > 0 {
            if e & 1 == 1 {
                acc = reduce_mod2(&acc.mul(&base));
            }
            e >>= 1;
            if e > 0 {
                base = reduce_mod2(&base.mul(&base));
            }
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thue_morse_eventual_rank() {
        let m = IntMatrix::from_i64(&[vec![1, 1], vec![1, 1]]);
        assert_eq!(eventual_rank(&m, RankField::Rationals), 1);
    }

    #[test]
    fn identity_eventual_rank() {
        for n in 1..5 {
            assert_eq!(eventual_rank(&IntMatrix::identity(n), RankField::Rationals), n);
            assert_eq!(eventual_rank(&IntMatrix::identity(n), RankField::Gf2), n);
        }
    }

    #[test]
    fn period_doubling_over_gf2() {
        let m = IntMatrix::from_i64(&[vec![1, 2], vec![1, 0]]);
        assert_eq!(eventual_rank(&m, RankField::Gf2), 1);
        assert_eq!(eventual_rank(&m, RankField::Rationals), 2);
    }

    #[test]
    fn charpoly_of_fibonacci() {
        let m = IntMatrix::from_i64(&[vec![1, 1], vec![1, 0]]);
        assert_eq!(m.charpoly(), PolynomialQ::from_ints(&[-1, -1, 1]));
        assert_eq!(m.determinant(), BigInt::from(-1));
    }

    #[test]
    fn determinant_matches_charpoly_constant() {
        let m = IntMatrix::from_i64(&[vec![2, 1, 0], vec![1, 3, 1], vec![0, 4, 1]]);
        let cp = m.charpoly();
        // det(xI - M) at 0 is (-1)^n det M
        assert_eq!(cp.coeff(0), BigRational::from_integer(-m.determinant()));
    }
}
