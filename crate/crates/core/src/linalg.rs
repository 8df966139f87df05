//! Exact linear algebra over the integers and rationals.
//!
//! Ranks are computed by fraction-free (Bareiss) elimination in `i128`,
//! falling back to arbitrary precision when an intermediate overflows.
//! Nothing in this crate touches floating point.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Dense row-major integer matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged matrix");
            data.extend_from_slice(row);
        }
        Self { rows: r, cols: c, data }
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(n: usize, cols: &[Vec<i64>]) -> Self {
        let mut m = Self::zeros(n, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), n);
            for (i, &v) in c.iter().enumerate() {
                m.set(i, j, v);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: i64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn column(&self, j: usize) -> Vec<i64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    /// The leading `k` columns.
    pub fn leading_columns(&self, k: usize) -> IntMatrix {
        let mut m = IntMatrix::zeros(self.rows, k);
        for i in 0..self.rows {
            for j in 0..k {
                m.set(i, j, self.get(i, j));
            }
        }
        m
    }

    pub fn select_rows(&self, idx: &[usize]) -> IntMatrix {
        let mut m = IntMatrix::zeros(idx.len(), self.cols);
        for (a, &i) in idx.iter().enumerate() {
            for j in 0..self.cols {
                m.set(a, j, self.get(i, j));
            }
        }
        m
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut m = IntMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(j, i, self.get(i, j));
            }
        }
        m
    }

    pub fn hstack(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.rows, other.rows);
        let mut m = IntMatrix::zeros(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(i, j, self.get(i, j));
            }
            for j in 0..other.cols {
                m.set(i, self.cols + j, other.get(i, j));
            }
        }
        m
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows);
        let mut m = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let v = m.get(i, j) + a * other.get(k, j);
                    m.set(i, j, v);
                }
            }
        }
        m
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    pub fn rank(&self) -> usize {
        rank_of_rows(self.rows, self.cols, &self.data)
    }

    /// Integer basis (as rows) of `{ c : c · self = 0 }`.
    pub fn left_nullspace(&self) -> IntMatrix {
        let t = self.transpose();
        let basis = rational_nullspace(&t.to_rational_rows());
        let n = self.rows;
        let rows: Vec<Vec<i64>> = basis.iter().map(|v| clear_denominators(v)).collect();
        if rows.is_empty() {
            IntMatrix::zeros(0, n)
        } else {
            IntMatrix::from_rows(&rows)
        }
    }

    pub fn to_rational_rows(&self) -> Vec<Vec<BigRational>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|&v| BigRational::from_integer(BigInt::from(v))).collect())
            .collect()
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        write!(f, "]")
    }
}

/// Rank of a row-major integer array.
pub fn rank_of_rows(rows: usize, cols: usize, data: &[i64]) -> usize {
    let wide: Vec<i128> = data.iter().map(|&v| v as i128).collect();
    match bareiss_rank_i128(rows, cols, wide) {
        Some(r) => r,
        None => {
            let big: Vec<BigInt> = data.iter().map(|&v| BigInt::from(v)).collect();
            bareiss_rank_big(rows, cols, big)
        }
    }
}

fn bareiss_rank_i128(rows: usize, cols: usize, mut a: Vec<i128>) -> Option<usize> {
    let mut rank = 0;
    let mut prev: i128 = 1;
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&r| a[r * cols + c] != 0) else {
            continue;
        };
        if p != rank {
            for j in 0..cols {
                a.swap(p * cols + j, rank * cols + j);
            }
        }
        let piv = a[rank * cols + c];
        for i in rank + 1..rows {
            let lead = a[i * cols + c];
            for j in c + 1..cols {
                let lhs = a[i * cols + j].checked_mul(piv)?;
                let rhs = lead.checked_mul(a[rank * cols + j])?;
                a[i * cols + j] = lhs.checked_sub(rhs)? / prev;
            }
            a[i * cols + c] = 0;
        }
        prev = piv;
        rank += 1;
    }
    Some(rank)
}

fn bareiss_rank_big(rows: usize, cols: usize, mut a: Vec<BigInt>) -> usize {
    let mut rank = 0;
    let mut prev = BigInt::one();
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&r| !a[r * cols + c].is_zero()) else {
            continue;
        };
        if p != rank {
            for j in 0..cols {
                a.swap(p * cols + j, rank * cols + j);
            }
        }
        let piv = a[rank * cols + c].clone();
        for i in rank + 1..rows {
            let lead = a[i * cols + c].clone();
            for j in c + 1..cols {
                let v = (&a[i * cols + j] * &piv - &lead * &a[rank * cols + j]) / &prev;
                a[i * cols + j] = v;
            }
            a[i * cols + c] = BigInt::zero();
        }
        prev = piv;
        rank += 1;
    }
    rank
}

/// Reduced row echelon form in place; returns pivot columns.
pub fn rref(m: &mut [Vec<BigRational>]) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(p, r);
        let inv = m[r][c].recip();
        for v in m[r].iter_mut() {
            *v = &*v * &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..cols {
                    let sub = &f * &m[r][j];
                    m[i][j] = &m[i][j] - sub;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Basis of the right nullspace `{ v : m v = 0 }`.
pub fn rational_nullspace(m: &[Vec<BigRational>]) -> Vec<Vec<BigRational>> {
    let cols = m.first().map_or(0, Vec::len);
    let mut a = m.to_vec();
    let pivots = rref(&mut a);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![BigRational::zero(); cols];
            v[f] = BigRational::one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = -a[r][f].clone();
            }
            v
        })
        .collect()
}

/// Scales a rational vector to a primitive integer vector.
pub fn clear_denominators(v: &[BigRational]) -> Vec<i64> {
    let l = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| (x * BigRational::from_integer(l.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    let g = if g.is_zero() { BigInt::one() } else { g.abs() };
    ints.iter()
        .map(|x| (x / &g).to_i64().expect("entry does not fit in i64"))
        .collect()
}

/// Square rational matrix used for exponentials of nilpotent elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatMatrix {
    n: usize,
    data: Vec<BigRational>,
}

impl RatMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![BigRational::zero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = BigRational::one();
        }
        m
    }

    pub fn from_int(m: &IntMatrix) -> Self {
        assert_eq!(m.rows(), m.cols());
        let n = m.rows();
        let data = (0..n * n)
            .map(|k| BigRational::from_integer(BigInt::from(m.get(k / n, k % n))))
            .collect();
        Self { n, data }
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.data[i * self.n + j]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn mul(&self, o: &RatMatrix) -> RatMatrix {
        let n = self.n;
        let mut m = RatMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = &self.data[i * n + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = &o.data[k * n + j];
                    if !b.is_zero() {
                        m.data[i * n + j] = &m.data[i * n + j] + a * b;
                    }
                }
            }
        }
        m
    }

    pub fn add(&self, o: &RatMatrix) -> RatMatrix {
        let data = self.data.iter().zip(&o.data).map(|(a, b)| a + b).collect();
        RatMatrix { n: self.n, data }
    }

    pub fn scale(&self, s: &BigRational) -> RatMatrix {
        RatMatrix { n: self.n, data: self.data.iter().map(|a| a * s).collect() }
    }

    /// `exp(self)` as the finite sum `Σ x^m / m!`; panics if not nilpotent.
    pub fn exp_nilpotent(&self) -> RatMatrix {
        let mut result = RatMatrix::identity(self.n);
        let mut term = RatMatrix::identity(self.n);
        for m in 1..=self.n {
            term = term.mul(self).scale(&BigRational::new(BigInt::one(), BigInt::from(m)));
            if term.is_zero() {
                return result;
            }
            result = result.add(&term);
        }
        assert!(term.mul(self).is_zero(), "exp_nilpotent called on a non-nilpotent matrix");
        result
    }

    /// A positive rational multiple of this matrix with coprime integer entries.
    pub fn scaled_integer(&self) -> IntMatrix {
        let ints = clear_denominators(&self.data);
        IntMatrix::from_rows(&ints.chunks(self.n.max(1)).map(<[i64]>::to_vec).collect::<Vec<_>>())
    }

    /// Integer matrix with each column rescaled to clear denominators.
    /// Column spans (and hence flags of leading columns) are unchanged.
    pub fn columns_cleared(&self) -> IntMatrix {
        let n = self.n;
        let mut out = IntMatrix::zeros(n, n);
        for j in 0..n {
            let col: Vec<BigRational> = (0..n).map(|i| self.get(i, j).clone()).collect();
            let ints = clear_denominators(&col);
            for (i, v) in ints.into_iter().enumerate() {
                out.set(i, j, v);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_small_cases() {
        assert_eq!(IntMatrix::zeros(3, 3).rank(), 0);
        assert_eq!(IntMatrix::identity(4).rank(), 4);
        let m = IntMatrix::from_rows(&[vec![1, 2, 3], vec![2, 4, 6], vec![1, 0, 1]]);
        assert_eq!(m.rank(), 2);
    }

    #[test]
    fn rank_falls_back_on_overflow() {
        // Large entries overflow i128 during elimination.
        let big = 1i64 << 60;
        let m = IntMatrix::from_rows(&[
            vec![big, big - 1, 3, 7],
            vec![big - 3, big, 5, 1],
            vec![7, big - 11, big, 2],
            vec![2 * (big / 4), 3, 1, big - 5],
        ]);
        let r = m.rank();
        let big_rank = bareiss_rank_big(4, 4, m.data.iter().map(|&v| BigInt::from(v)).collect());
        assert_eq!(r, big_rank);
    }

    #[test]
    fn left_nullspace_annihilates() {
        let b = IntMatrix::from_rows(&[vec![1, 0], vec![1, 1], vec![0, 2], vec![3, 1]]);
        let c = b.left_nullspace();
        assert_eq!(c.rows(), 2);
        assert!(c.mul(&b).is_zero());
        assert_eq!(c.rank(), 2);
    }

    #[test]
    fn exp_of_square_zero_is_one_plus_x() {
        let mut x = IntMatrix::zeros(3, 3);
        x.set(2, 0, 5);
        let e = RatMatrix::from_int(&x).exp_nilpotent().columns_cleared();
        assert_eq!(e.to_rows(), vec![vec![1, 0, 0], vec![0, 1, 0], vec![5, 0, 1]]);
    }

    #[test]
    fn exp_two_step_has_half_correction() {
        let mut x = IntMatrix::zeros(3, 3);
        x.set(1, 0, 1);
        x.set(2, 1, 1);
        let e = RatMatrix::from_int(&x).exp_nilpotent();
        assert_eq!(*e.get(2, 0), BigRational::new(1.into(), 2.into()));
        let c = e.columns_cleared();
        assert_eq!(c.column(0), vec![2, 2, 1]);
    }
}
