//! Exact matrix algebra over Z and Q.
//!
//! Integer matrices carry arbitrary-precision entries in row-major order. The
//! integer routines (Smith form, row-span bases, saturated kernels) are the
//! workhorses for lattices of modular symbols and quaternion ideals; the
//! rational routines handle eigenspaces and characteristic polynomials.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

pub use crate::arith::{padic_valuation, Valuation};

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<BigInt>) -> Self {
        assert_eq!(data.len(), rows * cols, "entry count must equal rows*cols");
        IntMatrix { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend(row.iter().map(|&x| BigInt::from(x)));
        }
        IntMatrix { rows: r, cols: c, data }
    }

    pub fn from_rows(rows: Vec<Vec<BigInt>>, cols: usize) -> Self {
        let r = rows.len();
        let mut data = Vec::with_capacity(r * cols);
        for row in rows {
            assert_eq!(row.len(), cols, "ragged rows");
            data.extend(row);
        }
        IntMatrix { rows: r, cols, data }
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec<BigInt>], nrows: usize) -> Self {
        let mut m = Self::zeros(nrows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), nrows);
            for i in 0..nrows {
                m.data[i * cols.len() + j] = c[i].clone();
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

    pub fn entries(&self) -> &[BigInt] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub(crate) fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> Vec<BigInt> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn col(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<BigInt>> {
        (0..self.cols).map(|j| self.col(j)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        t
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        IntMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x * k).collect() }
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                let mut s = BigInt::zero();
                for j in 0..self.cols {
                    let a = self.get(i, j);
                    if !a.is_zero() && !v[j].is_zero() {
                        s += a * &v[j];
                    }
                }
                s
            })
            .collect()
    }

    pub fn pow(&self, e: u32) -> Self {
        assert!(self.is_square());
        let mut acc = Self::identity(self.rows);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn trace(&self) -> BigInt {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i).clone()).sum()
    }

    /// Stack `other` below `self`.
    pub fn vstack(&self, other: &IntMatrix) -> Self {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        IntMatrix { rows: self.rows + other.rows, cols: self.cols, data }
    }

    /// Place `other` to the right of `self`.
    pub fn hstack(&self, other: &IntMatrix) -> Self {
        self.transpose().vstack(&other.transpose()).transpose()
    }

    pub fn select_columns(&self, idx: &[usize]) -> Self {
        let mut m = Self::zeros(self.rows, idx.len());
        for i in 0..self.rows {
            for (k, &j) in idx.iter().enumerate() {
                m.data[i * idx.len() + k] = self.get(i, j).clone();
            }
        }
        m
    }

    pub fn to_rational(&self) -> QMatrix {
        QMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| BigRational::from_integer(x.clone())).collect(),
        }
    }

    pub fn rank(&self) -> usize {
        self.to_rational().rank()
    }

    /// Rank of the reduction modulo a prime.
    pub fn rank_mod_p(&self, p: u64) -> usize {
        let pb = BigInt::from(p);
        let mut m: Vec<Vec<u64>> = (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| self.get(i, j).mod_floor(&pb).to_u64().unwrap())
                    .collect()
            })
            .collect();
        rank_mod_p_rows(&mut m, p)
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> BigInt {
        assert!(self.is_square());
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a: Vec<Vec<BigInt>> = (0..n).map(|i| self.row(i)).collect();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
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
                    let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    a[i][j] = v / &prev;
                }
            }
            prev = a[k][k].clone();
        }
        sign * a[n - 1][n - 1].clone()
    }
}

pub(crate) fn rank_mod_p_rows(m: &mut [Vec<u64>], p: u64) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut r = 0;
    for c in 0..cols {
        let Some(piv) = (r..rows).find(|&i| !m[i][c].is_multiple_of(p)) else {
            continue;
        };
        m.swap(r, piv);
        let inv = crate::arith::inv_mod(m[r][c] as i64, p as i64).unwrap() as u64;
        for j in c..cols {
            m[r][j] = crate::arith::mul_mod(m[r][j], inv, p);
        }
        for i in 0..rows {
            if i != r && m[i][c] != 0 {
                let f = m[i][c];
                for j in c..cols {
                    let sub = crate::arith::mul_mod(f, m[r][j], p);
                    m[i][j] = (m[i][j] + p - sub) % p;
                }
            }
        }
        r += 1;
        if r == rows {
            break;
        }
    }
    r
}

impl<'a> Mul<&'a IntMatrix> for &'a IntMatrix {
    type Output = IntMatrix;
    fn mul(self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch in product");
        let mut out = IntMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(k, j);
                    if !b.is_zero() {
                        out.data[i * rhs.cols + j] += a * b;
                    }
                }
            }
        }
        out
    }
}

impl<'a> Add<&'a IntMatrix> for &'a IntMatrix {
    type Output = IntMatrix;
    fn add(self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl<'a> Sub<&'a IntMatrix> for &'a IntMatrix {
    type Output = IntMatrix;
    fn sub(self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &IntMatrix {
    type Output = IntMatrix;
    fn neg(self) -> IntMatrix {
        IntMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| -x).collect() }
    }
}

/// Smith normal form `U·A·V = D`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SmithForm {
    pub u: IntMatrix,
    pub v: IntMatrix,
    pub d: IntMatrix,
    /// Nonzero diagonal entries d₁ | d₂ | … | d_r.
    pub divisors: Vec<BigInt>,
}

impl SmithForm {
    pub fn rank(&self) -> usize {
        self.divisors.len()
    }
}

pub fn smith_normal_form(a: &IntMatrix) -> SmithForm {
    let (m, n) = (a.rows, a.cols);
    let mut d: Vec<Vec<BigInt>> = (0..m).map(|i| a.row(i)).collect();
    let mut u: Vec<Vec<BigInt>> = (0..m).map(|i| IntMatrix::identity(m).row(i)).collect();
    // V is kept transposed so column operations become row operations
    let mut vt: Vec<Vec<BigInt>> = (0..n).map(|i| IntMatrix::identity(n).row(i)).collect();
    let mut divisors = Vec::new();

    for t in 0..m.min(n) {
        loop {
            // smallest nonzero entry in the trailing block
            let mut best: Option<(usize, usize)> = None;
            for i in t..m {
                for j in t..n {
                    if d[i][j].is_zero() {
                        continue;
                    }
                    let better = match best {
                        None => true,
                        Some((bi, bj)) => d[i][j].abs() < d[bi][bj].abs(),
                    };
                    if better {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return finish_smith(d, u, vt, divisors, m, n);
            };
            d.swap(t, pi);
            u.swap(t, pi);
            if pj != t {
                for row in d.iter_mut() {
                    row.swap(t, pj);
                }
                vt.swap(t, pj);
            }

            let mut clean = true;
            for i in t + 1..m {
                if d[i][t].is_zero() {
                    continue;
                }
                let q = d[i][t].div_floor(&d[t][t]);
                row_axpy(&mut d, i, t, &q);
                row_axpy(&mut u, i, t, &q);
                if !d[i][t].is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..n {
                if d[t][j].is_zero() {
                    continue;
                }
                let q = d[t][j].div_floor(&d[t][t]);
                for row in d.iter_mut() {
                    let s = &row[t] * &q;
                    row[j] -= s;
                }
                row_axpy(&mut vt, j, t, &q);
                if !d[t][j].is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            let piv = d[t][t].clone();
            let bad = (t + 1..m).find(|&i| (t + 1..n).any(|j| !d[i][j].is_multiple_of(&piv)));
            if let Some(i) = bad {
                // row t += row i brings a non-multiple into the pivot row
                row_axpy(&mut d, t, i, &BigInt::from(-1));
                row_axpy(&mut u, t, i, &BigInt::from(-1));
                continue;
            }
            break;
        }
        if d[t][t].is_negative() {
            for x in d[t].iter_mut() {
                *x = -x.clone();
            }
            for x in u[t].iter_mut() {
                *x = -x.clone();
            }
        }
        divisors.push(d[t][t].clone());
    }
    finish_smith(d, u, vt, divisors, m, n)
}

/// row[i] -= q * row[k]
fn row_axpy(rows: &mut [Vec<BigInt>], i: usize, k: usize, q: &BigInt) {
    if q.is_zero() {
        return;
    }
    let (src, dst) = if i < k {
        let (a, b) = rows.split_at_mut(k);
        (&b[0], &mut a[i])
    } else {
        let (a, b) = rows.split_at_mut(i);
        (&a[k], &mut b[0])
    };
    for (x, y) in dst.iter_mut().zip(src.iter()) {
        if !y.is_zero() {
            *x -= y * q;
        }
    }
}

fn finish_smith(
    d: Vec<Vec<BigInt>>,
    u: Vec<Vec<BigInt>>,
    vt: Vec<Vec<BigInt>>,
    divisors: Vec<BigInt>,
    m: usize,
    n: usize,
) -> SmithForm {
    SmithForm {
        u: IntMatrix::from_rows(u, m),
        v: IntMatrix::from_rows(vt, n).transpose(),
        d: IntMatrix::from_rows(d, n),
        divisors,
    }
}

/// Echelon form of the Z-span of `rows` restricted to the first `width` columns,
/// carrying the remaining columns along. Returns the transformed rows; the
/// transformation is unimodular, rows that vanish on the first `width` columns
/// come last.
fn integer_echelon(mut m: Vec<Vec<BigInt>>, width: usize) -> (Vec<Vec<BigInt>>, usize) {
    let nrows = m.len();
    let mut r = 0;
    for c in 0..width {
        if r == nrows {
            break;
        }
        loop {
            let mut best: Option<usize> = None;
            for i in r..nrows {
                if !m[i][c].is_zero() && best.is_none_or(|b| m[i][c].abs() < m[b][c].abs()) {
                    best = Some(i);
                }
            }
            let Some(b) = best else { break };
            m.swap(r, b);
            let mut done = true;
            for i in r + 1..nrows {
                if m[i][c].is_zero() {
                    continue;
                }
                let q = m[i][c].div_floor(&m[r][c]);
                row_axpy(&mut m, i, r, &q);
                if !m[i][c].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if r < nrows && !m[r][c].is_zero() {
            if m[r][c].is_negative() {
                for x in m[r].iter_mut() {
                    *x = -x.clone();
                }
            }
            for i in 0..r {
                if !m[i][c].is_zero() {
                    let q = m[i][c].div_floor(&m[r][c]);
                    row_axpy(&mut m, i, r, &q);
                }
            }
            r += 1;
        }
    }
    (m, r)
}

/// Hermite basis (as rows) of the Z-span of the given integer vectors.
pub fn row_span_basis(vectors: &[Vec<BigInt>], dim: usize) -> Vec<Vec<BigInt>> {
    if vectors.is_empty() {
        return Vec::new();
    }
    let (m, r) = integer_echelon(vectors.to_vec(), dim);
    m.into_iter().take(r).collect()
}

/// Basis (as columns) of the integer kernel of `a`. The integer kernel is
/// automatically saturated in Z^n; the basis comes from a unimodular column
/// transformation, so the quotient Z^n / ker is torsion-free.
pub fn kernel_saturated(a: &IntMatrix) -> IntMatrix {
    let (m, n) = (a.rows, a.cols);
    let rows: Vec<Vec<BigInt>> = (0..n)
        .map(|j| {
            let mut r = a.col(j);
            r.extend((0..n).map(|k| if k == j { BigInt::one() } else { BigInt::zero() }));
            r
        })
        .collect();
    let (ech, rank) = integer_echelon(rows, m);
    let mut basis: Vec<Vec<BigInt>> = ech[rank..].iter().map(|r| r[m..].to_vec()).collect();
    // size-reduce the kernel basis through its own Hermite form
    if !basis.is_empty() {
        basis = row_span_basis(&basis, n);
    }
    IntMatrix::from_columns(&basis, n)
}

/// Saturation in Z^n of the lattice spanned by the columns of `b`.
pub fn saturate_columns(b: &IntMatrix) -> IntMatrix {
    let n = b.rows;
    if b.cols == 0 {
        return IntMatrix::zeros(n, 0);
    }
    // W^⊥ = integer kernel of bᵀ; the saturation is the kernel of (W^⊥)ᵀ
    let perp = kernel_saturated(&b.transpose());
    if perp.cols == 0 {
        return IntMatrix::identity(n);
    }
    kernel_saturated(&perp.transpose())
}

/// Primitive integer vector on the rational line through `v`.
pub fn primitive_vector(v: &[BigRational]) -> Vec<BigInt> {
    let den = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| (x * BigRational::from_integer(den.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return ints;
    }
    ints.into_iter().map(|x| x / &g).collect()
}

/// Dense matrix over Q.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigRational>,
}

fn q0() -> BigRational {
    BigRational::zero()
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMatrix { rows, cols, data: vec![q0(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigRational::one();
        }
        m
    }

    pub fn from_columns(cols: &[Vec<BigRational>], nrows: usize) -> Self {
        let mut m = Self::zeros(nrows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            for i in 0..nrows {
                m.data[i * cols.len() + j] = c[i].clone();
            }
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<BigRational>>, cols: usize) -> Self {
        let r = rows.len();
        QMatrix { rows: r, cols, data: rows.into_iter().flatten().collect() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.data[i * self.cols + j]
    }

    pub(crate) fn set(&mut self, i: usize, j: usize, v: BigRational) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> Vec<BigRational> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn col(&self, j: usize) -> Vec<BigRational> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<BigRational>> {
        (0..self.cols).map(|j| self.col(j)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        t
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        QMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x * k).collect() }
    }

    pub fn mul_vec(&self, v: &[BigRational]) -> Vec<BigRational> {
        (0..self.rows)
            .map(|i| {
                let mut s = q0();
                for j in 0..self.cols {
                    let a = self.get(i, j);
                    if !a.is_zero() && !v[j].is_zero() {
                        s += a * &v[j];
                    }
                }
                s
            })
            .collect()
    }

    pub fn trace(&self) -> BigRational {
        let mut s = q0();
        for i in 0..self.rows.min(self.cols) {
            s += self.get(i, i);
        }
        s
    }

    /// Common denominator of all entries.
    pub fn denominator(&self) -> BigInt {
        self.data.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
    }

    pub fn to_integer(&self) -> Option<IntMatrix> {
        if self.data.iter().all(|x| x.is_integer()) {
            Some(IntMatrix::new(self.rows, self.cols, self.data.iter().map(|x| x.to_integer()).collect()))
        } else {
            None
        }
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (QMatrix, Vec<usize>) {
        let mut m: Vec<Vec<BigRational>> = (0..self.rows).map(|i| self.row(i)).collect();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !m[i][c].is_zero()) else {
                continue;
            };
            m.swap(r, p);
            let inv = m[r][c].recip();
            for x in m[r].iter_mut() {
                if !x.is_zero() {
                    *x = &*x * &inv;
                }
            }
            for i in 0..self.rows {
                if i == r || m[i][c].is_zero() {
                    continue;
                }
                let f = m[i][c].clone();
                let (src, dst) = if i < r {
                    let (a, b) = m.split_at_mut(r);
                    (&b[0], &mut a[i])
                } else {
                    let (a, b) = m.split_at_mut(i);
                    (&a[r], &mut b[0])
                };
                for (x, y) in dst.iter_mut().zip(src.iter()) {
                    if !y.is_zero() {
                        *x -= y * &f;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (QMatrix::from_rows(m, self.cols), pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right kernel, as columns.
    pub fn nullspace(&self) -> QMatrix {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut basis = Vec::with_capacity(free.len());
        for &f in &free {
            let mut v = vec![q0(); self.cols];
            v[f] = BigRational::one();
            for (k, &pc) in pivots.iter().enumerate() {
                v[pc] = -r.get(k, f).clone();
            }
            basis.push(v);
        }
        QMatrix::from_columns(&basis, self.cols)
    }

    /// Solve `self · X = b` for a matrix `self` of full column rank; `None` if inconsistent.
    pub fn solve(&self, b: &QMatrix) -> Option<QMatrix> {
        assert_eq!(self.rows, b.rows);
        let mut aug = QMatrix::zeros(self.rows, self.cols + b.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.get(i, j).clone());
            }
            for j in 0..b.cols {
                aug.set(i, self.cols + j, b.get(i, j).clone());
            }
        }
        let (r, pivots) = aug.rref();
        if pivots.iter().any(|&p| p >= self.cols) {
            return None;
        }
        assert_eq!(pivots.len(), self.cols, "solve needs full column rank");
        let mut x = QMatrix::zeros(self.cols, b.cols);
        for (k, &pc) in pivots.iter().enumerate() {
            for j in 0..b.cols {
                x.set(pc, j, r.get(k, self.cols + j).clone());
            }
        }
        Some(x)
    }

    pub fn inverse(&self) -> Option<QMatrix> {
        assert_eq!(self.rows, self.cols);
        if self.rank() < self.rows {
            return None;
        }
        self.solve(&QMatrix::identity(self.rows))
    }

    /// Characteristic polynomial det(xI − A), coefficients from degree 0 upwards.
    pub fn charpoly(&self) -> Vec<BigRational> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        // Faddeev–LeVerrier
        let mut c = vec![q0(); n + 1];
        c[n] = BigRational::one();
        let mut mk = QMatrix::zeros(n, n);
        for k in 1..=n {
            let mut next = self * &mk;
            for i in 0..n {
                let v = next.get(i, i) + &c[n - k + 1];
                next.set(i, i, v);
            }
            let am = self * &next;
            c[n - k] = -am.trace() / BigRational::from_integer(BigInt::from(k));
            mk = next;
        }
        c
    }
}

impl<'a> Mul<&'a QMatrix> for &'a QMatrix {
    type Output = QMatrix;
    fn mul(self, rhs: &QMatrix) -> QMatrix {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch in product");
        let mut out = QMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(k, j);
                    if !b.is_zero() {
                        out.data[i * rhs.cols + j] += a * b;
                    }
                }
            }
        }
        out
    }
}

impl<'a> Sub<&'a QMatrix> for &'a QMatrix {
    type Output = QMatrix;
    fn sub(self, rhs: &QMatrix) -> QMatrix {
        QMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl<'a> Add<&'a QMatrix> for &'a QMatrix {
    type Output = QMatrix;
    fn add(self, rhs: &QMatrix) -> QMatrix {
        QMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

/// Integer roots of a rational polynomial (coefficients low to high) with |r| ≤ bound,
/// each listed with multiplicity, together with the remaining cofactor.
pub fn integer_roots(poly: &[BigRational], bound: i64) -> (Vec<(i64, usize)>, Vec<BigRational>) {
    let mut p = poly.to_vec();
    let mut roots = Vec::new();
    for r in -bound..=bound {
        let mut mult = 0;
        let rq = BigRational::from_integer(BigInt::from(r));
        while p.len() > 1 && eval_poly(&p, &rq).is_zero() {
            p = divide_linear(&p, &rq);
            mult += 1;
        }
        if mult > 0 {
            roots.push((r, mult));
        }
    }
    (roots, p)
}

/// Joint eigenspace with integer eigenvalues of a family of commuting operators.
#[derive(Clone, Debug)]
pub struct JointEigenspace {
    /// Eigenvalue of each operator, keyed by its label.
    pub eigenvalues: std::collections::BTreeMap<u64, i64>,
    /// Basis of the eigenspace (columns, ambient coordinates).
    pub basis: QMatrix,
}

/// Split the column span of `basis` under commuting operators `(label, T, bound)`,
/// keeping integer eigenvalues with |a| ≤ bound. Returns the rational joint
/// eigenspaces and the total dimension of the discarded (irrational) part.
pub fn joint_integer_eigenspaces(basis: &QMatrix, ops: &[(u64, QMatrix, i64)]) -> (Vec<JointEigenspace>, usize) {
    let mut work = Vec::new();
    if basis.cols() > 0 {
        work.push(JointEigenspace { eigenvalues: Default::default(), basis: basis.clone() });
    }
    let mut dropped = 0;
    for (label, t, bound) in ops {
        let mut next = Vec::new();
        for w in work {
            let restricted = w.basis.solve(&(t * &w.basis)).expect("subspace is stable");
            let (roots, rest) = integer_roots(&restricted.charpoly(), *bound);
            dropped += rest.len() - 1;
            for (a, _) in roots {
                let shift = QMatrix::identity(w.basis.cols()).scale(&BigRational::from_integer(BigInt::from(a)));
                let sub = &w.basis * &(&restricted - &shift).nullspace();
                let mut ev = w.eigenvalues.clone();
                ev.insert(*label, a);
                next.push(JointEigenspace { eigenvalues: ev, basis: sub });
            }
        }
        work = next;
    }
    (work, dropped)
}

pub fn eval_poly(p: &[BigRational], x: &BigRational) -> BigRational {
    let mut acc = q0();
    for c in p.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

/// Quotient of p(x) by (x − r), assuming r is a root.
pub fn divide_linear(p: &[BigRational], r: &BigRational) -> Vec<BigRational> {
    let n = p.len() - 1;
    let mut q = vec![q0(); n];
    let mut carry = q0();
    for k in (0..n).rev() {
        carry = &p[k + 1] + &carry * r;
        q[k] = carry.clone();
    }
    q
}
