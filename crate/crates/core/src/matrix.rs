//! Dense matrices over ℚ(i) and labeled free modules.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{GkError, Result};
use crate::ring::{BaseRing, Elem, RingMap};

/// A dense row-major matrix with exact entries.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Elem>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![Elem::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Elem::one());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Elem) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    /// Builds a matrix from rows; all rows must share a length.
    pub fn from_rows(rows: Vec<Vec<Elem>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        if rows.iter().any(|x| x.len() != c) {
            return Err(GkError::Parse("ragged matrix".into()));
        }
        Ok(Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    /// Convenience constructor for integer matrices; panics on ragged input.
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let c = rows.first().map_or(0, |x| x.len());
        Matrix::from_fn(rows.len(), c, |i, j| Elem::from_int(rows[i][j]))
    }

    pub fn from_column(v: &[Elem]) -> Self {
        Matrix { rows: v.len(), cols: 1, data: v.to_vec() }
    }

    pub fn from_columns(n: usize, cols: &[Vec<Elem>]) -> Self {
        Matrix::from_fn(n, cols.len(), |i, j| cols[j][i].clone())
    }

    pub fn diagonal(d: &[Elem]) -> Self {
        let mut m = Matrix::zeros(d.len(), d.len());
        for (i, x) in d.iter().enumerate() {
            m.set(i, i, x.clone());
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &Elem {
        &self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, x: Elem) {
        self.data[i * self.cols + j] = x;
    }

    #[inline]
    pub fn get_mut(&mut self, i: usize, j: usize) -> &mut Elem {
        &mut self.data[i * self.cols + j]
    }

    pub fn entries(&self) -> &[Elem] {
        &self.data
    }

    pub fn row(&self, i: usize) -> Vec<Elem> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn column(&self, j: usize) -> Vec<Elem> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Elem>> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Elem::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| if i == j { self.get(i, j).is_one() } else { self.get(i, j).is_zero() })
            })
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn scale(&self, c: &Elem) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x * c).collect() }
    }

    pub fn map(&self, f: impl Fn(&Elem) -> Elem) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn mul_vec(&self, v: &[Elem]) -> Vec<Elem> {
        assert_eq!(v.len(), self.cols, "dimension mismatch");
        (0..self.rows)
            .map(|i| {
                let mut acc = Elem::zero();
                for (j, x) in v.iter().enumerate() {
                    let a = self.get(i, j);
                    if !a.is_zero() && !x.is_zero() {
                        acc += &(a * x);
                    }
                }
                acc
            })
            .collect()
    }

    /// Kronecker product; index `(i, k)` of the result is `i * other.rows + k`.
    pub fn kron(&self, other: &Matrix) -> Matrix {
        let (r, c) = (self.rows * other.rows, self.cols * other.cols);
        let mut out = Matrix::zeros(r, c);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if a.is_zero() {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        let b = other.get(k, l);
                        if !b.is_zero() {
                            out.set(i * other.rows + k, j * other.cols + l, a * b);
                        }
                    }
                }
            }
        }
        out
    }

    pub fn hstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.rows, other.rows, "hstack row mismatch");
        Matrix::from_fn(self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self.get(i, j).clone()
            } else {
                other.get(i, j - self.cols).clone()
            }
        })
    }

    pub fn vstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.cols, "vstack column mismatch");
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Matrix { rows: self.rows + other.rows, cols: self.cols, data }
    }

    /// Stacks many blocks vertically; `cols` fixes the width when `blocks` is empty.
    pub fn vstack_all(cols: usize, blocks: &[Matrix]) -> Matrix {
        let mut out = Matrix::zeros(0, cols);
        for b in blocks {
            out = out.vstack(b);
        }
        out
    }

    pub fn block_diag(&self, other: &Matrix) -> Matrix {
        let mut out = Matrix::zeros(self.rows + other.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j).clone());
            }
        }
        for i in 0..other.rows {
            for j in 0..other.cols {
                out.set(self.rows + i, self.cols + j, other.get(i, j).clone());
            }
        }
        out
    }

    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Matrix {
        Matrix::from_fn(rows.len(), cols.len(), |i, j| self.get(rows[i], cols[j]).clone())
    }

    pub fn select_rows(&self, rows: &[usize]) -> Matrix {
        let cols: Vec<usize> = (0..self.cols).collect();
        self.select(rows, &cols)
    }

    pub fn select_cols(&self, cols: &[usize]) -> Matrix {
        let rows: Vec<usize> = (0..self.rows).collect();
        self.select(&rows, cols)
    }

    pub fn row_range(&self, start: usize, end: usize) -> Matrix {
        let r: Vec<usize> = (start..end).collect();
        self.select_rows(&r)
    }

    pub fn col_range(&self, start: usize, end: usize) -> Matrix {
        let c: Vec<usize> = (start..end).collect();
        self.select_cols(&c)
    }

    /// Commutator `AB - BA`.
    pub fn commutator(&self, other: &Matrix) -> Matrix {
        &(self * other) - &(other * self)
    }

    pub fn pow(&self, e: u32) -> Matrix {
        let mut acc = Matrix::identity(self.rows);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn trace(&self) -> Elem {
        let mut t = Elem::zero();
        for i in 0..self.rows.min(self.cols) {
            t += self.get(i, i);
        }
        t
    }

    /// True when every entry lies in `ring`.
    pub fn is_over(&self, ring: &BaseRing) -> bool {
        self.data.iter().all(|x| ring.contains(x))
    }

    /// Least positive integer `d` with `d * self` defined over `ring`.
    pub fn clearing_denominator(&self, ring: &BaseRing) -> BigInt {
        self.data.iter().fold(BigInt::one(), |acc, x| acc.lcm(&ring.clearing_denominator(x)))
    }

    /// Scales each row by the least integer making it integral over `ring`.
    /// The kernel is unchanged.
    pub fn clear_row_denominators(&self, ring: &BaseRing) -> Matrix {
        let mut out = self.clone();
        for i in 0..self.rows {
            let d = (0..self.cols).fold(BigInt::one(), |acc, j| acc.lcm(&ring.clearing_denominator(self.get(i, j))));
            if !d.is_one() {
                for j in 0..self.cols {
                    let x = out.get(i, j).scale_int(&d);
                    out.set(i, j, x);
                }
            }
        }
        out
    }

    /// Rows `(i, j) <- G * (row_i, row_j)` for `G = [[a, b], [c, d]]`.
    pub fn combine_rows(&mut self, i: usize, j: usize, g: &[Elem; 4]) {
        for k in 0..self.cols {
            let x = self.get(i, k).clone();
            let y = self.get(j, k).clone();
            if x.is_zero() && y.is_zero() {
                continue;
            }
            let ni = &(&g[0] * &x) + &(&g[1] * &y);
            let nj = &(&g[2] * &x) + &(&g[3] * &y);
            self.set(i, k, ni);
            self.set(j, k, nj);
        }
    }

    /// Columns `(col_i, col_j) <- (col_i, col_j) * H` for `H = [[a, b], [c, d]]`.
    pub fn combine_cols(&mut self, i: usize, j: usize, h: &[Elem; 4]) {
        for k in 0..self.rows {
            let x = self.get(k, i).clone();
            let y = self.get(k, j).clone();
            if x.is_zero() && y.is_zero() {
                continue;
            }
            let ni = &(&h[0] * &x) + &(&h[2] * &y);
            let nj = &(&h[1] * &x) + &(&h[3] * &y);
            self.set(k, i, ni);
            self.set(k, j, nj);
        }
    }

    /// `row_i += c * row_j`.
    pub fn add_row_multiple(&mut self, i: usize, j: usize, c: &Elem) {
        if c.is_zero() {
            return;
        }
        for k in 0..self.cols {
            let y = self.get(j, k);
            if !y.is_zero() {
                let v = c * y;
                *self.get_mut(i, k) += &v;
            }
        }
    }

    /// `col_i += c * col_j`.
    pub fn add_col_multiple(&mut self, i: usize, j: usize, c: &Elem) {
        if c.is_zero() {
            return;
        }
        for k in 0..self.rows {
            let y = self.get(k, j);
            if !y.is_zero() {
                let v = c * y;
                *self.get_mut(k, i) += &v;
            }
        }
    }

    pub fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for k in 0..self.cols {
            self.data.swap(i * self.cols + k, j * self.cols + k);
        }
    }

    pub fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for k in 0..self.rows {
            self.data.swap(k * self.cols + i, k * self.cols + j);
        }
    }

    pub fn scale_row(&mut self, i: usize, c: &Elem) {
        for k in 0..self.cols {
            let v = self.get(i, k) * c;
            self.set(i, k, v);
        }
    }

    pub fn scale_col(&mut self, j: usize, c: &Elem) {
        for k in 0..self.rows {
            let v = self.get(k, j) * c;
            self.set(k, j, v);
        }
    }

    /// Determinant by fraction-free elimination in ℚ(i).
    pub fn determinant(&self) -> Elem {
        assert!(self.is_square(), "determinant of non-square matrix");
        let n = self.rows;
        let mut a = self.clone();
        let mut det = Elem::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&r| !a.get(r, c).is_zero()) else {
                return Elem::zero();
            };
            if p != c {
                a.swap_rows(p, c);
                det = -det;
            }
            let piv = a.get(c, c).clone();
            det = &det * &piv;
            let inv = piv.inv().unwrap();
            for r in c + 1..n {
                if !a.get(r, c).is_zero() {
                    let f = -(a.get(r, c) * &inv);
                    a.add_row_multiple(r, c, &f);
                }
            }
        }
        det
    }

    /// Rank over the fraction field.
    pub fn rank(&self) -> usize {
        let mut a = self.clone();
        let mut r = 0;
        for c in 0..self.cols {
            let Some(p) = (r..self.rows).find(|&i| !a.get(i, c).is_zero()) else {
                continue;
            };
            a.swap_rows(p, r);
            let inv = a.get(r, c).inv().unwrap();
            for i in r + 1..self.rows {
                if !a.get(i, c).is_zero() {
                    let f = -(a.get(i, c) * &inv);
                    a.add_row_multiple(i, r, &f);
                }
            }
            r += 1;
            if r == self.rows {
                break;
            }
        }
        r
    }

    /// Inverse over the fraction field.
    pub fn inverse(&self) -> Option<Matrix> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let mut a = self.hstack(&Matrix::identity(n));
        for c in 0..n {
            let p = (c..n).find(|&r| !a.get(r, c).is_zero())?;
            a.swap_rows(p, c);
            let inv = a.get(c, c).inv().unwrap();
            a.scale_row(c, &inv);
            for r in 0..n {
                if r != c && !a.get(r, c).is_zero() {
                    let f = -a.get(r, c).clone();
                    a.add_row_multiple(r, c, &f);
                }
            }
        }
        Some(a.col_range(n, 2 * n))
    }

    /// Entrywise image under a ring map.
    pub fn apply_ring_map(&self, f: &RingMap) -> Result<Matrix> {
        let data = self.data.iter().map(|x| f.apply(x)).collect::<Result<Vec<_>>>()?;
        Ok(Matrix { rows: self.rows, cols: self.cols, data })
    }

    /// Real form of a matrix over ℤ[i] with respect to the basis {1, i}:
    /// `[[Re, -Im], [Im, Re]]`, with coordinates interleaved per basis vector.
    pub fn realify(&self) -> Matrix {
        let mut out = Matrix::zeros(2 * self.rows, 2 * self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let x = self.get(i, j);
                let re = Elem::from_rational(x.re().clone());
                let im = Elem::from_rational(x.im().clone());
                out.set(2 * i, 2 * j, re.clone());
                out.set(2 * i, 2 * j + 1, -&im);
                out.set(2 * i + 1, 2 * j, im);
                out.set(2 * i + 1, 2 * j + 1, re);
            }
        }
        out
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            write!(f, "[{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl Mul<&Matrix> for &Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.cols, rhs.rows, "matrix product dimension mismatch");
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(k, j);
                    if !b.is_zero() {
                        let p = a * b;
                        *out.get_mut(i, j) += &p;
                    }
                }
            }
        }
        out
    }
}

impl Mul<Matrix> for Matrix {
    type Output = Matrix;
    fn mul(self, rhs: Matrix) -> Matrix {
        &self * &rhs
    }
}

impl Add<&Matrix> for &Matrix {
    type Output = Matrix;
    fn add(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.shape(), rhs.shape(), "matrix sum shape mismatch");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub<&Matrix> for &Matrix {
    type Output = Matrix;
    fn sub(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.shape(), rhs.shape(), "matrix difference shape mismatch");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &Matrix {
    type Output = Matrix;
    fn neg(self) -> Matrix {
        self.map(|x| -x)
    }
}

impl Serialize for Matrix {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_rows().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Matrix {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<Elem>>::deserialize(deserializer)?;
        Matrix::from_rows(rows).map_err(serde::de::Error::custom)
    }
}

/// A free module of finite rank with a labeled basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LatticeModule {
    ring: BaseRing,
    labels: Vec<String>,
}

impl LatticeModule {
    pub fn new(ring: BaseRing, labels: Vec<String>) -> Result<Self> {
        let mut seen = std::collections::HashSet::new();
        for l in &labels {
            if !seen.insert(l) {
                return Err(GkError::Validation(format!("duplicate basis label `{l}`")));
            }
        }
        Ok(LatticeModule { ring, labels })
    }

    /// Basis labeled `prefix0, prefix1, ...`.
    pub fn standard(ring: BaseRing, rank: usize, prefix: &str) -> Self {
        LatticeModule { ring, labels: (0..rank).map(|i| format!("{prefix}{i}")).collect() }
    }

    pub fn ring(&self) -> &BaseRing {
        &self.ring
    }

    pub fn rank(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn base_change(&self, f: &RingMap) -> Result<Self> {
        if f.source() != &self.ring {
            return Err(GkError::Domain(format!("module over {} but map from {}", self.ring, f.source())));
        }
        Ok(LatticeModule { ring: f.target().clone(), labels: self.labels.clone() })
    }
}

/// A homomorphism of labeled free modules.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeMap {
    source: LatticeModule,
    target: LatticeModule,
    matrix: Matrix,
}

impl LatticeMap {
    pub fn new(source: LatticeModule, target: LatticeModule, matrix: Matrix) -> Result<Self> {
        if matrix.shape() != (target.rank(), source.rank()) {
            return Err(GkError::Validation(format!(
                "matrix shape {:?} does not match {}x{}",
                matrix.shape(),
                target.rank(),
                source.rank()
            )));
        }
        if source.ring() != target.ring() {
            return Err(GkError::Validation("source and target over different rings".into()));
        }
        if !matrix.is_over(source.ring()) {
            return Err(GkError::Validation(format!("matrix entries not in {}", source.ring())));
        }
        Ok(LatticeMap { source, target, matrix })
    }

    pub fn identity(m: LatticeModule) -> Self {
        let n = m.rank();
        LatticeMap { source: m.clone(), target: m, matrix: Matrix::identity(n) }
    }

    pub fn source(&self) -> &LatticeModule {
        &self.source
    }

    pub fn target(&self) -> &LatticeModule {
        &self.target
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn ring(&self) -> &BaseRing {
        self.source.ring()
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &LatticeMap) -> Result<Self> {
        if other.target != self.source {
            return Err(GkError::Domain("maps do not compose".into()));
        }
        Ok(LatticeMap { source: other.source.clone(), target: self.target.clone(), matrix: &self.matrix * &other.matrix })
    }

    pub fn apply_ring_map(&self, f: &RingMap) -> Result<Self> {
        Ok(LatticeMap {
            source: self.source.base_change(f)?,
            target: self.target.base_change(f)?,
            matrix: self.matrix.apply_ring_map(f)?,
        })
    }
}

/// Entrywise image of a map along `f`.
pub fn apply_ring_map(f: &RingMap, a: &LatticeMap) -> Result<LatticeMap> {
    a.apply_ring_map(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn products_and_kron() {
        let a = Matrix::from_i64(&[&[1, 2], &[3, 4]]);
        let b = Matrix::from_i64(&[&[0, 1], &[1, 0]]);
        assert_eq!(&a * &b, Matrix::from_i64(&[&[2, 1], &[4, 3]]));
        let k = a.kron(&Matrix::identity(2));
        assert_eq!(k.get(2, 0), &Elem::from_int(3));
        assert_eq!(k.get(3, 1), &Elem::from_int(3));
        assert_eq!(k.get(2, 1), &Elem::zero());
    }

    #[test]
    fn determinant_inverse_rank() {
        let a = Matrix::from_i64(&[&[2, 1], &[7, 4]]);
        assert_eq!(a.determinant(), Elem::one());
        let inv = a.inverse().unwrap();
        assert!((&a * &inv).is_identity());
        assert_eq!(Matrix::from_i64(&[&[1, 2], &[2, 4]]).rank(), 1);
    }

    #[test]
    fn lattice_map_composition() {
        let m = LatticeModule::standard(BaseRing::Integers, 2, "v");
        let a = LatticeMap::new(m.clone(), m.clone(), Matrix::from_i64(&[&[1, 1], &[0, 1]])).unwrap();
        let id = LatticeMap::identity(m.clone());
        assert_eq!(a.compose(&id).unwrap(), a);
        assert_eq!(id.compose(&a).unwrap(), a);
        assert!(LatticeModule::new(BaseRing::Integers, vec!["a".into(), "a".into()]).is_err());
    }

    #[test]
    fn realification_is_multiplicative() {
        let a = Matrix::from_rows(vec![vec![Elem::gaussian(1, 2), Elem::gaussian(0, 1)]]).unwrap();
        let b = Matrix::from_rows(vec![vec![Elem::gaussian(3, -1)], vec![Elem::gaussian(2, 2)]]).unwrap();
        assert_eq!((&a * &b).realify(), &a.realify() * &b.realify());
    }
}
