//! Finitely generated submodules of `Frac(R)^n`, stored by a basis.

use crate::error::Result;
use crate::matrix::Matrix;
use crate::ring::{BaseRing, Elem, RingMap};
use crate::snf::{column_span, kernel_basis, solve, Track};

/// An `R`-lattice inside `Frac(R)^n`, given by a basis of column vectors.
///
/// The basis has full column rank but need not be saturated.
#[derive(Clone, Debug)]
pub struct Lattice {
    ring: BaseRing,
    ambient: usize,
    basis: Matrix,
}

impl Lattice {
    pub fn zero(ring: &BaseRing, ambient: usize) -> Self {
        Lattice { ring: ring.clone(), ambient, basis: Matrix::zeros(ambient, 0) }
    }

    pub fn full(ring: &BaseRing, ambient: usize) -> Self {
        Lattice { ring: ring.clone(), ambient, basis: Matrix::identity(ambient) }
    }

    /// The span of the columns of `gens`.
    pub fn span(ring: &BaseRing, gens: &Matrix) -> Self {
        Lattice { ring: ring.clone(), ambient: gens.rows(), basis: column_span(ring, gens) }
    }

    pub fn from_vectors(ring: &BaseRing, ambient: usize, vs: &[Vec<Elem>]) -> Self {
        Lattice::span(ring, &Matrix::from_columns(ambient, vs))
    }

    /// Wraps a basis already known to have full column rank.
    pub fn from_basis_unchecked(ring: &BaseRing, basis: Matrix) -> Self {
        Lattice { ring: ring.clone(), ambient: basis.rows(), basis }
    }

    /// The lattice spanned by scaled standard vectors `c_i e_i`.
    pub fn diagonal(ring: &BaseRing, coeffs: &[Elem]) -> Self {
        let gens = Matrix::diagonal(coeffs);
        Lattice::span(ring, &gens)
    }

    pub fn ring(&self) -> &BaseRing {
        &self.ring
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn rank(&self) -> usize {
        self.basis.cols()
    }

    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn basis_vectors(&self) -> Vec<Vec<Elem>> {
        (0..self.rank()).map(|j| self.basis.column(j)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.rank() == 0
    }

    /// Coordinates of `v` in the basis, if `v` lies in the lattice.
    pub fn coordinates(&self, v: &[Elem]) -> Option<Vec<Elem>> {
        if v.iter().all(Elem::is_zero) {
            return Some(vec![Elem::zero(); self.rank()]);
        }
        if self.rank() == 0 {
            return None;
        }
        solve(&self.ring, &self.basis, &Matrix::from_column(v)).map(|x| x.column(0))
    }

    /// Coordinates of each column of `m`.
    pub fn coordinates_matrix(&self, m: &Matrix) -> Option<Matrix> {
        if m.is_zero() {
            return Some(Matrix::zeros(self.rank(), m.cols()));
        }
        if self.rank() == 0 {
            return None;
        }
        solve(&self.ring, &self.basis, m)
    }

    pub fn contains_vec(&self, v: &[Elem]) -> bool {
        self.coordinates(v).is_some()
    }

    pub fn contains(&self, other: &Lattice) -> bool {
        other.rank() == 0 || self.coordinates_matrix(&other.basis).is_some()
    }

    pub fn same_as(&self, other: &Lattice) -> bool {
        self.rank() == other.rank() && self.contains(other) && other.contains(self)
    }

    pub fn sum(&self, other: &Lattice) -> Lattice {
        Lattice::span(&self.ring, &self.basis.hstack(&other.basis))
    }

    pub fn intersect(&self, other: &Lattice) -> Lattice {
        if self.is_zero() || other.is_zero() {
            return Lattice::zero(&self.ring, self.ambient);
        }
        let stacked = self.basis.hstack(&(-&other.basis));
        let k = kernel_basis(&self.ring, &stacked);
        let x = k.row_range(0, self.rank());
        Lattice::span(&self.ring, &(&self.basis * &x))
    }

    /// `{v ∈ self : op v ∈ target}`.
    pub fn preimage(&self, op: &Matrix, target: &Lattice) -> Lattice {
        if self.is_zero() {
            return self.clone();
        }
        let image = op * &self.basis;
        let stacked = image.hstack(&(-&target.basis));
        let k = kernel_basis(&self.ring, &stacked);
        let x = k.row_range(0, self.rank());
        Lattice::span(&self.ring, &(&self.basis * &x))
    }

    pub fn image(&self, op: &Matrix) -> Lattice {
        Lattice::span(&self.ring, &(op * &self.basis))
    }

    /// Index `[self : sub]` up to units, as `det` of the inclusion matrix.
    pub fn index_of(&self, sub: &Lattice) -> Option<Elem> {
        if self.rank() != sub.rank() {
            return None;
        }
        let c = self.coordinates_matrix(&sub.basis)?;
        Some(self.ring.canonical(&c.determinant()))
    }

    /// Extension of scalars along an inclusion of rings.
    pub fn base_change(&self, f: &RingMap) -> Result<Lattice> {
        Ok(Lattice { ring: f.target().clone(), ambient: self.ambient, basis: self.basis.clone() })
    }

    /// Elementary divisors of the basis matrix, for diagnostics.
    pub fn divisors(&self) -> Vec<Elem> {
        let d = self.basis.clearing_denominator(&self.ring);
        let scaled = self.basis.scale(&Elem::from_bigint(d.clone()));
        let dinv = Elem::from_bigint(d).inv().unwrap();
        crate::snf::smith_normal_form(&self.ring, &scaled, Track::NONE)
            .map(|s| s.diag.iter().map(|x| self.ring.canonical(&(x * &dinv))).collect())
            .unwrap_or_default()
    }
}

impl PartialEq for Lattice {
    fn eq(&self, other: &Self) -> bool {
        self.ring == other.ring && self.ambient == other.ambient && self.same_as(other)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(n: i64) -> Elem {
        Elem::from_int(n)
    }

    #[test]
    fn membership_and_equality() {
        let z = BaseRing::Integers;
        let l = Lattice::diagonal(&z, &[e(1), e(2)]);
        assert!(l.contains_vec(&[e(3), e(4)]));
        assert!(!l.contains_vec(&[e(0), e(1)]));
        let l2 = Lattice::from_vectors(&z, 2, &[vec![e(1), e(2)], vec![e(0), e(2)]]);
        assert_eq!(l, l2);
    }

    #[test]
    fn intersection_and_sum() {
        let z = BaseRing::Integers;
        let a = Lattice::diagonal(&z, &[e(2), e(1)]);
        let b = Lattice::diagonal(&z, &[e(3), e(1)]);
        assert_eq!(a.intersect(&b), Lattice::diagonal(&z, &[e(6), e(1)]));
        assert_eq!(a.sum(&b), Lattice::full(&z, 2));
    }

    #[test]
    fn preimage_under_operator() {
        let z = BaseRing::Integers;
        let op = Matrix::from_i64(&[&[0, 1], &[0, 0]]);
        let target = Lattice::diagonal(&z, &[e(2), e(1)]);
        let pre = Lattice::full(&z, 2).preimage(&op, &target);
        assert_eq!(pre, Lattice::diagonal(&z, &[e(1), e(2)]));
    }

    #[test]
    fn fractional_entries() {
        let z = BaseRing::Integers;
        let l = Lattice::from_vectors(&z, 1, &[vec![Elem::from_ratio(1, 2)]]);
        assert!(l.contains_vec(&[e(1)]));
        assert_eq!(Lattice::full(&z, 1).index_of(&Lattice::diagonal(&z, &[e(4)])), Some(e(4)));
        assert_eq!(l.divisors(), vec![Elem::from_ratio(1, 2)]);
    }
}
