//! Smith normal form over the supported PIDs and the linear algebra built on it.

use crate::error::{GkError, Result};
use crate::matrix::{LatticeMap, Matrix};
use crate::ring::{BaseRing, Elem};

/// `P * A * Q = D` with `P`, `Q` unimodular and `D` diagonal.
///
/// In the factorization `A = U * D * V` one has `U = P⁻¹` and `V = Q⁻¹`.
#[derive(Clone, Debug)]
pub struct Snf {
    pub ring: BaseRing,
    pub shape: (usize, usize),
    /// Nonzero diagonal entries, canonically normalized, forming a divisibility chain.
    pub diag: Vec<Elem>,
    pub p: Option<Matrix>,
    pub p_inv: Option<Matrix>,
    pub q: Option<Matrix>,
    pub q_inv: Option<Matrix>,
}

/// Which transforms to record while reducing.
#[derive(Clone, Copy, Debug, Default)]
pub struct Track {
    pub left: bool,
    pub right: bool,
}

impl Track {
    pub const NONE: Track = Track { left: false, right: false };
    pub const LEFT: Track = Track { left: true, right: false };
    pub const RIGHT: Track = Track { left: false, right: true };
    pub const BOTH: Track = Track { left: true, right: true };
}

impl Snf {
    pub fn rank(&self) -> usize {
        self.diag.len()
    }

    /// Diagonal of `D` padded with zeros to `min(rows, cols)`.
    pub fn full_diagonal(&self) -> Vec<Elem> {
        let n = self.shape.0.min(self.shape.1);
        let mut d = self.diag.clone();
        d.resize(n, Elem::zero());
        d
    }

    pub fn d_matrix(&self) -> Matrix {
        let mut d = Matrix::zeros(self.shape.0, self.shape.1);
        for (i, x) in self.diag.iter().enumerate() {
            d.set(i, i, x.clone());
        }
        d
    }

    /// `U = P⁻¹`.
    pub fn u(&self) -> Option<&Matrix> {
        self.p_inv.as_ref()
    }

    /// `V = Q⁻¹`.
    pub fn v(&self) -> Option<&Matrix> {
        self.q_inv.as_ref()
    }

    /// Non-unit elementary divisors.
    pub fn torsion(&self) -> Vec<Elem> {
        self.diag.iter().filter(|d| !self.ring.is_unit(d)).cloned().collect()
    }

    pub fn all_units(&self) -> bool {
        self.diag.iter().all(|d| self.ring.is_unit(d))
    }
}

fn inv2(g: &[Elem; 4]) -> [Elem; 4] {
    // only used on determinant-one matrices
    [g[3].clone(), -&g[1], -&g[2], g[0].clone()]
}

struct Reducer<'a> {
    ring: &'a BaseRing,
    a: Matrix,
    p: Option<Matrix>,
    p_inv: Option<Matrix>,
    q: Option<Matrix>,
    q_inv: Option<Matrix>,
}

impl Reducer<'_> {
    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        self.a.swap_rows(i, j);
        if let Some(p) = &mut self.p {
            p.swap_rows(i, j);
        }
        if let Some(pi) = &mut self.p_inv {
            pi.swap_cols(i, j);
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        self.a.swap_cols(i, j);
        if let Some(q) = &mut self.q {
            q.swap_cols(i, j);
        }
        if let Some(qi) = &mut self.q_inv {
            qi.swap_rows(i, j);
        }
    }

    /// `row_i += c * row_j`.
    fn add_row(&mut self, i: usize, j: usize, c: &Elem) {
        self.a.add_row_multiple(i, j, c);
        if let Some(p) = &mut self.p {
            p.add_row_multiple(i, j, c);
        }
        if let Some(pi) = &mut self.p_inv {
            pi.add_col_multiple(j, i, &-c);
        }
    }

    /// `col_i += c * col_j`.
    fn add_col(&mut self, i: usize, j: usize, c: &Elem) {
        self.a.add_col_multiple(i, j, c);
        if let Some(q) = &mut self.q {
            q.add_col_multiple(i, j, c);
        }
        if let Some(qi) = &mut self.q_inv {
            qi.add_row_multiple(j, i, &-c);
        }
    }

    fn combine_rows(&mut self, i: usize, j: usize, g: [Elem; 4]) {
        self.a.combine_rows(i, j, &g);
        if let Some(p) = &mut self.p {
            p.combine_rows(i, j, &g);
        }
        if let Some(pi) = &mut self.p_inv {
            pi.combine_cols(i, j, &inv2(&g));
        }
    }

    fn combine_cols(&mut self, i: usize, j: usize, h: [Elem; 4]) {
        self.a.combine_cols(i, j, &h);
        if let Some(q) = &mut self.q {
            q.combine_cols(i, j, &h);
        }
        if let Some(qi) = &mut self.q_inv {
            qi.combine_rows(i, j, &inv2(&h));
        }
    }

    fn scale_row(&mut self, i: usize, u: &Elem) {
        let uinv = u.inv().expect("unit");
        self.a.scale_row(i, &uinv);
        if let Some(p) = &mut self.p {
            p.scale_row(i, &uinv);
        }
        if let Some(pi) = &mut self.p_inv {
            pi.scale_col(i, u);
        }
    }

    /// Clears column `t` below the pivot. Returns true if the pivot changed.
    fn clear_column(&mut self, t: usize) -> bool {
        let mut changed = false;
        for i in t + 1..self.a.rows() {
            let b = self.a.get(i, t).clone();
            if b.is_zero() {
                continue;
            }
            let p = self.a.get(t, t).clone();
            if let Some(q) = self.ring.div_exact(&b, &p) {
                self.add_row(i, t, &-q);
            } else {
                let (g, s, u) = self.ring.xgcd(&p, &b);
                let pg = self.ring.div_exact(&p, &g).expect("gcd divides");
                let bg = self.ring.div_exact(&b, &g).expect("gcd divides");
                self.combine_rows(t, i, [s, u, -bg, pg]);
                changed = true;
            }
        }
        changed
    }

    fn clear_row(&mut self, t: usize) -> bool {
        let mut changed = false;
        for j in t + 1..self.a.cols() {
            let b = self.a.get(t, j).clone();
            if b.is_zero() {
                continue;
            }
            let p = self.a.get(t, t).clone();
            if let Some(q) = self.ring.div_exact(&b, &p) {
                self.add_col(j, t, &-q);
            } else {
                let (g, s, u) = self.ring.xgcd(&p, &b);
                let pg = self.ring.div_exact(&p, &g).expect("gcd divides");
                let bg = self.ring.div_exact(&b, &g).expect("gcd divides");
                self.combine_cols(t, j, [s, -bg, u, pg]);
                changed = true;
            }
        }
        changed
    }

    fn run(&mut self) -> Vec<Elem> {
        let (m, n) = self.a.shape();
        let mut diag = Vec::new();
        for t in 0..m.min(n) {
            let mut best: Option<(usize, usize, num_bigint::BigInt)> = None;
            for i in t..m {
                for j in t..n {
                    let x = self.a.get(i, j);
                    if x.is_zero() {
                        continue;
                    }
                    let s = self.ring.size(x);
                    if best.as_ref().is_none_or(|b| s < b.2) {
                        best = Some((i, j, s));
                    }
                }
            }
            let Some((bi, bj, _)) = best else { break };
            self.swap_rows(t, bi);
            self.swap_cols(t, bj);
            loop {
                self.clear_column(t);
                self.clear_row(t);
                let col_clear = (t + 1..m).all(|i| self.a.get(i, t).is_zero());
                let row_clear = (t + 1..n).all(|j| self.a.get(t, j).is_zero());
                if !(col_clear && row_clear) {
                    continue;
                }
                let p = self.a.get(t, t).clone();
                let offending = (t + 1..m).find(|&i| (t + 1..n).any(|j| !self.ring.divides(&p, self.a.get(i, j))));
                match offending {
                    Some(i) => self.add_row(t, i, &Elem::one()),
                    None => break,
                }
            }
            let (_, unit) = self.ring.normalize(self.a.get(t, t));
            if !unit.is_one() {
                self.scale_row(t, &unit);
            }
            diag.push(self.a.get(t, t).clone());
        }
        diag
    }
}

/// Smith normal form of a matrix with entries in `ring`.
pub fn smith_normal_form(ring: &BaseRing, a: &Matrix, track: Track) -> Result<Snf> {
    if !a.is_over(ring) {
        return Err(GkError::Domain(format!("matrix has entries outside {ring}")));
    }
    let (m, n) = a.shape();
    let mut r = Reducer {
        ring,
        a: a.clone(),
        p: track.left.then(|| Matrix::identity(m)),
        p_inv: track.left.then(|| Matrix::identity(m)),
        q: track.right.then(|| Matrix::identity(n)),
        q_inv: track.right.then(|| Matrix::identity(n)),
    };
    let diag = r.run();
    Ok(Snf { ring: ring.clone(), shape: (m, n), diag, p: r.p, p_inv: r.p_inv, q: r.q, q_inv: r.q_inv })
}

/// SNF of a [`LatticeMap`] with both transforms recorded.
pub fn smith_normal_form_map(a: &LatticeMap) -> Result<Snf> {
    smith_normal_form(a.ring(), a.matrix(), Track::BOTH)
}

/// A basis of `{x ∈ R^n : A x = 0}` as the columns of the returned matrix.
///
/// Entries of `A` may lie in the fraction field; rows are rescaled first. The
/// returned columns span a saturated direct summand.
pub fn kernel_basis(ring: &BaseRing, a: &Matrix) -> Matrix {
    let n = a.cols();
    if a.rows() == 0 {
        return Matrix::identity(n);
    }
    let scaled = a.clear_row_denominators(ring);
    let snf = smith_normal_form(ring, &scaled, Track::RIGHT).expect("cleared matrix is integral");
    let r = snf.rank();
    snf.q.expect("tracked").col_range(r, n)
}

/// Free rank and non-unit elementary divisors of `coker(A: R^n -> R^m)`.
pub fn cokernel_invariants(ring: &BaseRing, a: &Matrix) -> Result<(usize, Vec<Elem>)> {
    let snf = smith_normal_form(ring, a, Track::NONE)?;
    Ok((a.rows() - snf.rank(), snf.torsion()))
}

/// A basis (as columns) of the `R`-span of the columns of `gens`.
///
/// Entries may lie in the fraction field. The result has full column rank and
/// is in column Hermite form: pivots are canonical and the entries to the left
/// of each pivot are reduced modulo it, so repeated spans stay small.
pub fn column_span(ring: &BaseRing, gens: &Matrix) -> Matrix {
    let m = gens.rows();
    if gens.cols() == 0 || gens.is_zero() {
        return Matrix::zeros(m, 0);
    }
    let d = gens.clearing_denominator(ring);
    let de = Elem::from_bigint(d.clone());
    let dinv = de.inv().unwrap();
    let mut a = gens.scale(&de);
    let n = a.cols();
    let mut k = 0;
    for r in 0..m {
        if k == n {
            break;
        }
        for c in k + 1..n {
            let b = a.get(r, c).clone();
            if b.is_zero() {
                continue;
            }
            let p = a.get(r, k).clone();
            if p.is_zero() {
                a.swap_cols(k, c);
                continue;
            }
            let (g, s, t) = ring.xgcd(&p, &b);
            let pg = ring.div_exact(&p, &g).expect("gcd divides");
            let bg = ring.div_exact(&b, &g).expect("gcd divides");
            a.combine_cols(k, c, &[s, -bg, t, pg]);
        }
        let p = a.get(r, k).clone();
        if p.is_zero() {
            continue;
        }
        let (assoc, unit) = ring.normalize(&p);
        if !unit.is_one() {
            a.scale_col(k, &unit.inv().expect("unit"));
        }
        for j in 0..k {
            let x = a.get(r, j).clone();
            let red = ring.reduce_mod(&x, &assoc);
            if red != x {
                let q = ring.div_exact(&(&x - &red), &assoc).expect("remainder");
                a.add_col_multiple(j, k, &-q);
            }
        }
        k += 1;
    }
    a.col_range(0, k).scale(&dinv)
}

/// Solves `A X = B` over `ring` column by column. Returns `None` if some
/// column has no solution with entries in `ring`.
pub fn solve(ring: &BaseRing, a: &Matrix, b: &Matrix) -> Option<Matrix> {
    assert_eq!(a.rows(), b.rows(), "solve: row mismatch");
    let n = a.cols();
    if b.cols() == 0 {
        return Some(Matrix::zeros(n, 0));
    }
    let d = a.clearing_denominator(ring);
    let de = Elem::from_bigint(d);
    let a2 = a.scale(&de);
    let b2 = b.scale(&de);
    let snf = smith_normal_form(ring, &a2, Track::BOTH).ok()?;
    let p = snf.p.as_ref().unwrap();
    let q = snf.q.as_ref().unwrap();
    let y = p * &b2;
    let r = snf.rank();
    let mut z = Matrix::zeros(n, b.cols());
    for c in 0..b.cols() {
        for i in 0..a.rows() {
            let yi = y.get(i, c);
            if i < r {
                let zi = ring.div_exact(yi, &snf.diag[i])?;
                z.set(i, c, zi);
            } else if !yi.is_zero() {
                return None;
            }
        }
    }
    Some(q * &z)
}

pub fn solve_vec(ring: &BaseRing, a: &Matrix, b: &[Elem]) -> Option<Vec<Elem>> {
    solve(ring, a, &Matrix::from_column(b)).map(|x| x.column(0))
}

/// True when `m` is square, defined over `ring`, and has unit determinant.
pub fn is_unimodular(ring: &BaseRing, m: &Matrix) -> bool {
    if m.rows() == 0 && m.cols() == 0 {
        return true;
    }
    m.is_square() && m.is_over(ring) && ring.is_unit(&m.determinant())
}

/// Elementary divisors of a square change-of-basis matrix, for certificates.
pub fn divisors(ring: &BaseRing, m: &Matrix) -> Result<Vec<Elem>> {
    Ok(smith_normal_form(ring, m, Track::NONE)?.full_diagonal())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_snf(ring: &BaseRing, a: &Matrix) {
        let s = smith_normal_form(ring, a, Track::BOTH).unwrap();
        let (p, q) = (s.p.as_ref().unwrap(), s.q.as_ref().unwrap());
        assert_eq!(&(p * a) * q, s.d_matrix());
        assert!((p * s.p_inv.as_ref().unwrap()).is_identity());
        assert!((q * s.q_inv.as_ref().unwrap()).is_identity());
        assert_eq!(&(s.u().unwrap() * &s.d_matrix()) * s.v().unwrap(), *a);
        for w in s.diag.windows(2) {
            assert!(ring.divides(&w[0], &w[1]));
        }
    }

    #[test]
    fn small_integer_example() {
        let a = Matrix::from_i64(&[&[2, 4], &[6, 8]]);
        let s = smith_normal_form(&BaseRing::Integers, &a, Track::BOTH).unwrap();
        assert_eq!(s.diag, vec![Elem::from_int(2), Elem::from_int(4)]);
        check_snf(&BaseRing::Integers, &a);
    }

    #[test]
    fn zero_and_identity() {
        let z = Matrix::zeros(2, 3);
        assert!(smith_normal_form(&BaseRing::Integers, &z, Track::BOTH).unwrap().diag.is_empty());
        let s = smith_normal_form(&BaseRing::Integers, &Matrix::identity(3), Track::BOTH).unwrap();
        assert_eq!(s.diag, vec![Elem::one(); 3]);
    }

    #[test]
    fn other_rings() {
        let zi = BaseRing::GaussianIntegers;
        let a = Matrix::from_rows(vec![
            vec![Elem::gaussian(2, 0), Elem::gaussian(1, 1)],
            vec![Elem::gaussian(0, 3), Elem::gaussian(1, -1)],
        ])
        .unwrap();
        check_snf(&zi, &a);
        let z6 = BaseRing::localized(&[2, 3]).unwrap();
        let b = Matrix::from_rows(vec![
            vec![Elem::from_ratio(5, 2), Elem::from_int(10)],
            vec![Elem::from_int(6), Elem::from_ratio(7, 9)],
        ])
        .unwrap();
        check_snf(&z6, &b);
        check_snf(&BaseRing::Rationals, &b);
    }

    #[test]
    fn kernel_and_cokernel() {
        let k = kernel_basis(&BaseRing::Integers, &Matrix::from_i64(&[&[1, 1]]));
        assert_eq!(k.cols(), 1);
        let v = k.column(0);
        assert_eq!(&v[0] + &v[1], Elem::zero());
        assert!(v[0].to_i64().unwrap().abs() == 1);
        assert_eq!(kernel_basis(&BaseRing::Integers, &Matrix::identity(3)).cols(), 0);
        assert_eq!(cokernel_invariants(&BaseRing::Integers, &Matrix::from_i64(&[&[2]])).unwrap(), (0, vec![Elem::from_int(2)]));
        assert_eq!(cokernel_invariants(&BaseRing::Rationals, &Matrix::from_i64(&[&[2]])).unwrap(), (0, vec![]));
        assert_eq!(
            cokernel_invariants(&BaseRing::GaussianIntegers, &Matrix::from_i64(&[&[2]])).unwrap().1,
            vec![Elem::from_int(2)]
        );
    }

    #[test]
    fn span_and_solve() {
        let g = Matrix::from_rows(vec![vec![Elem::from_ratio(1, 2), Elem::from_int(1)], vec![Elem::zero(), Elem::from_int(2)]])
            .unwrap();
        let b = column_span(&BaseRing::Integers, &g);
        assert_eq!(b.cols(), 2);
        assert_eq!(b.determinant().re().abs(), num_rational::BigRational::from_integer(1.into()));
        let x = solve_vec(&BaseRing::Integers, &g, &[Elem::from_int(1), Elem::from_int(2)]).unwrap();
        assert_eq!(g.mul_vec(&x), vec![Elem::from_int(1), Elem::from_int(2)]);
        assert!(solve_vec(&BaseRing::Integers, &Matrix::from_i64(&[&[2]]), &[Elem::one()]).is_none());
    }

    use num_traits::Signed;
}
