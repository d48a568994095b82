//! Lie algebras given by structure constants on a free basis.

use std::fmt;

use crate::error::{GkError, Result};
use crate::matrix::Matrix;
use crate::ring::{BaseRing, Elem, RingMap};
use crate::snf::{is_unimodular, solve};

/// A Lie algebra over a base ring, free on `labels`, with
/// `[x_i, x_j] = Σ_k c[i][j][k] x_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LieAlgebra {
    ring: BaseRing,
    labels: Vec<String>,
    consts: Vec<Vec<Vec<Elem>>>,
}

/// First failure found by [`validate_lie`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LieViolation {
    NotInRing { i: usize, j: usize, k: usize },
    Alternating { i: usize },
    Antisymmetry { i: usize, j: usize },
    Jacobi { i: usize, j: usize, k: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LieReport {
    pub violation: Option<LieViolation>,
    pub labels: Vec<String>,
}

impl LieReport {
    pub fn passed(&self) -> bool {
        self.violation.is_none()
    }

    /// 1-based indices of the violating triple for a Jacobi failure.
    pub fn jacobi_triple(&self) -> Option<(usize, usize, usize)> {
        match self.violation {
            Some(LieViolation::Jacobi { i, j, k }) => Some((i + 1, j + 1, k + 1)),
            _ => None,
        }
    }
}

impl fmt::Display for LieReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let l = |i: usize| self.labels.get(i).cloned().unwrap_or_else(|| format!("#{i}"));
        match &self.violation {
            None => write!(f, "pass"),
            Some(LieViolation::NotInRing { i, j, k }) => {
                write!(f, "structure constant c[{}][{}][{}] not in base ring", l(*i), l(*j), l(*k))
            }
            Some(LieViolation::Alternating { i }) => write!(f, "[{0},{0}] != 0", l(*i)),
            Some(LieViolation::Antisymmetry { i, j }) => write!(f, "[{0},{1}] != -[{1},{0}]", l(*i), l(*j)),
            Some(LieViolation::Jacobi { i, j, k }) => write!(
                f,
                "Jacobi identity fails on triple ({}, {}, {}) = ({}, {}, {})",
                i + 1,
                j + 1,
                k + 1,
                l(*i),
                l(*j),
                l(*k)
            ),
        }
    }
}

impl LieAlgebra {
    /// Builds the algebra from sparse triples `(i, j, k, c)` meaning
    /// `[x_i, x_j] += c x_k`. A pair `(i, j)` given without its mirror `(j, i)`
    /// gets the antisymmetric value filled in. No validation is done.
    pub fn from_triples_unchecked(ring: BaseRing, labels: Vec<String>, triples: &[(usize, usize, usize, Elem)]) -> Result<Self> {
        let n = labels.len();
        let mut consts = vec![vec![vec![Elem::zero(); n]; n]; n];
        let mut given = vec![vec![false; n]; n];
        for (i, j, k, c) in triples {
            if *i >= n || *j >= n || *k >= n {
                return Err(GkError::Parse(format!("structure constant index ({i}, {j}, {k}) out of range")));
            }
            consts[*i][*j][*k] += c;
            given[*i][*j] = true;
        }
        for i in 0..n {
            for j in 0..n {
                if given[i][j] && !given[j][i] {
                    consts[j][i] = consts[i][j].iter().map(|x| -x).collect();
                }
            }
        }
        Ok(LieAlgebra { ring, labels, consts })
    }

    /// As [`Self::from_triples_unchecked`] followed by [`validate_lie`].
    pub fn from_triples(ring: BaseRing, labels: Vec<String>, triples: &[(usize, usize, usize, Elem)]) -> Result<Self> {
        let l = Self::from_triples_unchecked(ring, labels, triples)?;
        let report = validate_lie(&l);
        if !report.passed() {
            return Err(GkError::Validation(report.to_string()));
        }
        Ok(l)
    }

    /// Builds from dense constants and validates.
    pub fn from_dense(ring: BaseRing, labels: Vec<String>, consts: Vec<Vec<Vec<Elem>>>) -> Result<Self> {
        let l = LieAlgebra { ring, labels, consts };
        let report = validate_lie(&l);
        if !report.passed() {
            return Err(GkError::Validation(report.to_string()));
        }
        Ok(l)
    }

    pub fn abelian(ring: BaseRing, labels: Vec<String>) -> Self {
        let n = labels.len();
        LieAlgebra { ring, labels, consts: vec![vec![vec![Elem::zero(); n]; n]; n] }
    }

    pub fn ring(&self) -> &BaseRing {
        &self.ring
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// `[x_i, x_j]` in coordinates.
    pub fn bracket_basis(&self, i: usize, j: usize) -> &[Elem] {
        &self.consts[i][j]
    }

    pub fn bracket(&self, x: &[Elem], y: &[Elem]) -> Vec<Elem> {
        let n = self.dim();
        let mut out = vec![Elem::zero(); n];
        for (i, a) in x.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in y.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let ab = a * b;
                for (k, c) in self.consts[i][j].iter().enumerate() {
                    if !c.is_zero() {
                        out[k] += &(&ab * c);
                    }
                }
            }
        }
        out
    }

    /// Matrix of `ad(x_i)`; column `j` holds `[x_i, x_j]`.
    pub fn ad_basis(&self, i: usize) -> Matrix {
        let n = self.dim();
        Matrix::from_fn(n, n, |k, j| self.consts[i][j][k].clone())
    }

    pub fn ad(&self, x: &[Elem]) -> Matrix {
        let n = self.dim();
        let mut out = Matrix::zeros(n, n);
        for (i, a) in x.iter().enumerate() {
            if !a.is_zero() {
                out = &out + &self.ad_basis(i).scale(a);
            }
        }
        out
    }

    pub fn unit_vector(&self, i: usize) -> Vec<Elem> {
        let mut v = vec![Elem::zero(); self.dim()];
        v[i] = Elem::one();
        v
    }

    pub fn is_abelian(&self) -> bool {
        self.consts.iter().flatten().flatten().all(Elem::is_zero)
    }

    /// Sparse triples `(i, j, k, c)` with `i < j`, in lexicographic order.
    pub fn triples(&self) -> Vec<(usize, usize, usize, Elem)> {
        let n = self.dim();
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                for k in 0..n {
                    if !self.consts[i][j][k].is_zero() {
                        out.push((i, j, k, self.consts[i][j][k].clone()));
                    }
                }
            }
        }
        out
    }

    /// The same algebra in a new basis given by the columns of `b`, which must
    /// be unimodular over the base ring.
    pub fn change_basis(&self, b: &Matrix, labels: Vec<String>) -> Result<Self> {
        let n = self.dim();
        if b.shape() != (n, n) || labels.len() != n || !is_unimodular(&self.ring, b) {
            return Err(GkError::Validation("change of basis is not unimodular".into()));
        }
        let cols: Vec<Vec<Elem>> = (0..n).map(|j| b.column(j)).collect();
        let mut brackets = Matrix::zeros(n, n * n);
        for a in 0..n {
            for c in 0..n {
                let v = self.bracket(&cols[a], &cols[c]);
                for (k, x) in v.into_iter().enumerate() {
                    brackets.set(k, a * n + c, x);
                }
            }
        }
        let coords = solve(&self.ring, b, &brackets).ok_or_else(|| GkError::Inconsistency("basis change failed".into()))?;
        let consts =
            (0..n).map(|a| (0..n).map(|c| (0..n).map(|k| coords.get(k, a * n + c).clone()).collect()).collect()).collect();
        Ok(LieAlgebra { ring: self.ring.clone(), labels, consts })
    }

    /// True when the columns of `m` (coordinates in `self`) define a Lie
    /// homomorphism from `src`.
    pub fn is_homomorphism_from(&self, src: &LieAlgebra, m: &Matrix) -> bool {
        if m.shape() != (self.dim(), src.dim()) {
            return false;
        }
        for i in 0..src.dim() {
            for j in 0..src.dim() {
                let lhs = m.mul_vec(src.bracket_basis(i, j));
                let rhs = self.bracket(&m.column(i), &m.column(j));
                if lhs != rhs {
                    return false;
                }
            }
        }
        true
    }

    pub fn base_change(&self, f: &RingMap) -> Result<Self> {
        if f.source() != &self.ring {
            return Err(GkError::Domain(format!("Lie algebra over {} but map from {}", self.ring, f.source())));
        }
        let consts = self
            .consts
            .iter()
            .map(|a| a.iter().map(|b| b.iter().map(|x| f.apply(x)).collect::<Result<Vec<_>>>()).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Ok(LieAlgebra { ring: f.target().clone(), labels: self.labels.clone(), consts })
    }

    /// Subalgebra on a subset of basis vectors, if that subset is closed.
    pub fn restrict_to(&self, idx: &[usize]) -> Result<Self> {
        let labels = idx.iter().map(|&i| self.labels[i].clone()).collect();
        let mut consts = vec![vec![vec![Elem::zero(); idx.len()]; idx.len()]; idx.len()];
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                for (k, c) in self.consts[i][j].iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    let Some(pos) = idx.iter().position(|&t| t == k) else {
                        return Err(GkError::Validation(format!(
                            "[{}, {}] leaves the span",
                            self.labels[i], self.labels[j]
                        )));
                    };
                    consts[a][b][pos] = c.clone();
                }
            }
        }
        Ok(LieAlgebra { ring: self.ring.clone(), labels, consts })
    }
}

/// Checks alternation, antisymmetry and the Jacobi identity exactly.
pub fn validate_lie(l: &LieAlgebra) -> LieReport {
    let n = l.dim();
    let report = |v| LieReport { violation: Some(v), labels: l.labels.clone() };
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if !l.ring.contains(&l.consts[i][j][k]) {
                    return report(LieViolation::NotInRing { i, j, k });
                }
            }
        }
    }
    for i in 0..n {
        if l.consts[i][i].iter().any(|x| !x.is_zero()) {
            return report(LieViolation::Alternating { i });
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            if (0..n).any(|k| &l.consts[i][j][k] + &l.consts[j][i][k] != Elem::zero()) {
                return report(LieViolation::Antisymmetry { i, j });
            }
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let (xi, xj, xk) = (l.unit_vector(i), l.unit_vector(j), l.unit_vector(k));
                let a = l.bracket(&xi, &l.bracket(&xj, &xk));
                let b = l.bracket(&xj, &l.bracket(&xk, &xi));
                let c = l.bracket(&xk, &l.bracket(&xi, &xj));
                if a.iter().zip(&b).zip(&c).any(|((x, y), z)| !(&(x + y) + z).is_zero()) {
                    return report(LieViolation::Jacobi { i, j, k });
                }
            }
        }
    }
    LieReport { violation: None, labels: l.labels.clone() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models;

    fn labels(s: &[&str]) -> Vec<String> {
        s.iter().map(|x| x.to_string()).collect()
    }

    #[test]
    fn sl2_passes() {
        let l = models::sl2(BaseRing::Integers);
        assert!(validate_lie(&l).passed());
        assert_eq!(l.bracket_basis(1, 0), &[Elem::from_int(2), Elem::zero(), Elem::zero()]);
        assert_eq!(l.bracket_basis(0, 2), &[Elem::zero(), Elem::one(), Elem::zero()]);
    }

    #[test]
    fn abelian_passes() {
        assert!(validate_lie(&LieAlgebra::abelian(BaseRing::Integers, labels(&["a", "b", "c"]))).passed());
    }

    #[test]
    fn jacobi_failure_reports_triple() {
        let one = Elem::one();
        let l = LieAlgebra::from_triples_unchecked(
            BaseRing::Integers,
            labels(&["x1", "x2", "x3"]),
            &[(0, 1, 0, one.clone()), (1, 2, 0, one.clone()), (0, 2, 1, one)],
        )
        .unwrap();
        let r = validate_lie(&l);
        assert_eq!(r.jacobi_triple(), Some((1, 2, 3)));
        assert!(r.to_string().contains("(1, 2, 3)"));
    }

    #[test]
    fn change_of_basis_round_trip() {
        let l = models::sl2(BaseRing::Integers);
        // reorder to (f, h, e)
        let b = Matrix::from_i64(&[&[0, 0, 1], &[0, 1, 0], &[1, 0, 0]]);
        let l2 = l.change_basis(&b, labels(&["f", "h", "e"])).unwrap();
        assert!(validate_lie(&l2).passed());
        assert_eq!(l2.bracket_basis(2, 0), &[Elem::zero(), Elem::one(), Elem::zero()]);
        assert!(l.is_homomorphism_from(&l2, &b));
    }
}
