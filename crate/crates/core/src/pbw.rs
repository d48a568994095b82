//! The enveloping algebra in a PBW basis, and divided powers of nilpotent maps.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::error::{GkError, Result};
use crate::lie::LieAlgebra;
use crate::matrix::Matrix;
use crate::ring::{BaseRing, Elem};

/// Exponent vector relative to the ordered basis of the Lie algebra.
pub type Monomial = Vec<u32>;

pub fn degree(m: &[u32]) -> usize {
    m.iter().map(|&e| e as usize).sum()
}

/// An element of `U(g)` in the PBW basis.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct UElem {
    terms: BTreeMap<Monomial, Elem>,
}

impl UElem {
    pub fn zero() -> Self {
        UElem::default()
    }

    pub fn one(dim: usize) -> Self {
        UElem::monomial(vec![0; dim], Elem::one())
    }

    pub fn monomial(m: Monomial, c: Elem) -> Self {
        let mut u = UElem::zero();
        u.add_term(m, &c);
        u
    }

    pub fn generator(dim: usize, i: usize) -> Self {
        let mut m = vec![0; dim];
        m[i] = 1;
        UElem::monomial(m, Elem::one())
    }

    /// Embeds a Lie algebra element given in coordinates.
    pub fn from_lie(x: &[Elem]) -> Self {
        let mut u = UElem::zero();
        for (i, c) in x.iter().enumerate() {
            let mut m = vec![0; x.len()];
            m[i] = 1;
            u.add_term(m, c);
        }
        u
    }

    pub fn add_term(&mut self, m: Monomial, c: &Elem) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                *v += c;
                if v.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c.clone());
            }
        }
    }

    pub fn add_scaled(&mut self, other: &UElem, c: &Elem) {
        if c.is_zero() {
            return;
        }
        for (m, x) in &other.terms {
            self.add_term(m.clone(), &(x * c));
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Elem)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &[u32]) -> Elem {
        self.terms.get(m).cloned().unwrap_or_else(Elem::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(|m| degree(m)).max().unwrap_or(0)
    }

    pub fn scale(&self, c: &Elem) -> UElem {
        let mut out = UElem::zero();
        out.add_scaled(self, c);
        out
    }

    pub fn sub(&self, other: &UElem) -> UElem {
        let mut out = self.clone();
        out.add_scaled(other, &Elem::from_int(-1));
        out
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

impl fmt::Debug for UElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for UElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(m, c)| format!("{c}*{m:?}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// PBW straightening for a fixed Lie algebra and a mandatory degree cap.
pub struct Pbw<'a> {
    lie: &'a LieAlgebra,
    cap: usize,
    memo: RefCell<HashMap<(usize, Monomial), UElem>>,
}

impl<'a> Pbw<'a> {
    pub fn new(lie: &'a LieAlgebra, cap: usize) -> Self {
        Pbw { lie, cap, memo: RefCell::new(HashMap::new()) }
    }

    pub fn lie(&self) -> &LieAlgebra {
        self.lie
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn dim(&self) -> usize {
        self.lie.dim()
    }

    /// `x_a · m`, straightened.
    pub fn left_mult(&self, a: usize, m: &[u32]) -> Result<UElem> {
        if degree(m) + 1 > self.cap {
            return Err(GkError::CapExceeded { cap: self.cap });
        }
        let key = (a, m.to_vec());
        if let Some(u) = self.memo.borrow().get(&key) {
            return Ok(u.clone());
        }
        let first = m.iter().position(|&e| e > 0);
        let result = match first {
            Some(b) if b < a => {
                // x_a x_b R = x_b (x_a R) + [x_a, x_b] R
                let mut rest = m.to_vec();
                rest[b] -= 1;
                let inner = self.left_mult(a, &rest)?;
                let mut out = self.left_mult_elem(b, &inner)?;
                for (k, c) in self.lie.bracket_basis(a, b).iter().enumerate() {
                    if !c.is_zero() {
                        out.add_scaled(&self.left_mult(k, &rest)?, c);
                    }
                }
                out
            }
            _ => {
                let mut mm = m.to_vec();
                mm[a] += 1;
                UElem::monomial(mm, Elem::one())
            }
        };
        self.memo.borrow_mut().insert(key, result.clone());
        Ok(result)
    }

    pub fn left_mult_elem(&self, a: usize, u: &UElem) -> Result<UElem> {
        let mut out = UElem::zero();
        for (m, c) in u.terms() {
            out.add_scaled(&self.left_mult(a, m)?, c);
        }
        Ok(out)
    }

    /// Product of a monomial with an arbitrary element.
    pub fn monomial_times(&self, m: &[u32], v: &UElem) -> Result<UElem> {
        let mut acc = v.clone();
        for i in (0..m.len()).rev() {
            for _ in 0..m[i] {
                acc = self.left_mult_elem(i, &acc)?;
            }
        }
        Ok(acc)
    }

    pub fn mul(&self, u: &UElem, v: &UElem) -> Result<UElem> {
        let mut out = UElem::zero();
        for (m, c) in u.terms() {
            out.add_scaled(&self.monomial_times(m, v)?, c);
        }
        Ok(out)
    }

    /// Straightens the word `x_{w_0} x_{w_1} ... x_{w_l}`.
    pub fn straighten(&self, word: &[usize]) -> Result<UElem> {
        if word.len() > self.cap {
            return Err(GkError::CapExceeded { cap: self.cap });
        }
        let mut acc = UElem::one(self.dim());
        for &i in word.iter().rev() {
            acc = self.left_mult_elem(i, &acc)?;
        }
        Ok(acc)
    }

    /// `[x, u] = xu - ux` for `x` in the Lie algebra.
    pub fn adjoint_action(&self, x: &[Elem], u: &UElem) -> Result<UElem> {
        let xu = UElem::from_lie(x);
        Ok(self.mul(&xu, u)?.sub(&self.mul(u, &xu)?))
    }

    /// All monomials of degree at most `cap` in the given basis indices.
    pub fn monomials_in(&self, indices: &[usize], cap: usize) -> Vec<Monomial> {
        monomials_in(self.dim(), indices, cap)
    }
}

/// All exponent vectors supported on `indices` with total degree `<= cap`,
/// ordered by degree and then lexicographically.
pub fn monomials_in(dim: usize, indices: &[usize], cap: usize) -> Vec<Monomial> {
    let mut out = Vec::new();
    fn rec(idx: &[usize], left: usize, cur: &mut Monomial, out: &mut Vec<Monomial>) {
        match idx.split_first() {
            None => out.push(cur.clone()),
            Some((&i, rest)) => {
                for e in 0..=left {
                    cur[i] = e as u32;
                    rec(rest, left - e, cur, out);
                }
                cur[i] = 0;
            }
        }
    }
    rec(indices, cap, &mut vec![0; dim], &mut out);
    out.sort_by(|a, b| degree(a).cmp(&degree(b)).then_with(|| b.cmp(a)));
    out
}

/// Result of [`divided_power_check`].
#[derive(Clone, Debug)]
pub struct DividedPowers {
    /// `N^{(j)} = N^j / j!` for `j < m`, present only on success.
    pub powers: Vec<Matrix>,
    /// On failure: `(j, column, row)` of an entry of `N^{(j)}` outside the ring.
    pub witness: Option<(usize, usize, usize)>,
}

impl DividedPowers {
    pub fn passed(&self) -> bool {
        self.witness.is_none()
    }
}

/// Checks that `N^j / j!` preserves the standard lattice for every `j < m`.
pub fn divided_power_check(ring: &BaseRing, n: &Matrix, m: usize) -> Result<DividedPowers> {
    if !n.is_square() {
        return Err(GkError::Precondition("operator is not square".into()));
    }
    if !n.pow(m as u32).is_zero() {
        return Err(GkError::Precondition(format!("operator is not nilpotent of order {m}")));
    }
    let mut powers = Vec::with_capacity(m);
    let mut cur = Matrix::identity(n.rows());
    for j in 0..m {
        if j > 0 {
            cur = (&cur * n).scale(&Elem::from_int(j as i64).inv().unwrap());
        }
        for r in 0..cur.rows() {
            for c in 0..cur.cols() {
                if !ring.contains(cur.get(r, c)) {
                    return Ok(DividedPowers { powers: Vec::new(), witness: Some((j, c, r)) });
                }
            }
        }
        powers.push(cur.clone());
    }
    Ok(DividedPowers { powers, witness: None })
}

/// Nilpotency order: the least `m` with `N^m = 0`, if at most `n.rows() + 1`.
pub fn nilpotency_order(n: &Matrix) -> Option<usize> {
    let mut cur = Matrix::identity(n.rows());
    for m in 0..=n.rows() + 1 {
        if cur.is_zero() {
            return Some(m);
        }
        cur = &cur * n;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models;

    fn mono(e: &[u32]) -> Monomial {
        e.to_vec()
    }

    #[test]
    fn sl2_examples() {
        let l = models::sl2(BaseRing::Integers);
        let p = Pbw::new(&l, 6);
        // (f, e) -> ef - h
        let u = p.straighten(&[2, 0]).unwrap();
        assert_eq!(u.coeff(&mono(&[1, 0, 1])), Elem::one());
        assert_eq!(u.coeff(&mono(&[0, 1, 0])), Elem::from_int(-1));
        assert_eq!(u.len(), 2);
        // (e, e, f) already ordered
        assert_eq!(p.straighten(&[0, 0, 2]).unwrap(), UElem::monomial(mono(&[2, 0, 1]), Elem::one()));
        // (h, e) -> eh + 2e
        let u = p.straighten(&[1, 0]).unwrap();
        assert_eq!(u.coeff(&mono(&[1, 1, 0])), Elem::one());
        assert_eq!(u.coeff(&mono(&[1, 0, 0])), Elem::from_int(2));
    }

    #[test]
    fn adjoint_examples() {
        let l = models::sl2(BaseRing::Integers);
        let p = Pbw::new(&l, 8);
        let h = l.unit_vector(1);
        for n in 0..5u32 {
            let fn_ = UElem::monomial(mono(&[0, 0, n]), Elem::one());
            let r = p.adjoint_action(&h, &fn_).unwrap();
            assert_eq!(r, fn_.scale(&Elem::from_int(-2 * n as i64)));
        }
        let e = l.unit_vector(0);
        let f2 = UElem::monomial(mono(&[0, 0, 2]), Elem::one());
        let r = p.adjoint_action(&e, &f2).unwrap();
        // 2fh - 2f = 2hf + 2f in the (e, h, f) order
        let mut want = UElem::monomial(mono(&[0, 1, 1]), Elem::from_int(2));
        want.add_term(mono(&[0, 0, 1]), &Elem::from_int(2));
        assert_eq!(r, want);
        assert!(p.adjoint_action(&e, &UElem::one(3)).unwrap().is_zero());
    }

    #[test]
    fn cap_is_enforced() {
        let l = models::sl2(BaseRing::Integers);
        let p = Pbw::new(&l, 2);
        assert!(matches!(p.straighten(&[0, 1, 2]), Err(GkError::CapExceeded { cap: 2 })));
    }

    #[test]
    fn divided_powers() {
        let z = BaseRing::Integers;
        // V(2): basis (v2, v0, v-2), E v-2 = v0, E v0 = 2 v2
        let e = Matrix::from_i64(&[&[0, 2, 0], &[0, 0, 1], &[0, 0, 0]]);
        let d = divided_power_check(&z, &e, 3).unwrap();
        assert!(d.passed());
        assert_eq!(d.powers[2].get(0, 2), &Elem::one());
        let bad = Matrix::from_i64(&[&[0, 1, 0], &[0, 0, 1], &[0, 0, 0]]);
        let d = divided_power_check(&z, &bad, 3).unwrap();
        assert_eq!(d.witness, Some((2, 2, 0)));
        assert!(divided_power_check(&z, &Matrix::from_i64(&[&[0, 1], &[0, 0]]), 2).unwrap().passed());
        assert!(divided_power_check(&z, &Matrix::identity(1), 3).is_err());
    }

    #[test]
    fn monomial_enumeration() {
        let ms = monomials_in(3, &[0, 2], 2);
        assert_eq!(ms.len(), 6);
        assert_eq!(ms[0], vec![0, 0, 0]);
    }
}
