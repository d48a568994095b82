//! K-modules for split tori and split SL₂-type groups, encoded by weight
//! gradings and divided-power operators, with the comodule closures.

use std::collections::BTreeSet;

use crate::error::{GkError, Result};
use crate::lattice::Lattice;
use crate::lie::LieAlgebra;
use crate::matrix::Matrix;
use crate::pbw::{divided_power_check, nilpotency_order};
use crate::ring::{BaseRing, Elem, RingMap};

pub type Weight = Vec<i64>;

/// The supported group schemes K.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum GroupDatum {
    Trivial,
    /// A split torus of the given rank.
    Torus { rank: usize },
    /// A split reductive group of semisimple rank one: maximal torus of rank
    /// `torus_rank`, one positive root `root` and its coroot.
    Chevalley { torus_rank: usize, root: Weight, coroot: Weight },
}

impl GroupDatum {
    /// The SL₂ datum: rank-one torus, root 2, coroot 1.
    pub fn sl2() -> Self {
        GroupDatum::Chevalley { torus_rank: 1, root: vec![2], coroot: vec![1] }
    }

    pub fn torus_rank(&self) -> usize {
        match self {
            GroupDatum::Trivial => 0,
            GroupDatum::Torus { rank } => *rank,
            GroupDatum::Chevalley { torus_rank, .. } => *torus_rank,
        }
    }

    pub fn is_diagonalizable(&self) -> bool {
        !matches!(self, GroupDatum::Chevalley { .. })
    }

    /// Basis labels of Lie(K): `H1..Hr` for a torus, `(e, H1..Hr, f)` for the
    /// Chevalley datum.
    pub fn lie_labels(&self) -> Vec<String> {
        let hs = (1..=self.torus_rank()).map(|k| format!("H{k}"));
        match self {
            GroupDatum::Chevalley { .. } => {
                std::iter::once("e".to_string()).chain(hs).chain(std::iter::once("f".to_string())).collect()
            }
            _ => hs.collect(),
        }
    }

    pub fn lie_dim(&self) -> usize {
        self.lie_labels().len()
    }

    /// Lie(K) as a Lie algebra over `ring`.
    pub fn lie_algebra(&self, ring: &BaseRing) -> LieAlgebra {
        match self {
            GroupDatum::Chevalley { torus_rank, root, coroot } => {
                let r = *torus_rank;
                let mut triples = Vec::new();
                for k in 0..r {
                    triples.push((k + 1, 0, 0, Elem::from_int(root[k])));
                    triples.push((k + 1, r + 1, r + 1, Elem::from_int(-root[k])));
                    triples.push((0, r + 1, k + 1, Elem::from_int(coroot[k])));
                }
                LieAlgebra::from_triples(ring.clone(), self.lie_labels(), &triples).expect("valid Chevalley datum")
            }
            _ => LieAlgebra::abelian(ring.clone(), self.lie_labels()),
        }
    }

    /// Weight of each basis vector of Lie(K) under the adjoint action.
    pub fn lie_weights(&self) -> Vec<Weight> {
        let r = self.torus_rank();
        match self {
            GroupDatum::Chevalley { root, .. } => {
                let mut w = vec![root.clone()];
                w.extend(std::iter::repeat_n(vec![0; r], r));
                w.push(root.iter().map(|x| -x).collect());
                w
            }
            _ => vec![vec![0; r]; r],
        }
    }

    fn check_weight(&self, w: &Weight) -> Result<()> {
        if w.len() != self.torus_rank() {
            return Err(GkError::Validation(format!("weight {w:?} has wrong length for torus of rank {}", self.torus_rank())));
        }
        Ok(())
    }
}

pub fn add_weights(a: &[i64], b: &[i64]) -> Weight {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub_weights(a: &[i64], b: &[i64]) -> Weight {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn pairing(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Raising and lowering operators with their divided powers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootOperators {
    pub e: Matrix,
    pub f: Matrix,
    /// `e^{(j)}` for `0 <= j < nilpotency order`.
    pub e_div: Vec<Matrix>,
    pub f_div: Vec<Matrix>,
}

impl RootOperators {
    fn certify(ring: &BaseRing, e: Matrix, f: Matrix) -> Result<Self> {
        let cert = |n: &Matrix, name: &str| -> Result<Vec<Matrix>> {
            let m = nilpotency_order(n).ok_or_else(|| GkError::Validation(format!("{name} is not nilpotent")))?;
            let d = divided_power_check(ring, n, m)?;
            match d.witness {
                None => Ok(d.powers),
                Some((j, c, r)) => Err(GkError::Validation(format!(
                    "divided power {name}^({j}) is not integral at column {c}, row {r}"
                ))),
            }
        };
        let e_div = cert(&e, "e")?;
        let f_div = cert(&f, "f")?;
        Ok(RootOperators { e, f, e_div, f_div })
    }
}

/// A K-module on a free module with a weight-homogeneous basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KModule {
    ring: BaseRing,
    group: GroupDatum,
    labels: Vec<String>,
    weights: Vec<Weight>,
    ops: Option<RootOperators>,
}

impl KModule {
    pub fn trivial(ring: BaseRing, labels: Vec<String>) -> Self {
        let n = labels.len();
        KModule { ring, group: GroupDatum::Trivial, labels, weights: vec![vec![]; n], ops: None }
    }

    pub fn torus(ring: BaseRing, rank: usize, labels: Vec<String>, weights: Vec<Weight>) -> Result<Self> {
        let group = GroupDatum::Torus { rank };
        Self::check_common(&group, &labels, &weights)?;
        Ok(KModule { ring, group, labels, weights, ops: None })
    }

    /// A module for the Chevalley datum; validates support conditions, divided
    /// powers and the commutator `[e, f] = ⟨μ, α∨⟩` on each weight space.
    pub fn chevalley(ring: BaseRing, group: GroupDatum, labels: Vec<String>, weights: Vec<Weight>, e: Matrix, f: Matrix) -> Result<Self> {
        Self::check_common(&group, &labels, &weights)?;
        let GroupDatum::Chevalley { root, coroot, .. } = &group else {
            return Err(GkError::Validation("operators given for a diagonalizable group".into()));
        };
        let n = labels.len();
        if e.shape() != (n, n) || f.shape() != (n, n) {
            return Err(GkError::Validation("operator shape mismatch".into()));
        }
        for (op, shift, name) in [(&e, root.clone(), "e"), (&f, root.iter().map(|x| -x).collect::<Weight>(), "f")] {
            for i in 0..n {
                for j in 0..n {
                    if !op.get(i, j).is_zero() && weights[i] != add_weights(&weights[j], &shift) {
                        return Err(GkError::Validation(format!(
                            "{name} does not shift weight {:?} by {shift:?} (entry {i},{j})",
                            weights[j]
                        )));
                    }
                }
            }
            if !op.is_over(&ring) {
                return Err(GkError::Validation(format!("{name} has entries outside {ring}")));
            }
        }
        let comm = e.commutator(&f);
        let want = Matrix::diagonal(&weights.iter().map(|w| Elem::from_int(pairing(w, coroot))).collect::<Vec<_>>());
        if comm != want {
            return Err(GkError::Validation("[e, f] does not act by the coroot pairing".into()));
        }
        let ops = RootOperators::certify(&ring, e, f)?;
        Ok(KModule { ring, group, labels, weights, ops: Some(ops) })
    }

    fn check_common(group: &GroupDatum, labels: &[String], weights: &[Weight]) -> Result<()> {
        if labels.len() != weights.len() {
            return Err(GkError::Validation("labels and weights differ in length".into()));
        }
        for w in weights {
            group.check_weight(w)?;
        }
        Ok(())
    }

    /// Builds the structure for `group` from a Lie(K)-action, reading off the
    /// weights from the diagonal torus part.
    pub fn from_parts(ring: BaseRing, group: GroupDatum, labels: Vec<String>, weights: Vec<Weight>, ops: Option<(Matrix, Matrix)>) -> Result<Self> {
        match (&group, ops) {
            (GroupDatum::Chevalley { .. }, Some((e, f))) => KModule::chevalley(ring, group, labels, weights, e, f),
            (GroupDatum::Chevalley { .. }, None) => Err(GkError::Validation("Chevalley module needs operators".into())),
            (GroupDatum::Torus { rank }, _) => KModule::torus(ring, *rank, labels, weights),
            (GroupDatum::Trivial, _) => Ok(KModule::trivial(ring, labels)),
        }
    }

    pub fn ring(&self) -> &BaseRing {
        &self.ring
    }

    pub fn group(&self) -> &GroupDatum {
        &self.group
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn weights(&self) -> &[Weight] {
        &self.weights
    }

    pub fn operators(&self) -> Option<&RootOperators> {
        self.ops.as_ref()
    }

    pub fn distinct_weights(&self) -> Vec<Weight> {
        self.weights.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect()
    }

    pub fn indices_of_weight(&self, mu: &[i64]) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.weights[i] == mu).collect()
    }

    pub fn weight_projection(&self, mu: &[i64]) -> Matrix {
        let d: Vec<Elem> = self.weights.iter().map(|w| if w == mu { Elem::one() } else { Elem::zero() }).collect();
        Matrix::diagonal(&d)
    }

    /// Action of the basis element `xi` of Lie(K).
    pub fn lie_action(&self, xi: usize) -> Matrix {
        let r = self.group.torus_rank();
        let diag = |k: usize| Matrix::diagonal(&self.weights.iter().map(|w| Elem::from_int(w[k])).collect::<Vec<_>>());
        match (&self.group, &self.ops) {
            (GroupDatum::Chevalley { .. }, Some(ops)) => {
                if xi == 0 {
                    ops.e.clone()
                } else if xi == r + 1 {
                    ops.f.clone()
                } else {
                    diag(xi - 1)
                }
            }
            _ => diag(xi),
        }
    }

    /// Weight projections and all divided powers `e^{(j)}`, `f^{(j)}`, `j >= 1`.
    pub fn closure_operators(&self) -> Vec<Matrix> {
        let mut out: Vec<Matrix> = self.distinct_weights().iter().map(|mu| self.weight_projection(mu)).collect();
        if let Some(ops) = &self.ops {
            out.extend(ops.e_div.iter().skip(1).cloned());
            out.extend(ops.f_div.iter().skip(1).cloned());
        }
        out
    }

    /// True when the lattice is stable under all closure operators.
    pub fn is_subcomodule(&self, l: &Lattice) -> bool {
        self.closure_operators().iter().all(|op| l.contains(&l.image(op)))
    }

    /// The K-module structure on a subcomodule, in a weight-homogeneous basis
    /// of the lattice. Returns the structure and the basis (columns).
    pub fn restrict_to(&self, l: &Lattice) -> Result<(KModule, Matrix)> {
        if !self.is_subcomodule(l) {
            return Err(GkError::Validation("lattice is not a subcomodule".into()));
        }
        let (basis, weights) = homogeneous_basis(self, l);
        let labels = (0..basis.cols()).map(|i| format!("b{i}")).collect();
        let sub = Lattice::from_basis_unchecked(l.ring(), basis.clone());
        let ops = match &self.ops {
            Some(o) => Some((
                sub.coordinates_matrix(&(&o.e * &basis)).ok_or_else(|| GkError::Inconsistency("e leaves subcomodule".into()))?,
                sub.coordinates_matrix(&(&o.f * &basis)).ok_or_else(|| GkError::Inconsistency("f leaves subcomodule".into()))?,
            )),
            None => None,
        };
        let m = KModule::from_parts(l.ring().clone(), self.group.clone(), labels, weights, ops)?;
        Ok((m, basis))
    }

    pub fn direct_sum(&self, other: &KModule) -> Result<KModule> {
        if self.group != other.group || self.ring != other.ring {
            return Err(GkError::Domain("direct sum of modules for different groups".into()));
        }
        let labels = self.labels.iter().map(|l| format!("{l}.0")).chain(other.labels.iter().map(|l| format!("{l}.1"))).collect();
        let weights = self.weights.iter().chain(&other.weights).cloned().collect();
        let ops = match (&self.ops, &other.ops) {
            (Some(a), Some(b)) => Some((a.e.block_diag(&b.e), a.f.block_diag(&b.f))),
            _ => None,
        };
        KModule::from_parts(self.ring.clone(), self.group.clone(), labels, weights, ops)
    }

    /// Tensor product with basis index `i * other.dim() + j`.
    pub fn tensor(&self, other: &KModule) -> Result<KModule> {
        if self.group != other.group || self.ring != other.ring {
            return Err(GkError::Domain("tensor of modules for different groups".into()));
        }
        let mut labels = Vec::new();
        let mut weights = Vec::new();
        for i in 0..self.dim() {
            for j in 0..other.dim() {
                labels.push(format!("{}*{}", self.labels[i], other.labels[j]));
                weights.push(add_weights(&self.weights[i], &other.weights[j]));
            }
        }
        let ops = match (&self.ops, &other.ops) {
            (Some(a), Some(b)) => {
                let (i1, i2) = (Matrix::identity(self.dim()), Matrix::identity(other.dim()));
                Some((&a.e.kron(&i2) + &i1.kron(&b.e), &a.f.kron(&i2) + &i1.kron(&b.f)))
            }
            _ => None,
        };
        KModule::from_parts(self.ring.clone(), self.group.clone(), labels, weights, ops)
    }

    pub fn base_change(&self, f: &RingMap) -> Result<KModule> {
        let ops = match &self.ops {
            Some(o) => Some((o.e.apply_ring_map(f)?, o.f.apply_ring_map(f)?)),
            None => None,
        };
        KModule::from_parts(f.target().clone(), self.group.clone(), self.labels.clone(), self.weights.clone(), ops)
    }

    /// Same module regarded over the trivial group.
    pub fn forget_group(&self) -> KModule {
        KModule::trivial(self.ring.clone(), self.labels.clone())
    }
}

/// A weight-homogeneous basis of a graded sublattice, with its weights.
pub fn homogeneous_basis(v: &KModule, l: &Lattice) -> (Matrix, Vec<Weight>) {
    let mut cols = Matrix::zeros(v.dim(), 0);
    let mut weights = Vec::new();
    for mu in v.distinct_weights() {
        let part = l.image(&v.weight_projection(&mu));
        for _ in 0..part.rank() {
            weights.push(mu.clone());
        }
        cols = cols.hstack(part.basis());
    }
    (cols, weights)
}

/// The smallest subcomodule over `coeff` containing the vectors `s`.
///
/// `coeff` may be smaller than the ring of `v`, e.g. a ℤ-form inside a
/// ℚ-module.
pub fn generated_subcomodule(v: &KModule, s: &[Vec<Elem>], coeff: &BaseRing) -> Lattice {
    let n = v.dim();
    let mut l = Lattice::from_vectors(coeff, n, s);
    let ops = v.closure_operators();
    loop {
        let mut gens = l.basis().clone();
        for op in &ops {
            gens = gens.hstack(&(op * l.basis()));
        }
        let next = Lattice::span(coeff, &gens);
        if next.rank() == l.rank() && l.contains(&next) {
            return l;
        }
        l = next;
    }
}

/// The largest subcomodule contained in `v0`.
pub fn maximal_subcomodule(v: &KModule, v0: &Lattice) -> Lattice {
    let ops = v.closure_operators();
    let mut l = v0.clone();
    loop {
        let mut next = l.clone();
        for op in &ops {
            next = next.preimage(op, &l);
        }
        if next.rank() == l.rank() && next.contains(&l) {
            return l;
        }
        l = next;
    }
}

/// `V^K`: weight zero, and killed by `e` and `f` in the Chevalley case.
pub fn invariants_k(v: &KModule) -> Lattice {
    let n = v.dim();
    let ring = v.ring();
    match v.group() {
        GroupDatum::Trivial => Lattice::full(ring, n),
        _ => {
            let zero = vec![0; v.group().torus_rank()];
            let idx = v.indices_of_weight(&zero);
            let incl = Matrix::identity(n).select_cols(&idx);
            let mut k = Lattice::from_basis_unchecked(ring, incl.clone());
            if let Some(ops) = v.operators() {
                let sys = (&ops.e * &incl).vstack(&(&ops.f * &incl));
                let ker = crate::snf::kernel_basis(ring, &sys);
                k = Lattice::span(ring, &(&incl * &ker));
            }
            k
        }
    }
}

/// `Hom(V, V')` with basis index `i' * V.dim() + j` for the matrix unit
/// sending `v_j` to `v'_{i'}`.
pub fn internal_hom_k(v: &KModule, vp: &KModule) -> Result<KModule> {
    if v.group() != vp.group() || v.ring() != vp.ring() {
        return Err(GkError::Domain("internal Hom of modules for different groups".into()));
    }
    let mut labels = Vec::new();
    let mut weights = Vec::new();
    for i in 0..vp.dim() {
        for j in 0..v.dim() {
            labels.push(format!("{}<-{}", vp.labels[i], v.labels[j]));
            weights.push(sub_weights(&vp.weights[i], &v.weights[j]));
        }
    }
    let ops = match (v.operators(), vp.operators()) {
        (Some(a), Some(b)) => {
            let (i1, i2) = (Matrix::identity(v.dim()), Matrix::identity(vp.dim()));
            let act = |x: &Matrix, xp: &Matrix| &xp.kron(&i1) - &i2.kron(&x.transpose());
            Some((act(&a.e, &b.e), act(&a.f, &b.f)))
        }
        _ => None,
    };
    KModule::from_parts(v.ring().clone(), v.group().clone(), labels, weights, ops).map_err(|e| match e {
        GkError::Validation(m) => GkError::Inconsistency(format!("internal Hom certification failed: {m}")),
        other => other,
    })
}

/// `Hom_K(V, V')` as a kernel inside `Hom(V, V')`, in the basis of
/// [`internal_hom_k`].
pub fn hom_k(v: &KModule, vp: &KModule) -> Result<Lattice> {
    let h = internal_hom_k(v, vp)?;
    Ok(invariants_k(&h))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models;

    fn e(n: i64) -> Elem {
        Elem::from_int(n)
    }

    #[test]
    fn torus_generated_subcomodule() {
        let v = KModule::torus(BaseRing::Integers, 1, vec!["a".into(), "b".into()], vec![vec![1], vec![3]]).unwrap();
        let l = generated_subcomodule(&v, &[vec![e(1), e(2)]], &BaseRing::Integers);
        assert_eq!(l, Lattice::diagonal(&BaseRing::Integers, &[e(1), e(2)]));
        assert!(generated_subcomodule(&v, &[], &BaseRing::Integers).is_zero());
    }

    #[test]
    fn torus_maximal_subcomodule() {
        let v = KModule::torus(BaseRing::Integers, 1, vec!["a".into(), "b".into()], vec![vec![1], vec![3]]).unwrap();
        let line = Lattice::from_vectors(&BaseRing::Integers, 2, &[vec![e(1), e(1)]]);
        assert!(maximal_subcomodule(&v, &line).is_zero());
        let full = Lattice::full(&BaseRing::Integers, 2);
        assert_eq!(maximal_subcomodule(&v, &full), full);
    }

    #[test]
    fn sl2_maximal_subcomodule() {
        let v = models::weyl_lattice(BaseRing::Integers, 2).k_module().unwrap();
        let v0 = Lattice::diagonal(&BaseRing::Integers, &[e(1), e(1), e(2)]);
        let m = maximal_subcomodule(&v, &v0);
        assert_eq!(m, Lattice::diagonal(&BaseRing::Integers, &[e(2), e(1), e(2)]));
    }

    #[test]
    fn invariants() {
        let t = KModule::trivial(BaseRing::Integers, vec!["a".into(), "b".into(), "c".into()]);
        assert_eq!(invariants_k(&t).rank(), 3);
        let v = models::weyl_lattice(BaseRing::Integers, 2).k_module().unwrap();
        assert!(invariants_k(&v).is_zero());
        let w = KModule::torus(BaseRing::Integers, 1, vec!["a".into(), "z".into()], vec![vec![2], vec![0]]).unwrap();
        assert_eq!(invariants_k(&w), Lattice::diagonal(&BaseRing::Integers, &[e(0), e(1)]));
    }

    #[test]
    fn internal_hom_invariants_are_scalars() {
        let v = models::weyl_lattice(BaseRing::Integers, 2).k_module().unwrap();
        let h = hom_k(&v, &v).unwrap();
        assert_eq!(h.rank(), 1);
        let id: Vec<Elem> = (0..9).map(|k| if k % 4 == 0 { e(1) } else { e(0) }).collect();
        assert!(h.contains_vec(&id));
    }

    #[test]
    fn dual_negates_weights() {
        let v = models::weyl_lattice(BaseRing::Integers, 2).k_module().unwrap();
        let one = KModule::chevalley(
            BaseRing::Integers,
            GroupDatum::sl2(),
            vec!["1".into()],
            vec![vec![0]],
            Matrix::zeros(1, 1),
            Matrix::zeros(1, 1),
        )
        .unwrap();
        let d = internal_hom_k(&v, &one).unwrap();
        assert_eq!(d.weights(), &[vec![-2], vec![0], vec![2]]);
        let ops = v.operators().unwrap();
        assert_eq!(d.operators().unwrap().e, -&ops.e.transpose());
    }

    #[test]
    fn bad_divided_powers_rejected() {
        let e_bad = Matrix::from_i64(&[&[0, 1, 0], &[0, 0, 1], &[0, 0, 0]]);
        let f_bad = Matrix::from_i64(&[&[0, 0, 0], &[2, 0, 0], &[0, 2, 0]]);
        let r = KModule::chevalley(
            BaseRing::Integers,
            GroupDatum::sl2(),
            vec!["a".into(), "b".into(), "c".into()],
            vec![vec![2], vec![0], vec![-2]],
            e_bad,
            f_bad,
        );
        assert!(r.is_err());
    }
}
