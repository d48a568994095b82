//! Standard Lie algebras, pairs, maps and modules used throughout the crate.

use std::sync::Arc;

use crate::kmodule::{GroupDatum, Weight};
use crate::lie::LieAlgebra;
use crate::matrix::Matrix;
use crate::pair::{GKModule, GroupMap, PairDatum, PairMap};
use crate::ring::{BaseRing, Elem};

fn labels(s: &[&str]) -> Vec<String> {
    s.iter().map(|x| x.to_string()).collect()
}

fn col(entries: &[i64]) -> Matrix {
    Matrix::from_fn(entries.len(), 1, |i, _| Elem::from_int(entries[i]))
}

/// sl₂ on the basis (e, h, f) with [h,e] = 2e, [h,f] = -2f, [e,f] = h.
pub fn sl2(ring: BaseRing) -> LieAlgebra {
    let t = |i, j, k, c| (i, j, k, Elem::from_int(c));
    LieAlgebra::from_triples(ring, labels(&["e", "h", "f"]), &[t(1, 0, 0, 2), t(1, 2, 2, -2), t(0, 2, 1, 1)])
        .expect("sl2 is a Lie algebra")
}

/// gl₂ on the basis (E11, E12, E21, E22).
pub fn gl2(ring: BaseRing) -> LieAlgebra {
    let t = |i, j, k, c| (i, j, k, Elem::from_int(c));
    LieAlgebra::from_triples(
        ring,
        labels(&["E11", "E12", "E21", "E22"]),
        &[t(0, 1, 1, 1), t(0, 2, 2, -1), t(1, 2, 0, 1), t(1, 2, 3, -1), t(1, 3, 1, 1), t(2, 3, 2, -1)],
    )
    .expect("gl2 is a Lie algebra")
}

/// Abelian Lie algebra of rank `n` with basis `x0, x1, ...`.
pub fn abelian(ring: BaseRing, n: usize) -> LieAlgebra {
    LieAlgebra::abelian(ring, (0..n).map(|i| format!("x{i}")).collect())
}

/// `(sl₂, T)` with T the diagonal torus.
pub fn sl2_torus_pair(ring: BaseRing) -> Arc<PairDatum> {
    Arc::new(
        PairDatum::new("sl2,T", sl2(ring), GroupDatum::Torus { rank: 1 }, vec![vec![2], vec![0], vec![-2]], col(&[0, 1, 0]))
            .expect("valid pair"),
    )
}

/// `(sl₂, SL₂)`.
pub fn sl2_pair(ring: BaseRing) -> Arc<PairDatum> {
    Arc::new(
        PairDatum::new("sl2,SL2", sl2(ring), GroupDatum::sl2(), vec![vec![2], vec![0], vec![-2]], Matrix::identity(3))
            .expect("valid pair"),
    )
}

/// `(b̄, T)` with b̄ = ⟨h, f⟩.
pub fn borel_lower_pair(ring: BaseRing) -> Arc<PairDatum> {
    let b = sl2(ring).restrict_to(&[1, 2]).expect("b̄ is a subalgebra");
    Arc::new(PairDatum::new("bbar,T", b, GroupDatum::Torus { rank: 1 }, vec![vec![0], vec![-2]], col(&[1, 0])).expect("valid pair"))
}

/// `(b, T)` with b = ⟨e, h⟩.
pub fn borel_upper_pair(ring: BaseRing) -> Arc<PairDatum> {
    let b = sl2(ring).restrict_to(&[0, 1]).expect("b is a subalgebra");
    Arc::new(PairDatum::new("b,T", b, GroupDatum::Torus { rank: 1 }, vec![vec![2], vec![0]], col(&[0, 1])).expect("valid pair"))
}

/// `(gl₂, T²)` with the diagonal torus.
pub fn gl2_torus_pair(ring: BaseRing) -> Arc<PairDatum> {
    let psi = Matrix::from_i64(&[&[1, 0], &[0, 0], &[0, 0], &[0, 1]]);
    Arc::new(
        PairDatum::new(
            "gl2,T2",
            gl2(ring),
            GroupDatum::Torus { rank: 2 },
            vec![vec![0, 0], vec![1, -1], vec![-1, 1], vec![0, 0]],
            psi,
        )
        .expect("valid pair"),
    )
}

/// `(gl₂, T¹)` with the rank-one torus through `E11 - E22`.
pub fn gl2_rank_one_pair(ring: BaseRing) -> Arc<PairDatum> {
    Arc::new(
        PairDatum::new("gl2,T1", gl2(ring), GroupDatum::Torus { rank: 1 }, vec![vec![0], vec![2], vec![-2], vec![0]], col(&[1, 0, 0, -1]))
            .expect("valid pair"),
    )
}

/// The integral model of the pair for U(1,1): `(gl₂, T²)` regarded with the
/// θ-stable parabolic q = ⟨E11, E12, E22⟩ and ū = ⟨E21⟩.
pub fn gl2_parabolic_pair(ring: BaseRing) -> Arc<PairDatum> {
    let q = gl2(ring).restrict_to(&[0, 1, 3]).expect("q is a subalgebra");
    let psi = Matrix::from_i64(&[&[1, 0], &[0, 0], &[0, 1]]);
    Arc::new(
        PairDatum::new("q,T2", q, GroupDatum::Torus { rank: 2 }, vec![vec![0, 0], vec![1, -1], vec![0, 0]], psi).expect("valid pair"),
    )
}

/// `(q, T¹)` with the rank-one torus through `E11 - E22`.
pub fn gl2_parabolic_rank_one_pair(ring: BaseRing) -> Arc<PairDatum> {
    let q = gl2(ring).restrict_to(&[0, 1, 3]).expect("q is a subalgebra");
    Arc::new(PairDatum::new("q,T1", q, GroupDatum::Torus { rank: 1 }, vec![vec![0], vec![2], vec![0]], col(&[1, 0, -1])).expect("valid pair"))
}

/// `(h_r, T_r)`: abelian Lie algebra equal to the Lie algebra of a split torus.
pub fn torus_pair(ring: BaseRing, r: usize) -> Arc<PairDatum> {
    let h = LieAlgebra::abelian(ring, (1..=r).map(|k| format!("H{k}")).collect());
    Arc::new(PairDatum::new(&format!("h{r},T{r}"), h, GroupDatum::Torus { rank: r }, vec![vec![0; r]; r], Matrix::identity(r)).expect("valid pair"))
}

/// `(a, 1)`: abelian Lie algebra of rank `n` with trivial group.
pub fn abelian_pair(ring: BaseRing, n: usize) -> Arc<PairDatum> {
    Arc::new(PairDatum::new(&format!("ab{n},1"), abelian(ring, n), GroupDatum::Trivial, vec![vec![]; n], Matrix::zeros(n, 0)).expect("valid pair"))
}

/// `(g, 1)` for an arbitrary Lie algebra.
pub fn lie_pair(g: LieAlgebra) -> Arc<PairDatum> {
    let n = g.dim();
    Arc::new(PairDatum::new("g,1", g, GroupDatum::Trivial, vec![vec![]; n], Matrix::zeros(n, 0)).expect("valid pair"))
}

/// The trivial pair `(0, 1)`.
pub fn trivial_pair(ring: BaseRing) -> Arc<PairDatum> {
    Arc::new(PairDatum::new("0,1", LieAlgebra::abelian(ring, vec![]), GroupDatum::Trivial, vec![], Matrix::zeros(0, 0)).expect("valid pair"))
}

/// `(b̄, T) -> (sl₂, SL₂)` with complement ⟨e⟩.
pub fn borel_weil_map(ring: BaseRing) -> PairMap {
    let src = borel_lower_pair(ring.clone());
    let tgt = sl2_pair(ring);
    let lie = Matrix::from_i64(&[&[0, 0], &[1, 0], &[0, 1]]);
    PairMap::new(src, tgt, lie, GroupMap::TorusIntoChevalley, Some(col(&[1, 0, 0]))).expect("valid map")
}

/// `(b̄, T) -> (sl₂, T)` with complement ⟨e⟩.
pub fn lower_borel_inclusion(ring: BaseRing) -> PairMap {
    let src = borel_lower_pair(ring.clone());
    let tgt = sl2_torus_pair(ring);
    let lie = Matrix::from_i64(&[&[0, 0], &[1, 0], &[0, 1]]);
    PairMap::new(src, tgt, lie, GroupMap::Identity, Some(col(&[1, 0, 0]))).expect("valid map")
}

/// `(b, T) -> (sl₂, T)` with complement ⟨f⟩.
pub fn upper_borel_inclusion(ring: BaseRing) -> PairMap {
    let src = borel_upper_pair(ring.clone());
    let tgt = sl2_torus_pair(ring);
    let lie = Matrix::from_i64(&[&[1, 0], &[0, 1], &[0, 0]]);
    PairMap::new(src, tgt, lie, GroupMap::Identity, Some(col(&[0, 0, 1]))).expect("valid map")
}

/// `(sl₂, T) -> (sl₂, SL₂)`, the Zuckerman setting.
pub fn sl2_zuckerman_map(ring: BaseRing) -> PairMap {
    PairMap::new(sl2_torus_pair(ring.clone()), sl2_pair(ring), Matrix::identity(3), GroupMap::TorusIntoChevalley, Some(Matrix::zeros(3, 0)))
        .expect("valid map")
}

/// `(gl₂, T¹) -> (gl₂, T²)` restricting characters along `(a, b) ↦ a - b`.
pub fn gl2_torus_zuckerman_map(ring: BaseRing) -> PairMap {
    PairMap::new(
        gl2_rank_one_pair(ring.clone()),
        gl2_torus_pair(ring),
        Matrix::identity(4),
        GroupMap::TorusRestriction(vec![vec![1, -1]]),
        Some(Matrix::zeros(4, 0)),
    )
    .expect("valid map")
}

/// `(q, T²) -> (gl₂, T²)` with complement ⟨E21⟩.
pub fn gl2_parabolic_inclusion(ring: BaseRing) -> PairMap {
    let lie = Matrix::from_i64(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 0], &[0, 0, 1]]);
    PairMap::new(gl2_parabolic_pair(ring.clone()), gl2_torus_pair(ring), lie, GroupMap::Identity, Some(col(&[0, 0, 1, 0])))
        .expect("valid map")
}

/// `(q, T¹) -> (gl₂, T²)`: the parabolic inclusion followed by enlarging the
/// torus, with complement ⟨E21⟩.
pub fn gl2_parabolic_torus_map(ring: BaseRing) -> PairMap {
    let lie = Matrix::from_i64(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 0], &[0, 0, 1]]);
    PairMap::new(
        gl2_parabolic_rank_one_pair(ring.clone()),
        gl2_torus_pair(ring),
        lie,
        GroupMap::TorusRestriction(vec![vec![1, -1]]),
        Some(col(&[0, 0, 1, 0])),
    )
    .expect("valid map")
}

/// `(g, M) -> (0, 1)`.
pub fn to_trivial_map(pair: Arc<PairDatum>) -> PairMap {
    let ring = pair.ring().clone();
    let n = pair.g().dim();
    PairMap::new(pair, trivial_pair(ring), Matrix::zeros(0, n), GroupMap::ToTrivial, None).expect("valid map")
}

/// Structure matrices of the integral sl₂-module with basis
/// `v_n, v_{n-2}, ..., v_{-n}`: `E v_{n-2i} = (n-i+1) v_{n-2i+2}`,
/// `F v_{n-2i} = (i+1) v_{n-2i-2}`, `H v_m = m v_m`.
pub fn weyl_matrices(n: usize) -> (Matrix, Matrix, Matrix) {
    let d = n + 1;
    let mut e = Matrix::zeros(d, d);
    let mut f = Matrix::zeros(d, d);
    let mut h = Matrix::zeros(d, d);
    for i in 0..d {
        h.set(i, i, Elem::from_int(n as i64 - 2 * i as i64));
        if i > 0 {
            e.set(i - 1, i, Elem::from_int((n - i + 1) as i64));
        }
        if i + 1 < d {
            f.set(i + 1, i, Elem::from_int(i as i64 + 1));
        }
    }
    (e, h, f)
}

pub fn weyl_weights(n: usize) -> Vec<Weight> {
    (0..=n).map(|i| vec![n as i64 - 2 * i as i64]).collect()
}

/// The integral sl₂-module of highest weight `n` over any pair whose Lie
/// algebra is sl₂ in the basis (e, h, f).
pub fn weyl_lattice_over(pair: Arc<PairDatum>, n: usize) -> GKModule {
    let (e, h, f) = weyl_matrices(n);
    let labels = (0..=n).map(|i| format!("v{}", n as i64 - 2 * i as i64)).collect();
    GKModule::new(pair, labels, weyl_weights(n), vec![e, h, f]).expect("valid module")
}

/// The same lattice over `(sl₂, SL₂)`.
pub fn weyl_lattice(ring: BaseRing, n: usize) -> GKModule {
    weyl_lattice_over(sl2_pair(ring), n)
}

/// `Sym^n` of the standard representation over `ring` on the monomial basis
/// `x^{n-i} y^i`, over `(sl₂, SL₂)`. With `ring = Q` this is `V(n) ⊗ Q`.
pub fn symmetric_power(ring: BaseRing, n: usize) -> GKModule {
    let d = n + 1;
    let mut e = Matrix::zeros(d, d);
    let mut f = Matrix::zeros(d, d);
    let mut h = Matrix::zeros(d, d);
    for i in 0..d {
        h.set(i, i, Elem::from_int(n as i64 - 2 * i as i64));
        if i > 0 {
            // x d/dy
            e.set(i - 1, i, Elem::from_int(i as i64));
        }
        if i + 1 < d {
            // y d/dx
            f.set(i + 1, i, Elem::from_int((n - i) as i64));
        }
    }
    let labels = (0..=n).map(|i| format!("x^{}y^{}", n - i, i)).collect();
    GKModule::new(sl2_pair(ring), labels, weyl_weights(n), vec![e, h, f]).expect("valid module")
}

/// The rank-one (b̄, T)-module where `h` acts by `lambda` and `f` by zero.
pub fn borel_character(ring: BaseRing, lambda: i64) -> GKModule {
    GKModule::character(borel_lower_pair(ring), vec![lambda], vec![Elem::from_int(lambda), Elem::zero()]).expect("valid character")
}

/// The rank-one (b, T)-module where `h` acts by `lambda` and `e` by zero.
pub fn upper_borel_character(ring: BaseRing, lambda: i64) -> GKModule {
    GKModule::character(borel_upper_pair(ring), vec![lambda], vec![Elem::zero(), Elem::from_int(lambda)]).expect("valid character")
}

/// The standard representation of gl₂ over `(gl₂, T²)`.
pub fn gl2_standard(ring: BaseRing) -> GKModule {
    let unit = |i: usize, j: usize| Matrix::from_fn(2, 2, |r, c| if r == i && c == j { Elem::one() } else { Elem::zero() });
    GKModule::new(gl2_torus_pair(ring), labels(&["x", "y"]), vec![vec![1, 0], vec![0, 1]], vec![unit(0, 0), unit(0, 1), unit(1, 0), unit(1, 1)])
        .expect("valid module")
}

/// The character of `(q, T²)` with `E11 ↦ a`, `E22 ↦ b`.
pub fn parabolic_character(ring: BaseRing, a: i64, b: i64) -> GKModule {
    GKModule::character(gl2_parabolic_pair(ring), vec![a, b], vec![Elem::from_int(a), Elem::zero(), Elem::from_int(b)]).expect("valid character")
}

/// The character of `(q, T¹)` with `E11 ↦ a`, `E22 ↦ b`.
pub fn parabolic_rank_one_character(ring: BaseRing, a: i64, b: i64) -> GKModule {
    GKModule::character(gl2_parabolic_rank_one_pair(ring), vec![a - b], vec![Elem::from_int(a), Elem::zero(), Elem::from_int(b)])
        .expect("valid character")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weyl_lattices_are_chevalley_modules() {
        for n in 0..6 {
            let v = weyl_lattice(BaseRing::Integers, n);
            v.k_module().unwrap();
        }
    }

    #[test]
    fn maps_validate() {
        let r = BaseRing::Integers;
        borel_weil_map(r.clone());
        lower_borel_inclusion(r.clone());
        upper_borel_inclusion(r.clone());
        sl2_zuckerman_map(r.clone());
        gl2_torus_zuckerman_map(r.clone());
        gl2_parabolic_inclusion(r.clone());
        gl2_parabolic_torus_map(r.clone());
        gl2_standard(r.clone());
        parabolic_character(r.clone(), 2, -1);
        parabolic_rank_one_character(r.clone(), 2, -1);
        to_trivial_map(sl2_torus_pair(r));
    }
}
