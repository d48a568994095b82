//! Base change along ring maps and certificates comparing both sides.

use std::fmt;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::cohomology::{compute_cohomology, CochainComplex, CohomologyReport};
use crate::error::{GkError, Result};
use crate::functors::{i_functor, iso_evidence, WeightWindow};
use crate::kmodule::{invariants_k, KModule};
use crate::lattice::Lattice;
use crate::matrix::Matrix;
use crate::pair::{hom_space_gk, validate_pair_module, GKModule, PairMap};
use crate::ring::{Elem, RingMap};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Statement {
    ThmB,
    ThmC,
    ThmDInstance,
    VariantG1,
    VariantG2,
    Lemma328,
    Cor314,
}

impl fmt::Display for Statement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Statement::ThmB => "ThmB",
            Statement::ThmC => "ThmC",
            Statement::ThmDInstance => "ThmD-instance",
            Statement::VariantG1 => "VariantG1",
            Statement::VariantG2 => "VariantG2",
            Statement::Lemma328 => "Lemma328",
            Statement::Cor314 => "Cor314",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Iso,
    NotIso,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComparisonCertificate {
    pub tag: Statement,
    pub instance: String,
    pub instance_hash: String,
    pub ring_map: String,
    pub lhs_rank: usize,
    pub rhs_rank: usize,
    /// The connecting map in the chosen bases (target coordinates).
    pub map: Option<Matrix>,
    pub divisors: Vec<Elem>,
    pub verdict: Verdict,
    /// False when the hypotheses of the statement fail; the map is still
    /// computed but nothing is claimed.
    pub claimed: bool,
    pub notes: Vec<String>,
}

impl ComparisonCertificate {
    fn new(tag: Statement, instance: String, f: &RingMap) -> Self {
        let hash = hex::encode(Sha256::digest(format!("{tag}|{f}|{instance}").as_bytes()));
        ComparisonCertificate {
            tag,
            instance,
            instance_hash: hash,
            ring_map: f.to_string(),
            lhs_rank: 0,
            rhs_rank: 0,
            map: None,
            divisors: vec![],
            verdict: Verdict::NotIso,
            claimed: true,
            notes: vec![],
        }
    }

    pub fn is_iso(&self) -> bool {
        self.verdict == Verdict::Iso
    }

    /// Informational certificates carry no claim.
    pub fn is_downgraded(&self) -> bool {
        !self.claimed
    }
}

impl fmt::Display for ComparisonCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d: Vec<String> = self.divisors.iter().map(|x| x.to_string()).collect();
        write!(
            f,
            "{} [{}] {} ranks {}/{} divisors [{}] {}{}",
            self.tag,
            &self.instance_hash[..12],
            self.ring_map,
            self.lhs_rank,
            self.rhs_rank,
            d.join(", "),
            if self.is_iso() { "iso" } else { "not iso" },
            if self.claimed { "" } else { " (informational)" }
        )
    }
}

fn check_map(f: &RingMap) -> Result<()> {
    if !f.is_flat() && !f.is_finite_projective() {
        return Err(GkError::UnsupportedRingMap(f.to_string()));
    }
    Ok(())
}

fn is_variant(f: &RingMap) -> bool {
    f.is_finite_projective() && !f.is_identity()
}

/// `V ⊗ k'`, validated.
pub fn base_change_module(f: &RingMap, v: &GKModule) -> Result<GKModule> {
    check_map(f)?;
    let out = v.base_change(f)?;
    let report = validate_pair_module(&out);
    if !report.passed() {
        return Err(GkError::Inconsistency(format!("base change broke the module: {report}")));
    }
    Ok(out)
}

/// Restriction of scalars along `ℤ -> ℤ[i]`, over the pair `pair` whose base
/// change carries `v`.
pub fn restrict_scalars(f: &RingMap, pair: std::sync::Arc<crate::pair::PairDatum>, v: &GKModule) -> Result<GKModule> {
    if f.rank_if_finite() != 2 {
        return Err(GkError::UnsupportedRingMap(format!("restriction of scalars along {f}")));
    }
    if !v.is_closed() {
        return Err(GkError::Unsupported("restriction of a windowed module".into()));
    }
    let labels = v.labels().iter().flat_map(|l| [l.clone(), format!("i{l}")]).collect();
    let weights = v.weights().iter().flat_map(|w| [w.clone(), w.clone()]).collect();
    let action = v.action().iter().map(Matrix::realify).collect();
    GKModule::new(pair, labels, weights, action).map_err(|e| GkError::Inconsistency(format!("restriction of scalars: {e}")))
}

/// `Hom_{g,K}(X, Y) ⊗ k' -> Hom(X ⊗ k', Y ⊗ k')`.
pub fn verify_hom_base_change(f: &RingMap, x: &GKModule, y: &GKModule) -> Result<ComparisonCertificate> {
    check_map(f)?;
    let tag = if is_variant(f) { Statement::VariantG1 } else { Statement::ThmB };
    let mut cert = ComparisonCertificate::new(tag, format!("Hom({:?}, {:?}) over {}", x.labels(), y.labels(), x.pair().name()), f);
    if !x.is_closed() {
        cert.claimed = false;
        cert.notes.push("source is a window truncation, not finitely generated".into());
    }
    let lhs = hom_space_gk(x, y)?;
    let rhs = hom_space_gk(&x.base_change(f)?, &y.base_change(f)?)?;
    let images = lhs.basis().apply_ring_map(f)?;
    fill(&mut cert, &rhs, &images, lhs.rank());
    Ok(cert)
}

fn fill(cert: &mut ComparisonCertificate, dst: &Lattice, images: &Matrix, src_rank: usize) {
    let ev = iso_evidence(dst, images, src_rank);
    cert.lhs_rank = ev.lhs_rank;
    cert.rhs_rank = ev.rhs_rank;
    cert.map = dst.coordinates_matrix(images);
    cert.divisors = ev.divisors;
    cert.verdict = if ev.iso { Verdict::Iso } else { Verdict::NotIso };
}

/// `V^K ⊗ k' -> (V ⊗ k')^K`.
pub fn verify_invariants_base_change(f: &RingMap, v: &KModule) -> Result<ComparisonCertificate> {
    check_map(f)?;
    let mut cert = ComparisonCertificate::new(Statement::Lemma328, format!("invariants of {:?}", v.labels()), f);
    if !f.is_flat() {
        cert.claimed = false;
    }
    let lhs = invariants_k(v);
    let rhs = invariants_k(&v.base_change(f)?);
    let images = lhs.basis().apply_ring_map(f)?;
    fill(&mut cert, &rhs, &images, lhs.rank());
    Ok(cert)
}

/// `ι: I(W) ⊗ k' -> I(W ⊗ k')` on a window. Both sides live in the same
/// coordinates of the window of `pro`; `ι` is read off there.
pub fn comparison_iota(f: &RingMap, pm: &PairMap, w: &GKModule, window: &WeightWindow) -> Result<ComparisonCertificate> {
    check_map(f)?;
    let tag = if is_variant(f) { Statement::VariantG2 } else { Statement::ThmC };
    let instance = format!("I({:?}) along {} -> {} on {:?}", w.labels(), pm.source().name(), pm.target().name(), window);
    let mut cert = ComparisonCertificate::new(tag, instance, f);
    if !pm.is_surjective() {
        cert.claimed = false;
        cert.notes.push("k + q -> g is not surjective".into());
    }
    if !f.is_flat() {
        cert.claimed = false;
        cert.notes.push("ring map is not flat".into());
    }
    let lhs = i_functor(pm, w, window)?;
    let rhs = i_functor(&pm.base_change(f)?, &w.base_change(f)?, window)?;
    if lhs.ambient.basis != rhs.ambient.basis {
        return Err(GkError::Inconsistency("windows of pro differ after base change".into()));
    }
    let dst = Lattice::from_basis_unchecked(f.target(), rhs.embedding.clone());
    let images = lhs.embedding.apply_ring_map(f)?;
    fill(&mut cert, &dst, &images, lhs.module.dim());
    if !lhs.module.is_closed() {
        cert.notes.push("I(W) meets the window boundary".into());
    }
    Ok(cert)
}

/// Flat base change of cohomology: the base-changed report predicted from
/// the torsion rules agrees with the cohomology of the base-changed complex.
pub fn verify_cohomology_base_change(f: &RingMap, c: &CochainComplex) -> Result<(ComparisonCertificate, CohomologyReport, CohomologyReport)> {
    check_map(f)?;
    let mut cert = ComparisonCertificate::new(Statement::ThmDInstance, format!("complex of ranks {:?}", c.ranks()), f);
    if !f.is_flat() {
        cert.claimed = false;
    }
    let before = compute_cohomology(c)?;
    let after = compute_cohomology(&c.base_change(f)?)?;
    let tgt = f.target();
    let mut agree = before.degrees.len() == after.degrees.len();
    for (b, a) in before.degrees.iter().zip(&after.degrees) {
        let survive: Vec<Elem> = b.torsion.iter().filter(|t| !tgt.is_unit(t)).map(|t| tgt.canonical(t)).collect();
        agree &= a.free_rank == b.free_rank && a.torsion == survive;
    }
    cert.lhs_rank = before.free_ranks().iter().sum();
    cert.rhs_rank = after.free_ranks().iter().sum();
    cert.divisors = after.degrees.iter().flat_map(|d| d.torsion.clone()).collect();
    cert.verdict = if agree { Verdict::Iso } else { Verdict::NotIso };
    cert.notes = after.to_string().lines().map(String::from).collect();
    Ok((cert, before, after))
}

/// `I(Res V) = Res I(V)` for `f = ℤ -> ℤ[i]`, `V` over the base change of
/// `pm`'s source pair.
pub fn verify_restriction_identity(f: &RingMap, pm: &PairMap, v: &GKModule, window: &WeightWindow) -> Result<ComparisonCertificate> {
    let mut cert = ComparisonCertificate::new(Statement::Cor314, format!("Res I({:?}) on {:?}", v.labels(), window), f);
    let pmk = pm.base_change(f)?;
    let res_v = restrict_scalars(f, pm.source().clone(), v)?;
    let lhs = i_functor(pm, &res_v, window)?;
    let rhs = i_functor(&pmk, v, window)?;
    // identify (m, 2k + e) with 2 * index(m, k) + e
    let n2 = lhs.ambient.basis.len();
    let mut perm = Matrix::zeros(n2, 2 * rhs.ambient.basis.len());
    for (i, (m, k2)) in lhs.ambient.basis.iter().enumerate() {
        let j = rhs
            .ambient
            .index_of(m, k2 / 2)
            .ok_or_else(|| GkError::Inconsistency("windows of pro differ under restriction".into()))?;
        perm.set(i, 2 * j + k2 % 2, Elem::one());
    }
    if perm.rows() != perm.cols() {
        return Err(GkError::Inconsistency("windows of pro differ under restriction".into()));
    }
    let res_emb = &perm * &rhs.embedding.realify();
    let dst = Lattice::span(f.source(), &res_emb);
    fill(&mut cert, &dst, &lhs.embedding, lhs.module.dim());
    Ok(cert)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models;
    use crate::ring::BaseRing;

    fn map(a: BaseRing, b: BaseRing) -> RingMap {
        RingMap::new(a, b).unwrap()
    }

    #[test]
    fn borel_weil_over_half() {
        let f = map(BaseRing::Integers, BaseRing::localized(&[2]).unwrap());
        let pm = models::borel_weil_map(BaseRing::Integers);
        let w = models::borel_character(BaseRing::Integers, 2);
        let c = comparison_iota(&f, &pm, &w, &WeightWindow::interval(-12, 2, 10)).unwrap();
        assert!(c.is_iso() && c.claimed, "{c}");
        assert_eq!(c.lhs_rank, 3);
        assert_eq!(c.divisors.len(), 3);
    }

    #[test]
    fn identity_is_iso() {
        let f = RingMap::identity(BaseRing::Integers);
        let x = models::weyl_lattice(BaseRing::Integers, 2);
        let c = verify_hom_base_change(&f, &x, &x).unwrap();
        assert!(c.is_iso());
        assert_eq!(c.lhs_rank, 1);
        assert_eq!(c.tag, Statement::ThmB);
    }

    #[test]
    fn invariants_commute() {
        let v = models::weyl_lattice(BaseRing::Integers, 2).k_module().unwrap();
        let c = verify_invariants_base_change(&map(BaseRing::Integers, BaseRing::Rationals), &v).unwrap();
        assert!(c.is_iso());
        assert_eq!(c.rhs_rank, 0);
    }

    #[test]
    fn torsion_dies_over_q() {
        let p = models::lie_pair(models::sl2(BaseRing::Integers));
        let c = crate::cohomology::build_ce_complex(&p, &GKModule::trivial(p.clone(), 1)).unwrap();
        let (cert, _, after) = verify_cohomology_base_change(&map(BaseRing::Integers, BaseRing::Rationals), &c).unwrap();
        assert!(cert.is_iso());
        assert_eq!(after.free_ranks(), vec![1, 0, 0, 1]);
        let (cert3, _, after3) = verify_cohomology_base_change(&map(BaseRing::Integers, BaseRing::localized(&[3]).unwrap()), &c).unwrap();
        assert!(cert3.is_iso());
        assert_eq!(after3.torsion(2).len(), 2);
    }

    #[test]
    fn restriction_identity_torus() {
        let zi = BaseRing::GaussianIntegers;
        let f = map(BaseRing::Integers, zi.clone());
        let pm = models::gl2_torus_zuckerman_map(BaseRing::Integers);
        let src = std::sync::Arc::new(pm.source().base_change(&f).unwrap());
        let v = GKModule::adjoint(src).unwrap();
        let c = verify_restriction_identity(&f, &pm, &v, &WeightWindow::interval(-4, 4, 0)).unwrap();
        assert!(c.is_iso(), "{c}");
        assert_eq!(c.lhs_rank, 8);
    }
}
