//! Relative Chevalley-Eilenberg complexes and their integral cohomology.

use std::fmt;

use serde::Serialize;

use crate::error::{GkError, Result};
use crate::kmodule::{add_weights, Weight};
use crate::lie::validate_lie;
use crate::matrix::Matrix;
use crate::pair::{internal_hom_gk, GKModule, PairDatum};
use crate::ring::{BaseRing, Elem, RingMap};
use crate::snf::{cokernel_invariants, kernel_basis, solve};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CochainComplex {
    ring: BaseRing,
    labels: Vec<Vec<String>>,
    /// `differentials[n]: C^n -> C^{n+1}`.
    differentials: Vec<Matrix>,
}

impl CochainComplex {
    /// Builds a complex and checks `d∘d = 0`.
    pub fn new(ring: BaseRing, labels: Vec<Vec<String>>, differentials: Vec<Matrix>) -> Result<Self> {
        if differentials.len() + 1 != labels.len() {
            return Err(GkError::Validation("need one differential between consecutive degrees".into()));
        }
        for (n, d) in differentials.iter().enumerate() {
            if d.shape() != (labels[n + 1].len(), labels[n].len()) {
                return Err(GkError::Validation(format!("d^{n} has the wrong shape")));
            }
        }
        for n in 1..differentials.len() {
            if !(&differentials[n] * &differentials[n - 1]).is_zero() {
                return Err(GkError::Inconsistency(format!("d^{n} d^{} != 0", n - 1)));
            }
        }
        Ok(CochainComplex { ring, labels, differentials })
    }

    pub fn ring(&self) -> &BaseRing {
        &self.ring
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn ranks(&self) -> Vec<usize> {
        self.labels.iter().map(Vec::len).collect()
    }

    pub fn labels(&self, n: usize) -> &[String] {
        &self.labels[n]
    }

    pub fn differential(&self, n: usize) -> &Matrix {
        &self.differentials[n]
    }

    pub fn differentials(&self) -> &[Matrix] {
        &self.differentials
    }

    pub fn base_change(&self, f: &RingMap) -> Result<CochainComplex> {
        if &self.ring != f.source() {
            return Err(GkError::Domain("complex is over a different ring".into()));
        }
        let ds = self.differentials.iter().map(|d| d.apply_ring_map(f)).collect::<Result<Vec<_>>>()?;
        CochainComplex::new(f.target().clone(), self.labels.clone(), ds)
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.ranks().iter().enumerate().map(|(n, &r)| if n % 2 == 0 { r as i64 } else { -(r as i64) }).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CohomologyDegree {
    pub degree: usize,
    pub free_rank: usize,
    pub torsion: Vec<Elem>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CohomologyReport {
    pub ring: BaseRing,
    pub degrees: Vec<CohomologyDegree>,
}

impl CohomologyReport {
    pub fn free_ranks(&self) -> Vec<usize> {
        self.degrees.iter().map(|d| d.free_rank).collect()
    }

    pub fn torsion(&self, n: usize) -> &[Elem] {
        &self.degrees[n].torsion
    }
}

impl fmt::Display for CohomologyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.degrees {
            let t: Vec<String> = d.torsion.iter().map(|x| x.to_string()).collect();
            writeln!(f, "H^{}: free {}, torsion [{}]", d.degree, d.free_rank, t.join(", "))?;
        }
        Ok(())
    }
}

/// `H^n = ker d^n / im d^{n-1}` for every degree.
pub fn compute_cohomology(c: &CochainComplex) -> Result<CohomologyReport> {
    let ring = c.ring().clone();
    let ranks = c.ranks();
    let mut degrees = Vec::with_capacity(ranks.len());
    for n in 0..ranks.len() {
        let kernel = match c.differentials.get(n) {
            Some(d) => kernel_basis(&ring, d),
            None => Matrix::identity(ranks[n]),
        };
        let incoming = if n == 0 { Matrix::zeros(ranks[0], 0) } else { c.differentials[n - 1].clone() };
        let coords = solve(&ring, &kernel, &incoming)
            .ok_or_else(|| GkError::Inconsistency(format!("image of d^{} is not inside ker d^{n}", n.wrapping_sub(1))))?;
        let (free_rank, torsion) = cokernel_invariants(&ring, &coords)?;
        let torsion = torsion.iter().map(|t| ring.canonical(t)).collect();
        degrees.push(CohomologyDegree { degree: n, free_rank, torsion });
    }
    Ok(CohomologyReport { ring, degrees })
}

/// Increasing subsets of `0..s` of size `n`, in lexicographic order.
pub fn subsets(s: usize, n: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, s: usize, n: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for i in start..s {
            cur.push(i);
            go(i + 1, s, n, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, s, n, &mut Vec::new(), &mut out);
    out
}

/// A complement to the image of `psi` spanned by basis vectors of `g`, so
/// that `[psi | C]` is unimodular. Returns the chosen indices.
fn basis_complement(pair: &PairDatum) -> Result<Vec<usize>> {
    let ring = pair.ring();
    let psi = pair.psi();
    let n = pair.g().dim();
    let mut chosen = Vec::new();
    let mut cur = psi.clone();
    for i in 0..n {
        let cand = cur.hstack(&Matrix::identity(n).select_cols(&[i]));
        // the span must stay a direct summand
        let snf = crate::snf::smith_normal_form(ring, &cand, crate::snf::Track::NONE)?;
        if snf.rank() == cand.cols() && snf.all_units() {
            chosen.push(i);
            cur = cand;
        }
    }
    if cur.cols() != n {
        return Err(GkError::Precondition("no basis complement of Lie(K) in g".into()));
    }
    Ok(chosen)
}

/// The relative complex `Hom_M(Λ^n(q/m), V)` with the Chevalley-Eilenberg
/// differential, for diagonalizable `M`.
pub fn build_ce_complex(pair: &PairDatum, v: &GKModule) -> Result<CochainComplex> {
    build_ce_complex_to(pair, v, usize::MAX)
}

/// Same as [`build_ce_complex`], truncated after degree `max_degree`.
pub fn build_ce_complex_to(pair: &PairDatum, v: &GKModule, max_degree: usize) -> Result<CochainComplex> {
    if !pair.group().is_diagonalizable() {
        return Err(GkError::Precondition("relative complex needs a diagonalizable group".into()));
    }
    if v.pair().as_ref() != pair {
        return Err(GkError::Domain("module is over a different pair".into()));
    }
    if !v.is_closed() {
        return Err(GkError::Unsupported("cohomology of a windowed module".into()));
    }
    let ring = pair.ring().clone();
    let g = pair.g();
    let comp = basis_complement(pair)?;
    let s = comp.len();
    let rank = pair.torus_rank();
    let cw: Vec<Weight> = comp.iter().map(|&i| pair.g_weights()[i].clone()).collect();
    // projection of g onto the complement coordinates
    let b = pair.psi().hstack(&Matrix::identity(g.dim()).select_cols(&comp));
    let binv = b.inverse().ok_or_else(|| GkError::Inconsistency("complement is singular".into()))?;
    let k = pair.psi().cols();
    let proj = binv.row_range(k, k + s);
    let acts: Vec<Matrix> = comp.iter().map(|&i| v.action_of(i).clone()).collect();
    // bracket of complement vectors, projected
    let br: Vec<Vec<Vec<Elem>>> =
        (0..s).map(|a| (0..s).map(|c| proj.mul_vec(g.bracket_basis(comp[a], comp[c]))).collect()).collect();

    let top = s.min(max_degree);
    let mut cells: Vec<Vec<(Vec<usize>, usize)>> = Vec::new();
    let mut labels = Vec::new();
    for n in 0..=top {
        let mut cn = Vec::new();
        let mut ln = Vec::new();
        for set in subsets(s, n) {
            let w = set.iter().fold(vec![0; rank], |acc, &i| add_weights(&acc, &cw[i]));
            for j in 0..v.dim() {
                if v.weights()[j] == w {
                    let args: Vec<&str> = set.iter().map(|&i| g.labels()[comp[i]].as_str()).collect();
                    ln.push(format!("({})->{}", args.join("^"), v.labels()[j]));
                    cn.push((set.clone(), j));
                }
            }
        }
        cells.push(cn);
        labels.push(ln);
    }
    let mut ds = Vec::new();
    for n in 0..top {
        let index: std::collections::HashMap<(Vec<usize>, usize), usize> =
            cells[n + 1].iter().cloned().enumerate().map(|(i, c)| (c, i)).collect();
        let mut d = Matrix::zeros(cells[n + 1].len(), cells[n].len());
        for (col, (set, j)) in cells[n].iter().enumerate() {
            for t in subsets(s, n + 1) {
                let mut out = vec![Elem::zero(); v.dim()];
                // Σ_i (-1)^i x_i φ(..x̂_i..)
                for (i, &ti) in t.iter().enumerate() {
                    let rest: Vec<usize> = t.iter().copied().filter(|&x| x != ti).collect();
                    if &rest == set {
                        let sign = if i % 2 == 0 { Elem::one() } else { -Elem::one() };
                        for r in 0..v.dim() {
                            let a = acts[ti].get(r, *j);
                            if !a.is_zero() {
                                out[r] += &(&sign * a);
                            }
                        }
                    }
                }
                // Σ_{i<l} (-1)^{i+l} φ([x_i, x_l], ..)
                for i in 0..t.len() {
                    for l in i + 1..t.len() {
                        let rest: Vec<usize> = t.iter().copied().filter(|&x| x != t[i] && x != t[l]).collect();
                        for (kk, c) in br[t[i]][t[l]].iter().enumerate() {
                            if c.is_zero() || rest.contains(&kk) {
                                continue;
                            }
                            let mut merged = rest.clone();
                            let pos = merged.iter().filter(|&&x| x < kk).count();
                            merged.insert(pos, kk);
                            if &merged != set {
                                continue;
                            }
                            let sign = if (i + l + pos) % 2 == 0 { c.clone() } else { -c };
                            out[*j] += &sign;
                        }
                    }
                }
                for (r, val) in out.into_iter().enumerate() {
                    if val.is_zero() {
                        continue;
                    }
                    let row = index.get(&(t.clone(), r)).ok_or_else(|| {
                        GkError::Inconsistency(format!("cochain differential leaves the invariant part at {t:?}"))
                    })?;
                    *d.get_mut(*row, col) += &val;
                }
            }
        }
        ds.push(d);
    }
    match CochainComplex::new(ring, labels, ds) {
        Err(GkError::Inconsistency(m)) => {
            let report = validate_lie(g);
            let triple = report
                .jacobi_triple()
                .map(|(a, b, c)| format!(" (Jacobi fails on {}, {}, {})", g.labels()[a], g.labels()[b], g.labels()[c]))
                .unwrap_or_default();
            Err(GkError::Inconsistency(format!("{m}{triple}")))
        }
        other => other,
    }
}

/// `Ext^n_{g,K}(X, Y)` for `n <= max_degree` via the relative complex with
/// coefficients `F(X, Y)`.
pub fn ext_gk(x: &GKModule, y: &GKModule, max_degree: usize) -> Result<CohomologyReport> {
    let h = internal_hom_gk(x, y)?;
    Ok(cohomology_up_to(x.pair(), &h, max_degree)?.1)
}

/// `H^n` for `n <= max_degree`. The complex is built one degree further so
/// that the top reported degree sees its outgoing differential.
pub fn cohomology_up_to(pair: &PairDatum, v: &GKModule, max_degree: usize) -> Result<(CochainComplex, CohomologyReport)> {
    let c = build_ce_complex_to(pair, v, max_degree.saturating_add(1))?;
    let mut report = compute_cohomology(&c)?;
    report.degrees.truncate(max_degree.saturating_add(1));
    Ok((c, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models;

    #[test]
    fn sl2_first_differential() {
        let p = models::lie_pair(models::sl2(BaseRing::Integers));
        let c = build_ce_complex(&p, &GKModule::trivial(p.clone(), 1)).unwrap();
        assert_eq!(c.ranks(), vec![1, 3, 3, 1]);
        assert_eq!(c.differential(1), &Matrix::from_i64(&[&[2, 0, 0], &[0, -1, 0], &[0, 0, 2]]));
        assert!(c.differential(2).is_zero());
    }

    #[test]
    fn sl2_integral_torsion() {
        let p = models::lie_pair(models::sl2(BaseRing::Integers));
        let c = build_ce_complex(&p, &GKModule::trivial(p.clone(), 1)).unwrap();
        let r = compute_cohomology(&c).unwrap();
        assert_eq!(r.free_ranks(), vec![1, 0, 0, 1]);
        assert_eq!(r.torsion(2), &[Elem::from_int(2), Elem::from_int(2)]);
        let q = compute_cohomology(&c.base_change(&RingMap::new(BaseRing::Integers, BaseRing::Rationals).unwrap()).unwrap()).unwrap();
        assert!(q.degrees.iter().all(|d| d.torsion.is_empty()));
        assert_eq!(q.free_ranks(), vec![1, 0, 0, 1]);
        assert!(r.to_string().contains("H^2: free 0, torsion [2, 2]"));
    }

    #[test]
    fn abelian_rank_two() {
        let p = models::abelian_pair(BaseRing::Integers, 2);
        let c = build_ce_complex(&p, &GKModule::trivial(p.clone(), 1)).unwrap();
        assert_eq!(c.ranks(), vec![1, 2, 1]);
        assert_eq!(compute_cohomology(&c).unwrap().free_ranks(), vec![1, 2, 1]);
    }

    #[test]
    fn lower_borel_relative() {
        let p = models::borel_lower_pair(BaseRing::Integers);
        let v = models::weyl_lattice_over(models::sl2_torus_pair(BaseRing::Integers), 2);
        let fwd = crate::functors::forgetful(&models::lower_borel_inclusion(BaseRing::Integers), &v).unwrap();
        let c = build_ce_complex(&p, &fwd).unwrap();
        // C^0 = V_0, C^1 = Hom(f, V)_T = V_{-2}
        assert_eq!(c.ranks(), vec![1, 1]);
        assert_eq!(c.differential(0), &Matrix::from_i64(&[&[2]]));
        let r = compute_cohomology(&c).unwrap();
        assert_eq!(r.free_ranks(), vec![0, 0]);
        assert_eq!(r.torsion(1), &[Elem::from_int(2)]);
    }

    #[test]
    fn ext_zero_is_hom() {
        let v = models::weyl_lattice_over(models::sl2_torus_pair(BaseRing::Integers), 2);
        let r = ext_gk(&v, &v, 1).unwrap();
        assert_eq!(r.degrees[0].free_rank, 1);
        let a = models::abelian_pair(BaseRing::Integers, 3);
        let t = GKModule::trivial(a, 1);
        assert_eq!(ext_gk(&t, &t, 1).unwrap().free_ranks(), vec![1, 3]);
        // the top degree must still see its outgoing differential
        let w = models::weyl_lattice_over(models::sl2_torus_pair(BaseRing::Integers), 1);
        let r = ext_gk(&w, &v, 0).unwrap();
        assert_eq!(r.free_ranks(), vec![0]);
    }
}
