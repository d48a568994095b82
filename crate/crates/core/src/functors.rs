//! Forgetful, ind, pro, Zuckerman Γ and I = Γ∘pro, materialized on weight
//! windows, together with the orbit decomposition of U(ū).

use std::collections::{BTreeMap, HashMap};
use std::hash::Hash;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{GkError, Result};
use crate::kmodule::{add_weights, pairing, sub_weights, KModule, Weight};
use crate::lattice::Lattice;
use crate::lie::LieAlgebra;
use crate::matrix::Matrix;
use crate::pair::{dual_gk, tensor_gk, Boundary, GKModule, GroupMap, PairDatum, PairMap};
use crate::pbw::{degree, monomials_in, nilpotency_order, Monomial, Pbw, UElem};
use crate::ring::{Elem, RingMap};
use crate::snf::{divisors, is_unimodular, kernel_basis};

/// A box of weights together with a cap on the PBW degree in ū.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WeightWindow {
    pub lo: Weight,
    pub hi: Weight,
    pub cap: usize,
}

impl WeightWindow {
    pub fn new(lo: Weight, hi: Weight, cap: usize) -> Result<Self> {
        if lo.len() != hi.len() || lo.iter().zip(&hi).any(|(a, b)| a > b) {
            return Err(GkError::Validation(format!("bad window {lo:?}..{hi:?}")));
        }
        Ok(WeightWindow { lo, hi, cap })
    }

    /// Rank-one window `[lo, hi]`.
    pub fn interval(lo: i64, hi: i64, cap: usize) -> Self {
        WeightWindow { lo: vec![lo], hi: vec![hi], cap }
    }

    /// Window for a pair with trivial torus, bounded by degree only.
    pub fn degrees(cap: usize) -> Self {
        WeightWindow { lo: vec![], hi: vec![], cap }
    }

    pub fn contains(&self, w: &[i64]) -> bool {
        w.len() == self.lo.len() && w.iter().zip(self.lo.iter().zip(&self.hi)).all(|(x, (a, b))| a <= x && x <= b)
    }

    /// The window with weights negated.
    pub fn mirrored(&self) -> Self {
        WeightWindow {
            lo: self.hi.iter().map(|x| -x).collect(),
            hi: self.lo.iter().map(|x| -x).collect(),
            cap: self.cap,
        }
    }
}

/// A module computed on a window, with each basis vector described as a
/// ū-monomial paired with a basis index of the input module.
#[derive(Clone, Debug)]
pub struct Materialized {
    pub module: GKModule,
    pub basis: Vec<(Monomial, usize)>,
}

impl Materialized {
    pub fn index_of(&self, m: &[u32], k: usize) -> Option<usize> {
        self.basis.iter().position(|(mm, kk)| mm.as_slice() == m && *kk == k)
    }
}

struct BoundaryBuilder<K> {
    index: HashMap<K, usize>,
    labels: Vec<String>,
    weights: Vec<Weight>,
    entries: Vec<(usize, usize, usize, Elem)>,
}

impl<K: Hash + Eq> BoundaryBuilder<K> {
    fn new() -> Self {
        BoundaryBuilder { index: HashMap::new(), labels: Vec::new(), weights: Vec::new(), entries: Vec::new() }
    }

    fn add(&mut self, key: K, label: impl FnOnce() -> String, weight: impl FnOnce() -> Weight, x: usize, col: usize, val: Elem) {
        let row = match self.index.get(&key) {
            Some(&r) => r,
            None => {
                let r = self.labels.len();
                self.labels.push(label());
                self.weights.push(weight());
                self.index.insert(key, r);
                r
            }
        };
        self.entries.push((x, row, col, val));
    }

    fn build(self, gdim: usize, cols: usize) -> Option<Boundary> {
        if self.labels.is_empty() {
            return None;
        }
        let mut action = vec![Matrix::zeros(self.labels.len(), cols); gdim];
        for (x, r, c, v) in self.entries {
            *action[x].get_mut(r, c) += &v;
        }
        Some(Boundary { labels: self.labels, weights: self.weights, action })
    }
}

fn to_inconsistency(e: GkError) -> GkError {
    match e {
        GkError::Validation(m) => GkError::Inconsistency(m),
        other => other,
    }
}

fn column_weight(weights: &[Weight], col: &[Elem], rank: usize) -> Result<Weight> {
    let mut found: Option<&Weight> = None;
    for (i, c) in col.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        match found {
            None => found = Some(&weights[i]),
            Some(w) if w != &weights[i] => return Err(GkError::Validation("vector is not weight-homogeneous".into())),
            _ => {}
        }
    }
    Ok(found.cloned().unwrap_or_else(|| vec![0; rank]))
}

pub fn monomial_label(labels: &[String], m: &[u32]) -> String {
    let parts: Vec<String> = m
        .iter()
        .enumerate()
        .filter(|(_, &e)| e > 0)
        .map(|(i, &e)| if e == 1 { labels[i].clone() } else { format!("{}^{e}", labels[i]) })
        .collect();
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join(" ")
    }
}

fn monomial_weight(ws: &[Weight], m: &[u32], rank: usize) -> Weight {
    let mut out = vec![0; rank];
    for (w, &e) in ws.iter().zip(m) {
        for k in 0..rank {
            out[k] += w[k] * e as i64;
        }
    }
    out
}

/// `(g, M)`: the target Lie algebra with the source group.
pub fn intermediate_pair(f: &PairMap) -> Result<Arc<PairDatum>> {
    if *f.group_part() == GroupMap::Identity {
        return Ok(f.target().clone());
    }
    let t = f.target();
    let weights = t.g_weights().iter().map(|w| f.restrict_weight(w)).collect();
    let psi = f.lie_part() * f.source().psi();
    let name = format!("{}|{}", t.name(), f.source().name());
    Ok(Arc::new(PairDatum::new(&name, t.g().clone(), f.source().group().clone(), weights, psi)?))
}

/// `(q, M) -> (g, M)`.
pub fn lie_stage(f: &PairMap) -> Result<PairMap> {
    if *f.group_part() == GroupMap::Identity {
        return Ok(f.clone());
    }
    PairMap::new(f.source().clone(), intermediate_pair(f)?, f.lie_part().clone(), GroupMap::Identity, f.complement().cloned())
}

/// `(g, M) -> (g, K)`.
pub fn gamma_stage(f: &PairMap) -> Result<PairMap> {
    let n = f.target().g().dim();
    PairMap::new(intermediate_pair(f)?, f.target().clone(), Matrix::identity(n), f.group_part().clone(), Some(Matrix::zeros(n, 0)))
}

/// Restriction along a map of pairs.
pub fn forgetful(f: &PairMap, v: &GKModule) -> Result<GKModule> {
    if v.pair() != f.target() {
        return Err(GkError::Domain("module is not over the target pair".into()));
    }
    let lp = f.lie_part();
    let action = (0..lp.cols()).map(|y| v.act(&lp.column(y))).collect();
    let weights = v.weights().iter().map(|w| f.restrict_weight(w)).collect();
    let boundary = v.boundary().map(|b| Boundary {
        labels: b.labels.clone(),
        weights: b.weights.iter().map(|w| f.restrict_weight(w)).collect(),
        action: (0..lp.cols()).map(|y| v.boundary_act(&lp.column(y)).unwrap()).collect(),
    });
    GKModule::windowed(f.source().clone(), v.labels().to_vec(), weights, action, boundary).map_err(to_inconsistency)
}

/// `g` in a basis adapted to `q ⊕ ū`.
struct Adapted {
    lie: LieAlgebra,
    to_new: Matrix,
    q_dim: usize,
    u_dim: usize,
    u_weights: Vec<Weight>,
    u_labels: Vec<String>,
}

fn adapted(f: &PairMap, q_first: bool) -> Result<Adapted> {
    if *f.group_part() != GroupMap::Identity {
        return Err(GkError::Precondition("ind and pro need an identity group part".into()));
    }
    let c = f.complement().ok_or_else(|| GkError::Precondition("a complement ū is required".into()))?.clone();
    let g = f.target().g();
    let lp = f.lie_part();
    let rank = f.target().torus_rank();
    let u_labels: Vec<String> = (0..c.cols())
        .map(|j| {
            let col = c.column(j);
            let nz: Vec<usize> = (0..col.len()).filter(|&i| !col[i].is_zero()).collect();
            if nz.len() == 1 && col[nz[0]].is_one() {
                g.labels()[nz[0]].clone()
            } else {
                format!("u{j}")
            }
        })
        .collect();
    let u_weights = (0..c.cols()).map(|j| column_weight(f.target().g_weights(), &c.column(j), rank)).collect::<Result<Vec<_>>>()?;
    let q_labels = f.source().g().labels().to_vec();
    let (b, labels) = if q_first {
        (lp.hstack(&c), q_labels.iter().chain(&u_labels).cloned().collect())
    } else {
        (c.hstack(lp), u_labels.iter().chain(&q_labels).cloned().collect())
    };
    let lie = g.change_basis(&b, labels)?;
    let to_new = b.inverse().ok_or_else(|| GkError::Inconsistency("adapted basis is singular".into()))?;
    Ok(Adapted { lie, to_new, q_dim: lp.cols(), u_dim: c.cols(), u_weights, u_labels })
}

/// `q^b · e_k` in a module over the source pair.
fn apply_q(w: &GKModule, mq: &[u32], k: usize) -> Vec<Elem> {
    let mut v = vec![Elem::zero(); w.dim()];
    v[k] = Elem::one();
    for i in (0..mq.len()).rev() {
        for _ in 0..mq[i] {
            v = w.action_of(i).mul_vec(&v);
        }
    }
    v
}

/// `U(g) ⊗_{U(q)} W` on the window; basis `u^m ⊗ w_k`.
pub fn ind(f: &PairMap, w: &GKModule, window: &WeightWindow) -> Result<Materialized> {
    if w.pair() != f.source() {
        return Err(GkError::Domain("module is not over the source pair".into()));
    }
    if !w.is_closed() {
        return Err(GkError::Unsupported("ind of a windowed module".into()));
    }
    let ad = adapted(f, false)?;
    let (s, rank) = (ad.u_dim, f.target().torus_rank());
    let all: Vec<usize> = (0..s).collect();
    let mut basis = Vec::new();
    let mut weights = Vec::new();
    let mut labels = Vec::new();
    for m in monomials_in(s, &all, window.cap) {
        let mw = monomial_weight(&ad.u_weights, &m, rank);
        for k in 0..w.dim() {
            let wt = add_weights(&mw, &w.weights()[k]);
            if window.contains(&wt) {
                labels.push(format!("{}*{}", monomial_label(&ad.u_labels, &m), w.labels()[k]));
                weights.push(wt);
                basis.push((m.clone(), k));
            }
        }
    }
    let index: HashMap<(Monomial, usize), usize> = basis.iter().cloned().enumerate().map(|(i, b)| (b, i)).collect();
    let pbw = Pbw::new(&ad.lie, window.cap + 1);
    let n = basis.len();
    let gdim = f.target().g().dim();
    let mut action = vec![Matrix::zeros(n, n); gdim];
    let mut bb = BoundaryBuilder::new();
    for (x, act) in action.iter_mut().enumerate() {
        let xc = ad.to_new.column(x);
        for (col, (m, k)) in basis.iter().enumerate() {
            let mut full = m.clone();
            full.extend(std::iter::repeat_n(0, ad.q_dim));
            let mut out = UElem::zero();
            for (a, c) in xc.iter().enumerate() {
                if !c.is_zero() {
                    out.add_scaled(&pbw.left_mult(a, &full)?, c);
                }
            }
            for (mono, c) in out.terms() {
                let (mu, mq) = mono.split_at(s);
                let v = apply_q(w, mq, *k);
                for (k2, d) in v.iter().enumerate() {
                    if d.is_zero() {
                        continue;
                    }
                    let val = c * d;
                    let key = (mu.to_vec(), k2);
                    match index.get(&key) {
                        Some(&row) => *act.get_mut(row, col) += &val,
                        None => bb.add(
                            key,
                            || format!("{}*{}", monomial_label(&ad.u_labels, mu), w.labels()[k2]),
                            || add_weights(&monomial_weight(&ad.u_weights, mu, rank), &w.weights()[k2]),
                            x,
                            col,
                            val,
                        ),
                    }
                }
            }
        }
    }
    let boundary = bb.build(gdim, n);
    let module = GKModule::windowed(f.target().clone(), labels, weights, action, boundary).map_err(to_inconsistency)?;
    Ok(Materialized { module, basis })
}

/// A cocharacter `h` with `⟨α, h⟩ < 0` for all the given weights.
pub fn grading_element(weights: &[Weight]) -> Option<Vec<i64>> {
    let r = weights.first()?.len();
    if r == 0 {
        return None;
    }
    for bound in 1..=4i64 {
        let width = (2 * bound + 1) as usize;
        for code in 0..width.pow(r as u32) {
            let mut c = code;
            let h: Vec<i64> = (0..r)
                .map(|_| {
                    let d = (c % width) as i64 - bound;
                    c /= width;
                    d
                })
                .collect();
            if weights.iter().all(|w| pairing(w, &h) < 0) {
                return Some(h);
            }
        }
    }
    None
}

/// `Hom_{U(q)}(U(g), Z)` on the window; the basis vector `(m, k)` is the
/// U(q)-linear map sending `u^m` to `z_k` and the other ū-monomials to 0.
pub fn pro(f: &PairMap, z: &GKModule, window: &WeightWindow) -> Result<Materialized> {
    if z.pair() != f.source() {
        return Err(GkError::Domain("module is not over the source pair".into()));
    }
    if !z.is_closed() {
        return Err(GkError::Unsupported("pro of a windowed module".into()));
    }
    let ad = adapted(f, true)?;
    let (s, qd, rank) = (ad.u_dim, ad.q_dim, f.target().torus_rank());
    let all: Vec<usize> = (0..s).collect();
    let mut basis = Vec::new();
    let mut weights = Vec::new();
    let mut labels = Vec::new();
    for m in monomials_in(s, &all, window.cap) {
        let mw = monomial_weight(&ad.u_weights, &m, rank);
        for k in 0..z.dim() {
            let wt = sub_weights(&z.weights()[k], &mw);
            if window.contains(&wt) {
                labels.push(format!("({})^*{}", monomial_label(&ad.u_labels, &m), z.labels()[k]));
                weights.push(wt);
                basis.push((m.clone(), k));
            }
        }
    }
    let gw = f.target().g_weights().to_vec();
    let gdim = gw.len();
    // degree bound for ū-monomials that can pair with the window
    let mut bound = window.cap + 1;
    if s > 0 {
        let h = grading_element(&ad.u_weights)
            .ok_or_else(|| GkError::Precondition("no grading element makes the ū-weights negative".into()))?;
        let hmin = ad.u_weights.iter().map(|w| -pairing(w, &h)).min().unwrap();
        for (m, k) in &basis {
            let mw = monomial_weight(&ad.u_weights, m, rank);
            for x in &gw {
                for k2 in 0..z.dim() {
                    let need = add_weights(&sub_weights(&mw, x), &sub_weights(&z.weights()[k2], &z.weights()[*k]));
                    let v = pairing(&need, &h);
                    if v <= 0 {
                        bound = bound.max((-v / hmin) as usize);
                    }
                }
            }
        }
    }
    let index: HashMap<(Monomial, usize), usize> = basis.iter().cloned().enumerate().map(|(i, b)| (b, i)).collect();
    let pbw = Pbw::new(&ad.lie, bound + 1);
    let n = basis.len();
    let mut action = vec![Matrix::zeros(n, n); gdim];
    let mut bb = BoundaryBuilder::new();
    let candidates = monomials_in(s, &all, bound);
    for (x, act) in action.iter_mut().enumerate() {
        let xu = UElem::from_lie(&ad.to_new.column(x));
        for mp in &candidates {
            let mut full = vec![0; qd];
            full.extend_from_slice(mp);
            let prod = pbw.monomial_times(&full, &xu)?;
            for (mono, c) in prod.terms() {
                let (mq, mu) = mono.split_at(qd);
                for k in 0..z.dim() {
                    let Some(&col) = index.get(&(mu.to_vec(), k)) else { continue };
                    let v = apply_q(z, mq, k);
                    for (k2, d) in v.iter().enumerate() {
                        if d.is_zero() {
                            continue;
                        }
                        let val = c * d;
                        let key = (mp.clone(), k2);
                        match index.get(&key) {
                            Some(&row) => *act.get_mut(row, col) += &val,
                            None => bb.add(
                                key,
                                || format!("({})^*{}", monomial_label(&ad.u_labels, mp), z.labels()[k2]),
                                || sub_weights(&z.weights()[k2], &monomial_weight(&ad.u_weights, mp, rank)),
                                x,
                                col,
                                val,
                            ),
                        }
                    }
                }
            }
        }
    }
    let boundary = bb.build(gdim, n);
    let module = GKModule::windowed(f.target().clone(), labels, weights, action, boundary).map_err(to_inconsistency)?;
    Ok(Materialized { module, basis })
}

/// The Zuckerman functor's output with its embedding (columns in the input's
/// coordinates).
#[derive(Clone, Debug)]
pub struct Gamma {
    pub module: GKModule,
    pub embedding: Matrix,
}

/// Restriction of a (possibly windowed) module to a sublattice with a
/// weight-homogeneous basis, regarded over `pair`.
fn restrict(v: &GKModule, basis: &Matrix, pair: Arc<PairDatum>, weights: Vec<Weight>) -> Result<GKModule> {
    let ring = v.ring().clone();
    let sub = Lattice::from_basis_unchecked(&ring, basis.clone());
    let gw = pair.g_weights().to_vec();
    let mut action = Vec::with_capacity(gw.len());
    for x in 0..gw.len() {
        let c = sub
            .coordinates_matrix(&(v.action_of(x) * basis))
            .ok_or_else(|| GkError::Inconsistency(format!("sublattice not stable under {}", pair.g().labels()[x])))?;
        action.push(c);
    }
    let mut bb = BoundaryBuilder::new();
    if let Some(b) = v.boundary() {
        for (x, wx) in gw.iter().enumerate() {
            let rows = &b.action[x] * basis;
            for r in 0..rows.rows() {
                for c in 0..rows.cols() {
                    let val = rows.get(r, c);
                    if val.is_zero() {
                        continue;
                    }
                    let wt = add_weights(&weights[c], wx);
                    bb.add((r, wt.clone()), || format!("{}@{wt:?}", b.labels[r]), || wt.clone(), x, c, val.clone());
                }
            }
        }
    }
    let boundary = bb.build(gw.len(), basis.cols());
    let labels = (0..basis.cols()).map(|i| format!("s{i}")).collect();
    GKModule::windowed(pair, labels, weights, action, boundary).map_err(to_inconsistency)
}

fn divided_powers_rational(n: &Matrix) -> Result<Vec<Matrix>> {
    let order = nilpotency_order(n).ok_or_else(|| GkError::Inconsistency("operator is not nilpotent on the window".into()))?;
    let mut out = Vec::new();
    let mut cur = Matrix::identity(n.rows());
    for j in 1..order {
        cur = (&cur * n).scale(&Elem::from_ratio(1, j as i64));
        out.push(cur.clone());
    }
    Ok(out)
}

/// `Γ = I^{g,K}_{g,M}` along a map with identity Lie part.
pub fn zuckerman_gamma(f: &PairMap, v: &GKModule) -> Result<Gamma> {
    if !f.lie_part().is_identity() {
        return Err(GkError::Precondition("Zuckerman functor needs an identity Lie part".into()));
    }
    if v.pair() != f.source() {
        return Err(GkError::Domain("module is not over the source pair".into()));
    }
    match f.group_part() {
        GroupMap::Identity => Ok(Gamma { module: v.with_pair(f.target().clone()), embedding: Matrix::identity(v.dim()) }),
        GroupMap::TorusIntoChevalley => gamma_chevalley(f, v),
        GroupMap::TorusRestriction(r) => gamma_torus(f, v, r),
        GroupMap::ToTrivial => Err(GkError::Unsupported("Zuckerman functor to a trivial group".into())),
    }
}

fn gamma_chevalley(f: &PairMap, v: &GKModule) -> Result<Gamma> {
    let ring = v.ring().clone();
    let n = v.dim();
    let tgt = f.target();
    let r = tgt.torus_rank();
    let gdim = tgt.g().dim();
    let mut l = Lattice::full(&ring, n);
    if let Some(b) = v.boundary() {
        let mut sys = Matrix::zeros(0, n);
        for x in 0..gdim {
            sys = sys.vstack(&b.action[x]);
        }
        l = Lattice::from_basis_unchecked(&ring, kernel_basis(&ring, &sys));
    }
    let mut ops: Vec<Matrix> = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    for w in v.weights() {
        if seen.insert(w.clone()) {
            ops.push(Matrix::diagonal(&v.weights().iter().map(|u| if u == w { Elem::one() } else { Elem::zero() }).collect::<Vec<_>>()));
        }
    }
    ops.extend(v.action().iter().cloned());
    let psi = tgt.psi();
    ops.extend(divided_powers_rational(&v.act(&psi.column(0)))?);
    ops.extend(divided_powers_rational(&v.act(&psi.column(r + 1)))?);
    loop {
        let mut next = l.clone();
        for op in &ops {
            next = next.preimage(op, &l);
        }
        if next.rank() == l.rank() && next.contains(&l) {
            break;
        }
        l = next;
    }
    let (basis, weights) = graded_basis(v.weights(), &l);
    let module = restrict(v, &basis, tgt.clone(), weights)?;
    Ok(Gamma { module, embedding: basis })
}

/// Weight-homogeneous basis of a sublattice stable under weight projections.
fn graded_basis(ws: &[Weight], l: &Lattice) -> (Matrix, Vec<Weight>) {
    let n = ws.len();
    let mut distinct: Vec<Weight> = ws.to_vec();
    distinct.sort();
    distinct.dedup();
    let mut cols = Matrix::zeros(n, 0);
    let mut weights = Vec::new();
    for mu in distinct {
        let p = Matrix::diagonal(&ws.iter().map(|u| if *u == mu { Elem::one() } else { Elem::zero() }).collect::<Vec<_>>());
        let part = l.image(&p);
        weights.extend(std::iter::repeat_n(mu.clone(), part.rank()));
        cols = cols.hstack(part.basis());
    }
    (cols, weights)
}

fn abs_bound(a: &Matrix) -> i64 {
    let mut best = BigRational::zero();
    for i in 0..a.rows() {
        let mut s = BigRational::zero();
        for j in 0..a.cols() {
            let x = a.get(i, j);
            s += x.re().abs() + x.im().abs();
        }
        if s > best {
            best = s;
        }
    }
    best.ceil().to_integer().to_i64().unwrap_or(i64::MAX / 4)
}

fn integer_eigenvalues(a: &Matrix, ring: &crate::ring::BaseRing) -> Vec<i64> {
    let b = abs_bound(a);
    (-b..=b)
        .filter(|&l| {
            let shifted = a - &Matrix::identity(a.rows()).scale(&Elem::from_int(l));
            kernel_basis(ring, &shifted).cols() > 0
        })
        .collect()
}

fn gamma_torus(f: &PairMap, v: &GKModule, rmat: &[Vec<i64>]) -> Result<Gamma> {
    let ring = v.ring().clone();
    let n = v.dim();
    let tgt = f.target();
    let rk = tgt.torus_rank();
    let psi = tgt.psi();
    let acts: Vec<Matrix> = (0..rk).map(|k| v.act(&psi.column(k))).collect();
    if v.boundary().is_some() {
        for k in 0..rk {
            if !v.boundary_act(&psi.column(k)).unwrap().is_zero() {
                return Err(GkError::BoundaryLoss("Lie(K) leaves the window".into()));
            }
        }
    }
    let mut distinct: Vec<Weight> = v.weights().to_vec();
    distinct.sort();
    distinct.dedup();
    let mut cols = Matrix::zeros(n, 0);
    let mut weights = Vec::new();
    for m in distinct {
        let idx: Vec<usize> = (0..n).filter(|&i| v.weights()[i] == m).collect();
        let incl = Matrix::identity(n).select_cols(&idx);
        let blocks: Vec<Matrix> = acts.iter().map(|a| a.select(&idx, &idx)).collect();
        let eig: Vec<Vec<i64>> = blocks.iter().map(|b| integer_eigenvalues(b, &ring)).collect();
        let mut combos: Vec<Vec<i64>> = vec![vec![]];
        for e in &eig {
            combos = combos.into_iter().flat_map(|c| e.iter().map(move |&x| [c.clone(), vec![x]].concat())).collect();
        }
        for mu in combos {
            let restricted: Weight = rmat.iter().map(|row| pairing(row, &mu)).collect();
            if restricted != m {
                continue;
            }
            let mut sys = Matrix::zeros(0, idx.len());
            for (k, b) in blocks.iter().enumerate() {
                sys = sys.vstack(&(b - &Matrix::identity(idx.len()).scale(&Elem::from_int(mu[k]))));
            }
            let ker = kernel_basis(&ring, &sys);
            if ker.cols() == 0 {
                continue;
            }
            weights.extend(std::iter::repeat_n(mu.clone(), ker.cols()));
            cols = cols.hstack(&(&incl * &ker));
        }
    }
    let module = restrict(v, &cols, tgt.clone(), weights)?;
    Ok(Gamma { module, embedding: cols })
}

/// Result of `I = Γ ∘ pro`: the module, the ambient window it lives in and
/// the embedding (columns in ambient coordinates).
#[derive(Clone, Debug)]
pub struct Induced {
    pub module: GKModule,
    pub ambient: Materialized,
    pub embedding: Matrix,
}

impl Induced {
    /// The counit `I(V) -> V`, evaluation at `1`.
    pub fn counit(&self, v_dim: usize) -> Matrix {
        let mut e0 = Matrix::zeros(v_dim, self.ambient.basis.len());
        for (i, (m, k)) in self.ambient.basis.iter().enumerate() {
            if degree(m) == 0 {
                e0.set(*k, i, Elem::one());
            }
        }
        &e0 * &self.embedding
    }

    /// Ambient vector from `(monomial, index, value)` components.
    pub fn ambient_vector(&self, comps: &[(Monomial, usize, Elem)]) -> Result<Vec<Elem>> {
        let mut v = vec![Elem::zero(); self.ambient.basis.len()];
        for (m, k, c) in comps {
            if c.is_zero() {
                continue;
            }
            let i = self
                .ambient
                .index_of(m, *k)
                .ok_or_else(|| GkError::BoundaryLoss("unit leaves the window; enlarge it".into()))?;
            v[i] += c;
        }
        Ok(v)
    }

    /// Coordinates of an ambient vector in the basis of `module`.
    pub fn coordinates(&self, amb: &[Elem]) -> Result<Vec<Elem>> {
        Lattice::from_basis_unchecked(self.module.ring(), self.embedding.clone())
            .coordinates(amb)
            .ok_or_else(|| GkError::Inconsistency("vector does not lie in I(V)".into()))
    }
}

/// `I^{g,K}_{q,M}(V)` on the window.
pub fn i_functor(f: &PairMap, v: &GKModule, window: &WeightWindow) -> Result<Induced> {
    if f.target().g().dim() == 0 {
        return invariants_h0(f, v);
    }
    let stage = lie_stage(f)?;
    let p = pro(&stage, v, window)?;
    let gamma = zuckerman_gamma(&gamma_stage(f)?, &p.module)?;
    Ok(Induced { module: gamma.module, ambient: p, embedding: gamma.embedding })
}

/// `H⁰(q, M, V)` for the trivial target pair.
fn invariants_h0(f: &PairMap, v: &GKModule) -> Result<Induced> {
    if !v.is_closed() {
        return Err(GkError::Unsupported("invariants of a windowed module".into()));
    }
    let ring = v.ring().clone();
    let n = v.dim();
    let idx: Vec<usize> = (0..n).filter(|&i| v.weights()[i].iter().all(|&c| c == 0)).collect();
    let incl = Matrix::identity(n).select_cols(&idx);
    let mut sys = Matrix::zeros(0, idx.len());
    for a in v.action() {
        sys = sys.vstack(&(a * &incl));
    }
    let basis = &incl * &kernel_basis(&ring, &sys);
    let module = GKModule::trivial(f.target().clone(), basis.cols());
    let ambient = Materialized { module: v.closed()?, basis: (0..n).map(|k| (vec![], k)).collect() };
    Ok(Induced { module, ambient, embedding: basis })
}

/// `u^m · x_j` for all ū-monomials, stopping at the first degree where
/// everything vanishes. `x` is over the target pair.
pub fn unit_components(f: &PairMap, x: &GKModule, max_degree: usize) -> Result<Vec<Vec<(Monomial, usize, Elem)>>> {
    let c = f.complement().cloned().unwrap_or_else(|| Matrix::zeros(f.target().g().dim(), 0));
    let s = c.cols();
    let acts: Vec<Matrix> = (0..s).map(|i| x.act(&c.column(i))).collect();
    let all: Vec<usize> = (0..s).collect();
    let mut out = vec![Vec::new(); x.dim()];
    for d in 0..=max_degree {
        let monos: Vec<Monomial> = monomials_in(s, &all, d).into_iter().filter(|m| degree(m) == d).collect();
        let mut any = false;
        for m in &monos {
            for (j, o) in out.iter_mut().enumerate() {
                let mut v = vec![Elem::zero(); x.dim()];
                v[j] = Elem::one();
                for i in (0..s).rev() {
                    for _ in 0..m[i] {
                        v = acts[i].mul_vec(&v);
                    }
                }
                for (k, val) in v.into_iter().enumerate() {
                    if !val.is_zero() {
                        any = true;
                        o.push((m.clone(), k, val));
                    }
                }
            }
        }
        if !any {
            return Ok(out);
        }
    }
    Err(GkError::CapExceeded { cap: max_degree })
}

/// The unit `X -> I(F X)` in the basis of `I(F X)`.
pub fn unit_matrix(f: &PairMap, x: &GKModule, ifx: &Induced) -> Result<Matrix> {
    let comps = unit_components(f, x, 64)?;
    let cols = comps
        .iter()
        .map(|c| ifx.coordinates(&ifx.ambient_vector(c)?))
        .collect::<Result<Vec<_>>>()?;
    Ok(Matrix::from_columns(ifx.module.dim(), &cols))
}

/// Isomorphism certificate for a map between two lattices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IsoEvidence {
    pub lhs_rank: usize,
    pub rhs_rank: usize,
    pub divisors: Vec<Elem>,
    pub iso: bool,
}

/// Decides whether the map sending the basis of `src` (columns) to the
/// vectors `images` is an isomorphism onto `dst`.
pub fn iso_evidence(dst: &Lattice, images: &Matrix, src_rank: usize) -> IsoEvidence {
    let ring = dst.ring().clone();
    let coords = dst.coordinates_matrix(images);
    let (divs, iso) = match coords {
        Some(c) if c.is_square() => {
            let d = divisors(&ring, &c).unwrap_or_default();
            let iso = is_unimodular(&ring, &c);
            (d.iter().map(|x| ring.canonical(x)).collect(), iso)
        }
        Some(c) => (divisors(&ring, &c).unwrap_or_default().iter().map(|x| ring.canonical(x)).collect(), false),
        None => (vec![], false),
    };
    IsoEvidence { lhs_rank: src_rank, rhs_rank: dst.rank(), divisors: divs, iso }
}

/// `Hom(X, I(V)) -> Hom(F X, V)`, `α ↦ ε ∘ α`.
pub fn adjunction_certificate(f: &PairMap, x: &GKModule, v: &GKModule, window: &WeightWindow) -> Result<IsoEvidence> {
    let iv = i_functor(f, v, window)?;
    let h1 = crate::pair::hom_space_gk(x, &iv.module)?;
    let fx = forgetful(f, x)?;
    let h2 = crate::pair::hom_space_gk(&fx, v)?;
    let eps = iv.counit(v.dim());
    let (dx, di) = (x.dim(), iv.module.dim());
    let mut images = Matrix::zeros(v.dim() * dx, h1.rank());
    for c in 0..h1.rank() {
        let alpha = Matrix::from_fn(di, dx, |i, j| h1.basis().get(i * dx + j, c).clone());
        let beta = &eps * &alpha;
        for i in 0..v.dim() {
            for j in 0..dx {
                images.set(i * dx + j, c, beta.get(i, j).clone());
            }
        }
    }
    Ok(iso_evidence(&h2, &images, h1.rank()))
}

/// `ε_{F X} ∘ F(η_X) = id`.
pub fn triangle_forgetful_i(f: &PairMap, x: &GKModule, window: &WeightWindow) -> Result<bool> {
    let fx = forgetful(f, x)?;
    let ifx = i_functor(f, &fx, window)?;
    let eta = unit_matrix(f, x, &ifx)?;
    Ok((&ifx.counit(x.dim()) * &eta).is_identity())
}

/// `I(ε_V) ∘ η_{I V} = id`; needs `I(V)` to be finite.
pub fn triangle_i_counit(f: &PairMap, v: &GKModule, window: &WeightWindow) -> Result<bool> {
    let iv = i_functor(f, v, window)?;
    let ivc = iv.module.closed()?;
    let eps = iv.counit(v.dim());
    let comps = unit_components(f, &ivc, 64)?;
    let mut cols = Vec::new();
    for cj in &comps {
        let mut mapped = Vec::new();
        for (m, k2, val) in cj {
            for k in 0..v.dim() {
                let c = eps.get(k, *k2);
                if !c.is_zero() {
                    mapped.push((m.clone(), k, c * val));
                }
            }
        }
        cols.push(iv.coordinates(&iv.ambient_vector(&mapped)?)?);
    }
    Ok(Matrix::from_columns(ivc.dim(), &cols).is_identity())
}

fn apply_monomial(module: &GKModule, c: &Matrix, m: &[u32], v: Vec<Elem>) -> Result<Vec<Elem>> {
    let mut v = v;
    for i in (0..m.len()).rev() {
        let col = c.column(i);
        for _ in 0..m[i] {
            if let Some(b) = module.boundary_act(&col) {
                if b.mul_vec(&v).iter().any(|x| !x.is_zero()) {
                    return Err(GkError::BoundaryLoss("ū-action leaves the window".into()));
                }
            }
            v = module.act(&col).mul_vec(&v);
        }
    }
    Ok(v)
}

/// `ε_{ind W} ∘ ind(η_W) = id`: `u^m · (1 ⊗ w_k) = u^m ⊗ w_k` on the window.
pub fn triangle_ind_unit(f: &PairMap, w: &GKModule, window: &WeightWindow) -> Result<bool> {
    let iw = ind(f, w, window)?;
    let c = f.complement().cloned().unwrap_or_else(|| Matrix::zeros(f.target().g().dim(), 0));
    let zero = vec![0u32; c.cols()];
    let n = iw.basis.len();
    for (i, (m, k)) in iw.basis.iter().enumerate() {
        let Some(start) = iw.index_of(&zero, *k) else { return Ok(false) };
        let mut v = vec![Elem::zero(); n];
        v[start] = Elem::one();
        let out = apply_monomial(&iw.module, &c, m, v)?;
        if (0..n).any(|j| out[j] != if j == i { Elem::one() } else { Elem::zero() }) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `F(ε_X) ∘ η_{F X} = id`.
pub fn triangle_ind_counit(f: &PairMap, x: &GKModule, window: &WeightWindow) -> Result<bool> {
    let fx = forgetful(f, x)?;
    let ifx = ind(f, &fx, window)?;
    let c = f.complement().cloned().unwrap_or_else(|| Matrix::zeros(f.target().g().dim(), 0));
    let n = x.dim();
    // ε_X on the whole window
    let mut eps = Matrix::zeros(n, ifx.basis.len());
    for (i, (m, k)) in ifx.basis.iter().enumerate() {
        let mut v = vec![Elem::zero(); n];
        v[*k] = Elem::one();
        let out = apply_monomial(x, &c, m, v)?;
        for (r, val) in out.into_iter().enumerate() {
            eps.set(r, i, val);
        }
    }
    let zero = vec![0u32; c.cols()];
    let mut eta = Matrix::zeros(ifx.basis.len(), n);
    for k in 0..n {
        let i = ifx.index_of(&zero, k).ok_or_else(|| GkError::BoundaryLoss("window misses 1 ⊗ x".into()))?;
        eta.set(i, k, Elem::one());
    }
    Ok((&eps * &eta).is_identity())
}

/// `ind(W)^c ≅ pro(W^c)` on mirrored windows: the interior structure
/// matrices agree after the sign `(-1)^{deg m}` of the principal
/// anti-automorphism.
pub fn easy_duality(f: &PairMap, w: &GKModule, window: &WeightWindow) -> Result<bool> {
    let iw = ind(f, w, window)?;
    let pw = pro(f, &dual_gk(w)?, &window.mirrored())?;
    if iw.basis.len() != pw.basis.len() {
        return Ok(false);
    }
    let perm: Vec<usize> = match iw.basis.iter().map(|(m, k)| pw.index_of(m, *k)).collect::<Option<Vec<_>>>() {
        Some(p) => p,
        None => return Ok(false),
    };
    let sign = |i: usize| if degree(&iw.basis[i].0).is_multiple_of(2) { Elem::one() } else { -Elem::one() };
    for x in 0..f.target().g().dim() {
        let a = iw.module.action_of(x);
        let p = pw.module.action_of(x);
        for i in 0..perm.len() {
            for j in 0..perm.len() {
                // (x ξ_j)(b_i) = -ξ_j(x b_i) = -a[j][i]
                let want = &(&(-a.get(j, i)) * &sign(i)) * &sign(j);
                if p.get(perm[i], perm[j]) != &want {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Per-weight comparison of `ind(W ⊗ F V)` with `ind(W) ⊗ V` through
/// `u^m ⊗ (w ⊗ v) ↦ u^m · ((1 ⊗ w) ⊗ v)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GradedComparison {
    pub weights: Vec<(Weight, usize)>,
    pub iso: bool,
}

pub fn tensor_identity(f: &PairMap, w: &GKModule, v: &GKModule, window: &WeightWindow) -> Result<GradedComparison> {
    let fv = forgetful(f, v)?;
    let lhs = ind(f, &tensor_gk(w, &fv)?, window)?;
    let rank = window.lo.len();
    // enlarge the window of ind(W) by the weight spread of V
    let mut lo = window.lo.clone();
    let mut hi = window.hi.clone();
    for k in 0..rank {
        let vmin = v.weights().iter().map(|x| x[k]).min().unwrap_or(0);
        let vmax = v.weights().iter().map(|x| x[k]).max().unwrap_or(0);
        lo[k] -= vmax;
        hi[k] -= vmin;
    }
    let iw = ind(f, w, &WeightWindow { lo, hi, cap: window.cap })?;
    let rhs = tensor_gk(&iw.module, v)?;
    let c = f.complement().cloned().unwrap_or_else(|| Matrix::zeros(f.target().g().dim(), 0));
    let zero = vec![0u32; c.cols()];
    let dv = v.dim();
    let mut images = Matrix::zeros(rhs.dim(), lhs.basis.len());
    for (col, (m, kk)) in lhs.basis.iter().enumerate() {
        let (a, b) = (kk / dv, kk % dv);
        let start = iw.index_of(&zero, a).ok_or_else(|| GkError::BoundaryLoss("window misses 1 ⊗ w".into()))?;
        let mut vec = vec![Elem::zero(); rhs.dim()];
        vec[start * dv + b] = Elem::one();
        let out = apply_monomial(&rhs, &c, m, vec)?;
        for (r, val) in out.into_iter().enumerate() {
            images.set(r, col, val);
        }
    }
    let mut by_weight: BTreeMap<Weight, (Vec<usize>, Vec<usize>)> = BTreeMap::new();
    for (i, wt) in lhs.module.weights().iter().enumerate() {
        by_weight.entry(wt.clone()).or_default().0.push(i);
    }
    for (i, wt) in rhs.weights().iter().enumerate() {
        if window.contains(wt) {
            by_weight.entry(wt.clone()).or_default().1.push(i);
        }
    }
    let ring = lhs.module.ring().clone();
    let mut iso = true;
    let mut weights = Vec::new();
    for (wt, (li, ri)) in by_weight {
        weights.push((wt, li.len()));
        if li.len() != ri.len() {
            iso = false;
            continue;
        }
        // images must not have components outside the weight space
        let block = images.select(&ri, &li);
        if !is_unimodular(&ring, &block) {
            iso = false;
        }
    }
    Ok(GradedComparison { weights, iso })
}

/// θ-stable data driving the orbit decomposition: the weights `α_i` of the
/// ū basis, the elements `h_x` as cocharacters, and `π₀` as permutations of
/// the `x` indices (including the identity).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThetaStableDatum {
    pub roots: Vec<Weight>,
    pub h: Vec<Vec<i64>>,
    pub pi0: Vec<Vec<usize>>,
}

impl ThetaStableDatum {
    pub fn connected(roots: Vec<Weight>, h: Vec<i64>) -> Self {
        ThetaStableDatum { roots, h: vec![h], pi0: vec![vec![0]] }
    }

    /// `α_i(h_x)`.
    pub fn value(&self, i: usize, x: usize) -> i64 {
        pairing(&self.roots[i], &self.h[x])
    }

    fn validate(&self) -> Result<()> {
        let nx = self.h.len();
        for p in &self.pi0 {
            let mut s = p.clone();
            s.sort();
            if s != (0..nx).collect::<Vec<_>>() {
                return Err(GkError::Validation("π₀ element is not a permutation of the h_x".into()));
            }
        }
        for i in 0..self.roots.len() {
            for x in 0..nx {
                if self.value(i, x) >= 0 {
                    return Err(GkError::Precondition(format!("α_{i}(h_{x}) = {} is not negative", self.value(i, x))));
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrbitBlock {
    /// Orbit representative of the value vector `(Σ n_i α_i(h_x))_x`.
    pub label: Vec<i64>,
    pub monomials: Vec<Monomial>,
    pub weights: Vec<Weight>,
    /// Whether every monomial of this block has degree within the cap.
    pub complete: bool,
}

/// Partition of the PBW monomials of `U(ū)` of degree `<= cap` into blocks.
pub fn orbit_decomposition(d: &ThetaStableDatum, cap: usize) -> Result<Vec<OrbitBlock>> {
    d.validate()?;
    let s = d.roots.len();
    let nx = d.h.len();
    let rank = d.roots.first().map_or(0, |r| r.len());
    let all: Vec<usize> = (0..s).collect();
    let mut blocks: BTreeMap<Vec<i64>, OrbitBlock> = BTreeMap::new();
    for m in monomials_in(s, &all, cap) {
        let r: Vec<i64> = (0..nx).map(|x| (0..s).map(|i| m[i] as i64 * d.value(i, x)).sum()).collect();
        let label = d.pi0.iter().map(|p| p.iter().map(|&x| r[x]).collect::<Vec<i64>>()).min().unwrap_or(r);
        let wt = monomial_weight(&d.roots, &m, rank);
        let b = blocks.entry(label.clone()).or_insert_with(|| OrbitBlock { label, monomials: vec![], weights: vec![], complete: true });
        b.monomials.push(m);
        b.weights.push(wt);
    }
    for b in blocks.values_mut() {
        // a monomial of value r at x has degree at most |r_x| / min_i |α_i(h_x)|
        let bound = (0..nx)
            .map(|x| {
                let amin = (0..s).map(|i| -d.value(i, x)).min().unwrap_or(1);
                (b.label.iter().map(|v| v.unsigned_abs()).max().unwrap_or(0) as i64 / amin.max(1)) as usize
            })
            .min()
            .unwrap_or(0);
        b.complete = bound <= cap;
    }
    let mut out: Vec<OrbitBlock> = blocks.into_values().collect();
    out.sort_by(|a, b| b.label.cmp(&a.label));
    Ok(out)
}

/// θ-stable datum for the complement of a map of pairs with a chosen `h`.
pub fn theta_datum(f: &PairMap, h: Vec<i64>) -> Result<ThetaStableDatum> {
    let c = f.complement().ok_or_else(|| GkError::Precondition("a complement ū is required".into()))?;
    let rank = f.target().torus_rank();
    let roots = (0..c.cols()).map(|j| column_weight(f.target().g_weights(), &c.column(j), rank)).collect::<Result<Vec<_>>>()?;
    Ok(ThetaStableDatum::connected(roots, h))
}

/// Graded ranks of `⊕_O Hom(U(ū)_O, Z)` on the window, block by block.
pub fn blockwise_hom_ranks(blocks: &[OrbitBlock], z: &GKModule, window: &WeightWindow) -> BTreeMap<Weight, usize> {
    let mut out = BTreeMap::new();
    for b in blocks {
        if b.monomials.iter().any(|m| degree(m) > window.cap) {
            continue;
        }
        for (m, mw) in b.monomials.iter().zip(&b.weights) {
            let _ = m;
            for zw in z.weights() {
                let wt = sub_weights(zw, mw);
                if window.contains(&wt) {
                    *out.entry(wt).or_insert(0) += 1;
                }
            }
        }
    }
    out
}

/// The torus module `U(ū)_{<= cap}` with its monomial grading.
pub fn enveloping_k_module(d: &ThetaStableDatum, ring: &crate::ring::BaseRing, cap: usize) -> Result<(KModule, Vec<Monomial>)> {
    let s = d.roots.len();
    let rank = d.roots.first().map_or(0, |r| r.len());
    let monos = monomials_in(s, &(0..s).collect::<Vec<_>>(), cap);
    let labels = monos.iter().map(|m| format!("{m:?}")).collect();
    let weights = monos.iter().map(|m| monomial_weight(&d.roots, m, rank)).collect();
    Ok((KModule::torus(ring.clone(), rank, labels, weights)?, monos))
}

/// Outcome of the descent criterion for a decomposition over `k'`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DescentReport {
    pub components: usize,
    pub direct_sum: bool,
    pub subcomodules_after_base_change: bool,
    pub defined_over_base: bool,
    pub subcomodules_over_base: bool,
}

impl DescentReport {
    pub fn passed(&self) -> bool {
        self.direct_sum && self.subcomodules_after_base_change && self.defined_over_base && self.subcomodules_over_base
    }
}

/// For `f = ℤ -> ℤ[i]`: given a decomposition of `V ⊗ ℤ[i]` into
/// subcomodules, checks that each component is defined over ℤ and that its
/// ℤ-form is a subcomodule of `V`.
pub fn descent_check(f: &RingMap, v: &KModule, components: &[Lattice]) -> Result<DescentReport> {
    if !f.is_finite_projective() {
        return Err(GkError::Precondition("descent check needs a finite projective ring map".into()));
    }
    let vk = v.base_change(f)?;
    let n = v.dim();
    let src = f.source().clone();
    let tgt = f.target().clone();
    let total: usize = components.iter().map(Lattice::rank).sum();
    let mut all = Matrix::zeros(n, 0);
    for c in components {
        all = all.hstack(c.basis());
    }
    let direct_sum = total == n && is_unimodular(&tgt, &all);
    let subcomodules_after_base_change = components.iter().all(|c| vk.is_subcomodule(c));
    let mut defined = true;
    let mut sub_base = true;
    let real_coords = Matrix::identity(2 * n).select_cols(&(0..n).map(|i| 2 * i).collect::<Vec<_>>());
    for c in components {
        // ℤ-points of the component inside ℤ^n ⊂ ℤ[i]^n
        let as_z = Lattice::span(&src, &c.basis().realify());
        let real = Lattice::from_basis_unchecked(&src, real_coords.clone());
        let pts = as_z.intersect(&real);
        let back = Matrix::from_fn(n, pts.rank(), |i, j| pts.basis().get(2 * i, j).clone());
        let l0 = Lattice::from_basis_unchecked(&src, back.clone());
        let l0k = Lattice::from_basis_unchecked(&tgt, back);
        if !l0k.same_as(c) {
            defined = false;
            continue;
        }
        if !v.is_subcomodule(&l0) {
            sub_base = false;
        }
    }
    Ok(DescentReport {
        components: components.len(),
        direct_sum,
        subcomodules_after_base_change,
        defined_over_base: defined,
        subcomodules_over_base: sub_base,
    })
}

/// Checks that `u` (columns in `q`-coordinates) spans an ideal of `q` and
/// returns the character `Λ^top u` as a module over the source pair.
pub fn top_exterior_character(f: &PairMap, u: &Matrix) -> Result<GKModule> {
    let q = f.source().g();
    let ring = q.ring().clone();
    let span = Lattice::from_basis_unchecked(&ring, u.clone());
    let rank = f.source().torus_rank();
    let mut traces = Vec::new();
    for i in 0..q.dim() {
        let ad = q.ad_basis(i);
        let img = &ad * u;
        let coords = span.coordinates_matrix(&img).ok_or_else(|| GkError::Validation("u is not an ideal of q".into()))?;
        traces.push(coords.trace());
    }
    let mut wt = vec![0; rank];
    for j in 0..u.cols() {
        wt = add_weights(&wt, &column_weight(f.source().g_weights(), &u.column(j), rank)?);
    }
    GKModule::character(f.source().clone(), wt, traces)
}

/// `A_q(λ) = Γ pro(λ ⊗ Λ^r u)` in the regime `u ∩ k = 0`.
pub fn aq_lambda(f: &PairMap, u: &Matrix, lambda: &GKModule, window: &WeightWindow) -> Result<Induced> {
    if !f.target().group().is_diagonalizable() {
        return Err(GkError::Unsupported("A_q(λ) needs a diagonalizable K".into()));
    }
    let ring = f.target().ring().clone();
    let ug = f.lie_part() * u;
    let psi = f.target().psi();
    let rk = |m: &Matrix| if m.cols() == 0 { 0 } else { crate::snf::smith_normal_form(&ring, m, crate::snf::Track::NONE).map(|s| s.rank()).unwrap_or(0) };
    let overlap = rk(psi) + rk(&ug) - rk(&psi.hstack(&ug));
    if overlap > 0 {
        return Err(GkError::Unsupported(format!(
            "dim(u ∩ k) = {overlap}: the derived Zuckerman functor in positive degree is not implemented"
        )));
    }
    let top = top_exterior_character(f, u)?;
    let w = tensor_gk(lambda, &top)?;
    i_functor(f, &w, window)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models;
    use crate::ring::BaseRing;

    fn z() -> BaseRing {
        BaseRing::Integers
    }

    #[test]
    fn ind_from_lower_borel() {
        let f = models::lower_borel_inclusion(z());
        let w = models::borel_character(z(), 3);
        let r = ind(&f, &w, &WeightWindow::interval(3, 13, 10)).unwrap();
        let wts: Vec<i64> = r.module.weights().iter().map(|w| w[0]).collect();
        assert_eq!(wts, vec![3, 5, 7, 9, 11, 13]);
    }

    #[test]
    fn pro_from_lower_borel_matches_formula() {
        let f = models::lower_borel_inclusion(z());
        for lambda in -2..5i64 {
            let w = models::borel_character(z(), lambda);
            let p = pro(&f, &w, &WeightWindow::interval(lambda - 12, lambda, 10)).unwrap();
            let (e, fm) = (p.module.action_of(0), p.module.action_of(2));
            for (i, (m, _)) in p.basis.iter().enumerate() {
                let n = m[0] as i64;
                if i > 0 {
                    assert_eq!(e.get(i - 1, i), &Elem::from_int(1));
                }
                if i + 1 < p.basis.len() {
                    assert_eq!(fm.get(i + 1, i), &Elem::from_int((n + 1) * (lambda - n)));
                }
            }
        }
    }

    #[test]
    fn borel_weil_lambda_two() {
        let f = models::borel_weil_map(z());
        let w = models::borel_character(z(), 2);
        let r = i_functor(&f, &w, &WeightWindow::interval(-12, 2, 10)).unwrap();
        assert_eq!(r.module.dim(), 3);
        let want = Lattice::diagonal(&z(), &[1, 1, 2].map(Elem::from_int)[..]);
        let top = Lattice::from_basis_unchecked(&z(), r.embedding.row_range(0, 3));
        assert!(top.same_as(&want));
        assert!(r.embedding.row_range(3, r.embedding.rows()).is_zero());
    }

    #[test]
    fn borel_weil_ranks() {
        let f = models::borel_weil_map(z());
        for lambda in -3..6i64 {
            let w = models::borel_character(z(), lambda);
            let r = i_functor(&f, &w, &WeightWindow::interval(lambda - 16, lambda, 12)).unwrap();
            assert_eq!(r.module.dim() as i64, (lambda + 1).max(0), "lambda = {lambda}");
            assert!(r.module.is_closed());
        }
    }

    #[test]
    fn aq_for_upper_borel() {
        let f = models::upper_borel_inclusion(z());
        let u = Matrix::from_i64(&[&[1], &[0]]);
        let lam = models::upper_borel_character(z(), 0);
        let r = aq_lambda(&f, &u, &lam, &WeightWindow::interval(2, 6, 8)).unwrap();
        let wts: Vec<i64> = r.module.weights().iter().map(|w| w[0]).collect();
        assert_eq!(wts, vec![2, 4, 6]);
    }

    #[test]
    fn aq_rejects_compact_overlap() {
        let f = models::borel_weil_map(z());
        let u = Matrix::from_i64(&[&[1], &[0]]);
        let lam = models::borel_character(z(), 0);
        assert!(aq_lambda(&f, &u, &lam, &WeightWindow::interval(-4, 4, 4)).is_err());
    }

    #[test]
    fn triangles_lower_borel() {
        let f = models::lower_borel_inclusion(z());
        let w = models::borel_character(z(), -1);
        let win = WeightWindow::interval(-1, 9, 10);
        assert!(triangle_ind_unit(&f, &w, &win).unwrap());
        let x = models::weyl_lattice_over(models::sl2_torus_pair(z()), 2);
        assert!(triangle_ind_counit(&f, &x, &WeightWindow::interval(-2, 8, 6)).unwrap());
    }

    #[test]
    fn triangles_borel_weil() {
        let f = models::borel_weil_map(z());
        let x = models::weyl_lattice(z(), 3);
        let win = WeightWindow::interval(-16, 3, 12);
        assert!(triangle_forgetful_i(&f, &x, &win).unwrap());
        let v = models::borel_character(z(), 3);
        assert!(triangle_i_counit(&f, &v, &WeightWindow::interval(-16, 3, 12)).unwrap());
    }

    #[test]
    fn adjunction_borel_weil() {
        let f = models::borel_weil_map(z());
        let v = models::borel_character(z(), 2);
        let win = WeightWindow::interval(-16, 2, 12);
        for n in 0..4 {
            let x = models::weyl_lattice(z(), n);
            let c = adjunction_certificate(&f, &x, &v, &win).unwrap();
            assert!(c.iso, "n = {n}: {c:?}");
        }
    }

    #[test]
    fn duality_and_tensor() {
        let f = models::lower_borel_inclusion(z());
        let w = models::borel_character(z(), 1);
        assert!(easy_duality(&f, &w, &WeightWindow::interval(1, 11, 5)).unwrap());
        let v = models::weyl_lattice_over(models::sl2_torus_pair(z()), 2);
        let t = tensor_identity(&f, &w, &v, &WeightWindow::interval(1, 7, 40)).unwrap();
        assert!(t.iso, "{t:?}");
    }

    #[test]
    fn torus_gamma() {
        let f = models::gl2_torus_zuckerman_map(z());
        let pair = models::gl2_rank_one_pair(z());
        let adj = GKModule::adjoint(pair).unwrap();
        let g = zuckerman_gamma(&f, &adj).unwrap();
        assert_eq!(g.module.dim(), 4);
        let ws: Vec<Weight> = g.module.weights().to_vec();
        assert!(ws.contains(&vec![1, -1]) && ws.contains(&vec![-1, 1]));
    }

    #[test]
    fn orbit_blocks_sl2() {
        let d = ThetaStableDatum::connected(vec![vec![-2]], vec![1]);
        let b = orbit_decomposition(&d, 4).unwrap();
        assert_eq!(b.len(), 5);
        assert!(b.iter().all(|x| x.monomials.len() == 1));
        assert_eq!(b[2].label, vec![-4]);
        let b0 = orbit_decomposition(&d, 0).unwrap();
        assert_eq!(b0.len(), 1);
        assert_eq!(b0[0].label, vec![0]);
    }

    #[test]
    fn h0_for_trivial_target() {
        let p = models::sl2_torus_pair(z());
        let f = models::to_trivial_map(p.clone());
        let v = models::weyl_lattice_over(p.clone(), 2);
        let r = i_functor(&f, &v, &WeightWindow::degrees(0)).unwrap();
        assert_eq!(r.module.dim(), 0);
        let t = GKModule::trivial(p, 2);
        assert_eq!(i_functor(&f, &t, &WeightWindow::degrees(0)).unwrap().module.dim(), 2);
    }

    #[test]
    fn parabolic_torus_instance() {
        let f = models::gl2_parabolic_torus_map(z());
        let w = models::parabolic_rank_one_character(z(), 2, -1);
        let r = i_functor(&f, &w, &WeightWindow::interval(3, 13, 8)).unwrap();
        let ws: Vec<Weight> = r.module.weights().to_vec();
        assert_eq!(ws, (0..6).map(|n| vec![2 + n, -1 - n]).collect::<Vec<_>>());
        let e11 = r.module.action_of(0);
        for n in 0..6 {
            assert_eq!(e11.get(n, n), &Elem::from_int(2 + n as i64));
        }
    }
}
