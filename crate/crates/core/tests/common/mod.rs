//! Oracles and random instance generators shared by the integration tests.
//! The oracles deliberately avoid the library's SNF and lattice code.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::sync::Arc;

use gk_core::kmodule::Weight;
use gk_core::models;
use gk_core::pair::{dual_gk, tensor_gk, GKModule, PairDatum};
use gk_core::{BaseRing, Elem, Matrix};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn z() -> BaseRing {
    BaseRing::Integers
}

pub fn q() -> BaseRing {
    BaseRing::Rationals
}

pub fn half() -> BaseRing {
    BaseRing::localized(&[2]).unwrap()
}

pub fn gaussian() -> BaseRing {
    "Z[i]".parse().unwrap()
}

fn int_entries(m: &Matrix) -> Vec<Vec<BigInt>> {
    m.to_rows()
        .iter()
        .map(|r| r.iter().map(|x| x.to_bigint().expect("integer matrix")).collect())
        .collect()
}

fn rat_entries(m: &Matrix) -> Vec<Vec<BigRational>> {
    m.to_rows()
        .iter()
        .map(|r| {
            r.iter()
                .map(|x| {
                    assert!(x.is_real(), "real matrix expected");
                    x.re().clone()
                })
                .collect()
        })
        .collect()
}

/// Row-reduces in place over ℚ and returns the rank.
fn rank_q(mut a: Vec<Vec<BigRational>>) -> usize {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(r, p);
        let piv = a[r][c].clone();
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let k = &a[i][c] / &piv;
                for j in c..cols {
                    let d = &k * &a[r][j];
                    a[i][j] -= d;
                }
            }
        }
        r += 1;
    }
    r
}

fn det_q(mut a: Vec<Vec<BigRational>>) -> BigRational {
    let n = a.len();
    let mut det = BigRational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else { return BigRational::zero() };
        if p != c {
            a.swap(c, p);
            det = -det;
        }
        let piv = a[c][c].clone();
        det *= &piv;
        for i in c + 1..n {
            let k = &a[i][c] / &piv;
            for j in c..n {
                let d = &k * &a[c][j];
                a[i][j] -= d;
            }
        }
    }
    det
}

pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Invariant factors of an integer matrix from determinantal divisors:
/// `d_k` is the gcd of all `k x k` minors and `s_k = d_k / d_{k-1}`.
pub fn brute_force_invariant_factors(m: &Matrix) -> Vec<BigInt> {
    let a = int_entries(m);
    let (rows, cols) = (m.rows(), m.cols());
    let mut prev = BigInt::one();
    let mut out = Vec::new();
    for k in 1..=rows.min(cols) {
        let mut g = BigInt::zero();
        for rs in combinations(rows, k) {
            for cs in combinations(cols, k) {
                let sub: Vec<Vec<BigRational>> =
                    rs.iter().map(|&i| cs.iter().map(|&j| BigRational::from_integer(a[i][j].clone())).collect()).collect();
                let d = det_q(sub);
                assert!(d.is_integer());
                g = g.gcd(&d.to_integer());
            }
        }
        if g.is_zero() {
            break;
        }
        out.push(&g / &prev);
        prev = g;
    }
    out
}

/// Rank over ℚ of `{phi : Y -> X-weight-preserving, A_Y phi = phi A_X}`,
/// by plain elimination on the full linear system.
pub fn hom_rank_oracle(x: &GKModule, y: &GKModule) -> usize {
    let (n, m) = (x.dim(), y.dim());
    let nv = n * m;
    let var = |i: usize, j: usize| i * n + j;
    let mut rows: Vec<Vec<BigRational>> = Vec::new();
    for (ax, ay) in x.action().iter().zip(y.action()) {
        let (ax, ay) = (rat_entries(ax), rat_entries(ay));
        for r in 0..m {
            for j in 0..n {
                let mut row = vec![BigRational::zero(); nv];
                for i in 0..m {
                    row[var(i, j)] += &ay[r][i];
                }
                for k in 0..n {
                    row[var(r, k)] -= &ax[k][j];
                }
                rows.push(row);
            }
        }
    }
    for i in 0..m {
        for j in 0..n {
            if x.weights()[j] != y.weights()[i] {
                let mut row = vec![BigRational::zero(); nv];
                row[var(i, j)] = BigRational::one();
                rows.push(row);
            }
        }
    }
    nv - rank_q(rows)
}

/// Rank over ℚ of a real matrix.
pub fn rank_oracle(m: &Matrix) -> usize {
    rank_q(rat_entries(m))
}

/// A random product of elementary integer matrices that only mixes basis
/// vectors of equal weight.
pub fn weight_preserving_unimodular(rng: &mut ChaCha8Rng, weights: &[Weight]) -> Matrix {
    let n = weights.len();
    let mut p = Matrix::identity(n);
    let mut groups: BTreeMap<&Weight, Vec<usize>> = BTreeMap::new();
    for (i, w) in weights.iter().enumerate() {
        groups.entry(w).or_default().push(i);
    }
    for idx in groups.values() {
        if idx.len() < 2 {
            if rng.gen_bool(0.3) {
                p.scale_col(idx[0], &Elem::from_int(-1));
            }
            continue;
        }
        for _ in 0..3 * idx.len() {
            let a = *idx.choose(rng).unwrap();
            let b = *idx.choose(rng).unwrap();
            if a != b {
                p.add_col_multiple(a, b, &Elem::from_int(rng.gen_range(-2..=2)));
            }
        }
    }
    p
}

pub fn scramble(rng: &mut ChaCha8Rng, v: &GKModule) -> GKModule {
    let p = weight_preserving_unimodular(rng, v.weights());
    v.change_basis(&p).expect("weight-preserving unimodular change of basis")
}

fn sum_all(parts: Vec<GKModule>) -> GKModule {
    let mut it = parts.into_iter();
    let mut acc = it.next().expect("at least one summand");
    for p in it {
        acc = acc.direct_sum(&p).unwrap();
    }
    acc
}

/// Summands of a random `(sl₂, T)`-module: Weyl lattices, their duals, and
/// the trivial module.
fn sl2t_piece(rng: &mut ChaCha8Rng, pair: &Arc<PairDatum>, budget: usize) -> GKModule {
    let n = rng.gen_range(0..budget);
    let w = models::weyl_lattice_over(pair.clone(), n);
    match rng.gen_range(0..3) {
        0 => w,
        1 => dual_gk(&w).unwrap(),
        _ => GKModule::trivial(pair.clone(), 1),
    }
}

/// A random finitely generated `(sl₂, T)`-module of rank at most `max_rank`
/// over `ring`, in a scrambled basis.
pub fn random_sl2t_module(rng: &mut ChaCha8Rng, ring: BaseRing, max_rank: usize) -> GKModule {
    let pair = models::sl2_torus_pair(ring);
    let mut parts = Vec::new();
    let mut used = 0;
    while used < max_rank {
        let p = sl2t_piece(rng, &pair, max_rank - used);
        used += p.dim();
        parts.push(p);
        if rng.gen_bool(0.4) {
            break;
        }
    }
    scramble(rng, &sum_all(parts))
}

/// A random module over the split torus pair `(h_r, T_r)`: a sum of
/// characters, scrambled.
pub fn random_torus_module(rng: &mut ChaCha8Rng, ring: BaseRing, r: usize, max_rank: usize) -> GKModule {
    let pair = models::torus_pair(ring, r);
    let n = rng.gen_range(1..=max_rank);
    let parts = (0..n)
        .map(|_| {
            let w: Weight = (0..r).map(|_| rng.gen_range(-1..=1)).collect();
            let scalars = w.iter().map(|&c| Elem::from_int(c)).collect();
            GKModule::character(pair.clone(), w, scalars).unwrap()
        })
        .collect();
    scramble(rng, &sum_all(parts))
}

/// The determinant power `det^k` of `(gl₂, T²)`.
pub fn gl2_det(ring: BaseRing, k: i64) -> GKModule {
    let pair = models::gl2_torus_pair(ring);
    GKModule::character(pair, vec![k, k], vec![Elem::from_int(k), Elem::zero(), Elem::zero(), Elem::from_int(k)]).unwrap()
}

/// A random `(gl₂, T²)`-module of rank at most `max_rank`.
pub fn random_gl2_module(rng: &mut ChaCha8Rng, ring: BaseRing, max_rank: usize) -> GKModule {
    let pair = models::gl2_torus_pair(ring.clone());
    let mut parts = Vec::new();
    let mut used = 0;
    loop {
        let k = rng.gen_range(-1..=1);
        let piece = match rng.gen_range(0..4) {
            0 => tensor_gk(&models::gl2_standard(ring.clone()), &gl2_det(ring.clone(), k)).unwrap(),
            1 => dual_gk(&models::gl2_standard(ring.clone())).unwrap(),
            2 => GKModule::adjoint(pair.clone()).unwrap(),
            _ => gl2_det(ring.clone(), k),
        };
        if used + piece.dim() > max_rank {
            if parts.is_empty() {
                continue;
            }
            break;
        }
        used += piece.dim();
        parts.push(piece);
        if rng.gen_bool(0.4) {
            break;
        }
    }
    scramble(rng, &sum_all(parts))
}

/// Independent count of Weyl summands: `Hom(V(a), V(b))` over ℚ is `δ_ab`,
/// so the rank is `Σ_n m_X(n) m_Y(n)` with multiplicities read off the
/// characters.
pub fn sl2_multiplicities(v: &GKModule) -> BTreeMap<i64, usize> {
    let mut dims: BTreeMap<i64, i64> = BTreeMap::new();
    for w in v.weights() {
        *dims.entry(w[0]).or_insert(0) += 1;
    }
    let mut out = BTreeMap::new();
    let top = dims.keys().map(|k| k.abs()).max().unwrap_or(0);
    for n in (0..=top).rev() {
        let here = *dims.get(&n).unwrap_or(&0) - *dims.get(&(n + 2)).unwrap_or(&0);
        if here > 0 {
            out.insert(n, here as usize);
        }
    }
    out
}

pub fn int(n: i64) -> Elem {
    Elem::from_int(n)
}

pub fn abs_elems(v: &[Elem]) -> Vec<BigInt> {
    v.iter().map(|x| x.to_bigint().expect("integer").abs()).collect()
}
