mod common;

use common::*;
use gk_core::cohomology::{build_ce_complex, compute_cohomology, ext_gk};
use gk_core::kmodule::{generated_subcomodule, hom_k, internal_hom_k, invariants_k, maximal_subcomodule};
use gk_core::lie::LieAlgebra;
use gk_core::models;
use gk_core::pair::{dual_gk, hom_space_gk, validate_pair_module};
use gk_core::pbw::{Pbw, UElem};
use gk_core::scenario::{ErrorInfo, Report, Status, TaskOutcome};
use gk_core::snf::{kernel_basis, smith_normal_form, Track};
use gk_core::{BaseRing, Elem, Lattice, Matrix, RingMap};
use num_bigint::BigInt;
use proptest::prelude::*;
use rand::Rng;

fn int_matrix(max_dim: usize, bound: i64) -> impl Strategy<Value = Matrix> {
    (1..=max_dim, 1..=max_dim).prop_flat_map(move |(r, c)| {
        prop::collection::vec(-bound..=bound, r * c).prop_map(move |v| Matrix::from_fn(r, c, |i, j| Elem::from_int(v[i * c + j])))
    })
}

fn gaussian_matrix(max_dim: usize, bound: i64) -> impl Strategy<Value = Matrix> {
    (1..=max_dim, 1..=max_dim).prop_flat_map(move |(r, c)| {
        prop::collection::vec((-bound..=bound, -bound..=bound), r * c)
            .prop_map(move |v| Matrix::from_fn(r, c, |i, j| Elem::gaussian(v[i * c + j].0, v[i * c + j].1)))
    })
}

fn check_snf(ring: &BaseRing, a: &Matrix) -> Result<(), TestCaseError> {
    let snf = smith_normal_form(ring, a, Track::BOTH).unwrap();
    for w in snf.diag.windows(2) {
        prop_assert!(ring.divides(&w[0], &w[1]), "{} does not divide {}", w[0], w[1]);
    }
    let (u, v) = (snf.u().unwrap(), snf.v().unwrap());
    prop_assert_eq!(&(&(u * &snf.d_matrix()) * v), a);
    prop_assert!(u.is_over(ring) && v.is_over(ring));
    prop_assert!(ring.is_unit(&u.determinant()) && ring.is_unit(&v.determinant()));
    Ok(())
}

fn monomial_word(rng: &mut impl Rng, dim: usize, max_len: usize) -> Vec<usize> {
    let len = rng.gen_range(0..=max_len);
    (0..len).map(|_| rng.gen_range(0..dim)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn snf_reconstructs_over_z(a in int_matrix(8, 20)) {
        check_snf(&z(), &a)?;
    }

    #[test]
    fn snf_reconstructs_over_gaussian_integers(a in gaussian_matrix(5, 6)) {
        check_snf(&gaussian(), &a)?;
    }

    #[test]
    fn snf_matches_determinantal_divisors(a in int_matrix(4, 20)) {
        let snf = smith_normal_form(&z(), &a, Track::NONE).unwrap();
        let ours: Vec<BigInt> = snf.diag.iter().map(|d| d.to_bigint().unwrap()).collect();
        prop_assert_eq!(ours, brute_force_invariant_factors(&a));
    }

    #[test]
    fn kernel_is_saturated(a in int_matrix(6, 10)) {
        let k = kernel_basis(&z(), &a);
        prop_assert!((&a * &k).is_zero());
        prop_assert_eq!(k.cols(), a.cols() - rank_oracle(&a));
        let snf = smith_normal_form(&z(), &k, Track::NONE).unwrap();
        prop_assert!(snf.all_units());
    }

    #[test]
    fn localization_drops_unit_divisors(a in int_matrix(6, 20)) {
        let f = RingMap::new(z(), half()).unwrap();
        let over_z = smith_normal_form(&z(), &a, Track::NONE).unwrap();
        let over_half = smith_normal_form(&half(), &a.apply_ring_map(&f).unwrap(), Track::NONE).unwrap();
        let expected: Vec<Elem> = over_z.diag.iter().map(|d| half().canonical(d)).filter(|d| !half().is_unit(d)).collect();
        prop_assert_eq!(over_half.torsion(), expected);
        prop_assert_eq!(over_half.rank(), over_z.rank());
    }

    #[test]
    fn elements_round_trip_through_text(re in -50i64..50, im in -50i64..50, den in 1i64..12) {
        let x = Elem::from_parts(
            num_rational::BigRational::new(re.into(), den.into()),
            num_rational::BigRational::new(im.into(), 1.into()),
        );
        let back: Elem = x.to_string().parse().unwrap();
        prop_assert_eq!(back, x);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn adjoint_action_is_a_derivation(seed in any::<u64>()) {
        let mut r = rng(seed);
        for lie in [models::sl2(z()), models::gl2(z())] {
            let pbw = Pbw::new(&lie, 12);
            let d = lie.dim();
            let u = pbw.straighten(&monomial_word(&mut r, d, 3)).unwrap();
            let v = pbw.straighten(&monomial_word(&mut r, d, 3)).unwrap();
            let x: Vec<Elem> = (0..d).map(|_| int(r.gen_range(-2..=2))).collect();
            let lhs = pbw.adjoint_action(&x, &pbw.mul(&u, &v).unwrap()).unwrap();
            let mut rhs = pbw.mul(&pbw.adjoint_action(&x, &u).unwrap(), &v).unwrap();
            rhs.add_scaled(&pbw.mul(&u, &pbw.adjoint_action(&x, &v).unwrap()).unwrap(), &Elem::one());
            prop_assert!(lhs.sub(&rhs).is_zero());
        }
    }

    #[test]
    fn generated_subcomodules_are_idempotent_and_monotone(seed in any::<u64>()) {
        let mut r = rng(seed);
        let v = random_sl2t_module(&mut r, z(), 6);
        let v = models::weyl_lattice(z(), r.gen_range(0..5)).direct_sum(&v.with_pair(models::sl2_pair(z()))).unwrap();
        let k = v.k_module().unwrap();
        let n = k.dim();
        let pick = |r: &mut rand_chacha::ChaCha8Rng| -> Vec<Elem> { (0..n).map(|_| int(r.gen_range(-3..=3))).collect() };
        let s: Vec<Vec<Elem>> = (0..r.gen_range(1..3)).map(|_| pick(&mut r)).collect();
        let gen = generated_subcomodule(&k, &s, &z());
        prop_assert!(k.is_subcomodule(&gen));
        prop_assert!(generated_subcomodule(&k, &gen.basis_vectors(), &z()).same_as(&gen));
        let mut bigger = s.clone();
        bigger.push(pick(&mut r));
        prop_assert!(generated_subcomodule(&k, &bigger, &z()).contains(&gen));
    }

    #[test]
    fn maximal_subcomodule_is_the_largest(seed in any::<u64>()) {
        let mut r = rng(seed);
        let v = models::weyl_lattice(z(), r.gen_range(1..5));
        let v = v.direct_sum(&models::weyl_lattice(z(), r.gen_range(0..4))).unwrap();
        let k = v.k_module().unwrap();
        let n = k.dim();
        let pick = |r: &mut rand_chacha::ChaCha8Rng| -> Vec<Elem> { (0..n).map(|_| int(r.gen_range(-2..=2))).collect() };
        // W is a subcomodule; V0 = W + a random index-≤6 enlargement.
        let w = generated_subcomodule(&k, &[pick(&mut r)], &z());
        let extra = Lattice::from_vectors(&z(), n, &[pick(&mut r)]);
        let scaled: Vec<Elem> = (0..n).map(|i| int(r.gen_range(1..=6)) * Elem::from_int(i as i64 % 2)).collect();
        let v0 = w.sum(&extra).sum(&Lattice::diagonal(&z(), &scaled));
        let core = maximal_subcomodule(&k, &v0);
        prop_assert!(v0.contains(&core));
        prop_assert!(k.is_subcomodule(&core));
        prop_assert!(core.contains(&w));
        let v1 = v0.sum(&Lattice::from_vectors(&z(), n, &[pick(&mut r)]));
        prop_assert!(maximal_subcomodule(&k, &v1).contains(&core));
    }

    #[test]
    fn hom_k_is_invariants_of_internal_hom(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (a, b) = if r.gen_bool(0.5) {
            (random_sl2t_module(&mut r, z(), 6), random_sl2t_module(&mut r, z(), 6))
        } else {
            (random_torus_module(&mut r, z(), 2, 6), random_torus_module(&mut r, z(), 2, 6))
        };
        let (ka, kb) = (a.k_module().unwrap(), b.k_module().unwrap());
        let h = internal_hom_k(&ka, &kb).unwrap();
        let inv = invariants_k(&h);
        prop_assert!(inv.same_as(&hom_k(&ka, &kb).unwrap()));
        // Hom_K only sees the grading: weight-zero matrix units.
        let expected = (0..kb.dim()).flat_map(|i| (0..ka.dim()).map(move |j| (i, j)))
            .filter(|&(i, j)| kb.weights()[i] == ka.weights()[j]).count();
        prop_assert_eq!(inv.rank(), expected);
    }

    #[test]
    fn double_dual_is_the_identity(seed in any::<u64>()) {
        let mut r = rng(seed);
        let v = random_sl2t_module(&mut r, z(), 6);
        let dd = dual_gk(&dual_gk(&v).unwrap()).unwrap();
        prop_assert_eq!(dd.weights(), v.weights());
        prop_assert_eq!(dd.action(), v.action());
        prop_assert!(validate_pair_module(&dd).passed());
    }

    #[test]
    fn ce_complexes_square_to_zero(seed in any::<u64>()) {
        let mut r = rng(seed);
        let pair = models::lie_pair(models::sl2(z()));
        let n = r.gen_range(0..4);
        let v = scramble(&mut r, &models::weyl_lattice(z(), n)).with_pair(pair.clone());
        let c = build_ce_complex(&pair, &v).unwrap();
        for w in c.differentials().windows(2) {
            prop_assert!((&w[1] * &w[0]).is_zero());
        }
        let rep = compute_cohomology(&c).unwrap();
        let q_rep = compute_cohomology(&c.base_change(&RingMap::new(z(), q()).unwrap()).unwrap()).unwrap();
        let alt = |xs: &[usize]| xs.iter().enumerate().map(|(i, &x)| if i % 2 == 0 { x as i64 } else { -(x as i64) }).sum::<i64>();
        prop_assert_eq!(alt(&q_rep.free_ranks()), c.euler_characteristic());
        prop_assert_eq!(alt(&rep.free_ranks()), c.euler_characteristic());
    }

    #[test]
    fn ext_zero_is_hom(seed in any::<u64>()) {
        let mut r = rng(seed);
        let x = random_sl2t_module(&mut r, z(), 4);
        let y = random_sl2t_module(&mut r, z(), 4);
        let ext = ext_gk(&x, &y, 0).unwrap();
        let hom = hom_space_gk(&x, &y).unwrap();
        prop_assert_eq!(ext.free_ranks()[0], hom.rank());
        prop_assert!(ext.torsion(0).is_empty());
        prop_assert_eq!(hom.rank(), hom_rank_oracle(&x, &y));
    }
}

#[test]
fn straightened_generators_commute_up_to_brackets() {
    let lie: LieAlgebra = models::gl2(z());
    let pbw = Pbw::new(&lie, 4);
    for i in 0..lie.dim() {
        for j in 0..lie.dim() {
            let ij = pbw.straighten(&[i, j]).unwrap();
            let ji = pbw.straighten(&[j, i]).unwrap();
            let br = UElem::from_lie(&lie.bracket(&lie.unit_vector(i), &lie.unit_vector(j)));
            assert!(ij.sub(&ji).sub(&br).is_zero(), "[{i}, {j}]");
        }
    }
}

fn outcome(index: usize, status: Status, error: Option<i32>) -> TaskOutcome {
    TaskOutcome {
        index,
        op: "test".into(),
        input: serde_json::Value::Null,
        status,
        lines: vec![],
        data: serde_json::Value::Null,
        error: error.map(|code| ErrorInfo { code, message: String::new() }),
    }
}

fn report(tasks: Vec<TaskOutcome>) -> Report {
    let timing = vec![0; tasks.len()];
    Report { scenario: "t".into(), version: "0".into(), tasks, warnings: vec![], timing }
}

#[test]
fn exit_codes() {
    assert_eq!(report(vec![]).exit_code(), 0);
    assert_eq!(report(vec![outcome(0, Status::Ok, None), outcome(1, Status::Downgraded, None)]).exit_code(), 0);
    assert_eq!(report(vec![outcome(0, Status::Failed, None)]).exit_code(), 4);
    assert_eq!(report(vec![outcome(0, Status::Error, Some(3)), outcome(1, Status::Error, Some(2))]).exit_code(), 3);
    assert_eq!(report(vec![outcome(0, Status::Error, Some(3)), outcome(1, Status::Error, Some(4))]).exit_code(), 4);
    assert_eq!(report(vec![outcome(0, Status::Failed, None), outcome(1, Status::Error, Some(3))]).exit_code(), 4);
}
