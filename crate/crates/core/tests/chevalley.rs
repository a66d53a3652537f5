use btsigma::chevalley::*;
use btsigma::rational::{pow_q, q, qr, vp, Q};
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn m(rows: Vec<Vec<Q>>) -> Matrix {
    Matrix { rows }
}

#[test]
fn relation_suite_sl2_sl3() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for n in [2, 3] {
        let r = check_relations(n, 200, &mut rng);
        assert!(r.all(), "{r:?}");
        assert_eq!(r.weyl_signs.len(), n * (n - 1) * n * (n - 1));
    }
}

#[test]
fn sl3_commutator_by_hand() {
    // (I + sE12)(I + tE23)(I − sE12)(I − tE23) = I + st E13
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..50 {
        let s = random_q(&mut rng);
        let t = random_q(&mut rng);
        let c = commutator(&x_elem(3, SlRoot::simple(1), &s), &x_elem(3, SlRoot::simple(2), &t)).unwrap();
        let z = Q::zero();
        let o = Q::one();
        let want = m(vec![vec![o.clone(), z.clone(), &s * &t], vec![z.clone(), o.clone(), z.clone()], vec![z.clone(), z.clone(), o]]);
        assert_eq!(c, want);
    }
}

#[test]
fn non_summable_roots_commute() {
    let a = SlRoot::new(3, 0, 1).unwrap();
    let b = SlRoot::new(3, 0, 2).unwrap();
    let c = commutator(&x_elem(3, a, &q(5)), &x_elem(3, b, &qr(2, 3))).unwrap();
    assert_eq!(c, Matrix::identity(3));
}

#[test]
fn weyl_signs_sl2_by_hand() {
    // w = [[0,1],[−1,0]]: w x_α(t) w⁻¹ = x_{−α}(−t)
    let a = SlRoot::simple(1);
    assert_eq!(weyl_conjugation_sign(2, a, a, &q(3)).unwrap(), Some(-1));
    assert_eq!(weyl_conjugation_sign(2, a, a.neg(), &q(3)).unwrap(), Some(-1));
}

#[test]
fn torus_conjugation_example() {
    let a = SlRoot::simple(1);
    let t = qr(3, 2);
    let s = q(5);
    let h = h_elem(2, a, &t).unwrap();
    let lhs = &(&h * &x_elem(2, a, &s)) * &h.inverse().unwrap();
    assert_eq!(lhs, x_elem(2, a, &(&t * &t * &s)));
}

#[test]
fn character_commutator_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for n in [2usize, 3] {
        let a = SlRoot::simple(1);
        for p in [2i64, 3, 5] {
            for _ in 0..50 {
                let s = random_q(&mut rng);
                let lhs = commutator(&h_elem(n, a, &q(p)).unwrap(), &x_elem(n, a, &s)).unwrap();
                assert_eq!(lhs, x_elem(n, a, &s).pow(p * p - 1).unwrap());
            }
        }
    }
}

#[test]
fn h_diag_and_multiplicative() {
    for p in [2i64, 3, 7] {
        assert_eq!(h_elem(2, SlRoot::simple(1), &q(p)).unwrap(), Matrix::diag(&[q(p), qr(1, p)]));
    }
    let a = SlRoot::simple(2);
    assert_eq!(&h_elem(3, a, &q(2)).unwrap() * &h_elem(3, a, &qr(5, 3)).unwrap(), h_elem(3, a, &qr(10, 3)).unwrap());
}

#[test]
fn torus_grid_is_free() {
    // (k_{i,p}) ↦ Π h_{α_i}(p^k) on a grid for SL_3, S = {2, 3}
    let mut seen = std::collections::HashMap::new();
    let range = -2..=2i64;
    for k1 in range.clone() {
        for k2 in range.clone() {
            for k3 in range.clone() {
                for k4 in range.clone() {
                    let mut g = Matrix::identity(3);
                    for (root, p, k) in [(1, 2, k1), (2, 2, k2), (1, 3, k3), (2, 3, k4)] {
                        g = &g * &h_elem(3, SlRoot::simple(root), &pow_q(p, k)).unwrap();
                    }
                    assert!(g.is_diagonal());
                    assert!(seen.insert(g, (k1, k2, k3, k4)).is_none());
                }
            }
        }
    }
    assert_eq!(seen.len(), 625);
}

#[test]
fn borel_decomposition() {
    let p = 5;
    let t = Matrix::diag(&[q(p), q(1), qr(1, p)]);
    let g = &t * &x_elem(3, SlRoot::simple(1), &q(7));
    let d = borel_decompose(&g).unwrap();
    assert_eq!(d.t, t);
    assert!(d.u.is_unipotent_upper());
    assert_eq!(&d.t * &d.u, g);
    let id = borel_decompose(&Matrix::identity(3)).unwrap();
    assert_eq!((id.t, id.u), (Matrix::identity(3), Matrix::identity(3)));
    assert_eq!(borel_decompose(&x_elem(2, SlRoot::simple(1).neg(), &q(1))).unwrap_err(), ChevalleyError::NotUpperTriangular);
}

#[test]
fn delta_multiplicative_and_characters_additive() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let s = [2u64, 3];
    let chars: Vec<CharacterVec> = (1..=2).flat_map(|k| s.iter().map(move |&p| CharacterVec::basis(2, &s, k, p))).collect();
    for _ in 0..100 {
        let g1 = random_borel(3, &s, &mut rng);
        let g2 = random_borel(3, &s, &mut rng);
        in_gamma(&g1, &s).unwrap();
        let g12 = &g1 * &g2;
        let d = |g: &Matrix| borel_decompose(g).unwrap().t;
        assert_eq!(d(&g12), &d(&g1) * &d(&g2));
        for chi in &chars {
            let lhs = character_eval(chi, &g12).unwrap();
            assert_eq!(lhs, character_eval(chi, &g1).unwrap() + character_eval(chi, &g2).unwrap());
        }
        let u = borel_decompose(&g1).unwrap().u;
        for chi in &chars {
            assert!(character_eval(chi, &u).unwrap().is_zero());
        }
    }
}

#[test]
fn commutators_of_gamma_are_unipotent() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..50 {
        let g = random_borel(3, &[2, 5], &mut rng);
        let h = random_borel(3, &[2, 5], &mut rng);
        assert!(commutator(&g, &h).unwrap().is_unipotent_upper());
    }
}

#[test]
fn kernel_of_difference_character() {
    // ker(χ_{1,p} − χ_{2,p}) ⇔ v_p(a11) = −v_p(a33) and v_p(a22) = 0
    let p = 3u64;
    let s = [p];
    let chi = CharacterVec::from_coefficients(2, &s, &[q(1), q(-1)]);
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut both = 0;
    for _ in 0..300 {
        let g = random_borel(3, &s, &mut rng);
        let v = |i: usize| vp(&g.rows[i][i], p).unwrap();
        let in_kernel = character_eval(&chi, &g).unwrap().is_zero();
        let direct = v(0) == -v(2) && v(1) == 0;
        assert_eq!(in_kernel, direct);
        both += usize::from(in_kernel);
    }
    assert!(both > 0);
}

#[test]
fn gamma_membership_rejections() {
    let s = [2u64];
    assert!(in_gamma(&Matrix::diag(&[q(3), qr(1, 3)]), &s).is_err());
    assert!(in_gamma(&Matrix::diag(&[q(2), qr(1, 2)]), &s).is_ok());
    assert!(in_gamma(&x_elem(2, SlRoot::simple(1), &qr(1, 3)), &s).is_err());
    let chi = CharacterVec::basis(1, &[2], 1, 5);
    assert_eq!(chi.validate().unwrap_err(), ChevalleyError::PrimeOutsideS(5));
}

proptest! {
    #[test]
    fn valuation_is_additive(a in 1i64..5000, b in 1i64..5000, c in 1i64..5000, d in 1i64..5000, p in prop::sample::select(vec![2u64, 3, 5, 7])) {
        let x = qr(a, b);
        let y = qr(-c, d);
        prop_assert_eq!(valuation(&(&x * &y), p).unwrap(), valuation(&x, p).unwrap() + valuation(&y, p).unwrap());
    }

    #[test]
    fn coefficients_round_trip(c in prop::collection::vec(-20i64..20, 6)) {
        let coeffs: Vec<Q> = c.iter().map(|&x| qr(x, 3)).collect();
        let chi = CharacterVec::from_coefficients(3, &[2, 7], &coeffs);
        prop_assert_eq!(chi.coefficients(), coeffs);
    }

    #[test]
    fn borel_round_trip(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(2..=4);
        let g = random_borel(n, &[3], &mut rng);
        let d = borel_decompose(&g).unwrap();
        prop_assert!(d.t.is_diagonal() && d.u.is_unipotent_upper());
        prop_assert_eq!(&d.t * &d.u, g);
    }
}
