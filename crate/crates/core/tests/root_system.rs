use btsigma::rational::{qr, Q};
use btsigma::root_system::{build_root_system, AffineHyperplane, Family, RootDatum};
use num_traits::{Signed, Zero};
use proptest::prelude::*;
use std::collections::BTreeSet;

fn types() -> Vec<(Family, usize)> {
    vec![(Family::A, 1), (Family::A, 2), (Family::A, 3), (Family::C, 2), (Family::C, 3), (Family::D, 3), (Family::D, 4)]
}

fn datum(i: usize) -> RootDatum {
    let (f, l) = types()[i];
    build_root_system(f, l).unwrap()
}

fn rational_vec(len: usize) -> impl Strategy<Value = Vec<Q>> {
    prop::collection::vec((-40i64..40, 1i64..9), len).prop_map(|v| v.into_iter().map(|(n, d)| qr(n, d)).collect())
}

fn case() -> impl Strategy<Value = (usize, Vec<Q>, usize, i64)> {
    (0..types().len()).prop_flat_map(|t| {
        let d = datum(t);
        (Just(t), rational_vec(d.ambient_dim), 0..d.roots.len(), -4i64..5)
    })
}

#[test]
fn root_counts() {
    for l in 1..6 {
        assert_eq!(build_root_system(Family::A, l).unwrap().roots.len(), l * (l + 1));
    }
    for l in 2..6 {
        assert_eq!(build_root_system(Family::C, l).unwrap().roots.len(), 2 * l * l);
    }
    for l in 3..6 {
        assert_eq!(build_root_system(Family::D, l).unwrap().roots.len(), 2 * l * (l - 1));
    }
    assert!(build_root_system(Family::D, 2).is_err());
    assert!(build_root_system(Family::C, 1).is_err());
}

#[test]
fn roots_are_closed_under_reflections() {
    for t in 0..types().len() {
        let d = datum(t);
        let set: BTreeSet<Vec<Q>> = d.roots.iter().cloned().collect();
        for i in 0..d.roots.len() {
            for r in &d.roots {
                assert!(set.contains(&d.reflect(i, r)));
            }
        }
    }
}

/// A point of `H_{β,k}` obtained by projecting `x` along β.
fn onto_wall(d: &RootDatum, beta: usize, k: i64, x: &[Q]) -> Vec<Q> {
    let b = &d.roots[beta];
    let c = (d.kappa(x, b) - Q::from_integer(k.into())) / d.kappa(b, b);
    x.iter().zip(b).map(|(xi, bi)| xi - &c * bi).collect()
}

proptest! {
    #[test]
    fn affine_reflection_is_an_involution((t, v, root, k) in case()) {
        let d = datum(t);
        let h = AffineHyperplane::new(&d, root, k);
        let once = d.affine_reflect(&h, &v).unwrap();
        prop_assert_eq!(d.affine_reflect(&h, &once).unwrap(), v.clone());
        // fixed points are exactly the wall
        let w = onto_wall(&d, h.root, h.level, &v);
        prop_assert!(h.contains(&d, &w));
        prop_assert_eq!(d.affine_reflect(&h, &w).unwrap(), w);
    }

    #[test]
    fn translation_is_a_product_of_parallel_reflections((t, v, root, k) in case()) {
        let d = datum(t);
        let neg = d.negate(root);
        let through_origin = d.affine_reflect(&AffineHyperplane::new(&d, root, 0), &v).unwrap();
        let composed = d.affine_reflect(&AffineHyperplane::new(&d, neg, k), &through_origin).unwrap();
        prop_assert_eq!(d.translation_action(root, k, &v).unwrap(), composed);
    }

    #[test]
    fn walls_map_to_walls((t, x, root, k) in case(), beta_seed in 0usize..1000, level in -3i64..4, y in rational_vec(8)) {
        let d = datum(t);
        let beta = beta_seed % d.roots.len();
        let h = AffineHyperplane::new(&d, root, k);
        let pts = [onto_wall(&d, beta, level, &x), onto_wall(&d, beta, level, &y[..d.ambient_dim])];
        let imgs: Vec<Vec<Q>> = pts.iter().map(|p| d.affine_reflect(&h, p).unwrap()).collect();
        let gamma = d.reflect(h.root, &d.roots[beta]);
        let g = d.root_index(&gamma);
        prop_assert!(g.is_some());
        let lv: Vec<Q> = imgs.iter().map(|p| d.kappa(p, &gamma)).collect();
        prop_assert_eq!(&lv[0], &lv[1]);
        prop_assert!(lv[0].is_integer());
        let image = AffineHyperplane::new(&d, g.unwrap(), lv[0].to_integer().try_into().unwrap());
        prop_assert!(imgs.iter().all(|p| image.contains(&d, p)));
    }

    #[test]
    fn cartan_entries_are_integers((t, _v, a, _k) in case(), b_seed in 0usize..1000) {
        let d = datum(t);
        let b = b_seed % d.roots.len();
        let c = d.cartan_pairing(&d.roots[b], &d.roots[a]).unwrap();
        prop_assert!(c.is_integer() && c.abs() <= Q::from_integer(2.into()));
        if a == b {
            prop_assert_eq!(c, Q::from_integer(2.into()));
        }
        prop_assert!(!d.kappa(&d.roots[a], &d.roots[a]).is_zero());
    }
}
