use btsigma::building::Truncation;
use btsigma::complex::{CellComplex, CellSet};
use btsigma::homology::{betti, boundary, induced_map_trivial, ChainComplexF2, F2Chain};
use btsigma::spherical::build_flag_building;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random 2-dimensional simplicial complex on `n` vertices, as a list of maximal simplices.
fn random_simplices(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen_bool(0.35) {
                out.push(vec![a, b]);
            }
            for c in b + 1..n {
                if rng.gen_bool(0.05) {
                    out.push(vec![a, b, c]);
                }
            }
        }
    }
    for v in 0..n {
        out.push(vec![v]);
    }
    out
}

fn complex_of(simplices: &[Vec<usize>]) -> CellComplex {
    let mut k = CellComplex::new();
    for s in simplices {
        k.add_simplex(s);
    }
    k.freeze();
    k
}

fn bettis(k: &CellComplex) -> Vec<usize> {
    let all = k.all_cells();
    (0..3).map(|d| betti(k, &all, d)).collect()
}

/// Euler characteristic equals the alternating sum of Betti numbers (reduced: minus one).
fn euler_check(k: &CellComplex) {
    let chi: i64 = (0..3).map(|d| (k.cells_of_dim(d).len() as i64) * if d % 2 == 0 { 1 } else { -1 }).sum();
    let b = bettis(k);
    assert_eq!(chi - 1, b[0] as i64 - b[1] as i64 + b[2] as i64);
}

#[test]
fn boundary_squares_to_zero_on_built_complexes() {
    let fano = build_flag_building(3, 2).unwrap();
    let t = Truncation::grow(3, 2, 1).unwrap();
    for k in [&fano.complex, &t.complex] {
        let _ = ChainComplexF2::new(k, &k.all_cells());
        for d in 1..=k.max_dim() {
            for &c in k.cells_of_dim(d) {
                let b = boundary(k, &F2Chain::new(d, [c]));
                assert!(boundary(k, &b).is_zero());
            }
        }
    }
}

#[test]
fn flag_building_is_a_wedge_of_circles() {
    // Fano flag complex: connected graph with 14 vertices and 21 edges, so b̃₁ = 21 − 14 + 1 = 8 = q³
    let b = build_flag_building(3, 2).unwrap();
    let all = b.complex.all_cells();
    assert_eq!((betti(&b.complex, &all, 0), betti(&b.complex, &all, 1)), (0, 8));
    let b3 = build_flag_building(3, 3).unwrap();
    assert_eq!(betti(&b3.complex, &b3.complex.all_cells(), 1), 27);
}

#[test]
fn betti_is_independent_of_insertion_order() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..30 {
        let mut s = random_simplices(&mut rng, 8);
        let base = complex_of(&s);
        euler_check(&base);
        let want = bettis(&base);
        for _ in 0..3 {
            s.shuffle(&mut rng);
            for simplex in s.iter_mut() {
                simplex.shuffle(&mut rng);
            }
            assert_eq!(bettis(&complex_of(&s)), want);
        }
    }
}

#[test]
fn induced_maps_are_monotone_in_the_target() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..40 {
        let s = random_simplices(&mut rng, 7);
        let k = complex_of(&s);
        let all = k.all_cells();
        let pick = |rng: &mut ChaCha8Rng, from: &CellSet, p: f64| -> CellSet {
            let tops: Vec<usize> = from.iter().copied().filter(|_| rng.gen_bool(p)).collect();
            k.closure(&tops.into_iter().collect())
        };
        let mid = pick(&mut rng, &all, 0.7);
        let small = pick(&mut rng, &mid, 0.6);
        for d in 0..2 {
            let into_mid = induced_map_trivial(&k, &small, &mid, d).unwrap();
            let into_all = induced_map_trivial(&k, &small, &all, d).unwrap();
            if into_mid.trivial {
                assert!(into_all.trivial);
            }
            if let Some(w) = &into_all.witness {
                // a cycle that survives in the larger complex survives in the smaller one
                let cc = ChainComplexF2::new(&k, &mid);
                assert!(cc.bounding_chain(w).unwrap().is_none());
                assert!(boundary(&k, w).is_zero());
            }
        }
    }
}

#[test]
fn id_mismatch_is_reported() {
    let k = complex_of(&[vec![0, 1], vec![2]]);
    let small = k.all_cells();
    let big: CellSet = k.closure(&[k.find(&[0, 1]).unwrap()].into_iter().collect());
    assert!(induced_map_trivial(&k, &small, &big, 0).is_err());
}

fn random_tree(rng: &mut ChaCha8Rng, n: usize) -> CellComplex {
    let mut s: Vec<Vec<usize>> = (1..n).map(|v| vec![rng.gen_range(0..v), v]).collect();
    s.push(vec![0]);
    complex_of(&s)
}

proptest! {
    #[test]
    fn fillings_are_unique_without_top_cycles(seed in any::<u64>(), n in 2usize..25) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = random_tree(&mut rng, n);
        let all = k.all_cells();
        let cc = ChainComplexF2::new(&k, &all);
        prop_assert_eq!(cc.betti(1), 0);
        prop_assert!(cc.cycle_basis(1).is_empty());
        let edges = k.cells_of_dim(1).to_vec();
        let c = F2Chain::new(1, edges.into_iter().filter(|_| rng.gen_bool(0.5)));
        let filled = cc.bounding_chain(&boundary(&k, &c)).unwrap();
        prop_assert_eq!(filled, Some(c));
    }

    #[test]
    fn boundary_of_boundary_vanishes(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = complex_of(&random_simplices(&mut rng, 7));
        let tris = k.cells_of_dim(2).to_vec();
        let c = F2Chain::new(2, tris.into_iter().filter(|_| rng.gen_bool(0.5)));
        prop_assert!(boundary(&k, &boundary(&k, &c)).is_zero());
    }
}
