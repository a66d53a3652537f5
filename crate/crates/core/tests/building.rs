use btsigma::building::heights::*;
use btsigma::building::lattice::{self, class_form, elementary_exponents, hermite_form, mul, Mat};
use btsigma::building::{retract_lattice, Center, Truncation};
use btsigma::chevalley::{self, character_eval, random_borel, CharacterVec, Matrix, SlRoot};
use btsigma::complex::CellSet;
use btsigma::coxeter::{HeightForm, Window};
use btsigma::rational::{pow_q, q, qr, vp, Q};
use num_traits::{Signed, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeMap, HashMap, VecDeque};

fn ints(rows: &[&[i64]]) -> Mat {
    rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect()
}

/// Sum of the last j Hermite exponents equals the least valuation of a j×j minor on the bottom j rows.
fn oracle_exponents(m: &Mat, p: u64) -> Vec<i64> {
    let n = m.len();
    let mut partial = vec![0i64; n + 1];
    for j in 1..=n {
        let rows: Vec<usize> = (n - j..n).collect();
        let mut best: Option<i64> = None;
        let cols_all: Vec<Vec<usize>> = (0..1u32 << n).filter(|c| c.count_ones() as usize == j).map(|c| (0..n).filter(|i| c >> i & 1 == 1).collect()).collect();
        for cs in cols_all {
            let sub = Matrix { rows: rows.iter().map(|&i| cs.iter().map(|&c| m[i][c].clone()).collect()).collect() };
            if let Some(v) = vp(&sub.det(), p) {
                best = Some(best.map_or(v, |b| b.min(v)));
            }
        }
        partial[j] = best.unwrap();
    }
    // a_{n−j+1} = partial[j] − partial[j−1]
    let mut a = vec![0i64; n];
    for j in 1..=n {
        a[n - j] = partial[j] - partial[j - 1];
    }
    a
}

fn random_gl_q<R: Rng>(n: usize, p: u64, rng: &mut R) -> Mat {
    loop {
        let m: Mat = (0..n)
            .map(|_| (0..n).map(|_| q(rng.gen_range(-6..=6)) * pow_q(p, rng.gen_range(-2..=2)) / q(rng.gen_range(1..=4))).collect())
            .collect();
        if !(Matrix { rows: m.clone() }).det().is_zero() {
            return m;
        }
    }
}

fn random_sl_z<R: Rng>(n: usize, rng: &mut R) -> Mat {
    let mut g = Matrix::identity(n);
    for _ in 0..6 {
        let i = rng.gen_range(0..n);
        let j = (i + rng.gen_range(1..n)) % n;
        g = &g * &chevalley::x_elem(n, SlRoot { i, j }, &q(rng.gen_range(-3..=3)));
    }
    g.rows
}

#[test]
fn tree_sphere_sizes() {
    for p in [2u64, 3] {
        let t = Truncation::grow_centered(2, p, 4, Center::BaseVertex).unwrap();
        let mut counts = BTreeMap::new();
        for &d in &t.vertex_depth {
            *counts.entry(d).or_insert(0u64) += 1;
        }
        for k in 1..=4u32 {
            assert_eq!(counts[&(k as usize)], (p + 1) * p.pow(k - 1), "p={p} k={k}");
        }
        assert_eq!(counts[&0], 1);
    }
}

#[test]
fn small_truncations() {
    let t = Truncation::grow_centered(2, 2, 2, Center::BaseVertex).unwrap();
    assert_eq!(t.num_vertices(), 10);
    assert_eq!(t.chambers.len(), 9);
    let t = Truncation::grow(2, 3, 1).unwrap();
    assert_eq!(t.chambers.len(), 7);
    let t = Truncation::grow(3, 2, 0).unwrap();
    assert_eq!(t.chambers.len(), 1);
    assert_eq!(t.complex.len(), 7);
    assert!(Truncation::grow(2, 4, 1).is_err());
    assert!(Truncation::grow(4, 2, 1).is_err());
}

#[test]
fn interior_panels_have_p_plus_one_chambers() {
    for (n, p, r) in [(2, 2, 3), (2, 5, 2), (3, 2, 2), (3, 3, 1)] {
        let t = Truncation::grow(n, p, r).unwrap();
        let panels = t.interior_panels();
        assert!(!panels.is_empty());
        for pn in panels {
            assert_eq!(t.panel_degree(pn) as u64, p + 1, "n={n} p={p}");
        }
    }
    let t = Truncation::grow_centered(3, 2, 2, Center::BaseVertex).unwrap();
    for pn in t.interior_panels() {
        assert_eq!(t.panel_degree(pn), 3);
    }
}

#[test]
fn hermite_exponents_match_minor_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..200 {
        let n = rng.gen_range(2..=3);
        let p = [2u64, 3, 5][rng.gen_range(0..3)];
        let g = random_gl_q(n, p, &mut rng);
        let (h, e) = hermite_form(&g, p).unwrap();
        assert_eq!(e, oracle_exponents(&g, p));
        assert_eq!(class_form(&h, p).unwrap(), class_form(&g, p).unwrap());
        assert!(lattice::contains(&g, &h, p) && lattice::contains(&h, &g, p));
    }
}

#[test]
fn class_is_invariant_under_integral_change_of_basis() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..100 {
        let p = 3;
        let g = random_gl_q(3, p, &mut rng);
        let k = random_sl_z(3, &mut rng);
        assert_eq!(class_form(&mul(&g, &k), p).unwrap(), class_form(&g, p).unwrap());
        let c = pow_q(p, rng.gen_range(-3..=3));
        assert_eq!(class_form(&lattice::scale(&g, &c), p).unwrap(), class_form(&g, p).unwrap());
    }
}

#[test]
fn retraction_example_and_identity_on_apartment() {
    for p in [2u64, 3, 5] {
        let g = vec![vec![q(1), q(0)], vec![qr(1, p as i64), q(1)]];
        assert_eq!(retract_lattice(&g, p), vec![-2]);
    }
    let t = Truncation::grow(3, 2, 3).unwrap();
    for c in 0..t.complex.len() {
        if t.in_standard_apartment(c) {
            for &v in t.complex.vertices_of(c) {
                let m = &t.lattices[v];
                let a: Vec<i64> = (0..3).map(|i| vp(&m[i][i], 2).unwrap()).collect();
                assert_eq!(t.retraction[v], lattice::y_of_exponents(&a));
            }
        }
        // idempotent: retracting the image vertex gives the image back
        for &v in t.complex.vertices_of(c) {
            let y = &t.retraction[v];
            let img = lattice::diagonal(&lattice::exponents_of_y(y), 2);
            assert_eq!(&retract_lattice(&img, 2), y);
        }
    }
}

#[test]
fn retraction_is_injective_on_apartments_toward_sigma() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let p = 2;
    let t = Truncation::grow(3, p, 3).unwrap();
    for _ in 0..5 {
        let mut u = Matrix::identity(3).rows;
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            u[i][j] = q(rng.gen_range(0..4)) / pow_q(p, rng.gen_range(0..=2));
        }
        let uinv = lattice::inverse(&u);
        let in_apartment = |v: usize| {
            let m = class_form(&mul(&uinv, &t.lattices[v]), p).unwrap();
            (0..3).all(|i| (0..3).all(|j| i == j || m[i][j].is_zero()))
        };
        let cells: Vec<usize> = (0..t.complex.len()).filter(|&c| t.complex.vertices_of(c).iter().all(|&v| in_apartment(v))).collect();
        assert!(!cells.is_empty());
        let mut images = HashMap::new();
        for &c in &cells {
            assert!(images.insert(t.retract(c).clone(), c).is_none(), "two cells of one apartment share an image");
        }
        for _ in 0..10 {
            let d: Vec<i64> = (0..3).map(|_| rng.gen_range(-3..=3)).collect();
            let k = random_sl_z(3, &mut rng);
            let l = mul(&mul(&u, &lattice::diagonal(&d, p)), &k);
            assert_eq!(retract_lattice(&l, p), lattice::y_of_exponents(&d));
        }
    }
}

fn graph_distances(t: &Truncation, from: usize) -> HashMap<usize, usize> {
    let mut adj: HashMap<usize, Vec<usize>> = HashMap::new();
    for &e in &t.cells_of_dim(1) {
        let vs = t.complex.vertices_of(e);
        adj.entry(vs[0]).or_default().push(vs[1]);
        adj.entry(vs[1]).or_default().push(vs[0]);
    }
    let mut dist = HashMap::from([(from, 0usize)]);
    let mut queue = VecDeque::from([from]);
    while let Some(x) = queue.pop_front() {
        for &y in adj.get(&x).into_iter().flatten() {
            if !dist.contains_key(&y) {
                dist.insert(y, dist[&x] + 1);
                queue.push_back(y);
            }
        }
    }
    dist
}

#[test]
fn tree_fibers_match_projection_oracle() {
    for p in [2u64, 3] {
        let t = Truncation::grow_centered(2, p, 2, Center::BaseVertex).unwrap();
        let apartment: Vec<usize> = (0..t.num_vertices()).filter(|&v| t.lattices[v][0][1].is_zero()).collect();
        let mut fiber: BTreeMap<i64, usize> = BTreeMap::new();
        let mut oracle: BTreeMap<i64, usize> = BTreeMap::new();
        for v in 0..t.num_vertices() {
            *fiber.entry(t.retraction[v][0]).or_insert(0) += 1;
            let d = graph_distances(&t, v);
            let (&m, &dm) = apartment.iter().map(|a| (a, &d[a])).min_by_key(|(_, &d)| d).unwrap();
            *oracle.entry(t.retraction[m][0] - dm as i64).or_insert(0) += 1;
        }
        assert_eq!(fiber, oracle);
        // y = −2 within distance 2: p children under each of the p downward neighbours of v0
        assert_eq!(fiber[&-2], (p * p) as usize);
    }
}

#[test]
fn height_equivariance_under_gamma() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for (n, p) in [(2usize, 3u64), (3, 2)] {
        let t = Truncation::grow(n, p, 2).unwrap();
        for _ in 0..20 {
            let lam: Vec<Q> = (0..n - 1).map(|_| q(rng.gen_range(-4..=4))).collect();
            let chi = CharacterVec::from_coefficients(n - 1, &[p], &lam);
            let h = HeightSpec::from_character(&chi, p);
            let ks: Vec<i64> = (0..n - 1).map(|_| rng.gen_range(-2..=2)).collect();
            let mut gamma = Matrix::identity(n);
            for (i, &k) in ks.iter().enumerate() {
                gamma = &gamma * &chevalley::h_elem(n, SlRoot::simple(i + 1), &pow_q(p, k)).unwrap();
            }
            let borel = random_borel(n, &[p], &mut rng);
            for g in [gamma, borel] {
                let cg = character_eval(&chi, &g).unwrap();
                let v = rng.gen_range(0..t.num_vertices());
                let moved = act_lattice(&g.rows, &t.lattices[v], p);
                assert_eq!(h.eval_lattice(&moved, p), t.vertex_height(&h, v) + &cg);
            }
        }
    }
}

#[test]
fn tree_height_steps() {
    let t = Truncation::grow(2, 2, 2).unwrap();
    let h = HeightSpec::new(vec![q(1)]);
    assert!(t.vertex_height(&h, t.base_vertex).is_zero());
    for v in t.apartment_vertex(&[1]).into_iter().chain(t.apartment_vertex(&[-1])) {
        assert_eq!(t.vertex_height(&h, v).abs(), q(1));
    }
    let zero = HeightSpec::new(vec![q(0)]);
    for c in 0..t.complex.len() {
        assert_eq!(t.height_eval(&zero, c), (q(0), q(0)));
    }
}

#[test]
fn superlevel_complexes() {
    let t = Truncation::grow(2, 3, 3).unwrap();
    let h = HeightSpec::new(vec![qr(3, 2)]);
    assert_eq!(t.superlevel_complex(&h, None), t.complex.all_cells());
    assert!(t.superlevel_complex(&h, Some(&q(1000))).is_empty());
    let brute: CellSet = (0..t.complex.len()).filter(|&c| t.complex.vertices_of(c).iter().all(|&v| t.vertex_height(&h, v) >= q(0))).collect();
    assert_eq!(t.superlevel_complex(&h, Some(&q(0))), brute);
    let mut prev = t.complex.all_cells();
    for r in -6..=6 {
        let cur = t.superlevel_complex(&h, Some(&q(r)));
        assert!(cur.is_subset(&prev));
        assert!(t.complex.is_face_closed(&cur));
        prev = cur;
    }
}

#[test]
fn retraction_preimages() {
    let t = Truncation::grow_centered(2, 2, 3, Center::BaseVertex).unwrap();
    let w = Window::with_radius(t.apartment.clone(), 4).unwrap();
    assert_eq!(t.retraction_preimage(&w, &w.all_cells()), t.complex.all_cells());
    // closed edge [y=−2, y=−1]: p downward neighbours of v0, each with p children
    let e = w.chambers().iter().copied().find(|&c| w.floors(c) == vec![-2]).unwrap();
    let z = w.complex.closure_of(e);
    let pre = t.retraction_preimage(&w, &z);
    let edges = pre.iter().filter(|&&c| t.complex.dim(c) == 1).count();
    let brute = t.cells_of_dim(1).into_iter().filter(|&c| {
        let mut ys: Vec<i64> = t.complex.vertices_of(c).iter().map(|&v| t.retraction[v][0]).collect();
        ys.sort();
        ys == vec![-2, -1]
    });
    assert_eq!(edges, brute.count());
    assert_eq!(edges, 4);
}

#[test]
fn tree_negative_certificate() {
    let t = Truncation::grow(2, 2, 6).unwrap();
    let h = HeightSpec::new(vec![q(1)]);
    let cert = cone_chain(&t, &default_cone_matrix(2), &h, &q(3), &q(1), &q(2)).unwrap();
    assert!(cert.all(), "{cert:?}");
    assert_eq!(cert.boundary.len(), 2);
    assert_eq!(cert.chain.len(), 6);
    for &b in &cert.boundary {
        assert_eq!(t.height_eval(&h, b), (q(3), q(3)));
    }
    assert!(cert.branching.values().all(|&b| b == 1));
}

#[test]
fn cone_outside_truncation_is_reported() {
    let t = Truncation::grow(2, 2, 2).unwrap();
    let h = HeightSpec::new(vec![q(1)]);
    assert!(cone_chain(&t, &default_cone_matrix(2), &h, &q(5), &q(1), &q(2)).is_err());
    // the identity apartment contains σ itself, which is not opposite σ
    let id = lattice::diagonal(&[0, 0], 2);
    assert!(cone_chain(&t, &id, &h, &q(1), &q(0), &q(1)).is_err());
}

#[test]
fn sl3_cone_apartment_is_opposite() {
    let g = default_cone_matrix(3);
    for perm in btsigma::spherical::permutations(3) {
        assert!(flag_opposite_standard(&g, &perm));
    }
    let id = lattice::diagonal(&[0, 0, 0], 2);
    assert!(!flag_opposite_standard(&id, &[0, 1, 2]));
}

#[test]
fn tree_positive_direction_is_nonempty() {
    let t = Truncation::grow_centered(2, 2, 5, Center::BaseVertex).unwrap();
    for a in [q(-1), qr(-1, 2), q(-3)] {
        for r in [q(-1), q(0), q(1)] {
            let cert = positive_certificate(&t, &HeightForm::new(vec![a.clone()]), &r, 2).unwrap();
            assert!(cert.nonempty);
        }
    }
    assert!(positive_certificate(&t, &HeightForm::new(vec![q(1)]), &q(0), 2).is_err());
}

#[test]
fn sl3_positive_direction_is_connected() {
    let t = Truncation::grow(3, 2, 3).unwrap();
    for a in [vec![q(-1), q(-1)], vec![q(-1), qr(-1, 2)], vec![qr(-1, 3), q(-2)]] {
        for r in [q(-1), q(0)] {
            let cert = positive_certificate(&t, &HeightForm::new(a.clone()), &r, 1).unwrap();
            assert!(cert.nonempty && cert.connected, "{cert:?}");
        }
    }
}

#[test]
fn retracted_minimal_galleries_toward_sigma_stay_minimal() {
    let t = Truncation::grow(3, 2, 2).unwrap();
    let w = Window::with_radius(t.apartment.clone(), 4).unwrap();
    let sigma = t.apartment.sigma();
    let chamber_of = |c: usize| w.id_of(t.retract(c)).unwrap();
    for v in 0..t.num_vertices() {
        if t.vertex_depth[v] > 1 {
            continue;
        }
        let vc = t.complex.vertex_cell(v).unwrap();
        let star: Vec<usize> = t.chambers.iter().copied().filter(|&c| t.complex.is_face(vc, c)).collect();
        if star.len() < 21 {
            continue;
        }
        let target_img = w.project_toward(w.id_of(t.retract(vc)).unwrap(), &sigma).unwrap();
        let proj: Vec<usize> = star.iter().copied().filter(|&c| chamber_of(c) == target_img).collect();
        assert_eq!(proj.len(), 1, "projection toward σ is unique in the star");
        // minimal galleries inside the star toward the projection chamber
        let set: std::collections::HashSet<usize> = star.iter().copied().collect();
        let mut dist = HashMap::from([(proj[0], 0usize)]);
        let mut queue = VecDeque::from([proj[0]]);
        while let Some(x) = queue.pop_front() {
            for y in t.complex.chamber_neighbors(x) {
                if set.contains(&y) && !dist.contains_key(&y) {
                    dist.insert(y, dist[&x] + 1);
                    queue.push_back(y);
                }
            }
        }
        for &c in &star {
            let d = dist[&c];
            assert_eq!(w.gallery_distance(chamber_of(c), target_img).unwrap(), d);
        }
    }
}

#[test]
fn sectors_toward_sigma_share_a_subsector() {
    let p = 3;
    let mut u = Matrix::identity(3).rows;
    u[0][1] = qr(1, 9);
    u[1][2] = qr(2, 3);
    u[0][2] = qr(1, 27);
    let mut shared = 0;
    for y1 in 0..6 {
        for y2 in 0..6 {
            let d = lattice::diagonal(&lattice::exponents_of_y(&[y1, y2]), p);
            let same = class_form(&mul(&u, &d), p).unwrap() == class_form(&d, p).unwrap();
            if y1 >= 3 && y2 >= 3 {
                assert!(same);
            }
            shared += usize::from(same);
        }
    }
    assert!(shared >= 9);
}

#[test]
fn vertex_distance_matches_graph_distance() {
    let t = Truncation::grow_centered(3, 2, 2, Center::BaseVertex).unwrap();
    let d = graph_distances(&t, t.base_vertex);
    for v in 0..t.num_vertices() {
        assert_eq!(d[&v], t.vertex_depth[v]);
    }
    assert_eq!(elementary_exponents(&ints(&[&[1, 0, 0], &[0, 2, 0], &[0, 0, 4]]), 2), vec![0, 1, 2]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]
    #[test]
    fn coset_and_lattice_models_agree(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_gl_q(2, 2, &mut rng);
        let k = random_sl_z(2, &mut rng);
        prop_assert_eq!(class_form(&mul(&g, &k), 2).unwrap(), class_form(&g, 2).unwrap());
        prop_assert_eq!(retract_lattice(&mul(&g, &k), 2), retract_lattice(&g, 2));
    }
}
