use btsigma::complex::CellSet;
use btsigma::homology::betti;
use btsigma::spherical::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Counts complete flags of F_q^3 from ordered pairs of vectors (v, w) with w ∉ ⟨v⟩.
fn brute_flag_count_3(q: u32) -> u64 {
    let vecs: Vec<Vec<u32>> = (1..q.pow(3)).map(|c| vec![c % q, c / q % q, c / (q * q)]).collect();
    let mut pairs = 0u64;
    for v in &vecs {
        for w in &vecs {
            if rank_mod(&[v.clone(), w.clone()], q) == 2 {
                pairs += 1;
            }
        }
    }
    let q = q as u64;
    // each flag ⟨v⟩ ⊂ ⟨v,w⟩ arises from (q−1) choices of v and (q²−q) choices of w
    pairs / ((q - 1) * (q * q - q))
}

#[test]
fn chamber_and_vertex_counts() {
    let b = build_flag_building(2, 2).unwrap();
    assert_eq!(b.num_chambers(), 3);
    assert_eq!(b.measured_thickness(), 3);

    let fano = build_flag_building(3, 2).unwrap();
    assert_eq!(fano.vertices_by_dim(1).len(), 7);
    assert_eq!(fano.vertices_by_dim(2).len(), 7);
    assert_eq!(fano.num_chambers(), 21);
    assert_eq!(fano.num_chambers() as u64, brute_flag_count_3(2));

    let b3 = build_flag_building(3, 3).unwrap();
    assert_eq!(b3.vertices_by_dim(1).len(), 13);
    assert_eq!(b3.num_chambers(), 52);
    assert_eq!(b3.num_chambers() as u64, brute_flag_count_3(3));
    assert_eq!(flag_count(3, 3), 52);

    assert_eq!(build_flag_building(4, 2).unwrap().num_chambers(), 315);
}

#[test]
fn every_panel_has_q_plus_one_chambers() {
    for (n, q) in [(3, 2), (3, 3), (4, 2), (3, 5)] {
        let b = build_flag_building(n, q).unwrap();
        for p in b.panels() {
            assert_eq!(b.panel_chambers(Some(p)).len() as u64, q + 1, "n={n} q={q}");
        }
        assert_eq!(b.measured_thickness(), q + 1);
    }
}

#[test]
fn rank_one_opposition_is_all_other_points() {
    for q in [2u64, 3, 5] {
        let b = build_flag_building(2, q).unwrap();
        for &c in &b.chambers {
            let opp = b.opposition_complex(c).unwrap();
            assert_eq!(opp.len() as u64, q);
            assert!(!opp.contains(&c));
        }
    }
}

#[test]
fn fano_opposition_complexes_are_connected_with_a_loop() {
    let b = build_flag_building(3, 2).unwrap();
    for &c in &b.chambers {
        let opp = b.opposition_complex(c).unwrap();
        assert_eq!(betti(&b.complex, &opp, 0), 0);
        assert!(betti(&b.complex, &opp, 1) >= 1);
    }
    let c = b.chambers[0];
    let opp = b.opposition_complex(c).unwrap();
    let verts = opp.iter().filter(|&&x| b.complex.dim(x) == 0).count();
    let edges = opp.len() - verts;
    // 4 points off a line, 4 lines missing a point, 2 admissible lines through each point
    assert_eq!((verts, edges), (8, 8));
}

#[test]
fn vertexwise_opposition_matches_facewise_definition() {
    for (n, q) in [(3, 2), (3, 3), (4, 2)] {
        let b = build_flag_building(n, q).unwrap();
        for &c in b.chambers.iter().step_by(7) {
            assert_eq!(b.opposition_complex(c).unwrap(), b.opposition_complex_by_faces(c));
        }
    }
}

#[test]
fn opposition_symmetric_and_group_invariant() {
    let b = build_flag_building(3, 3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let cells: Vec<usize> = (0..b.complex.len()).collect();
    for _ in 0..30 {
        let g = random_gl(3, 3, &mut rng);
        for _ in 0..20 {
            let a = cells[rand::Rng::gen_range(&mut rng, 0..cells.len())];
            let c = cells[rand::Rng::gen_range(&mut rng, 0..cells.len())];
            let o = b.opposite(a, c);
            assert_eq!(o, b.opposite(c, a));
            assert_eq!(o, b.opposite(b.act_cell(&g, a), b.act_cell(&g, c)));
        }
    }
}

#[test]
fn opposite_chambers_realize_the_diameter() {
    for (n, q) in [(3, 2), (3, 3), (4, 2)] {
        let b = build_flag_building(n, q).unwrap();
        let diam = n * (n - 1) / 2;
        for &c in b.chambers.iter().step_by(11) {
            let d = b.distances_from(c);
            assert_eq!(*d.iter().max().unwrap(), diam);
            for (i, &e) in b.chambers.iter().enumerate() {
                assert_eq!(b.opposite(c, e), d[i] == diam, "n={n} q={q}");
            }
        }
    }
}

fn all_opposite(b: &FlagComplex, c: usize, ap: &SphericalApartment) -> bool {
    ap.chambers.iter().all(|&e| b.opposite(c, e))
}

#[test]
fn opposite_apartment_q7_is_guaranteed_and_found() {
    let b = build_flag_building(3, 7).unwrap();
    for &c in [b.chambers[0], b.chambers[200], *b.chambers.last().unwrap()].iter() {
        let res = b.find_opposite_apartment(c).unwrap();
        assert!(res.guarantee);
        assert_eq!((res.thickness, res.chambers_per_apartment), (8, 6));
        let ap = res.apartment.expect("guaranteed");
        assert_eq!(ap.chambers.len(), 6);
        assert!(all_opposite(&b, c, &ap));
        let other = b.opposite_apartment_by_maximization(c).expect("maximization route");
        assert!(all_opposite(&b, c, &other));
    }
}

#[test]
fn opposite_apartment_search_is_exhaustive_for_small_q() {
    for (n, q) in [(3, 2), (3, 3)] {
        let b = build_flag_building(n, q).unwrap();
        let c = b.chambers[0];
        let res = b.find_opposite_apartment(c).unwrap();
        assert!(!res.guarantee);
        let brute = b.all_frames().into_iter().filter_map(|f| b.apartment_of_frame(&f)).any(|ap| all_opposite(&b, c, &ap));
        assert_eq!(res.apartment.is_some(), brute, "n={n} q={q}");
        if let Some(ap) = res.apartment {
            assert!(all_opposite(&b, c, &ap));
        }
    }
    let b = build_flag_building(2, 2).unwrap();
    let res = b.find_opposite_apartment(b.chambers[0]).unwrap();
    assert_eq!(res.apartment.unwrap().chambers.len(), 2);
}

#[test]
fn apartment_through_opposite_simplex_and_star() {
    for q in [2u64, 3] {
        let b = build_flag_building(3, q).unwrap();
        let aps: Vec<SphericalApartment> = b.all_frames().into_iter().filter_map(|f| b.apartment_of_frame(&f)).collect();
        let sigma = &aps[0];
        for &a in &sigma.cells {
            let star: CellSet = sigma
                .chambers
                .iter()
                .filter(|&&c| c == a || b.complex.is_face(a, c))
                .flat_map(|&c| b.complex.closure_of(c))
                .collect();
            for bb in (0..b.complex.len()).filter(|&x| b.opposite(a, x)) {
                let mut want = star.clone();
                want.extend(b.complex.closure_of(bb));
                assert!(aps.iter().any(|ap| want.is_subset(&ap.cells)), "q={q} a={a} b={bb}");
            }
        }
    }
}

#[test]
fn building_axioms_on_samples() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for (n, q) in [(3, 2), (3, 3)] {
        let b = build_flag_building(n, q).unwrap();
        let r = b.check_axioms(15, &mut rng);
        assert!(r.apartments_are_coxeter && r.pairs_in_common_apartment && r.apartment_distances_agree);
    }
}

#[test]
fn transporter_moves_chambers() {
    let b = build_flag_building(3, 3).unwrap();
    for (&x, &y) in b.chambers.iter().zip(b.chambers.iter().rev()).take(10) {
        let g = b.transporter(x, y);
        assert_eq!(b.act_cell(&g, x), y);
    }
}

#[test]
fn projection_is_nearest_chamber() {
    let b = build_flag_building(3, 2).unwrap();
    let v = b.vertices_by_dim(1)[0];
    let vc = b.complex.vertex_cell(v).unwrap();
    for &d in &b.chambers {
        let p = b.project(vc, d);
        let dist = b.distances_from(d);
        let best = b.chambers.iter().enumerate().filter(|(_, &c)| b.complex.is_face(vc, c)).map(|(i, _)| dist[i]).min().unwrap();
        assert_eq!(b.gallery_distance(d, p), best);
    }
}
