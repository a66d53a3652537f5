//! Finite windows of the affine Coxeter complex of a root datum.
//!
//! Points are written in simple coordinates `y_i = κ(x, α_i)`, so a positive root
//! `α = Σ c_i α_i` takes the value `Σ c_i y_i` and special vertices are the integer points.
//! Cells are encoded by one constraint per positive root.

mod galleries;
mod heights;

pub use galleries::*;
pub use heights::*;

use crate::complex::{CellComplex, CellId, CellSet};
use crate::rational::{self, floor_i64, q, Q};
use crate::root_system::RootDatum;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use std::collections::{HashMap, VecDeque};
use std::fmt;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum CoxeterError {
    #[error("window too small: {0}")]
    EnlargeWindow(String),
    #[error("cell is not in the window")]
    NotInWindow,
    #[error("not a chamber")]
    NotAChamber,
    #[error("consecutive chambers {0} and {1} are not adjacent")]
    NotAdjacent(CellId, CellId),
    #[error("subcomplex is not sigma-convex; witness gallery of {} chambers", .0.len())]
    NotSigmaConvex(Vec<AlcoveCell>),
    #[error("height is not generic: h(ξ_{index}) = {value} is not negative at boundary vertex ξ_{index} of σ")]
    NotGeneric { index: usize, value: String },
    #[error("nothing to reduce: the horizontal part of σ is empty")]
    NothingToReduce,
    #[error("height is increasing toward σ along ξ_{0}")]
    IncreasingHeight(usize),
    #[error("invalid sign vector: {0}")]
    BadSignVector(String),
    #[error("invalid window bounds: {0}")]
    BadBounds(String),
    #[error("window is not gallery-connected")]
    Disconnected,
}

/// Constraint of a cell against one positive root.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", content = "level", rename_all = "lowercase")]
pub enum Coord {
    /// `k < κ(x,α) < k+1`.
    Open(i64),
    /// `κ(x,α) = k`.
    Wall(i64),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AlcoveCell {
    pub coords: Vec<Coord>,
}

impl AlcoveCell {
    pub fn is_chamber(&self) -> bool {
        self.coords.iter().all(|c| matches!(c, Coord::Open(_)))
    }

    /// Floors of a chamber, one per positive root.
    pub fn floors(&self) -> Option<Vec<i64>> {
        self.coords
            .iter()
            .map(|c| match c {
                Coord::Open(k) => Some(*k),
                Coord::Wall(_) => None,
            })
            .collect()
    }

    pub fn from_floors(f: &[i64]) -> Self {
        AlcoveCell { coords: f.iter().map(|&k| Coord::Open(k)).collect() }
    }
}

impl fmt::Display for AlcoveCell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .coords
            .iter()
            .map(|c| match c {
                Coord::Open(k) => format!("{k}"),
                Coord::Wall(k) => format!("={k}"),
            })
            .collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Sign vector over Φ⁺ describing a simplex at infinity.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct InfinitySimplex {
    pub signs: Vec<i8>,
}

impl InfinitySimplex {
    pub fn opposite(&self) -> Self {
        InfinitySimplex { signs: self.signs.iter().map(|s| -s).collect() }
    }

    pub fn is_chamber(&self) -> bool {
        self.signs.iter().all(|&s| s != 0)
    }
}

/// A chamber with explicit vertices in simple coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alcove {
    pub floors: Vec<i64>,
    pub verts: Vec<Vec<Q>>,
}

/// Simple-coordinate model of the apartment of a root datum.
#[derive(Clone, Debug)]
pub struct Apartment {
    pub datum: RootDatum,
    /// Coefficients of each positive root in the simple roots.
    pub coeffs: Vec<Vec<i64>>,
    /// Simple coordinates of each positive coroot: `⟨α_i, α⟩`.
    pub coroot_y: Vec<Vec<i64>>,
    /// Sign vectors of all nonempty cones of the Weyl fan.
    realizable: Vec<Vec<i8>>,
    origin_star: Vec<Alcove>,
}

impl Apartment {
    pub fn new(datum: RootDatum) -> Self {
        let npos = datum.num_positive();
        let coeffs = datum.positive_coeffs.clone();
        let coroot_y = (0..npos)
            .map(|a| {
                let ra = &datum.roots[a];
                datum
                    .simple_roots
                    .iter()
                    .map(|s| {
                        let x = datum.cartan_pairing(s, ra).expect("root");
                        rational::to_i64(&x).expect("integral pairing")
                    })
                    .collect()
            })
            .collect();
        let mut ap = Apartment { datum, coeffs, coroot_y, realizable: Vec::new(), origin_star: Vec::new() };
        ap.origin_star = ap.star_of_origin();
        let mut cones: Vec<Vec<i8>> = Vec::new();
        for alc in &ap.origin_star {
            let n = alc.verts.len();
            for mask in 1u64..(1 << n) {
                let pts: Vec<&Vec<Q>> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| &alc.verts[i]).collect();
                let b = barycenter(&pts);
                cones.push((0..npos).map(|a| rational::sign(&ap.value(&b, a))).collect());
            }
        }
        cones.retain(|c| c.iter().any(|&s| s != 0));
        cones.sort();
        cones.dedup();
        ap.realizable = cones;
        ap
    }

    pub fn rank(&self) -> usize {
        self.datum.rank
    }

    pub fn num_positive(&self) -> usize {
        self.coeffs.len()
    }

    /// `κ(x, α)` for positive root index `a` and simple coordinates `y`.
    pub fn value(&self, y: &[Q], a: usize) -> Q {
        let mut s = Q::zero();
        for (c, yi) in self.coeffs[a].iter().zip(y) {
            if *c != 0 {
                s += q(*c) * yi;
            }
        }
        s
    }

    pub fn ambient_to_y(&self, x: &[Q]) -> Vec<Q> {
        self.datum.simple_roots.iter().map(|a| self.datum.kappa(x, a)).collect()
    }

    pub fn cell_of_y(&self, y: &[Q]) -> AlcoveCell {
        let coords = (0..self.num_positive())
            .map(|a| {
                let v = self.value(y, a);
                if rational::is_integer(&v) {
                    Coord::Wall(floor_i64(&v))
                } else {
                    Coord::Open(floor_i64(&v))
                }
            })
            .collect();
        AlcoveCell { coords }
    }

    pub fn sigma(&self) -> InfinitySimplex {
        InfinitySimplex { signs: vec![1; self.num_positive()] }
    }

    pub fn infinity_simplex(&self, signs: Vec<i8>) -> Result<InfinitySimplex, CoxeterError> {
        if signs.len() != self.num_positive() || signs.iter().all(|&s| s == 0) || self.realizable.binary_search(&signs).is_err() {
            return Err(CoxeterError::BadSignVector(format!("{signs:?}")));
        }
        Ok(InfinitySimplex { signs })
    }

    /// Sign vector of a nonzero direction given in simple coordinates.
    pub fn direction_signs(&self, dir: &[Q]) -> InfinitySimplex {
        InfinitySimplex { signs: (0..self.num_positive()).map(|a| rational::sign(&self.value(dir, a))).collect() }
    }

    /// All simplices at infinity (including chambers).
    pub fn all_infinity_simplices(&self) -> Vec<InfinitySimplex> {
        self.realizable.iter().map(|s| InfinitySimplex { signs: s.clone() }).collect()
    }

    pub fn infinity_chambers(&self) -> Vec<InfinitySimplex> {
        self.all_infinity_simplices().into_iter().filter(|t| t.is_chamber()).collect()
    }

    /// Dimension of a cell: rank minus the rank of its wall constraints.
    pub fn cell_dim(&self, c: &AlcoveCell) -> usize {
        let rows: Vec<Vec<Q>> = c
            .coords
            .iter()
            .enumerate()
            .filter(|(_, x)| matches!(x, Coord::Wall(_)))
            .map(|(a, _)| rational::ints(&self.coeffs[a]))
            .collect();
        self.rank() - if rows.is_empty() { 0 } else { rational::rank(&rows) }
    }

    /// Moves from the cell toward τ: `pr_A(τ)`.
    pub fn project_toward(&self, a: &AlcoveCell, tau: &InfinitySimplex) -> AlcoveCell {
        let coords = a
            .coords
            .iter()
            .zip(&tau.signs)
            .map(|(c, &s)| match (*c, s) {
                (Coord::Wall(k), 1) => Coord::Open(k),
                (Coord::Wall(k), -1) => Coord::Open(k - 1),
                (c, _) => c,
            })
            .collect();
        AlcoveCell { coords }
    }

    /// The chamber of st(A) on the same side as chamber C of every wall through A.
    pub fn project_chamber(&self, a: &AlcoveCell, c_floors: &[i64]) -> AlcoveCell {
        let coords = a
            .coords
            .iter()
            .zip(c_floors)
            .map(|(x, &f)| match *x {
                Coord::Wall(k) => Coord::Open(if f >= k { k } else { k - 1 }),
                o => o,
            })
            .collect();
        AlcoveCell { coords }
    }

    pub fn fundamental(&self) -> Alcove {
        let l = self.rank();
        let hr = &self.coeffs[self.datum.highest_root];
        let mut verts = vec![vec![Q::zero(); l]];
        for i in 0..l {
            let mut v = vec![Q::zero(); l];
            v[i] = Q::new(1.into(), hr[i].into());
            verts.push(v);
        }
        self.alcove_from_verts(verts)
    }

    fn alcove_from_verts(&self, verts: Vec<Vec<Q>>) -> Alcove {
        let refs: Vec<&Vec<Q>> = verts.iter().collect();
        let b = barycenter(&refs);
        let floors = (0..self.num_positive()).map(|a| floor_i64(&self.value(&b, a))).collect();
        Alcove { floors, verts }
    }

    /// Wall `(root, level)` of the facet opposite vertex `j`.
    pub fn facet_wall(&self, alc: &Alcove, j: usize) -> (usize, i64) {
        for a in 0..self.num_positive() {
            let mut level: Option<Q> = None;
            let mut ok = true;
            for (i, v) in alc.verts.iter().enumerate() {
                if i == j {
                    continue;
                }
                let x = self.value(v, a);
                match &level {
                    None => level = Some(x),
                    Some(l) if *l == x => {}
                    _ => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                if let Some(l) = level {
                    if let Some(k) = rational::to_i64(&l) {
                        return (a, k);
                    }
                }
            }
        }
        unreachable!("every facet of an alcove lies on a wall")
    }

    /// Neighbor across the facet opposite vertex `j`.
    pub fn reflect_alcove(&self, alc: &Alcove, j: usize) -> Alcove {
        let (a, k) = self.facet_wall(alc, j);
        let v = &alc.verts[j];
        let t = self.value(v, a) - q(k);
        let nv: Vec<Q> = v.iter().zip(&self.coroot_y[a]).map(|(x, &c)| x - &t * q(c)).collect();
        let mut verts = alc.verts.clone();
        verts[j] = nv;
        self.alcove_from_verts(verts)
    }

    /// Finds the alcove with the given floors by walking from the fundamental alcove.
    pub fn locate(&self, floors: &[i64]) -> Option<Alcove> {
        let mut cur = self.fundamental();
        loop {
            if cur.floors == floors {
                return Some(cur);
            }
            let mut moved = false;
            for j in 0..cur.verts.len() {
                let (a, k) = self.facet_wall(&cur, j);
                let f = cur.floors[a];
                let t = floors[a];
                if (k == f + 1 && t > f) || (k == f && t < f) {
                    cur = self.reflect_alcove(&cur, j);
                    moved = true;
                    break;
                }
            }
            if !moved {
                return None;
            }
        }
    }

    /// All alcoves containing the origin.
    pub fn star_of_origin(&self) -> Vec<Alcove> {
        let zero = vec![Q::zero(); self.rank()];
        let mut seen: HashMap<Vec<i64>, ()> = HashMap::new();
        let mut out = Vec::new();
        let mut queue = VecDeque::from([self.fundamental()]);
        while let Some(a) = queue.pop_front() {
            if seen.insert(a.floors.clone(), ()).is_some() {
                continue;
            }
            let zi = a.verts.iter().position(|v| *v == zero).expect("origin vertex");
            for j in 0..a.verts.len() {
                if j != zi {
                    let b = self.reflect_alcove(&a, j);
                    if !seen.contains_key(&b.floors) {
                        queue.push_back(b);
                    }
                }
            }
            out.push(a);
        }
        out
    }

    pub fn origin_star(&self) -> &[Alcove] {
        &self.origin_star
    }

    /// `y ∈ K_x(τ)` for a chamber τ at infinity.
    pub fn in_sector(&self, x: &[Q], tau: &InfinitySimplex, y: &[Q]) -> bool {
        let d = rational::sub(y, x);
        (0..self.num_positive()).all(|a| rational::sign(&self.value(&d, a)) == tau.signs[a])
    }
}

pub fn barycenter(pts: &[&Vec<Q>]) -> Vec<Q> {
    let n = pts[0].len();
    let k = q(pts.len() as i64);
    (0..n)
        .map(|i| pts.iter().fold(Q::zero(), |acc, p| acc + &p[i]) / &k)
        .collect()
}

/// Window bounds on the floors of the simple roots.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowBounds {
    pub lo: Vec<i64>,
    pub hi: Vec<i64>,
}

impl WindowBounds {
    /// Floors in `[−r, r−1]` for every simple root.
    pub fn radius(rank: usize, r: i64) -> Self {
        WindowBounds { lo: vec![-r; rank], hi: vec![r - 1; rank] }
    }
}

/// A finite, face-closed, convex piece of the Coxeter complex.
#[derive(Clone, Debug)]
pub struct Window {
    pub ap: Apartment,
    pub bounds: WindowBounds,
    pub complex: CellComplex,
    pub points: Vec<Vec<Q>>,
    cells: Vec<AlcoveCell>,
    index: HashMap<AlcoveCell, CellId>,
    chambers: Vec<CellId>,
}

impl Window {
    pub fn new(ap: Apartment, bounds: WindowBounds) -> Result<Self, CoxeterError> {
        let l = ap.rank();
        if bounds.lo.len() != l || bounds.hi.len() != l {
            return Err(CoxeterError::BadBounds("one bound per simple root".into()));
        }
        if (0..l).any(|i| bounds.lo[i] > 0 || bounds.hi[i] < 0) {
            return Err(CoxeterError::BadBounds("bounds must contain the fundamental chamber".into()));
        }
        let inside = |f: &[i64]| (0..l).all(|i| bounds.lo[i] <= f[i] && f[i] <= bounds.hi[i]);
        let mut seen: HashMap<Vec<i64>, ()> = HashMap::new();
        let mut alcoves = Vec::new();
        let mut queue = VecDeque::from([ap.fundamental()]);
        while let Some(a) = queue.pop_front() {
            if seen.insert(a.floors.clone(), ()).is_some() {
                continue;
            }
            for j in 0..a.verts.len() {
                let b = ap.reflect_alcove(&a, j);
                if inside(&b.floors[..l]) && !seen.contains_key(&b.floors) {
                    queue.push_back(b);
                }
            }
            alcoves.push(a);
        }
        alcoves.sort_by(|a, b| a.floors.cmp(&b.floors));
        let mut vid: HashMap<Vec<Q>, usize> = HashMap::new();
        let mut points = Vec::new();
        let mut complex = CellComplex::new();
        for a in &alcoves {
            let ids: Vec<usize> = a
                .verts
                .iter()
                .map(|v| {
                    *vid.entry(v.clone()).or_insert_with(|| {
                        points.push(v.clone());
                        points.len() - 1
                    })
                })
                .collect();
            complex.add_simplex(&ids);
        }
        complex.freeze();
        let cells: Vec<AlcoveCell> = (0..complex.len())
            .map(|c| {
                let pts: Vec<&Vec<Q>> = complex.vertices_of(c).iter().map(|&v| &points[v]).collect();
                ap.cell_of_y(&barycenter(&pts))
            })
            .collect();
        let index = cells.iter().enumerate().map(|(i, c)| (c.clone(), i)).collect();
        let chambers = complex.cells_of_dim(l).to_vec();
        Ok(Window { ap, bounds, complex, points, cells, index, chambers })
    }

    pub fn with_radius(ap: Apartment, r: i64) -> Result<Self, CoxeterError> {
        let b = WindowBounds::radius(ap.rank(), r);
        Window::new(ap, b)
    }

    pub fn cell(&self, id: CellId) -> &AlcoveCell {
        &self.cells[id]
    }

    pub fn id_of(&self, c: &AlcoveCell) -> Option<CellId> {
        self.index.get(c).copied()
    }

    pub fn chambers(&self) -> &[CellId] {
        &self.chambers
    }

    pub fn is_chamber(&self, id: CellId) -> bool {
        self.complex.dim(id) == self.ap.rank()
    }

    pub fn floors(&self, id: CellId) -> Vec<i64> {
        self.cells[id].floors().expect("chamber")
    }

    pub fn all_cells(&self) -> CellSet {
        self.complex.all_cells()
    }

    pub fn vertex_points(&self, id: CellId) -> Vec<&Vec<Q>> {
        self.complex.vertices_of(id).iter().map(|&v| &self.points[v]).collect()
    }

    pub fn barycenter(&self, id: CellId) -> Vec<Q> {
        barycenter(&self.vertex_points(id))
    }

    pub fn alcove(&self, id: CellId) -> Alcove {
        let verts = self.vertex_points(id).into_iter().cloned().collect();
        Alcove { floors: self.floors(id), verts }
    }

    /// Id of `pr_A(τ)`; errors if it leaves the window.
    pub fn project_toward(&self, a: CellId, tau: &InfinitySimplex) -> Result<CellId, CoxeterError> {
        let c = self.ap.project_toward(&self.cells[a], tau);
        self.id_of(&c)
            .ok_or_else(|| CoxeterError::EnlargeWindow(format!("pr of {} toward {:?} is {} outside the window", self.cells[a], tau.signs, c)))
    }

    /// Closed subcomplex generated by a set of chambers.
    pub fn closure_of_chambers(&self, chambers: &[CellId]) -> CellSet {
        self.complex.closure(&chambers.iter().copied().collect())
    }

    pub fn chambers_in(&self, z: &CellSet) -> Vec<CellId> {
        z.iter().copied().filter(|&c| self.is_chamber(c)).collect()
    }

    pub fn export_json(&self, set: Option<&CellSet>) -> serde_json::Value {
        self.complex.export_json(set, |c| {
            serde_json::to_value(&self.cells[c].coords).expect("serializable")
        })
    }

    pub fn export_dot(&self, set: Option<&CellSet>) -> String {
        let ch: Vec<CellId> = match set {
            Some(s) => self.chambers_in(s),
            None => self.chambers.clone(),
        };
        self.complex.export_dot_chambers(&ch, |c| self.cells[c].to_string())
    }

    /// Sign of the cell relative to a height form: `(min, max)` of `h` on its closure.
    pub fn height_range(&self, id: CellId, h: &[Q]) -> (Q, Q) {
        let vals: Vec<Q> = self.vertex_points(id).iter().map(|p| rational::dot(h, p)).collect();
        let min = vals.iter().min().cloned().expect("nonempty");
        let max = vals.iter().max().cloned().expect("nonempty");
        (min, max)
    }
}

/// Whether a set of positive-root floors `a ≤ b` componentwise.
pub fn dominated(a: &[i64], b: &[i64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::qr;
    use crate::root_system::{build_root_system, Family};

    fn ap(f: Family, l: usize) -> Apartment {
        Apartment::new(build_root_system(f, l).unwrap())
    }

    #[test]
    fn a1_cells_of_points() {
        let a = ap(Family::A, 1);
        assert_eq!(a.cell_of_y(&[qr(1, 2)]), AlcoveCell { coords: vec![Coord::Open(0)] });
        assert_eq!(a.cell_of_y(&[q(1)]), AlcoveCell { coords: vec![Coord::Wall(1)] });
    }

    #[test]
    fn a2_fundamental_chamber() {
        let a = ap(Family::A, 2);
        let x = a.ambient_to_y(&rational::scale(&qr(1, 3), &rational::add(&a.datum.coroot(0), &a.datum.coroot(1))));
        // (α₁^V+α₂^V)/3 has y = (1/3, 1/3), inside the base alcove.
        assert_eq!(x, vec![qr(1, 3), qr(1, 3)]);
        let c = a.cell_of_y(&x);
        assert!(c.is_chamber());
        assert_eq!(c.floors().unwrap(), vec![0, 0, 0]);
        assert_eq!(a.fundamental().floors, vec![0, 0, 0]);
    }

    #[test]
    fn weyl_group_orders() {
        assert_eq!(ap(Family::A, 2).origin_star().len(), 6);
        assert_eq!(ap(Family::C, 2).origin_star().len(), 8);
        assert_eq!(ap(Family::A, 3).origin_star().len(), 24);
        assert_eq!(ap(Family::D, 3).origin_star().len(), 24);
        assert_eq!(ap(Family::C, 3).origin_star().len(), 48);
    }

    #[test]
    fn infinity_simplices_of_a2() {
        let a = ap(Family::A, 2);
        assert_eq!(a.infinity_chambers().len(), 6);
        assert_eq!(a.all_infinity_simplices().len(), 12);
        assert!(a.infinity_simplex(vec![1, 1, -1]).is_err());
        assert!(a.infinity_simplex(vec![1, -1, 0]).is_ok());
    }

    #[test]
    fn window_counts() {
        let a = ap(Family::A, 1);
        let w = Window::with_radius(a, 3).unwrap();
        assert_eq!(w.chambers().len(), 6);
        assert_eq!(w.complex.cells_of_dim(0).len(), 7);
        let w = Window::with_radius(ap(Family::A, 2), 1).unwrap();
        // The simple-root cube [−1,0]² holds 8 alcoves.
        assert_eq!(w.chambers().len(), 8);
    }

    #[test]
    fn locate_matches_window() {
        let w = Window::with_radius(ap(Family::C, 2), 2).unwrap();
        for &c in w.chambers() {
            let f = w.floors(c);
            let alc = w.ap.locate(&f).unwrap();
            assert_eq!(alc.floors, f);
        }
        assert!(w.ap.locate(&[0, 0, 5, 0]).is_none());
    }

    #[test]
    fn cell_dims_match_simplex_dims() {
        let w = Window::with_radius(ap(Family::A, 2), 2).unwrap();
        for c in 0..w.complex.len() {
            assert_eq!(w.ap.cell_dim(w.cell(c)), w.complex.dim(c));
        }
    }
}
