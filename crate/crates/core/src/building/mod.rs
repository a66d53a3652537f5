//! Finite truncations of the Bruhat–Tits building of SL_n(Q_p), realized by lattice classes.

pub mod heights;
pub mod lattice;

use crate::complex::{CellComplex, CellId, CellSet};
use crate::coxeter::{barycenter, AlcoveCell, Apartment};
use crate::rational::{is_prime, pow_q, q, Q};
use crate::root_system::{build_root_system, Family};
use lattice::{class_form, contains, hermite_form, int_column, log_volume, min_valuation, mul, scale, vertex_distance, Mat};
use rayon::prelude::*;
use serde::Serialize;
use std::collections::{HashMap, HashSet, VecDeque};

pub const CHAMBER_GUARD: usize = 1_000_000;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum BuildingError {
    #[error("p = {0} is not prime")]
    NotPrime(u64),
    #[error("n = {0} is outside the supported range 2..=3")]
    UnsupportedDimension(usize),
    #[error("truncation exceeds {CHAMBER_GUARD} chambers")]
    TooLarge,
    #[error("cell {0} is not a chamber")]
    NotAChamber(CellId),
    #[error("the cone is not realizable inside the truncation: {0}")]
    NotRealizable(String),
    #[error("height is not generic: {0}")]
    NotGeneric(String),
    #[error("{0}")]
    Homology(#[from] crate::homology::HomologyError),
}

/// Where the truncation ball is centered.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Center {
    /// Chambers within gallery distance R of the base chamber.
    BaseChamber,
    /// Chambers all of whose vertices lie within combinatorial distance R of the base vertex.
    BaseVertex,
}

#[derive(Clone, Debug)]
pub struct Truncation {
    pub n: usize,
    pub p: u64,
    pub radius: usize,
    pub center: Center,
    /// Vertex id → canonical class form.
    pub lattices: Vec<Mat>,
    index: HashMap<Mat, usize>,
    pub complex: CellComplex,
    /// Chambers in discovery order.
    pub chambers: Vec<CellId>,
    /// Gallery distance from the base chamber, per chamber in discovery order.
    pub chamber_depth: Vec<usize>,
    /// Combinatorial distance from the base vertex, per vertex.
    pub vertex_depth: Vec<usize>,
    /// Retraction of each vertex, in simple coordinates.
    pub retraction: Vec<Vec<i64>>,
    pub base_vertex: usize,
    pub base_chamber: CellId,
    pub apartment: Apartment,
    images: Vec<AlcoveCell>,
}

/// Base chamber chain `L_k = diag(1^{n−k}, p^k)`.
pub fn base_chain(n: usize, p: u64) -> Vec<Mat> {
    (0..n).map(|k| lattice::diagonal(&(0..n).map(|i| i64::from(i >= n - k)).collect::<Vec<_>>(), p)).collect()
}

/// Retraction of a lattice class toward the upper-triangular chamber at infinity.
pub fn retract_lattice(m: &Mat, p: u64) -> Vec<i64> {
    let (_, e) = hermite_form(m, p).expect("full rank");
    lattice::y_of_exponents(&e)
}

/// Orders class representatives of a simplex into a chain `L_0 ⊃ L_1 ⊃ … ⊃ p L_0`.
pub fn chain_of(classes: &[&Mat], p: u64) -> Vec<Mat> {
    let l0 = classes[0].clone();
    let inv0 = lattice::inverse(&l0);
    let base_vol = log_volume(&l0, p);
    let mut chain: Vec<(i64, Mat)> = classes
        .iter()
        .map(|m| {
            let k = -min_valuation(&mul(&inv0, m), p).expect("nonzero");
            let rep = scale(m, &pow_q(p, k));
            (log_volume(&rep, p) - base_vol, rep)
        })
        .collect();
    chain.sort_by_key(|(k, _)| *k);
    chain.into_iter().map(|(_, m)| m).collect()
}

/// The p+1 class forms of the lattices `M` with `prev ⊋ M ⊋ next` (index p each).
pub fn intermediate_classes(prev: &Mat, next: &Mat, p: u64) -> Vec<Mat> {
    let n = prev.len();
    let mut out: Vec<Mat> = Vec::new();
    let mut seen = HashSet::new();
    let total = p.pow(n as u32);
    for code in 1..total {
        let digits: Vec<u64> = (0..n).map(|i| code / p.pow(i as u32) % p).collect();
        let v = mul(prev, &int_column(&digits).into_iter().map(|x| vec![x]).collect::<Vec<_>>());
        if contains(next, &v, p) {
            continue;
        }
        let gens: Mat = (0..n).map(|i| next[i].iter().cloned().chain(std::iter::once(v[i][0].clone())).collect()).collect();
        let c = class_form(&gens, p).expect("full rank");
        if seen.insert(c.clone()) {
            out.push(c);
        }
    }
    out
}

impl Truncation {
    pub fn grow(n: usize, p: u64, radius: usize) -> Result<Self, BuildingError> {
        Self::grow_centered(n, p, radius, Center::BaseChamber)
    }

    pub fn grow_centered(n: usize, p: u64, radius: usize, center: Center) -> Result<Self, BuildingError> {
        if !is_prime(p) {
            return Err(BuildingError::NotPrime(p));
        }
        if !(2..=3).contains(&n) {
            return Err(BuildingError::UnsupportedDimension(n));
        }
        let apartment = Apartment::new(build_root_system(Family::A, n - 1).expect("type A"));
        let mut t = Truncation {
            n,
            p,
            radius,
            center,
            lattices: Vec::new(),
            index: HashMap::new(),
            complex: CellComplex::new(),
            chambers: Vec::new(),
            chamber_depth: Vec::new(),
            vertex_depth: Vec::new(),
            retraction: Vec::new(),
            base_vertex: 0,
            base_chamber: 0,
            apartment,
            images: Vec::new(),
        };
        let v0 = lattice::diagonal(&vec![0; n], p);
        t.base_vertex = t.register(class_form(&v0, p).unwrap(), &v0);
        let base: Vec<Mat> = base_chain(n, p).iter().map(|m| class_form(m, p).unwrap()).collect();
        t.complex.add_simplex(&[t.base_vertex]);
        let admit = |verts: &[Mat], depth: usize| -> bool {
            match center {
                Center::BaseChamber => depth <= radius,
                Center::BaseVertex => verts.iter().all(|m| vertex_distance(&v0, m, p) as usize <= radius),
            }
        };
        let mut seen: HashSet<Vec<Mat>> = HashSet::new();
        let mut queue: VecDeque<(Vec<Mat>, usize)> = VecDeque::new();
        let mut key = base.clone();
        key.sort();
        if admit(&base, 0) {
            seen.insert(key);
            queue.push_back((base, 0));
        }
        while let Some((verts, depth)) = queue.pop_front() {
            let ids: Vec<usize> = verts.iter().map(|m| t.register(m.clone(), &v0)).collect();
            let cid = t.complex.add_simplex(&ids);
            t.chambers.push(cid);
            t.chamber_depth.push(depth);
            if t.chambers.len() >= CHAMBER_GUARD {
                return Err(BuildingError::TooLarge);
            }
            if center == Center::BaseChamber && depth >= radius {
                continue;
            }
            let refs: Vec<&Mat> = verts.iter().collect();
            let chain = chain_of(&refs, p);
            for k in 0..n {
                let prev = if k == 0 { scale(&chain[n - 1], &pow_q(p, -1)) } else { chain[k - 1].clone() };
                let next = if k == n - 1 { scale(&chain[0], &q(p as i64)) } else { chain[k + 1].clone() };
                let removed = class_form(&chain[k], p).unwrap();
                for m in intermediate_classes(&prev, &next, p) {
                    if m == removed {
                        continue;
                    }
                    let mut nv: Vec<Mat> = verts.iter().filter(|x| **x != removed).cloned().collect();
                    nv.push(m);
                    let mut key = nv.clone();
                    key.sort();
                    if seen.contains(&key) || !admit(&nv, depth + 1) {
                        continue;
                    }
                    seen.insert(key);
                    queue.push_back((nv, depth + 1));
                }
            }
        }
        t.complex.freeze();
        t.base_chamber = t.chambers.first().copied().unwrap_or(0);
        let ap = &t.apartment;
        let ys: Vec<Vec<Q>> = t.retraction.iter().map(|y| y.iter().map(|&x| q(x)).collect()).collect();
        let complex = &t.complex;
        t.images = (0..complex.len())
            .into_par_iter()
            .map(|c| {
                let pts: Vec<&Vec<Q>> = complex.vertices_of(c).iter().map(|&v| &ys[v]).collect();
                ap.cell_of_y(&barycenter(&pts))
            })
            .collect();
        Ok(t)
    }

    fn register(&mut self, class: Mat, v0: &Mat) -> usize {
        if let Some(&id) = self.index.get(&class) {
            return id;
        }
        let id = self.lattices.len();
        self.vertex_depth.push(vertex_distance(v0, &class, self.p) as usize);
        self.retraction.push(retract_lattice(&class, self.p));
        self.index.insert(class.clone(), id);
        self.lattices.push(class);
        id
    }

    pub fn vertex_of(&self, m: &Mat) -> Option<usize> {
        self.index.get(&class_form(m, self.p).ok()?).copied()
    }

    pub fn num_vertices(&self) -> usize {
        self.lattices.len()
    }

    pub fn dim(&self) -> usize {
        self.n - 1
    }

    pub fn is_chamber(&self, c: CellId) -> bool {
        self.complex.dim(c) == self.n - 1
    }

    /// Cells of the given dimension.
    pub fn cells_of_dim(&self, d: usize) -> Vec<CellId> {
        if d >= self.n {
            return Vec::new();
        }
        self.complex.cells_of_dim(d).to_vec()
    }

    /// Retraction image of a cell in the standard apartment.
    pub fn retract(&self, c: CellId) -> &AlcoveCell {
        &self.images[c]
    }

    pub fn vertex_ys(&self, c: CellId) -> Vec<Vec<Q>> {
        self.complex.vertices_of(c).iter().map(|&v| self.retraction[v].iter().map(|&x| q(x)).collect()).collect()
    }

    /// Cells lying in the standard apartment (all vertices diagonal).
    pub fn in_standard_apartment(&self, c: CellId) -> bool {
        self.complex.vertices_of(c).iter().all(|&v| {
            let m = &self.lattices[v];
            (0..self.n).all(|i| (0..self.n).all(|j| i == j || num_traits::Zero::is_zero(&m[i][j])))
        })
    }

    /// Panels with their full complement of p+1 chambers guaranteed by the truncation.
    pub fn interior_panels(&self) -> Vec<CellId> {
        let r = self.radius;
        match self.center {
            Center::BaseChamber => {
                let mut out: Vec<CellId> = self
                    .chambers
                    .iter()
                    .zip(&self.chamber_depth)
                    .filter(|(_, &d)| d < r)
                    .flat_map(|(&c, _)| self.complex.facets(c).to_vec())
                    .collect();
                out.sort_unstable();
                out.dedup();
                out
            }
            Center::BaseVertex => self
                .cells_of_dim(self.n - 2)
                .into_iter()
                .filter(|&c| self.complex.vertices_of(c).iter().all(|&v| self.vertex_depth[v] < r))
                .collect(),
        }
    }

    pub fn panel_degree(&self, panel: CellId) -> usize {
        self.complex.cofacets(panel).len()
    }

    /// Chamber-graph distances from `c` inside the truncation.
    pub fn gallery_distances(&self, c: CellId) -> HashMap<CellId, usize> {
        let mut dist = HashMap::from([(c, 0usize)]);
        let mut queue = VecDeque::from([c]);
        while let Some(x) = queue.pop_front() {
            let dx = dist[&x];
            for y in self.complex.chamber_neighbors(x) {
                if let std::collections::hash_map::Entry::Vacant(e) = dist.entry(y) {
                    e.insert(dx + 1);
                    queue.push_back(y);
                }
            }
        }
        dist
    }

    /// Image of a vertex under `g ∈ GL_n(Q)`, when it lies in the truncation.
    pub fn act_vertex(&self, g: &Mat, v: usize) -> Option<usize> {
        self.vertex_of(&mul(g, &self.lattices[v]))
    }

    pub fn act_cell(&self, g: &Mat, c: CellId) -> Option<CellId> {
        let vs: Option<Vec<usize>> = self.complex.vertices_of(c).iter().map(|&v| self.act_vertex(g, v)).collect();
        self.complex.find(&vs?)
    }

    /// Vertex of the standard apartment with the given simple coordinates, if present.
    pub fn apartment_vertex(&self, y: &[i64]) -> Option<usize> {
        self.vertex_of(&lattice::diagonal(&lattice::exponents_of_y(y), self.p))
    }

    pub fn label(&self, v: usize) -> String {
        let y: Vec<String> = self.retraction[v].iter().map(|x| x.to_string()).collect();
        format!("v{} y=({})", v, y.join(","))
    }

    pub fn export_dot(&self, set: Option<&CellSet>) -> String {
        self.complex.export_dot_skeleton(set, |v| self.label(v))
    }

    pub fn export_json(&self, set: Option<&CellSet>) -> serde_json::Value {
        self.complex.export_json(set, |c| {
            serde_json::json!({
                "lattices": self.complex.vertices_of(c).iter().map(|&v| lattice::to_strings(&self.lattices[v])).collect::<Vec<_>>(),
                "retraction": self.retract(c).to_string(),
            })
        })
    }
}
