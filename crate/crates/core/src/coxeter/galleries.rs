//! Galleries, projections, σ-convexity and the deconstruction filtration.

use super::{dominated, Alcove, AlcoveCell, CoxeterError, InfinitySimplex, Window};
use crate::complex::{CellId, CellSet};
use serde::Serialize;
use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};

impl Window {
    /// Minimal gallery length by BFS over panel adjacency.
    pub fn gallery_distance(&self, c: CellId, d: CellId) -> Result<usize, CoxeterError> {
        if !self.is_chamber(c) || !self.is_chamber(d) {
            return Err(CoxeterError::NotAChamber);
        }
        let mut dist: HashMap<CellId, usize> = HashMap::from([(c, 0)]);
        let mut queue = VecDeque::from([c]);
        while let Some(x) = queue.pop_front() {
            if x == d {
                return Ok(dist[&x]);
            }
            for n in self.complex.chamber_neighbors(x) {
                if !dist.contains_key(&n) {
                    dist.insert(n, dist[&x] + 1);
                    queue.push_back(n);
                }
            }
        }
        Err(CoxeterError::Disconnected)
    }

    /// Id of `pr_A(C)` for a cell A and chamber C.
    pub fn project_cell(&self, a: CellId, c: CellId) -> Result<CellId, CoxeterError> {
        let p = self.ap.project_chamber(self.cell(a), &self.floors(c));
        self.id_of(&p).ok_or(CoxeterError::NotInWindow)
    }

    /// `d(D,C) = d(D, pr_A(C)) + d(pr_A(C), C)` for D in the star of A.
    pub fn gate_check(&self, a: CellId, c: CellId, d: CellId) -> Result<bool, CoxeterError> {
        if !self.complex.is_face(a, d) {
            return Err(CoxeterError::NotInWindow);
        }
        let p = self.project_cell(a, c)?;
        Ok(self.gallery_distance(d, c)? == self.gallery_distance(d, p)? + self.gallery_distance(p, c)?)
    }

    /// `∩ {P panel of C : pr_P(σ) = C}`.
    pub fn upper_face(&self, c: CellId, sigma: &InfinitySimplex) -> Result<CellId, CoxeterError> {
        if !self.is_chamber(c) {
            return Err(CoxeterError::NotAChamber);
        }
        let target = self.cell(c).clone();
        let mut verts: Vec<usize> = self.complex.vertices_of(c).to_vec();
        for &p in self.complex.facets(c) {
            if self.ap.project_toward(self.cell(p), sigma) == target {
                let pv = self.complex.vertices_of(p);
                verts.retain(|v| pv.contains(v));
            }
        }
        Ok(self.complex.find(&verts).expect("face of a chamber"))
    }

    pub fn lower_face(&self, c: CellId, sigma: &InfinitySimplex) -> Result<CellId, CoxeterError> {
        self.upper_face(c, &sigma.opposite())
    }

    /// Whether each step of the gallery moves toward σ through its common panel.
    pub fn sigma_minimal_check(&self, gallery: &[CellId], sigma: &InfinitySimplex) -> Result<bool, CoxeterError> {
        for w in gallery.windows(2) {
            let (a, b) = (w[0], w[1]);
            if !self.is_chamber(a) || !self.is_chamber(b) {
                return Err(CoxeterError::NotAChamber);
            }
            let common: Vec<usize> = self
                .complex
                .vertices_of(a)
                .iter()
                .copied()
                .filter(|v| self.complex.vertices_of(b).contains(v))
                .collect();
            if common.len() != self.ap.rank() {
                return Err(CoxeterError::NotAdjacent(a, b));
            }
            let p = self.complex.find(&common).expect("panel");
            if self.ap.project_toward(self.cell(p), sigma) != *self.cell(b) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Forward neighbors (toward σ) of a chamber inside `z`.
    fn forward_in(&self, c: CellId, sigma: &InfinitySimplex, z: &CellSet) -> Vec<CellId> {
        self.complex
            .chamber_neighbors(c)
            .into_iter()
            .filter(|n| z.contains(n) && self.is_forward(c, *n, sigma))
            .collect()
    }

    fn is_forward(&self, c: CellId, n: CellId, sigma: &InfinitySimplex) -> bool {
        let (fc, fn_) = (self.floors(c), self.floors(n));
        fc.iter().zip(&fn_).zip(&sigma.signs).all(|((a, b), s)| a == b || (b - a) as i8 == *s)
    }

    /// Length of the longest σ-minimal gallery in `z` starting at `c`.
    pub fn sigma_length(&self, z: &CellSet, c: CellId, sigma: &InfinitySimplex) -> usize {
        let mut memo: HashMap<CellId, usize> = HashMap::new();
        self.sigma_length_memo(z, c, sigma, &mut memo)
    }

    fn sigma_length_memo(&self, z: &CellSet, c: CellId, sigma: &InfinitySimplex, memo: &mut HashMap<CellId, usize>) -> usize {
        if let Some(&v) = memo.get(&c) {
            return v;
        }
        let v = self
            .forward_in(c, sigma, z)
            .into_iter()
            .map(|n| 1 + self.sigma_length_memo(z, n, sigma, memo))
            .max()
            .unwrap_or(0);
        memo.insert(c, v);
        v
    }

    /// Cells A of `z` with `pr_A(σ^op)` outside `z`.
    pub fn residual_r(&self, z: &CellSet, sigma: &InfinitySimplex) -> CellSet {
        let op = sigma.opposite();
        z.iter()
            .copied()
            .filter(|&a| {
                let p = self.ap.project_toward(self.cell(a), &op);
                !self.id_of(&p).is_some_and(|id| z.contains(&id))
            })
            .collect()
    }

    /// σ-convexity test; on failure returns a violating σ-minimal gallery.
    pub fn sigma_convex_check(&self, z: &CellSet, sigma: &InfinitySimplex) -> SigmaConvexity {
        let op = sigma.opposite();
        let sign_floor = |f: Vec<i64>| -> Vec<i64> { f.iter().zip(&sigma.signs).map(|(x, &s)| x * s as i64).collect() };
        let mut starts: Vec<AlcoveCell> = z.iter().map(|&a| self.ap.project_toward(self.cell(a), sigma)).collect();
        starts.sort();
        starts.dedup();
        let mut ends: Vec<AlcoveCell> = z.iter().map(|&b| self.ap.project_toward(self.cell(b), &op)).collect();
        ends.sort();
        ends.dedup();
        // Work in σ-oriented floors so that "forward" means componentwise increase.
        let end_keys: Vec<(Vec<i64>, &AlcoveCell)> = ends.iter().map(|e| (sign_floor(e.floors().unwrap()), e)).collect();
        let reaches = |f: &[i64]| end_keys.iter().find(|(k, _)| dominated(f, k)).map(|(_, e)| (*e).clone());
        for c in &starts {
            let fc = sign_floor(c.floors().unwrap());
            let cid = self.id_of(c).filter(|id| z.contains(id));
            let Some(cid) = cid else {
                if let Some(d) = reaches(&fc) {
                    let gallery = self.greedy_path(c, &d, sigma);
                    return SigmaConvexity { convex: false, witness: Some(gallery) };
                }
                continue;
            };
            let mut parent: HashMap<AlcoveCell, Option<AlcoveCell>> = HashMap::from([(c.clone(), None)]);
            let mut queue = VecDeque::from([cid]);
            while let Some(x) = queue.pop_front() {
                let alc = self.alcove(x);
                for j in 0..alc.verts.len() {
                    let n = self.ap.reflect_alcove(&alc, j);
                    let ncell = AlcoveCell::from_floors(&n.floors);
                    if !forward_floors(&alc.floors, &n.floors, sigma) || parent.contains_key(&ncell) {
                        continue;
                    }
                    parent.insert(ncell.clone(), Some(self.cell(x).clone()));
                    match self.id_of(&ncell).filter(|id| z.contains(id)) {
                        Some(nid) => queue.push_back(nid),
                        None => {
                            if let Some(d) = reaches(&sign_floor(n.floors.clone())) {
                                let mut back = vec![ncell.clone()];
                                let mut cur = ncell.clone();
                                while let Some(Some(p)) = parent.get(&cur) {
                                    back.push(p.clone());
                                    cur = p.clone();
                                }
                                back.reverse();
                                let tail = self.greedy_path(&ncell, &d, sigma);
                                back.extend(tail.into_iter().skip(1));
                                return SigmaConvexity { convex: false, witness: Some(back) };
                            }
                        }
                    }
                }
            }
        }
        SigmaConvexity { convex: true, witness: None }
    }

    /// A σ-minimal gallery from `from` to a dominating chamber `to`.
    fn greedy_path(&self, from: &AlcoveCell, to: &AlcoveCell, sigma: &InfinitySimplex) -> Vec<AlcoveCell> {
        let target = to.floors().unwrap();
        let mut cur: Alcove = self.ap.locate(&from.floors().unwrap()).expect("valid chamber");
        let mut out = vec![from.clone()];
        while cur.floors != target {
            let next = (0..cur.verts.len())
                .map(|j| self.ap.reflect_alcove(&cur, j))
                .find(|n| {
                    forward_floors(&cur.floors, &n.floors, sigma)
                        && n.floors.iter().zip(&target).zip(&sigma.signs).all(|((a, b), &s)| (*a - *b) * s as i64 <= 0)
                })
                .expect("a forward step toward a dominating chamber exists");
            out.push(AlcoveCell::from_floors(&next.floors));
            cur = next;
        }
        out
    }

    /// Removes chambers of σ-length zero one at a time, certifying each step.
    pub fn deconstruct(&self, z: &CellSet, sigma: &InfinitySimplex) -> Result<Filtration, CoxeterError> {
        let conv = self.sigma_convex_check(z, sigma);
        if !conv.convex {
            return Err(CoxeterError::NotSigmaConvex(conv.witness.unwrap_or_default()));
        }
        let r_z = self.residual_r(z, sigma);
        let mut cur = z.clone();
        let mut steps_rev: Vec<FiltrationStep> = Vec::new();
        loop {
            let chambers = self.chambers_in(&cur);
            if chambers.is_empty() {
                break;
            }
            let c = chambers
                .iter()
                .copied()
                .filter(|&c| self.forward_in(c, sigma, &cur).is_empty())
                .min_by(|a, b| self.cell(*a).cmp(self.cell(*b)))
                .expect("a finite complex has a chamber of sigma-length zero");
            let low = self.lower_face(c, sigma)?;
            let st = self.complex.star_in(low, &cur);
            let next: CellSet = cur.difference(&st).copied().collect();
            let closure_c = self.complex.closure_of(c);
            let st_closure = self.complex.closure(&st);
            let st_boundary: CellSet = st_closure.difference(&st).copied().collect();
            let cert = StepCertificate {
                star_in_closure: st.is_subset(&closure_c),
                union_restores: next.union(&closure_c).copied().collect::<CellSet>() == cur,
                zero_length: self.sigma_length(&cur, c, sigma) == 0,
                intersection_is_star_boundary: next.intersection(&closure_c).copied().collect::<CellSet>()
                    == next.intersection(&st_boundary).copied().collect::<CellSet>(),
                residual_preserved: self.residual_r(&next, sigma) == r_z,
                face_closed: self.complex.is_face_closed(&next),
            };
            steps_rev.push(FiltrationStep { chamber: c, chamber_cell: self.cell(c).clone(), lower_face: low, removed: st, certificate: cert });
            cur = next;
        }
        let base_is_residual = cur == r_z;
        steps_rev.reverse();
        Ok(Filtration { base: cur, steps: steps_rev, base_is_residual })
    }
}

fn forward_floors(from: &[i64], to: &[i64], sigma: &InfinitySimplex) -> bool {
    let mut moved = false;
    for ((a, b), &s) in from.iter().zip(to).zip(&sigma.signs) {
        if a != b {
            if (b - a) as i8 != s {
                return false;
            }
            moved = true;
        }
    }
    moved
}

#[derive(Clone, Debug, Serialize)]
pub struct SigmaConvexity {
    pub convex: bool,
    pub witness: Option<Vec<AlcoveCell>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StepCertificate {
    /// `st_{Z_{m+1}}(C^↓) ⊆ C̄`.
    pub star_in_closure: bool,
    /// `Z_{m+1} = Z_m ∪ C̄`.
    pub union_restores: bool,
    /// The removed chamber has σ-length 0 in `Z_{m+1}`.
    pub zero_length: bool,
    /// `Z_m ∩ C̄ = Z_m ∩ ∂ st_{Z_{m+1}}(C^↓)`.
    pub intersection_is_star_boundary: bool,
    /// `R(Z_m) = R(Z)`.
    pub residual_preserved: bool,
    pub face_closed: bool,
}

impl StepCertificate {
    pub fn all(&self) -> bool {
        self.star_in_closure
            && self.union_restores
            && self.zero_length
            && self.intersection_is_star_boundary
            && self.residual_preserved
            && self.face_closed
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FiltrationStep {
    pub chamber: CellId,
    pub chamber_cell: AlcoveCell,
    pub lower_face: CellId,
    pub removed: CellSet,
    pub certificate: StepCertificate,
}

/// `Z₀ ⊂ Z₁ ⊂ … ⊂ Z_n = Z`; step m adds `steps[m].chamber`.
#[derive(Clone, Debug, Serialize)]
pub struct Filtration {
    pub base: CellSet,
    pub steps: Vec<FiltrationStep>,
    pub base_is_residual: bool,
}

impl Filtration {
    pub fn certified(&self) -> bool {
        self.base_is_residual && self.steps.iter().all(|s| s.certificate.all())
    }
}

/// Chambers forming the closed sector `K̄_v(τ)` inside the window, for a special vertex `v`.
pub fn closed_sector(w: &Window, vertex: &[crate::rational::Q], tau: &InfinitySimplex) -> CellSet {
    let chambers: Vec<CellId> = w
        .chambers()
        .iter()
        .copied()
        .filter(|&c| w.ap.in_sector(vertex, tau, &w.barycenter(c)))
        .collect();
    w.closure_of_chambers(&chambers)
}

/// Distinct chamber floors reachable within the window, keyed for deterministic iteration.
pub fn chamber_keys(w: &Window) -> BTreeMap<AlcoveCell, CellId> {
    w.chambers().iter().map(|&c| (w.cell(c).clone(), c)).collect()
}

/// Wall count between two chambers: an independent distance oracle.
pub fn wall_distance(a: &[i64], b: &[i64]) -> usize {
    a.iter().zip(b).map(|(x, y)| (x - y).unsigned_abs() as usize).sum()
}

/// Chambers of the star of a cell, by brute force over the window.
pub fn star_chambers(w: &Window, a: CellId) -> Vec<CellId> {
    let s: HashSet<CellId> = w.complex.star_of(a).into_iter().collect();
    w.chambers().iter().copied().filter(|c| s.contains(c)).collect()
}
