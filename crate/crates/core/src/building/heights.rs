//! Heights on a truncation, superlevel complexes, retraction preimages and the cone-chain certificates.

use super::lattice::{self, class_form, mul, Mat};
use super::{retract_lattice, BuildingError, Truncation};
use crate::chevalley::CharacterVec;
use crate::complex::{CellId, CellSet};
use crate::coxeter::{point_in_upper, HeightForm};
use crate::coxeter::{barycenter, Window};
use crate::homology::{self, boundary, ChainComplexF2, F2Chain};
use crate::rational::{self, q, Q};
use crate::spherical::permutations;
use num_traits::{One, Zero};
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

/// `h = Σ_k μ_k · ht_{α_k,p}` with `ht_{α_k,p} = −y_k ∘ ρ`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HeightSpec {
    #[serde(with = "rational::serde_qvec")]
    pub mu: Vec<Q>,
}

impl HeightSpec {
    pub fn new(mu: Vec<Q>) -> Self {
        HeightSpec { mu }
    }

    /// Height of a single-prime character given in the `χ_{k,p}` basis; its coefficients are `μ = −λ`.
    pub fn from_character(chi: &CharacterVec, p: u64) -> Self {
        HeightSpec { mu: (1..=chi.rank).map(|k| -chi.coeffs.get(&(k, p)).cloned().unwrap_or_else(Q::zero)).collect() }
    }

    /// The same height as a linear form in simple coordinates.
    pub fn form(&self) -> HeightForm {
        HeightForm::new(self.mu.iter().map(|m| -m).collect())
    }

    pub fn eval_y(&self, y: &[i64]) -> Q {
        self.mu.iter().zip(y).fold(Q::zero(), |acc, (m, &x)| acc - m * q(x))
    }

    pub fn eval_lattice(&self, m: &Mat, p: u64) -> Q {
        self.eval_y(&retract_lattice(m, p))
    }

    pub fn is_zero(&self) -> bool {
        self.mu.iter().all(|m| m.is_zero())
    }
}

impl Truncation {
    pub fn vertex_height(&self, h: &HeightSpec, v: usize) -> Q {
        h.eval_y(&self.retraction[v])
    }

    /// `[min, max]` of `h ∘ ρ` on the closed cell.
    pub fn height_eval(&self, h: &HeightSpec, c: CellId) -> (Q, Q) {
        let vals: Vec<Q> = self.complex.vertices_of(c).iter().map(|&v| self.vertex_height(h, v)).collect();
        (vals.iter().min().unwrap().clone(), vals.iter().max().unwrap().clone())
    }

    /// Supported subcomplex on `{h ≥ r}`; `None` stands for `r = −∞`.
    pub fn superlevel_complex(&self, h: &HeightSpec, r: Option<&Q>) -> CellSet {
        let Some(r) = r else { return self.complex.all_cells() };
        let ok: Vec<bool> = (0..self.num_vertices()).map(|v| self.vertex_height(h, v) >= *r).collect();
        self.complex.supported(|c| self.complex.vertices_of(c).iter().all(|&v| ok[v]))
    }

    /// Cells whose retraction image lies in `z`, a subcomplex of `window`.
    pub fn retraction_preimage(&self, window: &Window, z: &CellSet) -> CellSet {
        self.complex.supported(|c| window.id_of(self.retract(c)).is_some_and(|id| z.contains(&id)))
    }

    /// `Û_h(r)`: cells whose retraction image lies in the upper complex of a generic height.
    pub fn upper_preimage(&self, h: &HeightForm, r: &Q) -> CellSet {
        self.complex.supported(|c| {
            let ys = self.vertex_ys(c);
            let pts: Vec<&Vec<Q>> = ys.iter().collect();
            point_in_upper(h, r, &barycenter(&pts))
        })
    }

    /// Connected components of the 1-skeleton of a subcomplex, as vertex sets.
    pub fn components(&self, set: &CellSet) -> Vec<BTreeSet<usize>> {
        let verts: BTreeSet<usize> = set.iter().filter(|&&c| self.complex.dim(c) == 0).map(|&c| self.complex.vertices_of(c)[0]).collect();
        let mut adj: HashMap<usize, Vec<usize>> = HashMap::new();
        for &c in set.iter().filter(|&&c| self.complex.dim(c) == 1) {
            let vs = self.complex.vertices_of(c);
            adj.entry(vs[0]).or_default().push(vs[1]);
            adj.entry(vs[1]).or_default().push(vs[0]);
        }
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for &v in &verts {
            if seen.contains(&v) {
                continue;
            }
            let mut comp = BTreeSet::from([v]);
            let mut queue = VecDeque::from([v]);
            seen.insert(v);
            while let Some(x) = queue.pop_front() {
                for &y in adj.get(&x).map(|v| v.as_slice()).unwrap_or(&[]) {
                    if seen.insert(y) {
                        comp.insert(y);
                        queue.push_back(y);
                    }
                }
            }
            out.push(comp);
        }
        out
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PositiveCertificate {
    #[serde(with = "rational::serde_qvec")]
    pub height: Vec<Q>,
    #[serde(with = "rational::serde_q")]
    pub r: Q,
    pub radius: usize,
    pub inner_radius: usize,
    /// Vertices of `Û_h(r)` within the inner ball.
    pub inner_vertices: usize,
    /// Components of `Û_h(r) ∩ T` meeting the inner ball.
    pub inner_components: usize,
    pub nonempty: bool,
    pub connected: bool,
}

/// Connectivity of `Û_h(r)` seen from the inner ball: every inner vertex must lie in
/// one component of the preimage inside the whole truncation.
pub fn positive_certificate(t: &Truncation, h: &HeightForm, r: &Q, inner_radius: usize) -> Result<PositiveCertificate, BuildingError> {
    h.check_generic().map_err(|e| BuildingError::NotGeneric(e.to_string()))?;
    let u = t.upper_preimage(h, r);
    let comps = t.components(&u);
    let inner: BTreeSet<usize> = comps.iter().flatten().copied().filter(|&v| t.vertex_depth[v] <= inner_radius).collect();
    let meeting = comps.iter().filter(|c| c.iter().any(|v| inner.contains(v))).count();
    Ok(PositiveCertificate {
        height: h.a.clone(),
        r: r.clone(),
        radius: t.radius,
        inner_radius,
        inner_vertices: inner.len(),
        inner_components: meeting,
        nonempty: !inner.is_empty(),
        connected: meeting == 1,
    })
}

/// Lower unitriangular integral matrix whose apartment at infinity is opposite the standard chamber.
pub fn default_cone_matrix(n: usize) -> Mat {
    // Pascal matrix: all lower-left minors are nonzero
    let mut m = vec![vec![Q::zero(); n]; n];
    for i in 0..n {
        for j in 0..=i {
            m[i][j] = q(binom(i, j));
        }
    }
    m
}

fn binom(n: usize, k: usize) -> i64 {
    (0..k).fold(1i64, |acc, i| acc * (n - i) as i64 / (i + 1) as i64)
}

/// Flag `⟨g e_{π1}⟩ ⊂ ⟨g e_{π1}, g e_{π2}⟩ ⊂ …` is opposite the standard flag over Q.
pub fn flag_opposite_standard(g: &Mat, perm: &[usize]) -> bool {
    let n = g.len();
    (1..n).all(|k| {
        let mut rows: Vec<Vec<Q>> = perm[..k].iter().map(|&j| (0..n).map(|i| g[i][j].clone()).collect()).collect();
        for e in 0..n - k {
            rows.push((0..n).map(|i| if i == e { Q::one() } else { Q::zero() }).collect());
        }
        rational::rank(&rows) == n
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct NegativeCertificate {
    pub n: usize,
    pub p: u64,
    pub radius: usize,
    #[serde(with = "rational::serde_qvec")]
    pub height: Vec<Q>,
    #[serde(with = "rational::serde_q")]
    pub r: Q,
    #[serde(with = "rational::serde_q")]
    pub s: Q,
    #[serde(with = "rational::serde_q")]
    pub t: Q,
    #[serde(with = "rational::serde_q")]
    pub epsilon: Q,
    /// Every chamber at infinity of the cone apartment is opposite the standard one.
    pub cone_opposite: bool,
    pub chain: Vec<CellId>,
    pub boundary: Vec<CellId>,
    /// Branching numbers keyed by chamber.
    pub branching: BTreeMap<CellId, usize>,
    pub boundary_nonzero: bool,
    pub band_ok: bool,
    /// `Z_d(T) = 0`, so the filling of `∂c_r` in T is unique and equals `c_r`.
    pub unique_filling: bool,
    pub filling_has_low_chamber: bool,
    pub not_bounding_in_superlevel: bool,
    pub witness_in_upper_superlevel: bool,
    /// `H̃_{d−1}(X_{h≥s+t}) → H̃_{d−1}(X_{h≥s})` is nonzero.
    pub induced_map_nontrivial: bool,
}

impl NegativeCertificate {
    pub fn all(&self) -> bool {
        self.cone_opposite
            && self.boundary_nonzero
            && self.band_ok
            && self.unique_filling
            && self.filling_has_low_chamber
            && self.not_bounding_in_superlevel
            && self.witness_in_upper_superlevel
            && self.induced_map_nontrivial
    }
}

/// `c_r = Σ b(E)·E` over the chambers of `K_{S,v} = gΣ` with `max h ≤ r`, and its certificates.
pub fn cone_chain(t: &Truncation, g: &Mat, h: &HeightSpec, r: &Q, s: &Q, tt: &Q) -> Result<NegativeCertificate, BuildingError> {
    let n = t.n;
    let p = t.p;
    let d = n - 1;
    let cone_opposite = permutations(n).iter().all(|perm| flag_opposite_standard(g, perm));
    if !cone_opposite {
        return Err(BuildingError::NotRealizable("apartment at infinity is not opposite the standard chamber".into()));
    }
    // Enumerate apartment chambers by floor boxes until the sublevel set stops growing.
    let mut branching: BTreeMap<CellId, usize> = BTreeMap::new();
    let mut rad = 2i64;
    loop {
        let window = Window::with_radius(t.apartment.clone(), rad).map_err(|e| BuildingError::NotRealizable(e.to_string()))?;
        let mut touches_edge = false;
        branching.clear();
        for &c in window.chambers() {
            let alc = window.alcove(c);
            let ys: Vec<Vec<i64>> = alc.verts.iter().map(|y| y.iter().map(|x| rational::to_i64(x).expect("special vertex")).collect()).collect();
            let mats: Vec<Mat> = ys.iter().map(|y| mul(g, &lattice::diagonal(&lattice::exponents_of_y(y), p))).collect();
            let top = mats.iter().map(|m| h.eval_lattice(m, p)).max().unwrap();
            if top > *r {
                continue;
            }
            let fl = window.floors(c);
            if fl.iter().zip(&window.bounds.lo).any(|(f, lo)| f <= lo) || fl.iter().zip(&window.bounds.hi).any(|(f, hi)| f >= hi) {
                touches_edge = true;
            }
            let ids: Option<Vec<usize>> = mats.iter().map(|m| t.vertex_of(m)).collect();
            let cell = ids.and_then(|v| t.complex.find(&v));
            match cell {
                Some(cell) => *branching.entry(cell).or_insert(0) += 1,
                None => return Err(BuildingError::NotRealizable(format!("chamber with h ≤ {} lies outside radius {}", rational::to_pq(r), t.radius))),
            }
        }
        if !touches_edge {
            break;
        }
        rad += 2;
        if rad > 64 {
            return Err(BuildingError::NotRealizable("sublevel set of the cone is unbounded".into()));
        }
    }
    let chain = F2Chain::new(d, branching.iter().filter(|(_, &b)| b % 2 == 1).map(|(&c, _)| c));
    let bd = boundary(&t.complex, &chain);
    let eps = t
        .chambers
        .iter()
        .map(|&c| {
            let (lo, hi) = t.height_eval(h, c);
            hi - lo
        })
        .max()
        .unwrap_or_else(Q::zero);
    let lo_band = r - &eps;
    let band_ok = bd.cells.iter().all(|&c| {
        let (lo, hi) = t.height_eval(h, c);
        lo >= lo_band && hi <= *r
    });
    let whole = ChainComplexF2::new(&t.complex, &t.complex.all_cells());
    let unique_filling = whole.cycle_basis(d).is_empty() && whole.bounding_chain(&bd)?.as_ref() == Some(&chain);
    let filling_has_low_chamber = chain.cells.iter().any(|&c| t.height_eval(h, c).0 < *s);
    let x_s = t.superlevel_complex(h, Some(s));
    let x_st = t.superlevel_complex(h, Some(&(s + tt)));
    let not_bounding_in_superlevel = bd.cells.iter().all(|c| x_s.contains(c)) && !homology::cycle_bounds(&t.complex, &x_s, &bd)?;
    let witness_in_upper_superlevel = bd.cells.iter().all(|c| x_st.contains(c));
    let induced = homology::induced_map_trivial(&t.complex, &x_st, &x_s, d - 1)?;
    Ok(NegativeCertificate {
        n,
        p,
        radius: t.radius,
        height: h.mu.clone(),
        r: r.clone(),
        s: s.clone(),
        t: tt.clone(),
        epsilon: eps,
        cone_opposite,
        chain: chain.cells.iter().copied().collect(),
        boundary: bd.cells.iter().copied().collect(),
        branching,
        boundary_nonzero: !bd.is_zero(),
        band_ok,
        unique_filling,
        filling_has_low_chamber,
        not_bounding_in_superlevel,
        witness_in_upper_superlevel,
        induced_map_nontrivial: !induced.trivial,
    })
}

/// Class of `g · L` for a lattice class `L`.
pub fn act_lattice(g: &Mat, m: &Mat, p: u64) -> Mat {
    class_form(&mul(g, m), p).expect("invertible")
}
