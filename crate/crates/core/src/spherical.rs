//! Flag complexes of F_q^n: the finite spherical buildings of type A_{n−1}.

use crate::complex::{CellComplex, CellId, CellSet};
use crate::rational::is_prime;
use crate::root_system::Family;
use rand::Rng;
use serde::Serialize;
use std::collections::{BTreeSet, HashMap, VecDeque};

pub const CHAMBER_GUARD: u64 = 10_000_000;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum SphericalError {
    #[error("q = {0} is not prime")]
    NotPrime(u64),
    #[error("dimension must be at least 2, got {0}")]
    BadDimension(usize),
    #[error("{0} chambers exceeds the guard of {CHAMBER_GUARD}")]
    TooLarge(u64),
    #[error("cell {0} is not a chamber")]
    NotAChamber(CellId),
    #[error("matrix is not invertible over F_q")]
    Singular,
}

pub type Vector = Vec<u32>;

fn inv_mod(a: u32, q: u32) -> u32 {
    let mut r = 1u64;
    let (mut b, mut e) = (a as u64 % q as u64, q as u64 - 2);
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % q as u64;
        }
        b = b * b % q as u64;
        e >>= 1;
    }
    r as u32
}

/// Reduced row echelon form over F_q with zero rows dropped.
pub fn rref_mod(rows: &[Vector], q: u32) -> Vec<Vector> {
    let mut m: Vec<Vector> = rows.to_vec();
    let ncols = m.first().map_or(0, |r| r.len());
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..m.len()).find(|&i| m[i][c] != 0) else { continue };
        m.swap(r, p);
        let inv = inv_mod(m[r][c], q) as u64;
        for x in m[r].iter_mut() {
            *x = (*x as u64 * inv % q as u64) as u32;
        }
        for i in 0..m.len() {
            if i != r && m[i][c] != 0 {
                let f = m[i][c] as u64;
                for j in 0..ncols {
                    let sub = f * m[r][j] as u64 % q as u64;
                    m[i][j] = ((m[i][j] as u64 + q as u64 - sub) % q as u64) as u32;
                }
            }
        }
        r += 1;
        if r == m.len() {
            break;
        }
    }
    m.truncate(r);
    m
}

pub fn rank_mod(rows: &[Vector], q: u32) -> usize {
    rref_mod(rows, q).len()
}

/// `g · v` with `v` a column vector.
pub fn mat_vec(g: &[Vector], v: &[u32], q: u32) -> Vector {
    g.iter().map(|row| (row.iter().zip(v).map(|(&a, &b)| a as u64 * b as u64).sum::<u64>() % q as u64) as u32).collect()
}

pub fn mat_mul(a: &[Vector], b: &[Vector], q: u32) -> Vec<Vector> {
    let n = b[0].len();
    a.iter()
        .map(|row| (0..n).map(|j| (row.iter().enumerate().map(|(k, &x)| x as u64 * b[k][j] as u64).sum::<u64>() % q as u64) as u32).collect())
        .collect()
}

pub fn mat_inv(a: &[Vector], q: u32) -> Result<Vec<Vector>, SphericalError> {
    let n = a.len();
    let aug: Vec<Vector> = a
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut r = r.clone();
            r.extend((0..n).map(|j| u32::from(i == j)));
            r
        })
        .collect();
    let m = rref_mod(&aug, q);
    if m.len() < n || (0..n).any(|i| m[i][i] != 1) {
        return Err(SphericalError::Singular);
    }
    Ok(m.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Uniformly random invertible matrix by rejection.
pub fn random_gl<R: Rng>(n: usize, q: u32, rng: &mut R) -> Vec<Vector> {
    loop {
        let g: Vec<Vector> = (0..n).map(|_| (0..n).map(|_| rng.gen_range(0..q)).collect()).collect();
        if rank_mod(&g, q) == n {
            return g;
        }
    }
}

/// All subspaces of dimension `d` in F_q^n, each as its RREF basis.
pub fn enumerate_subspaces(n: usize, d: usize, q: u32) -> Vec<Vec<Vector>> {
    let mut out = Vec::new();
    let mut pivots = Vec::new();
    fn choose(n: usize, d: usize, start: usize, acc: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if acc.len() == d {
            out.push(acc.clone());
            return;
        }
        for c in start..n {
            acc.push(c);
            choose(n, d, c + 1, acc, out);
            acc.pop();
        }
    }
    choose(n, d, 0, &mut Vec::new(), &mut pivots);
    for piv in pivots {
        let free: Vec<(usize, usize)> = (0..d).flat_map(|i| ((piv[i] + 1)..n).filter(|c| !piv.contains(c)).map(move |c| (i, c))).collect();
        let total = (q as u64).pow(free.len() as u32);
        for mut code in 0..total {
            let mut rows = vec![vec![0u32; n]; d];
            for (i, &p) in piv.iter().enumerate() {
                rows[i][p] = 1;
            }
            for &(i, c) in &free {
                rows[i][c] = (code % q as u64) as u32;
                code /= q as u64;
            }
            out.push(rows);
        }
    }
    out
}

/// Number of complete flags: `Π_{k=1..n} (q^k − 1)/(q − 1)`.
pub fn flag_count(n: usize, q: u64) -> u64 {
    (1..=n as u32).map(|k| (q.pow(k) - 1) / (q - 1)).product()
}

#[derive(Clone, Debug)]
pub struct FlagComplex {
    pub n: usize,
    pub q: u32,
    /// Vertex id → RREF basis; ids grouped by increasing dimension.
    pub subspaces: Vec<Vec<Vector>>,
    index: HashMap<Vec<Vector>, usize>,
    pub complex: CellComplex,
    pub chambers: Vec<CellId>,
    chamber_pos: HashMap<CellId, usize>,
    adjacency: Vec<Vec<usize>>,
}

/// Builds the flag complex of F_q^n with chambers the complete flags.
pub fn build_flag_building(n: usize, q: u64) -> Result<FlagComplex, SphericalError> {
    if n < 2 {
        return Err(SphericalError::BadDimension(n));
    }
    if !is_prime(q) {
        return Err(SphericalError::NotPrime(q));
    }
    let count = flag_count(n, q);
    if count > CHAMBER_GUARD {
        return Err(SphericalError::TooLarge(count));
    }
    let q = q as u32;
    let mut subspaces = Vec::new();
    let mut by_dim: Vec<Vec<usize>> = vec![Vec::new(); n];
    for d in 1..n {
        for s in enumerate_subspaces(n, d, q) {
            by_dim[d].push(subspaces.len());
            subspaces.push(s);
        }
    }
    let index: HashMap<Vec<Vector>, usize> = subspaces.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
    // up[v] = subspaces of dimension dim(v)+1 containing v
    let mut up: Vec<Vec<usize>> = vec![Vec::new(); subspaces.len()];
    for d in 1..n - 1 {
        for &v in &by_dim[d] {
            for &w in &by_dim[d + 1] {
                if contains(&subspaces[w], &subspaces[v], q) {
                    up[v].push(w);
                }
            }
        }
    }
    let mut complex = CellComplex::new();
    let mut chambers = Vec::new();
    let mut stack: Vec<Vec<usize>> = by_dim[1].iter().map(|&v| vec![v]).collect();
    stack.reverse();
    while let Some(flag) = stack.pop() {
        if flag.len() == n - 1 {
            chambers.push(complex.add_simplex(&flag));
            continue;
        }
        for &w in up[*flag.last().unwrap()].iter().rev() {
            let mut f = flag.clone();
            f.push(w);
            stack.push(f);
        }
    }
    complex.freeze();
    chambers.sort_unstable();
    let chamber_pos: HashMap<CellId, usize> = chambers.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let adjacency: Vec<Vec<usize>> = chambers
        .iter()
        .map(|&c| {
            if n == 2 {
                (0..chambers.len()).filter(|&j| chambers[j] != c).collect()
            } else {
                complex.chamber_neighbors(c).iter().map(|x| chamber_pos[x]).collect()
            }
        })
        .collect();
    Ok(FlagComplex { n, q, subspaces, index, complex, chambers, chamber_pos, adjacency })
}

fn contains(big: &[Vector], small: &[Vector], q: u32) -> bool {
    let mut rows = big.to_vec();
    rows.extend(small.iter().cloned());
    rank_mod(&rows, q) == big.len()
}

fn meets_trivially(a: &[Vector], b: &[Vector], q: u32) -> bool {
    let mut rows = a.to_vec();
    rows.extend(b.iter().cloned());
    rank_mod(&rows, q) == a.len() + b.len()
}

#[derive(Clone, Debug, Serialize)]
pub struct SphericalApartment {
    /// Vertex ids of the n frame lines.
    pub frame: Vec<usize>,
    pub chambers: Vec<CellId>,
    pub cells: CellSet,
}

#[derive(Clone, Debug, Serialize)]
pub struct OppositeApartmentSearch {
    pub apartment: Option<SphericalApartment>,
    /// Thickness exceeds the chamber count of an apartment, so existence is guaranteed.
    pub guarantee: bool,
    pub thickness: u64,
    pub chambers_per_apartment: u64,
    pub frames_examined: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct AxiomReport {
    pub samples: usize,
    pub apartments_are_coxeter: bool,
    pub pairs_in_common_apartment: bool,
    pub apartment_distances_agree: bool,
}

impl FlagComplex {
    pub fn thickness(&self) -> u64 {
        self.q as u64 + 1
    }

    pub fn num_chambers(&self) -> usize {
        self.chambers.len()
    }

    pub fn dim_of(&self, v: usize) -> usize {
        self.subspaces[v].len()
    }

    pub fn vertices_by_dim(&self, d: usize) -> Vec<usize> {
        (0..self.subspaces.len()).filter(|&v| self.dim_of(v) == d).collect()
    }

    pub fn vertex_id(&self, basis: &[Vector]) -> Option<usize> {
        self.index.get(&rref_mod(basis, self.q)).copied()
    }

    pub fn is_chamber(&self, c: CellId) -> bool {
        self.chamber_pos.contains_key(&c)
    }

    pub fn chamber_index(&self, c: CellId) -> Option<usize> {
        self.chamber_pos.get(&c).copied()
    }

    /// Vertex ids of a cell ordered by subspace dimension.
    pub fn flag(&self, c: CellId) -> Vec<usize> {
        let mut v = self.complex.vertices_of(c).to_vec();
        v.sort_by_key(|&x| (self.dim_of(x), x));
        v
    }

    pub fn cell_type(&self, c: CellId) -> BTreeSet<usize> {
        self.complex.vertices_of(c).iter().map(|&v| self.dim_of(v)).collect()
    }

    /// Chamber ids cofacial to a panel; for n = 2 the panel is empty and every chamber qualifies.
    pub fn panel_chambers(&self, panel: Option<CellId>) -> Vec<CellId> {
        match panel {
            None => self.chambers.clone(),
            Some(p) => self.complex.cofacets(p).iter().copied().filter(|c| self.is_chamber(*c)).collect(),
        }
    }

    pub fn panels(&self) -> Vec<CellId> {
        if self.n == 2 {
            return Vec::new();
        }
        self.complex.cells_of_dim(self.n - 3).to_vec()
    }

    /// Minimum number of chambers over all panels.
    pub fn measured_thickness(&self) -> u64 {
        if self.n == 2 {
            return self.chambers.len() as u64;
        }
        self.panels().iter().map(|&p| self.panel_chambers(Some(p)).len() as u64).min().unwrap_or(0)
    }

    /// Chamber-graph distances from one chamber, indexed by chamber position.
    pub fn distances_from(&self, c: CellId) -> Vec<usize> {
        let s = self.chamber_pos[&c];
        let mut dist = vec![usize::MAX; self.chambers.len()];
        dist[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(x) = queue.pop_front() {
            for &y in &self.adjacency[x] {
                if dist[y] == usize::MAX {
                    dist[y] = dist[x] + 1;
                    queue.push_back(y);
                }
            }
        }
        dist
    }

    pub fn gallery_distance(&self, a: CellId, b: CellId) -> usize {
        self.distances_from(a)[self.chamber_pos[&b]]
    }

    /// Types complementary and `V ∩ W = 0` for each vertex V and the vertex W of complementary dimension.
    pub fn opposite(&self, a: CellId, b: CellId) -> bool {
        let fa = self.flag(a);
        let fb = self.flag(b);
        if fa.len() != fb.len() {
            return false;
        }
        fa.iter().all(|&v| {
            let e = self.dim_of(v);
            match fb.iter().find(|&&w| self.dim_of(w) == self.n - e) {
                Some(&w) => meets_trivially(&self.subspaces[v], &self.subspaces[w], self.q),
                None => false,
            }
        })
    }

    /// Supported subcomplex of cells opposite to some face of the chamber `c`.
    pub fn opposition_complex(&self, c: CellId) -> Result<CellSet, SphericalError> {
        if !self.is_chamber(c) {
            return Err(SphericalError::NotAChamber(c));
        }
        let by_dim: HashMap<usize, usize> = self.flag(c).into_iter().map(|v| (self.dim_of(v), v)).collect();
        let n = self.n;
        let ok_vertex: Vec<bool> = (0..self.subspaces.len())
            .map(|v| meets_trivially(&self.subspaces[v], &self.subspaces[by_dim[&(n - self.dim_of(v))]], self.q))
            .collect();
        Ok(self.complex.supported(|a| self.complex.vertices_of(a).iter().all(|&v| ok_vertex[v])))
    }

    /// Same set as [`opposition_complex`](Self::opposition_complex), found by testing against every face of `c`.
    pub fn opposition_complex_by_faces(&self, c: CellId) -> CellSet {
        let faces = self.complex.closure_of(c);
        (0..self.complex.len()).filter(|&a| faces.iter().any(|&f| self.opposite(a, f))).collect()
    }

    /// Apartment of a frame of n lines spanning F_q^n; `None` if the lines do not span.
    pub fn apartment_of_frame(&self, frame: &[usize]) -> Option<SphericalApartment> {
        let n = self.n;
        if frame.len() != n || frame.iter().any(|&v| self.dim_of(v) != 1) {
            return None;
        }
        let lines: Vec<Vector> = frame.iter().map(|&v| self.subspaces[v][0].clone()).collect();
        if rank_mod(&lines, self.q) != n {
            return None;
        }
        let span_id = |mask: usize| -> usize {
            let rows: Vec<Vector> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| lines[i].clone()).collect();
            self.vertex_id(&rows).expect("proper span")
        };
        let mut chambers = Vec::new();
        for perm in permutations(n) {
            let mut mask = 0usize;
            let mut verts = Vec::new();
            for &i in &perm[..n - 1] {
                mask |= 1 << i;
                verts.push(span_id(mask));
            }
            chambers.push(self.complex.find(&verts).expect("flag is a chamber"));
        }
        chambers.sort_unstable();
        chambers.dedup();
        let mut cells = CellSet::new();
        for &c in &chambers {
            cells.extend(self.complex.closure_of(c));
        }
        let mut frame = frame.to_vec();
        frame.sort_unstable();
        Some(SphericalApartment { frame, chambers, cells })
    }

    /// Frame search for an apartment inside Opp(c), pruned on partial spans.
    pub fn find_opposite_apartment(&self, c: CellId) -> Result<OppositeApartmentSearch, SphericalError> {
        if !self.is_chamber(c) {
            return Err(SphericalError::NotAChamber(c));
        }
        let n = self.n;
        let flag = self.flag(c);
        // Complement targets: C_{n−k} for k = 1..n−1, and the zero space for k = n.
        let target = |k: usize| -> Vec<Vector> {
            if k >= n {
                Vec::new()
            } else {
                self.subspaces[flag[n - k - 1]].clone()
            }
        };
        let lines: Vec<usize> = self.vertices_by_dim(1);
        let per_apartment: u64 = (1..=n as u64).product();
        let mut examined = 0u64;
        let mut chosen: Vec<usize> = Vec::new();
        let found = self.frame_dfs(&lines, 0, &mut chosen, &target, &mut examined);
        let apartment = found.and_then(|f| self.apartment_of_frame(&f));
        Ok(OppositeApartmentSearch {
            apartment,
            guarantee: self.thickness() > per_apartment,
            thickness: self.thickness(),
            chambers_per_apartment: per_apartment,
            frames_examined: examined,
        })
    }

    fn frame_dfs(
        &self,
        lines: &[usize],
        start: usize,
        chosen: &mut Vec<usize>,
        target: &dyn Fn(usize) -> Vec<Vector>,
        examined: &mut u64,
    ) -> Option<Vec<usize>> {
        if chosen.len() == self.n {
            *examined += 1;
            return Some(chosen.clone());
        }
        for i in start..lines.len() {
            let l = lines[i];
            // every subset T containing the new line must satisfy span(T) ∩ C_{n−|T|} = 0
            let k = chosen.len();
            let ok = (0..1usize << k).all(|mask| {
                let mut rows: Vec<Vector> = (0..k).filter(|j| mask >> j & 1 == 1).map(|j| self.subspaces[chosen[j]][0].clone()).collect();
                rows.push(self.subspaces[l][0].clone());
                let t = rows.len();
                if rank_mod(&rows, self.q) < t {
                    return false;
                }
                meets_trivially(&rows, &target(t), self.q)
            });
            if !ok {
                continue;
            }
            chosen.push(l);
            if let Some(f) = self.frame_dfs(lines, i + 1, chosen, target, examined) {
                return Some(f);
            }
            chosen.pop();
        }
        None
    }

    /// All apartments, one per frame (unordered line sets spanning F_q^n).
    pub fn all_frames(&self) -> Vec<Vec<usize>> {
        let lines = self.vertices_by_dim(1);
        let mut out = Vec::new();
        let mut chosen = Vec::new();
        self.frames_rec(&lines, 0, &mut chosen, &mut out);
        out
    }

    fn frames_rec(&self, lines: &[usize], start: usize, chosen: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if chosen.len() == self.n {
            out.push(chosen.clone());
            return;
        }
        for i in start..lines.len() {
            chosen.push(lines[i]);
            let rows: Vec<Vector> = chosen.iter().map(|&v| self.subspaces[v][0].clone()).collect();
            if rank_mod(&rows, self.q) == chosen.len() {
                self.frames_rec(lines, i + 1, chosen, out);
            }
            chosen.pop();
        }
    }

    /// First apartment (in frame order) whose cells include all of `cells`.
    pub fn apartment_containing(&self, cells: &CellSet) -> Option<SphericalApartment> {
        self.all_frames().into_iter().filter_map(|f| self.apartment_of_frame(&f)).find(|a| cells.is_subset(&a.cells))
    }

    /// `N_D = Σ_{E ∈ Ch(Σ)} dist(D, E)` for every chamber D, indexed by chamber position.
    pub fn distance_sums(&self, ap: &SphericalApartment) -> Vec<usize> {
        let mut sums = vec![0usize; self.chambers.len()];
        for &e in &ap.chambers {
            for (s, d) in sums.iter_mut().zip(self.distances_from(e)) {
                *s += d;
            }
        }
        sums
    }

    /// A chamber maximizing `N_D` over the whole building.
    pub fn maximize_distance_sum(&self, ap: &SphericalApartment) -> (CellId, usize) {
        let sums = self.distance_sums(ap);
        let (i, &m) = sums.iter().enumerate().max_by_key(|&(i, s)| (*s, std::cmp::Reverse(i))).unwrap();
        (self.chambers[i], m)
    }

    /// Basis adapted to the flag of a chamber: the first d vectors span the d-dimensional member.
    pub fn adapted_basis(&self, c: CellId) -> Vec<Vector> {
        let mut basis: Vec<Vector> = Vec::new();
        let mut members: Vec<Vec<Vector>> = self.flag(c).iter().map(|&v| self.subspaces[v].clone()).collect();
        members.push((0..self.n).map(|i| (0..self.n).map(|j| u32::from(i == j)).collect()).collect());
        for m in members {
            for v in m {
                let mut rows = basis.clone();
                rows.push(v.clone());
                if rank_mod(&rows, self.q) > basis.len() {
                    basis.push(v);
                    break;
                }
            }
        }
        basis
    }

    /// An element of GL_n(F_q) carrying chamber `a` to chamber `b`.
    pub fn transporter(&self, a: CellId, b: CellId) -> Vec<Vector> {
        let ba = transpose(&self.adapted_basis(a));
        let bb = transpose(&self.adapted_basis(b));
        mat_mul(&bb, &mat_inv(&ba, self.q).expect("basis"), self.q)
    }

    pub fn act_vertex(&self, g: &[Vector], v: usize) -> usize {
        let rows: Vec<Vector> = self.subspaces[v].iter().map(|x| mat_vec(g, x, self.q)).collect();
        self.vertex_id(&rows).expect("image is a proper subspace")
    }

    pub fn act_cell(&self, g: &[Vector], c: CellId) -> CellId {
        let verts: Vec<usize> = self.complex.vertices_of(c).iter().map(|&v| self.act_vertex(g, v)).collect();
        self.complex.find(&verts).expect("image is a flag")
    }

    /// Route through the distance-sum maximization: an apartment opposite some chamber,
    /// transported onto `c` by the transitive GL_n action.
    pub fn opposite_apartment_by_maximization(&self, c: CellId) -> Option<SphericalApartment> {
        let frame = self.vertices_by_dim(1).into_iter().filter(|&v| self.subspaces[v][0].iter().filter(|&&x| x != 0).count() == 1).collect::<Vec<_>>();
        let std_ap = self.apartment_of_frame(&frame)?;
        let (d, _) = self.maximize_distance_sum(&std_ap);
        let opp = self.opposition_complex(d).ok()?;
        if !std_ap.cells.is_subset(&opp) {
            return None;
        }
        let g = self.transporter(d, c);
        let image: Vec<usize> = std_ap.frame.iter().map(|&v| self.act_vertex(&g, v)).collect();
        self.apartment_of_frame(&image)
    }

    /// Spot checks: apartments are thin Coxeter complexes of S_n, random chamber pairs share
    /// an apartment, and apartment galleries realize building distances.
    pub fn check_axioms<R: Rng>(&self, samples: usize, rng: &mut R) -> AxiomReport {
        let frames = self.all_frames();
        let n_fact: usize = (1..=self.n).product();
        let diam = self.n * (self.n - 1) / 2;
        let mut coxeter = true;
        let mut common = true;
        let mut dist_ok = true;
        for _ in 0..samples {
            let f = &frames[rng.gen_range(0..frames.len())];
            let ap = self.apartment_of_frame(f).unwrap();
            coxeter &= ap.chambers.len() == n_fact;
            let chs: BTreeSet<CellId> = ap.chambers.iter().copied().collect();
            let d = self.restricted_distances(ap.chambers[0], &chs);
            coxeter &= d.values().max().copied() == Some(diam);
            let a = self.chambers[rng.gen_range(0..self.chambers.len())];
            let b = self.chambers[rng.gen_range(0..self.chambers.len())];
            let want: CellSet = [a, b].into_iter().collect();
            match self.apartment_containing(&want) {
                Some(ap2) => {
                    let chs2: BTreeSet<CellId> = ap2.chambers.iter().copied().collect();
                    dist_ok &= self.restricted_distances(a, &chs2)[&b] == self.gallery_distance(a, b);
                }
                None => common = false,
            }
        }
        AxiomReport { samples, apartments_are_coxeter: coxeter, pairs_in_common_apartment: common, apartment_distances_agree: dist_ok }
    }

    fn restricted_distances(&self, start: CellId, within: &BTreeSet<CellId>) -> HashMap<CellId, usize> {
        let mut dist = HashMap::from([(start, 0usize)]);
        let mut queue = VecDeque::from([start]);
        while let Some(x) = queue.pop_front() {
            let dx = dist[&x];
            for &y in &self.adjacency[self.chamber_pos[&x]] {
                let cy = self.chambers[y];
                if within.contains(&cy) && !dist.contains_key(&cy) {
                    dist.insert(cy, dx + 1);
                    queue.push_back(cy);
                }
            }
        }
        dist
    }

    /// Chamber nearest to `d` among those containing the simplex `b`.
    pub fn project(&self, b: CellId, d: CellId) -> CellId {
        let dist = self.distances_from(d);
        self.chambers
            .iter()
            .copied()
            .filter(|&c| self.complex.is_face(b, c) || b == c)
            .min_by_key(|&c| dist[self.chamber_pos[&c]])
            .expect("simplex lies in a chamber")
    }

    pub fn label(&self, v: usize) -> String {
        self.subspaces[v].iter().map(|r| r.iter().map(|x| x.to_string()).collect::<String>()).collect::<Vec<_>>().join("|")
    }

    pub fn export_dot(&self, set: Option<&CellSet>) -> String {
        let chs: Vec<CellId> = match set {
            Some(s) => self.chambers.iter().copied().filter(|c| s.contains(c)).collect(),
            None => self.chambers.clone(),
        };
        self.complex.export_dot_chambers(&chs, |c| self.flag(c).iter().map(|&v| self.label(v)).collect::<Vec<_>>().join(" < "))
    }

    pub fn export_json(&self, set: Option<&CellSet>) -> serde_json::Value {
        self.complex.export_json(set, |c| {
            serde_json::json!(self.flag(c).iter().map(|&v| serde_json::json!({"dim": self.dim_of(v), "basis": self.subspaces[v]})).collect::<Vec<_>>())
        })
    }
}

fn transpose(m: &[Vector]) -> Vec<Vector> {
    (0..m[0].len()).map(|j| m.iter().map(|r| r[j]).collect()).collect()
}

pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(rest: &mut Vec<usize>, acc: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest.is_empty() {
            out.push(acc.clone());
            return;
        }
        for i in 0..rest.len() {
            let x = rest.remove(i);
            acc.push(x);
            rec(rest, acc, out);
            acc.pop();
            rest.insert(i, x);
        }
    }
    let mut out = Vec::new();
    rec(&mut (0..n).collect(), &mut Vec::new(), &mut out);
    out
}

/// Thickness threshold for spherical links in a building of the given type and rank.
///
/// Type A_ℓ needs `q + 1 ≥ 2^{ℓ−1} + 1`; types C_ℓ and D_ℓ need `q + 1 ≥ 2^{2ℓ−1} + 1`.
pub fn so_threshold(family: Family, rank: usize, q: u64) -> bool {
    let th = q as u128 + 1;
    let e = match family {
        Family::A => rank.saturating_sub(1),
        Family::C | Family::D => 2 * rank - 1,
    } as u32;
    th > 2u128.pow(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subspace_counts() {
        assert_eq!(enumerate_subspaces(3, 1, 2).len(), 7);
        assert_eq!(enumerate_subspaces(4, 2, 2).len(), 35);
        assert_eq!(enumerate_subspaces(3, 2, 3).len(), 13);
    }

    #[test]
    fn inverse_mod_q() {
        let g = vec![vec![1, 2], vec![3, 4]];
        let h = mat_inv(&g, 5).unwrap();
        assert_eq!(mat_mul(&g, &h, 5), vec![vec![1, 0], vec![0, 1]]);
        assert!(mat_inv(&[vec![1, 2], vec![2, 4]], 5).is_err());
    }

    #[test]
    fn threshold_examples() {
        assert!(so_threshold(Family::A, 2, 2));
        assert!(!so_threshold(Family::A, 3, 3));
        assert!(!so_threshold(Family::C, 2, 7));
        assert!(so_threshold(Family::C, 2, 8));
    }

    #[test]
    fn guard() {
        assert_eq!(build_flag_building(3, 4).unwrap_err(), SphericalError::NotPrime(4));
        assert!(matches!(build_flag_building(8, 3), Err(SphericalError::TooLarge(_))));
    }
}
