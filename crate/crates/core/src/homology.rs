//! Cellular homology with F₂ coefficients on subcomplexes of a [`CellComplex`].

use crate::complex::{CellComplex, CellId, CellSet};
use serde::Serialize;
use std::collections::{BTreeSet, HashMap};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Bits(Vec<u64>);

impl Bits {
    fn zeros(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64)])
    }
    fn set(&mut self, i: usize) {
        self.0[i / 64] ^= 1 << (i % 64);
    }
    fn xor(&mut self, o: &Bits) {
        for (a, b) in self.0.iter_mut().zip(&o.0) {
            *a ^= b;
        }
    }
    fn lowest(&self) -> Option<usize> {
        self.0
            .iter()
            .enumerate()
            .find(|(_, w)| **w != 0)
            .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
    }
    fn ones(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for (i, &w) in self.0.iter().enumerate() {
            let mut w = w;
            while w != 0 {
                let t = w.trailing_zeros() as usize;
                out.push(i * 64 + t);
                w &= w - 1;
            }
        }
        out
    }
}

/// An F₂ chain: a set of cells of one dimension.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct F2Chain {
    pub dim: usize,
    pub cells: BTreeSet<CellId>,
}

impl F2Chain {
    pub fn new(dim: usize, cells: impl IntoIterator<Item = CellId>) -> Self {
        F2Chain { dim, cells: cells.into_iter().collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn add(&self, other: &F2Chain) -> F2Chain {
        F2Chain { dim: self.dim, cells: self.cells.symmetric_difference(&other.cells).copied().collect() }
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum HomologyError {
    #[error("cell {0} is not in the enclosing complex")]
    IdMismatch(CellId),
    #[error("chain cell {cell} has dimension {got}, expected {expected}")]
    WrongDim { cell: CellId, expected: usize, got: usize },
}

/// Boundary of a chain: each facet counted with the parity of its cofaces in the chain.
pub fn boundary(k: &CellComplex, c: &F2Chain) -> F2Chain {
    if c.dim == 0 {
        return F2Chain::new(0, []);
    }
    let mut out = BTreeSet::new();
    for &cell in &c.cells {
        for &f in k.facets(cell) {
            if !out.insert(f) {
                out.remove(&f);
            }
        }
    }
    F2Chain { dim: c.dim - 1, cells: out }
}

/// Chain complex of a subcomplex, cells ordered by id within each degree.
#[derive(Clone, Debug)]
pub struct ChainComplexF2 {
    cells: Vec<Vec<CellId>>,
    pos: HashMap<CellId, usize>,
    /// `bd[k][j]` = positions (in degree k−1) of the facets of the j-th k-cell.
    bd: Vec<Vec<Vec<usize>>>,
}

impl ChainComplexF2 {
    /// Builds the chain complex of `set` (must be face-closed) and asserts ∂∘∂ = 0.
    pub fn new(k: &CellComplex, set: &CellSet) -> Self {
        let maxd = set.iter().map(|&c| k.dim(c)).max().map_or(0, |d| d + 1);
        let mut cells = vec![Vec::new(); maxd];
        for &c in set {
            cells[k.dim(c)].push(c);
        }
        let mut pos = HashMap::new();
        for d in &cells {
            for (i, &c) in d.iter().enumerate() {
                pos.insert(c, i);
            }
        }
        let mut bd = vec![Vec::new(); maxd];
        for d in 1..maxd {
            bd[d] = cells[d]
                .iter()
                .map(|&c| {
                    k.facets(c)
                        .iter()
                        .map(|f| *pos.get(f).expect("subcomplex is not face-closed"))
                        .collect()
                })
                .collect();
        }
        let cc = ChainComplexF2 { cells, pos, bd };
        cc.assert_dd_zero();
        cc
    }

    fn assert_dd_zero(&self) {
        for d in 2..self.cells.len() {
            for col in &self.bd[d] {
                let mut acc: HashMap<usize, bool> = HashMap::new();
                for &f in col {
                    for &g in &self.bd[d - 1][f] {
                        let e = acc.entry(g).or_insert(false);
                        *e = !*e;
                    }
                }
                assert!(acc.values().all(|&b| !b), "boundary of boundary is nonzero");
            }
        }
    }

    pub fn num_cells(&self, d: usize) -> usize {
        self.cells.get(d).map_or(0, |v| v.len())
    }

    fn column(&self, d: usize, j: usize) -> Bits {
        let mut b = Bits::zeros(self.num_cells(d - 1));
        for &f in &self.bd[d][j] {
            b.set(f);
        }
        b
    }

    /// Rank of ∂_d : C_d → C_{d−1}; for d = 0 this is the augmentation.
    pub fn boundary_rank(&self, d: usize) -> usize {
        if d == 0 {
            return usize::from(self.num_cells(0) > 0);
        }
        if d >= self.cells.len() {
            return 0;
        }
        let mut basis = Reducer::new(0);
        for j in 0..self.num_cells(d) {
            basis.insert(self.column(d, j), None);
        }
        basis.rank()
    }

    /// Reduced Betti number b̃_d.
    pub fn betti(&self, d: usize) -> usize {
        self.num_cells(d) - self.boundary_rank(d) - self.boundary_rank(d + 1)
    }

    /// Reduced b̃_{−1}: 1 exactly for the empty complex.
    pub fn betti_minus_one(&self) -> usize {
        usize::from(self.num_cells(0) == 0)
    }

    fn to_bits(&self, c: &F2Chain) -> Result<Bits, HomologyError> {
        let mut b = Bits::zeros(self.num_cells(c.dim));
        for &cell in &c.cells {
            let p = *self.pos.get(&cell).ok_or(HomologyError::IdMismatch(cell))?;
            if self.cells.get(c.dim).and_then(|v| v.get(p)) != Some(&cell) {
                let got = self.cells.iter().position(|v| v.get(p) == Some(&cell)).unwrap_or(usize::MAX);
                return Err(HomologyError::WrongDim { cell, expected: c.dim, got });
            }
            b.set(p);
        }
        Ok(b)
    }

    fn from_bits(&self, d: usize, b: &Bits) -> F2Chain {
        F2Chain::new(d, b.ones().into_iter().map(|i| self.cells[d][i]))
    }

    /// Basis of the reduced cycle space Z̃_d.
    pub fn cycle_basis(&self, d: usize) -> Vec<F2Chain> {
        let n = self.num_cells(d);
        let mut red = Reducer::new(n);
        let mut out = Vec::new();
        for j in 0..n {
            let col = if d == 0 {
                let mut b = Bits::zeros(1);
                b.set(0);
                b
            } else {
                self.column(d, j)
            };
            let mut comb = Bits::zeros(n);
            comb.set(j);
            if let Some(k) = red.insert(col, Some(comb)) {
                out.push(self.from_bits(d, &k));
            }
        }
        out
    }

    /// A (d+1)-chain whose boundary is `c`, if one exists.
    pub fn bounding_chain(&self, c: &F2Chain) -> Result<Option<F2Chain>, HomologyError> {
        let target = self.to_bits(c)?;
        let d = c.dim + 1;
        if d >= self.cells.len() {
            return Ok(if target.lowest().is_none() { Some(F2Chain::new(d, [])) } else { None });
        }
        let n = self.num_cells(d);
        let mut red = Reducer::new(n);
        for j in 0..n {
            let mut comb = Bits::zeros(n);
            comb.set(j);
            red.insert(self.column(d, j), Some(comb));
        }
        Ok(red.solve(target).map(|comb| self.from_bits(d, &comb)))
    }

    pub fn contains(&self, cell: CellId) -> bool {
        self.pos.contains_key(&cell)
    }
}

/// Incremental F₂ elimination keyed by lowest set bit, optionally tracking combinations.
struct Reducer {
    rows: HashMap<usize, (Bits, Option<Bits>)>,
    comb_len: usize,
}

impl Reducer {
    fn new(comb_len: usize) -> Self {
        Reducer { rows: HashMap::new(), comb_len }
    }

    fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Inserts a vector; returns its combination if it reduced to zero.
    fn insert(&mut self, mut v: Bits, mut comb: Option<Bits>) -> Option<Bits> {
        while let Some(p) = v.lowest() {
            match self.rows.get(&p) {
                Some((row, rc)) => {
                    v.xor(row);
                    if let (Some(c), Some(rc)) = (comb.as_mut(), rc) {
                        c.xor(rc);
                    }
                }
                None => {
                    self.rows.insert(p, (v, comb));
                    return None;
                }
            }
        }
        comb
    }

    fn solve(&self, mut v: Bits) -> Option<Bits> {
        let mut acc = Bits::zeros(self.comb_len);
        while let Some(p) = v.lowest() {
            let (row, rc) = self.rows.get(&p)?;
            v.xor(row);
            acc.xor(rc.as_ref().expect("combinations tracked"));
        }
        Some(acc)
    }
}

/// Reduced Betti number of a subcomplex in degree `d`.
pub fn betti(k: &CellComplex, set: &CellSet, d: usize) -> usize {
    ChainComplexF2::new(k, set).betti(d)
}

#[derive(Clone, Debug, Serialize)]
pub struct InducedMapResult {
    pub trivial: bool,
    pub witness: Option<F2Chain>,
}

/// Whether H̃_d(small) → H̃_d(big) is zero; otherwise a cycle of `small` that does not bound in `big`.
pub fn induced_map_trivial(
    k: &CellComplex,
    small: &CellSet,
    big: &CellSet,
    d: usize,
) -> Result<InducedMapResult, HomologyError> {
    if let Some(&c) = small.iter().find(|c| !big.contains(c)) {
        return Err(HomologyError::IdMismatch(c));
    }
    let cs = ChainComplexF2::new(k, small);
    let cb = ChainComplexF2::new(k, big);
    for z in cs.cycle_basis(d) {
        if cb.bounding_chain(&z)?.is_none() {
            return Ok(InducedMapResult { trivial: false, witness: Some(z) });
        }
    }
    Ok(InducedMapResult { trivial: true, witness: None })
}

/// Whether a given cycle bounds inside `big`.
pub fn cycle_bounds(k: &CellComplex, big: &CellSet, z: &F2Chain) -> Result<bool, HomologyError> {
    let cb = ChainComplexF2::new(k, big);
    Ok(cb.bounding_chain(z)?.is_some())
}

/// CSV rows `dim,betti` up to the top dimension of the subcomplex.
pub fn betti_csv(k: &CellComplex, set: &CellSet) -> String {
    let cc = ChainComplexF2::new(k, set);
    let top = set.iter().map(|&c| k.dim(c)).max().unwrap_or(0);
    let mut s = String::from("dim,betti\n");
    for d in 0..=top {
        s.push_str(&format!("{},{}\n", d, cc.betti(d)));
    }
    s
}
