//! Finite simplicial complexes with face incidence, shared by every geometric module.

use serde::Serialize;
use std::collections::{BTreeSet, HashMap};

pub type CellId = usize;
pub type CellSet = BTreeSet<CellId>;

#[derive(Clone, Debug, Default)]
pub struct CellComplex {
    cells: Vec<Vec<usize>>,
    index: HashMap<Vec<usize>, CellId>,
    faces: Vec<Vec<CellId>>,
    cofaces: Vec<Vec<CellId>>,
    by_dim: Vec<Vec<CellId>>,
    frozen: bool,
}

impl CellComplex {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a simplex and all its nonempty faces; returns the id of the simplex.
    pub fn add_simplex(&mut self, vertices: &[usize]) -> CellId {
        assert!(!self.frozen, "complex is frozen");
        let mut v = vertices.to_vec();
        v.sort_unstable();
        v.dedup();
        assert!(!v.is_empty(), "empty simplex");
        if let Some(&id) = self.index.get(&v) {
            return id;
        }
        let n = v.len();
        for mask in 1..(1u64 << n) - 1 {
            let f: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| v[i]).collect();
            if !self.index.contains_key(&f) {
                let id = self.cells.len();
                self.index.insert(f.clone(), id);
                self.cells.push(f);
            }
        }
        let id = self.cells.len();
        self.index.insert(v.clone(), id);
        self.cells.push(v);
        id
    }

    /// Computes incidence; queries that need it panic before this is called.
    pub fn freeze(&mut self) {
        let n = self.cells.len();
        self.faces = vec![Vec::new(); n];
        self.cofaces = vec![Vec::new(); n];
        let maxd = self.cells.iter().map(|c| c.len()).max().unwrap_or(0);
        self.by_dim = vec![Vec::new(); maxd];
        for id in 0..n {
            let c = &self.cells[id];
            self.by_dim[c.len() - 1].push(id);
            if c.len() > 1 {
                for skip in 0..c.len() {
                    let f: Vec<usize> = c.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &x)| x).collect();
                    let fid = self.index[&f];
                    self.faces[id].push(fid);
                    self.cofaces[fid].push(id);
                }
            }
        }
        for v in self.cofaces.iter_mut() {
            v.sort_unstable();
        }
        self.frozen = true;
    }

    pub fn is_frozen(&self) -> bool {
        self.frozen
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn vertices_of(&self, id: CellId) -> &[usize] {
        &self.cells[id]
    }

    pub fn dim(&self, id: CellId) -> usize {
        self.cells[id].len() - 1
    }

    pub fn max_dim(&self) -> usize {
        self.by_dim.len().saturating_sub(1)
    }

    pub fn find(&self, vertices: &[usize]) -> Option<CellId> {
        let mut v = vertices.to_vec();
        v.sort_unstable();
        self.index.get(&v).copied()
    }

    /// Codimension-one faces.
    pub fn facets(&self, id: CellId) -> &[CellId] {
        &self.faces[id]
    }

    /// Cells having `id` as a codimension-one face.
    pub fn cofacets(&self, id: CellId) -> &[CellId] {
        &self.cofaces[id]
    }

    pub fn cells_of_dim(&self, d: usize) -> &[CellId] {
        self.by_dim.get(d).map_or(&[], |v| v.as_slice())
    }

    /// Vertex id (as used in `vertices_of`) to its 0-cell.
    pub fn vertex_cell(&self, v: usize) -> Option<CellId> {
        self.index.get(&vec![v]).copied()
    }

    pub fn is_face(&self, a: CellId, b: CellId) -> bool {
        let (va, vb) = (&self.cells[a], &self.cells[b]);
        va.iter().all(|x| vb.binary_search(x).is_ok())
    }

    /// All faces of `id`, including itself.
    pub fn closure_of(&self, id: CellId) -> CellSet {
        let v = &self.cells[id];
        let n = v.len();
        (1..(1u64 << n))
            .map(|mask| {
                let f: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| v[i]).collect();
                self.index[&f]
            })
            .collect()
    }

    pub fn closure(&self, set: &CellSet) -> CellSet {
        let mut out = CellSet::new();
        for &c in set {
            if !out.contains(&c) {
                out.extend(self.closure_of(c));
            }
        }
        out
    }

    /// All cells having `id` as a face, including itself.
    pub fn star_of(&self, id: CellId) -> CellSet {
        let mut out = CellSet::new();
        let mut stack = vec![id];
        while let Some(c) = stack.pop() {
            if out.insert(c) {
                stack.extend(self.cofaces[c].iter().copied());
            }
        }
        out
    }

    /// Open star of `id` inside `z`.
    pub fn star_in(&self, id: CellId, z: &CellSet) -> CellSet {
        self.star_of(id).into_iter().filter(|c| z.contains(c)).collect()
    }

    pub fn is_face_closed(&self, set: &CellSet) -> bool {
        set.iter().all(|&c| self.faces[c].iter().all(|f| set.contains(f)))
    }

    /// Maximal cells of the given set.
    pub fn maximal_cells(&self, set: &CellSet) -> Vec<CellId> {
        set.iter()
            .copied()
            .filter(|&c| !self.cofaces[c].iter().any(|x| set.contains(x)))
            .collect()
    }

    /// Largest subcomplex whose cells all satisfy `pred`.
    pub fn supported(&self, pred: impl Fn(CellId) -> bool) -> CellSet {
        let base: CellSet = (0..self.len()).filter(|&c| pred(c)).collect();
        base.iter()
            .copied()
            .filter(|&c| self.closure_of(c).iter().all(|f| base.contains(f)))
            .collect()
    }

    pub fn all_cells(&self) -> CellSet {
        (0..self.len()).collect()
    }

    /// Cells adjacent through a shared codimension-one face, restricted to top-dimensional cells.
    pub fn chamber_neighbors(&self, id: CellId) -> Vec<CellId> {
        let mut out = Vec::new();
        for &f in &self.faces[id] {
            for &c in &self.cofaces[f] {
                if c != id {
                    out.push(c);
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// JSON export: `{id, dim, constraints, faces}`, with constraints supplied by the caller.
    pub fn export_json(&self, set: Option<&CellSet>, constraints: impl Fn(CellId) -> serde_json::Value) -> serde_json::Value {
        let ids: Vec<CellId> = match set {
            Some(s) => s.iter().copied().collect(),
            None => (0..self.len()).collect(),
        };
        let cells: Vec<ExportCell> = ids
            .iter()
            .map(|&id| ExportCell {
                id,
                dim: self.dim(id),
                constraints: constraints(id),
                faces: self.faces[id].clone(),
            })
            .collect();
        serde_json::json!({ "cells": cells })
    }

    /// DOT export of the adjacency graph on the given cells (an edge per shared facet).
    pub fn export_dot_chambers(&self, chambers: &[CellId], label: impl Fn(CellId) -> String) -> String {
        let set: CellSet = chambers.iter().copied().collect();
        let mut s = String::from("graph chambers {\n");
        for &c in chambers {
            s.push_str(&format!("  c{} [label=\"{}\"];\n", c, label(c)));
        }
        for &c in chambers {
            for n in self.chamber_neighbors(c) {
                if n > c && set.contains(&n) {
                    s.push_str(&format!("  c{c} -- c{n};\n"));
                }
            }
        }
        s.push_str("}\n");
        s
    }

    /// DOT export of the 1-skeleton (vertices and edges).
    pub fn export_dot_skeleton(&self, set: Option<&CellSet>, label: impl Fn(usize) -> String) -> String {
        let keep = |c: CellId| set.is_none_or(|s| s.contains(&c));
        let mut s = String::from("graph complex {\n");
        for &c in self.cells_of_dim(0) {
            if keep(c) {
                let v = self.cells[c][0];
                s.push_str(&format!("  v{} [label=\"{}\"];\n", v, label(v)));
            }
        }
        for &c in self.cells_of_dim(1) {
            if keep(c) {
                s.push_str(&format!("  v{} -- v{};\n", self.cells[c][0], self.cells[c][1]));
            }
        }
        s.push_str("}\n");
        s
    }
}

#[derive(Serialize)]
struct ExportCell {
    id: CellId,
    dim: usize,
    constraints: serde_json::Value,
    faces: Vec<CellId>,
}
