//! Linear heights on the apartment: lower and upper complexes, and horizontal reduction.

use super::{barycenter, Apartment, CoxeterError, InfinitySimplex, Window};
use crate::complex::{CellId, CellSet};
use crate::rational::{self, ceil_i64, floor_i64, q, to_pq, Q};
use num_traits::{Signed, Zero};
use serde::Serialize;

/// `h(y) = Σ a_i y_i` in simple coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeightForm {
    pub a: Vec<Q>,
}

impl HeightForm {
    pub fn new(a: Vec<Q>) -> Self {
        HeightForm { a }
    }

    /// `h = −κ(·, α)` for a positive root with simple coefficients `c`.
    pub fn minus_root(c: &[i64]) -> Self {
        HeightForm { a: c.iter().map(|&x| q(-x)).collect() }
    }

    pub fn eval(&self, y: &[Q]) -> Q {
        rational::dot(&self.a, y)
    }

    fn eval_int(&self, w: &[i64]) -> Q {
        self.a.iter().zip(w).fold(Q::zero(), |acc, (a, &x)| acc + a * q(x))
    }

    /// Strictly decreasing toward σ: every boundary vertex direction has negative height.
    pub fn check_generic(&self) -> Result<(), CoxeterError> {
        for (i, a) in self.a.iter().enumerate() {
            if !a.is_negative() {
                return Err(CoxeterError::NotGeneric { index: i + 1, value: to_pq(a) });
            }
        }
        Ok(())
    }

    /// `2δ₁ + 2δ₂`: rounding defect plus the height diameter of the origin star.
    pub fn epsilon(&self, ap: &Apartment) -> Q {
        let d1 = self.a.iter().fold(Q::zero(), |acc, a| acc + a.abs());
        let vals: Vec<Q> = ap.origin_star().iter().flat_map(|alc| alc.verts.iter().map(|v| self.eval(v))).collect();
        let d2 = vals.iter().max().unwrap() - vals.iter().min().unwrap();
        q(2) * d1 + q(2) * d2
    }
}

/// Point lies in `U_h(r) = ∪_{h(w) ≥ r} K̄_w(σ^op)`.
pub fn point_in_upper(h: &HeightForm, r: &Q, y: &[Q]) -> bool {
    let w: Vec<i64> = y.iter().map(ceil_i64).collect();
    h.eval_int(&w) >= *r
}

/// Point lies in `L_h(r) = Σ \ ∪_{h(w) ≥ r} K_w(σ^op)`.
pub fn point_in_lower(h: &HeightForm, r: &Q, y: &[Q]) -> bool {
    let w: Vec<i64> = y.iter().map(|x| floor_i64(x) + 1).collect();
    h.eval_int(&w) < *r
}

#[derive(Clone, Debug, Serialize)]
pub struct LowerComplexCertificate {
    #[serde(with = "rational::serde_q")]
    pub epsilon: Q,
    pub sigma_convex: bool,
    /// `h⁻¹((−∞, r]) ⊆ L_h(r)` on the window.
    pub sublevel_contained: bool,
    /// `L_h(r) ⊆ h⁻¹((−∞, r+ε])` on the window.
    pub within_epsilon: bool,
    /// `R(L_h(r)) ⊆ h⁻¹([r, r+ε])`.
    pub residual_in_band: bool,
}

impl LowerComplexCertificate {
    pub fn all(&self) -> bool {
        self.sigma_convex && self.sublevel_contained && self.within_epsilon && self.residual_in_band
    }
}

impl Window {
    pub fn upper_complex(&self, h: &HeightForm, r: &Q) -> Result<CellSet, CoxeterError> {
        h.check_generic()?;
        Ok((0..self.complex.len()).filter(|&c| point_in_upper(h, r, &self.barycenter(c))).collect())
    }

    pub fn lower_complex(&self, h: &HeightForm, r: &Q) -> Result<CellSet, CoxeterError> {
        h.check_generic()?;
        Ok((0..self.complex.len()).filter(|&c| point_in_lower(h, r, &self.barycenter(c))).collect())
    }

    /// Residual cells of `L_h(r)` using the exact membership predicate outside the window.
    pub fn lower_residual(&self, h: &HeightForm, r: &Q, l: &CellSet, sigma: &InfinitySimplex) -> CellSet {
        let op = sigma.opposite();
        l.iter()
            .copied()
            .filter(|&a| {
                let p = self.ap.project_toward(self.cell(a), &op);
                let alc = self.ap.locate(&p.floors().unwrap()).expect("valid chamber");
                let refs: Vec<&Vec<Q>> = alc.verts.iter().collect();
                !point_in_lower(h, r, &barycenter(&refs))
            })
            .collect()
    }

    pub fn certify_lower_complex(&self, h: &HeightForm, r: &Q) -> Result<(CellSet, LowerComplexCertificate), CoxeterError> {
        let l = self.lower_complex(h, r)?;
        let sigma = self.ap.sigma();
        let eps = h.epsilon(&self.ap);
        let top = r + &eps;
        let ranges: Vec<(Q, Q)> = (0..self.complex.len()).map(|c| self.height_range(c, &h.a)).collect();
        let sublevel_contained = (0..self.complex.len()).filter(|&c| ranges[c].1 <= *r).all(|c| l.contains(&c));
        let within_epsilon = l.iter().all(|&c| ranges[c].1 <= top);
        let res = self.lower_residual(h, r, &l, &sigma);
        let residual_in_band = res.iter().all(|&c| ranges[c].0 >= *r && ranges[c].1 <= top);
        let sigma_convex = self.sigma_convex_check(&l, &sigma).convex;
        Ok((l, LowerComplexCertificate { epsilon: eps, sigma_convex, sublevel_contained, within_epsilon, residual_in_band }))
    }

    /// Height range on the closure of a cell as `(min, max)`.
    pub fn height_interval(&self, h: &HeightForm, c: CellId) -> (Q, Q) {
        self.height_range(c, &h.a)
    }
}

/// One stage of horizontal reduction: a Levi subsystem with the restricted height.
#[derive(Clone, Debug, Serialize)]
pub struct ReducedCoxeter {
    /// Simple root indices (0-based) spanning the reduced apartment.
    pub kept: Vec<usize>,
    /// Positive roots of the parent whose walls survive.
    pub levi_roots: Vec<usize>,
    #[serde(with = "rational::serde_qvec")]
    pub height: Vec<Q>,
    pub dim: usize,
    /// `dim(σ_hor)` before and after, with −1 for the empty face.
    pub horizontal_dim_before: i64,
    pub horizontal_dim_after: i64,
    pub reflection_closed: bool,
}

fn horizontal_dim(a: &[Q]) -> i64 {
    a.iter().filter(|x| x.is_zero()).count() as i64 - 1
}

fn reduce_step(ap: &Apartment, kept: &[usize], a: &[Q]) -> Result<ReducedCoxeter, CoxeterError> {
    if let Some(i) = a.iter().position(|x| x.is_positive()) {
        return Err(CoxeterError::IncreasingHeight(kept[i] + 1));
    }
    let Some(j) = a.iter().position(|x| x.is_zero()) else {
        return Err(CoxeterError::NothingToReduce);
    };
    let new_kept: Vec<usize> = kept.iter().enumerate().filter(|&(i, _)| i != j).map(|(_, &k)| k).collect();
    let new_a: Vec<Q> = a.iter().enumerate().filter(|&(i, _)| i != j).map(|(_, x)| x.clone()).collect();
    let levi_roots: Vec<usize> = (0..ap.num_positive())
        .filter(|&r| ap.coeffs[r].iter().enumerate().all(|(i, &c)| c == 0 || new_kept.contains(&i)))
        .collect();
    let d = &ap.datum;
    let reflection_closed = levi_roots.iter().all(|&x| {
        levi_roots.iter().all(|&y| {
            let img = d.reflect(x, &d.roots[y]);
            d.root_index(&img).is_some_and(|k| levi_roots.contains(&(k % ap.num_positive())))
        })
    });
    Ok(ReducedCoxeter {
        dim: new_kept.len(),
        horizontal_dim_before: horizontal_dim(a),
        horizontal_dim_after: horizontal_dim(&new_a),
        kept: new_kept,
        levi_roots,
        height: new_a,
        reflection_closed,
    })
}

/// One reduction step along the first horizontal boundary vertex of σ.
pub fn horizontal_reduction(ap: &Apartment, h: &HeightForm) -> Result<ReducedCoxeter, CoxeterError> {
    let kept: Vec<usize> = (0..ap.rank()).collect();
    reduce_step(ap, &kept, &h.a)
}

/// Iterates reduction until the restricted height is generic.
pub fn reduce_fully(ap: &Apartment, h: &HeightForm) -> Result<Vec<ReducedCoxeter>, CoxeterError> {
    let mut out = vec![horizontal_reduction(ap, h)?];
    loop {
        let last = out.last().unwrap();
        if last.height.iter().all(|x| !x.is_zero()) {
            return Ok(out);
        }
        let next = reduce_step(ap, &last.kept, &last.height)?;
        out.push(next);
    }
}
