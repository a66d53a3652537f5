//! Root data for the classical families A, C, D with exact arithmetic.
//!
//! Roots live in an ambient space with the standard orthonormal Gram form,
//! so short roots have squared length 2 and the long roots of C have 4.

use crate::rational::{self, dot, q, scale, sub, Q};
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    A,
    C,
    D,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Family::A => "A",
            Family::C => "C",
            Family::D => "D",
        };
        f.write_str(s)
    }
}

impl FromStr for Family {
    type Err = RootError;
    fn from_str(s: &str) -> Result<Self, RootError> {
        match s.trim() {
            "A" | "a" => Ok(Family::A),
            "C" | "c" => Ok(Family::C),
            "D" | "d" => Ok(Family::D),
            other => Err(RootError::Unsupported(format!("family `{other}`"))),
        }
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum RootError {
    #[error("unsupported root system: {0}")]
    Unsupported(String),
    #[error("vector is not a root")]
    NotARoot,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
}

#[derive(Clone, Debug)]
pub struct RootDatum {
    pub family: Family,
    pub rank: usize,
    pub ambient_dim: usize,
    pub gram: Vec<Vec<Q>>,
    pub simple_roots: Vec<Vec<Q>>,
    /// Positive roots first (ordered by height, simple roots leading), then their negatives.
    pub roots: Vec<Vec<Q>>,
    /// Coefficients of each positive root in the simple roots.
    pub positive_coeffs: Vec<Vec<i64>>,
    pub highest_root: usize,
    /// `cartan[i][j] = ⟨α_i, α_j⟩`.
    pub cartan: Vec<Vec<i64>>,
    index: HashMap<Vec<Q>, usize>,
}

impl RootDatum {
    pub fn num_positive(&self) -> usize {
        self.positive_coeffs.len()
    }

    pub fn positive_roots(&self) -> &[Vec<Q>] {
        &self.roots[..self.num_positive()]
    }

    pub fn root_index(&self, v: &[Q]) -> Option<usize> {
        self.index.get(v).copied()
    }

    /// Index of `−root(i)`.
    pub fn negate(&self, i: usize) -> usize {
        let n = self.num_positive();
        if i < n {
            i + n
        } else {
            i - n
        }
    }

    pub fn is_positive(&self, i: usize) -> bool {
        i < self.num_positive()
    }

    pub fn kappa(&self, v: &[Q], w: &[Q]) -> Q {
        let mut s = Q::zero();
        for (i, vi) in v.iter().enumerate() {
            if vi.is_zero() {
                continue;
            }
            for (j, wj) in w.iter().enumerate() {
                if !self.gram[i][j].is_zero() {
                    s += vi * &self.gram[i][j] * wj;
                }
            }
        }
        s
    }

    pub fn coroot(&self, i: usize) -> Vec<Q> {
        let a = &self.roots[i];
        let c = q(2) / self.kappa(a, a);
        scale(&c, a)
    }

    /// `2κ(β,α)/κ(α,α)`, normalized by the second argument.
    pub fn cartan_pairing(&self, beta: &[Q], alpha: &[Q]) -> Result<Q, RootError> {
        self.check_dim(beta)?;
        if self.root_index(alpha).is_none() {
            return Err(RootError::NotARoot);
        }
        Ok(q(2) * self.kappa(beta, alpha) / self.kappa(alpha, alpha))
    }

    pub fn reflect(&self, i: usize, v: &[Q]) -> Vec<Q> {
        let c = self.kappa(v, &self.roots[i]);
        sub(v, &scale(&c, &self.coroot(i)))
    }

    /// `s_{α,k}(v) = s_α(v) + k α^V`.
    pub fn affine_reflect(&self, h: &AffineHyperplane, v: &[Q]) -> Result<Vec<Q>, RootError> {
        self.check_dim(v)?;
        let s = self.reflect(h.root, v);
        let cv = self.coroot(h.root);
        Ok(rational::add(&s, &scale(&q(h.level), &cv)))
    }

    /// `t_{α,k}(v) = v − k α^V` for any root index.
    pub fn translation_action(&self, root: usize, k: i64, v: &[Q]) -> Result<Vec<Q>, RootError> {
        self.check_dim(v)?;
        Ok(sub(v, &scale(&q(k), &self.coroot(root))))
    }

    pub fn simple_coeffs(&self, v: &[Q]) -> Vec<Q> {
        let m: Vec<Vec<Q>> = (0..self.rank)
            .map(|i| (0..self.rank).map(|j| self.kappa(&self.simple_roots[i], &self.simple_roots[j])).collect())
            .collect();
        let b: Vec<Q> = self.simple_roots.iter().map(|a| self.kappa(v, a)).collect();
        rational::solve(&m, &b).expect("simple roots are independent")
    }

    pub fn height(&self, i: usize) -> i64 {
        let n = self.num_positive();
        let s: i64 = self.positive_coeffs[i % n].iter().sum();
        if i < n {
            s
        } else {
            -s
        }
    }

    fn check_dim(&self, v: &[Q]) -> Result<(), RootError> {
        if v.len() != self.ambient_dim {
            return Err(RootError::Dimension { expected: self.ambient_dim, got: v.len() });
        }
        Ok(())
    }

    pub fn expected_root_count(family: Family, l: usize) -> usize {
        match family {
            Family::A => l * (l + 1),
            Family::C => 2 * l * l,
            Family::D => 2 * l * (l - 1),
        }
    }
}

/// A wall `H_{α,k}`, always stored with a positive root.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AffineHyperplane {
    pub root: usize,
    pub level: i64,
}

impl AffineHyperplane {
    /// Normalizes `H_{−α,−k}` to `H_{α,k}`.
    pub fn new(datum: &RootDatum, root: usize, level: i64) -> Self {
        if datum.is_positive(root) {
            AffineHyperplane { root, level }
        } else {
            AffineHyperplane { root: datum.negate(root), level: -level }
        }
    }

    pub fn contains(&self, datum: &RootDatum, v: &[Q]) -> bool {
        datum.kappa(v, &datum.roots[self.root]) == q(self.level)
    }
}

fn unit(n: usize, i: usize) -> Vec<Q> {
    let mut v = vec![Q::zero(); n];
    v[i] = q(1);
    v
}

pub fn build_root_system(family: Family, rank: usize) -> Result<RootDatum, RootError> {
    let l = rank;
    let min = match family {
        Family::A => 1,
        Family::C => 2,
        Family::D => 3,
    };
    if l < min {
        return Err(RootError::Unsupported(format!("{family}{l}: rank must be at least {min}")));
    }
    if l > 12 {
        return Err(RootError::Unsupported(format!("{family}{l}: rank above 12")));
    }
    let dim = if family == Family::A { l + 1 } else { l };
    let gram: Vec<Vec<Q>> = (0..dim).map(|i| unit(dim, i)).collect();
    let mut simple: Vec<Vec<Q>> = (0..l - 1).map(|i| sub(&unit(dim, i), &unit(dim, i + 1))).collect();
    simple.push(match family {
        Family::A => sub(&unit(dim, l - 1), &unit(dim, l)),
        Family::C => scale(&q(2), &unit(dim, l - 1)),
        Family::D => rational::add(&unit(dim, l - 2), &unit(dim, l - 1)),
    });

    // Orbit closure of the simple roots under simple reflections.
    let kap = |v: &[Q], w: &[Q]| dot(v, w);
    let refl = |a: &[Q], v: &[Q]| {
        let c = q(2) * kap(v, a) / kap(a, a);
        sub(v, &scale(&c, a))
    };
    let mut seen: HashMap<Vec<Q>, ()> = HashMap::new();
    let mut all = Vec::new();
    let mut queue: VecDeque<Vec<Q>> = simple.iter().cloned().collect();
    while let Some(v) = queue.pop_front() {
        if seen.contains_key(&v) {
            continue;
        }
        seen.insert(v.clone(), ());
        for a in &simple {
            let w = refl(a, &v);
            if !seen.contains_key(&w) {
                queue.push_back(w);
            }
        }
        all.push(v);
    }

    let m: Vec<Vec<Q>> = simple.iter().map(|a| simple.iter().map(|b| kap(a, b)).collect()).collect();
    let coeffs_of = |v: &[Q]| -> Vec<Q> {
        let b: Vec<Q> = simple.iter().map(|a| kap(v, a)).collect();
        rational::solve(&m, &b).expect("independent simple roots")
    };
    let mut pos: Vec<(Vec<i64>, Vec<Q>)> = Vec::new();
    for v in &all {
        let c = coeffs_of(v);
        if c.iter().all(|x| !x.is_negative()) {
            let ci: Vec<i64> = c
                .iter()
                .map(|x| rational::to_i64(x).expect("integral root coefficients"))
                .collect();
            pos.push((ci, v.clone()));
        }
    }
    pos.sort_by(|(a, _), (b, _)| {
        let ha: i64 = a.iter().sum();
        let hb: i64 = b.iter().sum();
        ha.cmp(&hb).then_with(|| b.cmp(a))
    });
    let npos = pos.len();
    let mut roots: Vec<Vec<Q>> = pos.iter().map(|(_, v)| v.clone()).collect();
    for i in 0..npos {
        let neg = scale(&q(-1), &roots[i]);
        roots.push(neg);
    }
    let positive_coeffs: Vec<Vec<i64>> = pos.into_iter().map(|(c, _)| c).collect();
    let highest_root = npos - 1;
    let cartan = (0..l)
        .map(|i| {
            (0..l)
                .map(|j| {
                    let x = q(2) * kap(&simple[i], &simple[j]) / kap(&simple[j], &simple[j]);
                    x.to_integer().to_i64().unwrap()
                })
                .collect()
        })
        .collect();
    let index = roots.iter().enumerate().map(|(i, r)| (r.clone(), i)).collect();
    let datum = RootDatum {
        family,
        rank: l,
        ambient_dim: dim,
        gram,
        simple_roots: simple,
        roots,
        positive_coeffs,
        highest_root,
        cartan,
        index,
    };
    if datum.roots.len() != RootDatum::expected_root_count(family, l) || all.len() != datum.roots.len() {
        return Err(RootError::Unsupported(format!(
            "{family}{l}: orbit produced {} roots, expected {}",
            all.len(),
            RootDatum::expected_root_count(family, l)
        )));
    }
    Ok(datum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{ints, qr};

    #[test]
    fn a2_basics() {
        let d = build_root_system(Family::A, 2).unwrap();
        assert_eq!(d.roots.len(), 6);
        assert_eq!(d.positive_coeffs, vec![vec![1, 0], vec![0, 1], vec![1, 1]]);
        assert_eq!(d.positive_coeffs[d.highest_root], vec![1, 1]);
        let a1 = &d.simple_roots[0];
        let a2 = &d.simple_roots[1];
        assert_eq!(d.cartan_pairing(a1, a2).unwrap(), q(-1));
        let hr = rational::add(a1, a2);
        assert_eq!(d.cartan_pairing(&hr, a1).unwrap(), q(1));
    }

    #[test]
    fn a1_is_two_roots() {
        let d = build_root_system(Family::A, 1).unwrap();
        assert_eq!(d.roots.len(), 2);
        assert_eq!(d.highest_root, 0);
    }

    #[test]
    fn c2_pairings_follow_root_lengths() {
        let d = build_root_system(Family::C, 2).unwrap();
        assert_eq!(d.roots.len(), 8);
        let (a1, a2) = (&d.simple_roots[0], &d.simple_roots[1]);
        assert_eq!(d.cartan_pairing(a1, a2).unwrap(), q(-1));
        assert_eq!(d.cartan_pairing(a2, a1).unwrap(), q(-2));
        assert_eq!(d.positive_coeffs[d.highest_root], vec![2, 1]);
    }

    #[test]
    fn rank_restrictions() {
        assert!(build_root_system(Family::C, 1).is_err());
        assert!(build_root_system(Family::D, 2).is_err());
        assert!(build_root_system(Family::A, 0).is_err());
    }

    #[test]
    fn counts_match_formula() {
        for l in 1..=5 {
            assert_eq!(build_root_system(Family::A, l).unwrap().roots.len(), l * (l + 1));
        }
        for l in 2..=5 {
            assert_eq!(build_root_system(Family::C, l).unwrap().roots.len(), 2 * l * l);
        }
        for l in 3..=6 {
            assert_eq!(build_root_system(Family::D, l).unwrap().roots.len(), 2 * l * (l - 1));
        }
    }

    #[test]
    fn affine_reflection_examples() {
        let d = build_root_system(Family::A, 1).unwrap();
        let a = d.roots[0].clone();
        let h0 = AffineHyperplane::new(&d, 0, 0);
        assert_eq!(d.affine_reflect(&h0, &a).unwrap(), scale(&q(-1), &a));
        let h1 = AffineHyperplane::new(&d, 0, 1);
        assert_eq!(d.affine_reflect(&h1, &ints(&[0, 0])).unwrap(), d.coroot(0));
        let v = scale(&q(3), &a);
        let h2 = AffineHyperplane::new(&d, 0, 2);
        assert_eq!(d.affine_reflect(&h2, &v).unwrap(), scale(&q(-1), &a));
    }

    #[test]
    fn hyperplane_normalization() {
        let d = build_root_system(Family::A, 2).unwrap();
        let h = AffineHyperplane::new(&d, d.negate(2), -3);
        assert_eq!(h, AffineHyperplane { root: 2, level: 3 });
        let v = vec![qr(3, 2), qr(-3, 2), q(0)];
        assert!(AffineHyperplane::new(&d, 0, 3).contains(&d, &v));
    }

    #[test]
    fn translation_example() {
        let d = build_root_system(Family::A, 2).unwrap();
        let a2 = d.simple_roots[1].clone();
        let t = d.translation_action(0, 2, &a2).unwrap();
        let via = d
            .affine_reflect(&AffineHyperplane::new(&d, d.negate(0), 2), &d.reflect(0, &a2))
            .unwrap();
        assert_eq!(t, via);
        assert_eq!(t, sub(&a2, &scale(&q(2), &d.coroot(0))));
    }
}
