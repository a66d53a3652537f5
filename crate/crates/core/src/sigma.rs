//! Σ-invariant verdicts for S-arithmetic Borel groups and finiteness types of subgroups above U(O_S).
//!
//! Characters are coefficient vectors over the basis `χ_{k,p}` in which the forbidden region
//! is the nonnegative cone. Support bounds are stated directly: "support ≤ k" is the test
//! that decides `Σ^k`.

use crate::chevalley::CharacterVec;
use crate::rational::{self, is_prime, Q};
use crate::root_system::Family;
use crate::spherical::so_threshold;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum SigmaError {
    #[error("the zero character has no class on the character sphere")]
    ZeroCharacter,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("empty prime set")]
    NoPrimes,
    #[error("character has {got} coefficients, expected {expected}")]
    Dimension { expected: usize, got: usize },
    #[error("rank {rank} is not valid for family {family}")]
    BadRank { family: Family, rank: usize },
    #[error("support bound must be positive")]
    ZeroBound,
}

#[derive(Clone, Debug, Serialize)]
pub struct SigmaContext {
    pub family: Family,
    pub rank: usize,
    pub primes: Vec<u64>,
    /// Thickness threshold for spherical links met at every prime.
    pub sol: bool,
    /// `p ≥ 2^{n−2}` for every prime, in the SL_n normalization (type A only).
    pub sl_threshold: Option<bool>,
    /// Both thresholds were evaluated and disagree.
    pub thresholds_disagree: bool,
}

impl SigmaContext {
    pub fn new(family: Family, rank: usize, primes: &[u64]) -> Result<Self, SigmaError> {
        if primes.is_empty() {
            return Err(SigmaError::NoPrimes);
        }
        if let Some(&p) = primes.iter().find(|&&p| !is_prime(p)) {
            return Err(SigmaError::NotPrime(p));
        }
        let min_rank = match family {
            Family::A => 1,
            Family::C => 2,
            Family::D => 3,
        };
        if rank < min_rank {
            return Err(SigmaError::BadRank { family, rank });
        }
        let building = primes.iter().all(|&p| so_threshold(family, rank, p));
        let sl_threshold = (family == Family::A).then(|| {
            let n = rank + 1;
            primes.iter().all(|&p| (p as u128) >= 1u128 << (n - 2))
        });
        let thresholds_disagree = sl_threshold.is_some_and(|s| s != building);
        Ok(SigmaContext {
            family,
            rank,
            primes: primes.to_vec(),
            sol: building && sl_threshold.unwrap_or(true),
            sl_threshold,
            thresholds_disagree,
        })
    }

    /// `|Δ⁰| = ℓ·|S|`, the dimension of `Hom(Γ, R)`.
    pub fn dimension(&self) -> usize {
        self.rank * self.primes.len()
    }

    pub fn character(&self, coeffs: &[Q]) -> Result<CharacterVec, SigmaError> {
        if coeffs.len() != self.dimension() {
            return Err(SigmaError::Dimension { expected: self.dimension(), got: coeffs.len() });
        }
        Ok(CharacterVec::from_coefficients(self.rank, &self.primes, coeffs))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerdictKind {
    CertainIn,
    CertainOut,
    ConjecturalIn,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub kind: VerdictKind,
    pub justification: &'static str,
}

pub const JUST_SUPPORT: &str = "nonnegative with support within the bound: excluded unconditionally";
pub const JUST_NEGATIVE: &str = "has a negative coefficient: in every Σ^k";
pub const JUST_THRESHOLD: &str = "nonnegative with large support and all primes above the thickness threshold";
pub const JUST_CONJECTURE: &str = "nonnegative with large support, primes below the thickness threshold: expected to hold for all primes";

/// Nonnegative coefficients with at most `k` of them nonzero.
pub fn in_delta_k(chi: &CharacterVec, k: usize) -> Result<bool, SigmaError> {
    let c = chi.coefficients();
    if c.iter().all(|x| x.is_zero()) {
        return Err(SigmaError::ZeroCharacter);
    }
    Ok(c.iter().all(|x| !x.is_negative()) && c.iter().filter(|x| !x.is_zero()).count() <= k)
}

pub fn sigma_verdict(ctx: &SigmaContext, chi: &CharacterVec, k: usize) -> Result<Verdict, SigmaError> {
    if k == 0 {
        return Err(SigmaError::ZeroBound);
    }
    if in_delta_k(chi, k)? {
        return Ok(Verdict { kind: VerdictKind::CertainOut, justification: JUST_SUPPORT });
    }
    if chi.coefficients().iter().any(|x| x.is_negative()) {
        return Ok(Verdict { kind: VerdictKind::CertainIn, justification: JUST_NEGATIVE });
    }
    if ctx.sol {
        Ok(Verdict { kind: VerdictKind::CertainIn, justification: JUST_THRESHOLD })
    } else {
        Ok(Verdict { kind: VerdictKind::ConjecturalIn, justification: JUST_CONJECTURE })
    }
}

/// The vector of W supported exactly on `t`, when W restricted to that support is a nonnegative ray.
fn support_ray(basis: &[Vec<Q>], t: &[usize]) -> Option<Vec<Q>> {
    let dim = basis[0].len();
    let outside: Vec<usize> = (0..dim).filter(|j| !t.contains(j)).collect();
    // combinations c with (cᵀB)_j = 0 off the support
    let rows: Vec<Vec<Q>> = outside.iter().map(|&j| basis.iter().map(|b| b[j].clone()).collect()).collect();
    let ns = if rows.is_empty() { (0..basis.len()).map(|i| (0..basis.len()).map(|j| if i == j { Q::from_integer(1.into()) } else { Q::zero() }).collect()).collect() } else { rational::nullspace(&rows, basis.len()) };
    if ns.len() != 1 {
        return None;
    }
    let v: Vec<Q> = (0..dim).map(|j| ns[0].iter().zip(basis).fold(Q::zero(), |acc, (c, b)| acc + c * &b[j])).collect();
    if t.iter().any(|&j| v[j].is_zero()) {
        return None;
    }
    let pos = t.iter().all(|&j| v[j].is_positive());
    let neg = t.iter().all(|&j| v[j].is_negative());
    match (pos, neg) {
        (true, _) => Some(v),
        (_, true) => Some(v.iter().map(|x| -x).collect()),
        _ => None,
    }
}

fn subsets_up_to(n: usize, k: usize) -> Vec<Vec<usize>> {
    (1u64..1 << n).filter(|m| (m.count_ones() as usize) <= k).map(|m| (0..n).filter(|i| m >> i & 1 == 1).collect()).collect()
}

/// Nonzero nonnegative vector of `span(vectors)` with support at most `k`, found among minimal supports.
pub fn nonnegative_vector(vectors: &[Vec<Q>], k: usize) -> Option<Vec<Q>> {
    let (basis, _) = rational::rref(vectors);
    let basis: Vec<Vec<Q>> = basis.into_iter().filter(|r| r.iter().any(|x| !x.is_zero())).collect();
    if basis.is_empty() {
        return None;
    }
    let dim = basis[0].len();
    let subsets = subsets_up_to(dim, k.min(dim));
    let hits: Vec<(usize, Vec<Q>)> = subsets
        .par_iter()
        .enumerate()
        .filter_map(|(i, t)| support_ray(&basis, t).map(|v| (i, v)))
        .collect();
    hits.into_iter().min_by_key(|(i, v)| (v.iter().filter(|x| !x.is_zero()).count(), *i)).map(|(_, v)| v)
}

#[derive(Clone, Debug, Serialize)]
pub struct FinitenessVerdict {
    pub k: usize,
    /// `H` is of type `F_k`: `CertainIn` yes, `CertainOut` no, `ConjecturalIn` expected yes.
    pub kind: VerdictKind,
    pub justification: &'static str,
    /// Nonnegative vector of the vanishing space with support within the bound.
    #[serde(with = "opt_qvec")]
    pub witness: Option<Vec<Q>>,
    /// No nonzero nonnegative vector vanishes on H: type F_∞.
    pub f_infinity: bool,
}

mod opt_qvec {
    use super::*;
    use serde::Serializer;

    pub fn serialize<S: Serializer>(x: &Option<Vec<Q>>, s: S) -> Result<S::Ok, S::Error> {
        x.as_ref().map(|v| v.iter().map(rational::to_pq).collect::<Vec<_>>()).serialize(s)
    }
}

/// Finiteness type of `H = ∩ ker χ_i ⊇ U(O_S)` from the vanishing space `W = span{χ_i}`.
pub fn finiteness_type(ctx: &SigmaContext, kernel_of: &[CharacterVec], k: usize) -> Result<FinitenessVerdict, SigmaError> {
    if k == 0 {
        return Err(SigmaError::ZeroBound);
    }
    let vectors: Vec<Vec<Q>> = kernel_of.iter().map(|c| c.coefficients()).collect();
    if vectors.iter().any(|v| v.len() != ctx.dimension()) {
        return Err(SigmaError::Dimension { expected: ctx.dimension(), got: vectors.iter().map(|v| v.len()).find(|&l| l != ctx.dimension()).unwrap() });
    }
    if let Some(w) = nonnegative_vector(&vectors, k) {
        return Ok(FinitenessVerdict { k, kind: VerdictKind::CertainOut, justification: JUST_SUPPORT, witness: Some(w), f_infinity: false });
    }
    let any = nonnegative_vector(&vectors, ctx.dimension());
    let (kind, justification) = match (&any, ctx.sol) {
        (None, _) => (VerdictKind::CertainIn, JUST_NEGATIVE),
        (Some(_), true) => (VerdictKind::CertainIn, JUST_THRESHOLD),
        (Some(_), false) => (VerdictKind::ConjecturalIn, JUST_CONJECTURE),
    };
    Ok(FinitenessVerdict { k, kind, justification, witness: None, f_infinity: any.is_none() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{ints, q, qr};

    #[test]
    fn support_rays() {
        let w = vec![ints(&[1, -1, 0, 0]), ints(&[0, 0, 1, 1])];
        assert_eq!(nonnegative_vector(&w, 2), Some(ints(&[0, 0, 1, 1])));
        assert_eq!(nonnegative_vector(&w, 1), None);
        assert_eq!(nonnegative_vector(&[ints(&[1, -1])], 2), None);
        assert_eq!(nonnegative_vector(&[ints(&[-2, -1])], 2), Some(vec![q(1), qr(1, 2)]));
    }

    #[test]
    fn context_thresholds() {
        let c = SigmaContext::new(Family::A, 2, &[2, 3]).unwrap();
        assert!(c.sol && !c.thresholds_disagree);
        assert_eq!(c.dimension(), 4);
        let c = SigmaContext::new(Family::A, 4, &[3]).unwrap();
        assert!(!c.sol);
        assert_eq!(SigmaContext::new(Family::A, 2, &[4]).unwrap_err(), SigmaError::NotPrime(4));
        assert!(in_delta_k(&CharacterVec::zero(2, &[2]), 1).is_err());
        let chi = c.character(&[q(1), q(0), q(0), q(0)]).unwrap();
        assert!(in_delta_k(&chi, 1).unwrap());
    }
}
