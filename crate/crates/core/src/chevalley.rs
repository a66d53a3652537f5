//! Steinberg generators of SL_n(ℚ), Borel decomposition, valuations and characters.

use crate::rational::{self, pow_q, q, qr, to_pq, vp, Q};
use rand::Rng;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::ops::Mul;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum ChevalleyError {
    #[error("parameter must be nonzero")]
    ZeroParameter,
    #[error("matrix is not upper triangular")]
    NotUpperTriangular,
    #[error("matrix is singular")]
    Singular,
    #[error("not in the S-arithmetic Borel group: {0}")]
    NotInGamma(String),
    #[error("root ({0},{1}) is not an off-diagonal position of an {2}x{2} matrix")]
    BadRoot(usize, usize, usize),
    #[error("character coefficient for prime {0} outside the declared set")]
    PrimeOutsideS(u64),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Matrix {
    #[serde(with = "rational::serde_qmat")]
    pub rows: Vec<Vec<Q>>,
}

impl Matrix {
    pub fn identity(n: usize) -> Self {
        Matrix { rows: (0..n).map(|i| (0..n).map(|j| if i == j { Q::one() } else { Q::zero() }).collect()).collect() }
    }

    pub fn diag(d: &[Q]) -> Self {
        let mut m = Matrix::identity(d.len());
        for (i, x) in d.iter().enumerate() {
            m.rows[i][i] = x.clone();
        }
        m
    }

    pub fn from_ints(rows: &[&[i64]]) -> Self {
        Matrix { rows: rows.iter().map(|r| rational::ints(r)).collect() }
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn get(&self, i: usize, j: usize) -> &Q {
        &self.rows[i][j]
    }

    pub fn det(&self) -> Q {
        let n = self.n();
        let mut m = self.rows.clone();
        let mut det = Q::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&r| !m[r][c].is_zero()) else {
                return Q::zero();
            };
            if p != c {
                m.swap(p, c);
                det = -det;
            }
            det *= &m[c][c];
            for r in c + 1..n {
                if !m[r][c].is_zero() {
                    let f = &m[r][c] / &m[c][c];
                    for k in c..n {
                        let t = &f * &m[c][k];
                        m[r][k] -= t;
                    }
                }
            }
        }
        det
    }

    pub fn inverse(&self) -> Result<Matrix, ChevalleyError> {
        let n = self.n();
        let aug: Vec<Vec<Q>> = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let mut r = r.clone();
                r.extend((0..n).map(|j| if i == j { Q::one() } else { Q::zero() }));
                r
            })
            .collect();
        let (m, piv) = rational::rref(&aug);
        if piv.len() < n || piv[n - 1] >= n {
            return Err(ChevalleyError::Singular);
        }
        Ok(Matrix { rows: m.into_iter().map(|r| r[n..].to_vec()).collect() })
    }

    pub fn pow(&self, e: i64) -> Result<Matrix, ChevalleyError> {
        let base = if e < 0 { self.inverse()? } else { self.clone() };
        let mut out = Matrix::identity(self.n());
        for _ in 0..e.unsigned_abs() {
            out = &out * &base;
        }
        Ok(out)
    }

    pub fn is_upper_triangular(&self) -> bool {
        (0..self.n()).all(|i| (0..i).all(|j| self.rows[i][j].is_zero()))
    }

    pub fn is_unipotent_upper(&self) -> bool {
        self.is_upper_triangular() && (0..self.n()).all(|i| self.rows[i][i].is_one())
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.n()).all(|i| (0..self.n()).all(|j| i == j || self.rows[i][j].is_zero()))
    }

    pub fn to_strings(&self) -> Vec<Vec<String>> {
        self.rows.iter().map(|r| r.iter().map(to_pq).collect()).collect()
    }
}

impl Mul for &Matrix {
    type Output = Matrix;
    fn mul(self, o: &Matrix) -> Matrix {
        let n = self.n();
        let m = o.rows[0].len();
        let mut rows = vec![vec![Q::zero(); m]; n];
        for i in 0..n {
            for k in 0..self.rows[i].len() {
                let a = &self.rows[i][k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..m {
                    if !o.rows[k][j].is_zero() {
                        rows[i][j] += a * &o.rows[k][j];
                    }
                }
            }
        }
        Matrix { rows }
    }
}

/// A root of type A_{n−1} as the off-diagonal position `(i, j)`, i.e. `e_i − e_j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SlRoot {
    pub i: usize,
    pub j: usize,
}

impl SlRoot {
    pub fn new(n: usize, i: usize, j: usize) -> Result<Self, ChevalleyError> {
        if i == j || i >= n || j >= n {
            return Err(ChevalleyError::BadRoot(i, j, n));
        }
        Ok(SlRoot { i, j })
    }

    /// Simple root α_k (1-based index k).
    pub fn simple(k: usize) -> Self {
        SlRoot { i: k - 1, j: k }
    }

    pub fn neg(self) -> Self {
        SlRoot { i: self.j, j: self.i }
    }

    pub fn vector(self, n: usize) -> Vec<i64> {
        let mut v = vec![0; n];
        v[self.i] += 1;
        v[self.j] -= 1;
        v
    }

    pub fn from_vector(v: &[i64]) -> Option<Self> {
        let i = v.iter().position(|&x| x == 1)?;
        let j = v.iter().position(|&x| x == -1)?;
        (v.iter().filter(|&&x| x != 0).count() == 2).then_some(SlRoot { i, j })
    }

    pub fn all(n: usize) -> Vec<SlRoot> {
        (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| SlRoot { i, j })).collect()
    }

    /// Cartan integer ⟨β, α⟩ (equal to the Euclidean inner product in type A).
    pub fn pairing(beta: SlRoot, alpha: SlRoot, n: usize) -> i64 {
        beta.vector(n).iter().zip(alpha.vector(n)).map(|(a, b)| a * b).sum()
    }

    /// `s_α(β)`.
    pub fn reflect(alpha: SlRoot, beta: SlRoot, n: usize) -> SlRoot {
        let c = SlRoot::pairing(beta, alpha, n);
        let v: Vec<i64> = beta.vector(n).iter().zip(alpha.vector(n)).map(|(b, a)| b - c * a).collect();
        SlRoot::from_vector(&v).expect("reflection of a root is a root")
    }
}

/// `x_α(t) = I + t E_{ij}`.
pub fn x_elem(n: usize, a: SlRoot, t: &Q) -> Matrix {
    let mut m = Matrix::identity(n);
    m.rows[a.i][a.j] = t.clone();
    m
}

/// `w_α(t) = x_α(t) x_{−α}(−t⁻¹) x_α(t)`.
pub fn w_elem(n: usize, a: SlRoot, t: &Q) -> Result<Matrix, ChevalleyError> {
    if t.is_zero() {
        return Err(ChevalleyError::ZeroParameter);
    }
    let x = x_elem(n, a, t);
    let y = x_elem(n, a.neg(), &(-t.recip()));
    Ok(&(&x * &y) * &x)
}

/// `h_α(t) = w_α(t) w_α(1)⁻¹`.
pub fn h_elem(n: usize, a: SlRoot, t: &Q) -> Result<Matrix, ChevalleyError> {
    let w = w_elem(n, a, t)?;
    let w1 = w_elem(n, a, &Q::one())?;
    Ok(&w * &w1.inverse()?)
}

/// `[g, h] = g h g⁻¹ h⁻¹`.
pub fn commutator(g: &Matrix, h: &Matrix) -> Result<Matrix, ChevalleyError> {
    Ok(&(&(g * h) * &g.inverse()?) * &h.inverse()?)
}

/// If `m = x_γ(c)` for a single root γ, returns `(γ, c)`.
pub fn as_root_element(m: &Matrix) -> Option<(SlRoot, Q)> {
    let n = m.n();
    let mut found = None;
    for i in 0..n {
        for j in 0..n {
            let x = &m.rows[i][j];
            if i == j {
                if !x.is_one() {
                    return None;
                }
            } else if !x.is_zero() {
                if found.is_some() {
                    return None;
                }
                found = Some((SlRoot { i, j }, x.clone()));
            }
        }
    }
    found
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BorelDecomposition {
    pub t: Matrix,
    pub u: Matrix,
}

/// `g = t u` with t diagonal and u upper unitriangular; `t` is `δ(g)`.
pub fn borel_decompose(g: &Matrix) -> Result<BorelDecomposition, ChevalleyError> {
    if !g.is_upper_triangular() {
        return Err(ChevalleyError::NotUpperTriangular);
    }
    let d: Vec<Q> = (0..g.n()).map(|i| g.rows[i][i].clone()).collect();
    if d.iter().any(|x| x.is_zero()) {
        return Err(ChevalleyError::Singular);
    }
    let t = Matrix::diag(&d);
    let u = &t.inverse()? * g;
    Ok(BorelDecomposition { t, u })
}

/// p-adic valuation; `None` is the +∞ marker at zero.
pub fn valuation(x: &Q, p: u64) -> Option<i64> {
    vp(x, p)
}

/// Entries whose denominators involve only primes of S.
pub fn in_o_s(x: &Q, s: &[u64]) -> bool {
    rational::prime_factors(x.denom()).iter().all(|p| s.contains(p))
}

/// Units of O_S: numerator and denominator supported on S.
pub fn is_s_unit(x: &Q, s: &[u64]) -> bool {
    !x.is_zero() && in_o_s(x, s) && rational::prime_factors(x.numer()).iter().all(|p| s.contains(p))
}

/// Membership in B_n(O_S): upper triangular, O_S entries, S-unit diagonal, determinant 1.
pub fn in_gamma(g: &Matrix, s: &[u64]) -> Result<(), ChevalleyError> {
    if !g.is_upper_triangular() {
        return Err(ChevalleyError::NotUpperTriangular);
    }
    for (i, r) in g.rows.iter().enumerate() {
        for (j, x) in r.iter().enumerate() {
            if !in_o_s(x, s) {
                return Err(ChevalleyError::NotInGamma(format!("entry ({},{}) = {} not in O_S", i + 1, j + 1, to_pq(x))));
            }
        }
        if !is_s_unit(&r[i], s) {
            return Err(ChevalleyError::NotInGamma(format!("diagonal entry {} is not an S-unit", to_pq(&r[i]))));
        }
    }
    if !g.det().is_one() {
        return Err(ChevalleyError::NotInGamma("determinant is not 1".into()));
    }
    Ok(())
}

/// Character as coefficients over the basis `χ_{k,p}` (k = 1..n−1, p ∈ S).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharacterVec {
    pub rank: usize,
    pub primes: Vec<u64>,
    /// Keyed by `(k, p)` with 1-based k.
    #[serde(with = "coeff_map")]
    pub coeffs: BTreeMap<(usize, u64), Q>,
}

mod coeff_map {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(m: &BTreeMap<(usize, u64), Q>, s: S) -> Result<S::Ok, S::Error> {
        let v: BTreeMap<String, String> = m.iter().map(|((k, p), x)| (format!("{k},{p}"), to_pq(x))).collect();
        v.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<(usize, u64), Q>, D::Error> {
        let v = BTreeMap::<String, String>::deserialize(d)?;
        v.into_iter()
            .map(|(k, x)| {
                let (a, b) = k.split_once(',').ok_or_else(|| serde::de::Error::custom("key must be `k,p`"))?;
                let a = a.parse().map_err(serde::de::Error::custom)?;
                let b = b.parse().map_err(serde::de::Error::custom)?;
                Ok(((a, b), rational::parse_q(&x).map_err(serde::de::Error::custom)?))
            })
            .collect()
    }
}

impl CharacterVec {
    pub fn zero(rank: usize, primes: &[u64]) -> Self {
        CharacterVec { rank, primes: primes.to_vec(), coeffs: BTreeMap::new() }
    }

    /// Basis order: all k for the first prime, then all k for the next, and so on.
    pub fn basis_index(&self) -> Vec<(usize, u64)> {
        self.primes.iter().flat_map(|&p| (1..=self.rank).map(move |k| (k, p))).collect()
    }

    pub fn from_coefficients(rank: usize, primes: &[u64], c: &[Q]) -> Self {
        let mut x = CharacterVec::zero(rank, primes);
        for (key, v) in x.basis_index().into_iter().zip(c) {
            if !v.is_zero() {
                x.coeffs.insert(key, v.clone());
            }
        }
        x
    }

    pub fn coefficients(&self) -> Vec<Q> {
        self.basis_index().iter().map(|k| self.coeffs.get(k).cloned().unwrap_or_else(Q::zero)).collect()
    }

    pub fn basis(rank: usize, primes: &[u64], k: usize, p: u64) -> Self {
        let mut x = CharacterVec::zero(rank, primes);
        x.coeffs.insert((k, p), Q::one());
        x
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.values().all(|v| v.is_zero())
    }

    pub fn scale(&self, c: &Q) -> Self {
        CharacterVec::from_coefficients(self.rank, &self.primes, &rational::scale(c, &self.coefficients()))
    }

    pub fn validate(&self) -> Result<(), ChevalleyError> {
        for &(k, p) in self.coeffs.keys() {
            if !self.primes.contains(&p) {
                return Err(ChevalleyError::PrimeOutsideS(p));
            }
            if k == 0 || k > self.rank {
                return Err(ChevalleyError::BadRoot(k, k + 1, self.rank + 1));
            }
        }
        Ok(())
    }
}

/// `χ(g) = Σ λ_{k,p} (v_p(a_{k+1,k+1}) − v_p(a_{k,k}))` on `Γ = B_n(O_S)`.
pub fn character_eval(chi: &CharacterVec, g: &Matrix) -> Result<Q, ChevalleyError> {
    chi.validate()?;
    in_gamma(g, &chi.primes)?;
    let mut s = Q::zero();
    for (&(k, p), lam) in &chi.coeffs {
        let a = vp(&g.rows[k][k], p).expect("unit diagonal");
        let b = vp(&g.rows[k - 1][k - 1], p).expect("unit diagonal");
        s += lam * q(a - b);
    }
    Ok(s)
}

/// Observed structure sign `c` in `w_α x_β(t) w_α⁻¹ = x_{s_α β}(c t)`.
pub fn weyl_conjugation_sign(n: usize, alpha: SlRoot, beta: SlRoot, t: &Q) -> Result<Option<i64>, ChevalleyError> {
    let w = w_elem(n, alpha, &Q::one())?;
    let lhs = &(&w * &x_elem(n, beta, t)) * &w.inverse()?;
    let gamma = SlRoot::reflect(alpha, beta, n);
    Ok(match as_root_element(&lhs) {
        Some((g, c)) if g == gamma && !t.is_zero() => {
            let r = c / t;
            if r == q(1) {
                Some(1)
            } else if r == q(-1) {
                Some(-1)
            } else {
                None
            }
        }
        _ => None,
    })
}

/// Nonzero rational with numerator in ±[1, 30] and denominator in [1, 12].
pub fn random_q<R: Rng>(rng: &mut R) -> Q {
    let n = rng.gen_range(1..=30i64) * if rng.gen_bool(0.5) { 1 } else { -1 };
    qr(n, rng.gen_range(1..=12))
}

/// Random element of B_n(O_S): S-unit diagonal with product 1, O_S entries above it.
pub fn random_borel<R: Rng>(n: usize, s: &[u64], rng: &mut R) -> Matrix {
    let mut d = Vec::with_capacity(n);
    let mut prod = Q::one();
    for _ in 0..n - 1 {
        let mut x = if rng.gen_bool(0.5) { q(1) } else { q(-1) };
        for &p in s {
            x *= pow_q(p, rng.gen_range(-2..=2));
        }
        prod *= &x;
        d.push(x);
    }
    d.push(prod.recip());
    let mut g = Matrix::diag(&d);
    for i in 0..n {
        for j in i + 1..n {
            let mut den = Q::one();
            for &p in s {
                den *= pow_q(p, rng.gen_range(0..=2));
            }
            g.rows[i][j] = q(rng.gen_range(-9..=9)) / den;
        }
    }
    g
}

#[derive(Clone, Debug, Serialize)]
pub struct RelationReport {
    pub n: usize,
    pub trials: usize,
    pub additivity: bool,
    /// Commutator of the simple pair is a single `x_{α+β}(±st)` factor.
    pub commutator_single_factor: bool,
    pub commutator_sign: Option<i64>,
    /// Weyl conjugation signs per (α, β), stable across trials.
    pub weyl_signs_stable: bool,
    pub weyl_signs: Vec<(SlRoot, SlRoot, i64)>,
    pub torus_conjugation: bool,
    pub h_multiplicative: bool,
}

impl RelationReport {
    pub fn all(&self) -> bool {
        self.additivity && (self.n < 3 || self.commutator_single_factor) && self.weyl_signs_stable && self.torus_conjugation && self.h_multiplicative
    }
}

/// Relations (a), (b) for the simple pair, (d) and (e) over random parameters.
pub fn check_relations<R: Rng>(n: usize, trials: usize, rng: &mut R) -> RelationReport {
    let roots = SlRoot::all(n);
    let mut additivity = true;
    let mut comm_ok = true;
    let mut comm_sign: Option<i64> = None;
    let mut signs: BTreeMap<(SlRoot, SlRoot), i64> = BTreeMap::new();
    let mut stable = true;
    let mut torus = true;
    let mut hmul = true;
    for _ in 0..trials {
        let s = random_q(rng);
        let t = random_q(rng);
        for &a in &roots {
            additivity &= &x_elem(n, a, &s) * &x_elem(n, a, &t) == x_elem(n, a, &(&s + &t));
            let h = h_elem(n, a, &t).expect("t nonzero");
            hmul &= &h_elem(n, a, &s).unwrap() * &h == h_elem(n, a, &(&s * &t)).unwrap();
            for &b in &roots {
                let c = SlRoot::pairing(b, a, n);
                let lhs = &(&h * &x_elem(n, b, &s)) * &h.inverse().unwrap();
                torus &= lhs == x_elem(n, b, &(rational::pow_rat(&t, c) * &s));
                match weyl_conjugation_sign(n, a, b, &s).unwrap() {
                    Some(sg) => match signs.insert((a, b), sg) {
                        Some(old) if old != sg => stable = false,
                        _ => {}
                    },
                    None => stable = false,
                }
            }
        }
        if n >= 3 {
            let (a, b) = (SlRoot::simple(1), SlRoot::simple(2));
            let c = commutator(&x_elem(n, a, &s), &x_elem(n, b, &t)).unwrap();
            match as_root_element(&c) {
                Some((g, coef)) if g == (SlRoot { i: a.i, j: b.j }) => {
                    let st = &s * &t;
                    let sg = if coef == st { 1 } else if coef == -st { -1 } else { 0 };
                    if sg == 0 || comm_sign.is_some_and(|x| x != sg) {
                        comm_ok = false;
                    }
                    comm_sign = Some(sg);
                }
                _ => comm_ok = false,
            }
        }
    }
    RelationReport {
        n,
        trials,
        additivity,
        commutator_single_factor: comm_ok,
        commutator_sign: comm_sign,
        weyl_signs_stable: stable,
        weyl_signs: signs.into_iter().map(|((a, b), s)| (a, b, s)).collect(),
        torus_conjugation: torus,
        h_multiplicative: hmul,
    }
}
