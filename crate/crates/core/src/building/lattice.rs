//! Z_p-lattices in Q_p^n with rational bases, in canonical upper-triangular Hermite form.

use crate::chevalley::Matrix;
use crate::rational::{pow_q, vp, Q};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Column-style matrix: `rows[i][j]` is coordinate i of basis vector j.
pub type Mat = Vec<Vec<Q>>;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum LatticeError {
    #[error("generators do not span a full-rank lattice")]
    NotFullRank,
}

/// Representative of `x` modulo `p^e Z_p` in `Z[1/p] ∩ [0, p^e)`.
pub fn reduce_mod(x: &Q, p: u64, e: i64) -> Q {
    let Some(v) = vp(x, p) else { return Q::zero() };
    if v >= e {
        return Q::zero();
    }
    let pb = BigInt::from(p);
    let mut den = x.denom().clone();
    let mut k = 0u32;
    while (&den % &pb).is_zero() {
        den /= &pb;
        k += 1;
    }
    let m = (e + k as i64) as u32;
    let modulus = pb.pow(m);
    let inv = mod_inverse(&den, &modulus);
    let t = (x.numer() * inv).mod_floor(&modulus);
    Q::new(t, pb.pow(k))
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> BigInt {
    let g = a.mod_floor(m).extended_gcd(m);
    debug_assert!(g.gcd.is_one());
    g.x.mod_floor(m)
}

fn col(m: &Mat, j: usize) -> Vec<Q> {
    m.iter().map(|r| r[j].clone()).collect()
}

/// Hermite form of the lattice spanned by the columns of `gens`: upper triangular,
/// diagonal `p^{e_i}`, entries above the diagonal reduced into `[0, p^{e_i})`.
pub fn hermite_form(gens: &Mat, p: u64) -> Result<(Mat, Vec<i64>), LatticeError> {
    let n = gens.len();
    let ncols = gens.first().map_or(0, |r| r.len());
    let mut cols: Vec<Vec<Q>> = (0..ncols).map(|j| col(gens, j)).filter(|c| c.iter().any(|x| !x.is_zero())).collect();
    let mut out: Vec<Vec<Q>> = vec![Vec::new(); n];
    let mut exps = vec![0i64; n];
    for i in (0..n).rev() {
        let best = cols
            .iter()
            .enumerate()
            .filter_map(|(j, c)| vp(&c[i], p).map(|v| (v, j)))
            .min()
            .ok_or(LatticeError::NotFullRank)?;
        let (e, j) = best;
        let mut piv = cols.remove(j);
        let unit = &piv[i] / pow_q(p, e);
        let uinv = unit.recip();
        for x in piv.iter_mut() {
            *x *= &uinv;
        }
        let pe = pow_q(p, e);
        for c in cols.iter_mut() {
            if !c[i].is_zero() {
                let f = &c[i] / &pe;
                for (a, b) in c.iter_mut().zip(&piv) {
                    *a -= &f * b;
                }
            }
        }
        out[i] = piv;
        exps[i] = e;
    }
    for i in (0..n).rev() {
        let pe = pow_q(p, exps[i]);
        for j in i + 1..n {
            let x = out[j][i].clone();
            let r = reduce_mod(&x, p, exps[i]);
            if r != x {
                let f = (&x - &r) / &pe;
                let ci = out[i].clone();
                for (a, b) in out[j].iter_mut().zip(&ci) {
                    *a -= &f * b;
                }
            }
        }
    }
    let m: Mat = (0..n).map(|i| (0..n).map(|j| out[j][i].clone()).collect()).collect();
    Ok((m, exps))
}

/// Canonical representative of the homothety class: Hermite form scaled so the smallest exponent is 0.
pub fn class_form(gens: &Mat, p: u64) -> Result<Mat, LatticeError> {
    let (m, exps) = hermite_form(gens, p)?;
    let shift = *exps.iter().min().unwrap();
    Ok(scale(&m, &pow_q(p, -shift)))
}

pub fn scale(m: &Mat, c: &Q) -> Mat {
    m.iter().map(|r| r.iter().map(|x| x * c).collect()).collect()
}

pub fn mul(a: &Mat, b: &Mat) -> Mat {
    (&Matrix { rows: a.clone() } * &Matrix { rows: b.clone() }).rows
}

pub fn inverse(a: &Mat) -> Mat {
    Matrix { rows: a.clone() }.inverse().expect("full-rank lattice").rows
}

/// Minimum p-adic valuation of the entries; `None` for the zero matrix.
pub fn min_valuation(m: &Mat, p: u64) -> Option<i64> {
    m.iter().flatten().filter_map(|x| vp(x, p)).min()
}

/// `small ⊆ big` as Z_p-lattices.
pub fn contains(big: &Mat, small: &Mat, p: u64) -> bool {
    min_valuation(&mul(&inverse(big), small), p).is_none_or(|v| v >= 0)
}

/// `v_p(det)`: the log index relative to the standard lattice.
pub fn log_volume(m: &Mat, p: u64) -> i64 {
    vp(&Matrix { rows: m.clone() }.det(), p).expect("full rank")
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(n: usize, k: usize, s: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in s..n {
            cur.push(i);
            rec(n, k, i + 1, cur, out);
            cur.pop();
        }
    }
    rec(n, k, 0, &mut cur, &mut out);
    out
}

/// Elementary divisor exponents of `m` over Z_p, ascending, from minimal minor valuations.
pub fn elementary_exponents(m: &Mat, p: u64) -> Vec<i64> {
    let n = m.len();
    let mut d = vec![0i64; n + 1];
    for k in 1..=n {
        let mut best: Option<i64> = None;
        for rs in combinations(n, k) {
            for cs in combinations(n, k) {
                let sub = Matrix { rows: rs.iter().map(|&i| cs.iter().map(|&j| m[i][j].clone()).collect()).collect() };
                if let Some(v) = vp(&sub.det(), p) {
                    best = Some(best.map_or(v, |b: i64| b.min(v)));
                }
            }
        }
        d[k] = best.expect("full rank");
    }
    (1..=n).map(|k| d[k] - d[k - 1]).collect()
}

/// Combinatorial distance between the vertices `[a]` and `[b]`.
pub fn vertex_distance(a: &Mat, b: &Mat, p: u64) -> i64 {
    let e = elementary_exponents(&mul(&inverse(a), b), p);
    e[e.len() - 1] - e[0]
}

/// Diagonal lattice `diag(p^{a_1}, …, p^{a_n})`.
pub fn diagonal(a: &[i64], p: u64) -> Mat {
    let n = a.len();
    (0..n).map(|i| (0..n).map(|j| if i == j { pow_q(p, a[i]) } else { Q::zero() }).collect()).collect()
}

/// Exponents `a` with `a_1 = 0` and `a_{k+1} − a_k = y_k`.
pub fn exponents_of_y(y: &[i64]) -> Vec<i64> {
    let mut a = vec![0i64];
    for &x in y {
        a.push(a.last().unwrap() + x);
    }
    a
}

pub fn y_of_exponents(a: &[i64]) -> Vec<i64> {
    a.windows(2).map(|w| w[1] - w[0]).collect()
}

pub fn is_zero_matrix(m: &Mat) -> bool {
    m.iter().flatten().all(|x| x.is_zero())
}

pub fn to_strings(m: &Mat) -> Vec<Vec<String>> {
    m.iter().map(|r| r.iter().map(crate::rational::to_pq).collect()).collect()
}

/// Integer vector as a column with entries in `[0, p)` interpreted rationally.
pub fn int_column(x: &[u64]) -> Vec<Q> {
    x.iter().map(|&v| Q::from_integer(BigInt::from(v))).collect()
}

pub fn is_p_integral(x: &Q, p: u64) -> bool {
    vp(x, p).is_none_or(|v| v >= 0)
}

pub fn abs_max_entry(m: &Mat) -> Q {
    m.iter().flatten().map(|x| x.abs()).max().unwrap_or_else(Q::zero)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qr};

    #[test]
    fn reduction_representatives() {
        assert_eq!(reduce_mod(&qr(1, 3), 2, 2), q(3));
        assert_eq!(reduce_mod(&qr(5, 4), 2, 0), qr(1, 4));
        assert_eq!(reduce_mod(&q(8), 2, 3), q(0));
        assert_eq!(reduce_mod(&qr(-1, 2), 3, 1), q(1));
    }

    #[test]
    fn standard_lattice_is_fixed_by_integral_change_of_basis() {
        let g = vec![vec![q(2), q(1)], vec![q(7), q(4)]];
        let (m, e) = hermite_form(&g, 5).unwrap();
        assert_eq!(m, diagonal(&[0, 0], 5));
        assert_eq!(e, vec![0, 0]);
    }

    #[test]
    fn lower_unipotent_vertex() {
        let g = vec![vec![q(1), q(0)], vec![qr(1, 3), q(1)]];
        let (_, e) = hermite_form(&g, 3).unwrap();
        assert_eq!(e, vec![1, -1]);
        assert_eq!(elementary_exponents(&g, 3), vec![-1, 1]);
    }
}
