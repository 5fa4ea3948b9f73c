//! Frank–Tardos cost rounding.
//!
//! Given `c` and `N`, produce an integral `c̆` with
//! `||c̆||_inf <= 2^(4n^3) N^(n(n+2))` such that `sign(cᵀz) = sign(c̆ᵀz)` for
//! every integral `z` with `||z||_1 <= N - 1`.
//!
//! The construction repeatedly normalizes the remaining direction `w`,
//! approximates it simultaneously by `p / q` with error at most `1/N`
//! (LLL on the standard embedding lattice), and continues with the residual
//! `q w/||w|| - p`. Every round zeroes at least one more coordinate, so there
//! are at most `n` rounds. For admissible `z` the sign of `cᵀz` is the sign
//! of the first nonzero `p_iᵀz`, and `c̆ = sum M^(t-i) p_i` with
//! `M = 2 max||p_i|| (N-1) + 1` keeps that lexicographic order.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::linalg::{self, RationalMatrix};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LllError {
    #[error("basis vectors are linearly dependent")]
    DependentBasis,
    #[error("basis rows have inconsistent lengths")]
    Ragged,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundedCost {
    pub cbreve: Vec<BigInt>,
    pub big_n: BigInt,
    /// `2^(4n^3) * N^(n(n+2))`.
    pub bound: BigInt,
}

impl RoundedCost {
    pub fn norm(&self) -> BigInt {
        self.cbreve.iter().map(|c| c.abs()).max().unwrap_or_default()
    }

    pub fn within_bound(&self) -> bool {
        self.norm() <= self.bound
    }
}

/// `2^(4n^3) * N^(n(n+2))`.
pub fn norm_bound(n: usize, big_n: &BigInt) -> BigInt {
    let two_exp = 4 * n * n * n;
    let n_exp = n * (n + 2);
    (BigInt::one() << two_exp) * num_traits::pow(big_n.clone(), n_exp)
}

/// Lovász parameter.
const DELTA_NUM: i64 = 3;
const DELTA_DEN: i64 = 4;

fn delta() -> BigRational {
    BigRational::new(DELTA_NUM.into(), DELTA_DEN.into())
}

fn qi(v: &BigInt) -> BigRational {
    BigRational::from_integer(v.clone())
}

fn gram_schmidt(b: &[Vec<BigInt>]) -> (Vec<Vec<BigRational>>, Vec<BigRational>) {
    let d = b.len();
    let mut mu = vec![vec![BigRational::zero(); d]; d];
    let mut norms = vec![BigRational::zero(); d];
    let mut star: Vec<Vec<BigRational>> = Vec::with_capacity(d);
    for i in 0..d {
        let mut v: Vec<BigRational> = b[i].iter().map(qi).collect();
        let bi: Vec<BigRational> = v.clone();
        for j in 0..i {
            mu[i][j] = linalg::dot(&bi, &star[j]) / &norms[j];
            for (vk, sk) in v.iter_mut().zip(&star[j]) {
                *vk -= &mu[i][j] * sk;
            }
        }
        norms[i] = linalg::dot(&v, &v);
        star.push(v);
    }
    (mu, norms)
}

fn round_half(x: &BigRational) -> BigInt {
    // nearest integer, halves rounded toward +inf
    let two = BigInt::from(2);
    (x.numer() * &two + x.denom()).div_floor(&(x.denom() * &two))
}

/// LLL reduction with `δ = 3/4` in exact arithmetic. Rows are basis vectors.
pub fn lll_reduce(basis: &[Vec<BigInt>]) -> Result<Vec<Vec<BigInt>>, LllError> {
    let d = basis.len();
    if d == 0 {
        return Ok(Vec::new());
    }
    let dim = basis[0].len();
    if basis.iter().any(|r| r.len() != dim) {
        return Err(LllError::Ragged);
    }
    let m = RationalMatrix::from_int_rows(dim, basis).map_err(|_| LllError::Ragged)?;
    if linalg::rank(&m) < d {
        return Err(LllError::DependentBasis);
    }
    let mut b = basis.to_vec();
    let (mut mu, mut norms) = gram_schmidt(&b);
    let half = BigRational::new(1.into(), 2.into());
    let delta = delta();

    let size_reduce = |b: &mut Vec<Vec<BigInt>>, mu: &mut Vec<Vec<BigRational>>, k: usize, l: usize| {
        if mu[k][l].abs() <= half {
            return;
        }
        let r = round_half(&mu[k][l]);
        let (head, tail) = b.split_at_mut(k);
        for (x, y) in tail[0].iter_mut().zip(&head[l]) {
            *x -= &r * y;
        }
        let rq = qi(&r);
        for j in 0..l {
            let t = &rq * &mu[l][j];
            mu[k][j] -= t;
        }
        mu[k][l] -= rq;
    };

    let mut k = 1;
    while k < d {
        size_reduce(&mut b, &mut mu, k, k - 1);
        let lhs = &norms[k];
        let rhs = (&delta - &mu[k][k - 1] * &mu[k][k - 1]) * &norms[k - 1];
        if *lhs < rhs {
            let m_ = mu[k][k - 1].clone();
            let big_b = &norms[k] + &m_ * &m_ * &norms[k - 1];
            mu[k][k - 1] = &m_ * &norms[k - 1] / &big_b;
            norms[k] = &norms[k - 1] * &norms[k] / &big_b;
            norms[k - 1] = big_b;
            b.swap(k, k - 1);
            for j in 0..k - 1 {
                let t = mu[k][j].clone();
                mu[k][j] = std::mem::replace(&mut mu[k - 1][j], t);
            }
            for i in k + 1..d {
                let t = mu[i][k].clone();
                mu[i][k] = &mu[i][k - 1] - &m_ * &t;
                mu[i][k - 1] = t + &mu[k][k - 1] * &mu[i][k];
            }
            k = (k - 1).max(1);
        } else {
            for l in (0..k.saturating_sub(1)).rev() {
                size_reduce(&mut b, &mut mu, k, l);
            }
            k += 1;
        }
    }
    Ok(b)
}

/// Checks size reduction and the Lovász condition directly from a fresh
/// Gram–Schmidt decomposition.
pub fn is_lll_reduced(b: &[Vec<BigInt>]) -> bool {
    let (mu, norms) = gram_schmidt(b);
    let half = BigRational::new(1.into(), 2.into());
    let delta = delta();
    for i in 0..b.len() {
        for j in 0..i {
            if mu[i][j].abs() > half {
                return false;
            }
        }
        if i > 0 && norms[i] < (&delta - &mu[i][i - 1] * &mu[i][i - 1]) * &norms[i - 1] {
            return false;
        }
    }
    true
}

/// Integer `q >= 1` and integers `p` with `|q alpha_j - p_j| <= 1/N`, via LLL
/// on the basis `e_1, ..., e_n, (-alpha, eta)` with
/// `eta = 2^-ceil(n(n+1)/4) N^-(n+1)`, which forces `q <= 2^ceil(n(n+1)/4) N^n`.
/// Among the reduced vectors that qualify, the one with smallest `q` is used.
pub fn simultaneous_approximation(alpha: &[BigRational], big_n: &BigInt) -> (BigInt, Vec<BigInt>) {
    let n = alpha.len();
    assert!(n > 0 && *big_n >= BigInt::one());
    let e = (n * (n + 1)).div_ceil(4);
    let eta = BigRational::new(BigInt::one(), (BigInt::one() << e) * num_traits::pow(big_n.clone(), n + 1));
    let mut scale = eta.denom().clone();
    for a in alpha {
        scale = scale.lcm(a.denom());
    }
    let sq = BigRational::from_integer(scale.clone());
    let mut basis = Vec::with_capacity(n + 1);
    for j in 0..n {
        let mut row = vec![BigInt::zero(); n + 1];
        row[j] = scale.clone();
        basis.push(row);
    }
    let mut last: Vec<BigInt> = alpha.iter().map(|a| (-(a * &sq)).to_integer()).collect();
    last.push((&eta * &sq).to_integer());
    basis.push(last);

    let reduced = lll_reduce(&basis).expect("embedding basis is nonsingular");
    let eta_scaled = (&eta * &sq).to_integer();
    let tol = BigRational::new(BigInt::one(), big_n.clone());
    let mut best: Option<(BigInt, Vec<BigInt>)> = None;
    for v in &reduced {
        let (q, rem) = v[n].div_rem(&eta_scaled);
        debug_assert!(rem.is_zero());
        if q.is_zero() {
            continue;
        }
        // v_j = scale (p_j - q alpha_j)
        let mut p = Vec::with_capacity(n);
        let mut ok = true;
        for j in 0..n {
            let err = BigRational::new(v[j].clone(), scale.clone());
            if err.abs() > tol {
                ok = false;
                break;
            }
            p.push((err + qi(&q) * &alpha[j]).to_integer());
        }
        if !ok {
            continue;
        }
        let (q, p) = if q.is_negative() {
            (-q, p.into_iter().map(|x| -x).collect())
        } else {
            (q, p)
        };
        if best.as_ref().is_none_or(|(bq, _)| q < *bq) {
            best = Some((q, p));
        }
    }
    best.expect("first reduced vector always satisfies the approximation bound")
}

/// Frank–Tardos rounding of a rational cost for parameter `N >= 1`. For
/// `N = 1` only `z = 0` is admissible and the zero vector is returned.
pub fn frank_tardos(cost: &[BigRational], big_n: &BigInt) -> RoundedCost {
    assert!(big_n.is_positive(), "N must be positive");
    let n = cost.len();
    let bound = norm_bound(n, big_n);
    let zero = || RoundedCost {
        cbreve: vec![BigInt::zero(); n],
        big_n: big_n.clone(),
        bound: bound.clone(),
    };
    if big_n.is_one() || cost.iter().all(Zero::is_zero) {
        return zero();
    }
    let mut w: Vec<BigRational> = cost.to_vec();
    let mut parts: Vec<Vec<BigInt>> = Vec::new();
    while w.iter().any(|x| !x.is_zero()) {
        assert!(parts.len() < n, "support must shrink every round");
        let norm = linalg::max_abs(&w);
        let v: Vec<BigRational> = w.iter().map(|x| x / &norm).collect();
        let (q, p) = simultaneous_approximation(&v, big_n);
        let qq = qi(&q);
        w = v.iter().zip(&p).map(|(vj, pj)| &qq * vj - qi(pj)).collect();
        parts.push(p);
    }
    let qmax = parts.iter().flatten().map(|x| x.abs()).max().unwrap_or_default();
    let base = BigInt::from(2) * qmax * (big_n - BigInt::one()) + BigInt::one();
    let mut cbreve = vec![BigInt::zero(); n];
    for p in &parts {
        for (c, pj) in cbreve.iter_mut().zip(p) {
            *c = &*c * &base + pj;
        }
    }
    RoundedCost {
        cbreve,
        big_n: big_n.clone(),
        bound,
    }
}

pub fn frank_tardos_int(cost: &[BigInt], big_n: &BigInt) -> RoundedCost {
    frank_tardos(&linalg::to_rational(cost), big_n)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dot_int(a: &[BigInt], b: &[BigInt]) -> BigInt {
        a.iter().zip(b).map(|(x, y)| x * y).sum()
    }

    fn iv(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    /// All integer points with `||z||_1 <= r` in dimension `n`.
    fn l1_ball(n: usize, r: i64) -> Vec<Vec<i64>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for x in -r..=r {
            for mut rest in l1_ball(n - 1, r - x.abs()) {
                rest.insert(0, x);
                out.push(rest);
            }
        }
        out
    }

    fn signs_agree(c: &[BigInt], cb: &[BigInt], big_n: i64) -> bool {
        l1_ball(c.len(), big_n - 1).into_iter().all(|z| {
            let z = iv(&z);
            dot_int(c, &z).signum() == dot_int(cb, &z).signum()
        })
    }

    #[test]
    fn identity_is_reduced() {
        let id = vec![iv(&[1, 0, 0]), iv(&[0, 1, 0]), iv(&[0, 0, 1])];
        assert_eq!(lll_reduce(&id).unwrap(), id);
        assert_eq!(lll_reduce(&[iv(&[7])]).unwrap(), vec![iv(&[7])]);
    }

    #[test]
    fn skewed_basis_gets_reduced() {
        let b = vec![iv(&[1, 0]), iv(&[1_000_003, 1])];
        let r = lll_reduce(&b).unwrap();
        assert!(is_lll_reduced(&r));
        // unimodular change of basis: same determinant up to sign
        let det = &r[0][0] * &r[1][1] - &r[0][1] * &r[1][0];
        assert_eq!(det.abs(), BigInt::one());
        let sq: BigInt = dot_int(&r[0], &r[0]);
        assert!(sq <= BigInt::from(2));
    }

    #[test]
    fn dependent_basis_is_rejected() {
        assert_eq!(lll_reduce(&[iv(&[1, 2]), iv(&[2, 4])]), Err(LllError::DependentBasis));
    }

    #[test]
    fn zero_cost_rounds_to_zero() {
        let r = frank_tardos_int(&iv(&[0, 0, 0]), &BigInt::from(5));
        assert_eq!(r.cbreve, iv(&[0, 0, 0]));
    }

    #[test]
    fn one_dimensional_keeps_sign() {
        let r = frank_tardos_int(&iv(&[9]), &BigInt::from(3));
        assert!(r.cbreve[0].is_positive());
        assert!(r.cbreve[0] <= BigInt::from(16 * 27));
        assert!(signs_agree(&iv(&[9]), &r.cbreve, 3));
    }

    #[test]
    fn two_dimensional_exhaustive() {
        let c = iv(&[3, 1]);
        let r = frank_tardos_int(&c, &BigInt::from(3));
        assert_eq!(l1_ball(2, 2).len(), 13);
        assert!(signs_agree(&c, &r.cbreve, 3));
        assert!(r.within_bound());
    }

    #[test]
    fn approximation_quality() {
        let alpha: Vec<BigRational> = [(1, 3), (-2, 7), (1, 1)]
            .iter()
            .map(|&(a, b)| BigRational::new(a.into(), b.into()))
            .collect();
        let big_n = BigInt::from(10);
        let (q, p) = simultaneous_approximation(&alpha, &big_n);
        assert!(q.is_positive());
        for (a, pj) in alpha.iter().zip(&p) {
            let err = (qi(&q) * a - qi(pj)).abs();
            assert!(err <= BigRational::new(1.into(), 10.into()));
        }
    }

    #[test]
    fn rational_input_is_accepted() {
        let c: Vec<BigRational> = vec![BigRational::new(1.into(), 3.into()), BigRational::new((-1).into(), 2.into())];
        let r = frank_tardos(&c, &BigInt::from(4));
        for z in l1_ball(2, 3) {
            let zq: Vec<BigRational> = z.iter().map(|&x| BigRational::from_integer(x.into())).collect();
            let lhs = linalg::dot(&c, &zq);
            let rhs = dot_int(&r.cbreve, &iv(&z));
            assert_eq!(lhs.signum(), BigRational::from_integer(rhs.signum()));
        }
    }
}
