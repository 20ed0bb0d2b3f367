//! Gaussian binomials, trinomial products and q-Pochhammer symbols.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{QError, Result};
use crate::qpoly::{QLaurent, QSeries};

/// Cache key; `bottom` is normalized to `min(bottom, top - bottom)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BinomKey {
    pub top: i64,
    pub bottom: i64,
    pub d: u32,
}

impl BinomKey {
    pub fn new(top: i64, bottom: i64, d: u32) -> Self {
        BinomKey { top, bottom: bottom.min(top - bottom), d }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct CacheLimits {
    pub max_top: i64,
    pub max_d: u32,
}

impl Default for CacheLimits {
    fn default() -> Self {
        CacheLimits { max_top: 400, max_d: 4 }
    }
}

pub struct BinomCache {
    limits: CacheLimits,
    map: RwLock<HashMap<BinomKey, Arc<QLaurent>>>,
}

impl BinomCache {
    pub fn new(limits: CacheLimits) -> Self {
        BinomCache { limits, map: RwLock::new(HashMap::new()) }
    }

    pub fn global() -> &'static BinomCache {
        static CACHE: OnceLock<BinomCache> = OnceLock::new();
        CACHE.get_or_init(|| BinomCache::new(CacheLimits::default()))
    }

    pub fn len(&self) -> usize {
        self.map.read().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn cacheable(&self, key: &BinomKey) -> bool {
        key.top <= self.limits.max_top && key.d <= self.limits.max_d
    }

    fn lookup(&self, key: &BinomKey) -> Option<Arc<QLaurent>> {
        self.map.read().unwrap().get(key).cloned()
    }

    fn store(&self, key: BinomKey, value: Arc<QLaurent>) -> Arc<QLaurent> {
        if !self.cacheable(&key) {
            return value;
        }
        self.map.write().unwrap().entry(key).or_insert(value).clone()
    }

    /// `[top, bottom]` in base `q^d`.
    pub fn get(&self, top: i64, bottom: i64, d: u32) -> Arc<QLaurent> {
        assert!(d >= 1, "q-binomial base power must be positive");
        if bottom < 0 || bottom > top {
            return zero_poly();
        }
        let key = BinomKey::new(top, bottom, d);
        if key.bottom == 0 {
            return one_poly();
        }
        if let Some(v) = self.lookup(&key) {
            return v;
        }
        let value = if d == 1 {
            Arc::new(self.pascal(key.top, key.bottom))
        } else {
            Arc::new(self.get(top, bottom, 1).substitute_power(d))
        };
        self.store(key, value)
    }

    /// Column fill of the Pascal recurrence `[r, j] = [r-1, j-1] + q^j [r-1, j]`,
    /// keeping `j <= k`. Intermediate entries are cached when they are cheap.
    fn pascal(&self, n: i64, k: i64) -> QLaurent {
        let k = k as usize;
        let keep_all = (k as i64) * (n - k as i64) <= 4000;
        // col[j] holds dense coefficients of [r, j]
        let mut col: Vec<Vec<BigInt>> = vec![vec![BigInt::one()]];
        for r in 1..=n as usize {
            if r <= k {
                col.push(vec![BigInt::one()]);
            }
            for j in (1..=k.min(r - 1)).rev() {
                let prev = &col[j - 1];
                let cur = &col[j];
                let len = prev.len().max(cur.len() + j);
                let mut next = vec![BigInt::zero(); len];
                for (i, c) in prev.iter().enumerate() {
                    next[i] += c;
                }
                for (i, c) in cur.iter().enumerate() {
                    next[i + j] += c;
                }
                col[j] = next;
            }
            if keep_all && r < n as usize {
                for (j, c) in col.iter().enumerate().skip(1) {
                    if j < r && 2 * j <= r {
                        let key = BinomKey::new(r as i64, j as i64, 1);
                        if self.cacheable(&key) && self.lookup(&key).is_none() {
                            self.store(key, Arc::new(dense_poly(c)));
                        }
                    }
                }
            }
        }
        dense_poly(&col[k])
    }
}

fn dense_poly(c: &[BigInt]) -> QLaurent {
    let terms = c.iter().enumerate().map(|(i, x)| (i as i64, x.clone())).collect();
    QLaurent::from_numerators(BigInt::one(), terms)
}

fn zero_poly() -> Arc<QLaurent> {
    static Z: OnceLock<Arc<QLaurent>> = OnceLock::new();
    Z.get_or_init(|| Arc::new(QLaurent::zero())).clone()
}

fn one_poly() -> Arc<QLaurent> {
    static O: OnceLock<Arc<QLaurent>> = OnceLock::new();
    O.get_or_init(|| Arc::new(QLaurent::one())).clone()
}

/// Gaussian binomial `[top, bottom]_{q^d}`, zero outside `0 <= bottom <= top`.
pub fn qbin(top: i64, bottom: i64, d: u32) -> Arc<QLaurent> {
    BinomCache::global().get(top, bottom, d)
}

/// `[L, m] [L-m, n]`.
pub fn trinom(l: i64, m: i64, n: i64) -> QLaurent {
    if m < 0 || n < 0 || m + n > l {
        return QLaurent::zero();
    }
    qbin(l, m, 1).as_ref() * qbin(l - m, n, 1).as_ref()
}

/// Signed monomial `coeff * q^exp`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Monomial {
    pub coeff: i64,
    pub exp: i64,
}

impl Monomial {
    pub fn new(coeff: i64, exp: i64) -> Self {
        Monomial { coeff, exp }
    }

    pub fn q(exp: i64) -> Self {
        Monomial { coeff: 1, exp }
    }

    pub fn to_laurent(self) -> QLaurent {
        QLaurent::int_monomial(self.coeff, self.exp)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.coeff, self.exp) {
            (c, 0) => write!(f, "{c}"),
            (1, 1) => write!(f, "q"),
            (-1, 1) => write!(f, "-q"),
            (1, e) => write!(f, "q^{e}"),
            (-1, e) => write!(f, "-q^{e}"),
            (c, 1) => write!(f, "{c}q"),
            (c, e) => write!(f, "{c}q^{e}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PochLength {
    Finite(i64),
    Infinite,
}

/// `(a_1, ..., a_r; q^d)_n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PochSpec {
    pub factors: Vec<Monomial>,
    pub d: i64,
    pub length: PochLength,
}

impl PochSpec {
    pub fn finite(factors: Vec<Monomial>, d: i64, n: i64) -> Self {
        PochSpec { factors, d, length: PochLength::Finite(n) }
    }

    pub fn infinite(factors: Vec<Monomial>, d: i64) -> Self {
        PochSpec { factors, d, length: PochLength::Infinite }
    }
}

fn one_minus(a: Monomial, shift: i64) -> QLaurent {
    QLaurent::one() - QLaurent::int_monomial(a.coeff, a.exp + shift)
}

/// Finite Pochhammer product. A negative length `-n` uses
/// `(a; q^d)_{-n} = 1 / (a q^{-d}; q^{-d})_n`, which is only Laurent when that
/// product collapses to a single term.
pub fn poch_finite(spec: &PochSpec) -> Result<QLaurent> {
    let n = match spec.length {
        PochLength::Finite(n) => n,
        PochLength::Infinite => {
            return Err(QError::InvalidParams("infinite product needs a truncation".into()))
        }
    };
    let mut acc = QLaurent::one();
    if n >= 0 {
        for &a in &spec.factors {
            for j in 0..n {
                acc = &acc * &one_minus(a, spec.d * j);
            }
        }
        return Ok(acc);
    }
    for &a in &spec.factors {
        for j in 0..-n {
            acc = &acc * &one_minus(a, -spec.d - spec.d * j);
        }
    }
    if acc.len() != 1 {
        return Err(QError::NotLaurent(format!("reciprocal of {acc}")));
    }
    let (e, c) = acc.iter().next().unwrap();
    Ok(QLaurent::monomial(&num_traits::Inv::inv(c), -e))
}

/// Multiplies dense numerators by `1 - c q^k` in place, dropping anything past the end.
fn mul_one_minus(v: &mut [BigInt], c: i64, k: usize) {
    if k == 0 {
        let f = BigInt::from(1 - c);
        v.iter_mut().for_each(|x| *x *= &f);
        return;
    }
    for i in (k..v.len()).rev() {
        if !v[i - k].is_zero() {
            let t = &v[i - k] * c;
            v[i] -= t;
        }
    }
}

/// Infinite Pochhammer product modulo `q^(trunc+1)`.
pub fn poch_infinite(spec: &PochSpec, trunc: usize) -> Result<QSeries> {
    let mut v = vec![BigInt::zero(); trunc + 1];
    v[0] = BigInt::one();
    for &a in &spec.factors {
        if a.coeff == 0 {
            continue;
        }
        if spec.d <= 0 {
            return Err(QError::DivergentSpec(format!(
                "factor {a} never leaves the window with base q^{}",
                spec.d
            )));
        }
        if a.exp < 0 {
            return Err(QError::NotAPowerSeries { exponent: a.exp });
        }
        let mut e = a.exp;
        while e <= trunc as i64 {
            mul_one_minus(&mut v, a.coeff, e as usize);
            e += spec.d;
        }
    }
    Ok(QSeries::from_numerators(trunc, BigInt::one(), v))
}

/// `1 / (q; q)_n` as a series; `None` means `n = infinity`.
pub fn inv_q_poch(n: Option<usize>, trunc: usize) -> QSeries {
    let mut v = vec![BigInt::zero(); trunc + 1];
    v[0] = BigInt::one();
    let upto = n.unwrap_or(trunc).min(trunc);
    for i in 1..=upto {
        for e in i..=trunc {
            let t = v[e - i].clone();
            v[e] += t;
        }
    }
    QSeries::from_numerators(trunc, BigInt::one(), v)
}

/// `(-z; q)_L`, the product side of the finite q-binomial theorem.
pub fn qbinom_theorem_rhs(l: i64, z: Monomial) -> QLaurent {
    let spec = PochSpec::finite(vec![Monomial::new(-z.coeff, z.exp)], 1, l);
    poch_finite(&spec).expect("nonnegative length")
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    use proptest::prelude::*;

    fn p(c: &[i64]) -> QLaurent {
        QLaurent::from_int_coeffs(0, c)
    }

    /// Gaussian binomial by exact division of `(q^d;q^d)` products.
    fn oracle_qbin(n: i64, k: i64, d: u32) -> QLaurent {
        if k < 0 || k > n {
            return QLaurent::zero();
        }
        let qd = |m: i64| -> QLaurent {
            let mut acc = QLaurent::one();
            for i in 1..=m {
                acc = &acc * &(QLaurent::one() - QLaurent::q_pow(i * d as i64));
            }
            acc
        };
        let num = qd(n);
        let den = &qd(k) * &qd(n - k);
        // num / den by long division of dense integer polynomials
        let deg = |x: &QLaurent| x.max_exp().unwrap() as usize;
        let coeffs = |x: &QLaurent| -> Vec<i128> {
            let mut v = vec![0i128; deg(x) + 1];
            for (e, c) in x.numerators() {
                v[e as usize] = i128::try_from(c).unwrap();
            }
            v
        };
        let mut r = coeffs(&num);
        let dv = coeffs(&den);
        let qlen = r.len() - dv.len() + 1;
        let mut quo = vec![0i128; qlen];
        for i in (0..qlen).rev() {
            let c = r[i + dv.len() - 1] / dv[dv.len() - 1];
            quo[i] = c;
            for (j, x) in dv.iter().enumerate() {
                r[i + j] -= c * x;
            }
        }
        assert!(r.iter().all(|&x| x == 0));
        let terms = quo.iter().enumerate().map(|(i, &c)| (i as i64, BigInt::from(c))).collect();
        QLaurent::from_numerators(BigInt::one(), terms)
    }

    #[test]
    fn examples() {
        assert_eq!(*qbin(4, 2, 1), p(&[1, 1, 2, 1, 1]));
        assert!(qbin(3, -1, 1).is_zero());
        assert_eq!(*qbin(3, 1, 2), p(&[1, 0, 1, 0, 1]));
        for n in 0..6 {
            for d in 1..4 {
                assert!(qbin(n, 0, d).is_one());
            }
        }
    }

    #[test]
    fn matches_division_oracle() {
        let cache = BinomCache::new(CacheLimits::default());
        for n in 0..=14 {
            for k in -1..=n + 1 {
                for d in 1..=3 {
                    assert_eq!(*cache.get(n, k, d), oracle_qbin(n, k, d), "[{n},{k}]_{d}");
                }
            }
        }
    }

    #[test]
    fn uncached_large_top() {
        let small = BinomCache::new(CacheLimits { max_top: 5, max_d: 1 });
        assert_eq!(*small.get(9, 4, 1), *qbin(9, 4, 1));
        assert!(small.len() <= 20);
    }

    #[test]
    fn trinomial_examples() {
        assert!(trinom(1, 0, 1).is_one());
        assert!(trinom(1, 1, 1).is_zero());
        assert_eq!(trinom(2, 1, 1), p(&[1, 1]));
    }

    #[test]
    fn symmetry_pascal_nonneg() {
        for n in 0..=30i64 {
            for k in 0..=n {
                let b = qbin(n, k, 1);
                assert_eq!(b, qbin(n, n - k, 1));
                assert!(b.first_negative().is_none());
                if n >= 1 {
                    let r1 = qbin(n - 1, k - 1, 1).as_ref() + &qbin(n - 1, k, 1).shift(k);
                    let r2 = qbin(n - 1, k, 1).as_ref() + &qbin(n - 1, k - 1, 1).shift(n - k);
                    assert_eq!(*b, r1);
                    assert_eq!(*b, r2);
                }
            }
        }
    }

    #[test]
    fn pochhammer_examples() {
        assert!(poch_finite(&PochSpec::finite(vec![Monomial::new(5, 3)], 1, 0)).unwrap().is_one());
        let s = PochSpec::finite(vec![Monomial::new(-1, 2)], 2, 1);
        assert_eq!(poch_finite(&s).unwrap(), p(&[1, 0, 1]));
        let s = PochSpec::finite(vec![Monomial::new(-1, -1)], 2, 2);
        assert_eq!(poch_finite(&s).unwrap(), QLaurent::from_int_coeffs(-1, &[1, 2, 1]));
    }

    #[test]
    fn negative_length() {
        // (-q^2; q^2)_{-1} = 1/(1 + 1)
        let s = PochSpec::finite(vec![Monomial::new(-1, 2)], 2, -1);
        let half = BigRational::new(1.into(), 2.into());
        assert_eq!(poch_finite(&s).unwrap(), QLaurent::constant(&half));
        // (q; q)_{-1} = 1/(1 - 1) has no inverse
        let s = PochSpec::finite(vec![Monomial::q(1)], 1, -1);
        assert!(poch_finite(&s).is_err());
    }

    #[test]
    fn infinite_products() {
        let euler = poch_infinite(&PochSpec::infinite(vec![Monomial::q(1)], 1), 5).unwrap();
        assert_eq!(euler, QSeries::from_int_coeffs(&[1, -1, -1, 0, 0, 1], 5));
        let zero = poch_infinite(&PochSpec::infinite(vec![Monomial::new(0, 0)], 1), 5).unwrap();
        assert_eq!(zero, QSeries::one(5));
        let bad = PochSpec::infinite(vec![Monomial::new(2, 0)], 0);
        assert!(matches!(poch_infinite(&bad, 5), Err(QError::DivergentSpec(_))));
        let neg = PochSpec::infinite(vec![Monomial::q(-1)], 2);
        assert_eq!(poch_infinite(&neg, 5), Err(QError::NotAPowerSeries { exponent: -1 }));
    }

    #[test]
    fn euler_pentagonal() {
        let t = 80;
        let euler = poch_infinite(&PochSpec::infinite(vec![Monomial::q(1)], 1), t).unwrap();
        let mut expect = vec![0i64; t + 1];
        for k in -10i64..=10 {
            let e = k * (3 * k - 1) / 2;
            if (0..=t as i64).contains(&e) {
                expect[e as usize] += if k % 2 == 0 { 1 } else { -1 };
            }
        }
        assert_eq!(euler, QSeries::from_int_coeffs(&expect, t));
        assert_eq!(inv_q_poch(None, t), euler.inverse_unit().unwrap());
    }

    #[test]
    fn inverse_finite_q_poch() {
        let t = 30;
        for n in 0..8 {
            let direct = poch_finite(&PochSpec::finite(vec![Monomial::q(1)], 1, n as i64))
                .unwrap()
                .to_series(t)
                .unwrap();
            assert_eq!(inv_q_poch(Some(n), t), direct.inverse_unit().unwrap());
        }
    }

    #[test]
    fn binomial_theorem_examples() {
        assert!(qbinom_theorem_rhs(0, Monomial::q(1)).is_one());
        assert_eq!(qbinom_theorem_rhs(1, Monomial::q(1)), p(&[1, 1]));
        assert_eq!(qbinom_theorem_rhs(2, Monomial::q(2)), p(&[1, 0, 1, 1, 0, 1]));
    }

    #[test]
    fn finite_binomial_theorem() {
        for l in 0..=20i64 {
            for s in 0..=3 {
                for sign in [1, -1] {
                    let z = Monomial::new(sign, s);
                    let mut lhs = QLaurent::zero();
                    for n in 0..=l {
                        let zn = QLaurent::int_monomial(sign.pow(n as u32), s * n + n * (n - 1) / 2);
                        lhs = lhs + &zn * qbin(l, n, 1).as_ref();
                    }
                    assert_eq!(lhs, qbinom_theorem_rhs(l, z), "L={l} z={z}");
                }
            }
        }
    }

    #[test]
    fn stabilization() {
        let t = 25usize;
        for m in 0..6usize {
            // [L+m, m] -> 1/(q)_m up to q^L
            let l = t as i64;
            let b = qbin(l + m as i64, m as i64, 1).to_series(t).unwrap();
            assert_eq!(b, inv_q_poch(Some(m), t));
        }
        for (m, n) in [(0usize, 1usize), (2, 3), (4, 1)] {
            let l = (t + m + n) as i64;
            let tri = trinom(l, m as i64, n as i64).to_series(t).unwrap();
            assert_eq!(tri, &inv_q_poch(Some(m), t) * &inv_q_poch(Some(n), t));
        }
        let b = qbin(2 * t as i64, t as i64, 1).to_series(t).unwrap();
        assert_eq!(b, inv_q_poch(None, t));
    }

    proptest! {
        #[test]
        fn concurrent_reads_agree(n in 0i64..40, k in 0i64..40) {
            let a = qbin(n, k, 1);
            let b = std::thread::spawn(move || qbin(n, k, 1)).join().unwrap();
            prop_assert_eq!(a, b);
        }
    }
}
