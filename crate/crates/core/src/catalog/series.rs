//! Sum sides and product sides of the `q`-series families, modulo `q^(T+1)`.

use num_rational::BigRational;

use crate::error::{QError, Result};
use crate::qbinom::{inv_q_poch, poch_finite, poch_infinite, Monomial, PochSpec};
use crate::qpoly::{QLaurent, QSeries};
use crate::transforms::tri;

use super::multisum::Inner;

/// `(q^a, q^r, q^{a-r}; q^a)_inf / (q)_inf`.
pub fn product_side(a: i64, r: i64, trunc: usize) -> Result<QSeries> {
    let spec = PochSpec::infinite(vec![Monomial::q(a), Monomial::q(r), Monomial::q(a - r)], a);
    Ok(poch_infinite(&spec, trunc)? * inv_q_poch(None, trunc))
}

/// `q^h (args; q^d)_inf`, where `h` clears the negative exponents of the first
/// few factors. Returns the shifted product and `h`.
pub fn shifted_product(args: &[Monomial], d: i64, trunc: usize) -> Result<(QSeries, usize)> {
    let mut head = QLaurent::one();
    let mut tail = Vec::new();
    let mut h = 0i64;
    for a in args {
        let mut e = a.exp;
        // (1 - c q^e) = q^e (q^{-e} - c) while e < 0
        while e < 0 {
            head = &head * &(QLaurent::q_pow(-e) - QLaurent::from_integer(a.coeff));
            h -= e;
            e += d;
        }
        tail.push(Monomial::new(a.coeff, e));
    }
    let s = poch_infinite(&PochSpec::infinite(tail, d), trunc)?;
    Ok((head.to_series(trunc)? * s, h as usize))
}

/// Sum and product of the triple product at `z = sign q^e`, both multiplied by
/// `q^h` so the sum has no negative powers.
pub fn jtp_sides(sign: i64, e: i64, trunc: usize) -> Result<(QSeries, QSeries)> {
    let (prod, h) = shifted_product(
        &[Monomial::q(2), Monomial::new(sign, 1 - e), Monomial::new(sign, 1 + e)],
        2,
        trunc,
    )?;
    let h = h as i64;
    let mut terms = Vec::new();
    let mut j: i64 = 0;
    // j^2 + e j + h grows on both sides of -e/2
    loop {
        let mut any = false;
        for jj in [j, -j - 1] {
            let w = jj * jj + e * jj + h;
            if w < 0 {
                return Err(QError::NotAPowerSeries { exponent: w });
            }
            if w <= trunc as i64 {
                any = true;
                let c = if jj.rem_euclid(2) == 0 { 1 } else { -1 } * sign.pow(jj.unsigned_abs() as u32 % 2);
                terms.push((w, BigRational::from_integer(c.into())));
            }
        }
        if !any && j > e.abs() {
            break;
        }
        j += 1;
    }
    Ok((QLaurent::from_terms(terms).to_series(trunc)?, prod))
}

/// `1/(q)_n` for `n = 0..=trunc`.
fn inv_table(trunc: usize) -> Vec<QSeries> {
    (0..=trunc).map(|n| inv_q_poch(Some(n), trunc)).collect()
}

/// `1/(q^2; q^2)_n` for `n = 0..=trunc/2`.
fn inv2_table(trunc: usize) -> Result<Vec<QSeries>> {
    (0..=trunc / 2)
        .map(|n| poch_finite(&PochSpec::finite(vec![Monomial::q(2)], 2, n as i64))?.to_series(trunc)?.inverse_unit())
        .collect()
}

/// Multi-sums `sum q^{sum N^2 + sum_{t>=i} N_t} / ((q)_{n_1} ... (q)_{n_{v-2}} D(n_{v-1}))`
/// with `D = (q^2;q^2)` (`even`) or `(q)`.
pub fn nested_series(v: i64, i: i64, even: bool, trunc: usize) -> Result<QSeries> {
    let inv = inv_table(trunc);
    let inv2 = if even { inv2_table(trunc)? } else { Vec::new() };
    let mut acc = QSeries::zero(trunc);
    let mut ns = Vec::new();
    nested_rec(v, i, trunc as i64, &mut ns, 0, &mut |ns, w| {
        let v1 = ns.len();
        let mut t = QSeries::q_pow(w as usize, trunc);
        for j in 0..v1 {
            let nj = (ns[j] - ns.get(j + 1).copied().unwrap_or(0)) as usize;
            t = if j + 1 == v1 && even { t * inv2[nj.min(trunc / 2)].clone() } else { t * inv[nj.min(trunc)].clone() };
        }
        acc = std::mem::replace(&mut acc, QSeries::zero(trunc)) + t;
    });
    Ok(acc)
}

fn nested_rec(v: i64, i: i64, budget: i64, ns: &mut Vec<i64>, w: i64, f: &mut dyn FnMut(&[i64], i64)) {
    if ns.len() as i64 == v - 1 {
        let lin: i64 = ns[(i - 1) as usize..].iter().sum();
        if w + lin <= budget {
            f(ns, w + lin);
        }
        return;
    }
    let cap = ns.last().copied().unwrap_or(i64::MAX);
    let mut n = 0;
    while n <= cap && w + n * n <= budget {
        ns.push(n);
        nested_rec(v, i, budget, ns, w + n * n, f);
        ns.pop();
        n += 1;
    }
}

/// `sum_{k,m} q^{weight(m,k)} numer(k) / ((q)_m (q)_{width(k)} divisor(k))`.
/// `weight` must increase in both arguments.
pub fn double_sum(
    trunc: usize,
    weight: impl Fn(i64, i64) -> i64,
    width: impl Fn(i64) -> i64,
    numer: impl Fn(i64) -> Result<QLaurent>,
    divisor: Option<&dyn Fn(i64) -> QLaurent>,
) -> Result<QSeries> {
    let inv = inv_table(trunc);
    let t = trunc as i64;
    let mut acc = QSeries::zero(trunc);
    let mut k = 0;
    loop {
        let w0 = weight(0, k);
        let num = numer(k)?.shift(w0);
        if num.min_exp().unwrap_or(w0) > t {
            if w0 > t {
                break;
            }
            k += 1;
            continue;
        }
        let mut inner = QSeries::zero(trunc);
        let mut m = 0;
        while weight(m, k) - w0 <= t {
            inner = inner + inv[(m as usize).min(trunc)].shift((weight(m, k) - w0) as usize);
            m += 1;
        }
        let mut term = num.truncated(t).to_series(trunc)? * inner * inv[(width(k) as usize).min(trunc)].clone();
        if let Some(d) = divisor {
            term = term * d(k).to_series(trunc)?.inverse_unit()?;
        }
        acc = acc + term;
        k += 1;
    }
    Ok(acc)
}

/// Companion sums with a bounded nested sum inside: `linear` selects the
/// weight with `sum_{t >= v-D} N_t`.
pub fn companion_lhs(v: i64, delta: i64, linear: bool, trunc: usize) -> Result<QSeries> {
    double_sum(
        trunc,
        |m, k| (m + k) * (m + k) + k * k + delta * (m + 2 * k),
        |k| 2 * k + delta,
        |k| Ok(Inner::fq(v, v - delta, k, linear).eval()),
        None,
    )
}

pub fn floor_companion_lhs(v: i64, trunc: usize) -> Result<QSeries> {
    double_sum(trunc, |m, k| tri(m) + tri(m + k), |k| k, |k| Ok(Inner::floor(v, k).eval()), None)
}

fn poch(c: i64, e: i64, d: i64, n: i64) -> Result<QLaurent> {
    poch_finite(&PochSpec::finite(vec![Monomial::new(c, e)], d, n))
}

fn half() -> BigRational {
    BigRational::new(1.into(), 2.into())
}

/// One double sum of a mod-20 left side.
#[derive(Debug, Clone, Copy)]
pub struct M20Row {
    /// extra weight `a m + b k` on top of `k^2 + (m+k)^2`
    pub am: i64,
    pub ak: i64,
    /// `(q)_{2k + odd}` in the denominator
    pub odd: bool,
    pub numer: fn(i64) -> Result<QLaurent>,
    /// divide by `1 + q^{k+1}`
    pub divide: bool,
}

fn n_mq2(k: i64) -> Result<QLaurent> {
    poch(-1, 2, 2, k)
}
fn n_mq(k: i64) -> Result<QLaurent> {
    poch(-1, 1, 2, k)
}
fn n_m1_half(k: i64) -> Result<QLaurent> {
    Ok(poch(-1, 0, 2, k)?.scale(&half()))
}
fn n_3a(k: i64) -> Result<QLaurent> {
    Ok(&n_m1_half(k)? * &(QLaurent::one() + QLaurent::q_pow(k + 1)))
}
fn n_3b(k: i64) -> Result<QLaurent> {
    Ok(&n_m1_half(k)? * &QLaurent::from_int_coeffs(0, &[1, 0, 1]))
}
fn n_7b(k: i64) -> Result<QLaurent> {
    Ok(&n_m1_half(k)? * &QLaurent::from_int_coeffs(0, &[1, 1]))
}
fn n_8(k: i64) -> Result<QLaurent> {
    poch(-1, -1, 2, k)
}
fn n_9(k: i64) -> Result<QLaurent> {
    Ok(&n_m1_half(k)? * &(QLaurent::one() + QLaurent::q_pow(k)))
}

const fn row(am: i64, ak: i64, odd: bool, numer: fn(i64) -> Result<QLaurent>, divide: bool) -> M20Row {
    M20Row { am, ak, odd, numer, divide }
}

/// Rows of the sum side for residue `r`; the side is their total.
pub fn m20_rows(r: i64) -> Vec<M20Row> {
    match r {
        1 => vec![row(2, 4, true, n_mq2, true)],
        2 => vec![row(2, 4, true, n_mq, false)],
        3 => vec![row(2, 4, true, n_3a, false), row(2, 5, true, n_3b, true)],
        4 => vec![row(1, 3, true, n_mq, false)],
        5 => vec![row(1, 2, true, n_mq2, false)],
        6 => vec![row(1, 2, true, n_mq, false)],
        7 => vec![row(1, 2, false, n_m1_half, false), row(1, 3, true, n_7b, false)],
        8 => vec![row(0, 1, false, n_8, false)],
        9 => vec![row(0, 0, false, n_9, false)],
        10 => vec![row(0, 0, false, n_mq, false)],
        _ => Vec::new(),
    }
}

pub fn m20_lhs(r: i64, trunc: usize) -> Result<QSeries> {
    let rows = m20_rows(r);
    if rows.is_empty() {
        return Err(QError::InvalidParams(format!("no mod-20 identity with residue {r}")));
    }
    let div: &dyn Fn(i64) -> QLaurent = &|k| QLaurent::one() + QLaurent::q_pow(k + 1);
    let mut acc = QSeries::zero(trunc);
    for rw in rows {
        acc = acc
            + double_sum(
                trunc,
                |m, k| k * k + (m + k) * (m + k) + rw.am * m + rw.ak * k,
                |k| 2 * k + rw.odd as i64,
                rw.numer,
                rw.divide.then_some(div),
            )?;
    }
    Ok(acc)
}

/// The product side as an expression in the command-line language.
pub fn m20_expr(r: i64) -> String {
    format!("P(q^20,q^{r},q^{};q^20;inf) / P(q;q;inf)", 20 - r)
}
