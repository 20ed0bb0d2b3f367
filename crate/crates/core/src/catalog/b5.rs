//! Binomial-product summation identities and the doubly bounded sums built from them.

use crate::gsum::alt_sum_double;
use crate::qbinom::qbin;
use crate::qpoly::{LaurentSum, QLaurent};

use super::multisum::Inner;

/// Summation over `i` in the lemma. The sum runs over every `i <= M` where the
/// binomials are supported, which can start below zero for negative shifts.
pub fn lemma_lhs(alpha: i64, beta: i64, j: i64, m1: i64, m2: i64, m: i64, from_zero: bool) -> QLaurent {
    let lo = if from_zero { 0 } else { (-j - alpha).max(j - beta).min(0) };
    let mut acc = LaurentSum::new();
    for i in lo..=m {
        let b1 = qbin(m1, i + j + alpha, 1);
        let b2 = qbin(m2, i - j + beta, 1);
        let b0 = qbin(m1 + m2 + m - i, m - i, 1);
        if b1.is_zero() || b2.is_zero() || b0.is_zero() {
            continue;
        }
        acc.add_shifted(&(&(b0.as_ref() * b1.as_ref()) * b2.as_ref()), i * i + (alpha + beta) * i, false);
    }
    acc.finish()
}

/// Right side; `corrected` carries the extra `q^{-alpha beta}`.
pub fn lemma_rhs(alpha: i64, beta: i64, j: i64, m1: i64, m2: i64, m: i64, corrected: bool) -> QLaurent {
    let e = j * j + (alpha - beta) * j - if corrected { alpha * beta } else { 0 };
    (qbin(m1 + m - j + beta, m + j + alpha, 1).as_ref() * qbin(m2 + m + j + alpha, m - j + beta, 1).as_ref()).shift(e)
}

pub fn t41_lhs(a: i64, b: i64, j: i64, l: i64, m: i64) -> QLaurent {
    let mut acc = LaurentSum::new();
    for i in 0..=m {
        let p = &(qbin(2 * l + b + m - i, m - i, 1).as_ref() * qbin(l - (a - 1) * j, l - i - a * j, 1).as_ref())
            * qbin(l + b + (a - 1) * j, l + b - i + a * j, 1).as_ref();
        acc.add_shifted(&p, i * i, false);
    }
    acc.finish()
}

pub fn t41_rhs(a: i64, b: i64, j: i64, l: i64, m: i64) -> QLaurent {
    (qbin(l + m - a * j, l - (a + 1) * j, 1).as_ref() * qbin(l + b + m + a * j, l + b + (a + 1) * j, 1).as_ref())
        .shift(j * j)
}

/// `sum_{i<=M} q^{i^2} [2L+b+M-i, M-i] F_b(L-i, i, v)`.
pub fn step_lhs(b: i64, l: i64, m: i64, v: i64) -> QLaurent {
    let mut acc = LaurentSum::new();
    for i in 0..=m {
        let f = alt_sum_double(l - i, i, v, b);
        if !f.is_zero() {
            acc.add_shifted(&(qbin(2 * l + b + m - i, m - i, 1).as_ref() * &f), i * i, false);
        }
    }
    acc.finish()
}

/// Nested sum with the extra `[2L+v-i+M-N_1, M-N_1]` factor.
pub fn t44_lhs(v: i64, i: i64, l: i64, m: i64) -> QLaurent {
    Inner::fq(v, i, l, false).eval_with(|n1| qbin(2 * l + v - i + m - n1, m - n1, 1))
}
