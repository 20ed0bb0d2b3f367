//! Nested sums over `N_1 >= N_2 >= ... >= N_{v-1} >= 0`, with `n_j = N_j - N_{j+1}`.

use crate::qbinom::{qbin, trinom};
use crate::qpoly::{LaurentSum, QLaurent};
use crate::transforms::KernelKind;

/// Shape of one nested sum
/// `sum q^{sum N_t^2 + sum_{t >= i} N_t} [bound - sum_{t<=v-2} N_t, n_{v-1}]_{q^2}
///  prod_{j<=v-2} [n_j + top - 2 sum_{t<=j} N_t + extra(j), n_j]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Inner {
    pub v: i64,
    /// Top of the base-`q^2` factor before partial sums are removed.
    pub bound: i64,
    /// `2L` for the Foda-Quano shape, `L` for the floor shape.
    pub top: i64,
    /// `Some(v - i)` adds `min(v - i, v - 1 - j)` to each top.
    pub min_offset: Option<i64>,
    /// `Some(i)` adds the linear weight `N_i + ... + N_{v-1}`.
    pub linear_from: Option<i64>,
}

impl Inner {
    /// Foda-Quano shape at `L`; `linear` toggles the `N_i + ...` weight.
    pub fn fq(v: i64, i: i64, l: i64, linear: bool) -> Self {
        Inner { v, bound: l, top: 2 * l, min_offset: Some(v - i), linear_from: linear.then_some(i) }
    }

    /// Floor shape `[floor(L/2) - ..., n_{v-1}]_{q^2} prod [n_j + L - 2 sum N, n_j]`.
    pub fn floor(v: i64, l: i64) -> Self {
        Inner { v, bound: l.div_euclid(2), top: l, min_offset: None, linear_from: None }
    }

    fn extra(&self, j: i64) -> i64 {
        self.min_offset.map_or(0, |d| d.min(self.v - 1 - j))
    }

    /// Visits every tuple with a nonzero summand: `(N, weight, binomial product)`.
    /// Since the base-`q^2` factor needs `N_1 + ... + N_{v-1} <= bound`, that
    /// sum bounds the enumeration.
    pub fn for_each(&self, mut visit: impl FnMut(&[i64], i64, &QLaurent)) {
        if self.v < 2 || self.bound < 0 {
            return;
        }
        let mut ns = Vec::with_capacity(self.v as usize - 1);
        self.rec(&mut ns, 0, &QLaurent::one(), &mut visit);
    }

    fn rec(&self, ns: &mut Vec<i64>, sum: i64, prod: &QLaurent, visit: &mut dyn FnMut(&[i64], i64, &QLaurent)) {
        let t = ns.len() as i64 + 1; // index of the next N_t
        let v1 = self.v - 1;
        if t > v1 {
            // base-q^2 factor with n_{v-1} = N_{v-1}
            let last = *ns.last().unwrap();
            let b = qbin(self.bound - (sum - last), last, 2);
            if b.is_zero() {
                return;
            }
            let w: i64 = ns.iter().map(|n| n * n).sum::<i64>()
                + self.linear_from.map_or(0, |i| ns[(i - 1).max(0) as usize..].iter().sum());
            visit(ns, w, &(prod * b.as_ref()));
            return;
        }
        let cap = ns.last().copied().unwrap_or(i64::MAX).min(self.bound - sum);
        for n_t in 0..=cap {
            let next = if t >= 2 {
                // factor j = t - 1 now that n_j = N_j - N_t is known
                let j = t - 1;
                let nj = ns[j as usize - 1] - n_t;
                let b = qbin(nj + self.top - 2 * sum + self.extra(j), nj, 1);
                if b.is_zero() {
                    continue;
                }
                prod * b.as_ref()
            } else {
                prod.clone()
            };
            ns.push(n_t);
            self.rec(ns, sum + n_t, &next, visit);
            ns.pop();
        }
    }

    pub fn eval(&self) -> QLaurent {
        let mut acc = LaurentSum::new();
        self.for_each(|_, w, p| acc.add_shifted(p, w, false));
        acc.finish()
    }

    /// Same sum with each summand also multiplied by `factor(N_1)`.
    pub fn eval_with(&self, factor: impl Fn(i64) -> std::sync::Arc<QLaurent>) -> QLaurent {
        let mut acc = LaurentSum::new();
        self.for_each(|ns, w, p| {
            let f = factor(ns[0]);
            if !f.is_zero() {
                acc.add_shifted(&(p * f.as_ref()), w, false);
            }
        });
        acc.finish()
    }
}

/// `sum_{k,m} q^{(m+k)^2 + k^2 + D(m+2k)} (L; m, 2k+D) inner(k)`.
pub fn t11_lhs(v: i64, delta: i64, l: i64, linear: bool) -> QLaurent {
    let mut acc = LaurentSum::new();
    let mut k = 0;
    while 2 * k + delta <= l {
        let inner = Inner::fq(v, v - delta, k, linear).eval();
        for m in 0..=l - 2 * k - delta {
            let w = (m + k) * (m + k) + k * k + delta * (m + 2 * k);
            acc.add_shifted(&(&trinom(l, m, 2 * k + delta) * &inner), w, false);
        }
        k += 1;
    }
    acc.finish()
}

/// The same left side reached through a kernel: `W` for even `D`, `O` for odd,
/// applied to the Foda-Quano sum at `k - floor(D/2)`. Equals `q^{floor(D^2/2)} t11_lhs`.
pub fn t11_route(v: i64, delta: i64, l: i64, linear: bool) -> QLaurent {
    let s = delta / 2;
    let kind = if delta % 2 == 0 { KernelKind::W } else { KernelKind::O };
    crate::transforms::transform_lhs(kind, l, |k| Inner::fq(v, v - delta, k - s, linear).eval())
}

/// `sum_{m,k} q^{T(m) + T(m+k)} (L; m, k) floor_inner(k)`.
pub fn c_lhs(v: i64, l: i64) -> QLaurent {
    crate::transforms::transform_lhs(KernelKind::C, l, |k| Inner::floor(v, k).eval())
}
