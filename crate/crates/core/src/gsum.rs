//! Alternating sums over q-binomials: the `G` functional and general
//! `sum_j (-1)^j q^{A j^2 + B j + C} prod [top(j), bottom(j)]` shapes.

use std::fmt;

use num_integer::Integer;
use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::error::{QError, Result};
use crate::qbinom::qbin;
use crate::qpoly::{LaurentSum, QLaurent};

/// Parameters of `G(N, M, alpha, beta, K)`. The scaled values `alpha*K` and
/// `beta*K` are stored so the integrality hypothesis holds by construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GParams {
    pub k: i64,
    pub n: i64,
    pub m: i64,
    pub alpha_k: i64,
    pub beta_k: i64,
}

impl GParams {
    pub fn new(n: i64, m: i64, alpha_k: i64, beta_k: i64, k: i64) -> Self {
        GParams { k, n, m, alpha_k, beta_k }
    }

    /// From rational `alpha`, `beta`; rejects values with `alpha*K` or `beta*K` non-integral.
    pub fn from_rational(n: i64, m: i64, alpha: Rational64, beta: Rational64, k: i64) -> Result<Self> {
        if k <= 0 {
            return Err(QError::InvalidParams(format!("K must be positive, got {k}")));
        }
        let ak = alpha * k;
        let bk = beta * k;
        if !ak.is_integer() || !bk.is_integer() {
            return Err(QError::InvalidParams(format!(
                "alpha*K = {ak} and beta*K = {bk} must be integers"
            )));
        }
        Ok(GParams::new(n, m, ak.to_integer(), bk.to_integer(), k))
    }

    pub fn alpha(&self) -> Rational64 {
        Rational64::new(self.alpha_k, self.k)
    }

    pub fn beta(&self) -> Rational64 {
        Rational64::new(self.beta_k, self.k)
    }

    /// Summation range `ceil(-M/K) ..= floor(N/K)`.
    pub fn j_range(&self) -> (i64, i64) {
        (Integer::div_ceil(&-self.m, &self.k), Integer::div_floor(&self.n, &self.k))
    }

    /// Exponent `K j ((alpha+beta) j + alpha - beta) / 2` as an exact rational.
    pub fn exponent(&self, j: i64) -> Rational64 {
        let (a, b) = (self.alpha_k, self.beta_k);
        Rational64::new((a + b) * j * j + (a - b) * j, 2)
    }
}

impl fmt::Display for GParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "G(N={}, M={}, alpha={}, beta={}, K={})",
            self.n,
            self.m,
            self.alpha(),
            self.beta(),
            self.k
        )
    }
}

fn integral_exponent(j: i64, e: Rational64) -> Result<i64> {
    if e.is_integer() {
        Ok(e.to_integer())
    } else {
        Err(QError::NonIntegerExponent { j, value: e.to_string() })
    }
}

/// `sum_j (-1)^j q^{...} [N+M, N-Kj]`.
pub fn g_eval(p: &GParams) -> Result<QLaurent> {
    if p.k <= 0 {
        return Err(QError::InvalidParams(format!("K must be positive, got {}", p.k)));
    }
    let (lo, hi) = p.j_range();
    let mut acc = LaurentSum::new();
    for j in lo..=hi {
        let e = integral_exponent(j, p.exponent(j))?;
        acc.add_shifted(&qbin(p.n + p.m, p.n - p.k * j, 1), e, j.is_odd());
    }
    Ok(acc.finish())
}

/// Single G term, used to confirm the summation range is tight.
pub fn g_term(p: &GParams, j: i64) -> Result<QLaurent> {
    let e = integral_exponent(j, p.exponent(j))?;
    let b = qbin(p.n + p.m, p.n - p.k * j, 1).shift(e);
    Ok(if j.is_odd() { -b } else { b })
}

/// `c0 + c1 * j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Linear {
    pub c0: i64,
    pub c1: i64,
}

impl Linear {
    pub const fn new(c0: i64, c1: i64) -> Self {
        Linear { c0, c1 }
    }

    pub fn at(&self, j: i64) -> i64 {
        self.c0 + self.c1 * j
    }

    fn scaled(self, s: i64) -> Self {
        Linear::new(self.c0 * s, self.c1 * s)
    }

    fn minus(self, o: Linear) -> Self {
        Linear::new(self.c0 - o.c0, self.c1 - o.c1)
    }
}

/// `[top(j), bottom(j)]_{q^d}`; with `floor_half` the bottom is `floor(bottom(j) / 2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BinomFactor {
    pub top: Linear,
    pub bottom: Linear,
    pub d: u32,
    pub floor_half: bool,
}

impl BinomFactor {
    pub fn new(top: Linear, bottom: Linear) -> Self {
        BinomFactor { top, bottom, d: 1, floor_half: false }
    }

    pub fn floor_half(top: Linear, bottom: Linear) -> Self {
        BinomFactor { top, bottom, d: 1, floor_half: true }
    }

    pub fn bottom_at(&self, j: i64) -> i64 {
        let b = self.bottom.at(j);
        if self.floor_half {
            Integer::div_floor(&b, &2)
        } else {
            b
        }
    }

    pub fn eval(&self, j: i64) -> std::sync::Arc<QLaurent> {
        qbin(self.top.at(j), self.bottom_at(j), self.d)
    }

    /// Linear forms that must be nonnegative for the factor not to vanish.
    fn support(&self) -> [Linear; 2] {
        if self.floor_half {
            // floor(b/2) >= 0  <=>  b >= 0 ;  floor(b/2) <= t  <=>  2t + 1 - b >= 0
            let upper = self.top.scaled(2).minus(self.bottom);
            [self.bottom, Linear::new(upper.c0 + 1, upper.c1)]
        } else {
            [self.bottom, self.top.minus(self.bottom)]
        }
    }
}

/// `sum_j (-1)^j q^{A j^2 + B j + C} prod_f f(j)` with finite support.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AltSumSpec {
    pub a: Rational64,
    pub b: Rational64,
    pub c: Rational64,
    pub factors: Vec<BinomFactor>,
}

impl AltSumSpec {
    pub fn new(a: Rational64, b: Rational64, c: Rational64, factors: Vec<BinomFactor>) -> Self {
        AltSumSpec { a, b, c, factors }
    }

    /// Integer exponent coefficients.
    pub fn int(a: i64, b: i64, c: i64, factors: Vec<BinomFactor>) -> Self {
        Self::new(a.into(), b.into(), c.into(), factors)
    }

    pub fn exponent(&self, j: i64) -> Rational64 {
        self.a * j * j + self.b * j + self.c
    }

    /// Range of `j` outside which some factor vanishes; `None` when empty.
    pub fn j_range(&self) -> Result<Option<(i64, i64)>> {
        let mut lo: Option<i64> = None;
        let mut hi: Option<i64> = None;
        for f in &self.factors {
            for s in f.support() {
                match s.c1.signum() {
                    0 if s.c0 < 0 => return Ok(None),
                    0 => {}
                    1 => {
                        let b = Integer::div_ceil(&-s.c0, &s.c1);
                        lo = Some(lo.map_or(b, |x| x.max(b)));
                    }
                    _ => {
                        let b = Integer::div_floor(&s.c0, &-s.c1);
                        hi = Some(hi.map_or(b, |x| x.min(b)));
                    }
                }
            }
        }
        match (lo, hi) {
            (Some(l), Some(h)) if l <= h => Ok(Some((l, h))),
            (Some(_), Some(_)) => Ok(None),
            _ => Err(QError::UnboundedSum),
        }
    }

    pub fn term(&self, j: i64) -> Result<QLaurent> {
        let mut prod = QLaurent::one();
        for f in &self.factors {
            let b = f.eval(j);
            if b.is_zero() {
                return Ok(QLaurent::zero());
            }
            prod = &prod * b.as_ref();
        }
        let e = integral_exponent(j, self.exponent(j))?;
        let t = prod.shift(e);
        Ok(if j.is_odd() { -t } else { t })
    }
}

pub fn alt_sum(spec: &AltSumSpec) -> Result<QLaurent> {
    let Some((lo, hi)) = spec.j_range()? else {
        return Ok(QLaurent::zero());
    };
    let mut acc = LaurentSum::new();
    for j in lo..=hi {
        let e = integral_exponent(j, spec.exponent(j))?;
        let mut prod: Option<QLaurent> = None;
        let mut zero = false;
        for f in &spec.factors {
            let b = f.eval(j);
            if b.is_zero() {
                zero = true;
                break;
            }
            prod = Some(match prod {
                None => b.as_ref().clone(),
                Some(p) => &p * b.as_ref(),
            });
        }
        if zero {
            continue;
        }
        match prod {
            Some(p) => acc.add_shifted(&p, e, j.is_odd()),
            None => acc.add_shifted(&QLaurent::one(), e, j.is_odd()),
        }
    }
    Ok(acc.finish())
}

/// Spec of `F_b(L, M, v)`:
/// `sum_j (-1)^j q^{v j^2} [L+M-(v-1)j, L-vj] [L+b+M+(v-1)j, L+b+vj]`.
pub fn double_spec(l: i64, m: i64, v: i64, b: i64) -> AltSumSpec {
    AltSumSpec::int(
        v,
        0,
        0,
        vec![
            BinomFactor::new(Linear::new(l + m, -(v - 1)), Linear::new(l, -v)),
            BinomFactor::new(Linear::new(l + b + m, v - 1), Linear::new(l + b, v)),
        ],
    )
}

/// `F_b(L, M, v)`. Negative `L` or `M` are accepted and give whatever the
/// binomial support leaves, usually zero.
pub fn alt_sum_double(l: i64, m: i64, v: i64, b: i64) -> QLaurent {
    assert!(v >= 1, "F_b needs v >= 1");
    alt_sum(&double_spec(l, m, v, b)).expect("integer exponents and bounded support")
}

/// Rational helper used by callers building specs from fractions.
pub fn ratio(n: i64, d: i64) -> Rational64 {
    Rational64::new(n, d)
}

/// True when the exponent quadratic has no fractional part at any integer `j`.
pub fn exponent_always_integral(a: Rational64, b: Rational64, c: Rational64) -> bool {
    // A j^2 + B j + C is integral for all j iff it is at j = 0, 1, -1
    [0i64, 1, -1].iter().all(|&j| (a * j * j + b * j + c).is_integer())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    fn p(c: &[i64]) -> QLaurent {
        QLaurent::from_int_coeffs(0, c)
    }

    /// Sum over a wide fixed window, ignoring the computed range.
    fn wide(spec: &AltSumSpec, w: i64) -> QLaurent {
        (-w..=w).map(|j| spec.term(j).unwrap()).sum()
    }

    #[test]
    fn g_examples() {
        for k in 1..4 {
            assert!(g_eval(&GParams::new(0, 0, 1, 2, k)).unwrap().is_one());
        }
        assert_eq!(g_eval(&GParams::new(1, 1, 2, 2, 2)).unwrap(), p(&[1, 1]));
    }

    #[test]
    fn g_rational_constructor() {
        let g = GParams::from_rational(3, 3, ratio(1, 1), ratio(1, 1), 2).unwrap();
        assert_eq!(g, GParams::new(3, 3, 2, 2, 2));
        assert!(GParams::from_rational(3, 3, ratio(1, 3), ratio(1, 1), 2).is_err());
    }

    #[test]
    fn g_range_is_tight() {
        for k in 1..=4 {
            for n in 0..=6 {
                for m in 0..=6 {
                    for ak in 0..=2 * k {
                        let g = GParams::new(n, m, ak, 2 * k - ak, k);
                        let (lo, hi) = g.j_range();
                        assert!(g_term(&g, lo - 1).unwrap().is_zero());
                        assert!(g_term(&g, hi + 1).unwrap().is_zero());
                        let wide: QLaurent = (-10..=10).map(|j| g_term(&g, j).unwrap()).sum();
                        assert_eq!(wide, g_eval(&g).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn non_integral_exponent_is_an_error() {
        let spec = AltSumSpec::new(
            ratio(1, 2),
            Rational64::zero(),
            Rational64::zero(),
            vec![BinomFactor::new(Linear::new(4, 0), Linear::new(2, -1))],
        );
        assert_eq!(
            alt_sum(&spec),
            Err(QError::NonIntegerExponent { j: -1, value: "1/2".into() })
        );
    }

    #[test]
    fn unbounded_support() {
        let spec = AltSumSpec::int(1, 0, 0, vec![BinomFactor::new(Linear::new(0, 1), Linear::new(0, 0))]);
        assert_eq!(alt_sum(&spec), Err(QError::UnboundedSum));
    }

    #[test]
    fn ftilde_one() {
        // sum (-1)^j q^{2j^2+j} [3, 1-2j]
        let spec = AltSumSpec::int(2, 1, 0, vec![BinomFactor::new(Linear::new(3, 0), Linear::new(1, -2))]);
        assert_eq!(alt_sum(&spec).unwrap(), p(&[1, 0, 1]));
    }

    #[test]
    fn floor_mode_range_matches_wide_window() {
        for l in 0..=12 {
            for v in 1..=3 {
                let spec = AltSumSpec::int(
                    v,
                    0,
                    0,
                    vec![BinomFactor::floor_half(Linear::new(l, 0), Linear::new(l, -2 * v))],
                );
                assert_eq!(alt_sum(&spec).unwrap(), wide(&spec, 20));
            }
        }
    }

    #[test]
    fn double_sum_examples() {
        for v in 1..=4 {
            for b in 0..=3 {
                assert!(alt_sum_double(0, 0, v, b).is_one());
            }
        }
        for l in 0..=6 {
            for m in 0..=6 {
                let expect = qbin(l + m, l, 2);
                assert_eq!(alt_sum_double(l, m, 1, 0), *expect);
                assert_eq!(alt_sum_double(l, m, 1, 1), *expect);
            }
        }
    }

    #[test]
    fn double_sum_range_matches_wide_window() {
        for v in 1..=3 {
            for l in -2..=5 {
                for m in -1..=5 {
                    for b in 0..=3 {
                        let spec = double_spec(l, m, v, b);
                        assert_eq!(alt_sum(&spec).unwrap(), wide(&spec, 12), "{l} {m} {v} {b}");
                    }
                }
            }
        }
    }

    #[test]
    fn sign_cancellation_sum_vanishes() {
        // sum (-1)^j q^{vj^2+vj} [L+M-(v-1)j, L-vj] [L+v-1+M+(v-1)j, L+v+vj] = 0
        for v in 1..=4 {
            for l in 0..=8 {
                for m in 0..=8 {
                    let spec = AltSumSpec::int(
                        v,
                        v,
                        0,
                        vec![
                            BinomFactor::new(Linear::new(l + m, -(v - 1)), Linear::new(l, -v)),
                            BinomFactor::new(Linear::new(l + v - 1 + m, v - 1), Linear::new(l + v, v)),
                        ],
                    );
                    assert!(alt_sum(&spec).unwrap().is_zero());
                }
            }
        }
    }

    #[test]
    fn two_shapes_of_the_same_sum() {
        // sum (-1)^j q^{2j^2+2j} [2L, L-2j-1] = 0 and the 2L / 2L+1 forms agree
        for l in 0..=25 {
            let even = AltSumSpec::int(2, 0, 0, vec![BinomFactor::new(Linear::new(2 * l, 0), Linear::new(l, -2))]);
            let odd = AltSumSpec::int(2, 0, 0, vec![BinomFactor::new(Linear::new(2 * l + 1, 0), Linear::new(l, -2))]);
            assert_eq!(alt_sum(&even).unwrap(), alt_sum(&odd).unwrap());
            let van = AltSumSpec::int(2, 2, 0, vec![BinomFactor::new(Linear::new(2 * l, 0), Linear::new(l - 1, -2))]);
            assert!(alt_sum(&van).unwrap().is_zero());
        }
    }

    #[test]
    fn integrality_predicate() {
        assert!(exponent_always_integral(ratio(1, 2), ratio(1, 2), Rational64::zero()));
        assert!(!exponent_always_integral(ratio(1, 2), Rational64::zero(), Rational64::zero()));
    }
}
