//! The admissible `G` domain, the instance families known to be nonnegative,
//! and the coefficient check itself.

use std::fmt;
use std::str::FromStr;

use num_rational::{BigRational, Rational64};
use serde::Serialize;

use crate::error::{QError, Result};
use crate::gsum::{alt_sum, g_eval, AltSumSpec, BinomFactor, GParams, Linear};
use crate::qpoly::QLaurent;
use crate::record::FamilyParams;

/// Where a cell comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Source {
    /// the open domain itself
    Conjecture,
    /// `G(L, L+v-i, 2-i/v, i/v, v)` from the Foda-Quano sums
    Fq,
    /// even-modulus cells from the `T11` family
    T11,
    /// half-integer cells from the `N17` family
    N17,
    /// repeated `W` steps on the odd-kernel sum
    OddIter,
    /// repeated `W` steps on `T11`
    T11Iter,
    /// repeated `W` steps on `N17`
    N17Iter,
    /// `sum (-1)^j q^{v(2v+1)j^2+vj} [2L+1, L-2vj]`
    OddRaw,
    /// `sum (-1)^j q^{v(1+10v)j^2+5vj} [2L, L-1-4vj]`
    OddW,
}

impl Source {
    pub const ALL: [Source; 9] = [
        Source::Conjecture,
        Source::Fq,
        Source::T11,
        Source::N17,
        Source::OddIter,
        Source::T11Iter,
        Source::N17Iter,
        Source::OddRaw,
        Source::OddW,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Source::Conjecture => "conjecture",
            Source::Fq => "fq",
            Source::T11 => "t11",
            Source::N17 => "n17",
            Source::OddIter => "odd-iter",
            Source::T11Iter => "t11-iter",
            Source::N17Iter => "n17-iter",
            Source::OddRaw => "odd-raw",
            Source::OddW => "odd-w",
        }
    }

    /// Parameter names, in order.
    pub fn params(self) -> &'static [&'static str] {
        match self {
            Source::Conjecture => &["K", "N", "M", "alphaK", "betaK"],
            Source::Fq => &["v", "i", "L"],
            Source::T11 | Source::N17 => &["v", "delta", "L"],
            Source::OddIter => &["v", "n", "L"],
            Source::T11Iter | Source::N17Iter => &["v", "n", "delta", "L"],
            Source::OddRaw | Source::OddW => &["v", "L"],
        }
    }
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Source {
    type Err = QError;
    fn from_str(s: &str) -> Result<Self> {
        Source::ALL.into_iter().find(|t| t.tag() == s).ok_or_else(|| QError::InvalidTag(s.to_string()))
    }
}

/// Position of a cell relative to the domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Membership {
    Inside,
    /// `K = 2` cell meeting one of the inequalities with equality
    Boundary,
    Outside,
}

/// Membership with the scaled integers: `a = alpha K`, `b = beta K`.
///
/// `K <= a + b <= 2K^2 - K` and `b - K^2 <= K(N - M) <= K^2 - a`, all strict at `K = 2`.
pub fn membership(p: &GParams) -> Membership {
    let (k, a, b) = (p.k, p.alpha_k, p.beta_k);
    if k <= 0 || p.n < 0 || p.m < 0 || a < 0 || b < 0 {
        return Membership::Outside;
    }
    if a + b < k || a + b > 2 * k * k - k {
        return Membership::Outside;
    }
    let kd = k * (p.n - p.m);
    let (lo, hi) = (b - k * k, k * k - a);
    if kd < lo || kd > hi {
        return Membership::Outside;
    }
    // at K = 2 both inequalities are strict
    if k == 2 && (a + b == k || a + b == 2 * k * k - k || kd == lo || kd == hi) {
        return Membership::Boundary;
    }
    Membership::Inside
}

/// Inclusive bounds of a scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ScanBounds {
    pub k: (i64, i64),
    pub n: (i64, i64),
    pub m: (i64, i64),
}

impl ScanBounds {
    pub fn up_to(kmax: i64, nmax: i64, mmax: i64) -> Self {
        ScanBounds { k: (1, kmax), n: (0, nmax), m: (0, mmax) }
    }
}

/// Cells in scan order `(K, N, M, alphaK, betaK)`, each with its membership.
/// Only `Inside` and `Boundary` cells are produced.
fn cells(b: ScanBounds) -> impl Iterator<Item = (GParams, Membership)> {
    let (k0, k1) = (b.k.0.max(1), b.k.1);
    (k0..=k1).flat_map(move |k| {
        (b.n.0.max(0)..=b.n.1).flat_map(move |n| {
            (b.m.0.max(0)..=b.m.1).flat_map(move |m| {
                let kd = k * (n - m);
                let a_max = (k * k - kd).min(2 * k * k - k);
                (0..=a_max).flat_map(move |a| {
                    let b_max = (k * k + kd).min(2 * k * k - k - a);
                    let b_min = (k - a).max(0);
                    (b_min..=b_max).filter_map(move |bk| {
                        let p = GParams::new(n, m, a, bk, k);
                        match membership(&p) {
                            Membership::Outside => None,
                            s => Some((p, s)),
                        }
                    })
                })
            })
        })
    })
}

/// Every admissible cell in scan order.
pub fn enumerate_domain(kmax: i64, nmax: i64, mmax: i64) -> impl Iterator<Item = GParams> {
    enumerate_bounds(ScanBounds::up_to(kmax, nmax, mmax))
}

pub fn enumerate_bounds(b: ScanBounds) -> impl Iterator<Item = GParams> {
    cells(b).filter(|(_, s)| *s == Membership::Inside).map(|(p, _)| p)
}

/// `K = 2` cells excluded only by strictness.
pub fn boundary_cells(b: ScanBounds) -> impl Iterator<Item = GParams> {
    cells(b).filter(|(_, s)| *s == Membership::Boundary).map(|(p, _)| p)
}

/// Outcome of a coefficient check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    NonNegative,
    Negative { exponent: i64, value: BigRational },
}

pub fn check_nonneg(p: &QLaurent) -> Verdict {
    match p.first_negative() {
        None => Verdict::NonNegative,
        Some((exponent, value)) => Verdict::Negative { exponent, value },
    }
}

/// One generated instance: the `G` cell, plus the printed sum when the source
/// states one directly.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub source: Source,
    pub params: FamilyParams,
    pub cell: Option<GParams>,
    pub raw: Option<AltSumSpec>,
}

impl Instance {
    /// Polynomial to check. When both forms exist they must agree.
    pub fn eval(&self) -> Result<QLaurent> {
        let g = self.cell.as_ref().map(g_eval).transpose()?;
        let r = self.raw.as_ref().map(alt_sum).transpose()?;
        match (g, r) {
            (Some(g), Some(r)) if g != r => Err(QError::InvalidParams(format!(
                "{} {}: cell and printed sum differ",
                self.source, self.params
            ))),
            (Some(g), _) => Ok(g),
            (None, Some(r)) => Ok(r),
            (None, None) => Ok(QLaurent::zero()),
        }
    }
}

fn r(n: i64, d: i64) -> Rational64 {
    Rational64::new(n, d)
}

/// `(2^n - 2^{-n}) / 3`.
fn third(n: i64) -> Rational64 {
    (r(1 << n, 1) - r(1, 1 << n)) / 3
}

fn get(p: &FamilyParams, name: &str) -> Result<i64> {
    p.get(name).ok_or_else(|| QError::InvalidParams(format!("missing parameter {name}")))
}

fn need(ok: bool, what: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(QError::InvalidParams(what.to_string()))
    }
}

/// The instance a source prescribes at the given parameters.
pub fn instance(source: Source, p: &FamilyParams) -> Result<Instance> {
    let mut inst = Instance { source, params: p.clone(), cell: None, raw: None };
    match source {
        Source::Conjecture => {
            let g = GParams::new(get(p, "N")?, get(p, "M")?, get(p, "alphaK")?, get(p, "betaK")?, get(p, "K")?);
            need(membership(&g) == Membership::Inside, "cell outside the admissible domain")?;
            inst.cell = Some(g);
        }
        Source::Fq => {
            let (v, i, l) = (get(p, "v")?, get(p, "i")?, get(p, "L")?);
            need(v >= 2 && (1..=v).contains(&i) && l >= 0, "need v >= 2, 1 <= i <= v, L >= 0")?;
            inst.cell = Some(GParams::from_rational(l, l + v - i, r(2, 1) - r(i, v), r(i, v), v)?);
        }
        Source::T11 | Source::N17 => {
            let (v, d, l) = (get(p, "v")?, get(p, "delta")?, get(p, "L")?);
            need(v >= 2 && (0..v).contains(&d) && l >= d, "need v >= 2, 0 <= delta < v, L >= delta")?;
            let (a, b) = if source == Source::T11 {
                let f = r(1, 1) + r(1, 2 * v);
                (f * (v + d), f * (v - d))
            } else {
                (r(2 * (v + d) + 1, 2), r(2 * (v - d) + 1, 2))
            };
            inst.cell = Some(GParams::from_rational(l - d, l + d, a, b, 2 * v)?);
        }
        Source::OddIter => {
            let (v, n, l) = (get(p, "v")?, get(p, "n")?, get(p, "L")?);
            need(v >= 2 && (2..=20).contains(&n), "need v >= 2, 2 <= n <= 20")?;
            let s = 1 << (n - 2);
            need(l >= s, "need L >= 2^(n-2)")?;
            let a = third(n) * (2 * v) + (r(1 << n, 1) + r(2, 1 << n)) / 3;
            let b = third(n) * (2 * v) + (r(4, 1 << n) - r(1 << n, 1)) / 3;
            inst.cell = Some(GParams::from_rational(l - s, l + s, a, b, (1 << n) * v)?);
        }
        Source::T11Iter | Source::N17Iter => {
            let (v, n, d, l) = (get(p, "v")?, get(p, "n")?, get(p, "delta")?, get(p, "L")?);
            need(v >= 2 && (1..=20).contains(&n) && (0..v).contains(&d), "need v >= 2, 1 <= n <= 20, 0 <= delta < v")?;
            let s = d << (n - 1);
            need(l >= s, "need L >= delta 2^(n-1)")?;
            let (a, b) = if source == Source::T11Iter {
                let f = third(n) * 2 + r(1, (1 << n) * v);
                (f * (v + d), f * (v - d))
            } else {
                (third(n) * 2 * (v + d) + r(1, 1 << n), third(n) * 2 * (v - d) + r(1, 1 << n))
            };
            inst.cell = Some(GParams::from_rational(l - s, l + s, a, b, (1 << n) * v)?);
        }
        Source::OddRaw => {
            let (v, l) = (get(p, "v")?, get(p, "L")?);
            need(v >= 2 && l >= 0, "need v >= 2, L >= 0")?;
            inst.raw = Some(AltSumSpec::int(
                v * (2 * v + 1),
                v,
                0,
                vec![BinomFactor::new(Linear::new(2 * l + 1, 0), Linear::new(l, -2 * v))],
            ));
            inst.cell = Some(GParams::new(l, l + 1, 2 * v * (v + 1), 2 * v * v, 2 * v));
        }
        Source::OddW => {
            let (v, l) = (get(p, "v")?, get(p, "L")?);
            need(v >= 2 && l >= 0, "need v >= 2, L >= 0")?;
            inst.raw = Some(AltSumSpec::int(
                v * (1 + 10 * v),
                5 * v,
                0,
                vec![BinomFactor::new(Linear::new(2 * l, 0), Linear::new(l - 1, -4 * v))],
            ));
            if l >= 1 {
                inst.cell = Some(GParams::from_rational(l - 1, l + 1, r(5 * v + 3, 2), r(5 * v - 2, 2), 4 * v)?);
            }
        }
    }
    Ok(inst)
}

/// Ranges for instance generation, all inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InstanceBounds {
    pub v: (i64, i64),
    pub n: (i64, i64),
    pub l: (i64, i64),
}

/// Every instance of a source within the bounds, in parameter order. `i` and
/// `delta` always run over their full ranges `1..=v` and `0..v`. Parameter
/// tuples where the source is undefined (e.g. `L < delta`) are skipped.
pub fn instance_generators(tag: &str, b: InstanceBounds) -> Result<Vec<Instance>> {
    let source: Source = tag.parse()?;
    if source == Source::Conjecture {
        return Err(QError::InvalidTag(format!("{tag} is a domain, use enumerate_domain")));
    }
    let mut out = Vec::new();
    for v in b.v.0..=b.v.1 {
        let n_range: Vec<i64> = match source {
            Source::OddIter => (b.n.0.max(2)..=b.n.1).collect(),
            Source::T11Iter | Source::N17Iter => (b.n.0.max(1)..=b.n.1).collect(),
            _ => vec![0],
        };
        let mid: Vec<(&str, i64)> = match source {
            Source::Fq => (1..=v).map(|i| ("i", i)).collect(),
            Source::T11 | Source::N17 | Source::T11Iter | Source::N17Iter => (0..v).map(|d| ("delta", d)).collect(),
            _ => vec![("", 0)],
        };
        for &n in &n_range {
            for &(name, x) in &mid {
                for l in b.l.0..=b.l.1 {
                    let mut p = FamilyParams::new().with("v", v);
                    if matches!(source, Source::OddIter | Source::T11Iter | Source::N17Iter) {
                        p.set("n", n);
                    }
                    if !name.is_empty() {
                        p.set(name, x);
                    }
                    p.set("L", l);
                    match instance(source, &p) {
                        Ok(i) => out.push(i),
                        Err(QError::InvalidParams(_)) => {}
                        Err(e) => return Err(e),
                    }
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Direct reading of the inequalities in rationals over a wide box.
    fn oracle_count(kmax: i64, nmax: i64, mmax: i64) -> (usize, usize) {
        let (mut inside, mut boundary) = (0, 0);
        for k in 1..=kmax {
            for n in 0..=nmax {
                for m in 0..=mmax {
                    for a in 0..=4 * k * k {
                        for b in 0..=4 * k * k {
                            let al = r(a, k);
                            let be = r(b, k);
                            let s = al + be;
                            if s < r(1, 1) || s > r(2 * k - 1, 1) {
                                continue;
                            }
                            let d = r(n - m, 1);
                            let lo = be - k;
                            let hi = r(k, 1) - al;
                            if d < lo || d > hi {
                                continue;
                            }
                            if k == 2 && (s == r(1, 1) || s == r(3, 1) || d == lo || d == hi) {
                                boundary += 1;
                            } else {
                                inside += 1;
                            }
                        }
                    }
                }
            }
        }
        (inside, boundary)
    }

    #[test]
    fn counts_match_oracle() {
        for (k, n, m) in [(1, 0, 0), (2, 3, 2), (3, 4, 4), (4, 3, 5)] {
            let b = ScanBounds::up_to(k, n, m);
            let got = (enumerate_bounds(b).count(), boundary_cells(b).count());
            assert_eq!(got, oracle_count(k, n, m), "K<={k} N<={n} M<={m}");
        }
    }

    #[test]
    fn known_domain_sizes() {
        assert_eq!(enumerate_domain(1, 12, 12).count(), 50);
        assert_eq!(enumerate_domain(2, 12, 12).count(), 311);
        assert_eq!(enumerate_domain(1, 0, 0).count(), 2);
        let b = ScanBounds::up_to(3, 4, 4);
        assert_eq!((enumerate_bounds(b).count(), boundary_cells(b).count()), (1547, 152));
    }

    #[test]
    fn scan_order() {
        let v: Vec<GParams> = enumerate_domain(3, 2, 2).collect();
        let mut sorted = v.clone();
        sorted.sort_by_key(|p| (p.k, p.n, p.m, p.alpha_k, p.beta_k));
        assert_eq!(v, sorted);
    }

    #[test]
    fn k2_strictness() {
        // alpha = beta = 1/2 meets 1 <= alpha + beta with equality, and G(2,2,1/2,1/2,2) = 1 - q + ...
        let p = GParams::new(2, 2, 1, 1, 2);
        assert_eq!(membership(&p), Membership::Boundary);
        assert!(matches!(check_nonneg(&g_eval(&p).unwrap()), Verdict::Negative { exponent: 1, .. }));
        for p in boundary_cells(ScanBounds::up_to(2, 4, 4)) {
            assert_eq!(p.k, 2);
            let kd = 2 * (p.n - p.m);
            let ab = p.alpha_k + p.beta_k;
            assert!(kd == p.beta_k - 4 || kd == 4 - p.alpha_k || ab == 2 || ab == 6);
        }
    }

    #[test]
    fn verdicts() {
        assert_eq!(check_nonneg(&QLaurent::from_int_coeffs(0, &[1, 1])), Verdict::NonNegative);
        assert_eq!(
            check_nonneg(&QLaurent::from_int_coeffs(0, &[1, -1])),
            Verdict::Negative { exponent: 1, value: BigRational::from_integer((-1).into()) }
        );
    }

    #[test]
    fn star_example() {
        let p = FamilyParams::new().with("v", 2).with("i", 2).with("L", 3);
        let inst = instance(Source::Fq, &p).unwrap();
        assert_eq!(inst.cell, Some(GParams::new(3, 3, 2, 2, 2)));
    }

    #[test]
    fn iterated_reduce_at_n1() {
        for v in 2..=4 {
            for d in 0..v {
                for l in d..=d + 3 {
                    let base = FamilyParams::new().with("v", v).with("delta", d).with("L", l);
                    let it = FamilyParams::new().with("v", v).with("n", 1).with("delta", d).with("L", l);
                    assert_eq!(instance(Source::T11, &base).unwrap().cell, instance(Source::T11Iter, &it).unwrap().cell);
                    assert_eq!(instance(Source::N17, &base).unwrap().cell, instance(Source::N17Iter, &it).unwrap().cell);
                }
            }
        }
    }

    #[test]
    fn generated_cells_are_admissible() {
        let b = InstanceBounds { v: (2, 3), n: (1, 3), l: (0, 10) };
        for s in &Source::ALL[1..] {
            let all = instance_generators(s.tag(), b).unwrap();
            assert!(!all.is_empty());
            for i in all.iter().filter_map(|i| i.cell) {
                assert_eq!(membership(&i), Membership::Inside, "{s} {i}");
            }
        }
    }

    #[test]
    fn raw_forms_match_cells() {
        for v in 2..=3 {
            for l in 0..=6 {
                for s in [Source::OddRaw, Source::OddW] {
                    let inst = instance(s, &FamilyParams::new().with("v", v).with("L", l)).unwrap();
                    inst.eval().unwrap();
                }
            }
        }
    }

    #[test]
    fn odd_w_is_first_iterate() {
        for v in 2..=3 {
            for l in 1..=5 {
                let w = instance(Source::OddW, &FamilyParams::new().with("v", v).with("L", l)).unwrap();
                let it = instance(Source::OddIter, &FamilyParams::new().with("v", v).with("n", 2).with("L", l)).unwrap();
                assert_eq!(w.cell, it.cell);
            }
        }
    }

    #[test]
    fn unknown_tag() {
        let b = InstanceBounds { v: (2, 2), n: (1, 1), l: (0, 1) };
        assert!(matches!(instance_generators("nope", b), Err(QError::InvalidTag(_))));
    }
}
