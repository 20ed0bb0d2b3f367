//! Identity families: parameter schemas, both sides of each identity, and a
//! uniform verification entry point.

pub mod b5;
pub mod multisum;
pub mod s3;
pub mod schema;
pub mod series;

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{QError, Result};
use crate::gsum::{alt_sum, alt_sum_double, AltSumSpec, BinomFactor, Linear};
use crate::positivity::{self, Source};
use crate::qbinom::qbin;
use crate::qpoly::{QLaurent, QSeries};
use crate::record::{compare_laurent, compare_series, nonneg_record, timed, FamilyParams, Status, VerificationRecord};
use crate::transforms::{self, KernelKind};

use multisum::Inner;
use s3::S3;
pub use schema::{expand, Bound, ParamRange, ParamSpec};

/// Default truncation for series families.
pub const DEFAULT_TRUNCATION: usize = 100;

/// Seed of the randomized lemma grid.
pub const LEMMA_SEED: u64 = 0x5eed_0051;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyKind {
    Polynomial,
    Series,
    Positivity,
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FamilyKind::Polynomial => "polynomial",
            FamilyKind::Series => "series",
            FamilyKind::Positivity => "positivity",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Which {
    Fq,
    N16,
    T11,
    N17,
    T11Route,
    N17Route,
    S3(S3),
    S3I2,
    Prodinger,
    L51,
    T41,
    T42,
    T43a,
    T43b,
    F47x,
    F48y,
    L41,
    F410,
    T44,
    F414c,
    F421,
    Ser11,
    SerAg,
    Ser15,
    Ser19,
    Ser422,
    Jtp,
    M20(i64),
    Lim15,
    Lim19,
    Lim422,
    Kernel(KernelKind),
    Pos(Source),
}

/// One registry row.
#[derive(Debug, Clone, Serialize)]
pub struct FamilyInfo {
    pub id: String,
    pub kind: FamilyKind,
    pub params: Vec<ParamSpec>,
    /// Short description of the identity.
    pub tag: &'static str,
    /// `(a, r, a-r)` of a fixed product side.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub product: Option<(i64, i64, i64)>,
    #[serde(skip)]
    which: Which,
}

impl FamilyInfo {
    pub fn param_names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.params.iter().map(|p| p.name)
    }

    /// Checks every constraint and returns the parameters in schema order.
    pub fn validate(&self, p: &FamilyParams) -> Result<FamilyParams> {
        if let Some((n, _)) = p.iter().find(|(n, _)| !self.params.iter().any(|s| s.name == *n)) {
            return Err(QError::InvalidParams(format!("{} takes no parameter {n}", self.id)));
        }
        let mut out = FamilyParams::new();
        for s in &self.params {
            let v = p.get(s.name).ok_or_else(|| QError::InvalidParams(format!("{} needs {}", self.id, s.name)))?;
            out.set(s.name, v);
        }
        for s in &self.params {
            s.check(&out)?;
        }
        match self.which {
            Which::Jtp if out.get("sign").unwrap().abs() != 1 => {
                return Err(QError::InvalidParams("sign must be 1 or -1".into()));
            }
            Which::Pos(src) => {
                positivity::instance(src, &out)?;
            }
            _ => {}
        }
        Ok(out)
    }
}

fn p(name: &'static str, lo: i64) -> ParamSpec {
    ParamSpec::at_least(name, Bound::int(lo))
}

fn upto(name: &'static str, lo: i64, hi: &str) -> ParamSpec {
    ParamSpec::between(name, Bound::int(lo), hi.parse().expect("static bound"))
}

fn nat(name: &'static str) -> ParamSpec {
    ParamSpec::nat(name)
}

fn row(id: &str, kind: FamilyKind, params: Vec<ParamSpec>, tag: &'static str, which: Which) -> FamilyInfo {
    FamilyInfo { id: id.to_string(), kind, params, tag, product: None, which }
}

fn build() -> Vec<FamilyInfo> {
    use FamilyKind::{Polynomial as Poly, Positivity as Pos, Series as Ser};
    let vi = || vec![p("v", 2), upto("i", 1, "v"), nat("L")];
    let vd = || vec![p("v", 2), upto("delta", 0, "v-1"), nat("L")];
    let lm = || vec![nat("L"), nat("M")];
    let mut t = vec![
        row("FQ", Poly, vi(), "bounded even-moduli multisum, linear weight from N_i", Which::Fq),
        row("T11", Poly, vd(), "double sum with trinomial and bounded multisum, odd product modulus", Which::T11),
        row("N16", Poly, vi(), "bounded multisum without linear weight", Which::N16),
        row("N17", Poly, vd(), "double sum over the multisum without linear weight", Which::N17),
        row("T11-ROUTE", Poly, vd(), "T11 left side as a W or O transform of FQ", Which::T11Route),
        row("N17-ROUTE", Poly, vd(), "N17 left side as a W or O transform of N16", Which::N17Route),
    ];
    let s3_rows: [(&str, S3, &'static str); 9] = [
        ("S3-Ft", S3::Ft, "sum over [2L+1, L-2j], product (-q^2;q^2)_L"),
        ("S3-27", S3::S27, "sum over [2L+1, L-2j] with j^2 weight shift, q^L (-q;q^2)_L"),
        ("S3-A", S3::A, "A(L) = (1 - q^{2L}) (-q;q^2)_{L-1}"),
        ("S3-B", S3::B, "B(L) = q^L (-1/q;q^2)_L"),
        ("S3-X", S3::X, "X(L) = (1 + q^L) (-q^2;q^2)_{L-1}"),
        ("S3-Y", S3::Y, "Y(L) = (1 - q^L) (-q^2;q^2)_{L-1}"),
        ("S3-Z", S3::Z, "odd-top sum with the halved (-1;q^2)_L product"),
        ("S3-C", S3::C, "C(L) with C(0) = 0"),
        ("S3-I2-odd", S3::I2Odd, "[2L+1, L-2j] form of (-q;q^2)_L"),
    ];
    t.push(row("S3-I2", Poly, vec![nat("L")], "both [2L, .] and [2L+1, .] sums equal (-q;q^2)_L", Which::S3I2));
    for (id, s, tag) in s3_rows {
        if s != S3::I2Odd {
            t.push(row(id, Poly, vec![nat("L")], tag, Which::S3(s)));
        }
    }
    t.push(row("S3-Prodinger", Poly, vec![p("L", 1), upto("k", 0, "L")], "three-term recurrence of [L, k]", Which::Prodinger));
    t.extend([
        row(
            "B5-L51",
            Poly,
            vec![
                ParamSpec::free("alpha"),
                ParamSpec::free("beta"),
                ParamSpec::free("j"),
                nat("m1"),
                nat("m2"),
                nat("M"),
            ],
            "binomial-product summation lemma, full support with q^{-alpha beta}",
            Which::L51,
        ),
        row(
            "B5-T41",
            Poly,
            vec![p("a", 1), nat("b"), ParamSpec::free("j"), nat("L"), nat("M")],
            "summation lemma at alpha = beta = 0 on a shifted pair",
            Which::T41,
        ),
        row("B5-T42", Poly, vec![p("v", 1), nat("L"), nat("M")], "F_v(L,M,v) = F_{v-1}(L,M,v)", Which::T42),
        row(
            "B5-T43a",
            Poly,
            vec![p("v", 1), upto("b", 0, "v-1"), nat("L"), nat("M")],
            "one summation step F_b(.,.,v) -> F_b(L,M,v+1)",
            Which::T43a,
        ),
        row("B5-T43b", Poly, vec![p("v", 1), nat("L"), nat("M")], "summation step at b = v", Which::T43b),
        row("B5-47x", Poly, lm(), "F_0(L,M,1) = [L+M, L]_{q^2}", Which::F47x),
        row("B5-48y", Poly, lm(), "F_1(L,M,1) = [L+M, L]_{q^2}", Which::F48y),
        row("B5-L41", Poly, vec![upto("i", 1, "2"), nat("L"), nat("M")], "doubly bounded multisum at v = 2", Which::L41),
        row("B5-410", Poly, vec![p("v", 2), nat("L"), nat("M")], "doubly bounded multisum at i = 1", Which::F410),
        row(
            "B5-T44",
            Poly,
            vec![p("v", 2), upto("i", 1, "v"), nat("L"), nat("M")],
            "doubly bounded multisum = F_{v-i}(L,M,v)",
            Which::T44,
        ),
        row("B5-414c", Poly, vec![p("v", 2), nat("L")], "multisum with base-q^2 bound floor(L/2)", Which::F414c),
        row("B5-421", Poly, vec![p("v", 2), nat("L")], "C transform of the floor multisum", Which::F421),
        row("SER-11", Ser, vec![p("v", 2), upto("i", 1, "v")], "even moduli sum = (q^{2v},q^i,q^{2v-i};q^{2v})/(q)", Which::Ser11),
        row(
            "SER-AG",
            Ser,
            vec![p("v", 2), upto("i", 1, "v")],
            "odd moduli sum = (q^{2v+1},q^i,q^{2v+1-i};q^{2v+1})/(q)",
            Which::SerAg,
        ),
        row("SER-15", Ser, vec![p("v", 2), upto("delta", 0, "v-1")], "companion with linear weight, modulus 2v(2v+1)", Which::Ser15),
        row("SER-19", Ser, vec![p("v", 2), upto("delta", 0, "v-1")], "companion without linear weight", Which::Ser19),
        row("SER-422", Ser, vec![p("v", 2)], "floor-multisum companion, residues 2v^2 and 2v(v+1)", Which::Ser422),
        row(
            "SER-JTP",
            Ser,
            vec![upto("sign", -1, "1"), ParamSpec::free("e")],
            "triple product at z = sign q^e, both sides times q^h",
            Which::Jtp,
        ),
    ]);
    for r in 1..=10 {
        let mut f = row(&format!("M20-{r}"), Ser, vec![], "mod-20 double sum", Which::M20(r));
        f.product = Some((20, r, 20 - r));
        t.push(f);
    }
    t.extend([
        row("LIM-15", Ser, vec![p("v", 2), upto("delta", 0, "v-1")], "T11 left side at L = T + delta against SER-15", Which::Lim15),
        row("LIM-19", Ser, vec![p("v", 2), upto("delta", 0, "v-1")], "N17 left side at L = T + delta against SER-19", Which::Lim19),
        row("LIM-422", Ser, vec![p("v", 2)], "B5-421 left side at L = T against SER-422", Which::Lim422),
    ]);
    for k in KernelKind::ALL {
        let tag = match k {
            KernelKind::C => "C kernel summed against [L, a]-type input",
            KernelKind::W => "W kernel summed against [2L, L-a]",
            KernelKind::O => "O kernel summed against [2L+1, L-a]",
        };
        t.push(row(
            &format!("TR-{k}"),
            Poly,
            vec![nat("L"), ParamSpec::between("a", Bound::neg_param("L"), Bound::param("L", 0))],
            tag,
            Which::Kernel(k),
        ));
    }
    for s in Source::ALL {
        let params = s
            .params()
            .iter()
            .map(|&n| match n {
                "v" => p("v", 2),
                "i" => upto("i", 1, "v"),
                "delta" => upto("delta", 0, "v-1"),
                "n" => upto("n", if s == Source::OddIter { 2 } else { 1 }, "20"),
                "K" => p("K", 1),
                _ => nat(n),
            })
            .collect();
        let tag = match s {
            Source::Conjecture => "G on the admissible domain",
            Source::Fq => "G(L, L+v-i, 2-i/v, i/v, v)",
            Source::T11 => "G(L-D, L+D, (v+D)(1+1/2v), (v-D)(1+1/2v), 2v)",
            Source::N17 => "G(L-D, L+D, v+D+1/2, v-D+1/2, 2v)",
            Source::OddIter => "iterated odd-kernel cells, K = 2^n v",
            Source::T11Iter => "iterated T11 cells, K = 2^n v",
            Source::N17Iter => "iterated N17 cells, K = 2^n v",
            Source::OddRaw => "sum (-1)^j q^{v(2v+1)j^2+vj} [2L+1, L-2vj]",
            Source::OddW => "sum (-1)^j q^{v(10v+1)j^2+5vj} [2L, L-1-4vj]",
        };
        t.push(row(&format!("POS-{}", s.tag()), Pos, params, tag, Which::Pos(s)));
    }
    t
}

/// The full table, in report order.
pub fn registry() -> &'static [FamilyInfo] {
    static REG: OnceLock<Vec<FamilyInfo>> = OnceLock::new();
    REG.get_or_init(build)
}

pub fn lookup(id: &str) -> Result<&'static FamilyInfo> {
    registry().iter().find(|f| f.id == id).ok_or_else(|| QError::NotFound(id.to_string()))
}

/// All sides of an identity; every entry must agree. Positivity families carry
/// one polynomial.
#[derive(Debug, Clone, PartialEq)]
pub enum Sides {
    Exact(Vec<QLaurent>),
    Series(Vec<QSeries>),
    Single(QLaurent),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Poly(QLaurent),
    Series(QSeries),
}

fn g(p: &FamilyParams, n: &str) -> i64 {
    p.get(n).expect("validated")
}

fn single(a: i64, b: i64, top: i64, bottom: Linear) -> QLaurent {
    alt_sum(&AltSumSpec::int(a, b, 0, vec![BinomFactor::new(Linear::new(top, 0), bottom)])).expect("integer exponents")
}

fn fq_rhs(v: i64, i: i64, l: i64, linear: bool) -> QLaurent {
    let b = if linear { v - i } else { 0 };
    single(v, b, 2 * l + v - i, Linear::new(l, -v))
}

fn t11_rhs(v: i64, d: i64, l: i64, linear: bool) -> QLaurent {
    let b = if linear { (2 * v + 1) * d } else { 2 * v * d };
    single((2 * v + 1) * v, b, 2 * l, Linear::new(l - d, -2 * v))
}

fn floor_rhs(v: i64, l: i64) -> QLaurent {
    alt_sum(&AltSumSpec::int(v, 0, 0, vec![BinomFactor::floor_half(Linear::new(l, 0), Linear::new(l, -2 * v))]))
        .expect("integer exponents")
}

fn c_rhs(v: i64, l: i64) -> QLaurent {
    single(v * (2 * v + 1), v, 2 * l + 1, Linear::new(l, -2 * v))
}

fn series_pair(a: Result<QSeries>, b: Result<QSeries>) -> Result<Sides> {
    Ok(Sides::Series(vec![a?, b?]))
}

fn exact(v: Vec<QLaurent>) -> Result<Sides> {
    Ok(Sides::Exact(v))
}

fn eval_which(w: Which, p: &FamilyParams, trunc: usize) -> Result<Sides> {
    use series::*;
    let l = || g(p, "L");
    let m = || g(p, "M");
    let v = || g(p, "v");
    match w {
        Which::Fq | Which::N16 => {
            let lin = w == Which::Fq;
            let (v, i, l) = (v(), g(p, "i"), l());
            exact(vec![Inner::fq(v, i, l, lin).eval(), fq_rhs(v, i, l, lin)])
        }
        Which::T11 | Which::N17 => {
            let lin = w == Which::T11;
            let (v, d, l) = (v(), g(p, "delta"), l());
            exact(vec![multisum::t11_lhs(v, d, l, lin), t11_rhs(v, d, l, lin)])
        }
        Which::T11Route | Which::N17Route => {
            let lin = w == Which::T11Route;
            let (v, d, l) = (v(), g(p, "delta"), l());
            exact(vec![multisum::t11_route(v, d, l, lin), multisum::t11_lhs(v, d, l, lin).shift(d * d / 2)])
        }
        Which::S3(s) => exact(vec![s.sum(l()), s.closed(l())?]),
        Which::S3I2 => exact(vec![S3::I2.sum(l()), S3::I2Odd.sum(l()), S3::I2.closed(l())?]),
        Which::Prodinger => {
            let k = g(p, "k");
            exact(vec![qbin(l(), k, 1).as_ref().clone(), s3::prodinger_rhs(l(), k)])
        }
        Which::L51 => {
            let t = (g(p, "alpha"), g(p, "beta"), g(p, "j"), g(p, "m1"), g(p, "m2"), m());
            exact(vec![b5::lemma_lhs(t.0, t.1, t.2, t.3, t.4, t.5, false), b5::lemma_rhs(t.0, t.1, t.2, t.3, t.4, t.5, true)])
        }
        Which::T41 => {
            let (a, b, j) = (g(p, "a"), g(p, "b"), g(p, "j"));
            exact(vec![b5::t41_lhs(a, b, j, l(), m()), b5::t41_rhs(a, b, j, l(), m())])
        }
        Which::T42 => exact(vec![alt_sum_double(l(), m(), v(), v()), alt_sum_double(l(), m(), v(), v() - 1)]),
        Which::T43a => {
            let b = g(p, "b");
            exact(vec![b5::step_lhs(b, l(), m(), v()), alt_sum_double(l(), m(), v() + 1, b)])
        }
        Which::T43b => exact(vec![b5::step_lhs(v(), l(), m(), v()), alt_sum_double(l(), m(), v() + 1, v() + 1)]),
        Which::F47x | Which::F48y => {
            let b = if w == Which::F47x { 0 } else { 1 };
            exact(vec![alt_sum_double(l(), m(), 1, b), qbin(l() + m(), l(), 2).as_ref().clone()])
        }
        Which::L41 | Which::F410 | Which::T44 => {
            let (v, i) = match w {
                Which::L41 => (2, g(p, "i")),
                Which::F410 => (v(), 1),
                _ => (v(), g(p, "i")),
            };
            exact(vec![b5::t44_lhs(v, i, l(), m()), alt_sum_double(l(), m(), v, v - i)])
        }
        Which::F414c => exact(vec![Inner::floor(v(), l()).eval(), floor_rhs(v(), l())]),
        Which::F421 => exact(vec![multisum::c_lhs(v(), l()), c_rhs(v(), l())]),
        Which::Ser11 | Which::SerAg => {
            let (v, i) = (v(), g(p, "i"));
            let even = w == Which::Ser11;
            let modulus = if even { 2 * v } else { 2 * v + 1 };
            series_pair(nested_series(v, i, even, trunc), product_side(modulus, i, trunc))
        }
        Which::Ser15 | Which::Ser19 => {
            let (v, d) = (v(), g(p, "delta"));
            let lin = w == Which::Ser15;
            let r = if lin { (2 * v + 1) * (v - d) } else { v * (2 * v + 1 - 2 * d) };
            series_pair(companion_lhs(v, d, lin, trunc), product_side(2 * v * (2 * v + 1), r, trunc))
        }
        Which::Ser422 => {
            let v = v();
            series_pair(floor_companion_lhs(v, trunc), product_side(2 * v * (2 * v + 1), 2 * v * v, trunc))
        }
        Which::Jtp => {
            let (a, b) = jtp_sides(g(p, "sign"), g(p, "e"), trunc)?;
            Ok(Sides::Series(vec![a, b]))
        }
        Which::M20(r) => series_pair(m20_lhs(r, trunc), product_side(20, r, trunc)),
        Which::Lim15 | Which::Lim19 => {
            let (v, d) = (v(), g(p, "delta"));
            let lin = w == Which::Lim15;
            // trinomials match their limit below q^{L - delta + 1}
            let bounded = multisum::t11_lhs(v, d, trunc as i64 + d, lin).truncated(trunc as i64).to_series(trunc);
            series_pair(companion_lhs(v, d, lin, trunc), bounded)
        }
        Which::Lim422 => {
            let v = v();
            let bounded = multisum::c_lhs(v, trunc as i64).truncated(trunc as i64).to_series(trunc);
            series_pair(floor_companion_lhs(v, trunc), bounded)
        }
        Which::Kernel(k) => {
            let (a, b) = transforms::kernel_identity_sides(k, l(), g(p, "a"));
            exact(vec![a, b])
        }
        Which::Pos(s) => Ok(Sides::Single(positivity::instance(s, p)?.eval()?)),
    }
}

/// Evaluates every side. Series families use `trunc`.
pub fn eval_sides(id: &str, p: &FamilyParams, trunc: usize) -> Result<Sides> {
    let f = lookup(id)?;
    let p = f.validate(p)?;
    eval_which(f.which, &p, trunc)
}

fn pick(s: Sides, last: bool) -> Value {
    match s {
        Sides::Exact(mut v) => Value::Poly(if last { v.pop() } else { v.into_iter().next() }.expect("two sides")),
        Sides::Series(mut v) => Value::Series(if last { v.pop() } else { v.into_iter().next() }.expect("two sides")),
        Sides::Single(x) => Value::Poly(x),
    }
}

pub fn eval_lhs(id: &str, p: &FamilyParams, trunc: usize) -> Result<Value> {
    eval_sides(id, p, trunc).map(|s| pick(s, false))
}

pub fn eval_rhs(id: &str, p: &FamilyParams, trunc: usize) -> Result<Value> {
    eval_sides(id, p, trunc).map(|s| pick(s, true))
}

fn judge(f: &FamilyInfo, p: FamilyParams, sides: Sides) -> VerificationRecord {
    let id = f.id.as_str();
    match sides {
        Sides::Exact(v) => {
            for other in &v[1..] {
                let r = compare_laurent(id, p.clone(), &v[0], other);
                if !r.passed() {
                    return r;
                }
            }
            compare_laurent(id, p, &v[0], &v[0])
        }
        Sides::Series(v) => {
            for other in &v[1..] {
                let r = compare_series(id, p.clone(), &v[0], other);
                if !r.passed() {
                    return r;
                }
            }
            let mut r = compare_series(id, p, &v[0], &v[0]);
            if matches!(f.which, Which::M20(_)) {
                // both sides must also be nonnegative integer series
                for s in &v {
                    if !s.is_integral() {
                        return r.with_detail("non-integral coefficient").tap_status(Status::Error);
                    }
                    if let Some((e, c)) = s.first_negative() {
                        r.status = Status::NegativeCoefficient;
                        r.first_mismatch = Some(e as i64);
                        r.lhs_coeff = Some(c.to_string());
                        return r;
                    }
                }
            }
            r
        }
        Sides::Single(x) => nonneg_record(id, p, &x),
    }
}

trait TapStatus {
    fn tap_status(self, s: Status) -> Self;
}

impl TapStatus for VerificationRecord {
    fn tap_status(mut self, s: Status) -> Self {
        self.status = s;
        self
    }
}

/// Verifies one tuple. Every failure, including invalid parameters, becomes a verdict.
pub fn verify_family(f: &FamilyInfo, p: &FamilyParams, trunc: usize) -> VerificationRecord {
    let trunc_field = (f.kind == FamilyKind::Series).then_some(trunc);
    timed(|| match f.validate(p) {
        Err(e) => VerificationRecord::error(&f.id, p.clone(), &e),
        Ok(p) => match eval_which(f.which, &p, trunc) {
            Err(e) => VerificationRecord::error(&f.id, p, &e),
            Ok(s) => judge(f, p, s),
        },
    })
    .with_truncation(trunc_field)
}

pub fn verify(id: &str, p: &FamilyParams, trunc: usize) -> VerificationRecord {
    match lookup(id) {
        Ok(f) => verify_family(f, p, trunc),
        Err(e) => VerificationRecord::error(id, p.clone(), &e),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Smoke,
    Full,
}

impl FromStr for Level {
    type Err = QError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "smoke" => Ok(Level::Smoke),
            "full" => Ok(Level::Full),
            _ => Err(QError::InvalidParams(format!("unknown level {s}"))),
        }
    }
}

/// Parameter tuples of a sweep and the truncation they run at.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub params: Vec<FamilyParams>,
    pub trunc: usize,
}

fn r(name: &str, lo: &str, hi: &str) -> ParamRange {
    ParamRange::new(name, lo.parse().expect("static bound"), hi.parse().expect("static bound"))
}

fn ranges(list: &[(&str, &str, &str)]) -> Vec<FamilyParams> {
    let rs: Vec<ParamRange> = list.iter().map(|(n, a, b)| r(n, a, b)).collect();
    expand(&rs).expect("static ranges")
}

/// Fixed-seed tuples for the summation lemma.
pub fn lemma_tuples(count: usize) -> Vec<FamilyParams> {
    let mut rng = ChaCha8Rng::seed_from_u64(LEMMA_SEED);
    (0..count)
        .map(|_| {
            let mut p = FamilyParams::new();
            for n in ["alpha", "beta", "j"] {
                p.set(n, rng.gen_range(-3..=3));
            }
            for n in ["m1", "m2", "M"] {
                p.set(n, rng.gen_range(0..=6));
            }
            p
        })
        .collect()
}

/// The sweep a family runs under `verify-all`.
pub fn grid(f: &FamilyInfo, level: Level) -> Grid {
    let full = level == Level::Full;
    let pick = |s: &'static str, fl: &'static str| if full { fl } else { s };
    let poly = |params| Grid { params, trunc: 0 };
    let ser = |params, t_smoke, t_full| Grid { params, trunc: if full { t_full } else { t_smoke } };
    match f.which {
        Which::Fq => poly(ranges(&[("v", "2", pick("3", "4")), ("i", "1", "v"), ("L", "0", pick("6", "12"))])),
        Which::N16 => poly(ranges(&[("v", "2", pick("3", "4")), ("i", "1", "v"), ("L", "0", pick("6", "10"))])),
        Which::T11 | Which::N17 | Which::T11Route | Which::N17Route => {
            poly(ranges(&[("v", "2", "3"), ("delta", "0", "v-1"), ("L", "0", pick("5", "8"))]))
        }
        Which::S3(_) | Which::S3I2 => poly(ranges(&[("L", "0", pick("12", "30"))])),
        Which::Prodinger => poly(ranges(&[("L", "1", pick("10", "20")), ("k", "0", "L")])),
        Which::L51 => poly(lemma_tuples(if full { 200 } else { 50 })),
        Which::T41 => poly(ranges(&[
            ("a", "1", pick("2", "3")),
            ("b", "0", pick("2", "3")),
            ("j", pick("-1", "-2"), pick("1", "2")),
            ("L", "0", pick("4", "6")),
            ("M", "0", pick("4", "6")),
        ])),
        Which::T42 | Which::T43b | Which::F410 => {
            let lo = if f.which == Which::F410 { "2" } else { "1" };
            poly(ranges(&[("v", lo, pick("3", "4")), ("L", "0", pick("4", "6")), ("M", "0", pick("4", "6"))]))
        }
        Which::T43a => poly(ranges(&[
            ("v", "1", pick("3", "4")),
            ("b", "0", "v-1"),
            ("L", "0", pick("4", "6")),
            ("M", "0", pick("4", "6")),
        ])),
        Which::F47x | Which::F48y => poly(ranges(&[("L", "0", pick("4", "6")), ("M", "0", pick("4", "6"))])),
        Which::L41 => poly(ranges(&[("i", "1", "2"), ("L", "0", pick("4", "6")), ("M", "0", pick("4", "6"))])),
        Which::T44 => poly(ranges(&[
            ("v", "2", pick("3", "4")),
            ("i", "1", "v"),
            ("L", "0", pick("4", "6")),
            ("M", "0", pick("4", "6")),
        ])),
        Which::F414c => poly(ranges(&[("v", "2", pick("3", "4")), ("L", "0", pick("8", "12"))])),
        Which::F421 => poly(ranges(&[("v", "2", pick("3", "4")), ("L", "0", pick("4", "6"))])),
        Which::Ser11 | Which::SerAg => ser(ranges(&[("v", "2", "3"), ("i", "1", "v")]), 25, 40),
        Which::Ser15 | Which::Ser19 => ser(ranges(&[("v", "2", "3"), ("delta", "0", "v-1")]), 25, 40),
        Which::Ser422 => ser(ranges(&[("v", "2", "3")]), 25, 40),
        Which::Jtp => {
            let params = ranges(&[("sign", "-1", "1"), ("e", "1", "2")]).into_iter().filter(|p| g(p, "sign") != 0).collect();
            ser(params, 25, 40)
        }
        Which::M20(_) => ser(vec![FamilyParams::new()], 40, 60),
        Which::Lim15 | Which::Lim19 => ser(ranges(&[("v", "2", "3"), ("delta", "0", "v-1")]), 20, 30),
        Which::Lim422 => ser(ranges(&[("v", "2", "3")]), 20, 30),
        Which::Kernel(_) => poly(ranges(&[("L", "0", pick("8", "12")), ("a", "-L", "L")])),
        Which::Pos(Source::Conjecture) => {
            let (k, nm) = if full { (6, 12) } else { (3, 6) };
            poly(
                positivity::enumerate_domain(k, nm, nm)
                    .map(|c| {
                        FamilyParams::from_pairs([
                            ("K", c.k),
                            ("N", c.n),
                            ("M", c.m),
                            ("alphaK", c.alpha_k),
                            ("betaK", c.beta_k),
                        ])
                    })
                    .collect(),
            )
        }
        Which::Pos(s) => {
            let b = positivity::InstanceBounds { v: (2, 3), n: (1, 3), l: (0, if full { 10 } else { 6 }) };
            poly(positivity::instance_generators(s.tag(), b).expect("known tag").into_iter().map(|i| i.params).collect())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lookup_examples() {
        let f = lookup("FQ").unwrap();
        assert_eq!(f.kind, FamilyKind::Polynomial);
        let shown: Vec<String> = f.params.iter().map(|s| s.to_string()).collect();
        assert_eq!(shown, ["v>=2", "1<=i<=v", "L>=0"]);
        assert_eq!(lookup("M20-5").unwrap().product, Some((20, 5, 15)));
        assert!(matches!(lookup("unknown"), Err(QError::NotFound(_))));
    }

    #[test]
    fn ids_unique() {
        let mut ids: Vec<&str> = registry().iter().map(|f| f.id.as_str()).collect();
        let n = ids.len();
        ids.sort();
        ids.dedup();
        assert_eq!(ids.len(), n);
    }

    #[test]
    fn validation() {
        let f = lookup("FQ").unwrap();
        let ok = FamilyParams::new().with("L", 1).with("i", 1).with("v", 2);
        assert_eq!(f.validate(&ok).unwrap().to_string(), "v=2 i=1 L=1");
        assert!(f.validate(&FamilyParams::new().with("v", 1).with("i", 1).with("L", 0)).is_err());
        assert!(f.validate(&FamilyParams::new().with("v", 2).with("i", 3).with("L", 0)).is_err());
        assert!(f.validate(&ok.clone().with("x", 1)).is_err());
        let r = verify("FQ", &FamilyParams::new().with("v", 2), 0);
        assert_eq!(r.status, Status::Error);
    }

    #[test]
    fn fq_examples() {
        let p = FamilyParams::new().with("v", 2).with("i", 1).with("L", 1);
        let want = QLaurent::from_int_coeffs(0, &[1, 0, 1]);
        assert_eq!(eval_lhs("FQ", &p, 0).unwrap(), Value::Poly(want.clone()));
        assert_eq!(eval_rhs("FQ", &p, 0).unwrap(), Value::Poly(want));
        let p = FamilyParams::new().with("v", 3).with("i", 2).with("L", 6);
        assert_eq!(verify("FQ", &p, 0).status, Status::Equal);
    }

    #[test]
    fn spot_examples() {
        let e = FamilyParams::new();
        assert_eq!(verify("S3-C", &e.clone().with("L", 0), 0).status, Status::Equal);
        assert_eq!(
            eval_rhs("S3-B", &e.clone().with("L", 2), 0).unwrap(),
            Value::Poly(QLaurent::from_int_coeffs(1, &[1, 2, 1]))
        );
        let jtp = eval_rhs("SER-JTP", &e.clone().with("sign", 1).with("e", 1), 10).unwrap();
        assert_eq!(jtp, Value::Series(QSeries::zero(10)));
        let r = verify("M20-3", &e, 60);
        assert_eq!(r.status, Status::Equal);
        assert_eq!(r.truncation, Some(60));
    }

    #[test]
    fn every_family_smoke_first_tuples() {
        for f in registry() {
            let gr = grid(f, Level::Smoke);
            assert!(!gr.params.is_empty(), "{}", f.id);
            for p in gr.params.iter().take(3) {
                let r = verify_family(f, p, gr.trunc);
                assert!(r.passed(), "{} {} {:?} {:?}", f.id, p, r.status, r.detail);
            }
        }
    }

    #[test]
    fn lemma_tuples_fixed() {
        let a = lemma_tuples(5);
        assert_eq!(a, lemma_tuples(5));
        assert!(a.iter().all(|p| (-3..=3).contains(&g(p, "alpha")) && (0..=6).contains(&g(p, "M"))));
    }
}
