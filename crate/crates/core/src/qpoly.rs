//! Exact Laurent polynomials and truncated power series in the formal variable `q`.
//!
//! Both types store big-integer numerators over one positive common denominator.
//! The pair is kept reduced (the denominator shares no factor with all numerators
//! at once) and zero coefficients are never stored, so equality is structural.
//! Polynomials with integer coefficients, which is almost everything the catalog
//! produces, carry the denominator `1` and never touch rational arithmetic.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{QError, Result};

/// Coefficient field: arbitrary-precision rationals.
pub type Coeff = BigRational;

// ---------------------------------------------------------------------------
// integer kernels
// ---------------------------------------------------------------------------

fn max_bits(xs: &[BigInt]) -> u64 {
    xs.iter().map(|x| x.bits()).max().unwrap_or(0)
}

fn bit_len(n: usize) -> u64 {
    (usize::BITS - n.leading_zeros()) as u64
}

/// Integer convolution of dense coefficient vectors, keeping at most `limit`
/// outputs. Falls back to big integers only when `i128` could overflow.
pub(crate) fn convolve(a: &[BigInt], b: &[BigInt], limit: Option<usize>) -> Vec<BigInt> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let full = a.len() + b.len() - 1;
    let out_len = limit.map_or(full, |l| l.min(full));
    if out_len == 0 {
        return Vec::new();
    }
    let bound = max_bits(a) + max_bits(b) + bit_len(a.len().min(b.len())) + 1;
    if bound < 127 {
        let sa: Vec<i128> = a.iter().map(|x| x.to_i128().unwrap()).collect();
        let sb: Vec<i128> = b.iter().map(|x| x.to_i128().unwrap()).collect();
        let mut out = vec![0i128; out_len];
        for (i, &x) in sa.iter().enumerate() {
            if x == 0 || i >= out_len {
                continue;
            }
            let upto = (out_len - i).min(sb.len());
            for (o, &y) in out[i..i + upto].iter_mut().zip(&sb[..upto]) {
                *o += x * y;
            }
        }
        out.into_iter().map(BigInt::from).collect()
    } else {
        let mut out = vec![BigInt::zero(); out_len];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() || i >= out_len {
                continue;
            }
            let upto = (out_len - i).min(b.len());
            for (o, y) in out[i..i + upto].iter_mut().zip(&b[..upto]) {
                if !y.is_zero() {
                    *o += x * y;
                }
            }
        }
        out
    }
}

/// Divides `den` and every numerator by their common gcd; forces `den > 0`.
fn reduce(den: &mut BigInt, mut nums: Vec<&mut BigInt>) {
    if den.is_negative() {
        *den = -den.clone();
        for n in nums.iter_mut() {
            **n = -(*n).clone();
        }
    }
    if den.is_one() {
        return;
    }
    let mut g = den.clone();
    for n in nums.iter() {
        if g.is_one() {
            return;
        }
        g = g.gcd(n);
    }
    if g.is_one() {
        return;
    }
    *den /= &g;
    for n in nums {
        *n /= &g;
    }
}

fn rational(num: &BigInt, den: &BigInt) -> BigRational {
    BigRational::new(num.clone(), den.clone())
}

// ---------------------------------------------------------------------------
// QLaurent
// ---------------------------------------------------------------------------

/// Exact Laurent polynomial in `q` with rational coefficients.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QLaurent {
    den: BigInt,
    /// Sorted by exponent, numerators nonzero.
    terms: Vec<(i64, BigInt)>,
}

impl Default for QLaurent {
    fn default() -> Self {
        Self::zero()
    }
}

impl QLaurent {
    fn from_parts(mut den: BigInt, mut terms: Vec<(i64, BigInt)>) -> Self {
        terms.retain(|(_, c)| !c.is_zero());
        if terms.is_empty() {
            return Self::zero();
        }
        reduce(&mut den, terms.iter_mut().map(|(_, c)| c).collect());
        QLaurent { den, terms }
    }

    pub fn zero() -> Self {
        QLaurent { den: BigInt::one(), terms: Vec::new() }
    }

    pub fn one() -> Self {
        Self::q_pow(0)
    }

    /// `q^e`.
    pub fn q_pow(e: i64) -> Self {
        QLaurent { den: BigInt::one(), terms: vec![(e, BigInt::one())] }
    }

    pub fn from_integer(c: i64) -> Self {
        Self::int_monomial(c, 0)
    }

    /// `c * q^e` with an integer coefficient.
    pub fn int_monomial(c: i64, e: i64) -> Self {
        Self::from_parts(BigInt::one(), vec![(e, BigInt::from(c))])
    }

    pub fn monomial(c: &BigRational, e: i64) -> Self {
        Self::from_parts(c.denom().clone(), vec![(e, c.numer().clone())])
    }

    pub fn constant(c: &BigRational) -> Self {
        Self::monomial(c, 0)
    }

    /// `(exponent, numerator)` pairs over `den`, exponents strictly increasing.
    pub fn from_numerators(den: BigInt, terms: Vec<(i64, BigInt)>) -> Self {
        debug_assert!(terms.windows(2).all(|w| w[0].0 < w[1].0));
        Self::from_parts(den, terms)
    }

    /// Dense integer coefficients `coeffs[i]` for `q^(offset + i)`.
    pub fn from_int_coeffs(offset: i64, coeffs: &[i64]) -> Self {
        let terms = coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| (offset + i as i64, BigInt::from(c)))
            .collect();
        Self::from_parts(BigInt::one(), terms)
    }

    /// Builds from arbitrary `(exponent, coefficient)` pairs; repeated exponents are summed.
    pub fn from_terms<I: IntoIterator<Item = (i64, BigRational)>>(terms: I) -> Self {
        let mut acc = LaurentSum::new();
        for (e, c) in terms {
            acc.add(&Self::monomial(&c, e));
        }
        acc.finish()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.den.is_one() && self.terms.len() == 1 && self.terms[0].0 == 0 && self.terms[0].1.is_one()
    }

    /// Number of nonzero coefficients.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn denominator(&self) -> &BigInt {
        &self.den
    }

    /// `(exponent, numerator)` pairs over [`Self::denominator`].
    pub fn numerators(&self) -> impl Iterator<Item = (i64, &BigInt)> + '_ {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, BigRational)> + '_ {
        self.terms.iter().map(move |(e, c)| (*e, rational(c, &self.den)))
    }

    pub fn coeff(&self, e: i64) -> BigRational {
        match self.terms.binary_search_by_key(&e, |(x, _)| *x) {
            Ok(i) => rational(&self.terms[i].1, &self.den),
            Err(_) => BigRational::zero(),
        }
    }

    pub fn min_exp(&self) -> Option<i64> {
        self.terms.first().map(|(e, _)| *e)
    }

    pub fn max_exp(&self) -> Option<i64> {
        self.terms.last().map(|(e, _)| *e)
    }

    pub fn is_integral(&self) -> bool {
        self.den.is_one()
    }

    /// Multiplies by `q^e`.
    pub fn shift(&self, e: i64) -> Self {
        QLaurent {
            den: self.den.clone(),
            terms: self.terms.iter().map(|(x, c)| (x + e, c.clone())).collect(),
        }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        let terms = self.terms.iter().map(|(e, x)| (*e, x * c.numer())).collect();
        Self::from_parts(&self.den * c.denom(), terms)
    }

    pub fn scale_int(&self, c: i64) -> Self {
        self.scale(&BigRational::from_integer(BigInt::from(c)))
    }

    /// Substitutes `q -> q^d`.
    pub fn substitute_power(&self, d: u32) -> Self {
        assert!(d >= 1, "substitute_power needs d >= 1");
        QLaurent {
            den: self.den.clone(),
            terms: self.terms.iter().map(|(e, c)| (e * d as i64, c.clone())).collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Accepts the value only if it is a genuine polynomial with integer coefficients.
    pub fn to_polynomial(&self) -> Result<Self> {
        if let Some(e) = self.min_exp().filter(|&e| e < 0) {
            return Err(QError::NotAPolynomial { exponent: e });
        }
        if !self.den.is_one() {
            let (e, c) = self.terms.iter().find(|(_, c)| !c.is_multiple_of(&self.den)).unwrap();
            return Err(QError::NonIntegerCoefficient {
                exponent: *e,
                value: rational(c, &self.den).to_string(),
            });
        }
        Ok(self.clone())
    }

    /// Drops every term above `q^max`.
    pub fn truncated(&self, max: i64) -> Self {
        let terms = self.terms.iter().filter(|(e, _)| *e <= max).cloned().collect();
        Self::from_parts(self.den.clone(), terms)
    }

    /// The power series of this polynomial modulo `q^(trunc+1)`.
    pub fn to_series(&self, trunc: usize) -> Result<QSeries> {
        if let Some(e) = self.min_exp().filter(|&e| e < 0) {
            return Err(QError::NotAPowerSeries { exponent: e });
        }
        let mut coeffs = vec![BigInt::zero(); trunc + 1];
        for (e, c) in &self.terms {
            if let Some(slot) = coeffs.get_mut(*e as usize) {
                *slot = c.clone();
            }
        }
        Ok(QSeries::from_parts(trunc, self.den.clone(), coeffs))
    }

    /// Smallest exponent whose coefficients differ.
    pub fn first_difference(&self, other: &Self) -> Option<i64> {
        let diff = self - other;
        diff.min_exp()
    }

    /// Smallest exponent carrying a negative coefficient.
    pub fn first_negative(&self) -> Option<(i64, BigRational)> {
        self.terms
            .iter()
            .find(|(_, c)| c.is_negative())
            .map(|(e, c)| (*e, rational(c, &self.den)))
    }

    fn combine(&self, other: &Self, negate_other: bool) -> Self {
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return if negate_other { -other } else { other.clone() };
        }
        let (den, fa, fb) = if self.den == other.den {
            (self.den.clone(), None, None)
        } else {
            let l = self.den.lcm(&other.den);
            let fa = &l / &self.den;
            let fb = &l / &other.den;
            (l, Some(fa), Some(fb))
        };
        let scale = |c: &BigInt, f: &Option<BigInt>| match f {
            Some(f) => c * f,
            None => c.clone(),
        };
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.terms, &other.terms);
        while i < a.len() || j < b.len() {
            let take_a = j >= b.len() || (i < a.len() && a[i].0 < b[j].0);
            let take_b = i >= a.len() || (j < b.len() && b[j].0 < a[i].0);
            if take_a {
                out.push((a[i].0, scale(&a[i].1, &fa)));
                i += 1;
            } else if take_b {
                let c = scale(&b[j].1, &fb);
                out.push((b[j].0, if negate_other { -c } else { c }));
                j += 1;
            } else {
                let cb = scale(&b[j].1, &fb);
                let ca = scale(&a[i].1, &fa);
                let c = if negate_other { ca - cb } else { ca + cb };
                out.push((a[i].0, c));
                i += 1;
                j += 1;
            }
        }
        Self::from_parts(den, out)
    }

    fn mul_impl(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        if self.terms.len() == 1 || other.terms.len() == 1 {
            let (mono, poly) = if self.terms.len() == 1 { (self, other) } else { (other, self) };
            let (e, c) = &mono.terms[0];
            let terms = poly.terms.iter().map(|(x, y)| (x + e, y * c)).collect();
            return Self::from_parts(&self.den * &other.den, terms);
        }
        let span = |p: &Self| (p.max_exp().unwrap() - p.min_exp().unwrap()) as usize + 1;
        let (sa, sb) = (span(self), span(other));
        let dense = sa <= 4 * self.terms.len() + 64 && sb <= 4 * other.terms.len() + 64;
        let den = &self.den * &other.den;
        if dense {
            let da = self.to_dense(sa);
            let db = other.to_dense(sb);
            let base = self.min_exp().unwrap() + other.min_exp().unwrap();
            let terms = convolve(&da, &db, None)
                .into_iter()
                .enumerate()
                .map(|(i, c)| (base + i as i64, c))
                .collect();
            Self::from_parts(den, terms)
        } else {
            let mut acc: BTreeMap<i64, BigInt> = BTreeMap::new();
            for (ea, ca) in &self.terms {
                for (eb, cb) in &other.terms {
                    *acc.entry(ea + eb).or_insert_with(BigInt::zero) += ca * cb;
                }
            }
            Self::from_parts(den, acc.into_iter().collect())
        }
    }

    fn to_dense(&self, span: usize) -> Vec<BigInt> {
        let base = self.min_exp().unwrap();
        let mut v = vec![BigInt::zero(); span];
        for (e, c) in &self.terms {
            v[(e - base) as usize] = c.clone();
        }
        v
    }
}

impl fmt::Debug for QLaurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QLaurent({self})")
    }
}

fn write_term(f: &mut fmt::Formatter<'_>, first: bool, e: i64, c: &BigRational) -> fmt::Result {
    let neg = c.is_negative();
    let mag = c.abs();
    if first {
        if neg {
            write!(f, "-")?;
        }
    } else {
        write!(f, " {} ", if neg { '-' } else { '+' })?;
    }
    let unit = mag.is_one();
    if e == 0 || !unit {
        if mag.is_integer() {
            write!(f, "{}", mag.numer())?;
        } else {
            write!(f, "({mag})")?;
        }
    }
    match e {
        0 => Ok(()),
        1 => write!(f, "q"),
        _ => write!(f, "q^{e}"),
    }
}

impl fmt::Display for QLaurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.iter().enumerate() {
            write_term(f, i == 0, e, &c)?;
        }
        Ok(())
    }
}

impl Neg for &QLaurent {
    type Output = QLaurent;
    fn neg(self) -> QLaurent {
        QLaurent {
            den: self.den.clone(),
            terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect(),
        }
    }
}

impl Neg for QLaurent {
    type Output = QLaurent;
    fn neg(self) -> QLaurent {
        -&self
    }
}

macro_rules! laurent_binop {
    ($trait:ident, $method:ident, $body:expr) => {
        impl $trait<&QLaurent> for &QLaurent {
            type Output = QLaurent;
            fn $method(self, rhs: &QLaurent) -> QLaurent {
                let f: fn(&QLaurent, &QLaurent) -> QLaurent = $body;
                f(self, rhs)
            }
        }
        impl $trait<QLaurent> for QLaurent {
            type Output = QLaurent;
            fn $method(self, rhs: QLaurent) -> QLaurent {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&QLaurent> for QLaurent {
            type Output = QLaurent;
            fn $method(self, rhs: &QLaurent) -> QLaurent {
                (&self).$method(rhs)
            }
        }
    };
}

laurent_binop!(Add, add, |a, b| a.combine(b, false));
laurent_binop!(Sub, sub, |a, b| a.combine(b, true));
laurent_binop!(Mul, mul, |a, b| a.mul_impl(b));

impl std::iter::Sum for QLaurent {
    fn sum<I: Iterator<Item = QLaurent>>(iter: I) -> Self {
        let mut acc = LaurentSum::new();
        for p in iter {
            acc.add(&p);
        }
        acc.finish()
    }
}

// ---------------------------------------------------------------------------
// LaurentSum
// ---------------------------------------------------------------------------

enum Cells {
    Small(Vec<i128>),
    Big(Vec<BigInt>),
}

impl Cells {
    fn len(&self) -> usize {
        match self {
            Cells::Small(v) => v.len(),
            Cells::Big(v) => v.len(),
        }
    }

    fn promote(&mut self) {
        if let Cells::Small(v) = self {
            *self = Cells::Big(v.iter().map(|&x| BigInt::from(x)).collect());
        }
    }

    fn grow(&mut self, front: usize, back: usize) {
        match self {
            Cells::Small(v) => {
                let mut n = vec![0i128; front];
                n.append(v);
                n.resize(n.len() + back, 0);
                *v = n;
            }
            Cells::Big(v) => {
                let mut n = vec![BigInt::zero(); front];
                n.append(v);
                n.resize_with(n.len() + back, BigInt::zero);
                *v = n;
            }
        }
    }

    fn scale_all(&mut self, f: &BigInt) {
        if let (Cells::Small(v), Some(s)) = (&mut *self, f.to_i128()) {
            let mut ok = true;
            for x in v.iter() {
                if x.checked_mul(s).is_none() {
                    ok = false;
                    break;
                }
            }
            if ok {
                v.iter_mut().for_each(|x| *x *= s);
                return;
            }
        }
        self.promote();
        if let Cells::Big(v) = self {
            v.iter_mut().for_each(|x| *x *= f);
        }
    }

    fn add_at(&mut self, i: usize, c: &BigInt) {
        if let Cells::Small(v) = self {
            if let Some(s) = c.to_i128() {
                if let Some(r) = v[i].checked_add(s) {
                    v[i] = r;
                    return;
                }
            }
        }
        self.promote();
        if let Cells::Big(v) = self {
            v[i] += c;
        }
    }
}

/// Accumulator for sums of many Laurent polynomials over a dense exponent window.
pub struct LaurentSum {
    den: BigInt,
    base: i64,
    cells: Cells,
}

impl Default for LaurentSum {
    fn default() -> Self {
        Self::new()
    }
}

impl LaurentSum {
    pub fn new() -> Self {
        LaurentSum { den: BigInt::one(), base: 0, cells: Cells::Small(Vec::new()) }
    }

    pub fn add(&mut self, p: &QLaurent) {
        self.add_shifted(p, 0, false);
    }

    pub fn sub(&mut self, p: &QLaurent) {
        self.add_shifted(p, 0, true);
    }

    /// Adds `±q^shift * p`.
    pub fn add_shifted(&mut self, p: &QLaurent, shift: i64, negate: bool) {
        if p.is_zero() {
            return;
        }
        let lo = p.min_exp().unwrap() + shift;
        let hi = p.max_exp().unwrap() + shift;
        self.cover(lo, hi);
        let factor = if p.den == self.den {
            None
        } else {
            let l = self.den.lcm(&p.den);
            if l != self.den {
                let up = &l / &self.den;
                self.cells.scale_all(&up);
                self.den = l;
            }
            let f = &self.den / &p.den;
            if f.is_one() {
                None
            } else {
                Some(f)
            }
        };
        for (e, c) in &p.terms {
            let idx = (e + shift - self.base) as usize;
            let mut v = match &factor {
                Some(f) => c * f,
                None => c.clone(),
            };
            if negate {
                v = -v;
            }
            self.cells.add_at(idx, &v);
        }
    }

    fn cover(&mut self, lo: i64, hi: i64) {
        let len = self.cells.len();
        if len == 0 {
            self.base = lo;
            self.cells.grow(0, (hi - lo + 1) as usize);
            return;
        }
        let top = self.base + len as i64 - 1;
        let front = if lo < self.base { (self.base - lo) as usize } else { 0 };
        let back = if hi > top { (hi - top) as usize } else { 0 };
        if front > 0 || back > 0 {
            self.cells.grow(front, back);
            self.base -= front as i64;
        }
    }

    pub fn finish(self) -> QLaurent {
        let base = self.base;
        let terms = match self.cells {
            Cells::Small(v) => v
                .into_iter()
                .enumerate()
                .filter(|(_, c)| *c != 0)
                .map(|(i, c)| (base + i as i64, BigInt::from(c)))
                .collect(),
            Cells::Big(v) => v
                .into_iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(i, c)| (base + i as i64, c))
                .collect(),
        };
        QLaurent::from_parts(self.den, terms)
    }
}

// ---------------------------------------------------------------------------
// QSeries
// ---------------------------------------------------------------------------

/// Formal power series in `q` known modulo `q^(trunc+1)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QSeries {
    trunc: usize,
    den: BigInt,
    coeffs: Vec<BigInt>,
}

impl QSeries {
    fn from_parts(trunc: usize, mut den: BigInt, mut coeffs: Vec<BigInt>) -> Self {
        coeffs.resize_with(trunc + 1, BigInt::zero);
        if coeffs.iter().all(|c| c.is_zero()) {
            den = BigInt::one();
        } else {
            reduce(&mut den, coeffs.iter_mut().collect());
        }
        QSeries { trunc, den, coeffs }
    }

    pub fn zero(trunc: usize) -> Self {
        Self::from_parts(trunc, BigInt::one(), Vec::new())
    }

    pub fn one(trunc: usize) -> Self {
        Self::from_parts(trunc, BigInt::one(), vec![BigInt::one()])
    }

    pub fn constant(c: &BigRational, trunc: usize) -> Self {
        Self::from_parts(trunc, c.denom().clone(), vec![c.numer().clone()])
    }

    /// `q^e`, which is zero when `e > trunc`.
    pub fn q_pow(e: usize, trunc: usize) -> Self {
        let mut v = vec![BigInt::zero(); trunc + 1];
        if e <= trunc {
            v[e] = BigInt::one();
        }
        Self::from_parts(trunc, BigInt::one(), v)
    }

    /// Dense numerators for `q^0..` over `den`; padded or cut to length `trunc + 1`.
    pub fn from_numerators(trunc: usize, den: BigInt, mut coeffs: Vec<BigInt>) -> Self {
        coeffs.truncate(trunc + 1);
        Self::from_parts(trunc, den, coeffs)
    }

    pub fn from_int_coeffs(coeffs: &[i64], trunc: usize) -> Self {
        let v = coeffs.iter().take(trunc + 1).map(|&c| BigInt::from(c)).collect();
        Self::from_parts(trunc, BigInt::one(), v)
    }

    pub fn trunc(&self) -> usize {
        self.trunc
    }

    pub fn denominator(&self) -> &BigInt {
        &self.den
    }

    pub fn numerators(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, e: usize) -> BigRational {
        match self.coeffs.get(e) {
            Some(c) => rational(c, &self.den),
            None => BigRational::zero(),
        }
    }

    pub fn coeffs(&self) -> Vec<BigRational> {
        self.coeffs.iter().map(|c| rational(c, &self.den)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn is_integral(&self) -> bool {
        self.den.is_one()
    }

    /// Lowest exponent with a nonzero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn first_negative(&self) -> Option<(usize, BigRational)> {
        self.coeffs
            .iter()
            .position(|c| c.is_negative())
            .map(|i| (i, rational(&self.coeffs[i], &self.den)))
    }

    /// Same series known to a lower order.
    pub fn with_trunc(&self, trunc: usize) -> Self {
        assert!(trunc <= self.trunc, "cannot raise truncation from {} to {trunc}", self.trunc);
        Self::from_parts(trunc, self.den.clone(), self.coeffs[..=trunc].to_vec())
    }

    /// Equality; comparing series known to different orders is an error.
    pub fn try_eq(&self, other: &Self) -> Result<bool> {
        Ok(self.first_difference(other)?.is_none())
    }

    pub fn first_difference(&self, other: &Self) -> Result<Option<usize>> {
        if self.trunc != other.trunc {
            return Err(QError::TruncationMismatch(self.trunc, other.trunc));
        }
        if self.den == other.den {
            return Ok(self.coeffs.iter().zip(&other.coeffs).position(|(a, b)| a != b));
        }
        Ok((0..=self.trunc).find(|&i| self.coeff(i) != other.coeff(i)))
    }

    /// Multiplies by `q^e`.
    pub fn shift(&self, e: usize) -> Self {
        let mut v = vec![BigInt::zero(); e.min(self.trunc + 1)];
        v.extend(self.coeffs.iter().take((self.trunc + 1).saturating_sub(e)).cloned());
        Self::from_parts(self.trunc, self.den.clone(), v)
    }

    /// Divides by `q^e`; the dropped low coefficients must vanish and the
    /// result is known to order `trunc - e`.
    pub fn unshift(&self, e: usize) -> Result<Self> {
        if let Some(i) = self.coeffs.iter().take(e).position(|c| !c.is_zero()) {
            return Err(QError::NotAPowerSeries { exponent: i as i64 - e as i64 });
        }
        if e > self.trunc {
            return Err(QError::InvalidParams(format!("shift {e} exceeds truncation {}", self.trunc)));
        }
        Ok(Self::from_parts(self.trunc - e, self.den.clone(), self.coeffs[e..].to_vec()))
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        let v = self.coeffs.iter().map(|x| x * c.numer()).collect();
        Self::from_parts(self.trunc, &self.den * c.denom(), v)
    }

    fn combine(&self, other: &Self, negate: bool) -> Self {
        let trunc = self.trunc.min(other.trunc);
        let l = self.den.lcm(&other.den);
        let fa = &l / &self.den;
        let fb = &l / &other.den;
        let v = (0..=trunc)
            .map(|i| {
                let a = &self.coeffs[i] * &fa;
                let b = &other.coeffs[i] * &fb;
                if negate {
                    a - b
                } else {
                    a + b
                }
            })
            .collect();
        Self::from_parts(trunc, l, v)
    }

    fn mul_impl(&self, other: &Self) -> Self {
        let trunc = self.trunc.min(other.trunc);
        let strip = |s: &Self| {
            let mut v = s.coeffs[..=trunc].to_vec();
            while v.last().is_some_and(|c| c.is_zero()) {
                v.pop();
            }
            v
        };
        let v = convolve(&strip(self), &strip(other), Some(trunc + 1));
        Self::from_parts(trunc, &self.den * &other.den, v)
    }

    /// Multiplicative inverse of a series with nonzero constant term.
    pub fn inverse_unit(&self) -> Result<Self> {
        let s = &self.coeffs;
        let s0 = s[0].clone();
        if s0.is_zero() {
            return Err(QError::ZeroConstantTerm);
        }
        let t = self.trunc;
        // r_n = R_n / s0^(n+1) with R_n = -sum_{k=1..n} s_k s0^(k-1) R_{n-k}
        let mut pows = vec![BigInt::one()];
        for i in 1..=t + 1 {
            let next = &pows[i - 1] * &s0;
            pows.push(next);
        }
        let mut r: Vec<BigInt> = Vec::with_capacity(t + 1);
        r.push(BigInt::one());
        for n in 1..=t {
            let mut acc = BigInt::zero();
            for k in 1..=n {
                if !s[k].is_zero() && !r[n - k].is_zero() {
                    acc += &s[k] * &pows[k - 1] * &r[n - k];
                }
            }
            r.push(-acc);
        }
        // (1/self) = den * sum r_n q^n over common denominator s0^(t+1)
        let v = r
            .into_iter()
            .enumerate()
            .map(|(n, x)| x * &pows[t - n] * &self.den)
            .collect();
        Ok(Self::from_parts(t, pows[t + 1].clone(), v))
    }

    /// Integer power; negative exponents go through [`Self::inverse_unit`].
    pub fn pow(&self, n: i64) -> Result<Self> {
        let base = if n < 0 { self.inverse_unit()? } else { self.clone() };
        let mut acc = Self::one(self.trunc);
        for _ in 0..n.unsigned_abs() {
            acc = &acc * &base;
        }
        Ok(acc)
    }
}

impl fmt::Debug for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QSeries({self})")
    }
}

impl fmt::Display for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (e, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            write_term(f, first, e as i64, &rational(c, &self.den))?;
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(q^{})", self.trunc + 1)
    }
}

impl Neg for &QSeries {
    type Output = QSeries;
    fn neg(self) -> QSeries {
        QSeries {
            trunc: self.trunc,
            den: self.den.clone(),
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

macro_rules! series_binop {
    ($trait:ident, $method:ident, $body:expr) => {
        impl $trait<&QSeries> for &QSeries {
            type Output = QSeries;
            fn $method(self, rhs: &QSeries) -> QSeries {
                let f: fn(&QSeries, &QSeries) -> QSeries = $body;
                f(self, rhs)
            }
        }
        impl $trait<QSeries> for QSeries {
            type Output = QSeries;
            fn $method(self, rhs: QSeries) -> QSeries {
                (&self).$method(&rhs)
            }
        }
    };
}

series_binop!(Add, add, |a, b| a.combine(b, false));
series_binop!(Sub, sub, |a, b| a.combine(b, true));
series_binop!(Mul, mul, |a, b| a.mul_impl(b));
