//! The positivity-preserving kernels `C`, `W`, `O` and the transform laws they
//! induce on alternating binomial sums, bounded and in the `L -> infinity` limit.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock, RwLock};

use num_integer::Integer;
use serde::Serialize;

use crate::error::{QError, Result};
use crate::qbinom::{inv_q_poch, qbin, trinom};
use crate::qpoly::{LaurentSum, QLaurent, QSeries};
use crate::record::{compare_laurent, FamilyParams, VerificationRecord};

/// Triangular number `j(j+1)/2`.
pub fn tri(j: i64) -> i64 {
    j * (j + 1) / 2
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum KernelKind {
    C,
    W,
    O,
}

impl KernelKind {
    pub const ALL: [KernelKind; 3] = [KernelKind::C, KernelKind::W, KernelKind::O];

    /// Exponent of the `m`-th summand of the kernel at `k`.
    pub fn weight(self, m: i64, k: i64) -> i64 {
        match self {
            KernelKind::C => tri(m) + tri(m + k),
            KernelKind::W => (m + k) * (m + k) + k * k,
            KernelKind::O => 2 * tri(m + k) + 2 * tri(k),
        }
    }

    /// Second trinomial index: `k`, `2k` or `2k+1`.
    pub fn width(self, k: i64) -> i64 {
        match self {
            KernelKind::C => k,
            KernelKind::W => 2 * k,
            KernelKind::O => 2 * k + 1,
        }
    }

    /// Binomial shape of the input sum, `F(L) = sum_j alpha(j) [top, bottom]`.
    pub fn input_binomial(self, l: i64, j: i64) -> Arc<QLaurent> {
        match self {
            KernelKind::C => qbin(l, Integer::div_floor(&(l - j), &2), 1),
            KernelKind::W => qbin(2 * l, l - j, 1),
            KernelKind::O => qbin(2 * l + 1, l - j, 1),
        }
    }

    /// Weight attached to `alpha(j)` on the output side.
    pub fn output_weight(self, j: i64) -> i64 {
        match self {
            KernelKind::C => tri(j),
            KernelKind::W => 2 * j * j,
            KernelKind::O => 2 * j * j + 2 * j,
        }
    }

    pub fn output_binomial(self, l: i64, j: i64) -> Arc<QLaurent> {
        match self {
            KernelKind::C => qbin(2 * l + 1, l - j, 1),
            KernelKind::W => qbin(2 * l, l - 2 * j, 1),
            KernelKind::O => qbin(2 * l, l - 2 * j - 1, 1),
        }
    }
}

impl fmt::Display for KernelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl FromStr for KernelKind {
    type Err = QError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "C" | "c" => Ok(KernelKind::C),
            "W" | "w" => Ok(KernelKind::W),
            "O" | "o" => Ok(KernelKind::O),
            _ => Err(QError::InvalidParams(format!("unknown kernel '{s}'"))),
        }
    }
}

type KernelMap = RwLock<HashMap<(KernelKind, i64, i64), Arc<QLaurent>>>;

fn table() -> &'static KernelMap {
    static T: OnceLock<KernelMap> = OnceLock::new();
    T.get_or_init(|| RwLock::new(HashMap::new()))
}

/// `C_{L,k}`, `W_{L,k}` or `O_{L,k}`; memoized.
pub fn kernel(kind: KernelKind, l: i64, k: i64) -> Arc<QLaurent> {
    if l < 0 || k < 0 || kind.width(k) > l {
        return Arc::new(QLaurent::zero());
    }
    if let Some(v) = table().read().unwrap().get(&(kind, l, k)) {
        return v.clone();
    }
    let mut acc = LaurentSum::new();
    for m in 0..=l - kind.width(k) {
        acc.add_shifted(&trinom(l, m, kind.width(k)), kind.weight(m, k), false);
    }
    let v = Arc::new(acc.finish());
    table().write().unwrap().entry((kind, l, k)).or_insert(v).clone()
}

/// Largest `k` with a nonzero kernel at `L`.
pub fn kernel_k_max(kind: KernelKind, l: i64) -> i64 {
    match kind {
        KernelKind::C => l,
        KernelKind::W => l.div_euclid(2),
        KernelKind::O => (l - 1).div_euclid(2),
    }
}

/// Both sides of the kernel summation formula at `(L, a)`.
pub fn kernel_identity_sides(kind: KernelKind, l: i64, a: i64) -> (QLaurent, QLaurent) {
    let mut lhs = LaurentSum::new();
    for k in 0..=kernel_k_max(kind, l) {
        let b = match kind {
            KernelKind::C => qbin(k, Integer::div_floor(&(k - a), &2), 1),
            KernelKind::W => qbin(2 * k, k - a, 1),
            KernelKind::O => qbin(2 * k + 1, k - a, 1),
        };
        if !b.is_zero() {
            lhs.add(&(kernel(kind, l, k).as_ref() * b.as_ref()));
        }
    }
    let rhs = match kind {
        KernelKind::C => qbin(2 * l + 1, l - a, 1).shift(tri(a)),
        KernelKind::W => qbin(2 * l, l - 2 * a, 1).shift(2 * a * a),
        KernelKind::O => qbin(2 * l, l - 2 * a - 1, 1).shift(4 * tri(a)),
    };
    (lhs.finish(), rhs)
}

pub fn kernel_identity_check(kind: KernelKind, l: i64, a: i64) -> VerificationRecord {
    let (lhs, rhs) = kernel_identity_sides(kind, l, a);
    let params = FamilyParams::new().with("L", l).with("a", a);
    compare_laurent(&format!("TR-{kind}"), params, &lhs, &rhs)
}

/// Finitely supported weights `alpha(j)`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AlphaSeq(BTreeMap<i64, QLaurent>);

impl AlphaSeq {
    pub fn new() -> Self {
        AlphaSeq(BTreeMap::new())
    }

    pub fn delta(j: i64) -> Self {
        let mut a = Self::new();
        a.insert(j, QLaurent::one());
        a
    }

    /// Adds `w` to `alpha(j)`.
    pub fn insert(&mut self, j: i64, w: QLaurent) {
        let v = match self.0.remove(&j) {
            Some(old) => old + w,
            None => w,
        };
        if !v.is_zero() {
            self.0.insert(j, v);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, &QLaurent)> {
        self.0.iter().map(|(j, w)| (*j, w))
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn plus(&self, other: &AlphaSeq) -> AlphaSeq {
        let mut out = self.clone();
        for (j, w) in other.iter() {
            out.insert(j, w.clone());
        }
        out
    }

    /// `F(L) = sum_j alpha(j) [input binomial]` for the given kernel shape.
    pub fn input_sum(&self, kind: KernelKind, l: i64) -> QLaurent {
        let mut acc = LaurentSum::new();
        for (j, w) in self.iter() {
            let b = kind.input_binomial(l, j);
            if !b.is_zero() {
                acc.add(&(w * b.as_ref()));
            }
        }
        acc.finish()
    }
}

/// `sum_k kernel(L, k) F(k)` for an arbitrary input family.
pub fn transform_lhs(kind: KernelKind, l: i64, f: impl Fn(i64) -> QLaurent) -> QLaurent {
    let mut acc = LaurentSum::new();
    for k in 0..=kernel_k_max(kind, l) {
        let fk = f(k);
        if !fk.is_zero() {
            acc.add(&(kernel(kind, l, k).as_ref() * &fk));
        }
    }
    acc.finish()
}

/// Output side `sum_j alpha(j) q^{w(j)} [output binomial]`.
pub fn transform_rhs(kind: KernelKind, alpha: &AlphaSeq, l: i64) -> QLaurent {
    let mut acc = LaurentSum::new();
    for (j, w) in alpha.iter() {
        let b = kind.output_binomial(l, j);
        if !b.is_zero() {
            acc.add_shifted(&(w * b.as_ref()), kind.output_weight(j), false);
        }
    }
    acc.finish()
}

/// Both sides of the bounded transform law; they agree exactly.
pub fn apply_transform(kind: KernelKind, alpha: &AlphaSeq, l: i64) -> (QLaurent, QLaurent) {
    let lhs = transform_lhs(kind, l, |k| alpha.input_sum(kind, k));
    (lhs, transform_rhs(kind, alpha, l))
}

/// `sum_m q^{weight(m,k)} / (q)_m`, truncated.
fn inner_m_series(kind: KernelKind, k: i64, trunc: usize) -> QSeries {
    let mut acc = QSeries::zero(trunc);
    let mut m = 0;
    loop {
        let w = kind.weight(m, k);
        if w > trunc as i64 {
            break;
        }
        acc = acc + inv_q_poch(Some(m as usize), trunc).shift(w as usize);
        m += 1;
    }
    acc
}

/// Left side of the limit law,
/// `sum_{m,k} q^{weight(m,k)} / ((q)_m (q)_{width(k)}) F(k)` modulo `q^(trunc+1)`.
/// Both kernel weights grow in `k`, so the sum stops once `weight(0,k) > trunc`.
pub fn apply_limit_transform(
    kind: KernelKind,
    f: impl Fn(i64) -> Result<QSeries>,
    trunc: usize,
) -> Result<QSeries> {
    let mut acc = QSeries::zero(trunc);
    let mut k = 0;
    while kind.weight(0, k) <= trunc as i64 {
        let fk = f(k)?;
        if !fk.is_zero() {
            let den = inv_q_poch(Some(kind.width(k) as usize), trunc);
            acc = acc + inner_m_series(kind, k, trunc) * den * fk;
        }
        k += 1;
    }
    Ok(acc)
}

/// Same, with `F(k)` a polynomial (possibly with rational coefficients).
pub fn apply_limit_transform_poly(
    kind: KernelKind,
    f: impl Fn(i64) -> Result<QLaurent>,
    trunc: usize,
) -> Result<QSeries> {
    apply_limit_transform(kind, |k| f(k)?.to_series(trunc), trunc)
}

/// Right side of the limit law, `(1/(q)_inf) sum_j alpha(j) q^{w(j)}`.
pub fn limit_rhs(kind: KernelKind, alpha: &AlphaSeq, trunc: usize) -> Result<QSeries> {
    let mut acc = LaurentSum::new();
    for (j, w) in alpha.iter() {
        acc.add_shifted(w, kind.output_weight(j), false);
    }
    let s = acc.finish().truncated(trunc as i64).to_series(trunc)?;
    Ok(s * inv_q_poch(None, trunc))
}
