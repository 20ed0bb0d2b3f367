//! Verification outcomes and the ordered parameter tuples they refer to.

use std::fmt;
use std::time::Instant;

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::error::QError;
use crate::qpoly::{QLaurent, QSeries};

/// Named integer parameters in a fixed, family-defined order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FamilyParams(Vec<(String, i64)>);

impl FamilyParams {
    pub fn new() -> Self {
        FamilyParams(Vec::new())
    }

    pub fn with(mut self, name: &str, value: i64) -> Self {
        self.set(name, value);
        self
    }

    pub fn set(&mut self, name: &str, value: i64) {
        match self.0.iter_mut().find(|(n, _)| n == name) {
            Some(slot) => slot.1 = value,
            None => self.0.push((name.to_string(), value)),
        }
    }

    pub fn get(&self, name: &str) -> Option<i64> {
        self.0.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, i64)> {
        self.0.iter().map(|(n, v)| (n.as_str(), *v))
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn from_pairs<'a, I: IntoIterator<Item = (&'a str, i64)>>(pairs: I) -> Self {
        let mut p = FamilyParams::new();
        for (n, v) in pairs {
            p.set(n, v);
        }
        p
    }
}

impl fmt::Display for FamilyParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (n, v)) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{n}={v}")?;
        }
        Ok(())
    }
}

impl Serialize for FamilyParams {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (n, v) in &self.0 {
            map.serialize_entry(n, v)?;
        }
        map.end()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Status {
    Equal,
    Mismatch,
    NonNegative,
    NegativeCoefficient,
    Error,
}

impl Status {
    pub fn is_pass(self) -> bool {
        matches!(self, Status::Equal | Status::NonNegative)
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Outcome of one check. `first_mismatch` is the smallest exponent where the
/// sides differ, or where a negative coefficient sits.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationRecord {
    pub family: String,
    pub params: FamilyParams,
    pub status: Status,
    pub first_mismatch: Option<i64>,
    pub lhs_coeff: Option<String>,
    pub rhs_coeff: Option<String>,
    pub truncation: Option<usize>,
    pub elapsed_ms: f64,
    #[serde(skip)]
    pub detail: Option<String>,
}

impl VerificationRecord {
    pub fn new(family: &str, params: FamilyParams, status: Status) -> Self {
        VerificationRecord {
            family: family.to_string(),
            params,
            status,
            first_mismatch: None,
            lhs_coeff: None,
            rhs_coeff: None,
            truncation: None,
            elapsed_ms: 0.0,
            detail: None,
        }
    }

    pub fn error(family: &str, params: FamilyParams, err: &QError) -> Self {
        let mut r = Self::new(family, params, Status::Error);
        r.detail = Some(err.to_string());
        r
    }

    pub fn passed(&self) -> bool {
        self.status.is_pass()
    }

    pub fn with_detail(mut self, d: impl Into<String>) -> Self {
        self.detail = Some(d.into());
        self
    }

    pub fn with_truncation(mut self, t: Option<usize>) -> Self {
        self.truncation = t;
        self
    }
}

/// Compares two exact polynomials.
pub fn compare_laurent(family: &str, params: FamilyParams, lhs: &QLaurent, rhs: &QLaurent) -> VerificationRecord {
    match lhs.first_difference(rhs) {
        None => VerificationRecord::new(family, params, Status::Equal),
        Some(e) => {
            let mut r = VerificationRecord::new(family, params, Status::Mismatch);
            r.first_mismatch = Some(e);
            r.lhs_coeff = Some(lhs.coeff(e).to_string());
            r.rhs_coeff = Some(rhs.coeff(e).to_string());
            r
        }
    }
}

/// Compares two series known to the same order.
pub fn compare_series(family: &str, params: FamilyParams, lhs: &QSeries, rhs: &QSeries) -> VerificationRecord {
    let rec = match lhs.first_difference(rhs) {
        Err(e) => VerificationRecord::error(family, params, &e),
        Ok(None) => VerificationRecord::new(family, params, Status::Equal),
        Ok(Some(e)) => {
            let mut r = VerificationRecord::new(family, params, Status::Mismatch);
            r.first_mismatch = Some(e as i64);
            r.lhs_coeff = Some(lhs.coeff(e).to_string());
            r.rhs_coeff = Some(rhs.coeff(e).to_string());
            r
        }
    };
    rec.with_truncation(Some(lhs.trunc().min(rhs.trunc())))
}

/// Positivity verdict for a polynomial.
pub fn nonneg_record(family: &str, params: FamilyParams, p: &QLaurent) -> VerificationRecord {
    match p.first_negative() {
        None => VerificationRecord::new(family, params, Status::NonNegative),
        Some((e, c)) => {
            let mut r = VerificationRecord::new(family, params, Status::NegativeCoefficient);
            r.first_mismatch = Some(e);
            r.lhs_coeff = Some(c.to_string());
            r
        }
    }
}

/// Runs `f` and stamps the wall-clock time on its record.
pub fn timed(f: impl FnOnce() -> VerificationRecord) -> VerificationRecord {
    let start = Instant::now();
    let mut r = f();
    r.elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_serialize_in_insertion_order() {
        let p = FamilyParams::new().with("v", 3).with("i", 1).with("L", 4);
        assert_eq!(serde_json::to_string(&p).unwrap(), r#"{"v":3,"i":1,"L":4}"#);
        assert_eq!(p.to_string(), "v=3 i=1 L=4");
    }

    #[test]
    fn mismatch_carries_discrepancy() {
        let a = QLaurent::from_int_coeffs(0, &[1, 2, 3]);
        let b = QLaurent::from_int_coeffs(0, &[1, 2, 4]);
        let r = compare_laurent("X", FamilyParams::new(), &a, &b);
        assert_eq!(r.status, Status::Mismatch);
        assert_eq!(r.first_mismatch, Some(2));
        assert_eq!(r.lhs_coeff.as_deref(), Some("3"));
        assert_eq!(r.rhs_coeff.as_deref(), Some("4"));
    }

    #[test]
    fn json_has_stable_fields_and_no_detail() {
        let r = VerificationRecord::new("X", FamilyParams::new().with("L", 1), Status::Equal).with_detail("hidden");
        let v: serde_json::Value = serde_json::to_value(&r).unwrap();
        let keys: Vec<&str> = v.as_object().unwrap().keys().map(|s| s.as_str()).collect();
        let mut expect = vec![
            "family", "params", "status", "first_mismatch", "lhs_coeff", "rhs_coeff", "truncation", "elapsed_ms",
        ];
        expect.sort();
        let mut got = keys.clone();
        got.sort();
        assert_eq!(got, expect);
    }

    #[test]
    fn negative_coefficient_verdict() {
        let r = nonneg_record("X", FamilyParams::new(), &QLaurent::from_int_coeffs(0, &[1, -1]));
        assert_eq!(r.status, Status::NegativeCoefficient);
        assert_eq!(r.first_mismatch, Some(1));
        assert_eq!(r.lhs_coeff.as_deref(), Some("-1"));
        assert!(nonneg_record("X", FamilyParams::new(), &QLaurent::from_int_coeffs(0, &[1, 1])).passed());
    }
}
