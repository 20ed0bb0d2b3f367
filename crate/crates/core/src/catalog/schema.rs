//! Parameter schemas and inclusive ranges `a..b`, where either end may name an
//! earlier parameter with an offset (`1..v`, `0..v-1`, `-L..L`).

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{QError, Result};
use crate::record::FamilyParams;

/// `offset`, `name + offset`, or `-name + offset`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Bound {
    pub param: Option<String>,
    pub negate: bool,
    pub offset: i64,
}

impl Bound {
    pub fn int(v: i64) -> Self {
        Bound { param: None, negate: false, offset: v }
    }

    pub fn param(name: &str, offset: i64) -> Self {
        Bound { param: Some(name.to_string()), negate: false, offset }
    }

    pub fn neg_param(name: &str) -> Self {
        Bound { param: Some(name.to_string()), negate: true, offset: 0 }
    }

    pub fn resolve(&self, p: &FamilyParams) -> Result<i64> {
        match &self.param {
            None => Ok(self.offset),
            Some(n) => {
                let v = p
                    .get(n)
                    .ok_or_else(|| QError::InvalidParams(format!("bound refers to {n}, which is not set before it")))?;
                Ok(if self.negate { -v } else { v } + self.offset)
            }
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.param {
            None => write!(f, "{}", self.offset),
            Some(n) => {
                if self.negate {
                    write!(f, "-")?;
                }
                write!(f, "{n}")?;
                match self.offset {
                    0 => Ok(()),
                    o if o > 0 => write!(f, "+{o}"),
                    o => write!(f, "{o}"),
                }
            }
        }
    }
}

impl FromStr for Bound {
    type Err = QError;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || QError::InvalidParams(format!("cannot read bound '{s}'"));
        if let Ok(v) = s.parse::<i64>() {
            return Ok(Bound::int(v));
        }
        let (negate, rest) = match s.strip_prefix('-') {
            Some(r) => (true, r),
            None => (false, s),
        };
        let split = rest.find(['+', '-']).unwrap_or(rest.len());
        let (name, tail) = rest.split_at(split);
        if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') || name.starts_with(|c: char| c.is_ascii_digit()) {
            return Err(bad());
        }
        let offset = if tail.is_empty() { 0 } else { tail.strip_prefix('+').unwrap_or(tail).parse::<i64>().map_err(|_| bad())? };
        Ok(Bound { param: Some(name.to_string()), negate, offset })
    }
}

impl Serialize for Bound {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Inclusive range of one parameter.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParamRange {
    pub name: String,
    pub lo: Bound,
    pub hi: Bound,
}

impl ParamRange {
    pub fn new(name: &str, lo: Bound, hi: Bound) -> Self {
        ParamRange { name: name.to_string(), lo, hi }
    }

    pub fn ints(name: &str, lo: i64, hi: i64) -> Self {
        Self::new(name, Bound::int(lo), Bound::int(hi))
    }

    /// `a..b` or a single value `a`.
    pub fn parse(name: &str, text: &str) -> Result<Self> {
        let (lo, hi) = match text.split_once("..") {
            Some((a, b)) => (a.parse()?, b.parse()?),
            None => {
                let b: Bound = text.parse()?;
                (b.clone(), b)
            }
        };
        Ok(ParamRange::new(name, lo, hi))
    }
}

impl fmt::Display for ParamRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}={}..{}", self.name, self.lo, self.hi)
    }
}

/// Cartesian product in the given order; later bounds may use earlier values.
pub fn expand(ranges: &[ParamRange]) -> Result<Vec<FamilyParams>> {
    let mut out = vec![FamilyParams::new()];
    for r in ranges {
        let mut next = Vec::new();
        for p in &out {
            let (lo, hi) = (r.lo.resolve(p)?, r.hi.resolve(p)?);
            for x in lo..=hi {
                next.push(p.clone().with(&r.name, x));
            }
        }
        out = next;
    }
    Ok(out)
}

/// One declared parameter: name with optional inclusive limits.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParamSpec {
    pub name: &'static str,
    pub min: Option<Bound>,
    pub max: Option<Bound>,
}

impl ParamSpec {
    pub fn free(name: &'static str) -> Self {
        ParamSpec { name, min: None, max: None }
    }

    pub fn at_least(name: &'static str, lo: Bound) -> Self {
        ParamSpec { name, min: Some(lo), max: None }
    }

    pub fn between(name: &'static str, lo: Bound, hi: Bound) -> Self {
        ParamSpec { name, min: Some(lo), max: Some(hi) }
    }

    pub fn nat(name: &'static str) -> Self {
        Self::at_least(name, Bound::int(0))
    }

    /// Checks the value of this parameter in `p`.
    pub fn check(&self, p: &FamilyParams) -> Result<()> {
        let v = p.get(self.name).ok_or_else(|| QError::InvalidParams(format!("missing parameter {}", self.name)))?;
        if let Some(lo) = &self.min {
            let lo_v = lo.resolve(p)?;
            if v < lo_v {
                return Err(QError::InvalidParams(format!("{}={v} below {lo}", self.name)));
            }
        }
        if let Some(hi) = &self.max {
            let hi_v = hi.resolve(p)?;
            if v > hi_v {
                return Err(QError::InvalidParams(format!("{}={v} above {hi}", self.name)));
            }
        }
        Ok(())
    }
}

impl fmt::Display for ParamSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.min, &self.max) {
            (None, None) => write!(f, "{}", self.name),
            (Some(a), None) => write!(f, "{}>={a}", self.name),
            (None, Some(b)) => write!(f, "{}<={b}", self.name),
            (Some(a), Some(b)) => write!(f, "{a}<={}<={b}", self.name),
        }
    }
}
