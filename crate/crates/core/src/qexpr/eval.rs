use num_bigint::BigInt;
use num_rational::BigRational;

use super::ast::Expr;
use crate::error::{QError, Result};
use crate::qbinom::{poch_finite, poch_infinite, qbin, Monomial, PochLength, PochSpec};
use crate::qpoly::QSeries;

fn base_power(base: &Monomial, allow_nonpositive: bool) -> Result<i64> {
    if base.coeff != 1 || (!allow_nonpositive && base.exp <= 0) {
        return Err(QError::InvalidBase(format!("{base} is not a positive power of q")));
    }
    Ok(base.exp)
}

/// Evaluates an expression modulo `q^(trunc+1)`.
pub fn eval_expr(e: &Expr, trunc: usize) -> Result<QSeries> {
    Ok(match e {
        Expr::Int(n) => QSeries::constant(&BigRational::from_integer(BigInt::from(*n)), trunc),
        Expr::QPower(n) => {
            if *n < 0 {
                return Err(QError::NotAPowerSeries { exponent: *n });
            }
            QSeries::q_pow(*n as usize, trunc)
        }
        Expr::Neg(a) => -&eval_expr(a, trunc)?,
        Expr::Add(a, b) => eval_expr(a, trunc)? + eval_expr(b, trunc)?,
        Expr::Sub(a, b) => eval_expr(a, trunc)? - eval_expr(b, trunc)?,
        Expr::Mul(a, b) => eval_expr(a, trunc)? * eval_expr(b, trunc)?,
        Expr::Div(a, b) => eval_expr(a, trunc)? * eval_expr(b, trunc)?.inverse_unit()?,
        Expr::Pow(a, n) => eval_expr(a, trunc)?.pow(*n)?,
        Expr::Poch { args, base, length } => match length {
            PochLength::Infinite => {
                let d = base_power(base, false)?;
                poch_infinite(&PochSpec::infinite(args.clone(), d), trunc)?
            }
            PochLength::Finite(n) => {
                let d = base_power(base, true)?;
                poch_finite(&PochSpec::finite(args.clone(), d, *n))?.to_series(trunc)?
            }
        },
        Expr::QBin { top, bottom, base } => {
            let d = base_power(base, false)?;
            let d = u32::try_from(d).map_err(|_| QError::InvalidBase(format!("{base} is too large")))?;
            qbin(*top, *bottom, d).to_series(trunc)?
        }
    })
}
