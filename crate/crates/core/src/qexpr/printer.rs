use std::fmt;

use super::ast::Expr;
use crate::qbinom::{Monomial, PochLength};

// binding strength of the surrounding position
const EXPR: u8 = 0;
const TERM: u8 = 1;
const FACTOR: u8 = 2;
const ATOM: u8 = 3;

fn mono(f: &mut fmt::Formatter<'_>, m: &Monomial) -> fmt::Result {
    match (m.coeff, m.exp) {
        (c, 0) => write!(f, "{c}"),
        (1, 1) => write!(f, "q"),
        (-1, 1) => write!(f, "-q"),
        (1, e) => write!(f, "q^{e}"),
        (-1, e) => write!(f, "-q^{e}"),
        // not producible by the parser; printed as an explicit product
        (c, e) => write!(f, "{c}*q^{e}"),
    }
}

fn write_expr(f: &mut fmt::Formatter<'_>, e: &Expr, ctx: u8) -> fmt::Result {
    let (own, body): (u8, &dyn Fn(&mut fmt::Formatter<'_>) -> fmt::Result) = match e {
        Expr::Int(n) => (ATOM, &move |f| write!(f, "{n}")),
        Expr::QPower(1) => (ATOM, &|f| write!(f, "q")),
        Expr::QPower(n) => (FACTOR, &move |f| write!(f, "q^{n}")),
        Expr::Neg(a) => (FACTOR, &move |f| {
            write!(f, "-")?;
            write_expr(f, a, FACTOR)
        }),
        Expr::Add(a, b) => (EXPR, &move |f| {
            write_expr(f, a, EXPR)?;
            write!(f, " + ")?;
            write_expr(f, b, TERM)
        }),
        Expr::Sub(a, b) => (EXPR, &move |f| {
            write_expr(f, a, EXPR)?;
            write!(f, " - ")?;
            write_expr(f, b, TERM)
        }),
        Expr::Mul(a, b) => (TERM, &move |f| {
            write_expr(f, a, TERM)?;
            write!(f, " * ")?;
            write_expr(f, b, FACTOR)
        }),
        Expr::Div(a, b) => (TERM, &move |f| {
            write_expr(f, a, TERM)?;
            write!(f, " / ")?;
            write_expr(f, b, FACTOR)
        }),
        Expr::Pow(a, n) => (FACTOR, &move |f| {
            // `(q)^n` keeps the node distinct from `q^n`
            let base_ctx = if matches!(**a, Expr::QPower(_)) { ATOM + 1 } else { ATOM };
            write_expr(f, a, base_ctx)?;
            write!(f, "^{n}")
        }),
        Expr::Poch { args, base, length } => (ATOM, &move |f| {
            write!(f, "P(")?;
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                mono(f, a)?;
            }
            write!(f, ";")?;
            mono(f, base)?;
            match length {
                PochLength::Finite(n) => write!(f, ";{n})"),
                PochLength::Infinite => write!(f, ";inf)"),
            }
        }),
        Expr::QBin { top, bottom, base } => (ATOM, &move |f| {
            write!(f, "qbin({top},{bottom};")?;
            mono(f, base)?;
            write!(f, ")")
        }),
    };
    if own < ctx {
        write!(f, "(")?;
        body(f)?;
        write!(f, ")")
    } else {
        body(f)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(f, self, EXPR)
    }
}
