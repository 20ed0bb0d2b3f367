//! A small expression language for q-series entered at the command line.
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := '-' factor | atom ('^' int)?
//! atom   := int | 'q' | '(' expr ')'
//!         | 'P(' mono (',' mono)* ';' mono (';' (nat|'inf'))? ')'
//!         | 'qbin(' int ',' int (';' mono)? ')'
//! mono   := ['-'] ('q' ('^' int)? | int)
//! ```
//!
//! `q^n` written directly is a single power of `q`; `(q)^n` is a power node.

mod ast;
mod eval;
mod parser;
mod printer;

pub use ast::Expr;
pub use eval::eval_expr;
pub use parser::{parse, ParseError};

use crate::error::Result;
use crate::qpoly::QSeries;

/// Parses and evaluates in one step.
pub fn eval_str(text: &str, trunc: usize) -> Result<QSeries> {
    eval_expr(&parse(text)?, trunc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qbinom::{Monomial, PochLength};
    use proptest::prelude::*;

    #[test]
    fn parses_single_pochhammer() {
        let e = parse("P(-q;q^2;inf)").unwrap();
        assert_eq!(
            e,
            Expr::Poch { args: vec![Monomial::new(-1, 1)], base: Monomial::q(2), length: PochLength::Infinite }
        );
        assert_eq!(parse("P(-q;q^2)").unwrap(), e);
    }

    #[test]
    fn parses_product_quotient() {
        let e = parse("P(q^20,q^1,q^19;q^20;inf) / P(q;q;inf)").unwrap();
        let Expr::Div(a, b) = e else { panic!("not a quotient") };
        assert!(matches!(*a, Expr::Poch { ref args, .. } if args.len() == 3));
        assert!(matches!(*b, Expr::Poch { .. }));
    }

    #[test]
    fn error_position_is_one_based() {
        let err = parse("P(q;q").unwrap_err();
        assert_eq!(err.position, 6);
        assert_eq!(err.found, "end of input");
        assert!(err.expected.iter().any(|x| x == "')'"));
        assert_eq!(parse("1 + ").unwrap_err().position, 5);
        assert_eq!(parse("2 $ 3").unwrap_err().position, 3);
        assert_eq!(parse("q q").unwrap_err().position, 3);
    }

    #[test]
    fn evaluation_examples() {
        assert_eq!(eval_str("1/(1-q)", 3).unwrap(), QSeries::from_int_coeffs(&[1, 1, 1, 1], 3));
        assert_eq!(eval_str("P(q;q;inf)", 5).unwrap(), QSeries::from_int_coeffs(&[1, -1, -1, 0, 0, 1], 5));
        assert_eq!(eval_str("qbin(4,2;q)", 6).unwrap(), QSeries::from_int_coeffs(&[1, 1, 2, 1, 1], 6));
        assert_eq!(eval_str("qbin(3,1;q^2)", 6).unwrap(), QSeries::from_int_coeffs(&[1, 0, 1, 0, 1], 6));
        assert_eq!(eval_str("(1+q)^2 - q^2", 4).unwrap(), QSeries::from_int_coeffs(&[1, 2], 4));
        assert_eq!(eval_str("-(q)^3 + 2*q^3", 4).unwrap(), QSeries::from_int_coeffs(&[0, 0, 0, 1], 4));
        assert_eq!(eval_str("P(-1;q^2;2)", 6).unwrap(), QSeries::from_int_coeffs(&[2, 0, 2], 6));
    }

    #[test]
    fn evaluation_errors() {
        use crate::error::QError;
        assert_eq!(eval_str("1/q", 3), Err(QError::ZeroConstantTerm));
        assert!(matches!(eval_str("P(q;1;inf)", 3), Err(QError::InvalidBase(_))));
        assert!(matches!(eval_str("P(q;2*q)", 3), Err(QError::Syntax(_))));
        assert_eq!(eval_str("q^-1", 3), Err(QError::NotAPowerSeries { exponent: -1 }));
    }

    #[test]
    fn printer_shapes() {
        for s in ["(q)^2", "q^2", "-q^3 + 1", "1 - (2 - q)", "P(-q,2;q^2;5)", "qbin(-1,3;q^2)", "(-q)^2 / q"] {
            let e = parse(s).unwrap();
            assert_eq!(parse(&e.to_string()).unwrap(), e, "{s} printed as {e}");
        }
        assert_ne!(parse("(q)^2").unwrap(), parse("q^2").unwrap());
    }

    fn arb_mono() -> impl Strategy<Value = Monomial> {
        prop_oneof![
            (-5i64..=5).prop_map(|c| Monomial::new(c, 0)),
            (prop::bool::ANY, -6i64..=20)
                .prop_filter("nonzero exponent", |(_, e)| *e != 0)
                .prop_map(|(neg, e)| Monomial::new(if neg { -1 } else { 1 }, e)),
        ]
    }

    fn arb_leaf() -> impl Strategy<Value = Expr> {
        prop_oneof![
            (0u64..1000).prop_map(Expr::Int),
            (-5i64..=30).prop_map(Expr::QPower),
            (
                prop::collection::vec(arb_mono(), 1..4),
                arb_mono(),
                prop_oneof![Just(PochLength::Infinite), (0i64..9).prop_map(PochLength::Finite)],
            )
                .prop_map(|(args, base, length)| Expr::Poch { args, base, length }),
            (-3i64..12, -3i64..12, arb_mono()).prop_map(|(top, bottom, base)| Expr::QBin { top, bottom, base }),
        ]
    }

    fn arb_expr() -> impl Strategy<Value = Expr> {
        arb_leaf().prop_recursive(4, 48, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(Expr::neg),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::add(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::sub(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::mul(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::div(a, b)),
                (inner, -4i64..=6).prop_map(|(a, n)| Expr::pow(a, n)),
            ]
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(500))]
        #[test]
        fn print_parse_round_trip(e in arb_expr()) {
            prop_assert!(e.depth() <= 5);
            let text = e.to_string();
            prop_assert_eq!(parse(&text).unwrap(), e);
        }
    }
}
