//! Single alternating sums over `[2L, .]` and `[2L+1, .]` and their product forms.

use num_rational::BigRational;

use crate::error::Result;
use crate::gsum::{alt_sum, AltSumSpec, BinomFactor, Linear};
use crate::qbinom::{poch_finite, qbin, Monomial, PochSpec};
use crate::qpoly::QLaurent;

/// Which of the nine sums.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum S3 {
    Ft,
    I2,
    I2Odd,
    S27,
    A,
    B,
    X,
    Y,
    Z,
    C,
}

impl S3 {
    /// `(A, B, top offset, bottom offset)` of `sum (-1)^j q^{A j^2 + B j} [2L + t, L - o - 2j]`.
    fn shape(self) -> (i64, i64, i64, i64) {
        match self {
            S3::Ft => (2, 1, 1, 0),
            S3::I2 => (2, 0, 0, 0),
            S3::I2Odd => (2, 0, 1, 0),
            S3::S27 => (2, 2, 1, 0),
            S3::A => (2, 0, 0, 1),
            S3::B => (2, -2, 0, 0),
            S3::X => (2, -1, 0, 0),
            S3::Y => (2, 1, 0, 1),
            S3::Z => (2, -1, 1, 0),
            S3::C => (2, -1, 0, 1),
        }
    }

    pub fn spec(self, l: i64) -> AltSumSpec {
        let (a, b, t, o) = self.shape();
        AltSumSpec::int(a, b, 0, vec![BinomFactor::new(Linear::new(2 * l + t, 0), Linear::new(l - o, -2))])
    }

    pub fn sum(self, l: i64) -> QLaurent {
        alt_sum(&self.spec(l)).expect("integer exponents")
    }

    /// Product form.
    pub fn closed(self, l: i64) -> Result<QLaurent> {
        let p = |c: i64, e: i64, n: i64| poch_finite(&PochSpec::finite(vec![Monomial::new(c, e)], 2, n));
        let bin = |terms: &[(i64, i64)]| {
            QLaurent::from_terms(terms.iter().map(|&(c, e)| (e, BigRational::from_integer(c.into()))))
        };
        Ok(match self {
            S3::Ft => p(-1, 2, l)?,
            S3::I2 | S3::I2Odd => p(-1, 1, l)?,
            S3::S27 => p(-1, 1, l)?.shift(l),
            S3::A => {
                if l == 0 {
                    return Ok(QLaurent::zero());
                }
                &p(-1, 1, l - 1)? * &bin(&[(1, 0), (-1, 2 * l)])
            }
            S3::B => {
                let v = p(-1, -1, l)?.shift(l);
                v.to_polynomial()?
            }
            S3::X => &p(-1, 2, l - 1)? * &bin(&[(1, 0), (1, l)]),
            S3::Y => {
                if l == 0 {
                    return Ok(QLaurent::zero());
                }
                &p(-1, 2, l - 1)? * &bin(&[(1, 0), (-1, l)])
            }
            S3::Z => {
                let half = BigRational::new(1.into(), 2.into());
                (&p(-1, 0, l)? * &bin(&[(1, 0), (1, l), (1, l + 1), (-1, 2 * l + 1)])).scale(&half)
            }
            S3::C => {
                // the product form is read as 0 at L = 0
                if l == 0 {
                    return Ok(QLaurent::zero());
                }
                let first = &bin(&[(1, 0), (1, l)]) * &bin(&[(1, 0), (-1, 2 * l)]);
                let second = &bin(&[(1, l - 1), (-1, 2 * l - 1)]) * &bin(&[(1, 0), (1, 2)]);
                &p(-1, 2, l - 2)? * &(first + second)
            }
        })
    }
}

/// `(1 + q - q^L)[L-1, k] + q^{2L-2k}[L-1, k-1] + (q^L - q)[L-2, k]`.
pub fn prodinger_rhs(l: i64, k: i64) -> QLaurent {
    let a = QLaurent::from_int_coeffs(0, &[1, 1]) - QLaurent::q_pow(l);
    let c = QLaurent::q_pow(l) - QLaurent::q_pow(1);
    &(&a * qbin(l - 1, k, 1).as_ref()) + &qbin(l - 1, k - 1, 1).shift(2 * l - 2 * k) + &c * qbin(l - 2, k, 1).as_ref()
}
