use crate::qbinom::{Monomial, PochLength};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    /// Nonnegative literal; negation is a separate node.
    Int(u64),
    QPower(i64),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i64),
    Poch {
        args: Vec<Monomial>,
        base: Monomial,
        length: PochLength,
    },
    QBin {
        top: i64,
        bottom: i64,
        base: Monomial,
    },
}

#[allow(clippy::should_implement_trait)]
impl Expr {
    pub fn neg(e: Expr) -> Expr {
        Expr::Neg(Box::new(e))
    }

    pub fn add(a: Expr, b: Expr) -> Expr {
        Expr::Add(Box::new(a), Box::new(b))
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        Expr::Sub(Box::new(a), Box::new(b))
    }

    pub fn mul(a: Expr, b: Expr) -> Expr {
        Expr::Mul(Box::new(a), Box::new(b))
    }

    pub fn div(a: Expr, b: Expr) -> Expr {
        Expr::Div(Box::new(a), Box::new(b))
    }

    pub fn pow(a: Expr, n: i64) -> Expr {
        Expr::Pow(Box::new(a), n)
    }

    pub fn depth(&self) -> usize {
        match self {
            Expr::Int(_) | Expr::QPower(_) | Expr::Poch { .. } | Expr::QBin { .. } => 1,
            Expr::Neg(a) | Expr::Pow(a, _) => 1 + a.depth(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                1 + a.depth().max(b.depth())
            }
        }
    }
}
