pub mod catalog;
pub mod error;
pub mod gsum;
pub mod positivity;
pub mod qbinom;
pub mod qexpr;
pub mod qpoly;
pub mod record;
pub mod runner;
pub mod transforms;

pub use error::{QError, Result};
pub use qpoly::{QLaurent, QSeries};
