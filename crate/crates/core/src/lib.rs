//! Exact arithmetic for the continued fractions
//! `c(q, m) = m_k + 1/(q m_{k-1} + 1/(q m_{k-2} + ...))`, their weights,
//! the loop group, continuant polynomials, loop searches and certificates of
//! weight non-uniqueness.

pub mod cert;
pub mod continuant;
pub mod error;
pub mod family;
pub mod fraction;
pub mod numeric;
pub mod scan;
pub mod search;
pub mod store;
pub mod tables;

pub use error::{QfracError, Result};
pub use fraction::{Conductor, Path, PathEval, WeightSq};
