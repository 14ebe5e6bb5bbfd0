//! Cochain complexes from the standard (bar) resolution, cup products,
//! semidirect-product and tensor double complexes with their total-complex
//! products, certified cohomology dimensions through minimal resolutions,
//! and Nakaoka dimensions for wreath products.
//!
//! Degrees explode as |G|^n, so every constructor takes an explicit
//! [`Budget`] and refuses loudly (reporting the exact demand) rather than
//! thrash. Differentials of bar complexes are never stored as matrices in
//! the large regime: rows are generated on the fly and streamed through the
//! elimination engine.

mod bar;
mod double;
mod nakaoka;
mod resolution;

pub use bar::{BarCochain, BarComplex, DimsReport, Route};
// double complex re-exports wired up below
// nakaoka re-export wired up below
pub use resolution::MinimalResolution;

use thiserror::Error;

/// Hard cap on basis elements per (bi)degree. The default (2^26) admits the
/// degree-3 differential of an order-81 group (81^4 ≈ 4.3e7 rows, streamed)
/// and refuses the degree-6 differential of C_27 (27^7 ≈ 1e10).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub max_basis: u64,
    /// Above this row count, exact full-pass elimination is replaced by the
    /// certified two-sided route (resolution dims + streamed verification).
    pub full_pass_rows: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_basis: 1 << 26, full_pass_rows: 1 << 20 }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HomalgError {
    #[error("budget exceeded: degree {degree} demands {demand} basis elements, budget {budget}")]
    BudgetExceeded { degree: usize, demand: u64, budget: u64 },
    #[error("degree {0} exceeds the complex cutoff {1}")]
    DegreeOverflow(usize, usize),
    #[error("cochain lives in the wrong complex or degree: {0}")]
    Mismatch(String),
    #[error("internal lift failed at degree {0}; this indicates a bug")]
    LiftFailed(usize),
    #[error("group error: {0}")]
    Group(#[from] crate::groups::GroupError),
    #[error("linear algebra error: {0}")]
    Linalg(#[from] crate::error::FplinalgError),
    #[error("{0}")]
    Unsupported(String),
}

pub(crate) fn checked_pow(base: u64, exp: u32, degree: usize, budget: &Budget) -> Result<u64, HomalgError> {
    let mut acc: u64 = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base).unwrap_or(u64::MAX);
        if acc > budget.max_basis {
            return Err(HomalgError::BudgetExceeded {
                degree,
                demand: acc,
                budget: budget.max_basis,
            });
        }
    }
    Ok(acc)
}
