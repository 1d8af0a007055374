//! Bigraded homology, Jones polynomial and cross-checks.

mod checks;
mod compute;
mod tables;

use thiserror::Error;

pub use checks::{
    diagram_field_table, khovanov_field_table, les_consistency, mirror_duality_check, uct_check, LesReport, LesStrand,
    Mismatch, MirrorReport, UctReport,
};
pub use compute::{field_homology, integral_homology, integral_homology_with_stats, HomologyStats};
pub use tables::{BigradedGroup, Bigrading, FieldTable, GroupEntry, LaurentPoly};

use crate::braid::BraidError;
use crate::complex::{ComplexError, FrobeniusTheory};
use crate::diagram::DiagramError;
use crate::linalg::LinalgError;

#[derive(Debug, Error)]
pub enum HomologyError {
    #[error("{0} is a filtered theory; use the spectral sequences")]
    FilteredTheory(FrobeniusTheory),
    #[error("field homology needs Q or Z_p")]
    NotAField,
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error(transparent)]
    Braid(#[from] BraidError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Σ (−1)^i q^j rk H^{i,j}.
pub fn jones_polynomial(h: &BigradedGroup) -> LaurentPoly {
    h.jones()
}
