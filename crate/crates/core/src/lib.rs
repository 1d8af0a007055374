//! Khovanov homology of braid closures.

pub mod braid;
pub mod diagram;
pub mod linalg;
pub mod complex;
pub mod homology;
pub mod spectral;
pub mod thin;
pub mod suite;
