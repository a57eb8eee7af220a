//! Bigraded torsion products over polynomial cohomology rings and the
//! weight-filtered cohomology they assemble into.

pub mod cli;
pub mod graded;
pub mod groups;
pub mod linalg;
pub mod random;
pub mod selftest;
pub mod spectral;
pub mod strata;
pub mod tor;
pub mod toric;
