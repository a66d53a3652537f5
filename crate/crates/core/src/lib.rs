//! Executable building theory: affine Coxeter complexes, spherical and Euclidean buildings,
//! F₂ homology certificates, and Σ-invariant verdicts for S-arithmetic Borel groups.

pub mod building;
pub mod certify;
pub mod chevalley;
pub mod complex;
pub mod coxeter;
pub mod homology;
pub mod rational;
pub mod root_system;
pub mod sigma;
pub mod spherical;
