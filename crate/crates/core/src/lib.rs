//! Exact intersection-theory engine: free graded rings, characteristic
//! classes, Chow rings of projective bundles and blow-ups, and a symbolic
//! verifier for the multiplicativity of the Mukai-flop correspondence.

pub mod algebra;
pub mod blowup;
pub mod chern;
pub mod flop;
pub mod graded;
pub mod linalg;
pub mod proj_bundle;
pub mod report;

pub use algebra::{Algebra, Homogeneity, Rational};
pub use graded::{AlgebraError, GradedElement, GradedRing, Monomial};
