//! Exact computations in τ-tilting theory for quiver algebras over prime
//! fields: modules, two-term (pre)silting complexes, torsion pairs, wide
//! subcategories and King stability.

pub mod algebra;
pub mod error;
pub mod linalg;
pub mod rational;
pub mod repmod;
pub mod stability;
pub mod twoterm;
pub mod verify;

pub use algebra::{Algebra, Limits, Presentation};
pub use error::{Error, Result};
pub use repmod::{Module, Morphism};
pub use stability::{StabilityForm, TorsionPairs};
pub use twoterm::{Catalog, TwoTermComplex};
pub use verify::{run_suite, Check, Status, Verdict, VerificationPlan};
