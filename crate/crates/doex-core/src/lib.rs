//! Exact symbolic engine for trimmed double Ore extensions of type (14641).
//!
//! The engine works in the free algebra on `x1, x2, y1, y2` over the fraction
//! field of `Q[q12, q11, p12, p11, f, g, p, q]`, optionally modulo quadratic
//! minimal-polynomial constraints such as `p^2 = -1`. Each of the 26 classified
//! families contributes six quadratic rewriting rules (two non-mixing, four
//! mixing); iterating them computes PBW normal forms, from which commutators,
//! centers, normal elements and the closed-form commutation identities are all
//! derived exactly.
//!
//! Module layout:
//! - [`params`]: the scalar field (exact rational functions under constraints)
//! - [`algebra`]: words, bidegrees and free-algebra elements
//! - [`rewrite`]: single-step reduction, normal forms, termination and
//!   local-confluence certification
//! - [`family`]: family data (`P`, `Q`, the sigma matrix), rule construction
//!   and the compatibility checker
//! - [`center`]: degree-by-degree centrality systems, kernel extraction,
//!   normality witnesses and the cancellation report
//! - [`formulas`]: closed-form normal forms and recursions for powers of the
//!   generators, compared exactly against the rewrite engine

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod algebra;
pub mod center;
pub mod family;
pub mod formulas;
pub mod params;
pub mod rewrite;

pub use algebra::{Bidegree, Element, Letter, PbwMonomial, Word};
pub use family::FamilySpec;
pub use params::{ConstraintSet, ParamName, Scalar};
pub use rewrite::RewriteSystem;
